//! Capacity sequences as first-class objects.
//!
//! A [`CapacitySequence`] is an eagerly evaluated exact table
//! `c_0, …, c_{k_max}` stored as integer numerators over one common
//! denominator. Eager tables keep the max-plus composition for disjoint
//! unions — which does random access over both inputs — linear in table
//! size rather than quadratic in evaluator calls.
//!
//! The disjoint-union rule is max-plus convolution:
//! `c_k(X ⊔ X′) = max_{k₁+k₂=k} (c_{k₁}(X) + c_{k₂}(X′))`,
//! implemented naively in `O(k_max²)` per pair; no speedup assuming
//! concavity is taken. With the `parallel` feature the convolution and the
//! batch tables parallelize with results identical to the sequential path.

use crate::domains::{ball_scaled_table, ellipsoid_scaled_table, DomainSpec};
use crate::rational::{decimal_string, render_rational, Rational};
use num::bigint::BigInt;
use num::{Integer, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::io::{self, Write};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Exact capacity table `c_0..c_{k_max}`: numerators over one positive
/// common denominator. Immutable after construction; all values are exact
/// rationals (`value(k) = nums[k] / denom`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacitySequence {
    denom: BigInt,
    nums: Vec<BigInt>,
}

/// Contract violation on sequence operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error(
        "requested index {requested} is beyond the evaluated range 0..={available} of an input sequence"
    )]
    OutOfRange { requested: u64, available: u64 },
}

/// Outcome of [`verify_monotone`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneCheck {
    /// `c_0 = 0` and the table is nondecreasing on the checked window.
    Pass,
    /// Smallest index at which the axioms fail: index 0 when `c_0 ≠ 0`,
    /// otherwise the first `k` with `c_k < c_{k−1}`.
    ViolationAt(u64),
}

/// One exported table row (JSON form).
#[derive(Debug, Clone, Serialize)]
pub struct SequenceRecord {
    pub k: u64,
    /// Exact value rendered `p` or `p/q`.
    pub ck: String,
    /// Fixed-point decimal rendering, present when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
}

impl CapacitySequence {
    pub(crate) fn from_scaled(denom: BigInt, nums: Vec<BigInt>) -> Self {
        assert!(denom.is_positive(), "denominator must be positive");
        assert!(!nums.is_empty(), "a sequence contains at least c_0");
        CapacitySequence { denom, nums }
    }

    /// Builds a sequence from an explicit table of exact values. The table
    /// is not required to satisfy the capacity axioms — that is what
    /// [`verify_monotone`] checks.
    ///
    /// # Panics
    /// If `values` is empty.
    pub fn from_values(values: &[Rational]) -> Self {
        assert!(!values.is_empty(), "a sequence contains at least c_0");
        let denom = values
            .iter()
            .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        let nums = values
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        CapacitySequence { denom, nums }
    }

    /// Largest index the table is evaluated to.
    pub fn k_max(&self) -> u64 {
        (self.nums.len() - 1) as u64
    }

    /// Exact value `c_k`, reduced to lowest terms.
    ///
    /// # Panics
    /// If `k` exceeds [`k_max`](Self::k_max).
    pub fn value(&self, k: u64) -> Rational {
        assert!(
            k <= self.k_max(),
            "index {k} beyond evaluated range 0..={}",
            self.k_max()
        );
        Rational::new(self.nums[k as usize].clone(), self.denom.clone())
    }

    /// All values `c_0..c_{k_max}` in order.
    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        (0..=self.k_max()).map(|k| self.value(k))
    }

    /// Raw scaled table: `(denominator, numerators)` with
    /// `c_k = nums[k] / denom`. For exact windowed scans that want to skip
    /// per-index reduction.
    pub(crate) fn scaled(&self) -> (&BigInt, &[BigInt]) {
        (&self.denom, &self.nums)
    }

    /// Streams the table as CSV with header `k,c_k` (plus `c_k_decimal`
    /// when `decimal_digits` is given) and exact `p/q` values.
    pub fn write_csv<W: Write>(&self, mut out: W, decimal_digits: Option<usize>) -> io::Result<()> {
        match decimal_digits {
            None => {
                writeln!(out, "k,c_k")?;
                for (k, num) in self.nums.iter().enumerate() {
                    let v = Rational::new(num.clone(), self.denom.clone());
                    writeln!(out, "{k},{}", render_rational(&v))?;
                }
            }
            Some(digits) => {
                writeln!(out, "k,c_k,c_k_decimal")?;
                for (k, num) in self.nums.iter().enumerate() {
                    let v = Rational::new(num.clone(), self.denom.clone());
                    writeln!(
                        out,
                        "{k},{},{}",
                        render_rational(&v),
                        decimal_string(&v, digits)
                    )?;
                }
            }
        }
        Ok(())
    }

    /// The table as JSON-serializable records.
    pub fn records(&self, decimal_digits: Option<usize>) -> Vec<SequenceRecord> {
        self.nums
            .iter()
            .enumerate()
            .map(|(k, num)| {
                let v = Rational::new(num.clone(), self.denom.clone());
                SequenceRecord {
                    k: k as u64,
                    ck: render_rational(&v),
                    decimal: decimal_digits.map(|d| decimal_string(&v, d)),
                }
            })
            .collect()
    }
}

/// Evaluates the capacity sequence of a domain spec to index `k_max` by
/// structural recursion: closed-form staircase for balls, lattice sweep
/// for ellipsoids, scalar multiple for scalings, max-plus convolution fold
/// for unions. Uses the data-parallel paths when the `parallel` feature is
/// enabled.
pub fn sequence_of(spec: &DomainSpec, k_max: u64) -> CapacitySequence {
    sequence_of_impl(spec, k_max, cfg!(feature = "parallel"))
}

/// Sequential variant of [`sequence_of`]: identical output, no thread pool.
/// This is the code path builds without the `parallel` feature always take;
/// exposed so benchmarks can compare both in one binary.
pub fn sequence_of_seq(spec: &DomainSpec, k_max: u64) -> CapacitySequence {
    sequence_of_impl(spec, k_max, false)
}

pub(crate) fn sequence_of_impl(spec: &DomainSpec, k_max: u64, parallel: bool) -> CapacitySequence {
    match spec {
        DomainSpec::Ball { radius } => {
            let (denom, nums) = ball_scaled_table(radius, k_max);
            CapacitySequence::from_scaled(denom, nums)
        }
        DomainSpec::Ellipsoid { a, b } => {
            let (denom, nums) = ellipsoid_scaled_table(a, b, k_max, parallel);
            CapacitySequence::from_scaled(denom, nums)
        }
        DomainSpec::Scale { factor, inner } => {
            let seq = sequence_of_impl(inner, k_max, parallel);
            let denom = seq.denom * factor.denom();
            let nums = seq.nums.into_iter().map(|n| n * factor.numer()).collect();
            CapacitySequence::from_scaled(denom, nums)
        }
        DomainSpec::Union { parts } => {
            let mut seqs = parts.iter().map(|p| sequence_of_impl(p, k_max, parallel));
            let first = seqs.next().expect("unions are nonempty by construction");
            seqs.fold(first, |acc, next| {
                convolve_impl(&acc, &next, k_max, parallel)
                    .expect("parts are evaluated to the same k_max")
            })
        }
    }
}

/// Max-plus convolution `c_k = max_{k₁+k₂=k} (s1(k₁) + s2(k₂))` for all
/// `k ≤ k_max`, the capacity sequence of a disjoint union. Naive
/// `O(k_max²)`; parallel over output indices under the `parallel` feature,
/// with output identical to [`maxplus_convolve_seq`].
///
/// Errors when `k_max` exceeds the evaluated range of either input: every
/// partition `k₁ + k₂ = k` must be readable.
pub fn maxplus_convolve(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k_max: u64,
) -> Result<CapacitySequence, SequenceError> {
    convolve_impl(s1, s2, k_max, cfg!(feature = "parallel"))
}

/// Sequential variant of [`maxplus_convolve`]: identical output, no thread
/// pool.
pub fn maxplus_convolve_seq(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k_max: u64,
) -> Result<CapacitySequence, SequenceError> {
    convolve_impl(s1, s2, k_max, false)
}

fn convolve_impl(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k_max: u64,
    parallel: bool,
) -> Result<CapacitySequence, SequenceError> {
    for s in [s1, s2] {
        if k_max > s.k_max() {
            return Err(SequenceError::OutOfRange {
                requested: k_max,
                available: s.k_max(),
            });
        }
    }
    let n = k_max as usize + 1;
    let denom = s1.denom.lcm(&s2.denom);
    let m1 = &denom / &s1.denom;
    let m2 = &denom / &s2.denom;
    let x: Vec<BigInt> = s1.nums[..n].iter().map(|v| v * &m1).collect();
    let y: Vec<BigInt> = s2.nums[..n].iter().map(|v| v * &m2).collect();
    // i128 fast path: with every term below i128::MAX/4, any two-term sum
    // stays in range.
    let cap = i128::MAX / 4;
    let to_small = |v: &BigInt| v.to_i128().filter(|t| t.checked_abs().is_some_and(|a| a < cap));
    let xs: Option<Vec<i128>> = x.iter().map(to_small).collect();
    let ys: Option<Vec<i128>> = y.iter().map(to_small).collect();
    let nums = match (xs, ys) {
        (Some(xs), Some(ys)) => convolve_i128(&xs, &ys, parallel),
        _ => convolve_big(&x, &y, parallel),
    };
    Ok(CapacitySequence::from_scaled(denom, nums))
}

fn convolve_i128(x: &[i128], y: &[i128], parallel: bool) -> Vec<BigInt> {
    let per_k = |k: usize| -> BigInt {
        let mut best = i128::MIN;
        for i in 0..=k {
            let v = x[i] + y[k - i];
            if v > best {
                best = v;
            }
        }
        BigInt::from(best)
    };
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..x.len()).into_par_iter().map(per_k).collect();
        }
    }
    let _ = parallel;
    (0..x.len()).map(per_k).collect()
}

fn convolve_big(x: &[BigInt], y: &[BigInt], parallel: bool) -> Vec<BigInt> {
    let per_k = |k: usize| -> BigInt {
        let mut best = &x[0] + &y[k];
        for i in 1..=k {
            let v = &x[i] + &y[k - i];
            if v > best {
                best = v;
            }
        }
        best
    };
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..x.len()).into_par_iter().map(per_k).collect();
        }
    }
    let _ = parallel;
    (0..x.len()).map(per_k).collect()
}

/// Checks the capacity axioms on `[0, k_max]`: `c_0 = 0` and the table is
/// nondecreasing. Returns the smallest violating index otherwise.
///
/// # Panics
/// If `k_max` exceeds the evaluated range (precondition).
pub fn verify_monotone(s: &CapacitySequence, k_max: u64) -> MonotoneCheck {
    assert!(
        k_max <= s.k_max(),
        "index {k_max} beyond evaluated range 0..={}",
        s.k_max()
    );
    if !s.nums[0].is_zero() {
        return MonotoneCheck::ViolationAt(0);
    }
    for k in 1..=k_max as usize {
        if s.nums[k] < s.nums[k - 1] {
            return MonotoneCheck::ViolationAt(k as u64);
        }
    }
    MonotoneCheck::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational;

    fn ball(r_num: i64, r_den: i64) -> DomainSpec {
        DomainSpec::ball(rational(r_num, r_den)).unwrap()
    }

    fn ints(s: &CapacitySequence) -> Vec<Rational> {
        s.values().collect()
    }

    #[test]
    fn ball_sequence_small() {
        let s = sequence_of(&ball(1, 1), 6);
        let expect: Vec<Rational> = [0, 1, 1, 2, 2, 2, 3].iter().map(|&v| rational(v, 1)).collect();
        assert_eq!(ints(&s), expect);
    }

    #[test]
    fn scale_is_scalar_multiple() {
        let spec = DomainSpec::scale(rational(3, 1), ball(1, 1)).unwrap();
        let s = sequence_of(&spec, 3);
        let expect: Vec<Rational> = [0, 3, 3, 6].iter().map(|&v| rational(v, 1)).collect();
        assert_eq!(ints(&s), expect);
    }

    #[test]
    fn union_of_unit_balls() {
        let spec = DomainSpec::union(vec![ball(1, 1), ball(1, 1)]).unwrap();
        let s = sequence_of(&spec, 4);
        let expect: Vec<Rational> = [0, 1, 2, 2, 3].iter().map(|&v| rational(v, 1)).collect();
        assert_eq!(ints(&s), expect);
    }

    #[test]
    fn convolution_fixed_point() {
        // Partitions of k=2 for B(1), B(2): max(1+0, 1+2, 0+4·?) —
        // c(B(1)) = 0,1,1; c(B(2)) = 0,2,2 → max(1, 3, 2) = 3.
        let s1 = sequence_of(&ball(1, 1), 2);
        let s2 = sequence_of(&ball(2, 1), 2);
        let s = maxplus_convolve(&s1, &s2, 2).unwrap();
        assert_eq!(s.value(2), rational(3, 1));
    }

    #[test]
    fn convolution_with_single_point_sequence() {
        let s1 = sequence_of(&ball(5, 2), 0);
        let point = sequence_of(&ball(7, 3), 0);
        let s = maxplus_convolve(&s1, &point, 0).unwrap();
        assert_eq!(s.value(0), rational(0, 1));
        assert_eq!(s.k_max(), 0);
    }

    #[test]
    fn convolution_reports_out_of_range() {
        let s1 = sequence_of(&ball(1, 1), 5);
        let s2 = sequence_of(&ball(1, 1), 3);
        let err = maxplus_convolve(&s1, &s2, 4).unwrap_err();
        assert_eq!(
            err,
            SequenceError::OutOfRange { requested: 4, available: 3 }
        );
    }

    #[test]
    fn convolution_brute_force_small() {
        let s1 = sequence_of(&ball(11, 10), 40);
        let s2 = sequence_of(&DomainSpec::ellipsoid(rational(1, 1), rational(3, 2)).unwrap(), 40);
        let conv = maxplus_convolve(&s1, &s2, 40).unwrap();
        for k in 0..=40u64 {
            let best = (0..=k)
                .map(|i| s1.value(i) + s2.value(k - i))
                .max()
                .unwrap();
            assert_eq!(conv.value(k), best, "k={k}");
        }
    }

    #[test]
    fn big_and_small_paths_agree() {
        // A denominator big enough to push terms past the i128 fast path.
        let huge = Rational::new(BigInt::from(1), BigInt::from(2).pow(130));
        let v1: Vec<Rational> = (0..20).map(|k| rational(k, 1) * &huge).collect();
        let v2: Vec<Rational> = (0..20).map(|k| rational(k * k, 1) * &huge).collect();
        let s1 = CapacitySequence::from_values(&v1);
        let s2 = CapacitySequence::from_values(&v2);
        let conv = maxplus_convolve(&s1, &s2, 19).unwrap();
        for k in 0..=19u64 {
            let best = (0..=k)
                .map(|i| s1.value(i) + s2.value(k - i))
                .max()
                .unwrap();
            assert_eq!(conv.value(k), best, "k={k}");
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_convolutions_agree() {
        let s1 = sequence_of(&ball(7, 5), 800);
        let s2 = sequence_of(&DomainSpec::ellipsoid(rational(2, 1), rational(5, 3)).unwrap(), 800);
        let par = maxplus_convolve(&s1, &s2, 800).unwrap();
        let seq = maxplus_convolve_seq(&s1, &s2, 800).unwrap();
        assert_eq!(par, seq);
        let spec = DomainSpec::union(vec![ball(1, 1), ball(2, 1), ball(1, 2)]).unwrap();
        assert_eq!(sequence_of(&spec, 300), sequence_of_seq(&spec, 300));
    }

    #[test]
    fn monotone_checks() {
        let s = sequence_of(&ball(1, 1), 100);
        assert_eq!(verify_monotone(&s, 100), MonotoneCheck::Pass);

        let bad = CapacitySequence::from_values(&[rational(0, 1), rational(2, 1), rational(1, 1)]);
        assert_eq!(verify_monotone(&bad, 2), MonotoneCheck::ViolationAt(2));

        let nonzero = CapacitySequence::from_values(&[rational(1, 1), rational(2, 1)]);
        assert_eq!(verify_monotone(&nonzero, 1), MonotoneCheck::ViolationAt(0));

        let union = DomainSpec::union(vec![ball(1, 1), ball(2, 1)]).unwrap();
        let s = sequence_of(&union, 500);
        assert_eq!(verify_monotone(&s, 500), MonotoneCheck::Pass);
    }

    #[test]
    fn from_values_round_trips() {
        let vals = vec![rational(0, 1), rational(1, 3), rational(1, 2), rational(5, 6)];
        let s = CapacitySequence::from_values(&vals);
        assert_eq!(ints(&s), vals);
        assert_eq!(s.k_max(), 3);
    }

    #[test]
    fn csv_export_shape() {
        let s = sequence_of(&ball(1, 2), 3);
        let mut buf = Vec::new();
        s.write_csv(&mut buf, None).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,c_k\n0,0\n1,1/2\n2,1/2\n3,1\n"
        );
        let mut buf = Vec::new();
        s.write_csv(&mut buf, Some(3)).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "k,c_k,c_k_decimal\n0,0,0.000\n1,1/2,0.500\n2,1/2,0.500\n3,1,1.000\n"
        );
    }

    #[test]
    fn json_records_shape() {
        let s = sequence_of(&ball(1, 2), 1);
        let json = serde_json::to_string(&s.records(None)).unwrap();
        assert_eq!(json, r#"[{"k":0,"ck":"0"},{"k":1,"ck":"1/2"}]"#);
    }
}
