//! Windowed volume estimators and convergence diagnostics.
//!
//! The capacity sequence of a domain `X` recovers its volume:
//! `c_k(X)²/k → 4·vol(X)` as `k → ∞`. Equivalently, on the boundary
//! contact manifold `Y = ∂X` with `vol(Y) = 2·vol(X)`, the same quotient
//! normalized as `c_k²/(2k)` tends to `vol(Y)`. The two normalizations are
//! the [`Convention`]s below.
//!
//! No convergence rate is assumed: reports record windowed min/max and the
//! deviation from a caller-supplied target, and the only asserted rate is
//! the ball error envelope provable from the staircase closed form.

use crate::rational::{rational_to_f64, Rational};
use crate::sequences::CapacitySequence;
use num::bigint::BigInt;
use num::Signed;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Normalization of the volume estimator quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `c_k²/(4k) → vol(X)`, the volume of the domain itself.
    Liouville,
    /// `c_k²/(2k) → vol(Y)`, the volume of the boundary contact manifold.
    Contact,
}

impl Convention {
    fn divisor(self) -> u64 {
        match self {
            Convention::Liouville => 4,
            Convention::Contact => 2,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Liouville => write!(f, "liouville"),
            Convention::Contact => write!(f, "contact"),
        }
    }
}

/// Failure modes of the estimator operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("volume estimator requires k ≥ 1 (the quotient divides by k)")]
    ZeroIndex,
    #[error(
        "window [{k_lo}, {k_hi}] is invalid or beyond the evaluated range 0..={available}"
    )]
    WindowOutOfRange { k_lo: u64, k_hi: u64, available: u64 },
}

/// Windowed convergence summary of the volume estimator.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub convention: Convention,
    pub k_lo: u64,
    pub k_hi: u64,
    pub estimator_min: f64,
    pub estimator_max: f64,
    pub estimator_at_khi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// `max |estimator − target|` over the window, when a target is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_deviation: Option<f64>,
}

impl VolumeReport {
    /// Header line matching [`csv_row`](Self::csv_row).
    pub fn csv_header() -> &'static str {
        "convention,k_lo,k_hi,estimator_min,estimator_max,estimator_at_khi,target,max_abs_deviation"
    }

    /// One CSV row; optional fields render as empty cells.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.convention,
            self.k_lo,
            self.k_hi,
            self.estimator_min,
            self.estimator_max,
            self.estimator_at_khi,
            opt(self.target),
            opt(self.max_abs_deviation)
        )
    }
}

/// Exact rational estimator `c_k²/(4k)` (Liouville) or `c_k²/(2k)`
/// (Contact). The float-valued [`volume_estimate`] is this value rounded
/// once.
pub fn volume_estimate_exact(
    s: &CapacitySequence,
    k: u64,
    convention: Convention,
) -> Result<Rational, AsymptoticsError> {
    if k == 0 {
        return Err(AsymptoticsError::ZeroIndex);
    }
    let c = s.value(k);
    let denom = BigInt::from(convention.divisor()) * BigInt::from(k);
    Ok(&c * &c / Rational::from_integer(denom))
}

/// Volume estimator at one index, rounded to the nearest float after exact
/// rational evaluation.
pub fn volume_estimate(
    s: &CapacitySequence,
    k: u64,
    convention: Convention,
) -> Result<f64, AsymptoticsError> {
    volume_estimate_exact(s, k, convention).map(|r| rational_to_f64(&r))
}

/// Converts a domain volume to the volume of its boundary contact
/// manifold: `vol(Y) = 2·vol(X)`.
pub fn liouville_to_contact_volume(vol_x: &Rational) -> Rational {
    assert!(!vol_x.is_negative(), "volumes are nonnegative");
    vol_x * Rational::from_integer(BigInt::from(2))
}

/// Scans `k ∈ [k_lo, k_hi]` and summarizes the estimator: min, max, value
/// at the right endpoint, and (with a target) the worst absolute
/// deviation. Parallel over the window under the `parallel` feature;
/// results are identical either way.
pub fn convergence_report(
    s: &CapacitySequence,
    k_lo: u64,
    k_hi: u64,
    convention: Convention,
    target: Option<f64>,
) -> Result<VolumeReport, AsymptoticsError> {
    report_impl(s, k_lo, k_hi, convention, target, cfg!(feature = "parallel"))
}

/// Sequential variant of [`convergence_report`]: identical output, no
/// thread pool.
pub fn convergence_report_seq(
    s: &CapacitySequence,
    k_lo: u64,
    k_hi: u64,
    convention: Convention,
    target: Option<f64>,
) -> Result<VolumeReport, AsymptoticsError> {
    report_impl(s, k_lo, k_hi, convention, target, false)
}

fn report_impl(
    s: &CapacitySequence,
    k_lo: u64,
    k_hi: u64,
    convention: Convention,
    target: Option<f64>,
    parallel: bool,
) -> Result<VolumeReport, AsymptoticsError> {
    if k_lo < 1 || k_lo > k_hi || k_hi > s.k_max() {
        return Err(AsymptoticsError::WindowOutOfRange {
            k_lo,
            k_hi,
            available: s.k_max(),
        });
    }
    let (denom, nums) = s.scaled();
    let denom_sq_m = denom * denom * BigInt::from(convention.divisor());
    let estimate = |k: u64| -> f64 {
        let num = &nums[k as usize];
        rational_to_f64(&Rational::new(num * num, &denom_sq_m * BigInt::from(k)))
    };
    let estimates: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            if parallel {
                (k_lo..=k_hi).into_par_iter().map(estimate).collect()
            } else {
                (k_lo..=k_hi).map(estimate).collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = parallel;
            (k_lo..=k_hi).map(estimate).collect()
        }
    };
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut dev = 0.0f64;
    for &e in &estimates {
        min = min.min(e);
        max = max.max(e);
        if let Some(t) = target {
            dev = dev.max((e - t).abs());
        }
    }
    Ok(VolumeReport {
        convention,
        k_lo,
        k_hi,
        estimator_min: min,
        estimator_max: max,
        estimator_at_khi: *estimates.last().expect("window is nonempty"),
        target,
        max_abs_deviation: target.map(|_| dev),
    })
}

/// Diagnostic-only least-squares fit of the estimator against `k^{−1/2}`
/// over a window. The `intercept` extrapolates the `k → ∞` limit **under
/// an assumed first-order model that is not established theory**; use it
/// to eyeball convergence, never as a verified value.
#[derive(Debug, Clone, Serialize)]
pub struct InverseSqrtFit {
    pub k_lo: u64,
    pub k_hi: u64,
    /// Estimator value the fit extrapolates at `k^{−1/2} = 0`.
    pub intercept: f64,
    /// Coefficient of `k^{−1/2}`.
    pub slope: f64,
}

/// Fits `estimator(k) ≈ intercept + slope·k^{−1/2}` on the window by
/// ordinary least squares. Diagnostic only; see [`InverseSqrtFit`].
pub fn inverse_sqrt_fit(
    s: &CapacitySequence,
    k_lo: u64,
    k_hi: u64,
    convention: Convention,
) -> Result<InverseSqrtFit, AsymptoticsError> {
    if k_lo < 1 || k_lo >= k_hi || k_hi > s.k_max() {
        return Err(AsymptoticsError::WindowOutOfRange {
            k_lo,
            k_hi,
            available: s.k_max(),
        });
    }
    let n = (k_hi - k_lo + 1) as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in k_lo..=k_hi {
        let x = 1.0 / (k as f64).sqrt();
        let y = volume_estimate(s, k, convention).expect("k ≥ 1 in window");
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    Ok(InverseSqrtFit { k_lo, k_hi, intercept, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::rational::rational;
    use crate::sequences::sequence_of;

    fn ball1(k_max: u64) -> CapacitySequence {
        sequence_of(&DomainSpec::ball(rational(1, 1)).unwrap(), k_max)
    }

    #[test]
    fn estimator_fixed_points() {
        let s = ball1(10);
        // c_4 = 2 → 4/16 = 0.25, far from the limit 1/2 (small-k bias).
        assert_eq!(volume_estimate(&s, 4, Convention::Liouville).unwrap(), 0.25);
        // c_1 = 1 → 1/2 under the contact normalization.
        assert_eq!(volume_estimate(&s, 1, Convention::Contact).unwrap(), 0.5);
        assert_eq!(
            volume_estimate(&s, 0, Convention::Liouville),
            Err(AsymptoticsError::ZeroIndex)
        );
    }

    #[test]
    fn estimator_at_large_index() {
        let s = ball1(1_000_000);
        let got = volume_estimate(&s, 1_000_000, Convention::Liouville).unwrap();
        // c_{10⁶} = 1413: quotient is exactly 1413²/(4·10⁶).
        assert_eq!(got, 1_996_569.0 / 4_000_000.0);
        assert!((got - 0.5).abs() < 0.002);
    }

    #[test]
    fn conventions_differ_by_factor_two_exactly() {
        let s = sequence_of(
            &DomainSpec::ellipsoid(rational(2, 3), rational(7, 5)).unwrap(),
            200,
        );
        for k in 1..=200 {
            let l = volume_estimate_exact(&s, k, Convention::Liouville).unwrap();
            let c = volume_estimate_exact(&s, k, Convention::Contact).unwrap();
            assert_eq!(c, l * rational(2, 1));
        }
    }

    #[test]
    fn estimator_scaling_is_exact() {
        let inner = DomainSpec::ball(rational(1, 1)).unwrap();
        let scaled = DomainSpec::scale(rational(2, 1), inner.clone()).unwrap();
        let s_inner = sequence_of(&inner, 50);
        let s_scaled = sequence_of(&scaled, 50);
        for k in 1..=50 {
            let base = volume_estimate_exact(&s_inner, k, Convention::Liouville).unwrap();
            let scaled = volume_estimate_exact(&s_scaled, k, Convention::Liouville).unwrap();
            assert_eq!(scaled, base * rational(4, 1));
        }
    }

    #[test]
    fn contact_volume_conversion() {
        assert_eq!(liouville_to_contact_volume(&rational(1, 2)), rational(1, 1));
        assert_eq!(liouville_to_contact_volume(&rational(0, 1)), rational(0, 1));
        assert_eq!(liouville_to_contact_volume(&rational(7, 3)), rational(14, 3));
    }

    #[test]
    fn report_on_constant_staircase_block() {
        // On [998991, 1000404] the unit-ball capacity is 1413 identically.
        let s = ball1(1_000_404);
        let r = convergence_report(&s, 998_991, 1_000_404, Convention::Liouville, Some(0.5))
            .unwrap();
        assert!(r.estimator_min <= r.estimator_at_khi && r.estimator_at_khi <= r.estimator_max);
        assert!(r.max_abs_deviation.unwrap() <= 0.005);
        assert_eq!(
            r.estimator_at_khi,
            volume_estimate(&s, 1_000_404, Convention::Liouville).unwrap()
        );
    }

    #[test]
    fn report_rejects_bad_windows() {
        let s = ball1(100);
        for (lo, hi) in [(0, 50), (10, 5), (1, 101)] {
            let err = convergence_report(&s, lo, hi, Convention::Liouville, None).unwrap_err();
            assert_eq!(
                err,
                AsymptoticsError::WindowOutOfRange { k_lo: lo, k_hi: hi, available: 100 }
            );
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_reports_agree() {
        let s = ball1(50_000);
        let a = convergence_report(&s, 100, 50_000, Convention::Liouville, Some(0.5)).unwrap();
        let b = convergence_report_seq(&s, 100, 50_000, Convention::Liouville, Some(0.5)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn fit_recovers_ball_limit_roughly() {
        let s = ball1(20_000);
        let fit = inverse_sqrt_fit(&s, 1_000, 20_000, Convention::Liouville).unwrap();
        assert!((fit.intercept - 0.5).abs() < 0.01, "intercept {}", fit.intercept);
    }

    #[test]
    fn report_csv_row_matches_header_arity() {
        let s = ball1(100);
        let r = convergence_report(&s, 1, 100, Convention::Liouville, None).unwrap();
        let header_cols = VolumeReport::csv_header().split(',').count();
        assert_eq!(r.csv_row().split(',').count(), header_cols);
    }
}
