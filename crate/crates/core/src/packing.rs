//! Ball-packing lower bounds for the capacity growth of a contact form.
//!
//! A packing of `N` disjoint balls `B(r_i)` into the cobordism over a
//! contact manifold `Y` forces the capacity sequence of `Y` to dominate
//! the max-plus combination of the ball staircases, with a shift of one
//! index: `c_k(Y) ≥ max_{k₁+⋯+k_N = k−1} Σ_i c_{k_i}(B(r_i))`. Squaring
//! and normalizing by `k` turns that into a volume-flavored lower bound
//! whose window minimum the [`packing_asymptotic_check`] report compares
//! against the asymptotic value `2·Σ r_i²`. The [`packing_volume_floor`]
//! report evaluates the final inequality of the chain, a floor on
//! `4·Σ r_i²/2` in terms of cobordism depth `a`, uncovered-volume
//! allowance `ε`, and the contact volume.
//!
//! The module checks the arithmetic chain only; it does not construct
//! packings geometrically or decide whether a radii list is realizable.

use crate::domains::DomainSpec;
use crate::rational::{parse_rational, rational_to_f64, Rational};
use crate::sequences::{maxplus_convolve, sequence_of, CapacitySequence};
use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Cell budget for the `O(k²)`-per-pair union convolution inside window
/// checks: `(N−1)·k_hi²` must stay below this, or the check refuses to run
/// rather than silently truncating.
pub const MAX_CONVOLUTION_CELLS: u64 = 2_000_000_000;

/// A claimed ball packing of the cobordism `[−a, 0] × Y`, plus the volume
/// bookkeeping the floor inequality needs.
#[derive(Debug, Clone)]
pub struct PackingProblem {
    /// Radii `r_i` of the packed balls; all positive.
    pub radii: Vec<Rational>,
    /// Cobordism depth: the packing lives over `[−a, 0]`.
    pub a: f64,
    /// Volume the packing is allowed to leave uncovered.
    pub epsilon: f64,
    /// `vol(Y)` of the target contact manifold.
    pub target_contact_volume: f64,
}

/// Failure modes of the packing operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PackingError {
    #[error("radii list must be nonempty")]
    EmptyRadii,
    #[error("radius #{index} is not positive: {value}")]
    NonPositiveRadius { index: usize, value: String },
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("window [{k_lo}, {k_hi}] must satisfy 1 ≤ k_lo ≤ k_hi")]
    InvalidWindow { k_lo: u64, k_hi: u64 },
    #[error(
        "window check needs {cells} convolution cells, over the {budget} budget; \
         shrink the window or the radii list"
    )]
    BudgetExceeded { cells: u128, budget: u64 },
    #[error("radii file line {line}: {message}")]
    RadiiParse { line: usize, message: String },
}

/// Output of [`packing_volume_floor`].
#[derive(Debug, Clone, Serialize)]
pub struct PackingFloorReport {
    /// `4·((1−e^{−a})/2 · vol(Y) − ε)`: the floor the chained bound puts
    /// under the ball side.
    pub floor: f64,
    /// `2·Σ r_i²`, the asymptotic value of the packing bound.
    pub ball_side: f64,
    /// True when `ball_side < floor`: the claimed packing contradicts the
    /// chain, so the claim (radii, depth, allowance, volume) is reported
    /// as infeasible.
    pub infeasible_claim: bool,
}

/// Output of [`packing_asymptotic_check`].
#[derive(Debug, Clone, Serialize)]
pub struct PackingWindowReport {
    pub k_lo: u64,
    pub k_hi: u64,
    /// `min_k packing_lower_bound(radii, k)²/k` over the window.
    pub min_ratio: f64,
    /// Smallest index attaining `min_ratio`.
    pub argmin_k: u64,
    /// `2·Σ r_i²`, the limit the ratio approaches from the packing side.
    pub asymptotic_target: f64,
    /// `asymptotic_target − min_ratio`; positive when the window minimum
    /// still sits below the asymptotic value.
    pub gap: f64,
}

fn validate_radii(radii: &[Rational]) -> Result<(), PackingError> {
    if radii.is_empty() {
        return Err(PackingError::EmptyRadii);
    }
    for (index, r) in radii.iter().enumerate() {
        if !r.is_positive() {
            return Err(PackingError::NonPositiveRadius {
                index,
                value: r.to_string(),
            });
        }
    }
    Ok(())
}

fn validate_positive(name: &'static str, value: f64) -> Result<(), PackingError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(PackingError::NonPositiveParameter { name, value })
    }
}

impl PackingProblem {
    pub fn new(
        radii: Vec<Rational>,
        a: f64,
        epsilon: f64,
        target_contact_volume: f64,
    ) -> Result<Self, PackingError> {
        validate_radii(&radii)?;
        validate_positive("cobordism depth a", a)?;
        validate_positive("epsilon", epsilon)?;
        validate_positive("target contact volume", target_contact_volume)?;
        Ok(PackingProblem { radii, a, epsilon, target_contact_volume })
    }
}

/// `2·Σ r_i²` as an exact rational.
fn ball_side_exact(radii: &[Rational]) -> Rational {
    radii
        .iter()
        .map(|r| r * r)
        .fold(Rational::zero(), |acc, v| acc + v)
        * Rational::from_integer(BigInt::from(2))
}

/// The packing sequence: capacity table of the disjoint union of the balls
/// `B(r_i)`, evaluated to `k_max`. `packing_lower_bound(radii, k)` is this
/// table read at `k − 1`.
pub fn union_sequence(radii: &[Rational], k_max: u64) -> CapacitySequence {
    let balls: Vec<CapacitySequence> = radii
        .iter()
        .map(|r| {
            sequence_of(
                &DomainSpec::ball(r.clone()).expect("radii validated positive"),
                k_max,
            )
        })
        .collect();
    let mut iter = balls.into_iter();
    let first = iter.next().expect("radii validated nonempty");
    iter.fold(first, |acc, next| {
        maxplus_convolve(&acc, &next, k_max).expect("all parts evaluated to k_max")
    })
}

/// Lower bound for the k-th capacity of a contact manifold packed by balls
/// `B(r_i)`: the maximum of `Σ_i c_{k_i}(B(r_i))` over compositions
/// `k₁ + ⋯ + k_N = k − 1`. The one-index shift is part of the formula and
/// is preserved exactly.
///
/// # Panics
/// If `k = 0` or the radii list is empty or contains a nonpositive entry
/// (preconditions).
pub fn packing_lower_bound(radii: &[Rational], k: u64) -> Rational {
    assert!(k >= 1, "packing bound is defined for k ≥ 1");
    validate_radii(radii).expect("radii must be nonempty and positive");
    union_sequence(radii, k - 1).value(k - 1)
}

/// Evaluates the volume floor `4·((1−e^{−a})/2 · vol(Y) − ε)` and compares
/// it with the ball side `2·Σ r_i²`. A ball side below the floor means the
/// claimed packing data contradicts the chained bound.
pub fn packing_volume_floor(p: &PackingProblem) -> PackingFloorReport {
    let floor =
        4.0 * ((1.0 - (-p.a).exp()) / 2.0 * p.target_contact_volume - p.epsilon);
    let ball_side = rational_to_f64(&ball_side_exact(&p.radii));
    PackingFloorReport {
        floor,
        ball_side,
        infeasible_claim: ball_side < floor,
    }
}

/// Scans `k ∈ [k_lo, k_hi]` for the minimum of
/// `packing_lower_bound(radii, k)²/k` and reports it against the
/// asymptotic value `2·Σ r_i²`. Refuses windows whose `O(k²)`-per-pair
/// convolution cost exceeds [`MAX_CONVOLUTION_CELLS`] instead of silently
/// truncating.
pub fn packing_asymptotic_check(
    radii: &[Rational],
    k_lo: u64,
    k_hi: u64,
) -> Result<PackingWindowReport, PackingError> {
    validate_radii(radii)?;
    if k_lo < 1 || k_lo > k_hi {
        return Err(PackingError::InvalidWindow { k_lo, k_hi });
    }
    let pairs = (radii.len() - 1) as u128;
    let cells = pairs * u128::from(k_hi) * u128::from(k_hi);
    if cells > u128::from(MAX_CONVOLUTION_CELLS) {
        return Err(PackingError::BudgetExceeded {
            cells,
            budget: MAX_CONVOLUTION_CELLS,
        });
    }
    let union = union_sequence(radii, k_hi - 1);
    let mut min_ratio = f64::INFINITY;
    let mut argmin_k = k_lo;
    for k in k_lo..=k_hi {
        let c = union.value(k - 1);
        let ratio = rational_to_f64(&(&c * &c / Rational::from_integer(BigInt::from(k))));
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin_k = k;
        }
    }
    let asymptotic_target = rational_to_f64(&ball_side_exact(radii));
    Ok(PackingWindowReport {
        k_lo,
        k_hi,
        min_ratio,
        argmin_k,
        asymptotic_target,
        gap: asymptotic_target - min_ratio,
    })
}

/// Parses a radii file: one rational per line, blank lines skipped, `#`
/// starts a comment (whole-line or trailing). Errors carry 1-based line
/// numbers. The list must end up nonempty and positive.
pub fn parse_radii(text: &str) -> Result<Vec<Rational>, PackingError> {
    let mut radii = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let r = parse_rational(content).map_err(|e| PackingError::RadiiParse {
            line,
            message: e.to_string(),
        })?;
        if !r.is_positive() {
            return Err(PackingError::RadiiParse {
                line,
                message: format!("radius must be positive, got {content}"),
            });
        }
        radii.push(r);
    }
    if radii.is_empty() {
        return Err(PackingError::EmptyRadii);
    }
    Ok(radii)
}
