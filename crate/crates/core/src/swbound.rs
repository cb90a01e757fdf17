//! Numeric evaluation of an upper-bound inequality chain for capacity
//! growth, driven by a one-parameter family of root problems.
//!
//! For a grading magnitude `j > 0` the scale `r_j` is the largest root of
//!
//! ```text
//! f(r) = (1/16π²)·V·r² − r^{2−δ} − j
//! ```
//!
//! and the chain assembles, from `r_j`, the working radius
//! `r̄ = C₄·r_j^{1/(1−2γ)}`, the correction factor `g(r̄)`, the exponent
//! `ν = 1 − (1−δ)/(1−2γ)`, and the final curve
//! `(V·g(r̄)² + C₁₁·r_j^{−ν}) / (1 − C₁₂·r_j^{−δ})`, which converges to
//! `V` from above as `j → ∞`. A separate heuristic ratio tracks the
//! back-of-envelope version of the same chain.
//!
//! ## Numerics
//!
//! Everything is evaluated in log space. Because `γ < δ/4 < 1/64`, the
//! correction `r^{−γ} = e^{−γ·ln r}` decays *logarithmically slowly* in
//! `r`: watching `g → 1` requires `r` up to `10³⁰⁰`, and the root problem
//! spans `j` up to `10³⁰⁰` where `r_j²` would overflow any direct
//! formula.
//!
//! The root solve itself has a stiff regime. Writing `t = ln(V·r^δ/16π²)`
//! turns the defining function into the exactly equivalent form
//!
//! ```text
//! f(r(t)) = j·expm1(φ(t)),   φ(t) = ((2−δ)/δ)·(t − ln A) + ln(expm1 t) − ln j
//! ```
//!
//! with `A = V/16π²`, and `φ` strictly increasing on `t > 0` from `−∞` to
//! `+∞`: the equation has exactly one root there (and none with `t ≤ 0`),
//! so "largest root" picks out that unique root. For small `j` the root
//! sits at `t ≈ j·A^{(2−δ)/δ}` — as small as `10^{−119}` — where `r`
//! moves by less than one float ulp across hundreds of orders of
//! magnitude of `j`; bisection runs in `ln t` there. For large `j` it
//! runs in `ln r` directly. Residuals are reported as `j·|expm1(φ)|`,
//! the exact value of `f` at the solved point, which stays meaningful
//! where naive evaluation of `f` would cancel catastrophically.

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Parameter record for the bound chain. `v` is the contact volume; the
/// remaining constants exist in the underlying estimates but are only
/// known to exist, not to have specific values, so all default to 1 and
/// are user-overridable. `k_sf` and `c10` are carried for completeness of
/// the record; the evaluated closed forms use `kappa`, `c_energy`, `c4`,
/// `c11`, and `c12`.
#[derive(Debug, Clone, Serialize)]
pub struct SwParams {
    /// Contact volume `V > 0`.
    pub v: f64,
    /// Root-problem exponent offset, `0 < δ < 1/16`.
    pub delta: f64,
    /// Correction-factor exponent, `0 < γ < δ/4`.
    pub gamma: f64,
    /// Curvature-term constant in the correction factor, `κ ≥ 0`.
    pub kappa: f64,
    /// Spectral-flow constant, `> 0`.
    pub k_sf: f64,
    /// Additive constant of the a priori energy cap, `≥ 0`.
    pub c_energy: f64,
    /// Constant of the working-radius estimate, `≥ 0`.
    pub c4: f64,
    /// Auxiliary constant, `≥ 0`.
    pub c10: f64,
    /// Numerator constant of the final curve, `≥ 0`.
    pub c11: f64,
    /// Denominator constant of the final curve, `≥ 0`.
    pub c12: f64,
}

impl SwParams {
    /// All constants 1; volume and exponents as given.
    pub fn with_defaults(v: f64, delta: f64, gamma: f64) -> Self {
        SwParams {
            v,
            delta,
            gamma,
            kappa: 1.0,
            k_sf: 1.0,
            c_energy: 1.0,
            c4: 1.0,
            c10: 1.0,
            c11: 1.0,
            c12: 1.0,
        }
    }

    /// Enforces the parameter invariants: `V > 0`, `0 < δ < 1/16`,
    /// `0 < γ < δ/4`, `κ ≥ 0`, `K > 0`, all `C ≥ 0`, everything finite.
    pub fn validate(&self) -> Result<(), SwError> {
        let bad = |msg: String| Err(SwError::InvalidParams(msg));
        if !(self.v.is_finite() && self.v > 0.0) {
            return bad(format!("volume must be positive and finite, got {}", self.v));
        }
        if !(self.delta.is_finite() && self.delta > 0.0 && self.delta < 1.0 / 16.0) {
            return bad(format!("delta must satisfy 0 < delta < 1/16, got {}", self.delta));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0 && self.gamma < self.delta / 4.0) {
            return bad(format!(
                "gamma must satisfy 0 < gamma < delta/4 = {}, got {}",
                self.delta / 4.0,
                self.gamma
            ));
        }
        if !(self.k_sf.is_finite() && self.k_sf > 0.0) {
            return bad(format!("k_sf must be positive and finite, got {}", self.k_sf));
        }
        for (name, value) in [
            ("kappa", self.kappa),
            ("c_energy", self.c_energy),
            ("c4", self.c4),
            ("c10", self.c10),
            ("c11", self.c11),
            ("c12", self.c12),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return bad(format!("{name} must be nonnegative and finite, got {value}"));
            }
        }
        Ok(())
    }
}

/// One evaluated point of the bound chain.
#[derive(Debug, Clone, Serialize)]
pub struct SwCurvePoint {
    pub j: f64,
    pub r_j: f64,
    pub r_bar: f64,
    pub g_value: f64,
    pub nu: f64,
    pub bound_value: f64,
    pub heuristic_value: f64,
}

/// Detailed output of the root solve.
#[derive(Debug, Clone, Serialize)]
pub struct RjSolution {
    /// The largest root of the defining function.
    pub r_j: f64,
    /// `ln r_j`, carried exactly for downstream log-space formulas.
    pub ln_r_j: f64,
    /// `t = ln(A·r_j^δ)` at the root; tiny `t` marks the stiff regime.
    pub t: f64,
    /// `|f(r_j)|` evaluated in the stable factored form.
    pub residual: f64,
    /// Bisection steps taken.
    pub iterations: u32,
}

/// Failure modes of the bound-chain operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("j must be positive and finite, got {0}")]
    NonPositiveJ(f64),
    #[error("no positive root found for j = {j} (bracket search exhausted)")]
    NoRoot { j: f64 },
    #[error(
        "root exists but exceeds the float range: ln r = {ln_r} (exponents this small \
         push the root beyond 10^308)"
    )]
    RootNotRepresentable { ln_r: f64 },
    #[error(
        "correction factor undefined: 1 − r^(−γ) − 2κ/r = {denom} ≤ 0 at r = {r} \
         (r below the asymptotic regime)"
    )]
    GFactorDomain { r: f64, denom: f64 },
    #[error(
        "bound denominator 1 − C₁₂·r_j^(−δ) = {value} ≤ 0 (j below the asymptotic regime)"
    )]
    BoundDenominator { value: f64 },
    #[error("invalid j grid: {0}")]
    JGrid(String),
}

fn check_j(j: f64) -> Result<(), SwError> {
    if j.is_finite() && j > 0.0 {
        Ok(())
    } else {
        Err(SwError::NonPositiveJ(j))
    }
}

fn check_v_delta(v: f64, delta: f64) -> Result<(), SwError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(SwError::InvalidParams(format!(
            "volume must be positive and finite, got {v}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0 / 16.0) {
        return Err(SwError::InvalidParams(format!(
            "delta must satisfy 0 < delta < 1/16, got {delta}"
        )));
    }
    Ok(())
}

/// `φ(t)` of the module docs: strictly increasing on `t > 0`, with
/// `f(r(t)) = j·expm1(φ(t))`. `c = (2−δ)/δ`, `ln_a = ln(V/16π²)`.
///
/// For `t ≤ 0` the defining function is negative outright (no roots on
/// that side), so φ returns `−∞` as the "below the root" indicator; a
/// naive `ln(expm1(t))` would be NaN there and poison the bracket
/// comparisons when a bisection probe in the x = ln r regime lands below
/// `r = A^{−1/δ}`, which happens near the stiff↔regular handoff.
fn phi(t: f64, c: f64, ln_a: f64, ln_j: f64) -> f64 {
    let em1 = t.exp_m1();
    if em1 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    c * (t - ln_a) + em1.ln() - ln_j
}

/// Largest root of `(1/16π²)·V·r² − r^{2−δ} − j`, with diagnostics. See
/// the module docs for the change of variables and the two bisection
/// regimes.
pub fn solve_rj_detailed(j: f64, v: f64, delta: f64) -> Result<RjSolution, SwError> {
    check_j(j)?;
    check_v_delta(v, delta)?;
    let ln_a = (v / (16.0 * PI * PI)).ln();
    let c = (2.0 - delta) / delta;
    let ln_j = j.ln();
    // Small-t asymptotic of the root: t ≈ j·A^c, i.e. ln t ≈ ln j + c·ln A.
    let ln_t_guess = ln_j + c * ln_a;
    let mut iterations = 0u32;

    let (t, ln_r) = if ln_t_guess < (1e-3f64).ln() {
        // Stiff regime: bisect in ℓ = ln t. Values of t down to the
        // subnormal floor are representable; φ(e^ℓ) = −∞ below it, which
        // the sign logic handles. When the guess sits below the floor the
        // bracket is clamped there: every t under the floor maps to the
        // same f64 radius, so nothing is lost, and the radius check after
        // the loop reports overflow honestly.
        let mut lo = (ln_t_guess - 2.0).max(-770.0);
        let mut hi = (ln_t_guess + 2.0).max(-735.0);
        let mut guard = 0;
        while phi(lo.exp(), c, ln_a, ln_j) > 0.0 {
            lo -= 4.0;
            guard += 1;
            if guard > 200 {
                return Err(SwError::NoRoot { j });
            }
        }
        while phi(hi.exp(), c, ln_a, ln_j) < 0.0 {
            hi += 4.0;
            guard += 1;
            if guard > 200 {
                return Err(SwError::NoRoot { j });
            }
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            iterations += 1;
            if phi(mid.exp(), c, ln_a, ln_j) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (0.5 * (lo + hi)).exp();
        (t, (t - ln_a) / delta)
    } else {
        // Regular regime: bisect in x = ln r, where t = ln A + δ·x is
        // computed without cancellation because t is not tiny here.
        let phi_x = |x: f64| phi(ln_a + delta * x, c, ln_a, ln_j);
        // Asymptotic guess r ≈ 4π·√(j/V); the subtracted term only
        // inflates the root upward, and expansion covers the rest.
        let x_guess = (4.0 * PI).ln() + 0.5 * (ln_j - v.ln());
        let mut lo = x_guess - 2.0;
        let mut hi = x_guess + 2.0;
        let mut guard = 0;
        while phi_x(lo) > 0.0 {
            lo -= 4.0;
            guard += 1;
            if guard > 200 {
                return Err(SwError::NoRoot { j });
            }
        }
        while phi_x(hi) < 0.0 {
            hi += 4.0;
            guard += 1;
            if guard > 200 {
                return Err(SwError::NoRoot { j });
            }
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            iterations += 1;
            if phi_x(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        (ln_a + delta * x, x)
    };

    let r_j = ln_r.exp();
    if !r_j.is_finite() {
        return Err(SwError::RootNotRepresentable { ln_r });
    }
    let residual = (j * phi(t, c, ln_a, ln_j).exp_m1()).abs();
    Ok(RjSolution { r_j, ln_r_j: ln_r, t, residual, iterations })
}

/// Largest root of the defining function; see [`solve_rj_detailed`].
pub fn solve_rj(j: f64, v: f64, delta: f64) -> Result<f64, SwError> {
    solve_rj_detailed(j, v, delta).map(|s| s.r_j)
}

/// The defining function `f(r) = (1/16π²)·V·r² − r^{2−δ} − j`, evaluated
/// in the factored form `r^{2−δ}·expm1(ln(A·r^δ)) − j` that stays accurate
/// where the two leading terms agree to hundreds of digits. Intended for
/// sign checks around a root.
pub fn rj_defining_value(r: f64, j: f64, v: f64, delta: f64) -> f64 {
    let ln_a = (v / (16.0 * PI * PI)).ln();
    let t = ln_a + delta * r.ln();
    // r^{2−δ}·expm1(t), in logs to dodge overflow of r².
    let lead = ((2.0 - delta) * r.ln() + t.exp_m1().abs().ln()).exp();
    lead.copysign(t.exp_m1()) - j
}

/// Correction factor `g(r) = exp((r^{−γ} + 2γκ/r) / (γ·(1 − r^{−γ} − 2κ/r)))`,
/// defined when the parenthesized denominator is positive; `g ≥ 1` there,
/// decreasing in `r` with limit 1 — reached only logarithmically slowly,
/// so `r` near `10³⁰⁰` is the relevant scale. Can overflow to `+∞` just
/// above the domain boundary.
pub fn g_factor(r: f64, gamma: f64, kappa: f64) -> Result<f64, SwError> {
    g_factor_from_ln(r.ln(), gamma, kappa)
}

/// [`g_factor`] taking `ln r` directly, for callers that track radii in
/// log space.
pub fn g_factor_from_ln(ln_r: f64, gamma: f64, kappa: f64) -> Result<f64, SwError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(SwError::InvalidParams(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(SwError::InvalidParams(format!(
            "kappa must be nonnegative and finite, got {kappa}"
        )));
    }
    let r_neg_gamma = (-gamma * ln_r).exp();
    let inv_r = (-ln_r).exp();
    let denom = 1.0 - r_neg_gamma - 2.0 * kappa * inv_r;
    if denom <= 0.0 {
        return Err(SwError::GFactorDomain { r: ln_r.exp(), denom });
    }
    Ok(((r_neg_gamma + 2.0 * gamma * kappa * inv_r) / (gamma * denom)).exp())
}

/// Exponent `ν = 1 − (1−δ)/(1−2γ)`, positive under the parameter
/// invariants since `δ > 4γ > 2γ`.
pub fn nu_exponent(delta: f64, gamma: f64) -> f64 {
    debug_assert!(delta > 0.0 && delta < 1.0 / 16.0 && gamma > 0.0 && gamma < delta / 4.0);
    1.0 - (1.0 - delta) / (1.0 - 2.0 * gamma)
}

/// Working radius `r̄ = C₄·r_j^{1/(1−2γ)}`, the upper estimate the chain
/// substitutes for the analytic `r̄`. The exponent exceeds 1, so `r̄ ≥ r_j`
/// whenever `C₄ ≥ 1` and `r_j ≥ 1`.
pub fn rbar_estimate(r_j: f64, gamma: f64, c4: f64) -> f64 {
    c4 * (r_j.ln() / (1.0 - 2.0 * gamma)).exp()
}

/// A priori energy cap `r·V/2 + C`.
pub fn energy_cap(r: f64, v: f64, c_energy: f64) -> f64 {
    debug_assert!(r >= 0.0 && r.is_finite());
    r * v / 2.0 + c_energy
}

/// Heuristic version of the chain, normalized so the `j → ∞` limit is 1:
/// `((r_j·V/2 + C)² / ((1/16π²)·V·r_j² + r_j^{2−δ})) / (4π²·V)`,
/// evaluated in log space. The denominator equals `r_j^{2−δ}·(e^t + 1)`
/// with `t` from the root solve.
pub fn heuristic_ratio(j: f64, v: f64, c_energy: f64, delta: f64) -> Result<f64, SwError> {
    let sol = solve_rj_detailed(j, v, delta)?;
    // ln((r·V/2 + C)²) without forming r·V/2 + C when it is huge:
    // r·V/2 = exp(ln r + ln(V/2)).
    let ln_half_rv = sol.ln_r_j + (v / 2.0).ln();
    let ln_num = 2.0
        * if ln_half_rv > 700.0 {
            // C is negligible at this magnitude and the exp would overflow.
            ln_half_rv
        } else {
            (ln_half_rv.exp() + c_energy).ln()
        };
    let ln_den = (2.0 - delta) * sol.ln_r_j + sol.t.exp().ln_1p();
    Ok((ln_num - ln_den - (4.0 * PI * PI * v).ln()).exp())
}

/// Final assembly `(V·g² + C₁₁·r_j^{−ν}) / (1 − C₁₂·r_j^{−δ})`, taking
/// `ln r_j` so the power terms are formed in log space.
fn assemble_bound(
    v: f64,
    g: f64,
    c11: f64,
    c12: f64,
    nu: f64,
    delta: f64,
    ln_r_j: f64,
) -> Result<f64, SwError> {
    let denom = 1.0 - c12 * (-delta * ln_r_j).exp();
    if denom <= 0.0 {
        return Err(SwError::BoundDenominator { value: denom });
    }
    Ok((v * g * g + c11 * (-nu * ln_r_j).exp()) / denom)
}

/// Evaluates the full chain at one grading magnitude: solves for `r_j`,
/// forms `r̄`, `g(r̄)`, `ν`, the bound value, and the heuristic ratio.
/// Errors propagate from the root solve, from `g` when `r̄` is below its
/// domain, and from a nonpositive bound denominator.
pub fn upper_bound_curve(j: f64, params: &SwParams) -> Result<SwCurvePoint, SwError> {
    params.validate()?;
    let sol = solve_rj_detailed(j, params.v, params.delta)?;
    let ln_r_bar = params.c4.ln() + sol.ln_r_j / (1.0 - 2.0 * params.gamma);
    let r_bar = ln_r_bar.exp();
    let g_value = g_factor_from_ln(ln_r_bar, params.gamma, params.kappa)?;
    let nu = nu_exponent(params.delta, params.gamma);
    let bound_value = assemble_bound(
        params.v,
        g_value,
        params.c11,
        params.c12,
        nu,
        params.delta,
        sol.ln_r_j,
    )?;
    let heuristic_value = heuristic_ratio(j, params.v, params.c_energy, params.delta)?;
    Ok(SwCurvePoint {
        j,
        r_j: sol.r_j,
        r_bar,
        g_value,
        nu,
        bound_value,
        heuristic_value,
    })
}

/// Evaluates the chain over a grid of `j` values, in the input order.
/// Parallel under the `parallel` feature; output is identical to
/// [`upper_bound_points_seq`].
pub fn upper_bound_points(params: &SwParams, grid: &[f64]) -> Result<Vec<SwCurvePoint>, SwError> {
    params.validate()?;
    #[cfg(feature = "parallel")]
    {
        grid.par_iter().map(|&j| upper_bound_curve(j, params)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        upper_bound_points_seq(params, grid)
    }
}

/// Sequential variant of [`upper_bound_points`].
pub fn upper_bound_points_seq(
    params: &SwParams,
    grid: &[f64],
) -> Result<Vec<SwCurvePoint>, SwError> {
    params.validate()?;
    grid.iter().map(|&j| upper_bound_curve(j, params)).collect()
}

/// Parses a log grid spec `START:END:logstepFACTOR`, e.g.
/// `1e20:1e300:logstep10`: points `START·FACTOR^i` for `i = 0..` while
/// they stay `≤ END` (with a hair of slack so the endpoint lands on the
/// grid despite rounding).
pub fn parse_j_grid(text: &str) -> Result<Vec<f64>, SwError> {
    let bad = |msg: String| Err(SwError::JGrid(msg));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return bad(format!(
            "expected START:END:logstepFACTOR, got `{text}` ({} segment(s))",
            parts.len()
        ));
    }
    let num = |part: &str, what: &str| -> Result<f64, SwError> {
        part.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0)
            .ok_or_else(|| SwError::JGrid(format!("{what} must be a positive number, got `{part}`")))
    };
    let start = num(parts[0], "grid start")?;
    let end = num(parts[1], "grid end")?;
    let step_text = parts[2].trim();
    let factor = match step_text.strip_prefix("logstep") {
        Some(rest) => num(rest, "logstep factor")?,
        None => {
            return bad(format!("third segment must be `logstep<factor>`, got `{step_text}`"))
        }
    };
    if factor <= 1.0 {
        return bad(format!("logstep factor must exceed 1, got {factor}"));
    }
    if end < start {
        return bad(format!("grid end {end} is below start {start}"));
    }
    let steps = ((end / start).ln() / factor.ln() + 1e-9).floor() as i32;
    // Decade-style grids (start and factor both exact powers of ten) snap
    // to the correctly rounded doubles for 10^e; the general path's
    // `powi` accumulates a few ulp over hundreds of steps, which would
    // smear grid points like 1e300 into 1.0000000000000005e300.
    if let (Some(p), Some(q)) = (pow10_exponent(start), pow10_exponent(factor)) {
        return Ok((0..=steps)
            .map(|i| {
                format!("1e{}", p + i * q)
                    .parse::<f64>()
                    .expect("exponent in range by construction")
            })
            .collect());
    }
    Ok((0..=steps).map(|i| start * factor.powi(i)).collect())
}

/// `Some(e)` when `x` is exactly the f64 nearest to `10^e`.
fn pow10_exponent(x: f64) -> Option<i32> {
    let e = x.log10().round();
    if !(-323.0..=308.0).contains(&e) {
        return None;
    }
    let e = e as i32;
    (format!("1e{e}").parse::<f64>() == Ok(x)).then_some(e)
}
