//! Model four-dimensional symplectic domains and their capacity values.
//!
//! Two closed forms drive everything here:
//!
//! * **Ball staircase.** The k-th capacity of the ball `B(r)` is `d·r`,
//!   where `d` is the unique nonnegative integer with
//!   `d(d+1)/2 ≤ k ≤ d(d+3)/2`. The step index `d` is computed by an
//!   integer square root, never by scanning.
//! * **Ellipsoid spectrum.** The k-th capacity of `E(a,b)` is the
//!   (k+1)-st smallest element, counted with multiplicity, of the multiset
//!   `{m·a + n·b : m, n ≥ 0}`. After clearing denominators with
//!   `q = lcm(den(a), den(b))`, every multiset element is an integer
//!   multiple of `1/q`, so the value is found by a binary search over an
//!   integer grid backed by an exact lattice-point counter.
//!
//! All results are exact rationals; floating point never enters.

use crate::rational::{parse_rational, Rational, RationalParseError};
use num::bigint::BigInt;
use num::integer::Roots;
use num::{BigUint, Integer, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Symbolic description of a model domain.
///
/// Scalar parameters are exact rationals and must be strictly positive;
/// `Union` must be nonempty. Construct through the checked constructors or
/// the text grammar (`FromStr`), both of which enforce the invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    /// Closed round ball `B(r)` of capacity parameter `r`.
    Ball { radius: Rational },
    /// Ellipsoid `E(a,b)` with symplectic widths `a`, `b`.
    Ellipsoid { a: Rational, b: Rational },
    /// The domain `inner` with all capacities multiplied by `factor`.
    Scale { factor: Rational, inner: Box<DomainSpec> },
    /// Disjoint union of the listed parts.
    Union { parts: Vec<DomainSpec> },
}

/// Invariant violation while building a [`DomainSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(String),
    #[error("ellipsoid semi-axes must be positive, got a={0}, b={1}")]
    NonPositiveAxis(String, String),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("union must contain at least one part")]
    EmptyUnion,
}

impl DomainSpec {
    pub fn ball(radius: Rational) -> Result<Self, DomainError> {
        if radius.is_positive() {
            Ok(DomainSpec::Ball { radius })
        } else {
            Err(DomainError::NonPositiveRadius(radius.to_string()))
        }
    }

    pub fn ellipsoid(a: Rational, b: Rational) -> Result<Self, DomainError> {
        if a.is_positive() && b.is_positive() {
            Ok(DomainSpec::Ellipsoid { a, b })
        } else {
            Err(DomainError::NonPositiveAxis(a.to_string(), b.to_string()))
        }
    }

    pub fn scale(factor: Rational, inner: DomainSpec) -> Result<Self, DomainError> {
        if factor.is_positive() {
            Ok(DomainSpec::Scale { factor, inner: Box::new(inner) })
        } else {
            Err(DomainError::NonPositiveScale(factor.to_string()))
        }
    }

    pub fn union(parts: Vec<DomainSpec>) -> Result<Self, DomainError> {
        if parts.is_empty() {
            Err(DomainError::EmptyUnion)
        } else {
            Ok(DomainSpec::Union { parts })
        }
    }
}

impl fmt::Display for DomainSpec {
    /// Renders in the input grammar, so `Display` round-trips through
    /// [`parse_domain_spec`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::render_rational as render;
        match self {
            DomainSpec::Ball { radius } => write!(f, "ball:{}", render(radius)),
            DomainSpec::Ellipsoid { a, b } => {
                write!(f, "ellipsoid:{},{}", render(a), render(b))
            }
            DomainSpec::Scale { factor, inner } => {
                write!(f, "scale:{}:({})", render(factor), inner)
            }
            DomainSpec::Union { parts } => {
                write!(f, "union:(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Domain-spec grammar
// ---------------------------------------------------------------------------

/// Position-annotated parse failure for the domain grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {position}: expected {expected}, found {found}")]
pub struct SpecParseError {
    /// Byte offset into the original input.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

/// Parses the domain grammar:
///
/// ```text
/// spec := "ball" ":" rational
///       | "ellipsoid" ":" rational "," rational
///       | "scale" ":" rational ":" "(" spec ")"
///       | "union" ":" "(" spec (";" spec)* ")"
/// ```
///
/// Rationals are decimals (`1.25`) or fractions (`11/10`). Whitespace
/// between tokens is insignificant. Errors report the byte position and
/// the expected token.
pub fn parse_domain_spec(input: &str) -> Result<DomainSpec, SpecParseError> {
    let mut p = Parser { input: input.as_bytes(), pos: 0 };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.err("end of input"));
    }
    Ok(spec)
}

impl FromStr for DomainSpec {
    type Err = SpecParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_domain_spec(s)
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn found_here(&self) -> String {
        match self.input.get(self.pos) {
            Some(&c) => format!("`{}`", c as char),
            None => "end of input".to_string(),
        }
    }

    fn err(&self, expected: impl Into<String>) -> SpecParseError {
        SpecParseError {
            position: self.pos,
            expected: expected.into(),
            found: self.found_here(),
        }
    }

    fn expect_byte(&mut self, byte: u8) -> Result<(), SpecParseError> {
        self.skip_ws();
        if self.input.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("`{}`", byte as char)))
        }
    }

    fn keyword(&mut self) -> Result<(usize, &'a str), SpecParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.input.len() && self.input[end].is_ascii_alphabetic() {
            end += 1;
        }
        if end == start {
            return Err(self.err("domain keyword `ball`, `ellipsoid`, `scale`, or `union`"));
        }
        self.pos = end;
        Ok((start, std::str::from_utf8(&self.input[start..end]).expect("ascii")))
    }

    fn rational(&mut self, what: &str) -> Result<Rational, SpecParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.input.len()
            && matches!(self.input[end], b'0'..=b'9' | b'+' | b'-' | b'.' | b'/')
        {
            end += 1;
        }
        let token = std::str::from_utf8(&self.input[start..end]).expect("ascii");
        if token.is_empty() {
            return Err(self.err(format!("{what} (rational number)")));
        }
        match parse_rational(token) {
            Ok(r) => {
                self.pos = end;
                Ok(r)
            }
            Err(RationalParseError::ZeroDenominator) => Err(SpecParseError {
                position: start,
                expected: "nonzero denominator".to_string(),
                found: format!("`{token}`"),
            }),
            Err(RationalParseError::Empty) => Err(self.err(format!("{what} (rational number)"))),
            Err(RationalParseError::InvalidDigit { offset, expected }) => Err(SpecParseError {
                position: start + offset,
                expected: expected.to_string(),
                found: format!(
                    "`{}`",
                    token
                        .as_bytes()
                        .get(offset)
                        .map(|&c| (c as char).to_string())
                        .unwrap_or_else(|| "end of number".to_string())
                ),
            }),
        }
    }

    fn domain_invariant(
        &self,
        position: usize,
        result: Result<DomainSpec, DomainError>,
    ) -> Result<DomainSpec, SpecParseError> {
        result.map_err(|e| SpecParseError {
            position,
            expected: match e {
                DomainError::NonPositiveRadius(_) => "positive radius".to_string(),
                DomainError::NonPositiveAxis(_, _) => "positive semi-axes".to_string(),
                DomainError::NonPositiveScale(_) => "positive scale factor".to_string(),
                DomainError::EmptyUnion => "at least one union part".to_string(),
            },
            found: "invalid value".to_string(),
        })
    }

    fn spec(&mut self) -> Result<DomainSpec, SpecParseError> {
        let (kw_pos, kw) = self.keyword()?;
        match kw {
            "ball" => {
                self.expect_byte(b':')?;
                let arg_pos = {
                    self.skip_ws();
                    self.pos
                };
                let r = self.rational("ball radius")?;
                self.domain_invariant(arg_pos, DomainSpec::ball(r))
            }
            "ellipsoid" => {
                self.expect_byte(b':')?;
                let arg_pos = {
                    self.skip_ws();
                    self.pos
                };
                let a = self.rational("first semi-axis")?;
                self.expect_byte(b',')?;
                let b = self.rational("second semi-axis")?;
                self.domain_invariant(arg_pos, DomainSpec::ellipsoid(a, b))
            }
            "scale" => {
                self.expect_byte(b':')?;
                let arg_pos = {
                    self.skip_ws();
                    self.pos
                };
                let s = self.rational("scale factor")?;
                self.expect_byte(b':')?;
                self.expect_byte(b'(')?;
                let inner = self.spec()?;
                self.expect_byte(b')')?;
                self.domain_invariant(arg_pos, DomainSpec::scale(s, inner))
            }
            "union" => {
                self.expect_byte(b':')?;
                self.expect_byte(b'(')?;
                let mut parts = vec![self.spec()?];
                loop {
                    self.skip_ws();
                    match self.input.get(self.pos) {
                        Some(b';') => {
                            self.pos += 1;
                            parts.push(self.spec()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("`;` or `)`")),
                    }
                }
                self.domain_invariant(kw_pos, DomainSpec::union(parts))
            }
            other => Err(SpecParseError {
                position: kw_pos,
                expected: "domain keyword `ball`, `ellipsoid`, `scale`, or `union`".to_string(),
                found: format!("`{other}`"),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Ball staircase
// ---------------------------------------------------------------------------

/// Step index of the ball staircase: the unique nonnegative integer `d`
/// with `d(d+1)/2 ≤ k ≤ d(d+3)/2`, i.e. the largest `d` whose triangular
/// number `d(d+1)/2` does not exceed `k`. Closed form via integer square
/// root of `8k+1`.
pub fn ball_step(k: u64) -> u64 {
    let disc = 8u128 * u128::from(k) + 1;
    let d = ((disc.sqrt() - 1) / 2) as u64;
    debug_assert!(triangle(d) <= u128::from(k) && u128::from(k) <= step_upper(d));
    d
}

fn triangle(d: u64) -> u128 {
    let d = u128::from(d);
    d * (d + 1) / 2
}

fn step_upper(d: u64) -> u128 {
    let d = u128::from(d);
    d * (d + 3) / 2
}

/// Capacity `c_k(∂B(r)) = d·r` with `d` the staircase step of `k`.
pub fn ball_capacity(k: u64, r: &Rational) -> Rational {
    assert!(r.is_positive(), "ball radius must be positive");
    Rational::from_integer(BigInt::from(ball_step(k))) * r
}

/// Inclusive index interval `[d(d+1)/2, d(d+3)/2]` on which the ball
/// capacity equals `d·r`. Consecutive intervals tile the integers:
/// `upper(d) + 1 == lower(d+1)`.
pub fn ball_index_range(d: u64) -> (u64, u64) {
    let lower = u64::try_from(triangle(d)).expect("step range exceeds u64 indices");
    let upper = u64::try_from(step_upper(d)).expect("step range exceeds u64 indices");
    (lower, upper)
}

// ---------------------------------------------------------------------------
// Lattice counting and the ellipsoid spectrum
// ---------------------------------------------------------------------------

/// Clears denominators: returns `(q, A, B)` with `q = lcm(den a, den b)`,
/// `A = a·q`, `B = b·q` integers. Every value `m·a + n·b` then lies on the
/// grid `(1/q)·Z`.
fn scaled_generators(a: &Rational, b: &Rational) -> (BigInt, BigInt, BigInt) {
    let q = a.denom().lcm(b.denom());
    let a_scaled = a.numer() * (&q / a.denom());
    let b_scaled = b.numer() * (&q / b.denom());
    (q, a_scaled, b_scaled)
}

/// Number of lattice points `(m,n) ∈ Z≥0 × Z≥0` with `m·a + n·b ≤ t`,
/// computed exactly as `Σ_{m=0}^{⌊t/a⌋} (⌊(t−m·a)/b⌋ + 1)`. Returns 0 for
/// negative `t`. Runs in `O(t/a)` exact integer steps.
///
/// # Panics
/// If `a` or `b` is not positive, or (never in realistic use) the count
/// exceeds `u128`.
pub fn lattice_count(a: &Rational, b: &Rational, t: &Rational) -> u128 {
    assert!(a.is_positive() && b.is_positive(), "generators must be positive");
    if t.is_negative() {
        return 0;
    }
    let q_ab = a.denom().lcm(b.denom());
    let q = q_ab.lcm(t.denom());
    let a_scaled = a.numer() * (&q / a.denom());
    let b_scaled = b.numer() * (&q / b.denom());
    let t_scaled = t.numer() * (&q / t.denom());
    count_at_most(&a_scaled, &b_scaled, &t_scaled)
}

/// Core counter on the integer grid: `#{(m,n) ≥ 0 : m·a + n·b ≤ t}` for
/// positive integers `a`, `b` and integer `t` (0 if `t < 0`).
fn count_at_most(a: &BigInt, b: &BigInt, t: &BigInt) -> u128 {
    if t.is_negative() {
        return 0;
    }
    // Fast path: below 2^63 every intermediate fits in u128.
    if let (Some(a), Some(b), Some(t)) = (small(a), small(b), small(t)) {
        let mut count: u128 = 0;
        let mut rest = t; // t − m·a
        loop {
            count = count
                .checked_add(rest / b + 1)
                .expect("lattice count exceeds u128");
            if rest < a {
                break;
            }
            rest -= a;
        }
        return count;
    }
    let mut count: BigUint = BigUint::zero();
    let mut rest = t.clone();
    let one = BigInt::one();
    loop {
        count += (&rest / b + &one).to_biguint().expect("nonnegative");
        if &rest < a {
            break;
        }
        rest -= a;
    }
    count.to_u128().expect("lattice count exceeds u128")
}

fn small(x: &BigInt) -> Option<u128> {
    // Cap at 2^63 so products of two values stay inside u128.
    x.to_u128().filter(|&v| v < (1u128 << 63))
}

/// Capacity `c_k(E(a,b))`: the (k+1)-st smallest element, counted with
/// multiplicity, of `{m·a + n·b : m,n ≥ 0}`. Binary search for the
/// smallest grid value `t` with `lattice_count(a,b,t) ≥ k+1`; since the
/// count function only jumps at attained values, the result is always an
/// attained multiset element. Exact; `O((c_k/a)·log k)` integer steps.
pub fn ellipsoid_capacity(a: &Rational, b: &Rational, k: u64) -> Rational {
    assert!(a.is_positive() && b.is_positive(), "semi-axes must be positive");
    let (q, a_scaled, b_scaled) = scaled_generators(a, b);
    let t = ellipsoid_capacity_scaled(&a_scaled, &b_scaled, k);
    Rational::new(t, q)
}

/// Scaled-grid core of [`ellipsoid_capacity`]: smallest integer `t ≥ 0`
/// with `count_at_most(a, b, t) ≥ k+1`.
fn ellipsoid_capacity_scaled(a: &BigInt, b: &BigInt, k: u64) -> BigInt {
    let need = u128::from(k) + 1;
    // Exponential bracket: count(hi) ≥ k+1.
    let mut hi = a.max(b).clone();
    while count_at_most(a, b, &hi) < need {
        hi *= 2;
    }
    let mut lo = BigInt::zero();
    // Invariant: count(hi) ≥ k+1, and lo is the smallest candidate not yet
    // ruled out; count(lo−1) < k+1 for all probed values.
    while lo < hi {
        let mid: BigInt = (&lo + &hi) / 2;
        if count_at_most(a, b, &mid) >= need {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

// ---------------------------------------------------------------------------
// Scaled capacity tables (batch evaluation)
// ---------------------------------------------------------------------------

/// Ball table `c_0..c_{k_max}` on the scaled grid: returns `(q, nums)` with
/// `q = den(r)` and `nums[k] = d(k)·num(r)`, filled block-by-block from the
/// staircase in `O(k_max)`.
pub(crate) fn ball_scaled_table(r: &Rational, k_max: u64) -> (BigInt, Vec<BigInt>) {
    let p = r.numer().clone();
    let q = r.denom().clone();
    let mut nums = Vec::with_capacity(k_max as usize + 1);
    let mut d: u64 = 0;
    while nums.len() <= k_max as usize {
        let value = &p * BigInt::from(d);
        let (lo, hi) = ball_index_range(d);
        debug_assert_eq!(lo, nums.len() as u64);
        let hi = hi.min(k_max);
        for _ in lo..=hi {
            nums.push(value.clone());
        }
        d += 1;
    }
    (q, nums)
}

/// Representation counter for one scaled two-generator grid, supporting
/// O(1) queries of `h(t) = #{(m,n) ≥ 0 : m·a + n·b = t}` after O(log)
/// setup. Fast-path arithmetic is u128; constructed only when the scaled
/// generators and sweep bound fit below 2^63.
struct RepCounter {
    g: u128,
    a: u128,
    b_red: u128,
    inv_a_mod_b: u128,
}

impl RepCounter {
    fn new(a: u128, b: u128) -> Self {
        let g = gcd_u128(a, b);
        let (a_red, b_red) = (a / g, b / g);
        let inv_a_mod_b = if b_red == 1 { 0 } else { mod_inverse(a_red % b_red, b_red) };
        RepCounter { g, a, b_red, inv_a_mod_b }
    }

    /// Number of representations `m·a + n·b = t` with `m, n ≥ 0`.
    fn reps(&self, t: u128) -> u128 {
        if t % self.g != 0 {
            return 0;
        }
        let t_red = t / self.g;
        // Solve m·a_red ≡ t_red (mod b_red); valid m are m0, m0+b_red, …, ≤ t/a.
        let m0 = if self.b_red == 1 {
            0
        } else {
            (t_red % self.b_red) * self.inv_a_mod_b % self.b_red
        };
        let m_max = t / self.a;
        if m0 > m_max {
            0
        } else {
            (m_max - m0) / self.b_red + 1
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Modular inverse of `a` modulo `m` for coprime `a, m` with `m > 1`.
fn mod_inverse(a: u128, m: u128) -> u128 {
    // Extended Euclid on i128; all values stay below 2^63 by construction.
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "generators must be coprime after gcd reduction");
    old_s.rem_euclid(m as i128) as u128
}

/// Ellipsoid table `c_0..c_{k_max}` on the scaled grid: returns `(q, nums)`
/// with `nums[k] = c_k·q` as integers. A single sweep over grid values `t`
/// accumulates representation counts `h(t)`, assigning each value to the
/// `h(t)` consecutive indices it occupies; total cost `O(q·c_{k_max} + k_max)`.
/// With `parallel = true` (available under the `parallel` feature) the sweep
/// is chunked over disjoint `t` ranges with exact boundary offsets from
/// [`count_at_most`], producing output identical to the sequential sweep.
pub(crate) fn ellipsoid_scaled_table(
    a: &Rational,
    b: &Rational,
    k_max: u64,
    parallel: bool,
) -> (BigInt, Vec<BigInt>) {
    let (q, a_scaled, b_scaled) = scaled_generators(a, b);
    // Top of the sweep: the exact value of c_{k_max} on the grid.
    let t_top = ellipsoid_capacity_scaled(&a_scaled, &b_scaled, k_max);
    let fast = (small(&a_scaled), small(&b_scaled), small(&t_top));
    let nums = if let (Some(sa), Some(sb), Some(st)) = fast {
        ellipsoid_sweep_fast(sa, sb, st, k_max, parallel)
    } else {
        ellipsoid_sweep_big(&a_scaled, &b_scaled, k_max)
    };
    debug_assert_eq!(nums.len() as u64, k_max + 1);
    (q, nums)
}

fn ellipsoid_sweep_fast(a: u128, b: u128, t_top: u128, k_max: u64, parallel: bool) -> Vec<BigInt> {
    let counter = RepCounter::new(a, b);
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return ellipsoid_sweep_fast_par(&counter, a, b, t_top, k_max);
        }
    }
    let _ = parallel;
    sweep_range(&counter, 0, t_top, 0, k_max)
}

/// Fills indices for grid values `t ∈ [t_lo, t_hi]`, where `k_offset` is the
/// number of lattice points with value `< t_lo`. Clamps output to `k_max`.
fn sweep_range(counter: &RepCounter, t_lo: u128, t_hi: u128, k_offset: u128, k_max: u64) -> Vec<BigInt> {
    let mut nums = Vec::new();
    let mut cum = k_offset;
    let limit = u128::from(k_max) + 1;
    let mut t = t_lo;
    while t <= t_hi && cum < limit {
        let h = counter.reps(t);
        if h > 0 {
            let fill = h.min(limit - cum);
            let value = BigInt::from(t);
            for _ in 0..fill {
                nums.push(value.clone());
            }
            cum += h;
        }
        t += 1;
    }
    nums
}

#[cfg(feature = "parallel")]
fn ellipsoid_sweep_fast_par(
    counter: &RepCounter,
    a: u128,
    b: u128,
    t_top: u128,
    k_max: u64,
) -> Vec<BigInt> {
    use rayon::prelude::*;
    let threads = rayon::current_num_threads() as u128;
    let chunk = (t_top / (4 * threads).max(1)).max(1);
    if t_top < 1024 || chunk < 2 {
        return sweep_range(counter, 0, t_top, 0, k_max);
    }
    let a_big = BigInt::from(a);
    let b_big = BigInt::from(b);
    let mut bounds: Vec<u128> = (0..).map(|i| i * chunk).take_while(|&lo| lo <= t_top).collect();
    bounds.push(t_top + 1);
    let pieces: Vec<Vec<BigInt>> = bounds
        .windows(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let (t_lo, t_end) = (w[0], w[1] - 1);
            // Lattice points with value < t_lo, i.e. ≤ t_lo − 1.
            let offset = if t_lo == 0 {
                0
            } else {
                count_at_most(&a_big, &b_big, &BigInt::from(t_lo - 1))
            };
            sweep_range(counter, t_lo, t_end, offset, k_max)
        })
        .collect();
    let mut nums = Vec::with_capacity(k_max as usize + 1);
    for piece in pieces {
        nums.extend(piece);
    }
    nums
}

/// Arbitrary-precision sweep for scaled generators beyond the u128 range.
/// Same contract as the fast sweep; runs sequentially (this regime is far
/// outside any realistic table size).
fn ellipsoid_sweep_big(a: &BigInt, b: &BigInt, k_max: u64) -> Vec<BigInt> {
    let limit = u128::from(k_max) + 1;
    let mut nums = Vec::new();
    let mut cum: u128 = 0;
    let mut t = BigInt::zero();
    while cum < limit {
        let h = reps_big(a, b, &t);
        if h > 0 {
            let fill = h.min(limit - cum);
            for _ in 0..fill {
                nums.push(t.clone());
            }
            cum += h;
        }
        t += 1;
    }
    nums
}

/// Representation count on BigInt, by direct scan over admissible `m`.
fn reps_big(a: &BigInt, b: &BigInt, t: &BigInt) -> u128 {
    let mut count = 0u128;
    let mut rest = t.clone();
    while !rest.is_negative() {
        if (&rest % b).is_zero() {
            count += 1;
        }
        rest -= a;
    }
    count
}

// ---------------------------------------------------------------------------
// Volume
// ---------------------------------------------------------------------------

/// Symplectic 4-volume of a model domain: `vol(B(r)) = r²/2`,
/// `vol(E(a,b)) = ab/2`, scaling by `s²`, unions add.
pub fn domain_volume(spec: &DomainSpec) -> Rational {
    match spec {
        DomainSpec::Ball { radius } => radius * radius / Rational::from_integer(BigInt::from(2)),
        DomainSpec::Ellipsoid { a, b } => a * b / Rational::from_integer(BigInt::from(2)),
        DomainSpec::Scale { factor, inner } => factor * factor * domain_volume(inner),
        DomainSpec::Union { parts } => parts
            .iter()
            .map(domain_volume)
            .fold(Rational::zero(), |acc, v| acc + v),
    }
}
