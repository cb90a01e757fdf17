// Each integration-test target compiles this module separately and uses
// its own subset of the oracles, so per-target dead-code lints are noise.
#![allow(dead_code)]

//! Independent brute-force oracles shared by the integration suites.
//!
//! Each oracle recomputes a library result from first principles by a
//! different (slower, simpler) route, so agreement is meaningful:
//! ellipsoid capacities by enumerating and sorting the whole multiset,
//! convolutions by maximizing over explicit index splits, packing bounds
//! by walking all compositions, and the root solve in exact big-rational
//! arithmetic with a 100-digit π.

use echcap_core::{ball_capacity, CapacitySequence, Rational};
use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

/// First `k_max + 1` capacities of the ellipsoid `E(a, b)`: every value
/// `m·a + n·b` (`m, n ≥ 0`) is generated below a growing cutoff, the
/// multiset is sorted, and the `(k+1)`-st smallest entries are returned.
pub fn brute_ellipsoid_capacities(a: &Rational, b: &Rational, k_max: u64) -> Vec<Rational> {
    let need = k_max as usize + 1;
    let mut cutoff = if a < b { b.clone() } else { a.clone() };
    loop {
        let mut values = Vec::new();
        let mut ma = Rational::zero();
        while ma <= cutoff {
            let mut v = ma.clone();
            while v <= cutoff {
                values.push(v.clone());
                v += b;
            }
            ma += a;
        }
        if values.len() >= need {
            values.sort();
            values.truncate(need);
            return values;
        }
        cutoff *= Rational::from_integer(BigInt::from(2));
    }
}

/// Max-plus convolution at a single index, by explicit maximization over
/// every split `k = k₁ + k₂`.
pub fn brute_maxplus_at(s1: &CapacitySequence, s2: &CapacitySequence, k: u64) -> Rational {
    (0..=k)
        .map(|k1| s1.value(k1) + s2.value(k - k1))
        .max()
        .expect("nonempty split range")
}

/// Packing lower bound by walking every composition `k₁ + ⋯ + k_N = k − 1`
/// and summing ball capacities from the closed form.
pub fn brute_packing_bound(radii: &[Rational], k: u64) -> Rational {
    assert!(k >= 1);
    fn go(radii: &[Rational], budget: u64) -> Rational {
        match radii {
            [] => unreachable!("radii validated nonempty"),
            [r] => ball_capacity(budget, r),
            [r, rest @ ..] => (0..=budget)
                .map(|k1| ball_capacity(k1, r) + go(rest, budget - k1))
                .max()
                .expect("nonempty split range"),
        }
    }
    assert!(!radii.is_empty());
    go(radii, k - 1)
}

/// π to 100 decimal digits as an exact rational.
pub fn pi_rational() -> BigRational {
    let digits = b"3\
1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";
    let numer = BigInt::parse_bytes(digits, 10).expect("digit string");
    let denom = BigInt::from(10u32).pow(100);
    BigRational::new(numer, denom)
}

fn rat_pow(x: &BigRational, mut n: u32) -> BigRational {
    let mut base = x.clone();
    let mut acc = BigRational::one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Exact-arithmetic root of `(V/16π²)·r² − r^{2−δ} − j` for `δ = 1/32`,
/// via the substitution `x = r^{1/32}`, which turns the defining function
/// into the polynomial `P(x) = A·x⁶⁴ − x⁶³ − j` with `A = V/16π²`. `P`
/// factors as `x⁶³·(A·x − 1) − j`, so the sought root is the unique one
/// with `x > 1/A`; big-rational bisection needs no floating point at all.
/// `j` enters as the exact rational value of the given float.
pub fn exact_rj(j: f64, v: &BigRational) -> BigRational {
    let pi = pi_rational();
    let a = v / (BigRational::from_integer(BigInt::from(16)) * (&pi * &pi));
    let j_rat = BigRational::from_float(j).expect("finite j");
    assert!(j_rat.is_positive());
    let p = |x: &BigRational| -> BigRational { rat_pow(x, 63) * (&a * x - BigRational::one()) - &j_rat };

    let mut lo = a.recip(); // P(1/A) = −j < 0
    // Upper start from the float asymptotic (exact rational thereafter).
    let a_f: f64 = 1.0 / 157.913_670_417_429_74; // only seeds the bracket
    let hi_seed = (2.0 / a_f).max(2.0 * ((j / a_f).ln() / 64.0).exp());
    let mut hi = BigRational::from_float(hi_seed).expect("finite seed");
    while p(&hi) <= BigRational::zero() {
        hi = &hi * BigRational::from_integer(BigInt::from(2));
    }
    // Bisect until the bracket is relatively tighter than 10⁻¹⁵.
    let tol_inv = BigRational::from_integer(BigInt::from(10u32).pow(15));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut steps = 0;
    while (&hi - &lo) * &tol_inv > lo {
        let mid = (&lo + &hi) / &two;
        if p(&mid) < BigRational::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
        assert!(steps < 400, "bisection failed to tighten");
    }
    rat_pow(&((&lo + &hi) / &two), 32)
}
