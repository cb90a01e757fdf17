//! Exact rational arithmetic helpers shared by every module.
//!
//! Capacity values are exact rationals end to end; floating point only
//! enters in the convergence estimators and the upper-bound curves. This
//! module wraps `num`'s arbitrary-precision rationals with the three
//! conversions the rest of the crate needs: text parsing, canonical text
//! rendering, and correctly rounded conversion to `f64`.

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational number: arbitrary-precision numerator and denominator,
/// always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Failure to read a rational token (`p`, `p/q`, or decimal like `3.25`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty input where a number was expected")]
    Empty,
    #[error("invalid digit at offset {offset}: expected {expected}")]
    InvalidDigit { offset: usize, expected: &'static str },
    #[error("denominator is zero")]
    ZeroDenominator,
}

/// Parses a rational token: an optionally signed integer (`-12`), a
/// fraction (`11/10`), or a plain decimal (`3.25`). No exponent notation;
/// interior whitespace is not allowed (callers strip whitespace first).
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let mut pos = 0usize;
    let negative = match bytes[0] {
        b'-' => {
            pos += 1;
            true
        }
        b'+' => {
            pos += 1;
            false
        }
        _ => false,
    };
    let (int_part, int_len) = read_digits(bytes, pos)?;
    pos += int_len;
    let mut value = match bytes.get(pos) {
        None => Rational::from_integer(int_part),
        Some(b'/') => {
            pos += 1;
            let (den, den_len) = read_digits(bytes, pos)?;
            pos += den_len;
            if den.is_zero() {
                return Err(RationalParseError::ZeroDenominator);
            }
            Rational::new(int_part, den)
        }
        Some(b'.') => {
            pos += 1;
            let (frac, frac_len) = read_digits(bytes, pos)?;
            pos += frac_len;
            let scale = BigInt::from(10u32).pow(frac_len as u32);
            Rational::new(int_part * &scale + frac, scale)
        }
        Some(_) => {
            return Err(RationalParseError::InvalidDigit {
                offset: pos,
                expected: "digit, `/`, `.`, or end of number",
            })
        }
    };
    if pos != bytes.len() {
        return Err(RationalParseError::InvalidDigit {
            offset: pos,
            expected: "end of number",
        });
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

fn read_digits(bytes: &[u8], start: usize) -> Result<(BigInt, usize), RationalParseError> {
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(RationalParseError::InvalidDigit {
            offset: start,
            expected: "digit",
        });
    }
    // Safe: the slice is all ASCII digits.
    let digits = std::str::from_utf8(&bytes[start..end]).expect("ascii digits");
    Ok((digits.parse::<BigInt>().expect("digits parse"), end - start))
}

/// Renders a rational in canonical form: `p` when the denominator is 1,
/// otherwise `p/q` in lowest terms. This is the exact, round-trippable
/// representation used in all emitted tables.
pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `r` as a fixed-point decimal with `digits` places after the
/// point, rounding half away from zero. Used for the optional decimal
/// convenience column; the `p/q` column stays exact.
pub fn decimal_string(r: &Rational, digits: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    // round(|r|·10^digits) half away from zero = floor(|r|·10^digits + 1/2)
    let scaled = abs * Rational::from_integer(scale.clone());
    let rounded = (scaled * Rational::new(BigInt::from(2), BigInt::one())
        + Rational::one())
    .floor()
        / Rational::from_integer(BigInt::from(2));
    let units = rounded.floor().to_integer();
    let (int_part, frac_part) = (&units / &scale, &units % &scale);
    let sign = if negative && !units.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac:0>width$}", frac = frac_part, width = digits)
    }
}

/// Converts an exact rational to the nearest `f64`, with ties to even.
///
/// The fast path divides two exactly representable integers, which IEEE
/// division rounds correctly. The general path produces a 55–56 bit
/// quotient with a sticky remainder and rounds the 53-bit significand by
/// hand, so the result is correct for numerators and denominators of any
/// size (subnormal underflow excepted, which none of our quantities reach).
pub fn rational_to_f64(r: &Rational) -> f64 {
    let numer = r.numer();
    if numer.is_zero() {
        return 0.0;
    }
    let negative = numer.sign() == Sign::Minus;
    let n = numer.magnitude().clone();
    let d = r.denom().magnitude().clone();
    let magnitude = if n.bits() <= 53 && d.bits() <= 53 {
        // Both operands are exact in f64; hardware division rounds correctly.
        u64::try_from(&n).expect("fits by bit count") as f64
            / u64::try_from(&d).expect("fits by bit count") as f64
    } else {
        big_quotient_to_f64(&n, &d)
    };
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn big_quotient_to_f64(n: &num::BigUint, d: &num::BigUint) -> f64 {
    use num::Integer;
    // Scale so the integer quotient carries 55–56 bits: two or three guard
    // bits below the 53-bit significand.
    let shift: i64 = 55 - (n.bits() as i64 - d.bits() as i64);
    let (num_scaled, den_scaled) = if shift >= 0 {
        (n << shift as u64, d.clone())
    } else {
        (n.clone(), d << (-shift) as u64)
    };
    let (q, rem) = num_scaled.div_rem(&den_scaled);
    let qbits = q.bits();
    debug_assert!((55..=56).contains(&qbits));
    let extra = qbits - 53;
    let mut mantissa = u64::try_from(&(&q >> extra)).expect("53-bit mantissa");
    let round_bit = ((&q >> (extra - 1)) & num::BigUint::one()) == num::BigUint::one();
    let low_mask = (num::BigUint::one() << (extra - 1)) - num::BigUint::one();
    let sticky = (&q & low_mask) != num::BigUint::zero() || !rem.is_zero();
    if round_bit && (sticky || mantissa & 1 == 1) {
        mantissa += 1; // may reach 2^53, still exactly representable
    }
    let exp2 = extra as i64 - shift;
    (mantissa as f64) * 2f64.powi(i32::try_from(exp2).expect("exponent in f64 range"))
}

/// Convenience constructor for small rationals in tests and defaults.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_fractions_decimals() {
        assert_eq!(parse_rational("12").unwrap(), rational(12, 1));
        assert_eq!(parse_rational("-4").unwrap(), rational(-4, 1));
        assert_eq!(parse_rational("11/10").unwrap(), rational(11, 10));
        assert_eq!(parse_rational("3.25").unwrap(), rational(13, 4));
        assert_eq!(parse_rational("0.5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("+7/3").unwrap(), rational(7, 3));
        assert_eq!(parse_rational("2/4").unwrap(), rational(1, 2));
    }

    #[test]
    fn rejects_malformed_tokens() {
        assert_eq!(parse_rational(""), Err(RationalParseError::Empty));
        assert!(matches!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator)
        ));
        assert!(matches!(
            parse_rational("1.2.3"),
            Err(RationalParseError::InvalidDigit { offset: 3, .. })
        ));
        assert!(matches!(
            parse_rational("a"),
            Err(RationalParseError::InvalidDigit { offset: 0, .. })
        ));
        assert!(matches!(
            parse_rational("1e5"),
            Err(RationalParseError::InvalidDigit { offset: 1, .. })
        ));
        assert!(matches!(
            parse_rational("5/"),
            Err(RationalParseError::InvalidDigit { offset: 2, .. })
        ));
    }

    #[test]
    fn renders_canonically() {
        assert_eq!(render_rational(&rational(6, 3)), "2");
        assert_eq!(render_rational(&rational(11, 10)), "11/10");
        assert_eq!(render_rational(&rational(-1, 2)), "-1/2");
        assert_eq!(render_rational(&rational(0, 5)), "0");
    }

    #[test]
    fn parse_render_round_trip() {
        for s in ["0", "1", "-7", "11/10", "-3/7", "1000403/2"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(render_rational(&r), *s);
        }
    }

    #[test]
    fn decimal_rendering_rounds_half_away_from_zero() {
        assert_eq!(decimal_string(&rational(1, 2), 0), "1");
        assert_eq!(decimal_string(&rational(-1, 2), 0), "-1");
        assert_eq!(decimal_string(&rational(1, 3), 4), "0.3333");
        assert_eq!(decimal_string(&rational(2, 3), 4), "0.6667");
        assert_eq!(decimal_string(&rational(11, 10), 2), "1.10");
        assert_eq!(decimal_string(&rational(125, 1000), 2), "0.13");
        assert_eq!(decimal_string(&rational(-125, 1000), 2), "-0.13");
        assert_eq!(decimal_string(&rational(0, 1), 3), "0.000");
    }

    #[test]
    fn f64_conversion_exact_small_values() {
        assert_eq!(rational_to_f64(&rational(1, 2)), 0.5);
        assert_eq!(rational_to_f64(&rational(-3, 4)), -0.75);
        assert_eq!(rational_to_f64(&rational(1, 3)), 1.0 / 3.0);
        assert_eq!(rational_to_f64(&rational(0, 7)), 0.0);
        assert_eq!(rational_to_f64(&rational(1996569, 4_000_000)), 1996569.0 / 4e6);
    }

    #[test]
    fn f64_conversion_breaks_ties_to_even_on_wide_values() {
        // (2^53 + 1)/2^53 is exactly halfway between 1.0 and its successor:
        // ties-to-even keeps 1.0.
        let two53 = BigInt::from(1u64 << 53);
        let halfway = Rational::new(&two53 + 1, two53.clone());
        assert_eq!(rational_to_f64(&halfway), 1.0);
        // (2^53 + 3)/2^53 is halfway between the first and second successors;
        // the even mantissa is the second.
        let upper = Rational::new(&two53 + 3, two53);
        assert_eq!(rational_to_f64(&upper), f64::from_bits(0x3ff0000000000002));
    }

    #[test]
    fn f64_conversion_handles_huge_terms() {
        // 10^40 / 10^39 = 10 exactly, far beyond the u64 fast path.
        let n = BigInt::from(10u32).pow(40);
        let d = BigInt::from(10u32).pow(39);
        assert_eq!(rational_to_f64(&Rational::new(n, d)), 10.0);
        // A 200-bit numerator against a 140-bit denominator still rounds
        // to the nearest representable value.
        let n = BigInt::one() << 200;
        let d = (BigInt::one() << 140) + BigInt::one();
        let got = rational_to_f64(&Rational::new(n, d));
        let expect = 2f64.powi(60); // relative error of the +1 is 2^-140
        assert_eq!(got, expect);
    }
}
