//! Exact-rational helpers shared by the certificate emitters.
//!
//! Certificates store coordinates as dyadic rationals with a bounded
//! mantissa so they stay human-auditable, and expansion factors as small
//! fractions found by continued-fraction approximation from below.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Errors from rational conversions.
#[derive(Debug, Error)]
pub enum RationalError {
    /// Inputs must be strictly positive finite numbers.
    #[error("domain: {0}")]
    Domain(&'static str),
}

/// Direction for dyadic rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundDir {
    /// Round towards zero (safe for widths: never overstates a bound).
    Down,
    /// Round away from zero (safe for heights).
    Up,
}

fn pow2(exp: i64) -> BigRational {
    let mag = exp.unsigned_abs() as usize;
    let big = BigInt::one() << mag;
    if exp >= 0 {
        BigRational::from_integer(big)
    } else {
        BigRational::new(BigInt::one(), big)
    }
}

/// Rounds a positive float to a dyadic rational with a `bits`-bit mantissa:
/// the result is `m * 2^e` with `2^(bits-1) <= m < 2^bits` (relative
/// precision `2^(1-bits)` regardless of magnitude), rounded in the requested
/// direction. The input is converted exactly first, so the only rounding is
/// the mantissa truncation itself.
pub fn dyadic_round(x: f64, bits: u32, dir: RoundDir) -> Result<BigRational, RationalError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(RationalError::Domain("value must be positive and finite"));
    }
    if bits == 0 {
        return Err(RationalError::Domain("mantissa must have at least one bit"));
    }
    let exact = BigRational::from_float(x).expect("finite floats convert exactly");

    // Find e with 2^e <= x < 2^(e+1) starting from the bit-length estimate.
    let mut e = exact.numer().bits() as i64 - exact.denom().bits() as i64;
    while pow2(e) > exact {
        e -= 1;
    }
    while pow2(e + 1) <= exact {
        e += 1;
    }

    // Scale so the mantissa occupies exactly `bits` integer bits, then take
    // floor or ceiling of the scaled value.
    let shift = (bits as i64 - 1) - e;
    let scaled = exact * pow2(shift);
    let mantissa = match dir {
        RoundDir::Down => scaled.floor(),
        RoundDir::Up => scaled.ceil(),
    };
    Ok(mantissa * pow2(-shift))
}

/// The largest rational `p/q <= x` with `1 <= q <= max_den`, via the
/// continued-fraction expansion of `x`: among convergents and the final
/// semiconvergent that fit the denominator cap, the best lower
/// approximation is the maximum of those that do not exceed `x`.
pub fn best_rational_at_most(x: &BigRational, max_den: u64) -> Result<BigRational, RationalError> {
    if max_den == 0 {
        return Err(RationalError::Domain("denominator cap must be positive"));
    }
    if !x.is_positive() {
        return Err(RationalError::Domain("value must be positive"));
    }
    let cap = BigInt::from(max_den);
    if *x.denom() <= cap {
        return Ok(x.clone());
    }

    // Continued-fraction convergents h_k / k_k by the Euclidean recurrence.
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let (mut h0, mut k0) = (BigInt::zero(), BigInt::one());
    let (mut h1, mut k1) = (BigInt::one(), BigInt::zero());
    let mut candidates: Vec<BigRational> = Vec::new();
    loop {
        let a = num.checked_div(&den).expect("nonzero denominator");
        let rem = &num - &a * &den;
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > cap {
            // Best semiconvergent under the cap on this side, if any.
            let t = (&cap - &k0).checked_div(&k1).expect("k1 > 0 here");
            if t >= BigInt::one() {
                candidates.push(BigRational::new(&t * &h1 + &h0, &t * &k1 + &k0));
            }
            break;
        }
        candidates.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        if rem.is_zero() {
            break;
        }
        num = den;
        den = rem;
    }

    candidates
        .into_iter()
        .filter(|c| c <= x)
        .max()
        .ok_or(RationalError::Domain(
            "no rational at most the value fits the denominator cap",
        ))
}

/// Formats a float with enough digits to identify it unambiguously while
/// staying compact (15 significant digits, scientific notation).
pub fn format_sci(x: f64) -> String {
    format!("{x:.14e}")
}

/// Exact conversion from `f64`, rejecting non-finite input.
pub fn rational_from_f64(x: f64) -> Result<BigRational, RationalError> {
    BigRational::from_float(x).ok_or(RationalError::Domain("value must be finite"))
}

/// Rounds an exact rational to the nearest `f64` (sufficient precision for
/// reporting; never used inside certificate checks).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
