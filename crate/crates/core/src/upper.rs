//! Exact certification of the per-level expansion bound.
//!
//! The induction works in the containment order on staircase sets: if the
//! level-`l+1` front contains a copy of the level-`l` front scaled by a
//! rational factor `rho`, then iterating shows every later front contains a
//! geometrically scaled copy as well, so minimal areas grow at most like
//! `rho^(2l)` while node counts grow like `3^l`. The resulting area
//! exponent is `2 log(rho) / log 3`.
//!
//! Everything on the pass/fail path is exact rational arithmetic.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::staircase::{Point2, Staircase};

/// Errors from certification and serialization.
#[derive(Debug, Error)]
pub enum UpperError {
    /// Parameters outside the mathematical domain.
    #[error("domain: {0}")]
    Domain(&'static str),
    /// Malformed certificate files.
    #[error("format: {0}")]
    Format(String),
}

/// A self-contained claim that one front contains a scaled copy of the
/// previous one: `next_front` is the advance of `base_front`, and every
/// minimal point of `base_front` scaled by `rho` lands inside `next_front`.
#[derive(Clone, Debug, PartialEq)]
pub struct InductionCertificate {
    pub base_level: u32,
    pub base_front: Staircase<BigRational>,
    pub rho: BigRational,
    pub next_front: Staircase<BigRational>,
}

/// Display-only exponent arithmetic (never part of a pass/fail decision).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    /// Per-level log expansion factor, natural-log units.
    pub delta: f64,
    /// Area exponent `2 * delta / log 3`.
    pub exponent: f64,
}

/// Checks the certificate exactly: the successor front must equal the
/// advance of the base front, and the scaled base front must land inside
/// the successor front. Passes for every factor at or above the minimal
/// one.
pub fn verify_induction(cert: &InductionCertificate) -> Result<bool, UpperError> {
    if !cert.rho.is_positive() {
        return Err(UpperError::Domain("expansion factor must be positive"));
    }
    let advanced = cert.base_front.advance().into_staircase();
    if advanced != cert.next_front {
        return Ok(false);
    }
    let scaled = cert
        .base_front
        .shift(&cert.rho)
        .map_err(|_| UpperError::Domain("expansion factor must be positive"))?;
    Ok(cert.next_front.leq(&scaled))
}

/// Area exponent implied by a per-level log expansion `delta >= 0`.
pub fn exponent(delta: f64) -> Result<ExponentReport, UpperError> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(UpperError::Domain("delta must be nonnegative"));
    }
    Ok(ExponentReport {
        delta,
        exponent: 2.0 * delta / 3f64.ln(),
    })
}

/// The shift `d` that pushes a set containing the closure of `(1, 1)` far
/// enough out that every coordinate exceeds `1/(2(1 - e^-epsilon))`, with
/// one unit of safety margin: `d = log(1/(2(1 - e^-epsilon))) + 1`.
pub fn derive_shift_for_epsilon(epsilon: f64) -> Result<f64, UpperError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(UpperError::Domain("epsilon must be positive"));
    }
    // 1 - e^-eps = -expm1(-eps), computed without cancellation.
    Ok(-(2.0 * -f64::exp_m1(-epsilon)).ln() + 1.0)
}

#[derive(Serialize, Deserialize)]
struct CertificateDto {
    base_level: u32,
    rho: [String; 2],
    base_front: Vec<[String; 2]>,
    next_front: Vec<[String; 2]>,
}

fn front_to_rows(front: &Staircase<BigRational>) -> Result<Vec<[String; 2]>, UpperError> {
    front
        .points()
        .iter()
        .map(|p| {
            if !p.w.denom().is_one() || !p.h.denom().is_one() {
                return Err(UpperError::Format(
                    "front coordinates must be integers".into(),
                ));
            }
            Ok([p.w.numer().to_string(), p.h.numer().to_string()])
        })
        .collect()
}

fn rows_to_front(rows: &[[String; 2]]) -> Result<Staircase<BigRational>, UpperError> {
    let parse = |s: &str| -> Result<BigRational, UpperError> {
        s.parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|e| UpperError::Format(format!("bad integer `{s}`: {e}")))
    };
    let points = rows
        .iter()
        .map(|[w, h]| Ok(Point2::new(parse(w)?, parse(h)?)))
        .collect::<Result<Vec<_>, UpperError>>()?;
    Staircase::normalize(points).map_err(|e| UpperError::Format(e.to_string()))
}

/// Serializes a certificate as JSON with decimal-string big integers.
/// Fronts must have integer coordinates (they are grid-size fronts).
pub fn certificate_to_json(cert: &InductionCertificate) -> Result<String, UpperError> {
    let dto = CertificateDto {
        base_level: cert.base_level,
        rho: [cert.rho.numer().to_string(), cert.rho.denom().to_string()],
        base_front: front_to_rows(&cert.base_front)?,
        next_front: front_to_rows(&cert.next_front)?,
    };
    Ok(serde_json::to_string_pretty(&dto).expect("serializable") + "\n")
}

/// Parses a certificate produced by [`certificate_to_json`].
pub fn certificate_from_json(text: &str) -> Result<InductionCertificate, UpperError> {
    let dto: CertificateDto =
        serde_json::from_str(text).map_err(|e| UpperError::Format(e.to_string()))?;
    let num = dto.rho[0]
        .parse::<BigInt>()
        .map_err(|e| UpperError::Format(format!("bad numerator: {e}")))?;
    let den = dto.rho[1]
        .parse::<BigInt>()
        .map_err(|e| UpperError::Format(format!("bad denominator: {e}")))?;
    if den.is_zero() {
        return Err(UpperError::Format("zero denominator".into()));
    }
    Ok(InductionCertificate {
        base_level: dto.base_level,
        rho: BigRational::new(num, den),
        base_front: rows_to_front(&dto.base_front)?,
        next_front: rows_to_front(&dto.next_front)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fronts::compute_fronts;
    use crate::staircase::minimal_shift;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn level_certificate(base_level: u32) -> InductionCertificate {
        let fronts = compute_fronts(base_level + 1).unwrap();
        let base_front = fronts[base_level as usize - 1].to_exact_staircase();
        let next_front = fronts[base_level as usize].to_exact_staircase();
        let rho = minimal_shift(&base_front, &next_front);
        InductionCertificate {
            base_level,
            base_front,
            rho,
            next_front,
        }
    }

    #[test]
    fn minimal_certificates_verify_small_levels() {
        for level in 1..=6 {
            let cert = level_certificate(level);
            assert!(verify_induction(&cert).unwrap(), "level {level}");
        }
    }

    #[test]
    fn level_one_certificate_frozen() {
        let cert = level_certificate(1);
        assert_eq!(cert.rho, rat(3, 1));
        assert!(verify_induction(&cert).unwrap());
    }

    #[test]
    fn shaved_factor_fails_slack_factor_passes() {
        let cert = level_certificate(3);
        let mut shaved = cert.clone();
        shaved.rho = cert.rho.clone() * rat(999_999_999, 1_000_000_000);
        assert!(!verify_induction(&shaved).unwrap());
        let mut padded = cert.clone();
        padded.rho = cert.rho.clone() * rat(1001, 1000);
        assert!(verify_induction(&padded).unwrap());
    }

    #[test]
    fn wrong_successor_front_fails() {
        let fronts = compute_fronts(3).unwrap();
        let cert = InductionCertificate {
            base_level: 1,
            base_front: fronts[0].to_exact_staircase(),
            rho: rat(100, 1),
            next_front: fronts[2].to_exact_staircase(),
        };
        assert!(!verify_induction(&cert).unwrap());
    }

    #[test]
    fn bad_rho_is_domain_error() {
        let mut cert = level_certificate(1);
        cert.rho = rat(-3, 1);
        assert!(matches!(
            verify_induction(&cert),
            Err(UpperError::Domain(_))
        ));
    }

    #[test]
    fn exponent_frozen_values() {
        assert_eq!(exponent(0.0).unwrap().exponent, 0.0);
        let level18 = exponent(rational_ln(&rat(63_761, 35_808))).unwrap();
        assert!((level18.exponent - 1.0504).abs() < 1e-4);
        assert!(level18.exponent < 1.051);
        let lower = exponent(0.5667).unwrap();
        assert!((lower.exponent - 1.0317).abs() < 1e-4);
        assert!(lower.exponent >= 1.031);
        assert!(exponent(-0.1).is_err());
        assert!(exponent(f64::NAN).is_err());
    }

    fn rational_ln(x: &BigRational) -> f64 {
        crate::rational::rational_to_f64(x).ln()
    }

    #[test]
    fn derive_shift_frozen_values() {
        let at_log2 = derive_shift_for_epsilon(2f64.ln()).unwrap();
        assert!((at_log2 - 1.0).abs() < 1e-12);
        let small = derive_shift_for_epsilon(0.01).unwrap();
        assert!((small - 4.917).abs() < 1e-3);
        assert!(derive_shift_for_epsilon(0.0).is_err());
        assert!(derive_shift_for_epsilon(-1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_shape() {
        let cert = level_certificate(2);
        let json = certificate_to_json(&cert).unwrap();
        let parsed = certificate_from_json(&json).unwrap();
        assert_eq!(parsed, cert);
        assert!(verify_induction(&parsed).unwrap());

        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["base_level"], 2);
        assert_eq!(value["rho"][0], "7");
        assert_eq!(value["rho"][1], "3");
        assert_eq!(value["base_front"][0][0], "3");
        assert_eq!(value["base_front"][0][1], "2");
        assert_eq!(value["next_front"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(matches!(
            certificate_from_json("{"),
            Err(UpperError::Format(_))
        ));
        let cert = InductionCertificate {
            base_level: 1,
            base_front: Staircase::normalize(vec![Point2::new(rat(7, 2), rat(5, 3))]).unwrap(),
            rho: rat(3, 1),
            next_front: compute_fronts(2).unwrap()[1].to_exact_staircase(),
        };
        assert!(matches!(
            certificate_to_json(&cert),
            Err(UpperError::Format(_))
        ));
        let json = r#"{"base_level":1,"rho":["3","0"],"base_front":[["1","1"]],"next_front":[["3","2"]]}"#;
        assert!(matches!(
            certificate_from_json(json),
            Err(UpperError::Format(_))
        ));
    }

    #[test]
    fn level_two_minimal_factor_frozen() {
        // minimal_shift(front(2), front(3)): from (3,2), reach (5,5) or
        // (7,4): min(max(5/3,5/2), max(7/3,4/2)) = min(5/2, 7/3) = 7/3.
        let cert = level_certificate(2);
        assert_eq!(cert.rho, rat(7, 3));
    }

    proptest! {
        #[test]
        fn exponent_is_linear(a in 0.0f64..2.0, b in 0.0f64..2.0) {
            let lhs = exponent(a + b).unwrap().exponent;
            let rhs = exponent(a).unwrap().exponent + exponent(b).unwrap().exponent;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn derived_shift_satisfies_threshold(epsilon in 1e-4f64..3.0) {
            let d = derive_shift_for_epsilon(epsilon).unwrap();
            let threshold = 1.0 / (2.0 * -f64::exp_m1(-epsilon));
            prop_assert!((d + epsilon).exp() > threshold);
        }

        /// Sampled instance check: advancing an enlarged set achieves at
        /// least the enlarged advance (factors >= 1).
        #[test]
        fn advance_shift_exchange_sampled(num in 1i64..=8) {
            let fronts = compute_fronts(4).unwrap();
            let t = fronts[2].to_exact_staircase();
            let c = rat(num + 4, 4);
            let lhs = t.shift(&c).unwrap().advance().into_staircase();
            let rhs = t.advance().into_staircase().shift(&c).unwrap();
            prop_assert!(lhs.leq(&rhs));
        }
    }
}
