//! The analytic lower-bound machinery: softmax calculus on log
//! coordinates, the boundary curve `S`, the piecewise envelope functions
//! `f0`/`f1`/`f2`, the constant system solver, and the verification of the
//! lower-bound inequality and its base case.
//!
//! Work happens in log coordinates `(omega, eta) = (log w, log h)`. The
//! candidate invariant set `S` is the upper closure of the curve
//! `eta = epsilon + max(-omega/sigma, -omega*sigma)`; advancing it keeps it
//! inside itself shrunk by `delta` provided the three envelope functions
//! stay at or above `delta` for both aspect parameters `tau in {sigma,
//! 1/sigma}`. The constants are pinned by a two-residual system: the two
//! `f1` branch values at the crossing `phi = -log 2` agree, and the flat
//! branch's critical value equals them.

use std::fmt::Write as _;

use thiserror::Error;

use crate::rational::format_sci;
use crate::staircase::{Point2, Staircase};

/// Errors from the solver and verifications.
#[derive(Debug, Error)]
pub enum LowerError {
    /// Parameters outside the mathematical domain.
    #[error("domain: {0}")]
    Domain(&'static str),
    /// The solver ran out of iterations; residuals at the last iterate.
    #[error("no convergence: residuals ({r1:.3e}, {r2:.3e})")]
    NoConvergence { r1: f64, r2: f64 },
}

/// The solved constant triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerConstants {
    /// Aspect skew of the invariant curve's two slopes, > 1.
    pub sigma: f64,
    /// Vertical offset of the curve, in log units.
    pub epsilon: f64,
    /// Certified per-level log shrink.
    pub delta: f64,
}

/// A location in the envelope analysis: the log gap `phi = eta_l - omega_b`
/// and the aspect parameter `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiPoint {
    pub phi: f64,
    pub tau: f64,
}

/// Diagnostics from the lemma verification: the minimum of each envelope
/// over the scanned range, with where it was attained.
#[derive(Clone, Copy, Debug)]
pub struct LemmaReport {
    pub ok: bool,
    /// Smallest value of the flat-branch envelope and its location.
    pub worst_flat: (PhiPoint, f64),
    /// Smallest value of max(f1, f2) and its location.
    pub worst_steep: (PhiPoint, f64),
}

/// Overflow-safe `log(e^a + e^b)`.
pub fn sm(a: f64, b: f64) -> f64 {
    a.max(b) + f64::ln_1p((-(a - b).abs()).exp())
}

/// Flat-branch envelope.
pub fn f0(phi: f64, tau: f64, c: &LowerConstants) -> f64 {
    let e = c.epsilon;
    (sm((e - phi) * tau - 2f64.ln(), e) - e + sm(phi + 2f64.ln(), 0.0) * tau) / (1.0 + tau)
}

/// The unique interior minimum of [`f0`] in `phi`.
pub fn f0_critical_phi(tau: f64, c: &LowerConstants) -> f64 {
    ((tau - 1.0) * c.epsilon - 4f64.ln()) / (1.0 + tau)
}

/// Decreasing branch of the steep-side envelope.
pub fn f1(phi: f64, tau: f64, c: &LowerConstants) -> f64 {
    sm(0.0, (tau - 1.0) * c.epsilon - phi * tau) / (1.0 + tau)
}

/// Increasing branch of the steep-side envelope; crosses [`f1`] exactly at
/// `phi = -log 2`.
pub fn f2(phi: f64, tau: f64, c: &LowerConstants) -> f64 {
    f1(phi, tau, c) + (phi + 2f64.ln()) * tau / (1.0 + tau)
}

/// Residuals of the constant system at `(sigma, epsilon)`:
/// the two `f1` branch values at the crossing must agree (`r1`), and the
/// flat branch's minimum on the `1/sigma` side must equal them (`r2`).
pub fn residuals(sigma: f64, epsilon: f64) -> (f64, f64) {
    let c = LowerConstants {
        sigma,
        epsilon,
        delta: 0.0,
    };
    let at_cross = -2f64.ln();
    let steep = f1(at_cross, sigma, &c);
    let shallow = f1(at_cross, 1.0 / sigma, &c);
    let flat = f0(f0_critical_phi(1.0 / sigma, &c), 1.0 / sigma, &c);
    (steep - shallow, steep - flat)
}

fn residual_norm(sigma: f64, epsilon: f64) -> f64 {
    let (r1, r2) = residuals(sigma, epsilon);
    r1.abs().max(r2.abs())
}

/// Solves the two-residual system for `(sigma, epsilon)` by damped Newton
/// iteration with finite-difference Jacobians, then sets
/// `delta = f1(-log 2, sigma)`.
pub fn solve_constants(tolerance: f64) -> Result<LowerConstants, LowerError> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(LowerError::Domain("tolerance must be positive"));
    }
    let newton = |start: (f64, f64)| -> (f64, f64) {
        let (mut sigma, mut epsilon) = start;
        const STEP: f64 = 1e-7;
        for _ in 0..100 {
            let (r1, r2) = residuals(sigma, epsilon);
            if r1.abs().max(r2.abs()) < tolerance {
                break;
            }
            // Central-difference Jacobian.
            let (r1_sp, r2_sp) = residuals(sigma + STEP, epsilon);
            let (r1_sm, r2_sm) = residuals(sigma - STEP, epsilon);
            let (r1_ep, r2_ep) = residuals(sigma, epsilon + STEP);
            let (r1_em, r2_em) = residuals(sigma, epsilon - STEP);
            let j11 = (r1_sp - r1_sm) / (2.0 * STEP);
            let j12 = (r1_ep - r1_em) / (2.0 * STEP);
            let j21 = (r2_sp - r2_sm) / (2.0 * STEP);
            let j22 = (r2_ep - r2_em) / (2.0 * STEP);
            let det = j11 * j22 - j12 * j21;
            if det.abs() < 1e-300 {
                break;
            }
            let mut ds = -(r1 * j22 - r2 * j12) / det;
            let mut de = -(j11 * r2 - j21 * r1) / det;
            // Damp: halve the step until the residual norm improves.
            let base = r1.abs().max(r2.abs());
            let mut halvings = 0;
            while residual_norm(sigma + ds, epsilon + de) > base && halvings < 20 {
                ds *= 0.5;
                de *= 0.5;
                halvings += 1;
            }
            sigma += ds;
            epsilon += de;
        }
        (sigma, epsilon)
    };

    let (mut sigma, mut epsilon) = newton((2.0, 0.1));
    if residual_norm(sigma, epsilon) >= tolerance {
        // Fallback: coarse grid scan for a better basin, then Newton again.
        let mut best = (f64::INFINITY, 2.0, 0.1);
        for i in 0..=40 {
            for j in 0..=40 {
                let s = 1.5 + i as f64 * (1.0 / 40.0);
                let e = 0.0 + j as f64 * (0.3 / 40.0);
                let norm = residual_norm(s, e);
                if norm < best.0 {
                    best = (norm, s, e);
                }
            }
        }
        let refined = newton((best.1, best.2));
        sigma = refined.0;
        epsilon = refined.1;
    }
    let (r1, r2) = residuals(sigma, epsilon);
    if r1.abs().max(r2.abs()) >= tolerance {
        return Err(LowerError::NoConvergence { r1, r2 });
    }

    let mut constants = LowerConstants {
        sigma,
        epsilon,
        delta: 0.0,
    };
    constants.delta = f1(-2f64.ln(), sigma, &constants);
    // The flat branch on the sigma side must clear delta strictly; the
    // system only pins the 1/sigma side.
    let other_side = f0(f0_critical_phi(sigma, &constants), sigma, &constants);
    if other_side <= constants.delta {
        return Err(LowerError::NoConvergence { r1, r2 });
    }
    Ok(constants)
}

/// Verifies the per-level shrink inequality with diagnostics: for both
/// `tau in {sigma, 1/sigma}`, the flat envelope and the steep envelope
/// `max(f1, f2)` must stay at or above `delta` (slack `1e-9`) over a
/// `phi`-grid on `[-20, 20]` plus the analytic minima.
pub fn lemma_report(c: &LowerConstants, grid: u32) -> Result<LemmaReport, LowerError> {
    if grid < 100 {
        return Err(LowerError::Domain("grid must have at least 100 points"));
    }
    const LO: f64 = -20.0;
    const HI: f64 = 20.0;
    let mut worst_flat = (
        PhiPoint {
            phi: f64::NAN,
            tau: f64::NAN,
        },
        f64::INFINITY,
    );
    let mut worst_steep = worst_flat;
    for tau in [c.sigma, 1.0 / c.sigma] {
        let mut probe_flat = |phi: f64| {
            let v = f0(phi, tau, c);
            if v < worst_flat.1 {
                worst_flat = (PhiPoint { phi, tau }, v);
            }
        };
        for k in 0..=grid {
            probe_flat(LO + (HI - LO) * k as f64 / grid as f64);
        }
        probe_flat(f0_critical_phi(tau, c));

        let mut probe_steep = |phi: f64| {
            let v = f1(phi, tau, c).max(f2(phi, tau, c));
            if v < worst_steep.1 {
                worst_steep = (PhiPoint { phi, tau }, v);
            }
        };
        for k in 0..=grid {
            probe_steep(LO + (HI - LO) * k as f64 / grid as f64);
        }
        probe_steep(-2f64.ln());
    }
    let slack = 1e-9;
    Ok(LemmaReport {
        ok: worst_flat.1 >= c.delta - slack && worst_steep.1 >= c.delta - slack,
        worst_flat,
        worst_steep,
    })
}

/// Boolean form of [`lemma_report`].
pub fn verify_lower_lemma(c: &LowerConstants, grid: u32) -> Result<bool, LowerError> {
    Ok(lemma_report(c, grid)?.ok)
}

/// The induction's base case: the level-2 front point `(3, 2)` must lie in
/// the invariant set, i.e. `2 >= exp(epsilon - log(3)/sigma)`. Upper
/// closure then absorbs the whole level-2 front.
pub fn verify_base_case(c: &LowerConstants) -> bool {
    2.0 >= (c.epsilon - 3f64.ln() / c.sigma).exp()
}

/// The boundary curve of the invariant set.
#[derive(Clone, Copy, Debug)]
pub struct CurveS {
    pub constants: LowerConstants,
}

impl CurveS {
    /// Boundary height in log coordinates.
    pub fn log_height(&self, omega: f64) -> f64 {
        self.constants.epsilon + (-omega / self.constants.sigma).max(-omega * self.constants.sigma)
    }

    /// Boundary height over plain widths.
    pub fn height(&self, w: f64) -> f64 {
        self.log_height(w.ln()).exp()
    }

    /// Uniform samples of the boundary as a floating-point staircase,
    /// `omega` spanning the closed range.
    pub fn front(
        &self,
        omega_range: (f64, f64),
        samples: usize,
    ) -> Result<Staircase<f64>, LowerError> {
        if samples < 2 {
            return Err(LowerError::Domain("need at least 2 samples"));
        }
        if !(omega_range.0 < omega_range.1) {
            return Err(LowerError::Domain("empty omega range"));
        }
        let (lo, hi) = omega_range;
        let points = (0..samples)
            .map(|k| {
                let omega = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
                Point2::new(omega.exp(), self.log_height(omega).exp())
            })
            .collect();
        Staircase::normalize(points).map_err(|_| LowerError::Domain("curve produced bad points"))
    }
}

/// Convenience wrapper over [`CurveS::front`].
pub fn curve_front(
    c: &LowerConstants,
    omega_range: (f64, f64),
    samples: usize,
) -> Result<Staircase<f64>, LowerError> {
    CurveS { constants: *c }.front(omega_range, samples)
}

/// Deterministic JSON for the solved constants, with residuals and the
/// implied area exponent; 15 significant digits throughout.
pub fn constants_json(c: &LowerConstants) -> String {
    let (r1, r2) = residuals(c.sigma, c.epsilon);
    let exponent = 2.0 * c.delta / 3f64.ln();
    let mut out = String::from("{\n");
    let _ = write!(out, "  \"sigma\": {},\n", format_sci(c.sigma));
    let _ = write!(out, "  \"epsilon\": {},\n", format_sci(c.epsilon));
    let _ = write!(out, "  \"delta\": {},\n", format_sci(c.delta));
    let _ = write!(
        out,
        "  \"residuals\": {{ \"r1\": {}, \"r2\": {} }},\n",
        format_sci(r1),
        format_sci(r2)
    );
    let _ = write!(out, "  \"exponent\": {}\n", format_sci(exponent));
    out.push('}');
    out.push('\n');
    out
}
