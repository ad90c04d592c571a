//! Exact evaluators for the rectangle packet and its positive-frequency
//! evolution.
//!
//! Every evaluator first reduces its argument to the offset from the packet
//! centre, so `f(x; x0, b) == f(x - x0; 0, b)` holds to rounding.
//!
//! The branch of the logarithm in the single-packet closed form is fixed by
//! `arg(y + i0) = (π/2)(1 - sign y)`. [`psi_plus`] therefore only uses the real
//! logarithm of absolute values plus sign functions; no complex logarithm is
//! ever evaluated on (or near) its branch cut.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{
    Evaluation, FieldSnapshot, Grid, PacketSpec, Provenance, SingularKind, SingularPoint,
    DELTA_SING,
};
use crate::error::{Error, Result};

/// `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `y ln|y|` with the removable value `0` at `y = 0`.
pub fn xlogx(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y * y.abs().ln()
    }
}

/// Damping displacement `ε` of the `+iε` prescription.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedPsiParams {
    eps: f64,
}

impl RegularizedPsiParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

fn edge_check(d: f64, spec: &PacketSpec, kind: SingularKind) -> Evaluation<()> {
    let b = spec.b();
    if (d - b).abs() < DELTA_SING {
        return Err(SingularPoint::new(spec.x0() + b, kind));
    }
    if (d + b).abs() < DELTA_SING {
        return Err(SingularPoint::new(spec.x0() - b, kind));
    }
    Ok(())
}

/// `ln|(d + b)/(d - b)|`, accurate for `|d| ≫ b`.
fn log_ratio(d: f64, b: f64) -> f64 {
    if d.abs() > b {
        (2.0 * b / (d - b)).ln_1p()
    } else {
        ((d + b) / (d - b)).abs().ln()
    }
}

/// Right-moving complex packet `ψ(u)`; at time `t` it is evaluated at `u = x - t`.
///
/// The real part is the local step `1/(4b)` on `|u - x0| < b`; the imaginary
/// part is the nonlocal tail `ln|(u - x0 + b)/(u - x0 - b)| / (4πb)`.
pub fn psi_plus(u: f64, spec: &PacketSpec) -> Evaluation {
    let d = u - spec.x0();
    edge_check(d, spec, SingularKind::LogDivergence)?;
    let b = spec.b();
    let re = (sign(d + b) - sign(d - b)) / (8.0 * b);
    let im = log_ratio(d, b) / (4.0 * PI * b);
    Ok(Complex64::new(re, im))
}

/// `ψ` at finite damping: `(i/(4πb)) [Ln(d + b + iε) - Ln(d - b + iε)]` on the
/// principal branch. Both arguments lie in the open upper half plane, so the
/// principal logarithm never meets its cut.
pub fn psi_plus_regularized(u: f64, spec: &PacketSpec, reg: &RegularizedPsiParams) -> Complex64 {
    let d = u - spec.x0();
    let b = spec.b();
    let eps = reg.eps();
    let upper = Complex64::new(d + b, eps).ln();
    let lower = Complex64::new(d - b, eps).ln();
    Complex64::i() * (upper - lower) / (4.0 * PI * b)
}

/// Right- and left-moving components `(ψ(x - t), ψ*(x + t))`.
pub fn components(x: f64, t: f64, spec: &PacketSpec) -> Evaluation<(Complex64, Complex64)> {
    let right = psi_plus(x - t, spec)?;
    let left = psi_plus(x + t, spec)?.conj();
    Ok((right, left))
}

/// Positive-frequency field `Φ(x, t) = ψ(x - t) + ψ*(x + t)`; also defined for `t < 0`.
pub fn phi(x: f64, t: f64, spec: &PacketSpec) -> Evaluation {
    let (right, left) = components(x, t, spec)?;
    Ok(right + left)
}

/// `∂Φ/∂t` at `t = 0`: `(i/(2πb)) (1/(d - b) - 1/(d + b))`, purely imaginary.
pub fn phi_time_derivative_t0(x: f64, spec: &PacketSpec) -> Evaluation {
    let d = x - spec.x0();
    edge_check(d, spec, SingularKind::SimplePole)?;
    let b = spec.b();
    let im = (1.0 / (d - b) - 1.0 / (d + b)) / (2.0 * PI * b);
    Ok(Complex64::new(0.0, im))
}

/// Density expectation `⟨ρ(x)⟩_t = 2b |Φ(x, t)|²`.
///
/// The factor `2b` converts the classical normalisation (height `1/(2b)`) to
/// the unit-norm quantum state (height `1/√(2b)`), so the value inside the
/// packet at `t = 0` is `1/(2b)`.
pub fn rho_expectation(x: f64, t: f64, spec: &PacketSpec) -> Evaluation<f64> {
    let value = phi(x, t, spec)?;
    Ok(2.0 * spec.b() * value.norm_sqr())
}

/// Energy-density expectation `⟨T00(x)⟩` at `t = 0`.
pub fn energy_density_expectation(x: f64, spec: &PacketSpec) -> Evaluation<f64> {
    let u = x - spec.x0();
    edge_check(u, spec, SingularKind::SimplePole)?;
    let b = spec.b();
    let below = (u - b).abs();
    let above = (u + b).abs();
    let bracket = if sign(u - b) * sign(u + b) > 0.0 {
        1.0 / below + 1.0 / above
    } else {
        // Inside, 1/a + 1/c - 2/√(ac) = (1/√a - 1/√c)², which keeps the
        // cancellation at the centre exact.
        let diff = 1.0 / below.sqrt() - 1.0 / above.sqrt();
        diff * diff
    };
    Ok(bracket / (4.0 * PI * b))
}

/// Detector overlap kernel for two packets of half-width `b`, as a function
/// of the separation `u`.
///
/// Real part: the triangle `max(0, 2b - |u|)/(4b)` (the autocorrelation of
/// two rectangles). Imaginary part:
/// `[(u-2b) ln|u-2b| + (u+2b) ln|u+2b| - 2u ln|u|] / (4πb)`, with `0 ln 0 = 0`.
///
/// The imaginary part uses the signed `y ln|y|`, so `psi2(-u) == conj(psi2(u))`.
pub fn psi2(u: f64, b: f64) -> Complex64 {
    assert!(b > 0.0, "psi2 needs a positive half-width");
    let w = 2.0 * b;
    let re = (w - u.abs()).max(0.0) / (4.0 * b);
    let im = (xlogx(u - w) + xlogx(u + w) - 2.0 * xlogx(u)) / (4.0 * PI * b);
    Complex64::new(re, im)
}

/// Scalar product `⟨Φ_detector(0) | Φ_source(t)⟩`.
pub fn overlap(t: f64, detector: &PacketSpec, source: &PacketSpec) -> Result<Complex64> {
    let b = common_width(detector, source)?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let separation = detector.x0() - source.x0();
    Ok(psi2(separation - t, b) + psi2(separation + t, b).conj())
}

pub(crate) fn common_width(detector: &PacketSpec, source: &PacketSpec) -> Result<f64> {
    let (bd, bs) = (detector.b(), source.b());
    if (bd - bs).abs() > 1e-12 * bd.max(bs) {
        return Err(Error::WidthMismatch { detector_b: bd, source_b: bs });
    }
    Ok(bd)
}

/// Closed-form `Φ` on every grid sample at time `t`.
pub fn snapshot(spec: &PacketSpec, grid: &Grid, t: f64) -> FieldSnapshot {
    let values = grid.samples().par_iter().map(|&x| phi(x, t, spec)).collect();
    FieldSnapshot::new(grid.clone(), t, values, Provenance::ClosedForm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(x0: f64, b: f64) -> PacketSpec {
        PacketSpec::new(x0, b).unwrap()
    }

    #[test]
    fn psi_plus_centre() {
        let v = psi_plus(0.0, &spec(0.0, 0.5)).unwrap();
        assert_eq!(v, Complex64::new(0.5, 0.0));
    }

    #[test]
    fn psi_plus_two_b() {
        let s = spec(1.3, 0.5);
        let v = psi_plus(1.3 + 1.0, &s).unwrap();
        assert_abs_diff_eq!(v.re, 0.0);
        assert_abs_diff_eq!(v.im, 3f64.ln() / (2.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn psi_plus_edges_singular() {
        let s = spec(0.0, 0.5);
        for edge in [0.5, -0.5, 0.5 + 0.5 * DELTA_SING] {
            let err = psi_plus(edge, &s).unwrap_err();
            assert_eq!(err.kind, SingularKind::LogDivergence);
        }
        assert!(psi_plus(0.5 + 2.0 * DELTA_SING, &s).is_ok());
    }

    #[test]
    fn psi_plus_imaginary_part_odd() {
        let s = spec(-0.7, 0.25);
        for d in [0.01, 0.1, 0.3, 1.0, 7.5, 100.0] {
            let a = psi_plus(-0.7 + d, &s).unwrap().im;
            let b = psi_plus(-0.7 - d, &s).unwrap().im;
            assert_abs_diff_eq!(a, -b, epsilon = 1e-14);
        }
    }

    #[test]
    fn regularized_centre_and_edge() {
        let s = spec(0.0, 0.5);
        let reg = RegularizedPsiParams::new(1e-3).unwrap();
        let v = psi_plus_regularized(0.0, &s, &reg);
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-3);
        let e = psi_plus_regularized(0.5, &s, &reg);
        let lead = (2.0 * 0.5 / 1e-3f64).ln() / (4.0 * PI * 0.5);
        assert!(e.re.is_finite() && e.im.is_finite());
        assert_abs_diff_eq!(e.im.abs(), lead, epsilon = 1e-6);
    }

    #[test]
    fn regularized_rejects_bad_eps() {
        assert!(RegularizedPsiParams::new(0.0).is_err());
        assert!(RegularizedPsiParams::new(-1.0).is_err());
    }

    #[test]
    fn phi_rectangle_at_t0() {
        let s = spec(0.0, 0.5);
        assert_eq!(phi(0.2, 0.0, &s).unwrap(), Complex64::new(1.0, 0.0));
        let far = phi(2.5, 0.0, &s).unwrap();
        assert_eq!(far, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phi_tails_after_t0() {
        let s = spec(0.0, 0.5);
        let v = phi(2.5, 0.25, &s).unwrap();
        let expect = psi_plus(2.25, &s).unwrap().im - psi_plus(2.75, &s).unwrap().im;
        assert_abs_diff_eq!(v.re, 0.0);
        assert_abs_diff_eq!(v.im, expect, epsilon = 1e-16);
        assert!(v.im != 0.0);
    }

    #[test]
    fn phi_propagates_singularity() {
        let s = spec(0.0, 0.5);
        assert!(phi(0.75, 0.25, &s).is_err());
        assert!(phi(0.25, 0.25, &s).is_err());
    }

    #[test]
    fn time_derivative_values() {
        let s = spec(0.0, 0.5);
        let c = phi_time_derivative_t0(0.0, &s).unwrap();
        assert_eq!(c.re, 0.0);
        assert_abs_diff_eq!(c.im, -4.0 / PI, epsilon = 1e-14);
        let two_b = phi_time_derivative_t0(1.0, &s).unwrap();
        assert_abs_diff_eq!(two_b.im, 4.0 / (3.0 * PI), epsilon = 1e-14);
        assert_eq!(
            phi_time_derivative_t0(0.5, &s).unwrap_err().kind,
            SingularKind::SimplePole
        );
    }

    #[test]
    fn time_derivative_decays_beyond_poles() {
        let s = spec(0.0, 0.5);
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let x = 0.5 + 0.05 * k as f64;
            let m = phi_time_derivative_t0(x, &s).unwrap().norm();
            assert!(m < last);
            let m_neg = phi_time_derivative_t0(-x, &s).unwrap().norm();
            assert_abs_diff_eq!(m, m_neg, epsilon = 1e-12 * m);
            last = m;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn rho_at_t0() {
        let s = spec(0.0, 0.5);
        assert_abs_diff_eq!(rho_expectation(0.1, 0.0, &s).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(rho_expectation(3.0, 0.0, &s).unwrap(), 0.0);
        assert!(rho_expectation(2.5, 0.25, &s).unwrap() > 0.0);
    }

    #[test]
    fn energy_density_values() {
        for b in [0.01, 0.5, 2.0] {
            let s = spec(0.3, b);
            assert_eq!(energy_density_expectation(0.3, &s).unwrap(), 0.0);
        }
        let s = spec(0.0, 0.5);
        let v = energy_density_expectation(1.0, &s).unwrap();
        assert_abs_diff_eq!(v, 4.0 / (3.0 * PI), epsilon = 1e-14);
        assert!(energy_density_expectation(0.5, &s).is_err());
        assert!(energy_density_expectation(-0.5, &s).is_err());
    }

    #[test]
    fn energy_density_inside_matches_bracket() {
        let s = spec(0.0, 0.5);
        for u in [-0.4, -0.1, 0.05, 0.3, 0.45] {
            let a = (u - 0.5f64).abs();
            let c = (u + 0.5f64).abs();
            let bracket = 1.0 / a + 1.0 / c - 2.0 / (a.sqrt() * c.sqrt());
            let v = energy_density_expectation(u, &s).unwrap();
            assert_abs_diff_eq!(v, bracket / (2.0 * PI), epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_density_tail_asymptotics() {
        let s = spec(0.0, 0.5);
        for u in [10.0, 100.0, 1000.0] {
            let v = energy_density_expectation(u, &s).unwrap();
            let lead = 1.0 / (2.0 * PI * 0.5 * u);
            assert!((v / lead - 1.0).abs() < 0.5 * (0.5 / u) * (0.5 / u) * 2.1);
        }
    }

    #[test]
    fn psi2_values() {
        let c = psi2(0.0, 0.5);
        assert_abs_diff_eq!(c.re, 0.5);
        assert_abs_diff_eq!(c.im, 0.0);
        let far = psi2(2.0, 0.5);
        assert_eq!(far.re, 0.0);
        let expect = (3.0 * 3f64.ln() - 4.0 * 2f64.ln()) / (2.0 * PI);
        assert_abs_diff_eq!(far.im, expect, epsilon = 1e-15);
        let edge = psi2(1.0, 0.5);
        assert_eq!(edge.re, 0.0);
        assert_abs_diff_eq!(edge.im, 2f64.ln() / PI, epsilon = 1e-15);
    }

    #[test]
    fn psi2_conjugate_reflection() {
        for b in [0.01, 0.5, 1.7] {
            for u in [0.0, 0.003, 0.2, 0.9, 1.0, 3.4, 40.0] {
                let a = psi2(u, b);
                let m = psi2(-u, b);
                assert_eq!(a.re, m.re);
                assert_abs_diff_eq!(a.im, -m.im, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let src = spec(0.0, 0.5);
        let det = spec(2.0, 0.5);
        assert_eq!(overlap(0.0, &det, &src).unwrap(), Complex64::new(0.0, 0.0));
        let mid = overlap(0.5, &det, &src).unwrap();
        assert_eq!(mid.re, 0.0);
        assert!(mid.im.abs() > 1e-3);
        let peak = overlap(2.0, &det, &src).unwrap();
        assert_abs_diff_eq!(peak.re, 0.5);
    }

    #[test]
    fn overlap_rejects_mismatch_and_negative_time() {
        let src = spec(0.0, 0.5);
        assert!(matches!(
            overlap(0.1, &spec(2.0, 0.4), &src),
            Err(Error::WidthMismatch { .. })
        ));
        assert!(matches!(
            overlap(-0.1, &spec(2.0, 0.5), &src),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn overlap_symmetric_under_swap() {
        let a = spec(-0.4, 0.3);
        let b = spec(1.9, 0.3);
        for t in [0.0, 0.3, 1.2, 2.3, 2.6, 5.0] {
            let ab = overlap(t, &a, &b).unwrap();
            let ba = overlap(t, &b, &a).unwrap();
            assert_abs_diff_eq!(ab.re, ba.re, epsilon = 1e-15);
            assert_abs_diff_eq!(ab.im, ba.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn sign_and_xlogx_conventions() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(xlogx(0.0), 0.0);
        assert_abs_diff_eq!(xlogx(-2.0), -2.0 * 2f64.ln());
    }
}
