//! Closed forms against the independent numerical routes, including the
//! worked examples for each oracle.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use curtain::closed_form::{overlap, phi, psi2, psi_plus, psi_plus_regularized, RegularizedPsiParams};
use curtain::spectral::{
    evolve_dft, evolve_quadrature, evolve_quadrature_branch, overlap_quadrature, phi_plus_spectrum, Branch,
    SpectralConfig,
};
use curtain::{Complex64, Error, PacketSpec};

fn packet(x0: f64, b: f64) -> PacketSpec {
    PacketSpec::new(x0, b).unwrap()
}

#[test]
fn quadrature_examples() {
    let cfg = SpectralConfig::default();
    let s = packet(0.0, 0.5);
    let inside = evolve_quadrature(0.2, 0.0, &s, &cfg).unwrap().value;
    assert_abs_diff_eq!(inside.re, 1.0, epsilon = 1e-4);
    assert_abs_diff_eq!(inside.im, 0.0, epsilon = 1e-4);

    let outside = evolve_quadrature(1.0, 0.0, &s, &cfg).unwrap().value;
    assert_abs_diff_eq!(outside.re, 2.0 * psi_plus(1.0, &s).unwrap().re, epsilon = 1e-4);
    assert_abs_diff_eq!(outside.im, 0.0, epsilon = 1e-4);

    let right = evolve_quadrature_branch(1.0, 0.0, &s, &cfg, Branch::RightMover).unwrap().value;
    assert_abs_diff_eq!(right.re, 0.0, epsilon = 1e-4);
    assert_abs_diff_eq!(right.im, 3f64.ln() / (2.0 * PI), epsilon = 1e-4);

    let left = evolve_quadrature_branch(1.0, 0.0, &s, &cfg, Branch::LeftMover).unwrap().value;
    assert_abs_diff_eq!(left.im, -3f64.ln() / (2.0 * PI), epsilon = 1e-4);
}

#[test]
fn quadrature_tracks_a_moved_packet() {
    let cfg = SpectralConfig::default();
    let s = packet(-1.3, 0.25);
    for (x, t) in [(-1.3, 0.0), (0.0, 0.5), (-2.9, 1.0), (0.7, 2.0)] {
        let q = evolve_quadrature(x, t, &s, &cfg).unwrap();
        let c = phi(x, t, &s).unwrap();
        assert!((q.value - c).norm() < 1e-4, "({x}, {t}): {} vs {c}", q.value);
    }
}

#[test]
fn quadrature_error_estimate_covers_the_gap() {
    let cfg = SpectralConfig::default();
    let s = packet(0.0, 0.5);
    let probes = curtain::verify::oracle_probes(&s);
    let covered = probes
        .iter()
        .filter(|&&(x, t)| {
            let q = evolve_quadrature(x, t, &s, &cfg).unwrap();
            (q.value - phi(x, t, &s).unwrap()).norm() <= q.error_estimate
        })
        .count();
    assert!(covered as f64 >= 0.99 * probes.len() as f64, "{covered}/{}", probes.len());
}

#[test]
fn quadrature_rejects_bad_config() {
    let s = packet(0.0, 0.5);
    let cfg = SpectralConfig { eps_schedule: vec![1e-2, 1e-1], ..SpectralConfig::default() };
    assert!(matches!(evolve_quadrature(0.0, 0.0, &s, &cfg), Err(Error::InvalidConfig(_))));
    let cfg = SpectralConfig { k_max: 100.0, ..SpectralConfig::default() };
    assert!(matches!(evolve_quadrature(0.0, 0.0, &s, &cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn spectrum_against_direct_transform() {
    // ∫ rect(x) e^{-ikx} dx by midpoint sums on the support.
    let s = packet(0.4, 0.5);
    for k in [0.0, 0.7, PI, 5.5] {
        let n = 20_000;
        let h = 2.0 * s.b() / n as f64;
        let direct: Complex64 = (0..n)
            .map(|j| {
                let x = s.x0() - s.b() + (j as f64 + 0.5) * h;
                Complex64::from_polar(s.height() * h, -k * x)
            })
            .sum();
        assert!((direct - phi_plus_spectrum(k, &s)).norm() < 1e-8);
    }
}

#[test]
fn regularized_psi_converges_at_first_order() {
    let s = packet(0.0, 0.5);
    for u in [1.0, 0.2, -3.0] {
        let exact = psi_plus(u, &s).unwrap();
        let err = |eps: f64| (psi_plus_regularized(u, &s, &RegularizedPsiParams::new(eps).unwrap()) - exact).norm();
        let order = (err(1e-3) / err(1e-4)).log10();
        assert!((order - 1.0).abs() < 0.05, "u = {u}: order {order}");
    }
}

#[test]
fn overlap_quadrature_examples() {
    let cfg = SpectralConfig::default();
    let (d, s) = (packet(2.0, 0.5), packet(0.0, 0.5));
    let at0 = overlap_quadrature(0.0, &d, &s, &cfg).unwrap().value;
    assert!(at0.norm() < 1e-4);
    let early = overlap_quadrature(0.5, &d, &s, &cfg).unwrap().value;
    assert!((early - overlap(0.5, &d, &s).unwrap()).norm() < 1e-4);
    let peak = overlap_quadrature(2.0, &d, &s, &cfg).unwrap().value;
    assert_abs_diff_eq!(peak.re, 0.5, epsilon = 1e-4);
}

#[test]
fn overlap_quadrature_confirms_the_signed_kernel() {
    // Inside the causal window the two forms of the kernel differ; the
    // quadrature picks the signed one.
    let cfg = SpectralConfig::default();
    let (d, s) = (packet(2.0, 0.5), packet(0.0, 0.5));
    let q = overlap_quadrature(2.5, &d, &s, &cfg).unwrap().value;
    let signed = overlap(2.5, &d, &s).unwrap();
    assert!((q - signed).norm() < 1e-4);
    assert_abs_diff_eq!(q.re, 0.25, epsilon = 1e-4);
    assert_abs_diff_eq!(q.im, -0.2979, epsilon = 1e-4);
}

#[test]
fn overlap_quadrature_narrow_and_swapped() {
    let cfg = SpectralConfig::default();
    for b in [0.25, 0.1] {
        let (d, s) = (packet(1.5, b), packet(-0.5, b));
        for t in [0.3, 1.7, 2.0, 2.4] {
            let q = overlap_quadrature(t, &d, &s, &cfg).unwrap().value;
            let c = overlap(t, &d, &s).unwrap();
            assert!((q - c).norm() < 1e-4, "b = {b}, t = {t}: {q} vs {c}");
            let swapped = overlap_quadrature(t, &s, &d, &cfg).unwrap().value;
            assert!((swapped - q).norm() < 1e-4);
        }
    }
}

#[test]
fn overlap_quadrature_with_the_pole_on_a_kink() {
    // t = D - 2b, D, D + 2b put the kernel pole on a corner of the weight.
    let cfg = SpectralConfig::default();
    let (d, s) = (packet(2.0, 0.5), packet(0.0, 0.5));
    for t in [1.0, 2.0, 3.0] {
        let q = overlap_quadrature(t, &d, &s, &cfg).unwrap();
        let c = overlap(t, &d, &s).unwrap();
        assert!((q.value - c).norm() < 1e-4, "t = {t}: {} vs {c}", q.value);
        assert!((q.value - c).norm() <= q.error_estimate.max(1e-9));
    }
}

#[test]
fn overlap_width_mismatch() {
    let cfg = SpectralConfig::default();
    assert!(matches!(
        overlap_quadrature(0.5, &packet(2.0, 0.5), &packet(0.0, 0.4), &cfg),
        Err(Error::WidthMismatch { .. })
    ));
}

#[test]
fn psi2_values() {
    assert_abs_diff_eq!(psi2(0.0, 0.5).re, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(psi2(0.0, 0.5).im, 0.0, epsilon = 1e-15);
    let far = psi2(2.0, 0.5);
    assert_eq!(far.re, 0.0);
    assert_abs_diff_eq!(far.im, (3.0 * 3f64.ln() - 4.0 * 2f64.ln()) / (2.0 * PI), epsilon = 1e-14);
    assert_abs_diff_eq!(far.im, 0.083_277_5, epsilon = 1e-7);
}

#[test]
fn dft_far_field_and_identity() {
    let cfg = SpectralConfig::default();
    let s = packet(0.0, 0.5);
    let start = evolve_dft(&s, 0.0, &cfg).unwrap();
    for (x, v) in start.finite() {
        assert_eq!(v, Complex64::new(s.rectangle(x), 0.0));
    }
    let t = 0.25;
    let snap = evolve_dft(&s, t, &cfg).unwrap();
    let chars = s.characteristic_points(t);
    let mut worst = 0.0f64;
    for (x, v) in snap.finite() {
        if x.abs() <= 32.0 && chars.iter().all(|p| (x - p).abs() >= 4.0 * s.b()) {
            worst = worst.max((v - phi(x, t, &s).unwrap()).norm());
        }
    }
    assert!(worst < 5e-3, "{worst}");
}

#[test]
fn dft_guards() {
    let cfg = SpectralConfig::default();
    assert!(matches!(evolve_dft(&packet(31.8, 0.5), 0.5, &cfg), Err(Error::PayloadNearSeam { .. })));
    assert!(matches!(evolve_dft(&packet(0.0, 2.0), 0.5, &cfg), Err(Error::DomainTooShort { .. })));
}
