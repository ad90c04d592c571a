//! Independent numerical routes to the positive-frequency field.
//!
//! Nothing in this module calls into [`crate::closed_form`]; it evaluates the
//! mode integrals directly so the closed forms can be checked against it.
//!
//! * [`evolve_quadrature`]: damped `k`-integral at a list of `ε`, extrapolated
//!   linearly to `ε → 0`.
//! * [`evolve_dft`]: discrete Fourier evolution on a periodic grid, each mode
//!   multiplied by `exp(-i|k|t)`.
//! * [`overlap_quadrature`]: detector overlap with the `k`-integral done
//!   analytically (two `ε`-displaced poles) and the spatial integrals numerically.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::{Evaluation, FieldSnapshot, Grid, PacketSpec, Provenance};
use crate::error::{Error, Result};

/// Everything the numerical oracles need.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConfig {
    /// Damping values `ε`, strictly descending.
    pub eps_schedule: Vec<f64>,
    /// Wavenumber cutoff.
    pub k_max: f64,
    /// Trapezoid panels on `[0, k_max]`.
    pub n_k: usize,
    /// Periodic half-length `L`; the DFT domain is `[-L, L)`.
    pub half_length: f64,
    /// Spatial samples on the periodic grid (power of two).
    pub n_x: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        let eps_schedule = vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
        Self {
            k_max: 20.0 / 1e-3,
            eps_schedule,
            n_k: 200_000,
            half_length: 64.0,
            n_x: 1 << 14,
        }
    }
}

impl SpectralConfig {
    pub fn with_eps_schedule(mut self, eps_schedule: Vec<f64>) -> Self {
        let min = eps_schedule.last().copied().unwrap_or(f64::NAN);
        self.k_max = 20.0 / min;
        self.eps_schedule = eps_schedule;
        self
    }

    pub fn min_eps(&self) -> f64 {
        self.eps_schedule.last().copied().unwrap_or(f64::NAN)
    }

    /// Node spacing of the `k` quadrature.
    pub fn dk(&self) -> f64 {
        self.k_max / self.n_k as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.eps_schedule.len() < 2 {
            return bad("eps schedule needs at least two entries".into());
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad(format!("eps schedule must be positive: {:?}", self.eps_schedule));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("eps schedule must be strictly descending: {:?}", self.eps_schedule));
        }
        if !(self.k_max.is_finite() && self.k_max * self.min_eps() >= 20.0 * (1.0 - 1e-12)) {
            return bad(format!(
                "k_max * min(eps) = {} must be at least 20",
                self.k_max * self.min_eps()
            ));
        }
        if self.n_k < 2 {
            return bad(format!("n_k = {} is too small", self.n_k));
        }
        if !(self.half_length > 0.0 && self.half_length.is_finite()) {
            return bad(format!("half-length must be positive, got {}", self.half_length));
        }
        if !self.n_x.is_power_of_two() || self.n_x < 2 {
            return bad(format!("n_x = {} must be a power of two", self.n_x));
        }
        Ok(())
    }
}

/// Fourier transform of the rectangle: `exp(-ik x0) sin(kb)/(kb)`, `1` at `k = 0`.
pub fn phi_plus_spectrum(k: f64, spec: &PacketSpec) -> Complex64 {
    Complex64::from_polar(1.0, -k * spec.x0()) * sinc(k * spec.b())
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Fixed-order tree summation, so repeated runs are bit-identical.
fn pairwise_sum<F>(lo: usize, hi: usize, term: &F) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    const BLOCK: usize = 128;
    if hi - lo <= BLOCK {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += term(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term)
    }
}

/// `∫_0^∞ exp((ia - ε)k) sinc(bk) dk` by the composite trapezoid rule with the
/// two leading Euler-Maclaurin end corrections at `k = 0`. The far end sits
/// where `exp(-εk)` has decayed below `exp(-k_max min(ε))`.
fn damped_half_line(a: f64, b: f64, eps: f64, cfg: &SpectralConfig) -> Complex64 {
    let dk = cfg.dk();
    let cutoff = (cfg.k_max * cfg.min_eps() / eps).min(cfg.k_max);
    let n = (cutoff / dk).ceil() as usize;
    let term = |j: usize| {
        let k = j as f64 * dk;
        let (s, c) = (a * k).sin_cos();
        Complex64::new(c, s) * ((-eps * k).exp() * sinc(b * k))
    };
    let interior = pairwise_sum(1, n, &term);
    let ends = 0.5 * (term(0) + term(n));
    let slope = Complex64::new(-eps, a);
    let third = slope * slope * slope - slope * (b * b);
    (interior + ends) * dk + slope * (dk * dk / 12.0) - third * (dk.powi(4) / 720.0)
}

/// Which part of the `k` line to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Whole line: `Φ(x, t)`.
    Full,
    /// `k > 0`: the right-mover `ψ(x - t)`.
    RightMover,
    /// `k < 0`: the left-mover `ψ*(x + t)`.
    LeftMover,
}

/// An `ε → 0` extrapolated value with the per-`ε` samples it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error_estimate: f64,
    pub samples: Vec<(f64, Complex64)>,
}

/// Floor below which disagreement between successive extrapolations is not
/// treated as a convergence failure.
const SPREAD_FLOOR: f64 = 1e-7;

/// Linear extrapolation to `ε = 0` through the last two samples.
///
/// The error estimate is the smaller of the last extrapolation step and the
/// change between the last two linear extrapolations. Fails when those two
/// extrapolations differ by more than ten times the step.
pub fn extrapolate_to_zero(samples: Vec<(f64, Complex64)>) -> Result<Extrapolated> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidConfig("need at least two eps samples".into()));
    }
    let linear = |(e1, v1): (f64, Complex64), (e2, v2): (f64, Complex64)| {
        v2 - (v1 - v2) * (e2 / (e1 - e2))
    };
    let value = linear(samples[n - 2], samples[n - 1]);
    let step = (value - samples[n - 1].1).norm();
    let mut error_estimate = step;
    if n >= 3 {
        let previous = linear(samples[n - 3], samples[n - 2]);
        let spread = (value - previous).norm();
        if spread > 10.0 * step.max(SPREAD_FLOOR) {
            return Err(Error::NonConvergence { spread, step });
        }
        error_estimate = spread.min(step);
    }
    Ok(Extrapolated { value, error_estimate, samples })
}

/// `Φ(x, t)` from the damped mode integral, extrapolated to `ε → 0`.
pub fn evolve_quadrature(x: f64, t: f64, spec: &PacketSpec, cfg: &SpectralConfig) -> Result<Extrapolated> {
    evolve_quadrature_branch(x, t, spec, cfg, Branch::Full)
}

pub fn evolve_quadrature_branch(
    x: f64,
    t: f64,
    spec: &PacketSpec,
    cfg: &SpectralConfig,
    branch: Branch,
) -> Result<Extrapolated> {
    cfg.validate()?;
    let samples = cfg
        .eps_schedule
        .iter()
        .map(|&eps| (eps, damped_field(x, t, spec, eps, cfg, branch)))
        .collect();
    extrapolate_to_zero(samples)
}

/// The damped integral at a single `ε`.
pub fn damped_field(
    x: f64,
    t: f64,
    spec: &PacketSpec,
    eps: f64,
    cfg: &SpectralConfig,
    branch: Branch,
) -> Complex64 {
    let b = spec.b();
    // k > 0: exp(ik(x - t - x0)); k = -q < 0: exp(-iq(x + t - x0)).
    let right = || damped_half_line(x - t - spec.x0(), b, eps, cfg);
    let left = || damped_half_line(-(x + t - spec.x0()), b, eps, cfg);
    let total = match branch {
        Branch::Full => right() + left(),
        Branch::RightMover => right(),
        Branch::LeftMover => left(),
    };
    total / (2.0 * PI)
}

/// Multiplies every periodic mode by `exp(-i|k|t)`.
pub struct PeriodicPropagator {
    n: usize,
    spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PeriodicPropagator {
    pub fn new(n: usize, spacing: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            spacing,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Angular wavenumber of FFT bin `j`; the Nyquist bin maps to `-π/dx`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * PI * m / (self.n as f64 * self.spacing)
    }

    pub fn propagate(&self, field: &[Complex64], t: f64) -> Vec<Complex64> {
        assert_eq!(field.len(), self.n);
        let mut buf = field.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (j, mode) in buf.iter_mut().enumerate() {
            let phase = -self.wavenumber(j).abs() * t;
            *mode *= Complex64::from_polar(scale, phase);
        }
        self.inverse.process(&mut buf);
        buf
    }
}

/// Positive-frequency evolution of the sampled rectangle on `[-L, L)`.
pub fn evolve_dft(spec: &PacketSpec, t: f64, cfg: &SpectralConfig) -> Result<FieldSnapshot> {
    cfg.validate()?;
    let half = cfg.half_length;
    if half < 50.0 * spec.b() {
        return Err(Error::DomainTooShort { half_length: half, required: 50.0 * spec.b() });
    }
    let extent = spec.x0().abs() + spec.b() + t.abs();
    if extent > 0.5 * half {
        return Err(Error::PayloadNearSeam { extent, limit: 0.5 * half });
    }
    let n = cfg.n_x;
    let dx = 2.0 * half / n as f64;
    let grid = Grid::uniform(-half, half - dx, n)?;
    let initial: Vec<Complex64> = grid
        .samples()
        .iter()
        .map(|&x| Complex64::new(spec.rectangle(x), 0.0))
        .collect();
    let evolved = if t == 0.0 {
        initial
    } else {
        PeriodicPropagator::new(n, grid.spacing()).propagate(&initial, t)
    };
    let values: Vec<Evaluation> = evolved.into_iter().map(Ok).collect();
    Ok(FieldSnapshot::new(grid, t, values, Provenance::OracleDft))
}

/// Split `[a, b]` until every panel is no longer than half its distance to
/// the nearest pole (plus `ε`).
fn graded_panels(a: f64, b: f64, poles: &[f64], eps: f64, out: &mut Vec<(f64, f64)>) {
    let mut stack = vec![(a, b)];
    while let Some((lo, hi)) = stack.pop() {
        let dist = poles
            .iter()
            .map(|&p| if p >= lo && p <= hi { 0.0 } else { (p - lo).abs().min((p - hi).abs()) })
            .fold(f64::INFINITY, f64::min);
        if hi - lo <= 0.5 * (dist + eps) {
            out.push((lo, hi));
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
}

/// Detector overlap `⟨Φ_detector(0)|Φ_source(t)⟩` by quadrature.
///
/// With `s = x' - x''` the double spatial integral over the two rectangles
/// collapses onto the triangle weight `max(0, 2b - |s - D|)`, `D = x1 - x0`.
/// The `k` integral is done analytically:
/// `∫ dk exp(-i|k|t + iks - ε|k|) = i/(s - t + iε) - i/(s + t - iε)`.
pub fn overlap_quadrature(
    t: f64,
    detector: &PacketSpec,
    source: &PacketSpec,
    cfg: &SpectralConfig,
) -> Result<Extrapolated> {
    cfg.validate()?;
    let b = crate::closed_form::common_width(detector, source)?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero degree"));
    let samples = cfg
        .eps_schedule
        .iter()
        .map(|&eps| (eps, damped_overlap(t, detector.x0() - source.x0(), b, eps, &rule)))
        .collect();
    extrapolate_to_zero(samples)
}

fn damped_overlap(t: f64, separation: f64, b: f64, eps: f64, rule: &GaussLegendre) -> Complex64 {
    let w = 2.0 * b;
    let weight = |s: f64| (w - (s - separation).abs()).max(0.0);
    let kernel = |s: f64| {
        let i = Complex64::i();
        i / Complex64::new(s - t, eps) - i / Complex64::new(s + t, -eps)
    };
    let poles = [t, -t];
    let mut breaks = vec![separation - w, separation, separation + w];
    breaks.extend(poles.iter().copied().filter(|p| (separation - w..=separation + w).contains(p)));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut panels = Vec::new();
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            graded_panels(pair[0], pair[1], &poles, eps, &mut panels);
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (lo, hi) in panels {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(node, wt) in rule.as_node_weight_pairs() {
            let s = mid + half * node;
            acc += kernel(s) * (weight(s) * wt);
        }
        total += acc * half;
    }
    (total - kink_terms(t, separation, b, eps)) / (4.0 * PI * b)
}

/// Non-analytic part of the damped overlap.
///
/// Each pole `p ∈ {t, -t}` contributes `∫ w(s) ε/((s - p)² + ε²) ds` to the
/// real part. Where `p` sits exactly on a kink of the triangle weight with
/// slope jump `J`, that integral contains `-J ε ln ε`, which a linear fit in
/// `ε` cannot remove. Subtracting it leaves a power series in `ε`.
fn kink_terms(t: f64, separation: f64, b: f64, eps: f64) -> Complex64 {
    let w = 2.0 * b;
    let kinks = [(separation - w, 1.0), (separation, -2.0), (separation + w, 1.0)];
    let mut jump = 0.0;
    for p in [t, -t] {
        for (k, j) in kinks {
            if (p - k).abs() <= KINK_COINCIDENCE * (1.0 + k.abs()) {
                jump += j;
            }
        }
    }
    Complex64::new(-jump * eps * eps.ln(), 0.0)
}

/// Relative distance below which a pole counts as sitting on a kink.
const KINK_COINCIDENCE: f64 = 1e-12;

/// Neighbourhoods of the characteristics `x ± t = x0 ± b` excluded from
/// smooth-field checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristics {
    pub spec: PacketSpec,
    pub margin: f64,
}

impl Characteristics {
    fn clear(&self, x: f64, t: f64, reach: f64) -> bool {
        let [lo, hi] = self.spec.edges();
        [x - t - lo, x - t - hi, x + t - lo, x + t - hi]
            .iter()
            .all(|d| d.abs() >= self.margin + reach)
    }
}

/// Max over interior samples of the centred-difference d'Alembertian
/// `|Φ_tt - Φ_xx|` built from snapshots at `t - h`, `t`, `t + h`.
pub fn wave_equation_residual(
    snapshots: [&FieldSnapshot; 3],
    exclude: Option<&Characteristics>,
) -> Result<f64> {
    let [prev, cur, next] = snapshots;
    if prev.grid() != cur.grid() || next.grid() != cur.grid() {
        return Err(Error::GridMismatch);
    }
    let h = cur.t() - prev.t();
    let h_next = next.t() - cur.t();
    if !(h > 0.0) || (h_next - h).abs() > 1e-9 * h {
        return Err(Error::NonUniformTimes([prev.t(), cur.t(), next.t()]));
    }
    let grid = cur.grid();
    let dx = grid.spacing();
    let xs = grid.samples();
    let (p, c, n) = (prev.values(), cur.values(), next.values());
    let mut worst: Option<f64> = None;
    for i in 1..xs.len() - 1 {
        if let Some(ch) = exclude {
            if !ch.clear(xs[i], cur.t(), h + dx) {
                continue;
            }
        }
        let (Ok(pm), Ok(cm), Ok(nm), Ok(cl), Ok(cr)) = (p[i], c[i], n[i], c[i - 1], c[i + 1]) else {
            continue;
        };
        let tt = (nm - 2.0 * cm + pm) / (h * h);
        let xx = (cr - 2.0 * cm + cl) / (dx * dx);
        let r = (tt - xx).norm();
        worst = Some(worst.map_or(r, |w: f64| w.max(r)));
    }
    worst.ok_or(Error::NoAdmissibleSamples)
}
