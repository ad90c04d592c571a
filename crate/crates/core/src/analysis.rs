//! Quantitative checks of the physical claims: exact tail cancellation at
//! `t = 0`, the `1/d` tail law, localisation of the density, the triangle
//! inequality between components, and causal arrival at a detector.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closed_form::{self, phi, psi_plus, rho_expectation};
use crate::domain::{Grid, PacketSpec};
use crate::error::{Error, Result};

/// Onset threshold for "nonzero".
pub const ONSET_THRESHOLD: f64 = 1e-10;
/// Threshold for "exactly zero" assertions.
pub const EXACT_ZERO: f64 = 1e-12;

/// Max over the grid of `|Im Φ(x, 0)|`. The grid must avoid the packet edges.
pub fn cancellation_residual(spec: &PacketSpec, grid: &Grid) -> Result<f64> {
    grid.ensure_avoids(&spec.edges())?;
    grid.samples()
        .par_iter()
        .map(|&x| Ok(phi(x, 0.0, spec)?.im.abs()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Min of `|Im Φ(x, t)|` over samples outside the light cone `|x - x0| > b + t`.
/// Strictly positive for any `t > 0`: the tails are no longer cancelled.
pub fn min_tail_beyond_light_cone(spec: &PacketSpec, grid: &Grid, t: f64) -> Result<f64> {
    grid.ensure_avoids(&spec.characteristic_points(t))?;
    let reach = spec.b() + t.abs();
    let outside: Vec<f64> = grid
        .samples()
        .iter()
        .copied()
        .filter(|x| (x - spec.x0()).abs() > reach)
        .collect();
    if outside.is_empty() {
        return Err(Error::NoAdmissibleSamples);
    }
    outside
        .par_iter()
        .map(|&x| Ok(phi(x, t, spec)?.im.abs()))
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// Max of `|Im Φ(x, t)|` over samples outside the light cone.
pub fn max_tail_beyond_light_cone(spec: &PacketSpec, grid: &Grid, t: f64) -> Result<f64> {
    grid.ensure_avoids(&spec.characteristic_points(t))?;
    let reach = spec.b() + t.abs();
    grid.samples()
        .par_iter()
        .filter(|&&x| (x - spec.x0()).abs() > reach)
        .map(|&x| Ok(phi(x, t, spec)?.im.abs()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Power law `coefficient / d^exponent` fitted to `Im ψ` at distance `d = x - x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub coefficient: f64,
    pub exponent: f64,
    /// Max relative deviation of the fitted law over the window samples.
    pub residual: f64,
    pub window: [f64; 2],
}

impl TailFit {
    pub fn evaluate(&self, d: f64) -> f64 {
        self.coefficient * d.powf(-self.exponent)
    }

    /// Tail amplitude relative to the packet height `1/(2b)`; `≈ b/(πd)`.
    pub fn relative_to_height(&self, spec: &PacketSpec, d: f64) -> f64 {
        self.evaluate(d) / spec.height()
    }
}

/// Least-squares fit of `ln Im ψ(x)` against `ln(x - x0)` on `n` log-spaced
/// samples in `[x_lo, x_hi]`.
pub fn tail_coefficient(spec: &PacketSpec, x_lo: f64, x_hi: f64, n: usize) -> Result<TailFit> {
    let min = spec.x0() + 10.0 * spec.b();
    if !(x_lo > min) {
        return Err(Error::WindowTooClose { x_lo, min });
    }
    if !(x_hi > x_lo) || n < 2 {
        return Err(Error::InvalidWindow { x_lo, x_hi, n });
    }
    let (d_lo, d_hi) = (x_lo - spec.x0(), x_hi - spec.x0());
    let ratio = (d_hi / d_lo).ln();
    let points: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let d = d_lo * (ratio * j as f64 / (n - 1) as f64).exp();
            Ok((d, psi_plus(spec.x0() + d, spec)?.im))
        })
        .collect::<Result<_>>()?;

    let logs: Vec<(f64, f64)> = points.iter().map(|&(d, v)| (d.ln(), v.ln())).collect();
    let m = n as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let fit = TailFit {
        coefficient: (mean_y - slope * mean_x).exp(),
        exponent: -slope,
        residual: 0.0,
        window: [x_lo, x_hi],
    };
    let residual = points
        .iter()
        .map(|&(d, v)| (fit.evaluate(d) / v - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(TailFit { residual, ..fit })
}

/// Outcome of [`localization_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Localization {
    /// Max of `⟨ρ⟩` over samples with `|x - x0| > b + t`.
    pub outside_max: f64,
    /// Trapezoid integral of `⟨ρ⟩` over the grid.
    pub integral: f64,
}

impl Localization {
    /// `max(outside_max, |integral - 1|)`.
    pub fn deviation(&self) -> f64 {
        self.outside_max.max((self.integral - 1.0).abs())
    }
}

/// Density localisation at `t = 0`.
pub fn localization_check(spec: &PacketSpec, grid: &Grid) -> Result<Localization> {
    localization_at(spec, grid, 0.0)
}

/// Same as [`localization_check`] at time `t`, with "outside" meaning beyond
/// the light cone `|x - x0| > b + t`.
pub fn localization_at(spec: &PacketSpec, grid: &Grid, t: f64) -> Result<Localization> {
    let (need_min, need_max) = (spec.x0() - 10.0 * spec.b(), spec.x0() + 10.0 * spec.b());
    // One cell of slack: edge-avoiding grids are shifted by a fraction of a cell.
    let slack = grid.spacing();
    if grid.x_min() > need_min + slack || grid.x_max() < need_max - slack {
        return Err(Error::InsufficientSpan {
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            need_min,
            need_max,
        });
    }
    grid.ensure_avoids(&spec.characteristic_points(t))?;
    let rho: Vec<f64> = grid
        .samples()
        .par_iter()
        .map(|&x| rho_expectation(x, t, spec))
        .collect::<std::result::Result<_, _>>()?;
    let reach = spec.b() + t.abs();
    let outside_max = grid
        .samples()
        .iter()
        .zip(&rho)
        .filter(|(x, _)| (*x - spec.x0()).abs() > reach)
        .map(|(_, &r)| r)
        .fold(0.0, f64::max);
    let h = grid.spacing();
    let n = rho.len();
    let integral = h * (rho[1..n - 1].iter().sum::<f64>() + 0.5 * (rho[0] + rho[n - 1]));
    Ok(Localization { outside_max, integral })
}

/// `|ψ(x - t)| + |ψ*(x + t)| - |Φ(x, t)|`, never negative.
pub fn triangle_gap(x: f64, t: f64, spec: &PacketSpec) -> Result<f64> {
    let (right, left) = closed_form::components(x, t, spec)?;
    Ok((right.norm() + left.norm() - (right + left).norm()).max(0.0))
}

/// Max of [`triangle_gap`] over a grid that avoids the characteristics.
pub fn max_triangle_gap(spec: &PacketSpec, grid: &Grid, t: f64) -> Result<f64> {
    grid.ensure_avoids(&spec.characteristic_points(t))?;
    grid.samples()
        .par_iter()
        .map(|&x| triangle_gap(x, t, spec))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Detector overlap sampled on a uniform time axis starting at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapSeries {
    times: Vec<f64>,
    values: Vec<Complex64>,
    detector: PacketSpec,
    source: PacketSpec,
}

impl OverlapSeries {
    /// Closed-form overlap at `t = j dt`, `j = 0..=round(t_max/dt)`.
    pub fn sample(detector: PacketSpec, source: PacketSpec, t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && t_max > 0.0 && dt.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidSeries(format!("t_max = {t_max}, dt = {dt}")));
        }
        let steps = (t_max / dt).round() as usize;
        let times: Vec<f64> = (0..=steps).map(|j| j as f64 * dt).collect();
        let values = times
            .par_iter()
            .map(|&t| closed_form::overlap(t, &detector, &source))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, values, detector, source)
    }

    pub fn new(
        times: Vec<f64>,
        values: Vec<Complex64>,
        detector: PacketSpec,
        source: PacketSpec,
    ) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidSeries("need matching times and values, at least two".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidSeries(format!("series must start at t = 0, got {}", times[0])));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSeries("times must be strictly ascending".into()));
        }
        closed_form::common_width(&detector, &source)?;
        Ok(Self { times, values, detector, source })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn detector(&self) -> &PacketSpec {
        &self.detector
    }

    pub fn source(&self) -> &PacketSpec {
        &self.source
    }

    pub fn separation(&self) -> f64 {
        self.detector.x0() - self.source.x0()
    }

    /// Largest gap between consecutive times.
    pub fn max_step(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

/// Onsets detected in an overlap series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalArrival {
    /// First time `|Re| > ONSET_THRESHOLD`; `None` if the window ends first.
    pub arrival: Option<f64>,
    /// First time `|Im| > ONSET_THRESHOLD`.
    pub precursor_onset: Option<f64>,
    /// Causal prediction `(x1 - x0) - 2b`.
    pub expected_arrival: f64,
}

/// Detects the causal arrival (compact-support onset of the real part) and
/// the precursor onset (imaginary part). The step must not exceed `b/10`.
pub fn causal_arrival(series: &OverlapSeries) -> Result<CausalArrival> {
    let b = series.source().b();
    let step = series.max_step();
    if step > 0.1 * b * (1.0 + 1e-9) {
        return Err(Error::StepTooCoarse { step, limit: 0.1 * b });
    }
    let first = |pick: fn(&Complex64) -> f64| {
        series
            .times()
            .iter()
            .zip(series.values())
            .find(|(_, v)| pick(v).abs() > ONSET_THRESHOLD)
            .map(|(&t, _)| t)
    };
    Ok(CausalArrival {
        arrival: first(|v| v.re),
        precursor_onset: first(|v| v.im),
        expected_arrival: series.separation().abs() - 2.0 * b,
    })
}

/// Peak `|overlap|` before the detected arrival against the peak inside the
/// causal window `|x1 - x0 - t| < 2b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecursorComparison {
    pub precursor_max: f64,
    pub causal_max: f64,
}

impl PrecursorComparison {
    pub fn ratio(&self) -> f64 {
        self.causal_max / self.precursor_max
    }
}

pub fn precursor_vs_causal(series: &OverlapSeries) -> Result<PrecursorComparison> {
    let arrival = causal_arrival(series)?;
    let Some(t_star) = arrival.arrival else {
        return Err(Error::InvalidSeries("no causal arrival in window".into()));
    };
    let b = series.source().b();
    let d = series.separation().abs();
    let mut precursor_max = 0.0f64;
    let mut causal_max = 0.0f64;
    for (&t, v) in series.times().iter().zip(series.values()) {
        if t > 0.0 && t < t_star {
            precursor_max = precursor_max.max(v.norm());
        }
        if (d - t).abs() < 2.0 * b {
            causal_max = causal_max.max(v.norm());
        }
    }
    Ok(PrecursorComparison { precursor_max, causal_max })
}
