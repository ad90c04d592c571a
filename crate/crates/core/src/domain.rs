//! Shared domain types: rectangle packets, uniform grids, singular-point
//! bookkeeping and field snapshots.
//!
//! Units: `t` in seconds, `x` in light-seconds, `c = 1`. Amplitudes are
//! dimensionless.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};

/// Minimum distance (light-seconds) a sample keeps from a non-removable
/// singularity before an evaluator reports it instead of evaluating.
pub const DELTA_SING: f64 = 1e-6;

/// Rectangle packet of height `1/(2b)` on `[x0 - b, x0 + b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    x0: f64,
    b: f64,
}

impl PacketSpec {
    pub fn new(x0: f64, b: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidCentre(x0));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidHalfWidth(b));
        }
        Ok(Self { x0, b })
    }

    /// Packet centre.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Half-width; the full width is `2b`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Classical amplitude `1/(2b)` inside the packet at `t = 0`.
    pub fn height(&self) -> f64 {
        0.5 / self.b
    }

    /// The two edges `x0 - b`, `x0 + b`.
    pub fn edges(&self) -> [f64; 2] {
        [self.x0 - self.b, self.x0 + self.b]
    }

    /// Positions where the closed forms are singular at time `t`: the four
    /// characteristics `x ± t = x0 ± b` sliced at that time.
    pub fn characteristic_points(&self, t: f64) -> [f64; 4] {
        let [lo, hi] = self.edges();
        [lo - t, hi - t, lo + t, hi + t]
    }

    pub fn translated(&self, shift: f64) -> Result<Self> {
        Self::new(self.x0 + shift, self.b)
    }

    /// `Θ(b - |x - x0|) / (2b)` with the midpoint value on the edges.
    pub fn rectangle(&self, x: f64) -> f64 {
        let d = (x - self.x0).abs();
        if d < self.b {
            self.height()
        } else if d == self.b {
            0.5 * self.height()
        } else {
            0.0
        }
    }
}

impl fmt::Display for PacketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x0={} b={}", self.x0, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularKind {
    LogDivergence,
    SimplePole,
    InverseSqrt,
    RemovableXLogX,
}

impl SingularKind {
    pub fn is_removable(self) -> bool {
        matches!(self, SingularKind::RemovableXLogX)
    }
}

impl fmt::Display for SingularKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingularKind::LogDivergence => "log-divergence",
            SingularKind::SimplePole => "simple-pole",
            SingularKind::InverseSqrt => "inverse-sqrt",
            SingularKind::RemovableXLogX => "removable-x-log-x",
        };
        f.write_str(s)
    }
}

/// A point where a closed form cannot be evaluated. Returned in place of a
/// value, never encoded as an infinity.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{kind} singularity at x = {location}")]
pub struct SingularPoint {
    pub location: f64,
    pub kind: SingularKind,
}

impl SingularPoint {
    pub fn new(location: f64, kind: SingularKind) -> Self {
        Self { location, kind }
    }
}

/// Result of evaluating a closed form at one point.
pub type Evaluation<T = Complex64> = std::result::Result<T, SingularPoint>;

/// Uniform, immutable sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    samples: Vec<f64>,
    spacing: f64,
}

impl Grid {
    /// `n` equally spaced samples from `x_min` to `x_max` inclusive.
    pub fn uniform(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        check_range(x_min, x_max, n)?;
        let spacing = (x_max - x_min) / (n - 1) as f64;
        Ok(Self::from_origin(x_min, spacing, n))
    }

    /// Uniform grid whose samples all keep at least [`DELTA_SING`] from every
    /// point in `avoid`. The grid is shifted right by at most half a cell.
    pub fn avoiding(x_min: f64, x_max: f64, n: usize, avoid: &[f64]) -> Result<Self> {
        check_range(x_min, x_max, n)?;
        let spacing = (x_max - x_min) / (n - 1) as f64;
        // Try the unshifted grid first, then progressively finer fractions of
        // the half cell, so the result is deterministic.
        const TRIALS: usize = 256;
        for j in 0..=TRIALS {
            let shift = 0.5 * spacing * shift_fraction(j);
            let grid = Self::from_origin(x_min + shift, spacing, n);
            if grid.nearest_to_any(avoid).is_none_or(|(_, _, d)| d >= DELTA_SING) {
                return Ok(grid);
            }
        }
        Err(Error::NoEdgeAvoidingShift { x_min, x_max, n })
    }

    fn from_origin(origin: f64, spacing: f64, n: usize) -> Self {
        let samples = (0..n).map(|i| origin + i as f64 * spacing).collect();
        Self { samples, spacing }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n_points(&self) -> usize {
        self.samples.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn x_min(&self) -> f64 {
        self.samples[0]
    }

    pub fn x_max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Closest (sample, point, distance) over all points in `points`.
    pub fn nearest_to_any(&self, points: &[f64]) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for &p in points {
            let (s, d) = self.nearest_sample(p);
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((s, p, d));
            }
        }
        best
    }

    /// Nearest sample to `p` and its distance.
    pub fn nearest_sample(&self, p: f64) -> (f64, f64) {
        let idx = ((p - self.x_min()) / self.spacing).round();
        let lo = (idx.max(0.0) as usize).saturating_sub(1);
        let hi = ((idx.max(0.0) as usize) + 1).min(self.samples.len() - 1);
        self.samples[lo.min(hi)..=hi]
            .iter()
            .map(|&s| (s, (s - p).abs()))
            .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Fails unless every sample is at least [`DELTA_SING`] away from `points`.
    pub fn ensure_avoids(&self, points: &[f64]) -> Result<()> {
        match self.nearest_to_any(points) {
            Some((sample, point, distance)) if distance < DELTA_SING => {
                Err(Error::GridNotEdgeAvoiding { sample, point, distance })
            }
            _ => Ok(()),
        }
    }
}

fn check_range(x_min: f64, x_max: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::DegenerateRange { x_min, x_max });
    }
    Ok(())
}

// 0, 1, 1/2, 1/4, 3/4, 1/8, 5/8, ... (van der Corput order).
fn shift_fraction(j: usize) -> f64 {
    if j == 0 {
        return 0.0;
    }
    if j == 1 {
        return 1.0;
    }
    let mut k = j - 1;
    let mut frac = 0.0;
    let mut base = 0.5;
    while k > 0 {
        if k & 1 == 1 {
            frac += base;
        }
        base *= 0.5;
        k >>= 1;
    }
    frac
}

/// Edge-avoiding grid for a single packet at `t = 0`.
pub fn make_edge_avoiding_grid(spec: &PacketSpec, x_min: f64, x_max: f64, n: usize) -> Result<Grid> {
    Grid::avoiding(x_min, x_max, n, &spec.edges())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    OracleQuadrature,
    OracleDft,
}

/// Field values on a grid at fixed `t`. Singular samples stay tagged.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    grid: Grid,
    t: f64,
    values: Vec<Evaluation>,
    provenance: Provenance,
}

impl FieldSnapshot {
    pub fn new(grid: Grid, t: f64, values: Vec<Evaluation>, provenance: Provenance) -> Self {
        assert_eq!(grid.n_points(), values.len(), "one value per grid sample");
        Self { grid, t, values, provenance }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn values(&self) -> &[Evaluation] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Finite `(x, value)` pairs, skipping singular samples.
    pub fn finite(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.grid
            .samples()
            .iter()
            .zip(&self.values)
            .filter_map(|(&x, v)| v.ok().map(|v| (x, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packet_rejects_bad_width() {
        assert!(PacketSpec::new(0.0, 0.0).is_err());
        assert!(PacketSpec::new(0.0, -1.0).is_err());
        assert!(PacketSpec::new(0.0, f64::NAN).is_err());
        assert!(PacketSpec::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn rectangle_midpoint_on_edges() {
        let p = PacketSpec::new(1.0, 0.5).unwrap();
        assert_eq!(p.rectangle(1.0), 1.0);
        assert_eq!(p.rectangle(1.5), 0.5);
        assert_eq!(p.rectangle(2.0), 0.0);
    }

    #[test]
    fn edge_avoiding_centred() {
        let spec = PacketSpec::new(0.0, 0.5).unwrap();
        let g = make_edge_avoiding_grid(&spec, -3.0, 3.0, 601).unwrap();
        assert_eq!(g.n_points(), 601);
        for &s in g.samples() {
            assert!((s - 0.5).abs() >= DELTA_SING && (s + 0.5).abs() >= DELTA_SING);
        }
        // 601 points on [-3, 3] put samples on ±0.5, so a shift is required
        // and it stays within half a cell.
        assert!(g.x_min() > -3.0 && g.x_min() - (-3.0) <= 0.5 * g.spacing() + 1e-15);
    }

    #[test]
    fn edge_avoiding_translated() {
        let spec = PacketSpec::new(2.0, 0.5).unwrap();
        let g = make_edge_avoiding_grid(&spec, -5.0, 5.0, 1000).unwrap();
        g.ensure_avoids(&[1.5, 2.5]).unwrap();
    }

    #[test]
    fn degenerate_range_rejected() {
        let spec = PacketSpec::new(0.0, 0.5).unwrap();
        assert!(matches!(
            make_edge_avoiding_grid(&spec, 0.5, 0.5, 10),
            Err(Error::DegenerateRange { .. })
        ));
        assert!(matches!(
            make_edge_avoiding_grid(&spec, -1.0, 1.0, 1),
            Err(Error::TooFewPoints(1))
        ));
    }

    #[test]
    fn unshifted_when_already_clear() {
        let spec = PacketSpec::new(0.0, 0.5).unwrap();
        let g = make_edge_avoiding_grid(&spec, -3.0, 3.0, 600).unwrap();
        assert_eq!(g.x_min(), -3.0);
    }

    #[test]
    fn nearest_sample_is_exact() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        let (s, d) = g.nearest_sample(0.34);
        assert!((s - 0.3).abs() < 1e-15);
        assert!((d - 0.04).abs() < 1e-12);
        let (s, _) = g.nearest_sample(-7.0);
        assert_eq!(s, 0.0);
        let (s, _) = g.nearest_sample(7.0);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn ensure_avoids_reports_offender() {
        let g = Grid::uniform(-1.0, 1.0, 5).unwrap();
        assert!(matches!(
            g.ensure_avoids(&[0.5]),
            Err(Error::GridNotEdgeAvoiding { .. })
        ));
    }
}
