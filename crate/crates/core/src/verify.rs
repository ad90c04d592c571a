//! Verification suite: every invariant as a named, timed check with a
//! tolerance that can be overridden from the command line.
//!
//! The `fast` suite covers the closed forms and the analysis layer. `full`
//! adds the quadrature, overlap and periodic-DFT oracles.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{
    self, causal_arrival, localization_at, localization_check, max_triangle_gap,
    precursor_vs_causal, tail_coefficient, OverlapSeries,
};
use crate::closed_form::{
    self, energy_density_expectation, overlap, phi, phi_time_derivative_t0, psi_plus,
    psi_plus_regularized, rho_expectation, snapshot, RegularizedPsiParams,
};
use crate::domain::{make_edge_avoiding_grid, Grid, PacketSpec};
use crate::error::{Error, Result};
use crate::figures::{self, FigureId, FigureParams, Format};
use crate::spectral::{
    evolve_dft, evolve_quadrature, evolve_quadrature_branch, overlap_quadrature,
    wave_equation_residual, Branch, Characteristics, PeriodicPropagator, SpectralConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Fast,
    Full,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            other => Err(Error::InvalidConfig(format!("unknown suite {other}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Fast => "fast",
            Suite::Full => "full",
        })
    }
}

/// How `measured` must relate to `tolerance` for a check to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Below,
    AtMost,
    Above,
    AtLeast,
}

impl Relation {
    pub fn holds(self, measured: f64, tolerance: f64) -> bool {
        match self {
            Relation::Below => measured < tolerance,
            Relation::AtMost => measured <= tolerance,
            Relation::Above => measured > tolerance,
            Relation::AtLeast => measured >= tolerance,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::AtMost => "<=",
            Relation::Above => ">",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
    pub wall: Duration,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: Suite,
    pub config: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub wall: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn write<W: Write>(&self, out: &mut W, format: Format) -> Result<()> {
        let mut text = String::new();
        let ms = |d: Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
        match format {
            Format::Structured => {
                text.push_str("# curtain verification report v1\n");
                text.push_str(&format!("suite={}\n", self.suite));
                for (k, v) in &self.config {
                    text.push_str(&format!("config.{k}={v}\n"));
                }
                for c in &self.checks {
                    text.push_str(&format!(
                        "check={} measured={} relation={} tolerance={} pass={} wall_ms={}",
                        c.name,
                        figures::format_number(Some(c.measured)),
                        c.relation.symbol(),
                        figures::format_number(Some(c.tolerance)),
                        c.passed,
                        ms(c.wall),
                    ));
                    if let Some(e) = &c.error {
                        text.push_str(&format!(" error=\"{e}\""));
                    }
                    text.push('\n');
                }
                let failed = self.failures().count();
                text.push_str(&format!(
                    "summary passed={} failed={} overall={} wall_ms={}\n",
                    self.checks.len() - failed,
                    failed,
                    if self.passed() { "pass" } else { "fail" },
                    ms(self.wall),
                ));
            }
            Format::Dsv => {
                text.push_str("# curtain verification report v1\n");
                text.push_str(&format!("# suite={}\n", self.suite));
                for (k, v) in &self.config {
                    text.push_str(&format!("# {k}={v}\n"));
                }
                text.push_str("name,measured,relation,tolerance,pass,wall_ms\n");
                for c in &self.checks {
                    text.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        c.name,
                        figures::format_number(Some(c.measured)),
                        c.relation.symbol(),
                        figures::format_number(Some(c.tolerance)),
                        c.passed,
                        ms(c.wall),
                    ));
                }
            }
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Inputs shared by all checks.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub spectral: SpectralConfig,
}

struct CheckDef {
    name: &'static str,
    relation: Relation,
    tolerance: f64,
    suite: Suite,
    eval: fn(&Context) -> Result<f64>,
}

const fn def(
    name: &'static str,
    relation: Relation,
    tolerance: f64,
    suite: Suite,
    eval: fn(&Context) -> Result<f64>,
) -> CheckDef {
    CheckDef { name, relation, tolerance, suite, eval }
}

fn registry() -> Vec<CheckDef> {
    use Relation::*;
    use Suite::*;
    vec![
        def("rectangle_recovery", Below, 1e-12, Fast, rectangle_recovery),
        def("curtain_cancellation_wide", Below, 1e-12, Fast, |_| cancellation(0.5)),
        def("curtain_cancellation_narrow", Below, 1e-12, Fast, |_| cancellation(0.01)),
        def("curtain_tail_onset", Above, 1e-5, Fast, tail_onset),
        def("translation_covariance", Below, 1e-12, Fast, translation_covariance),
        def("rigid_transport", Below, 1e-12, Fast, rigid_transport),
        def("regularized_order_error", Below, 0.05, Fast, regularized_order_error),
        def("tail_coefficient_error", Below, 5e-3, Fast, |_| tail_errors(0.5, 50.0, 500.0).map(|e| e.0)),
        def("tail_exponent_error", Below, 5e-3, Fast, |_| tail_errors(0.5, 50.0, 500.0).map(|e| e.1)),
        def("tail_coefficient_narrow_error", Below, 5e-3, Fast, |_| tail_errors(0.01, 1.0, 10.0).map(|e| e.0)),
        def("tail_fit_stability", Below, 1e-2, Fast, tail_fit_stability),
        def("time_derivative_rel_error", Below, 1e-5, Fast, time_derivative_rel_error),
        def("localization_inside_error", Below, 1e-12, Fast, localization_inside_error),
        def("localization_outside", Below, 1e-12, Fast, |_| localization().map(|l| l.outside_max)),
        def("localization_integral_error", Below, 1e-3, Fast, |_| localization().map(|l| (l.integral - 1.0).abs())),
        def("density_nonnegative_min", AtLeast, 0.0, Fast, density_min),
        def("curtain_lifted_density", Above, 0.0, Fast, curtain_lifted_density),
        def("energy_centre", Below, 1e-12, Fast, |_| energy_at(0.0)),
        def("energy_two_b_error", Below, 1e-12, Fast, |_| energy_at(1.0).map(|e| (e - 4.0 / (3.0 * PI)).abs())),
        def("energy_tail_min", Above, 0.0, Fast, energy_tail_min),
        def("psi2_two_b_error", Below, 1e-14, Fast, psi2_two_b_error),
        def("triangle_gap_overlap", Above, 1e-2, Fast, |_| gap(0.25, -3.0, 3.0)),
        def("triangle_gap_far_relative", Below, 1e-2, Fast, |_| gap(20.0, -25.0, 25.0)),
        def("overlap_re_before_arrival", Below, 1e-12, Fast, overlap_re_before_arrival),
        def("overlap_arrival_error", AtMost, 0.01 + 1e-9, Fast, |_| arrival_error(0.5, 0.01)),
        def("overlap_arrival_narrow_error", AtMost, 0.001 + 1e-9, Fast, |_| arrival_error(0.01, 0.001)),
        def("overlap_precursor_onset", AtMost, 0.01, Fast, precursor_onset),
        def("overlap_peak_re_error", Below, 1e-12, Fast, |_| peak().map(|p| (p.1 - 0.5).abs())),
        def("overlap_peak_time_error", AtMost, 0.01 + 1e-9, Fast, |_| peak().map(|p| (p.0 - 2.0).abs())),
        def("overlap_swap_symmetry", Below, 1e-14, Fast, overlap_swap_symmetry),
        def("precursor_causal_ratio", AtLeast, 10.0, Fast, precursor_causal_ratio),
        def("wave_residual", Below, 1e-3, Fast, |_| wave_residual(1e-3, 1e-3)),
        def("wave_residual_convergence_error", Below, 1.0, Fast, wave_residual_convergence_error),
        def("figure_determinism_mismatches", Below, 0.5, Fast, figure_determinism),
        def("oracle_phi_max_error", Below, 1e-4, Full, oracle_phi_max_error),
        def("oracle_error_estimate_coverage", AtLeast, 0.99, Full, oracle_error_estimate_coverage),
        def("oracle_half_line_error", Below, 1e-4, Full, oracle_half_line_error),
        def("oracle_density_factor_error", Below, 1e-4, Full, oracle_density_factor_error),
        def("oracle_overlap_max_error", Below, 1e-4, Full, oracle_overlap_max_error),
        def("oracle_quadrature_doubling", Below, 1e-6, Full, oracle_quadrature_doubling),
        def("dft_round_trip", Below, 1e-12, Full, dft_round_trip),
        def("dft_semigroup", Below, 1e-12, Full, dft_semigroup),
        def("dft_far_field_error", Below, 5e-3, Full, dft_far_field_error),
    ]
}

/// Names of the checks in `suite`, in run order.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    registry().into_iter().filter(|d| d.suite <= suite).map(|d| d.name).collect()
}

/// Runs the suite. Overrides replace the default tolerance of the named check;
/// unknown names are rejected before anything runs.
pub fn run(suite: Suite, ctx: &Context, overrides: &BTreeMap<String, f64>) -> Result<VerificationReport> {
    ctx.spectral.validate()?;
    let defs: Vec<CheckDef> = registry().into_iter().filter(|d| d.suite <= suite).collect();
    if let Some(unknown) = overrides.keys().find(|k| !defs.iter().any(|d| d.name == k.as_str())) {
        return Err(Error::InvalidConfig(format!("no check named {unknown} in the {suite} suite")));
    }
    let start = Instant::now();
    let checks = defs
        .iter()
        .map(|d| {
            let tolerance = overrides.get(d.name).copied().unwrap_or(d.tolerance);
            let begin = Instant::now();
            let outcome = (d.eval)(ctx);
            let wall = begin.elapsed();
            let (measured, error) = match outcome {
                Ok(v) => (v, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            Check {
                name: d.name,
                measured,
                relation: d.relation,
                tolerance,
                passed: error.is_none() && d.relation.holds(measured, tolerance),
                wall,
                error,
            }
        })
        .collect();
    let s = &ctx.spectral;
    let config = vec![
        ("eps_schedule".into(), s.eps_schedule.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")),
        ("k_max".into(), s.k_max.to_string()),
        ("n_k".into(), s.n_k.to_string()),
        ("half_length".into(), s.half_length.to_string()),
        ("n_x".into(), s.n_x.to_string()),
        ("threads".into(), rayon::current_num_threads().to_string()),
    ];
    Ok(VerificationReport { suite, config, checks, wall: start.elapsed() })
}

fn half() -> PacketSpec {
    PacketSpec::new(0.0, 0.5).expect("valid packet")
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// Probe points `(x, t)` for the oracle comparisons: 17 + 17 + 16 points at
/// `t = 0, 0.25, 1`, spread over `[-3, 3]` by a golden-ratio sequence and kept
/// at least `0.1` from every characteristic.
pub fn oracle_probes(spec: &PacketSpec) -> Vec<(f64, f64)> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let mut probes = Vec::with_capacity(50);
    for (t, count) in [(0.0, 17), (0.25, 17), (1.0, 16)] {
        let chars = spec.characteristic_points(t);
        let mut j = 0u32;
        let mut taken = 0;
        while taken < count {
            j += 1;
            let x = spec.x0() - 3.0 + 6.0 * ((f64::from(j) * GOLDEN) % 1.0);
            if chars.iter().all(|p| (x - p).abs() >= 0.1) {
                probes.push((x, t));
                taken += 1;
            }
        }
    }
    probes
}

/// Twenty overlap probe times in `(0, 4)`, at least `0.05` from the kinks of
/// the real triangle at `t = 1, 2, 3` (separation 2, `b = 0.5`).
pub fn overlap_probe_times() -> Vec<f64> {
    (0..20).map(|j| 0.1 + 0.2 * f64::from(j)).collect()
}

/// Twenty probes for the time derivative, including `|x - x0| = 10b`.
pub const DERIVATIVE_PROBES: [f64; 20] = [
    -5.0, -3.0, -2.0, -1.5, -1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.1, 0.3, 0.45, 0.55, 0.7, 1.0,
    1.5, 2.5, 4.0, 5.0,
];

fn rectangle_recovery(_: &Context) -> Result<f64> {
    let s = half();
    let g = make_edge_avoiding_grid(&s, -10.0, 10.0, 2001)?;
    g.samples()
        .iter()
        .map(|&x| Ok((phi(x, 0.0, &s)? - s.rectangle(x)).norm()))
        .try_fold(0.0, |m, v: Result<f64>| Ok(f64::max(m, v?)))
}

fn cancellation(b: f64) -> Result<f64> {
    let s = PacketSpec::new(0.0, b)?;
    analysis::cancellation_residual(&s, &make_edge_avoiding_grid(&s, -10.0, 10.0, 2001)?)
}

fn tail_onset(_: &Context) -> Result<f64> {
    let s = half();
    let t = 1e-3;
    analysis::max_tail_beyond_light_cone(&s, &Grid::avoiding(-10.0, 10.0, 2001, &s.characteristic_points(t))?, t)
}

fn translation_covariance(_: &Context) -> Result<f64> {
    let base = half();
    let shifted = base.translated(1.7)?;
    let mut worst = 0.0f64;
    for (x, t) in oracle_probes(&base) {
        worst = worst.max((phi(x + 1.7, t, &shifted)? - phi(x, t, &base)?).norm());
    }
    Ok(worst)
}

fn rigid_transport(_: &Context) -> Result<f64> {
    let s = half();
    let mut worst = 0.0f64;
    for (x, t) in oracle_probes(&s) {
        for shift in [0.5, 1.25, -0.75] {
            let (r0, l0) = closed_form::components(x, t, &s)?;
            let (r1, _) = closed_form::components(x + shift, t + shift, &s)?;
            let (_, l1) = closed_form::components(x - shift, t + shift, &s)?;
            worst = worst.max((r1 - r0).norm()).max((l1 - l0).norm());
        }
    }
    Ok(worst)
}

/// `|p - 1|` for the observed order `p` of `ψ_ε → ψ` at `u = 2b`.
fn regularized_order_error(_: &Context) -> Result<f64> {
    let s = half();
    let exact = psi_plus(1.0, &s)?;
    let err = |eps: f64| -> Result<f64> {
        Ok((psi_plus_regularized(1.0, &s, &RegularizedPsiParams::new(eps)?) - exact).norm())
    };
    let order = (err(1e-3)? / err(1e-4)?).log10();
    Ok((order - 1.0).abs())
}

fn tail_errors(b: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let fit = tail_coefficient(&PacketSpec::new(0.0, b)?, lo, hi, 100)?;
    Ok(((fit.coefficient * 2.0 * PI - 1.0).abs(), (fit.exponent - 1.0).abs()))
}

fn tail_fit_stability(_: &Context) -> Result<f64> {
    let near = tail_coefficient(&half(), 50.0, 100.0, 100)?;
    let far = tail_coefficient(&half(), 100.0, 500.0, 100)?;
    Ok((near.coefficient / far.coefficient - 1.0).abs())
}

/// Richardson-extrapolated centred difference of `Φ` in `t` at `t = 0`.
pub fn derivative_by_differences(x: f64, spec: &PacketSpec) -> Result<Complex64> {
    let central = |h: f64| -> Result<Complex64> { Ok((phi(x, h, spec)? - phi(x, -h, spec)?) / (2.0 * h)) };
    let (coarse, fine) = (central(1e-3)?, central(5e-4)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn time_derivative_rel_error(_: &Context) -> Result<f64> {
    let s = half();
    let mut worst = 0.0f64;
    for x in DERIVATIVE_PROBES {
        let exact = phi_time_derivative_t0(x, &s)?;
        worst = worst.max((derivative_by_differences(x, &s)? - exact).norm() / exact.norm());
    }
    Ok(worst)
}

fn localization() -> Result<analysis::Localization> {
    let s = half();
    localization_check(&s, &make_edge_avoiding_grid(&s, -5.0, 5.0, 100_001)?)
}

fn localization_inside_error(_: &Context) -> Result<f64> {
    let s = half();
    let g = make_edge_avoiding_grid(&s, -0.49, 0.49, 199)?;
    g.samples()
        .iter()
        .map(|&x| Ok((rho_expectation(x, 0.0, &s)? - s.height()).abs()))
        .try_fold(0.0, |m, v: Result<f64>| Ok(f64::max(m, v?)))
}

fn density_min(_: &Context) -> Result<f64> {
    let s = half();
    let mut lowest = f64::INFINITY;
    for t in [0.0, 0.25, 1.0] {
        let g = Grid::avoiding(-5.0, 5.0, 2001, &s.characteristic_points(t))?;
        for &x in g.samples() {
            lowest = lowest.min(rho_expectation(x, t, &s)?);
        }
    }
    Ok(lowest)
}

fn curtain_lifted_density(_: &Context) -> Result<f64> {
    let s = half();
    let t = 0.25;
    Ok(localization_at(&s, &Grid::avoiding(-5.0, 5.0, 2001, &s.characteristic_points(t))?, t)?.outside_max)
}

fn energy_at(u: f64) -> Result<f64> {
    Ok(energy_density_expectation(u, &half())?)
}

fn energy_tail_min(_: &Context) -> Result<f64> {
    let s = half();
    let mut lowest = f64::INFINITY;
    for j in 0..1000 {
        let u = 0.51 + 0.05 * f64::from(j);
        for x in [u, -u] {
            lowest = lowest.min(energy_density_expectation(x, &s)?);
        }
    }
    Ok(lowest)
}

fn psi2_two_b_error(_: &Context) -> Result<f64> {
    let v = closed_form::psi2(1.0, 0.5);
    Ok(v.re.abs().max((v.im - LN_2 / PI).abs()))
}

fn gap(t: f64, lo: f64, hi: f64) -> Result<f64> {
    let s = half();
    let g = Grid::avoiding(lo, hi, 1201, &s.characteristic_points(t))?;
    Ok(max_triangle_gap(&s, &g, t)? / s.height())
}

fn series(b: f64, dt: f64) -> Result<OverlapSeries> {
    OverlapSeries::sample(PacketSpec::new(2.0, b)?, PacketSpec::new(0.0, b)?, 4.0, dt)
}

fn overlap_re_before_arrival(_: &Context) -> Result<f64> {
    let s = series(0.5, 0.01)?;
    Ok(max_of(s.times().iter().zip(s.values()).filter(|(&t, _)| t < 0.99).map(|(_, v)| v.re.abs())))
}

fn arrival_error(b: f64, dt: f64) -> Result<f64> {
    let a = causal_arrival(&series(b, dt)?)?;
    let t_star = a.arrival.ok_or_else(|| Error::InvalidSeries("no causal arrival in window".into()))?;
    Ok((t_star - a.expected_arrival).abs())
}

fn precursor_onset(_: &Context) -> Result<f64> {
    causal_arrival(&series(0.5, 0.01)?)?
        .precursor_onset
        .ok_or_else(|| Error::InvalidSeries("no precursor in window".into()))
}

/// `(t, Re)` at the maximum of the real part.
fn peak() -> Result<(f64, f64)> {
    let s = series(0.5, 0.01)?;
    let (t, v) = s
        .times()
        .iter()
        .zip(s.values())
        .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
        .expect("non-empty series");
    Ok((*t, v.re))
}

fn overlap_swap_symmetry(_: &Context) -> Result<f64> {
    let (a, b) = (PacketSpec::new(2.0, 0.5)?, half());
    let mut worst = 0.0f64;
    for j in 0..=400 {
        let t = 0.01 * f64::from(j);
        worst = worst.max((overlap(t, &a, &b)? - overlap(t, &b, &a)?).norm());
    }
    Ok(worst)
}

fn precursor_causal_ratio(_: &Context) -> Result<f64> {
    Ok(precursor_vs_causal(&series(0.01, 0.001)?)?.ratio())
}

/// d'Alembertian residual at `t = 1` on `[-3, 3]`, at least `0.1` from the
/// characteristics.
pub fn wave_residual(h: f64, dx: f64) -> Result<f64> {
    let s = half();
    let n = (6.0 / dx).round() as usize + 1;
    let g = Grid::uniform(-3.0, 3.0, n)?;
    let snaps: Vec<_> = [1.0 - h, 1.0, 1.0 + h].iter().map(|&t| snapshot(&s, &g, t)).collect();
    wave_equation_residual([&snaps[0], &snaps[1], &snaps[2]], Some(&Characteristics { spec: s, margin: 0.1 }))
}

/// `|ratio - 4|` when `h` and `Δx` halve together. With `h = Δx` the
/// stencil is exact on `f(x - t) + g(x + t)`, so the convergence is measured
/// with `Δx = 2h`.
fn wave_residual_convergence_error(_: &Context) -> Result<f64> {
    let ratio = wave_residual(1e-3, 2e-3)? / wave_residual(5e-4, 1e-3)?;
    Ok((ratio - 4.0).abs())
}

fn figure_determinism(_: &Context) -> Result<f64> {
    let mut mismatches = 0;
    for id in FigureId::ALL {
        let a = figures::build(id, &FigureParams::default())?.to_string(Format::Dsv);
        let b = figures::build(id, &FigureParams::default())?.to_string(Format::Dsv);
        if a != b {
            mismatches += 1;
        }
    }
    Ok(f64::from(mismatches))
}

fn oracle_phi_errors(ctx: &Context) -> Result<Vec<(f64, f64)>> {
    let s = half();
    oracle_probes(&s)
        .par_iter()
        .map(|&(x, t)| {
            let q = evolve_quadrature(x, t, &s, &ctx.spectral)?;
            Ok(((q.value - phi(x, t, &s)?).norm(), q.error_estimate))
        })
        .collect()
}

fn oracle_phi_max_error(ctx: &Context) -> Result<f64> {
    Ok(max_of(oracle_phi_errors(ctx)?.into_iter().map(|e| e.0)))
}

fn oracle_error_estimate_coverage(ctx: &Context) -> Result<f64> {
    let errors = oracle_phi_errors(ctx)?;
    let covered = errors.iter().filter(|(gap, est)| gap <= est).count();
    Ok(covered as f64 / errors.len() as f64)
}

fn oracle_half_line_error(ctx: &Context) -> Result<f64> {
    let s = half();
    let q = evolve_quadrature_branch(1.0, 0.0, &s, &ctx.spectral, Branch::RightMover)?;
    Ok((q.value - psi_plus(1.0, &s)?).norm())
}

fn oracle_density_factor_error(ctx: &Context) -> Result<f64> {
    let s = half();
    let mut worst = 0.0f64;
    for (x, t) in [(0.0, 0.0), (0.2, 0.0), (0.0, 0.25), (1.2, 1.0), (-2.0, 1.0)] {
        let q = evolve_quadrature(x, t, &s, &ctx.spectral)?.value;
        worst = worst.max((2.0 * s.b() * q.norm_sqr() - rho_expectation(x, t, &s)?).abs());
    }
    Ok(worst)
}

fn oracle_overlap_max_error(ctx: &Context) -> Result<f64> {
    let (d, s) = (PacketSpec::new(2.0, 0.5)?, half());
    let mut worst = 0.0f64;
    for t in overlap_probe_times() {
        let q = overlap_quadrature(t, &d, &s, &ctx.spectral)?;
        worst = worst.max((q.value - overlap(t, &d, &s)?).norm());
    }
    Ok(worst)
}

fn oracle_quadrature_doubling(ctx: &Context) -> Result<f64> {
    let s = half();
    let doubled = SpectralConfig { n_k: 2 * ctx.spectral.n_k, ..ctx.spectral.clone() };
    oracle_probes(&s)
        .par_iter()
        .step_by(5)
        .map(|&(x, t)| {
            let a = evolve_quadrature(x, t, &s, &ctx.spectral)?.value;
            let b = evolve_quadrature(x, t, &s, &doubled)?.value;
            Ok((a - b).norm())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn dft_initial(ctx: &Context) -> (Vec<Complex64>, f64) {
    let s = half();
    let n = ctx.spectral.n_x;
    let dx = 2.0 * ctx.spectral.half_length / n as f64;
    let field = (0..n)
        .map(|j| Complex64::new(s.rectangle(-ctx.spectral.half_length + j as f64 * dx), 0.0))
        .collect();
    (field, dx)
}

fn dft_round_trip(ctx: &Context) -> Result<f64> {
    let (field, dx) = dft_initial(ctx);
    let back = PeriodicPropagator::new(field.len(), dx).propagate(&field, 0.0);
    Ok(max_of(field.iter().zip(&back).map(|(a, b)| (a - b).norm())))
}

fn dft_semigroup(ctx: &Context) -> Result<f64> {
    let (field, dx) = dft_initial(ctx);
    let p = PeriodicPropagator::new(field.len(), dx);
    let twice = p.propagate(&p.propagate(&field, 0.25), 0.5);
    let once = p.propagate(&field, 0.75);
    Ok(max_of(twice.iter().zip(&once).map(|(a, b)| (a - b).norm())))
}

/// Max `|DFT - Φ|` at `t = 0.25` over samples at least `4b` from every
/// characteristic and within `L/2` of the origin.
fn dft_far_field_error(ctx: &Context) -> Result<f64> {
    let s = half();
    let t = 0.25;
    let snap = evolve_dft(&s, t, &ctx.spectral)?;
    let chars = s.characteristic_points(t);
    let reach = 0.5 * ctx.spectral.half_length;
    let mut worst = 0.0f64;
    for (x, v) in snap.finite() {
        if x.abs() <= reach && chars.iter().all(|p| (x - p).abs() >= 4.0 * s.b()) {
            worst = worst.max((v - phi(x, t, &s)?).norm());
        }
    }
    Ok(worst)
}
