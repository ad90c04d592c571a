//! Figure datasets: one row per `x` (or `t`) sample, one column per curve
//! component.
//!
//! Layout (schema `v1`):
//!
//! ```text
//! # curtain-figure-dataset v1
//! # figure: 2
//! # regenerate: curtain figure 2 --b=0.5 --x0=0 --t=0.25 --grid-min=-3 --grid-max=3 --grid-n=1201
//! # panels: ...
//! # <key>=<value>      (one line per parameter)
//! x,re_psi_right,im_psi_right,abs_psi_right,...
//! ```
//!
//! Complex curves emit `re_<name>`, `im_<name>`, `abs_<name>`; real curves
//! (densities) emit a single `<name>` column. Numbers carry 12 significant
//! digits; singular samples are written as `NA`.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::OverlapSeries;
use crate::closed_form::{components, rho_expectation};
use crate::domain::{Evaluation, Grid, PacketSpec};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] =
        [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5];

    pub fn number(self) -> u8 {
        match self {
            FigureId::Fig1 => 1,
            FigureId::Fig2 => 2,
            FigureId::Fig3 => 3,
            FigureId::Fig4 => 4,
            FigureId::Fig5 => 5,
        }
    }

    /// Default snapshot time for figures 1-3.
    fn default_time(self) -> f64 {
        match self {
            FigureId::Fig2 => 0.25,
            FigureId::Fig3 => 1.0,
            _ => 0.0,
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_start_matches("fig") {
            "1" => Ok(FigureId::Fig1),
            "2" => Ok(FigureId::Fig2),
            "3" => Ok(FigureId::Fig3),
            "4" => Ok(FigureId::Fig4),
            "5" => Ok(FigureId::Fig5),
            _ => Err(Error::UnknownFigure(s.to_string())),
        }
    }
}

/// Parameters for [`build`]. `None` fields take the per-figure defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FigureParams {
    pub b: Option<f64>,
    pub x0: Option<f64>,
    pub x1: Option<f64>,
    pub t: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    pub figure: FigureId,
    pub panels: String,
    pub params: Vec<(String, String)>,
    pub regenerate: String,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dsv,
    Structured,
}

/// 12 significant digits, `NA` for missing, no negative zero.
pub fn format_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => {
            let x = if x == 0.0 { 0.0 } else { x };
            format!("{x:.11e}")
        }
        _ => "NA".to_string(),
    }
}

/// Renders `0.75` as `0p75` for use inside column names.
fn label(v: f64) -> String {
    format!("{v}").replace('.', "p").replace('-', "m")
}

impl FigureDataset {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn header(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# curtain-figure-dataset {SCHEMA_VERSION}");
        let _ = writeln!(out, "# figure: {}", self.figure.number());
        let _ = writeln!(out, "# regenerate: {}", self.regenerate);
        let _ = writeln!(out, "# panels: {}", self.panels);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    pub fn write<W: Write>(&self, out: &mut W, format: Format) -> Result<()> {
        let mut text = self.header();
        match format {
            Format::Dsv => {
                let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
                text.push_str(&names.join(","));
                text.push('\n');
                for row in 0..self.n_rows() {
                    let cells: Vec<String> =
                        self.columns.iter().map(|c| format_number(c.values[row])).collect();
                    text.push_str(&cells.join(","));
                    text.push('\n');
                }
            }
            Format::Structured => {
                for row in 0..self.n_rows() {
                    let cells: Vec<String> = self
                        .columns
                        .iter()
                        .map(|c| format!("{}={}", c.name, format_number(c.values[row])))
                        .collect();
                    text.push_str(&cells.join(" "));
                    text.push('\n');
                }
            }
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn to_string(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, format).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("dataset text is UTF-8")
    }
}

fn push_complex(columns: &mut Vec<Column>, name: &str, values: &[Option<Complex64>]) {
    columns.push(Column { name: format!("re_{name}"), values: values.iter().map(|v| v.map(|v| v.re)).collect() });
    columns.push(Column { name: format!("im_{name}"), values: values.iter().map(|v| v.map(|v| v.im)).collect() });
    columns.push(Column { name: format!("abs_{name}"), values: values.iter().map(|v| v.map(|v| v.norm())).collect() });
}

/// Builds the dataset for one figure.
pub fn build(figure: FigureId, params: &FigureParams) -> Result<FigureDataset> {
    match figure {
        FigureId::Fig1 | FigureId::Fig2 | FigureId::Fig3 => packet_snapshot(figure, params),
        FigureId::Fig4 => density_panels(params),
        FigureId::Fig5 => overlap_panels(params),
    }
}

fn packet_snapshot(figure: FigureId, params: &FigureParams) -> Result<FigureDataset> {
    let b = params.b.unwrap_or(0.5);
    let x0 = params.x0.unwrap_or(0.0);
    let t = params.t.unwrap_or(figure.default_time());
    let (gmin, gmax, gn) = (
        params.grid_min.unwrap_or(-3.0),
        params.grid_max.unwrap_or(3.0),
        params.grid_n.unwrap_or(1201),
    );
    let spec = PacketSpec::new(x0, b)?;
    let grid = Grid::avoiding(gmin, gmax, gn, &spec.characteristic_points(t))?;
    let evals: Vec<Evaluation<(Complex64, Complex64)>> =
        grid.samples().par_iter().map(|&x| components(x, t, &spec)).collect();
    let right: Vec<_> = evals.iter().map(|e| e.ok().map(|v| v.0)).collect();
    let left: Vec<_> = evals.iter().map(|e| e.ok().map(|v| v.1)).collect();
    let total: Vec<_> = evals.iter().map(|e| e.ok().map(|v| v.0 + v.1)).collect();

    let mut columns = vec![Column { name: "x".into(), values: grid.samples().iter().map(|&x| Some(x)).collect() }];
    push_complex(&mut columns, "psi_right", &right);
    push_complex(&mut columns, "psi_left", &left);
    push_complex(&mut columns, "phi", &total);

    Ok(FigureDataset {
        figure,
        panels: format!(
            "(a) re/im psi(x-t) (b) |psi(x-t)| (c) re/im conj psi(x+t) (d) |conj psi(x+t)| \
             (e) re/im phi (f) |phi| vs |psi|+|conj psi|; t={t}"
        ),
        params: vec![
            ("b".into(), format!("{b}")),
            ("x0".into(), format!("{x0}")),
            ("t".into(), format!("{t}")),
            ("grid".into(), format!("{},{},{}", grid.x_min(), grid.x_max(), grid.n_points())),
        ],
        regenerate: format!(
            "curtain figure {} --b={b} --x0={x0} --t={t} --grid-min={gmin} --grid-max={gmax} --grid-n={gn}",
            figure.number()
        ),
        columns,
    })
}

fn density_panels(params: &FigureParams) -> Result<FigureDataset> {
    let b = params.b.unwrap_or(0.5);
    let x0 = params.x0.unwrap_or(0.0);
    let x1 = params.x1.unwrap_or(x0 + 2.0);
    let times: Vec<f64> = match params.t {
        Some(t) => vec![t],
        None => vec![0.0, 0.75, 1.25],
    };
    let (gmin, gmax, gn) = (
        params.grid_min.unwrap_or(x0 - 2.0),
        params.grid_max.unwrap_or(x1 + 2.0),
        params.grid_n.unwrap_or(1201),
    );
    let source = PacketSpec::new(x0, b)?;
    let detector = PacketSpec::new(x1, b)?;
    let mut avoid: Vec<f64> = detector.edges().to_vec();
    for &t in &times {
        avoid.extend(source.characteristic_points(t));
    }
    let grid = Grid::avoiding(gmin, gmax, gn, &avoid)?;
    let density = |spec: &PacketSpec, t: f64| -> Vec<Option<f64>> {
        grid.samples().par_iter().map(|&x| rho_expectation(x, t, spec).ok()).collect()
    };

    let mut columns = vec![Column { name: "x".into(), values: grid.samples().iter().map(|&x| Some(x)).collect() }];
    columns.push(Column { name: "rho_detector".into(), values: density(&detector, 0.0) });
    for &t in &times {
        columns.push(Column { name: format!("rho_evolving_t{}", label(t)), values: density(&source, t) });
    }
    let time_list = times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
    let t_flag = params.t.map(|t| format!(" --t={t}")).unwrap_or_default();
    Ok(FigureDataset {
        figure: FigureId::Fig4,
        panels: format!(
            "<rho> of the evolving packet at x0={x0} vs static detector at x1={x1}; \
             panels at t={time_list} (no overlap, tail overlap, causal overlap)"
        ),
        params: vec![
            ("b".into(), format!("{b}")),
            ("x0".into(), format!("{x0}")),
            ("x1".into(), format!("{x1}")),
            ("t".into(), time_list),
            ("grid".into(), format!("{},{},{}", grid.x_min(), grid.x_max(), grid.n_points())),
        ],
        regenerate: format!(
            "curtain figure 4 --b={b} --x0={x0} --x1={x1}{t_flag} --grid-min={gmin} --grid-max={gmax} --grid-n={gn}"
        ),
        columns,
    })
}

fn overlap_panels(params: &FigureParams) -> Result<FigureDataset> {
    let widths: Vec<f64> = match params.b {
        Some(b) => vec![b],
        None => vec![0.5, 0.01],
    };
    let x0 = params.x0.unwrap_or(0.0);
    let x1 = params.x1.unwrap_or(x0 + 2.0);
    let t_max = params.t_max.unwrap_or(4.0);
    let dt = params.dt.unwrap_or(1e-3);

    let mut columns = Vec::new();
    let mut times = None;
    for &b in &widths {
        let series = OverlapSeries::sample(PacketSpec::new(x1, b)?, PacketSpec::new(x0, b)?, t_max, dt)?;
        if times.is_none() {
            times = Some(series.times().to_vec());
        }
        let values: Vec<Option<Complex64>> = series.values().iter().map(|&v| Some(v)).collect();
        push_complex(&mut columns, &format!("overlap_b{}", label(b)), &values);
    }
    let times = times.expect("at least one width");
    columns.insert(0, Column { name: "t".into(), values: times.iter().map(|&t| Some(t)).collect() });

    let width_list = widths.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
    let b_flag = params.b.map(|b| format!(" --b={b}")).unwrap_or_default();
    Ok(FigureDataset {
        figure: FigureId::Fig5,
        panels: format!(
            "re (a,b), im (c,d), abs (e,f) of <Phi_x1(0)|Phi_x0(t)> vs t for b={width_list}"
        ),
        params: vec![
            ("b".into(), width_list),
            ("x0".into(), format!("{x0}")),
            ("x1".into(), format!("{x1}")),
            ("t_max".into(), format!("{t_max}")),
            ("dt".into(), format!("{dt}")),
        ],
        regenerate: format!("curtain figure 5{b_flag} --x0={x0} --x1={x1} --t-max={t_max} --dt={dt}"),
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(Some(1.0)), "1.00000000000e0");
        assert_eq!(format_number(Some(-0.0)), "0.00000000000e0");
        assert_eq!(format_number(Some(-1.5e-7)), "-1.50000000000e-7");
        assert_eq!(format_number(None), "NA");
        assert_eq!(format_number(Some(f64::NAN)), "NA");
    }

    #[test]
    fn figure_ids() {
        assert_eq!("3".parse::<FigureId>().unwrap(), FigureId::Fig3);
        assert_eq!("fig5".parse::<FigureId>().unwrap(), FigureId::Fig5);
        assert!("6".parse::<FigureId>().is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(label(0.75), "0p75");
        assert_eq!(label(0.0), "0");
        assert_eq!(label(0.01), "0p01");
    }

    #[test]
    fn grids_avoid_every_characteristic() {
        let ds = build(FigureId::Fig2, &FigureParams::default()).unwrap();
        assert_eq!(ds.n_rows(), 1201);
        assert!(ds.columns.iter().all(|c| c.values.iter().all(Option::is_some)));
    }

    #[test]
    fn structured_rows() {
        let ds = build(FigureId::Fig5, &FigureParams { b: Some(0.5), t_max: Some(0.01), dt: Some(0.005), ..Default::default() }).unwrap();
        let text = ds.to_string(Format::Structured);
        assert!(text.lines().any(|l| l.starts_with("t=0.00000000000e0 re_overlap_b0p5=")));
    }
}
