//! Parameter-plane sweeps and the CSV formats shared by the command-line tool.
//!
//! Floats are written with 17 significant digits so that parsing and re-writing a file
//! reproduces it byte for byte.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::constant::{certify_constant_with, solve_equilibrium, thresholds};
use crate::embedding::CornerOptions;
use crate::error::{Error, Result};
use crate::model::Params;
use crate::periodic::{artificial_system, certify_periodic, solve_two_cycle};
use crate::roots::linspace;
use crate::ModelParams;

/// Evenly spaced axis, endpoints included; a single point sits at `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo && n >= 1) {
            return Err(Error::InvalidParams(format!("bad axis [{lo}, {hi}] x {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }

    pub fn step(&self) -> f64 {
        if self.n > 1 {
            (self.hi - self.lo) / (self.n - 1) as f64
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SweepSpec {
    /// `h` outer, `r` inner.
    Constant { h: Axis, r: Axis },
    /// `h0` outer, `h1` inner, at fixed `r`.
    Periodic { r: f64, h0: Axis, h1: Axis },
}

/// One cell of a sweep. In constant mode `h1`, `z1` are absent and `value` is `y_bar`;
/// in periodic mode `value` is `z0` and `r1`, `r2` are absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub h0: f64,
    pub h1: Option<f64>,
    pub r: f64,
    pub verdict: String,
    pub value: Option<f64>,
    pub z1: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub notes: String,
}

pub const CONSTANT_HEADER: [&str; 7] = ["h", "r", "verdict", "y_bar", "r1", "r2", "notes"];
pub const PERIODIC_HEADER: [&str; 7] = ["h0", "h1", "r", "verdict", "z0", "z1", "notes"];
pub const BOUNDARY_HEADER: [&str; 4] = ["h", "r1", "r2", "r_eq_h"];
pub const ORBIT_HEADER: [&str; 4] = ["n", "x_n", "x_n_minus_1", "parity"];
pub const CURVES_HEADER: [&str; 4] = ["x", "y", "e1", "e2"];

pub const NUMERIC_FAILURE: &str = "NumericFailure";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

const SWEEP_MONOTONICITY_SAMPLES: usize = 64;

fn constant_cell(h: f64, r: f64) -> SweepCell {
    let mut cell = SweepCell {
        h0: h,
        h1: None,
        r,
        verdict: NUMERIC_FAILURE.into(),
        value: None,
        z1: None,
        r1: None,
        r2: None,
        notes: String::new(),
    };
    let params = match Params::constant(r, h) {
        Ok(p) => p,
        Err(e) => {
            cell.notes = e.to_string();
            return cell;
        }
    };
    if let Ok(th) = thresholds(h) {
        cell.r1 = Some(th.r1);
        cell.r2 = Some(th.r2);
    }
    cell.value = solve_equilibrium(&params).ok().map(|rep| rep.y_bar);
    // Monotonicity of G on the box is structural; a small spot check per cell suffices.
    let corner = CornerOptions {
        monotonicity_samples: SWEEP_MONOTONICITY_SAMPLES,
        ..CornerOptions::default()
    };
    match certify_constant_with(&params, &corner) {
        Ok(c) => {
            cell.verdict = c.verdict.tag().into();
            cell.notes = c.provenance.join("+");
        }
        Err(e) => cell.notes = e.to_string(),
    }
    cell
}

fn periodic_cell(r: f64, h0: f64, h1: f64) -> SweepCell {
    let mut cell = SweepCell {
        h0,
        h1: Some(h1),
        r,
        verdict: NUMERIC_FAILURE.into(),
        value: None,
        z1: None,
        r1: None,
        r2: None,
        notes: String::new(),
    };
    let params: ModelParams = match Params::two_periodic(r, h0, h1) {
        Ok(p) => p,
        Err(e) => {
            cell.notes = e.to_string();
            return cell;
        }
    };
    if params.is_constant() {
        let inner = constant_cell(h0, r);
        cell.verdict = inner.verdict;
        cell.value = inner.value;
        cell.z1 = inner.value;
        cell.notes = format!("equal stocking; {}", inner.notes);
        // The periodic map covers the domain of the periodic result only.
        if h0 < r * (1.0 - 1e-12) {
            cell.verdict = "NotApplicable".into();
            cell.notes = "equal stocking; stocking_not_above_r".into();
        }
        return cell;
    }
    if let Ok(rep) = solve_two_cycle(&params) {
        cell.value = Some(rep.z0);
        cell.z1 = Some(rep.z1);
    }
    match certify_periodic(&params) {
        Ok(c) => {
            cell.verdict = c.verdict.tag().into();
            cell.notes = c.provenance.join("+");
        }
        Err(e) => cell.notes = e.to_string(),
    }
    cell
}

/// Evaluates every cell, in row-major order whatever the number of worker threads.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepCell>> {
    let jobs: Vec<(f64, f64)> = match spec {
        SweepSpec::Constant { h, r } => {
            let rs = r.values();
            h.values()
                .into_iter()
                .flat_map(|h| rs.iter().map(move |&r| (h, r)))
                .collect()
        }
        SweepSpec::Periodic { h0, h1, .. } => {
            let h1s = h1.values();
            h0.values()
                .into_iter()
                .flat_map(|a| h1s.iter().map(move |&b| (a, b)))
                .collect()
        }
    };
    let work = || -> Vec<SweepCell> {
        jobs.par_iter()
            .map(|&(a, b)| match *spec {
                SweepSpec::Constant { .. } => constant_cell(a, b),
                SweepSpec::Periodic { r, .. } => periodic_cell(r, a, b),
            })
            .collect()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))
            .map(|pool| pool.install(work)),
        None => Ok(work()),
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::OutOfRange(format!("csv: {e}"))
}

pub fn write_sweep_csv<W: Write>(cells: &[SweepCell], periodic: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if periodic {
        w.write_record(PERIODIC_HEADER).map_err(csv_error)?;
    } else {
        w.write_record(CONSTANT_HEADER).map_err(csv_error)?;
    }
    for c in cells {
        let record: [String; 7] = if periodic {
            [
                fmt_float(c.h0),
                fmt_opt(c.h1),
                fmt_float(c.r),
                c.verdict.clone(),
                fmt_opt(c.value),
                fmt_opt(c.z1),
                c.notes.clone(),
            ]
        } else {
            [
                fmt_float(c.h0),
                fmt_float(c.r),
                c.verdict.clone(),
                fmt_opt(c.value),
                fmt_opt(c.r1),
                fmt_opt(c.r2),
                c.notes.clone(),
            ]
        };
        w.write_record(&record).map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| Error::OutOfRange(format!("write: {e}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidParams(format!("not a number: {s:?}")))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

/// Reads a file written by [`write_sweep_csv`]; the mode is taken from the header.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<(Vec<SweepCell>, bool)> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_error)?.clone();
    let periodic = header.iter().eq(PERIODIC_HEADER.iter().copied());
    if !periodic && !header.iter().eq(CONSTANT_HEADER.iter().copied()) {
        return Err(Error::InvalidParams(format!(
            "unknown sweep header {header:?}"
        )));
    }
    let mut cells = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_error)?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let cell = if periodic {
            SweepCell {
                h0: parse_f64(f(0))?,
                h1: parse_opt(f(1))?,
                r: parse_f64(f(2))?,
                verdict: f(3).into(),
                value: parse_opt(f(4))?,
                z1: parse_opt(f(5))?,
                r1: None,
                r2: None,
                notes: f(6).into(),
            }
        } else {
            SweepCell {
                h0: parse_f64(f(0))?,
                h1: None,
                r: parse_f64(f(1))?,
                verdict: f(2).into(),
                value: parse_opt(f(3))?,
                z1: None,
                r1: parse_opt(f(4))?,
                r2: parse_opt(f(5))?,
                notes: f(6).into(),
            }
        };
        cells.push(cell);
    }
    Ok((cells, periodic))
}

/// `r1(h)`, `r2(h)` and the diagonal `r = h` for overlaying on a constant sweep.
pub fn write_boundaries_csv<W: Write>(h_values: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDARY_HEADER).map_err(csv_error)?;
    for &h in h_values {
        let th = thresholds(h)?;
        w.write_record([
            fmt_float(h),
            fmt_float(th.r1),
            fmt_float(th.r2),
            fmt_float(h),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| Error::OutOfRange(format!("write: {e}")))
}

/// Rows `(n, x_n, x_{n-1}, parity)` for the terms `x_{first}, x_{first+1}, ...` of an orbit
/// whose term before `first` is `prev`.
pub fn write_orbit_csv<W: Write>(first: usize, prev: f64, terms: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ORBIT_HEADER).map_err(csv_error)?;
    let mut before = prev;
    for (k, &x) in terms.iter().enumerate() {
        let n = first + k;
        let parity = if n.is_multiple_of(2) { "even" } else { "odd" };
        w.write_record([
            n.to_string(),
            fmt_float(x),
            fmt_float(before),
            parity.to_string(),
        ])
        .map_err(csv_error)?;
        before = x;
    }
    w.flush()
        .map_err(|e| Error::OutOfRange(format!("write: {e}")))
}

/// Residuals of the two curves whose crossings are the embedded fixed points, on a grid
/// (`x` outer, `y` inner). The zero contours of `e1` and `e2` are the curves.
///
/// Constant stocking: `e1 = y - F(y, x)` and `e2 = x - F(x, y)`, whose zero sets cross at
/// `(y_bar, y_bar)` and at the pseudo fixed points. Period two: the two equations of the
/// reduced fixed-point system of `G1 ∘ G0`, crossing at the 2-cycle and any artificial
/// cycles.
pub fn write_curves_csv<W: Write>(params: &ModelParams, x: &Axis, y: &Axis, out: W) -> Result<()> {
    let residual = |a: f64, b: f64| -> Result<[f64; 2]> {
        match params.period() {
            1 => Ok([b - params.apply(0, b, a), a - params.apply(0, a, b)]),
            2 => Ok(artificial_system(params, a, b)),
            p => Err(Error::InvalidParams(format!(
                "no curve pair for period {p}"
            ))),
        }
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVES_HEADER).map_err(csv_error)?;
    let ys = y.values();
    for a in x.values() {
        for &b in &ys {
            let [e1, e2] = residual(a, b)?;
            w.write_record([fmt_float(a), fmt_float(b), fmt_float(e1), fmt_float(e2)])
                .map_err(csv_error)?;
        }
    }
    w.flush()
        .map_err(|e| Error::OutOfRange(format!("write: {e}")))
}
