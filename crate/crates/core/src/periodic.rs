//! Period-two stocking `h = (h0, h1)`: the 2-cycle `{z0, z1}` and its local stability,
//! artificial cycles of the folded embedding, and the global certificate.
//!
//! Even-indexed terms of a 2-cycle orbit equal `z0` and odd-indexed terms equal `z1`, so
//! `z0 = z1 f(z0) + h1` and `z1 = z0 f(z1) + h0`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{
    build_g10, corner_iterate, sandwich_iterate, CornerOptions, Enclosure, QuadMap, Region,
};
use crate::error::{Error, Result};
use crate::model::{Planar, Quad};
use crate::roots::{linspace, newton2, scan_roots};
use crate::verdict::{eigenvalues, jury, AbsorbingBounds, Classification, LocalStability, Verdict};
use crate::ModelParams;

/// Offset from the singular lines `t = r`, `x = h1`, `y = h0`.
const EDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoCycleReport {
    /// Even-indexed terms.
    pub z0: f64,
    /// Odd-indexed terms.
    pub z1: f64,
    pub trace: f64,
    pub det: f64,
    pub eigenvalues: [Complex64; 2],
    pub local: LocalStability,
    pub residuals: [f64; 2],
}

impl TwoCycleReport {
    /// `(z1 - h0)(z0 - h1) < 1`.
    pub fn det_below_one(&self) -> bool {
        self.det < 1.0
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues[0].norm().max(self.eigenvalues[1].norm())
    }
}

fn require_two_periodic(params: &ModelParams) -> Result<(f64, f64)> {
    if params.period() == 2 {
        Ok((params.h(0), params.h(1)))
    } else {
        Err(Error::InvalidParams(format!(
            "two distinct stocking values expected, got period {}",
            params.period()
        )))
    }
}

/// Residuals of the 2-cycle equations.
pub fn two_cycle_residuals(params: &ModelParams, z0: f64, z1: f64) -> [f64; 2] {
    [
        z1 * params.f(z0) + params.h(1) - z0,
        z0 * params.f(z1) + params.h(0) - z1,
    ]
}

/// Trace and determinant of the Jacobian of `T1 ∘ T0` at `(z0, z1)`.
pub fn cycle_trace_det(z0: f64, z1: f64, h0: f64, h1: f64) -> (f64, f64) {
    let trace = (h1 - z0) + (h0 - z1) + (1.0 - h0 / z1) * (1.0 - h1 / z0);
    let det = (z1 - h0) * (z0 - h1);
    (trace, det)
}

fn report_for(params: &ModelParams, z0: f64, z1: f64) -> TwoCycleReport {
    let (h0, h1) = (params.h(0), params.h(1));
    let (trace, det) = cycle_trace_det(z0, z1, h0, h1);
    let res = two_cycle_residuals(params, z0, z1);
    TwoCycleReport {
        z0,
        z1,
        trace,
        det,
        eigenvalues: eigenvalues(trace, det),
        local: jury(trace, det),
        residuals: [res[0].abs(), res[1].abs()],
    }
}

fn acceptable(params: &ModelParams, z: [f64; 2]) -> bool {
    let res = two_cycle_residuals(params, z[0], z[1]);
    z[0] > params.h(1) && z[1] > params.h(0) && res[0].abs() < 1e-10 && res[1].abs() < 1e-10
}

/// Finds the 2-cycle: iterates the folded map first, then Newton from a 3x3 grid of seeds,
/// then a sign scan of the equations reduced to `z0` alone.
pub fn solve_two_cycle(params: &ModelParams) -> Result<TwoCycleReport> {
    let (h0, h1) = require_two_periodic(params)?;
    let r = params.r();
    let bound = params.two_step_bound();
    let system = |z: [f64; 2]| two_cycle_residuals(params, z[0], z[1]);
    let polish = |z: [f64; 2]| {
        newton2(system, z, 1e-13, 60)
            .filter(|&p| acceptable(params, p))
            .or_else(|| acceptable(params, z).then_some(z))
    };

    // T1 ∘ T0 maps (z0, z1) to itself
    let mut state = Planar::new(0.5 * bound, 0.5 * bound);
    let mut last = state;
    for _ in 0..100_000 {
        state = params.apply_vector(1, params.apply_vector(0, state));
        if state.dist_sup(&last) < 1e-14 * (1.0 + state.x.abs()) {
            break;
        }
        last = state;
    }
    if let Some(z) = polish([state.x, state.y]) {
        return Ok(report_for(params, z[0], z[1]));
    }

    let xs = linspace(h1 + EDGE, bound, 5);
    let ys = linspace(h0 + EDGE, bound, 5);
    for &x in &xs[1..4] {
        for &y in &ys[1..4] {
            if let Some(z) = newton2(system, [x, y], 1e-13, 100).filter(|&p| acceptable(params, p))
            {
                return Ok(report_for(params, z[0], z[1]));
            }
        }
    }

    // z1 = (z0 - h1) e^{z0 - r} from the first equation
    let z1_of = |z0: f64| (z0 - h1) * (z0 - r).exp();
    let reduced = |z0: f64| {
        let z1 = z1_of(z0);
        z0 * (r - z1).exp() + h0 - z1
    };
    let grid = linspace(h1 + EDGE, bound.max(h1 + 1.0), 20_000);
    for z0 in scan_roots(reduced, &grid, 1e-15) {
        if let Some(z) = polish([z0, z1_of(z0)]) {
            return Ok(report_for(params, z[0], z[1]));
        }
    }
    Err(Error::NonConvergence {
        z0: state.x,
        z1: state.y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorollaryClause {
    /// `r <= 1` forces `Det < 1`.
    SmallGrowthDetBelowOne,
    /// `z0 <= h1 + 1` and `z1 <= h0 + 1` force local stability.
    CycleNearStockingStable,
    /// `z0 > h1 + 1` and `z1 > h0 + 1` force instability.
    CycleFarFromStockingUnstable,
}

/// Which of the three shortcut rules apply, cross-checked against the computed report.
pub fn corollary_shortcuts(
    report: &TwoCycleReport,
    params: &ModelParams,
) -> Result<Vec<CorollaryClause>> {
    let (h0, h1) = require_two_periodic(params)?;
    let mut fired = Vec::new();
    if params.r() <= 1.0 {
        if report.det >= 1.0 {
            return Err(Error::ContradictionDetected(format!(
                "r <= 1 but Det = {}",
                report.det
            )));
        }
        fired.push(CorollaryClause::SmallGrowthDetBelowOne);
    }
    let near = [report.z0 - h1 <= 1.0, report.z1 - h0 <= 1.0];
    if near.iter().all(|&b| b) {
        if report.local == LocalStability::Unstable {
            return Err(Error::ContradictionDetected(format!(
                "cycle ({}, {}) within 1 of the stocking but Jury test fails",
                report.z0, report.z1
            )));
        }
        fired.push(CorollaryClause::CycleNearStockingStable);
    }
    if near.iter().all(|&b| !b) {
        if report.local == LocalStability::Las {
            return Err(Error::ContradictionDetected(format!(
                "Det = {} > 1 but Jury test passes",
                report.det
            )));
        }
        fired.push(CorollaryClause::CycleFarFromStockingUnstable);
    }
    Ok(fired)
}

/// `g1(t) = h0 / (1 - f(t))` and `g2(t) = (h0 f(t) + h1) / (1 - f(t)^2)` for `t > r`.
pub fn g_maps(t: f64, params: &ModelParams) -> Result<(f64, f64)> {
    if !(t > params.r()) {
        return Err(Error::InvalidParams(format!(
            "g maps need t > r = {}, got {t}",
            params.r()
        )));
    }
    let f = params.f(t);
    let (h0, h1) = (params.h(0), params.h(1));
    Ok((
        h0 / -(params.r() - t).exp_m1(),
        (h0 * f + h1) / (1.0 - f * f),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtificialCycleSet {
    /// Quadruples `(x, y, u, v)` with `(u, v) = (F1(y, x), F0(x, y))`, sorted by `x`.
    pub cycles: Vec<Quad<f64>>,
    pub count: usize,
    /// The solution identified as the genuine 2-cycle `(z0, z1)`, if it was found.
    pub two_cycle: Option<[f64; 2]>,
    /// Cell width of the scan; roots closer than this may be missed.
    pub resolution: f64,
}

/// Left-hand minus right-hand sides of the fixed-point system of the folded embedding,
/// reduced to `(x, y)`.
pub fn artificial_system(params: &ModelParams, x: f64, y: f64) -> [f64; 2] {
    let (h0, h1) = (params.h(0), params.h(1));
    let v = x * params.f(y) + h0;
    let u = y * params.f(x) + h1;
    [v * params.f(u) - (x - h1), u * params.f(v) - (y - h0)]
}

const SCAN_CELLS: usize = 1024;

/// Enumerates solutions of the reduced fixed-point system other than the 2-cycle.
pub fn find_artificial_cycles(params: &ModelParams) -> Result<ArtificialCycleSet> {
    find_artificial_cycles_with(params, SCAN_CELLS)
}

pub fn find_artificial_cycles_with(
    params: &ModelParams,
    cells: usize,
) -> Result<ArtificialCycleSet> {
    let (h0, h1) = require_two_periodic(params)?;
    let bound = params.two_step_bound();
    let xs = linspace(h1 + EDGE, bound.max(h1 + 1.0), cells + 1);
    let ys = linspace(h0 + EDGE, bound.max(h0 + 1.0), cells + 1);
    let resolution = (xs[1] - xs[0]).max(ys[1] - ys[0]);

    let rows: Vec<Vec<[f64; 2]>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| artificial_system(params, x, y))
                .collect()
        })
        .collect();
    let changes = |a: f64, b: f64, c: f64, d: f64| {
        let vals = [a, b, c, d];
        vals.iter().all(|v| v.is_finite())
            && vals.iter().any(|&v| v <= 0.0)
            && vals.iter().any(|&v| v >= 0.0)
    };
    let seeds: Vec<[f64; 2]> = (0..cells)
        .into_par_iter()
        .flat_map_iter(|j| {
            let (lo, hi) = (&rows[j], &rows[j + 1]);
            let (xs, ys) = (&xs, &ys);
            (0..cells).filter_map(move |i| {
                let both = (0..2).all(|k| changes(lo[i][k], lo[i + 1][k], hi[i][k], hi[i + 1][k]));
                both.then(|| [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])])
            })
        })
        .collect();

    let system = |p: [f64; 2]| artificial_system(params, p[0], p[1]);
    let mut roots: Vec<[f64; 2]> = seeds
        .par_iter()
        .filter_map(|&s| newton2(system, s, 1e-12, 80))
        .filter(|p| p[0] > h1 && p[1] > h0)
        .collect();
    roots.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut unique: Vec<[f64; 2]> = Vec::new();
    for p in roots {
        if unique
            .iter()
            .all(|q| (q[0] - p[0]).abs().max((q[1] - p[1]).abs()) > 1e-6)
        {
            unique.push(p);
        }
    }

    let cycle = solve_two_cycle(params).ok().map(|rep| [rep.z0, rep.z1]);
    let is_cycle = |p: &[f64; 2]| {
        let res = two_cycle_residuals(params, p[0], p[1]);
        res[0].abs().max(res[1].abs()) < 1e-8
    };
    let two_cycle = unique.iter().find(|p| is_cycle(p)).copied().or(cycle);
    let cycles: Vec<Quad<f64>> = unique
        .into_iter()
        .filter(|p| !is_cycle(p))
        .map(|[x, y]| Quad::new(x, y, params.apply(1, y, x), params.apply(0, x, y)))
        .collect();
    Ok(ArtificialCycleSet {
        count: cycles.len(),
        cycles,
        two_cycle,
        resolution,
    })
}

/// Ranges of even- and odd-indexed terms enclosed by the corner limits of `G1 ∘ G0`.
///
/// On the diagonal `G10^n(X, X) = (y_2n, y_2n-1, y_2n, y_2n-1)`, so even terms are bounded
/// through the first and third coordinates and odd terms through the second and fourth.
pub fn even_odd_bounds(enc: &Enclosure<f64>) -> AbsorbingBounds {
    let (l, u) = (enc.lower, enc.upper);
    AbsorbingBounds::EvenOdd {
        even: [l.x.max(u.u), u.x.min(l.u)],
        odd: [u.y.max(l.v), l.y.min(u.v)],
    }
}

fn g10_of(params: &ModelParams) -> impl QuadMap<f64> + '_ {
    build_g10(params.component(0), params.component(1))
}

/// Box `(a, b)` compatible with `G1 ∘ G0` that also covers the eventual absorbing square.
pub fn witness_box(params: &ModelParams) -> Result<Region<f64>> {
    let (h0, h1) = require_two_periodic(params)?;
    let r = params.r();
    let hmin = h0.min(h1);
    if !(hmin > r) {
        return Err(Error::WitnessConstructionFailed(format!(
            "needs both stocking values above r = {r}"
        )));
    }
    let g10 = g10_of(params);
    let cover = params.two_step_bound();
    for frac in [0.5, 0.25, 0.75, 0.1, 0.9, 0.02, 0.98] {
        let a = r + frac * (hmin - r);
        let (g1, g2) = g_maps(a, params)?;
        let first = if h0 > h1 { g1 } else { g1.max(g2) };
        for b in [
            first * (1.0 + 1e-9),
            first.max(g2) * (1.0 + 1e-9),
            first.max(g2).max(cover),
        ] {
            let region = Region::new(a, b)?;
            if crate::embedding::check_box_compatible(&g10, &region).is_ok() && b >= cover {
                return Ok(region);
            }
        }
    }
    Err(Error::WitnessConstructionFailed(
        "no compatible box on the search grid".into(),
    ))
}

/// Global classification of the 2-cycle for period-two stocking.
pub fn certify_periodic(params: &ModelParams) -> Result<Classification> {
    let (h0, h1) = require_two_periodic(params)?;
    let r = params.r();
    let report = solve_two_cycle(params)?;
    let local = Some(report.local);
    let hmin = h0.min(h1);
    let rel = 1e-12 * r.max(1.0);

    if hmin < r - rel {
        return Ok(Classification::new(Verdict::NotApplicable, local)
            .rule("stocking_not_above_r")
            .note(format!(
                "local test of the 2-cycle: {}",
                report.local.label()
            )));
    }

    let g10 = g10_of(params);
    if hmin <= r + rel {
        // no compatible box exists; squeeze orbits between the corner orbits of the
        // a-priori absorbing square instead
        let region = Region::new(params.eventual_lower_bound(), params.two_step_bound())?;
        let enc = sandwich_iterate(&g10, &region, 1e-12, 1_000_000)?;
        let mut c = if !enc.converged {
            Classification::new(Verdict::NotApplicable, local)
                .rule("stocking_equals_r")
                .note("corner orbits of the absorbing square did not settle")
        } else if enc.is_point(1e-8) {
            Classification::new(Verdict::GloballyStable, local)
                .rule("stocking_equals_r")
                .rule("order_sandwich_collapses")
        } else {
            Classification::new(classify_open(even_odd_bounds(&enc), report.local), local)
                .rule("stocking_equals_r")
                .rule("order_sandwich_absorbing")
        };
        c.witness = Some(region);
        return Ok(c);
    }

    let region = witness_box(params)?;
    let artificial = find_artificial_cycles(params)?;
    let enc = corner_iterate(&g10, &region, &CornerOptions::default());
    let resolution_note = format!(
        "{} artificial cycle(s) found by a grid scan at resolution {:.2e}",
        artificial.count, artificial.resolution
    );
    let mut c = match (&enc, artificial.count) {
        (Ok(e), 0) if e.is_point(1e-8) => {
            Classification::new(Verdict::GloballyStable, local).rule("unique_embedded_fixed_point")
        }
        (Ok(e), _) => {
            let mut c = Classification::new(classify_open(even_odd_bounds(e), report.local), local)
                .rule("artificial_cycles_absorbing");
            if e.is_point(1e-8) {
                c = c.note("corner limits coincide although the scan reported artificial cycles");
            }
            c
        }
        (Err(_), 0) => Classification::new(Verdict::GloballyStable, local)
            .rule("unique_embedded_fixed_point")
            .note("corner iteration did not finish; relying on the scan alone"),
        (Err(e), _) => {
            let bounds = quadruple_bounds(&artificial.cycles);
            Classification::new(classify_open(bounds, report.local), local)
                .rule("artificial_cycles_absorbing")
                .note(format!(
                    "corner iteration failed ({e}); bounds taken from the scan"
                ))
        }
    };
    c.witness = Some(region);
    Ok(c.note(resolution_note))
}

fn classify_open(bounds: AbsorbingBounds, local: LocalStability) -> Verdict {
    if local == LocalStability::Unstable {
        Verdict::Unstable {
            bounds: Some(bounds),
        }
    } else {
        Verdict::AbsorbingBox(bounds)
    }
}

fn quadruple_bounds(cycles: &[Quad<f64>]) -> AbsorbingBounds {
    let fold = |f: fn(&Quad<f64>) -> [f64; 2]| {
        cycles
            .iter()
            .map(f)
            .fold([f64::INFINITY, f64::NEG_INFINITY], |acc, [a, b]| {
                [acc[0].min(a.min(b)), acc[1].max(a.max(b))]
            })
    };
    AbsorbingBounds::EvenOdd {
        even: fold(|q| [q.x, q.u]),
        odd: fold(|q| [q.y, q.v]),
    }
}
