//! Constant stocking: the equilibrium, its Jacobian, the thresholds `r1`, `H*`, `r2`, the
//! pseudo fixed points of the embedding and the global certificate built from them.

use num_complex::Complex64;
use serde::Serialize;

use crate::embedding::{build_g, corner_iterate, CornerOptions, Region};
use crate::error::{Error, Result};
use crate::model::Planar;
use crate::roots::{bisect, log_grid, scan_roots};
use crate::verdict::{
    eigenvalues, AbsorbingBounds, Classification, LocalStability, Verdict, MARGINAL_BAND,
};
use crate::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub y_bar: f64,
    /// `1 - h / y_bar`.
    pub trace: f64,
    /// `y_bar - h`.
    pub det: f64,
    pub eigenvalues: [Complex64; 2],
    pub local: LocalStability,
    /// `|y_bar - y_bar f(y_bar) - h|`.
    pub residual: f64,
}

fn require_constant(params: &ModelParams) -> Result<f64> {
    if params.is_constant() {
        Ok(params.h(0))
    } else {
        Err(Error::InvalidParams(format!(
            "constant stocking expected, got period {}",
            params.period()
        )))
    }
}

/// Unique positive equilibrium of `y = y f(y) + h`.
pub fn solve_equilibrium(params: &ModelParams) -> Result<EquilibriumReport> {
    let h = require_constant(params)?;
    let r = params.r();
    let y_bar = if h == 0.0 {
        r
    } else {
        let g = |y: f64| y - y * (r - y).exp() - h;
        let (lo, hi) = (r.max(h), h + (r - 1.0).exp() + 1.0);
        let mut y = bisect(g, lo, hi, 1e-14)?;
        let slope = 1.0 - (r - y).exp() + y * (r - y).exp();
        if slope.abs() > 1e-300 {
            let polished = y - g(y) / slope;
            if polished > lo && polished <= hi && g(polished).abs() <= g(y).abs() {
                y = polished;
            }
        }
        y
    };
    let f = (r - y_bar).exp();
    // J = [[f, -y f], [1, 0]]; on the equilibrium f = 1 - h/y
    let trace = if h == 0.0 { 1.0 } else { 1.0 - h / y_bar };
    let det = y_bar - h;
    let local = if (y_bar - (1.0 + h)).abs() < MARGINAL_BAND {
        LocalStability::Marginal
    } else if y_bar < 1.0 + h {
        LocalStability::Las
    } else {
        LocalStability::Unstable
    };
    Ok(EquilibriumReport {
        y_bar,
        trace,
        det,
        eigenvalues: eigenvalues(trace, det),
        local,
        residual: (y_bar - y_bar * f - h).abs(),
    })
}

/// Trace and determinant read off the Jacobian entries `f(y)` and `y f(y)` rather than the
/// simplified forms.
pub fn jacobian_entries(params: &ModelParams, y_bar: f64) -> (f64, f64) {
    let f = params.f(y_bar);
    (f, y_bar * f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSet {
    /// Local stability boundary: the equilibrium is stable iff `r < r1`.
    pub r1: f64,
    /// Positive root of `H (H - h) = h`.
    pub h_star: f64,
    /// Below this, the equilibrium is globally stable.
    pub r2: f64,
}

pub fn thresholds(h: f64) -> Result<ThresholdSet> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParams(format!(
            "thresholds need h > 0, got {h}"
        )));
    }
    let r1 = h + 1.0 - h.ln_1p();
    let h_star = 0.5 * (h + (h * h + 4.0 * h).sqrt());
    // H* - h = h / H*, which avoids cancelling for large h
    let r2 = h_star + h.ln() - 2.0 * h_star.ln();
    Ok(ThresholdSet { r1, h_star, r2 })
}

/// `g1(t) = h / (1 - f(t))`: the curve `x = F(x, t)` solved for `x`. Only defined for `t > r`.
pub fn g1(t: f64, params: &ModelParams) -> Result<f64> {
    if !(t > params.r()) {
        return Err(Error::InvalidParams(format!(
            "g1 needs t > r = {}, got {t}",
            params.r()
        )));
    }
    Ok(params.h(0) / -(params.r() - t).exp_m1())
}

fn g1_raw(t: f64, r: f64, h: f64) -> f64 {
    if t > r {
        h / -(r - t).exp_m1()
    } else {
        f64::NAN
    }
}

const SCAN_POINTS: usize = 4096;
const DEDUP: f64 = 1e-6;

/// Number of common fixed points of `x = F(x, y)`, `y = F(y, x)` predicted from `(r, h)`,
/// or `None` too close to a boundary to call.
fn predicted_intersections(r: f64, h: f64, th: &ThresholdSet) -> Option<usize> {
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-6 * (1.0 + b.abs());
    if near(r, h) || near(r, th.r2) {
        None
    } else if h < r || r < th.r2 {
        Some(1)
    } else {
        Some(3)
    }
}

/// Solutions of `x = x f(y) + h`, `y = y f(x) + h`, sorted by `x`: the symmetric point
/// `(y_bar, y_bar)` and, when present, the pseudo pair `(x*, y*)`, `(y*, x*)`.
pub fn find_intersections(params: &ModelParams) -> Result<Vec<Planar<f64>>> {
    let h = require_constant(params)?;
    if !(h > 0.0) {
        return Err(Error::InvalidParams("intersections need h > 0".into()));
    }
    let r = params.r();
    let th = thresholds(h)?;
    let y_bar = solve_equilibrium(params)?.y_bar;
    let mut hi = (r + 40.0).max(y_bar + 1.0);
    if h > r {
        hi = hi.max(1.01 * g1_raw(h, r, h));
    }
    let grid = log_grid(r, 1e-9, hi, SCAN_POINTS);
    // Dividing out the known root leaves the pseudo pair as ordinary sign changes on
    // either side of y_bar, even when they are close to it.
    let reduced = |t: f64| (g1_raw(g1_raw(t, r, h), r, h) - t) / (t - y_bar);
    let mut points = vec![Planar::new(y_bar, y_bar)];
    for t in scan_roots(reduced, &grid, 1e-14) {
        let p = Planar::new(t, g1_raw(t, r, h));
        if points.iter().all(|q| q.dist_sup(&p) > DEDUP) {
            points.push(p);
        }
    }
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    if let Some(expected) = predicted_intersections(r, h, &th) {
        if expected != points.len() {
            return Err(Error::CountMismatch {
                expected,
                found: points.len(),
            });
        }
    }
    Ok(points)
}

/// A box `(a, b)` with `(a, b) <=_se (F(a, b), F(b, a))` whose square contains `target`.
pub fn feasible_ab(params: &ModelParams, target: Planar<f64>) -> Result<Region<f64>> {
    let h = require_constant(params)?;
    let r = params.r();
    if !(h > r) {
        return Err(Error::Infeasible(format!(
            "no compatible box when h = {h} <= r = {r}"
        )));
    }
    let (tmin, tmax) = (target.x.min(target.y), target.x.max(target.y));
    if !(tmin > r) {
        return Err(Error::Infeasible(format!(
            "target coordinate {tmin} not above r = {r}"
        )));
    }
    // Any a in (r, h] works with b >= g1(a); a <= g1(b) then holds because g1 > h.
    let a = tmin.min(r + 0.9 * (h - r));
    let b = (g1_raw(a, r, h) * (1.0 + 1e-9)).max(tmax);
    let (fa, fb) = (params.apply(0, a, b), params.apply(0, b, a));
    if a <= fa && fb <= b {
        Region::new(a, b)
    } else {
        Err(Error::Infeasible(format!(
            "box ({a}, {b}) failed direct check"
        )))
    }
}

/// Global classification of the equilibrium for constant stocking.
pub fn certify_constant(params: &ModelParams) -> Result<Classification> {
    certify_constant_with(params, &CornerOptions::default())
}

/// [`certify_constant`] with explicit settings for the corner iteration cross-check.
pub fn certify_constant_with(
    params: &ModelParams,
    corner: &CornerOptions<f64>,
) -> Result<Classification> {
    let h = require_constant(params)?;
    let r = params.r();
    let eq = solve_equilibrium(params)?;
    if h == 0.0 {
        return Ok(if r < 1.0 {
            Classification::new(Verdict::LocallyStableGlobalOpen, Some(eq.local))
                .rule("zero_stocking_local")
                .note("h = 0: global stability for r < 1 is known from the literature, not certified here")
        } else {
            Classification::new(Verdict::Unstable { bounds: None }, Some(eq.local))
                .rule("zero_stocking_local")
        });
    }
    let th = thresholds(h)?;

    if r <= th.r2 {
        let region = feasible_ab(params, Planar::new(eq.y_bar, eq.y_bar))?;
        let enc = corner_iterate(&build_g(params.component(0)), &region, corner);
        let mut c = Classification::new(Verdict::GloballyStable, Some(eq.local))
            .rule("r_at_most_r2_unique_embedded_fixed_point");
        c.witness = Some(region);
        match enc {
            Ok(e) if !e.is_point(1e-8) => {
                c = c.note(format!(
                    "corner limits differ by {:.3e}; expected a single fixed point",
                    e.lower.dist_sup(&e.upper)
                ));
            }
            Ok(_) => {}
            Err(e) => c = c.note(format!("corner iteration did not finish: {e}")),
        }
        return Ok(c);
    }

    let pseudo_bounds = || -> Result<(AbsorbingBounds, Option<String>)> {
        let points = find_intersections(params)?;
        let lo = points.first().map(|p| p.x.min(p.y)).unwrap_or(eq.y_bar);
        let hi = points.first().map(|p| p.x.max(p.y)).unwrap_or(eq.y_bar);
        let note = (points.len() == 1).then(|| {
            "pseudo pair not resolved next to r2; bounds collapsed to the equilibrium".into()
        });
        Ok((AbsorbingBounds::Square { lo, hi }, note))
    };

    if eq.local == LocalStability::Unstable {
        let mut c = Classification::new(Verdict::Unstable { bounds: None }, Some(eq.local))
            .rule("r_above_r1_unstable");
        if r < h {
            let (bounds, note) = pseudo_bounds()?;
            c.verdict = Verdict::Unstable {
                bounds: Some(bounds),
            };
            c = c.rule("pseudo_fixed_points_absorbing");
            c.witness = feasible_ab(params, Planar::new(eq.y_bar, eq.y_bar)).ok();
            if let Some(n) = note {
                c = c.note(n);
            }
        }
        return Ok(c);
    }

    if r < h {
        let (bounds, note) = pseudo_bounds()?;
        let mut c = Classification::new(Verdict::AbsorbingBox(bounds), Some(eq.local))
            .rule("pseudo_fixed_points_absorbing");
        c.witness = feasible_ab(params, Planar::new(eq.y_bar, eq.y_bar)).ok();
        if let Some(n) = note {
            c = c.note(n);
        }
        return Ok(
            c.note("equilibrium is locally stable; global stability conjectured, not certified")
        );
    }

    Ok(
        Classification::new(Verdict::LocallyStableGlobalOpen, Some(eq.local))
            .rule("local_stability_r_below_r1")
            .note("no compatible box for h <= r; global stability conjectured, not certified"),
    )
}
