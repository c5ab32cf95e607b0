//! Orbit simulation, attractor labelling and scans for a complex eigenvalue pair leaving
//! the unit disk.

use serde::Serialize;

use crate::constant::solve_equilibrium;
use crate::error::{Error, Result};
use crate::model::{Params, Planar};
use crate::periodic::solve_two_cycle;
use crate::scalar::Scalar;
use crate::verdict::eigenvalues;
use crate::ModelParams;

const OVERFLOW: f64 = 1e300;

/// Terms `x_1, ..., x_n` of the orbit started from `(x_0, x_{-1})`, with
/// `x_{k+1} = x_k f(x_{k-1}) + h_k`.
pub fn simulate<T: Scalar>(
    params: &Params<T>,
    x0: T,
    x_minus1: T,
    n_steps: usize,
) -> Result<Vec<T>> {
    if !(x0 >= T::zero() && x_minus1 >= T::zero() && x0.is_finite() && x_minus1.is_finite()) {
        return Err(Error::NegativeState {
            x: x0.to_f64().unwrap_or(f64::NAN),
            y: x_minus1.to_f64().unwrap_or(f64::NAN),
        });
    }
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be at least 1".into()));
    }
    let limit = T::from_f64(OVERFLOW).unwrap_or_else(T::max_value);
    let mut out = Vec::with_capacity(n_steps);
    let (mut x, mut y) = (x0, x_minus1);
    for n in 0..n_steps {
        let next = params.apply(n, x, y);
        if !(next.is_finite() && next < limit) {
            return Err(Error::Overflow { step: n + 1 });
        }
        out.push(next);
        y = x;
        x = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Attractor {
    Equilibrium(f64),
    /// Smallest `k` with `x_{n+k} = x_n` across the window; `points` starts at an
    /// even-indexed term.
    Cycle {
        period: usize,
        points: Vec<f64>,
    },
    /// Bounded, not periodic up to `max_period`, next to a fixed point or 2-cycle with a
    /// complex pair outside the unit circle. A reporting label only.
    InvariantCurve,
    Unresolved,
}

impl Attractor {
    pub fn label(&self) -> String {
        match self {
            Attractor::Equilibrium(_) => "Equilibrium".into(),
            Attractor::Cycle { period, .. } => format!("Cycle({period})"),
            Attractor::InvariantCurve => "InvariantCurve".into(),
            Attractor::Unresolved => "Unresolved".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitResult {
    /// `(x_n, x_{n-1})` over the window.
    pub samples: Vec<Planar<f64>>,
    pub attractor: Attractor,
    pub transient_used: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub transient: usize,
    pub window: usize,
    pub tol: f64,
    pub max_period: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            transient: 10_000,
            window: 4096,
            tol: 1e-6,
            max_period: 64,
        }
    }
}

/// Complex eigenvalue pair with modulus above one at the equilibrium (`p = 1`) or the
/// 2-cycle (`p = 2`).
fn complex_unstable(params: &ModelParams) -> bool {
    let (trace, det) = match params.period() {
        1 => match solve_equilibrium(params) {
            Ok(rep) => (rep.trace, rep.det),
            Err(_) => return false,
        },
        2 => match solve_two_cycle(params) {
            Ok(rep) => (rep.trace, rep.det),
            Err(_) => return false,
        },
        _ => return false,
    };
    let [lambda, _] = eigenvalues(trace, det);
    lambda.im != 0.0 && lambda.norm() > 1.0
}

pub fn classify_attractor(
    params: &ModelParams,
    x0: f64,
    x_minus1: f64,
    opts: &ClassifyOptions,
) -> Result<OrbitResult> {
    if opts.window < 2 * opts.max_period || opts.window < 2 {
        return Err(Error::InvalidParams(format!(
            "window {} must be at least twice max_period {}",
            opts.window, opts.max_period
        )));
    }
    // keep the window starting on an even index
    let transient = opts.transient + opts.transient % 2;
    let orbit = simulate(params, x0, x_minus1, transient + opts.window)?;
    // orbit[k] is x_{k+1}, so the window x_{transient+2}, ... starts on an even index
    let first = transient + 1;
    let w = &orbit[first..];
    let samples: Vec<Planar<f64>> = (first..orbit.len())
        .map(|k| Planar::new(orbit[k], orbit[k - 1]))
        .collect();

    let (lo, hi) = w
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let attractor = if hi - lo < opts.tol {
        Attractor::Equilibrium(0.5 * (lo + hi))
    } else if let Some(k) = (1..=opts.max_period)
        .find(|&k| (0..w.len() - k).all(|i| (w[i + k] - w[i]).abs() < opts.tol))
    {
        Attractor::Cycle {
            period: k,
            points: w[..k].to_vec(),
        }
    } else if complex_unstable(params) {
        Attractor::InvariantCurve
    } else {
        Attractor::Unresolved
    };
    Ok(OrbitResult {
        samples,
        attractor,
        transient_used: transient,
        tolerance: opts.tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NsCrossing {
    /// Bracket in `s` of width at most `1e-8`.
    pub s_lo: f64,
    pub s_hi: f64,
    pub s: f64,
    pub modulus: f64,
    /// Argument of the eigenvalue with positive imaginary part.
    pub argument: f64,
}

/// Largest eigenvalue modulus and the argument of the leading eigenvalue at the
/// equilibrium or the 2-cycle.
pub fn leading_eigenvalue(params: &ModelParams) -> Result<(f64, f64, bool)> {
    let (trace, det) = match params.period() {
        1 => {
            let rep = solve_equilibrium(params)?;
            (rep.trace, rep.det)
        }
        2 => {
            let rep = solve_two_cycle(params)?;
            (rep.trace, rep.det)
        }
        p => {
            return Err(Error::InvalidParams(format!(
                "no eigenvalue scan for period {p}"
            )))
        }
    };
    let [a, b] = eigenvalues(trace, det);
    let lead = if a.norm() >= b.norm() { a } else { b };
    Ok((lead.norm(), lead.arg().abs(), lead.im != 0.0))
}

/// Locates the first `s` in `range` where a complex pair crosses the unit circle.
pub fn neimark_sacker_scan<F>(family: F, range: (f64, f64), steps: usize) -> Result<NsCrossing>
where
    F: Fn(f64) -> Result<ModelParams>,
{
    let (from, to) = range;
    if !(from < to) || steps == 0 {
        return Err(Error::InvalidParams(format!(
            "bad scan range [{from}, {to}] / {steps}"
        )));
    }
    let eval = |s: f64| -> Result<(f64, f64, bool)> { leading_eigenvalue(&family(s)?) };
    let ds = (to - from) / steps as f64;
    let mut prev = (from, eval(from)?);
    for k in 1..=steps {
        let s = if k == steps { to } else { from + ds * k as f64 };
        let cur = (s, eval(s)?);
        let (m0, m1) = (prev.1 .0 - 1.0, cur.1 .0 - 1.0);
        if m0.signum() != m1.signum() && (prev.1 .2 || cur.1 .2) {
            let (mut lo, mut hi) = (prev.0, cur.0);
            let below_at_lo = m0 < 0.0;
            while hi - lo > 1e-8 {
                let mid = 0.5 * (lo + hi);
                let below = eval(mid)?.0 < 1.0;
                if below == below_at_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s = 0.5 * (lo + hi);
            let (modulus, argument, complex) = eval(s)?;
            if complex {
                return Ok(NsCrossing {
                    s_lo: lo,
                    s_hi: hi,
                    s,
                    modulus,
                    argument,
                });
            }
        }
        prev = cur;
    }
    Err(Error::NoCrossing { from, to })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;

    #[test]
    fn fixed_point_orbit_is_constant() {
        let p = Params::constant(2.0, 3.0).unwrap();
        let y: f64 = 3.683_907_095_534_441;
        let orbit = simulate(&p, y, y, 50).unwrap();
        assert!(orbit.iter().all(|x| (x - y).abs() < 1e-12));
    }

    #[test]
    fn stable_equilibrium_reached() {
        let p = Params::constant(0.5, 1.0).unwrap();
        let y_bar = solve_equilibrium(&p).unwrap().y_bar;
        let orbit = simulate(&p, 4.2, 0.3, 2000).unwrap();
        assert!((orbit[1999] - y_bar).abs() < 1e-10);
    }

    #[test]
    fn four_cycle_tail() {
        let p = Params::two_periodic(3.0, 2.0, 6.444).unwrap();
        let res = classify_attractor(&p, 1.0, 1.0, &ClassifyOptions::default()).unwrap();
        match res.attractor {
            Attractor::Cycle { period: 4, points } => {
                let mut sorted = points.clone();
                sorted.sort_by(f64::total_cmp);
                for (c, e) in sorted.iter().zip([2.000, 6.479, 7.049, 19.611]) {
                    assert!((c - e).abs() < 5e-3, "{points:?}");
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_cycle_and_curve() {
        let p = Params::two_periodic(1.0, 2.0, 1.5).unwrap();
        let res = classify_attractor(&p, 1.0, 1.0, &ClassifyOptions::default()).unwrap();
        match res.attractor {
            Attractor::Cycle { period: 2, points } => {
                assert!((points[0] - 2.230).abs() < 1e-3 && (points[1] - 2.498).abs() < 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = Params::two_periodic(1.5, 0.82, 1.8).unwrap();
        let res = classify_attractor(&p, 1.0, 1.0, &ClassifyOptions::default()).unwrap();
        assert_eq!(res.attractor, Attractor::InvariantCurve);
    }

    #[test]
    fn bad_inputs() {
        let p = Params::constant(1.0, 1.0).unwrap();
        assert!(simulate(&p, -1.0, 1.0, 10).is_err());
        assert!(simulate(&p, 1.0, 1.0, 0).is_err());
        let opts = ClassifyOptions {
            window: 100,
            ..Default::default()
        };
        assert!(classify_attractor(&p, 1.0, 1.0, &opts).is_err());
        let p = Params::constant(700.0, 1.0).unwrap();
        assert!(matches!(
            simulate(&p, 5.0, 0.0, 10),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn deterministic_and_bounded_below() {
        let p = Params::two_periodic(2.7, 0.4, 1.3).unwrap();
        let a = simulate(&p, 0.9, 2.0, 3000).unwrap();
        let b = simulate(&p, 0.9, 2.0, 3000).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| x > 0.4));
    }

    #[test]
    fn f32_orbit() {
        let p = Params::<f32>::constant(0.5, 1.0).unwrap();
        let orbit = simulate(&p, 2.0, 2.0, 500).unwrap();
        assert!(
            (orbit[499] as f64
                - solve_equilibrium(&Params::constant(0.5, 1.0).unwrap())
                    .unwrap()
                    .y_bar)
                .abs()
                < 1e-4
        );
    }

    #[test]
    fn scans() {
        let c = neimark_sacker_scan(|r| Params::constant(r, 1.0), (0.5, 3.0), 50).unwrap();
        assert!((c.s - (2.0 - 2f64.ln())).abs() < 1e-6);
        assert!((c.modulus - 1.0).abs() < 1e-6);
        let c =
            neimark_sacker_scan(|r| Params::two_periodic(r, 0.82, 1.8), (1.2, 1.8), 60).unwrap();
        assert!(c.s > 1.45 && c.s < 1.55);
        assert!(matches!(
            neimark_sacker_scan(|r| Params::constant(r, 1.0), (0.1, 1.0), 20),
            Err(Error::NoCrossing { .. })
        ));
    }
}
