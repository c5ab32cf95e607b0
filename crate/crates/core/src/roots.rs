//! Small root-finding kit: bracketed bisection, grid sign scans and a damped 2D Newton.

use crate::error::{Error, Result};

/// Bisection on a bracket with a sign change. Stops when the bracket is narrower than `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.is_nan() {
            return Err(Error::BracketFailure { lo, hi });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of `f` located by sign changes between consecutive grid nodes and refined by
/// bisection. Nodes where `f` is not finite break the scan.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, grid: &[f64], xtol: f64) -> Vec<f64> {
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if a == 0.0 {
            roots.push(grid[i]);
        } else if a.signum() != b.signum() && b != 0.0 {
            if let Ok(root) = bisect(&f, grid[i], grid[i + 1], xtol) {
                roots.push(root);
            }
        }
    }
    if let (Some(&last), Some(&t)) = (values.last(), grid.last()) {
        if last == 0.0 {
            roots.push(t);
        }
    }
    roots
}

/// `n` points `lo + (hi - lo) * s` with `s` log-spaced, denser near `lo`.
pub fn log_grid(lo: f64, first_offset: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = hi - lo;
    let (a, b) = (first_offset.ln(), span.ln());
    (0..n)
        .map(|i| lo + (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Evenly spaced points on `[lo, hi]` inclusive; a single point is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton iteration for a planar system with a central-difference Jacobian.
/// Returns the point once the residual drops below `tol`, or `None`.
pub fn newton2<F: Fn([f64; 2]) -> [f64; 2]>(
    system: F,
    start: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Option<[f64; 2]> {
    let mut x = start;
    let mut fx = system(x);
    for _ in 0..max_iter {
        if !(fx[0].is_finite() && fx[1].is_finite()) {
            return None;
        }
        if norm2(fx) < tol {
            return Some(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let step = 1e-7 * x[k].abs().max(1.0);
            let (mut xp, mut xm) = (x, x);
            xp[k] += step;
            xm[k] -= step;
            let (fp, fm) = (system(xp), system(xm));
            jac[0][k] = (fp[0] - fm[0]) / (2.0 * step);
            jac[1][k] = (fp[1] - fm[1]) / (2.0 * step);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = [
            (jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
            (-jac[1][0] * fx[0] + jac[0][0] * fx[1]) / det,
        ];
        let current = norm2(fx);
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            let ft = system(trial);
            if ft[0].is_finite() && ft[1].is_finite() && norm2(ft) < current {
                x = trial;
                fx = ft;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                // no decrease possible; accept a converged point, otherwise give up
                return (current < tol * 10.0).then_some(x);
            }
        }
    }
    (norm2(fx) < tol).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt_two() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn scan_finds_all_cubic_roots() {
        let grid = linspace(-3.0, 3.0, 601);
        let roots = scan_roots(|x| (x - 1.0) * (x + 2.0) * (x - 0.25), &grid, 1e-13);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([-2.0, 0.25, 1.0]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn newton_solves_circle_line() {
        let sol = newton2(
            |p| [p[0] * p[0] + p[1] * p[1] - 4.0, p[0] - p[1]],
            [1.0, 0.5],
            1e-13,
            50,
        )
        .unwrap();
        assert!((sol[0] - 2f64.sqrt()).abs() < 1e-10);
        assert!((sol[1] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn grids() {
        let g = log_grid(2.0, 1e-9, 42.0, 4096);
        assert_eq!(g.len(), 4096);
        assert!((g[0] - 2.0 - 1e-9).abs() < 1e-15);
        assert!((g[4095] - 42.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(linspace(1.0, 5.0, 1), vec![1.0]);
    }
}
