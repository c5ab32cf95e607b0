use proptest::prelude::*;

use ricker_core::periodic::{g_maps, witness_box};
use ricker_core::sweep::{read_sweep_csv, write_sweep_csv};
use ricker_core::*;

fn tail_spread(orbit: &[f64], target: f64) -> f64 {
    orbit.iter().map(|x| (x - target).abs()).fold(0.0, f64::max)
}

#[test]
fn sweep_bytes_independent_of_thread_count() {
    let spec = SweepSpec::Constant {
        h: Axis::new(0.2, 6.0, 13).unwrap(),
        r: Axis::new(0.2, 5.0, 11).unwrap(),
    };
    let render = |threads| {
        let cells = run_sweep(&spec, threads).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&cells, false, &mut buf).unwrap();
        buf
    };
    let one = render(Some(1));
    assert_eq!(one, render(Some(3)));
    assert_eq!(one, render(None));

    let (cells, periodic) = read_sweep_csv(one.as_slice()).unwrap();
    assert!(!periodic);
    let mut again = Vec::new();
    write_sweep_csv(&cells, false, &mut again).unwrap();
    assert_eq!(one, again);
}

#[test]
fn periodic_sweep_rows_are_row_major() {
    let spec = SweepSpec::Periodic {
        r: 1.0,
        h0: Axis::new(0.5, 3.0, 4).unwrap(),
        h1: Axis::new(0.5, 3.0, 3).unwrap(),
    };
    let cells = run_sweep(&spec, Some(2)).unwrap();
    assert_eq!(cells.len(), 12);
    for (k, cell) in cells.iter().enumerate() {
        let (i, j) = (k / 3, k % 3);
        assert_eq!(cell.h0, spec_value(0.5, 3.0, 4, i));
        assert_eq!(cell.h1, Some(spec_value(0.5, 3.0, 3, j)));
        if cell.h0.min(cell.h1.unwrap()) < 1.0 {
            assert_eq!(cell.verdict, "NotApplicable");
        }
    }
}

fn spec_value(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    Axis::new(lo, hi, n).unwrap().values()[i]
}

#[test]
fn globally_stable_orbits_reach_the_two_cycle() {
    let p = ModelParams::two_periodic(1.0, 2.0, 1.5).unwrap();
    let rep = solve_two_cycle(&p).unwrap();
    assert_eq!(
        certify_periodic(&p).unwrap().verdict,
        Verdict::GloballyStable
    );
    for (x0, xm1) in [(0.1, 9.0), (5.0, 5.0), (12.0, 0.3)] {
        let orbit = simulate(&p, x0, xm1, 4000).unwrap();
        // orbit[k] is x_{k+1}: odd k holds even-indexed terms
        let even: Vec<f64> = orbit[3000..].iter().skip(1).step_by(2).copied().collect();
        let odd: Vec<f64> = orbit[3000..].iter().step_by(2).copied().collect();
        assert!(tail_spread(&even, rep.z0) < 1e-8);
        assert!(tail_spread(&odd, rep.z1) < 1e-8);
    }
}

#[test]
fn orbit_stays_between_g10_corner_orbits() {
    let p = ModelParams::two_periodic(1.2, 3.0, 1.6).unwrap();
    let region = witness_box(&p).unwrap();
    let g10 = build_g10(p.component(0), p.component(1));
    let (mut lo, mut hi) = (region.lower_corner(), region.upper_corner());
    // start on the diagonal inside the box
    let (mut x, mut y) = (
        0.5 * (region.a + region.b),
        region.a + 0.25 * (region.b - region.a),
    );
    for _ in 0..300 {
        let q = QuadPoint::new(x, y, x, y);
        assert!(se_leq(&lo, &q) || lo.dist_sup(&q) < 1e-9);
        assert!(se_leq(&q, &hi) || hi.dist_sup(&q) < 1e-9);
        let x1 = p.apply(0, x, y);
        let x2 = p.apply(1, x1, x);
        (x, y) = (x2, x1);
        lo = g10.apply(lo);
        hi = g10.apply(hi);
    }
}

#[test]
fn g_maps_bound_the_witness() {
    let p = ModelParams::two_periodic(1.0, 3.0, 2.0).unwrap();
    let region = witness_box(&p).unwrap();
    let (g1, g2) = g_maps(region.a, &p).unwrap();
    assert!(region.b >= g1.min(g2));
    check_box_compatible(&build_g10(p.component(0), p.component(1)), &region).unwrap();
}

#[test]
fn single_precision_tracks_double() {
    let p64 = ModelParams::constant(1.5, 0.8).unwrap();
    let p32 = ModelParams32::constant(1.5, 0.8).unwrap();
    let a = simulate(&p64, 1.0, 2.0, 40).unwrap();
    let b = simulate(&p32, 1.0f32, 2.0f32, 40).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - *y as f64).abs() < 1e-3 * (1.0 + x.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_verdict_matches_orbits(h in 0.3f64..8.0, frac in 0.05f64..1.0) {
        let th = thresholds(h).unwrap();
        prop_assume!(th.r2 > 0.05);
        let p = ModelParams::constant(frac * th.r2, h).unwrap();
        let c = certify_constant(&p).unwrap();
        prop_assert_eq!(c.verdict, Verdict::GloballyStable);
        let y_bar = solve_equilibrium(&p).unwrap().y_bar;
        let orbit = simulate(&p, 0.05, 3.0 * h + 1.0, 6000).unwrap();
        prop_assert!(tail_spread(&orbit[5900..], y_bar) < 1e-6);
    }

    #[test]
    fn square_bounds_contain_tails(h in 1.5f64..8.0, t in 0.05f64..0.95, x0 in 0.1f64..20.0) {
        let th = thresholds(h).unwrap();
        let r = th.r2 + t * (h - th.r2);
        let p = ModelParams::constant(r, h).unwrap();
        let c = certify_constant(&p).unwrap();
        if let Some(bounds) = c.verdict.bounds() {
            let orbit = simulate(&p, x0, 1.0, 5000).unwrap();
            prop_assert!(bounds.contains_tail(&orbit[4000..], 4001, 1e-6), "{:?}", bounds);
        }
    }

    #[test]
    fn unstable_tag_iff_above_r1(h in 0.05f64..10.0, r in 0.05f64..8.0) {
        let th = thresholds(h).unwrap();
        prop_assume!((r - th.r1).abs() > 1e-6);
        let c = certify_constant(&ModelParams::constant(r, h).unwrap()).unwrap();
        prop_assert_eq!(c.verdict.tag() == "Unstable", r > th.r1);
    }
}
