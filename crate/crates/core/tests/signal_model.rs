use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use sonarknot::*;

/// Straight transcription of the point-scatterer echo sum, kept free of the
/// library's types so it can serve as an oracle. Points are `(a, r, alpha)`.
fn oracle(points: &[(f64, f64, f64)], big_r: f64, c: f64, theta: f64, f: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for &(a, r, alpha) in points {
        let d = alpha - theta;
        let ph = -2.0 * PI * f * r * d.cos() / c;
        let den = ((r * d.sin()).powi(2) + (big_r + r * d.cos()).powi(2)).sqrt();
        re += a * ph.cos() / den;
        im += a * ph.sin() / den;
    }
    (re, im)
}

fn fold_points(fold: u32, alpha: f64) -> Vec<(f64, f64, f64)> {
    (1..=fold)
        .map(|p| (1.0, 1.0, alpha + TAU * p as f64 / fold as f64))
        .collect()
}

fn two_three(beta_deg: f64) -> TargetModel {
    TargetModel::knot_pair(2, 3, beta_deg.to_radians()).unwrap()
}

#[test]
fn centred_scatterer_is_amplitude_over_standoff() {
    let s = PointScatterer::new(Complex64::new(0.7, -0.2), 0.0, 1.3).unwrap();
    let g = Geometry::default();
    for (theta, f) in [(0.0, 100.0), (2.5, 737.0), (5.9, 1000.0)] {
        let v = eval_point_scatterers(&[s], &g, theta, f).unwrap();
        assert_eq!(v, Complex64::new(0.7, -0.2) / 100.0);
    }
}

#[test]
fn two_fold_composite_matches_oracle() {
    let g = Geometry::new(10.0, 1500.0).unwrap();
    let comp = CompositeScatterer::symmetric(2, 0.0).unwrap();
    let v = eval_point_scatterers(&comp.expand(), &g, 0.3, 300.0).unwrap();
    let (re, im) = oracle(&fold_points(2, 0.0), 10.0, 1500.0, 0.3, 300.0);
    assert!((v.re - re).abs() < 1e-15 && (v.im - im).abs() < 1e-15);
    // frozen from the oracle
    assert!((v - Complex64::new(0.0730095304221666, 0.017951786024743066)).norm() < 1e-15);
    let opposite = eval_point_scatterers(&comp.expand(), &g, 0.3 + PI, 300.0).unwrap();
    assert!((v - opposite).norm() < 1e-15);
}

#[test]
fn two_three_target_matches_oracle() {
    let g = Geometry::default();
    let v = eval_target(&two_three(28.0), &g, 0.0, 300.0).unwrap();
    let mut pts = fold_points(2, 0.0);
    pts.extend(fold_points(3, 28f64.to_radians()));
    let (re, im) = oracle(&pts, 100.0, 1500.0, 0.0, 300.0);
    assert!((v.re - re).abs() < 1e-15 && (v.im - im).abs() < 1e-15);
    assert!((v - Complex64::new(0.025466358241527903, 0.0005782385045511335)).norm() < 1e-15);
}

#[test]
fn full_grid_matches_oracle() {
    let g = Geometry::default();
    let angles = uniform_angles(720);
    let freqs = linspace(100.0, 1000.0, 64);
    let sig = render_signature(&two_three(28.0), &g, &angles, &freqs).unwrap();
    assert_eq!((sig.pulses(), sig.n_freqs()), (720, 64));
    let mut pts = fold_points(2, 0.0);
    pts.extend(fold_points(3, 28f64.to_radians()));
    let mut worst: f64 = 0.0;
    for (i, &theta) in angles.iter().enumerate() {
        for (j, &f) in freqs.iter().enumerate() {
            let (re, im) = oracle(&pts, 100.0, 1500.0, theta, f);
            worst = worst.max((sig.get(i, j) - Complex64::new(re, im)).norm());
        }
    }
    assert!(worst <= 1e-12, "worst deviation {worst:e}");
}

#[test]
fn single_cell_grid() {
    let g = Geometry::default();
    let t = two_three(28.0);
    let sig = render_signature(&t, &g, &[1.1], &[450.0]).unwrap();
    assert_eq!(sig.get(0, 0), eval_target(&t, &g, 1.1, 450.0).unwrap());
}

#[test]
fn three_fold_rows_repeat_every_third_of_a_turn() {
    let t = TargetModel::from_composites(vec![CompositeScatterer::symmetric(3, 0.4).unwrap()]);
    let sig = render_signature(&t, &Geometry::default(), &uniform_angles(360), &linspace(100.0, 1000.0, 16)).unwrap();
    for i in 0..360 {
        for j in 0..16 {
            assert!((sig.get(i, j) - sig.get((i + 120) % 360, j)).norm() < 1e-10);
        }
    }
}

#[test]
fn one_composite_target_equals_its_expansion() {
    let comp = CompositeScatterer::new(5, Complex64::new(0.3, 0.9), 2.0, 0.1).unwrap();
    let t = TargetModel::from_composites(vec![comp]);
    let g = Geometry::default();
    for theta in [0.0, 1.0, 4.0] {
        assert_eq!(
            eval_target(&t, &g, theta, 640.0).unwrap(),
            eval_point_scatterers(&comp.expand(), &g, theta, 640.0).unwrap()
        );
    }
}

#[test]
fn radius_at_or_beyond_standoff_is_rejected() {
    let g = Geometry::default();
    for r in [100.0, 150.0] {
        let s = PointScatterer::new(Complex64::new(1.0, 0.0), r, 0.0).unwrap();
        assert!(eval_point_scatterers(&[s], &g, 0.0, 300.0).is_err());
    }
    assert!(eval_target(&two_three(28.0), &g, f64::NAN, 300.0).is_err());
}

#[test]
fn oversized_grid_is_rejected() {
    let angles = uniform_angles(20_000);
    let freqs = linspace(1.0, 2.0, 10_000);
    assert!(render_signature(&two_three(28.0), &Geometry::default(), &angles, &freqs).is_err());
}

#[test]
fn torus_origin_is_sum_of_composites_at_zero() {
    let g = Geometry::default();
    let a = CompositeScatterer::symmetric(2, 0.0).unwrap();
    let b = CompositeScatterer::symmetric(3, 0.0).unwrap();
    let u = render_torus_function(&a, &b, &g, 300.0, (64, 64)).unwrap();
    let expect = eval_composite(&a, &g, 0.0, 300.0).unwrap() + eval_composite(&b, &g, 0.0, 300.0).unwrap();
    assert!((u.at(0, 0) - expect).norm() < 1e-15);
}

#[test]
fn relative_angle_is_an_exact_roll() {
    let g = Geometry::default();
    let a = CompositeScatterer::symmetric(2, 0.0).unwrap();
    let cols = 120;
    // a z shift of k cells is a reference-angle change of 2πk / (3 cols)
    let k = 20;
    let beta = TAU * k as f64 / (3.0 * cols as f64);
    let u0 = render_torus_function(&a, &CompositeScatterer::symmetric(3, 0.0).unwrap(), &g, 300.0, (64, cols)).unwrap();
    let ub = render_torus_function(&a, &CompositeScatterer::symmetric(3, beta).unwrap(), &g, 300.0, (64, cols)).unwrap();
    let rolled = u0.rolled(0, k as isize);
    for (x, y) in rolled.values().iter().zip(ub.values()) {
        assert!((x - y).norm() < 1e-14);
    }
}

/// Largest bilinear-resampling error of the (2,3) line on a square grid.
fn knot_line_error(grid: usize) -> (f64, f64) {
    let g = Geometry::default();
    let t = two_three(28.0);
    let u = render_torus_function(&t.composites[0], &t.composites[1], &g, 300.0, (grid, grid)).unwrap();
    let angles = uniform_angles(512);
    let sig = render_signature(&t, &g, &angles, &[300.0]).unwrap();
    let err = angles
        .iter()
        .enumerate()
        .map(|(i, &th)| (u.interpolate(2.0 * th, 3.0 * th) - sig.get(i, 0)).norm())
        .fold(0.0, f64::max);
    (err, u.interpolation_bound())
}

#[test]
fn knot_line_resampling_converges_quadratically() {
    let errs: Vec<(f64, f64)> = [32, 64, 128, 256].iter().map(|&n| knot_line_error(n)).collect();
    for (e, b) in &errs {
        assert!(e <= b, "error {e:e} above bound {b:e}");
    }
    for w in errs.windows(2) {
        let ratio = w[0].0 / w[1].0;
        assert!(ratio > 3.0, "halving the spacing only cut the error by {ratio}");
    }
}

fn arb_point() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.0..20.0f64, 0.0..TAU, 0.0..TAU)
}

proptest! {
    #[test]
    fn composite_is_periodic(fold in 1u32..8, alpha in 0.0..TAU, r in 0.0..30.0f64,
                             theta in 0.0..TAU, f in 50.0..1500.0f64) {
        let comp = CompositeScatterer::new(fold, Complex64::new(1.0, 0.5), r, alpha).unwrap();
        let g = Geometry::default();
        let a = eval_composite(&comp, &g, theta, f).unwrap();
        let b = eval_composite(&comp, &g, theta + TAU / fold as f64, f).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn union_is_sum_of_parts(pts in prop::collection::vec(arb_point(), 1..12), split in 0usize..12,
                             theta in 0.0..TAU, f in 50.0..1500.0f64) {
        let g = Geometry::default();
        let all: Vec<PointScatterer> = pts
            .iter()
            .map(|&(re, im, r, a, _)| PointScatterer::new(Complex64::new(re, im), r, a).unwrap())
            .collect();
        let k = split.min(all.len());
        let whole = eval_point_scatterers(&all, &g, theta, f).unwrap();
        let parts = eval_point_scatterers(&all[..k], &g, theta, f).unwrap()
            + eval_point_scatterers(&all[k..], &g, theta, f).unwrap();
        let scale: f64 = all.iter().map(|s| s.amplitude.norm()).sum::<f64>() / 80.0;
        prop_assert!((whole - parts).norm() <= 1e-12 * (scale + whole.norm()));
    }

    #[test]
    fn amplitudes_scale_linearly(k_re in -3.0..3.0f64, k_im in -3.0..3.0f64,
                                 theta in 0.0..TAU, f in 50.0..1500.0f64) {
        let g = Geometry::default();
        let t = two_three(28.0);
        let k = Complex64::new(k_re, k_im);
        let a = eval_target(&t.scaled(k), &g, theta, f).unwrap();
        let b = eval_target(&t, &g, theta, f).unwrap() * k;
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn rotating_target_shifts_look_angle(pts in prop::collection::vec(arb_point(), 1..8),
                                         delta in -PI..PI, theta in 0.0..TAU, f in 50.0..1500.0f64) {
        let g = Geometry::default();
        let make = |rot: f64| -> Vec<PointScatterer> {
            pts.iter()
                .map(|&(re, im, r, a, _)| PointScatterer::new(Complex64::new(re, im), r, a + rot).unwrap())
                .collect()
        };
        let rotated = eval_point_scatterers(&make(delta), &g, theta, f).unwrap();
        let shifted = eval_point_scatterers(&make(0.0), &g, theta - delta, f).unwrap();
        prop_assert!((rotated - shifted).norm() <= 1e-11);
    }
}
