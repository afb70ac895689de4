mod common;

use std::f64::consts::LN_2;

use common::*;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use spinscatter::analysis::*;
use spinscatter::quantum::*;
use spinscatter::scattering::*;

/// Semi-axes and center of the ellipsoid through `points`, from a
/// least-squares fit of a general centred quadric.
fn quadric_fit(points: &[BlochVector]) -> ([f64; 3], Vector3<f64>) {
    let rows: Vec<[f64; 9]> = points
        .iter()
        .map(|p| {
            let (x, y, z) = (p.x, p.y, p.z);
            [x * x, y * y, z * z, 2.0 * x * y, 2.0 * x * z, 2.0 * y * z, 2.0 * x, 2.0 * y, 2.0 * z]
        })
        .collect();
    let a = DMatrix::from_fn(rows.len(), 9, |i, j| rows[i][j]);
    let b = DVector::from_element(rows.len(), 1.0);
    let q = a.svd(true, true).solve(&b, 1e-14).unwrap();
    let a0 = Matrix3::new(q[0], q[3], q[4], q[3], q[1], q[5], q[4], q[5], q[2]);
    let g = Vector3::new(q[6], q[7], q[8]);
    let center = -a0.try_inverse().unwrap() * g;
    let k = 1.0 + center.dot(&(a0 * center));
    let eig = a0.symmetric_eigen();
    let mut axes: Vec<f64> = eig.eigenvalues.iter().map(|l| (k / l).sqrt()).collect();
    axes.sort_by(|a, b| b.total_cmp(a));
    ([axes[0], axes[1], axes[2]], center)
}

#[test]
fn ellipsoid_axes_match_quadric_fit() {
    let mut r = rng(70);
    let grid = BlochGrid::fibonacci(400).unwrap();
    let mut checked = 0;
    while checked < 100 {
        let chi = random_process(&mut r);
        let s = ellipsoid_summary(&chi).unwrap();
        // Oracle on the singular values: square roots of the spectrum of M Mᵀ.
        let m = chi_to_affine(&chi).linear;
        let mut sv: Vec<f64> = (m * m.transpose()).symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for k in 0..3 {
            assert!((s.semi_axes[k] - sv[k]).abs() < 1e-9);
        }
        let d = s.principal_matrix();
        assert!((d.transpose() * d - Matrix3::identity()).norm() < 1e-9);
        if s.semi_axes[2] < 0.05 {
            continue;
        }
        let (axes, center) = quadric_fit(&collapse_surface(&chi, &grid).unwrap());
        for k in 0..3 {
            assert!((axes[k] - s.semi_axes[k]).abs() < 1e-3, "{axes:?} vs {:?}", s.semi_axes);
        }
        assert!((center - Vector3::from(s.center)).norm() < 1e-3);
        checked += 1;
    }
}

#[test]
fn collapse_images_stay_in_ball() {
    let mut r = rng(71);
    let grid = BlochGrid::fibonacci(256).unwrap();
    for _ in 0..100 {
        let chi = random_process(&mut r);
        for p in collapse_surface(&chi, &grid).unwrap() {
            assert!(p.norm() <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn full_window_collapses_to_equatorial_disk() {
    let g = ScatteringGeometry::default().with_window_degrees(360.0);
    let chi = chi_averaged(&g, &AveragingOptions::default()).unwrap().chi;
    let s = ellipsoid_summary(&chi).unwrap();
    assert!((s.in_plane_aspect_ratio.unwrap() - 1.0).abs() < 0.02);
    assert!(s.semi_axes[2] < 0.05);
    for p in collapse_surface(&chi, &BlochGrid::default()).unwrap() {
        assert!(p.z.abs() < 0.05);
    }
}

#[test]
fn main_axis_follows_phase_center() {
    for deg in [0.0f64, 30.0, 60.0, 90.0, -45.0] {
        let g = ScatteringGeometry { phase_center: deg.to_radians(), ..Default::default() };
        let chi = chi_averaged(&g, &AveragingOptions::default()).unwrap().chi;
        let az = ellipsoid_summary(&chi).unwrap().main_axis_azimuth.to_degrees();
        let diff = ((az - deg).rem_euclid(180.0) + 90.0).rem_euclid(180.0) - 90.0;
        assert!(diff.abs() < 0.5, "{deg}: {az}");
    }
}

#[test]
fn degenerate_window_is_a_segment() {
    let g = ScatteringGeometry { numerical_aperture: 1e-9, phase_halfwidth: 0.0, ..Default::default() };
    let s = ellipsoid_summary(&chi_averaged(&g, &AveragingOptions::default()).unwrap().chi).unwrap();
    assert!((s.semi_axes[0] - 1.0).abs() < 1e-9 && s.semi_axes[1] < 1e-9);
    assert!(s.is_unbounded());
}

#[test]
fn in_plane_ratio_matches_sinc_law() {
    // Uniform measure over the window: ratio (1 + sinc w)/(1 − sinc w).
    let g = ScatteringGeometry::default();
    let widths = [11.25, 40.0, 60.0, 100.0, 140.0, 180.0];
    let sweep = aspect_ratio_sweep(&widths, &g, &AveragingOptions::quadrature(256)).unwrap();
    for p in &sweep {
        let w = p.width_deg.to_radians();
        let s = w.sin() / w;
        let expected = (1.0 + s) / (1.0 - s);
        assert!((p.ratio.unwrap() / expected - 1.0).abs() < 1e-3, "{p:?} vs {expected}");
    }
    check_monotone(&sweep, MONOTONE_LIMIT_DEG).unwrap();
}

#[test]
fn entropy_and_concurrence_maps_agree_on_pointer_structure() {
    let map = JointScatteringMap::ideal();
    let inputs = spinscatter::tomography::TomographyInputSet::standard();
    let outs = inputs.states().clone().map(|s| map.apply(&s).partial_trace(Subsystem::Spin));
    let chi = spinscatter::tomography::reconstruct_process(&inputs, &outs).unwrap();
    let grid = BlochGrid::fibonacci(512).unwrap();
    let ent = entropy_map(&chi, &grid).unwrap();
    let conc = concurrence_map(&map, &NoiseModel::noiseless(), &grid).unwrap();
    for (e, c) in ent.iter().zip(&conc) {
        assert_eq!(e.point, c.point);
        assert!(e.value >= -1e-12 && e.value <= LN_2 + 1e-12);
        if c.value < 0.01 {
            assert!(e.value < 0.01);
        }
        if e.point.x.abs() < 1e-9 {
            assert!((c.value - 1.0).abs() < 1e-9 && (e.value - LN_2).abs() < 1e-9);
        }
        // Pure-state concurrence is |⟨x̂|ψ⟩⟨−x̂|ψ⟩|·2 = √(1 − x²).
        assert!((c.value - (1.0 - e.point.x.powi(2)).max(0.0).sqrt()).abs() < 1e-6);
    }
}

#[test]
fn averaged_entropy_minimum_near_pointer_axis() {
    let chi = chi_averaged(&ScatteringGeometry::default(), &AveragingOptions::default()).unwrap().chi;
    let grid = BlochGrid::default();
    let e = entropy_map(&chi, &grid).unwrap();
    let min = argmin(&e).unwrap();
    let d = min.point.distance(&BlochVector::new(1.0, 0.0, 0.0)).min(min.point.distance(&BlochVector::new(-1.0, 0.0, 0.0)));
    assert!(d <= grid.spacing());
}

#[test]
fn maps_are_deterministic_and_ordered() {
    let map = JointScatteringMap::averaged(&ScatteringGeometry::default(), &AveragingOptions::quadrature(8)).unwrap();
    let grid = BlochGrid::fibonacci(300).unwrap();
    let a = concurrence_map(&map, &NoiseModel::default(), &grid).unwrap();
    let b = concurrence_map(&map, &NoiseModel::default(), &grid).unwrap();
    assert_eq!(a, b);
    for (p, g) in a.iter().zip(grid.points()) {
        assert_eq!(&p.point, g);
    }
}
