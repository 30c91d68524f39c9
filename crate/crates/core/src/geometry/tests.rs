use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::Error;

fn disk(cx: f64, cy: f64, r: f64) -> DomainSpec {
    DomainSpec::disk(Vec2::new(cx, cy), r).unwrap()
}

fn flower(eps: f64) -> DomainSpec {
    DomainSpec::fourier_disk(Vec2::ZERO, 1.0, vec![0.0, 0.0, eps], vec![]).unwrap()
}

#[test]
fn disk_signed_distance_values() {
    let g = disk(0.0, 0.0, 1.0);
    assert!((g.signed_distance(Vec2::new(2.0, 0.0)) - 1.0).abs() < 1e-12);
    assert!((g.signed_distance(Vec2::ZERO) + 1.0).abs() < 1e-12);
}

#[test]
fn ellipse_center_distance_is_minor_axis() {
    let g = DomainSpec::ellipse(Vec2::ZERO, 2.0, 1.0).unwrap();
    assert!((g.signed_distance(Vec2::ZERO) + 1.0).abs() < 1e-9);
}

#[test]
fn analytic_kinds_vanish_on_boundary() {
    let e = DomainSpec::ellipse(Vec2::new(0.3, -0.2), 2.0, 1.0).unwrap();
    let f = flower(0.1);
    for k in 0..64 {
        let t = std::f64::consts::TAU * k as f64 / 64.0;
        let pe = Vec2::new(0.3 + 2.0 * t.cos(), -0.2 + t.sin());
        assert!(e.signed_distance(pe).abs() < 1e-12, "ellipse sdf at {t}");
        let r = 1.0 + 0.1 * (3.0 * t).cos();
        let pf = Vec2::from_angle(t) * r;
        assert!(f.signed_distance(pf).abs() < 1e-10, "fourier sdf at {t}");
    }
}

#[test]
fn sdf_is_lipschitz_one() {
    let domains = [disk(0.2, -0.1, 0.8), DomainSpec::ellipse(Vec2::ZERO, 1.5, 0.7).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in &domains {
        for _ in 0..200 {
            let a = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let lhs = (g.signed_distance(a) - g.signed_distance(b)).abs();
            assert!(lhs <= a.dist(b) + 1e-9);
        }
    }
}

#[test]
fn minkowski_of_disk_is_bigger_disk() {
    let omega = minkowski_sum_ball(disk(0.0, 0.0, 1.0), 0.5).unwrap();
    let big = disk(0.0, 0.0, 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let p = Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        assert!((omega.signed_distance(p) - big.signed_distance(p)).abs() < 1e-12);
    }
}

#[test]
fn minkowski_ellipse_between_bounding_balls() {
    let g = DomainSpec::ellipse(Vec2::ZERO, 1.0, 1.05).unwrap();
    let omega = minkowski_sum_ball(g, 1.0).unwrap();
    for k in 0..360 {
        let w = Vec2::from_angle(std::f64::consts::TAU * k as f64 / 360.0);
        let support = omega.extent(w);
        assert!(support >= 2.0 - 1e-9 && support <= 2.05 + 1e-9, "support {support}");
    }
}

#[test]
fn offset_distance_is_r_on_inner_boundary() {
    let g = flower(0.1);
    let omega = minkowski_sum_ball(g.clone(), 0.3).unwrap();
    for lp in g.boundary_loops(360) {
        for p in lp {
            assert!((omega.signed_distance(p).abs() - 0.3).abs() < 2e-3);
        }
    }
}

#[test]
fn nonpositive_offset_rejected() {
    assert!(matches!(
        minkowski_sum_ball(disk(0.0, 0.0, 1.0), 0.0),
        Err(Error::NonPositiveRadius(_))
    ));
}

#[test]
fn reflect_examples() {
    let f = HyperplaneFrame::new(Vec2::new(1.0, 0.0), 0.0).unwrap();
    let r = reflect(Vec2::new(2.0, 1.0), &f);
    assert!((r - Vec2::new(-2.0, 1.0)).norm() < 1e-14);

    let on_plane = reflect(Vec2::new(0.0, 3.5), &f);
    assert!((on_plane - Vec2::new(0.0, 3.5)).norm() < 1e-14);

    let f1 = HyperplaneFrame::new(Vec2::new(1.0, 0.0), 1.0).unwrap();
    let r1 = reflect(Vec2::new(3.0, 0.0), &f1);
    assert!((r1 - Vec2::new(-1.0, 0.0)).norm() < 1e-14);
}

proptest! {
    #[test]
    fn reflect_is_an_involutive_isometry(
        x in -5.0f64..5.0, y in -5.0f64..5.0,
        u in -5.0f64..5.0, v in -5.0f64..5.0,
        theta in 0.0f64..std::f64::consts::TAU,
        lambda in -3.0f64..3.0,
    ) {
        let frame = HyperplaneFrame::new(Vec2::from_angle(theta), lambda).unwrap();
        let a = Vec2::new(x, y);
        let b = Vec2::new(u, v);
        prop_assert!((reflect(reflect(a, &frame), &frame) - a).norm() < 1e-12);
        prop_assert!((reflect(a, &frame).dist(reflect(b, &frame)) - a.dist(b)).abs() < 1e-12);
        // Midpoint coordinate identity: x·ω + x^λ·ω = 2λ.
        let s = a.dot(frame.omega) + reflect(a, &frame).dot(frame.omega);
        prop_assert!((s - 2.0 * lambda).abs() < 1e-12);
    }
}

#[test]
fn extent_examples() {
    let g = disk(0.0, 0.0, 1.0);
    for k in 0..16 {
        let w = Vec2::from_angle(std::f64::consts::TAU * k as f64 / 16.0);
        assert!((g.extent(w) - 1.0).abs() < 1e-12);
    }
    let shifted = disk(0.3, 0.0, 1.0);
    assert!((shifted.extent(Vec2::new(1.0, 0.0)) - 1.3).abs() < 1e-12);

    let e = DomainSpec::ellipse(Vec2::ZERO, 2.0, 1.0).unwrap();
    let w = Vec2::from_angle(std::f64::consts::FRAC_PI_4);
    assert!((e.extent(w) - 2.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn extent_adds_radius_under_offset() {
    let cases = [
        DomainSpec::ellipse(Vec2::new(0.1, 0.4), 1.3, 0.8).unwrap(),
        disk(-0.2, 0.5, 0.9),
    ];
    for g in cases {
        let omega = minkowski_sum_ball(g.clone(), 0.7).unwrap();
        for k in 0..32 {
            let w = Vec2::from_angle(std::f64::consts::TAU * k as f64 / 32.0);
            assert!((omega.extent(w) - g.extent(w) - 0.7).abs() < 1e-6);
        }
    }
}

#[test]
fn critical_position_of_disk_is_center() {
    let g = disk(0.0, 0.0, 1.0);
    let params = CriticalSearchParams::for_domain(&g).with_tol(1e-4);
    let cap = critical_position(&g, Vec2::new(1.0, 0.0), &params).unwrap();
    assert!(cap.critical_m.abs() < 1e-3, "m = {}", cap.critical_m);
    assert!(cap.critical_m < cap.extent);
}

#[test]
fn critical_position_translates() {
    let g = disk(0.3, 0.0, 1.0);
    let params = CriticalSearchParams::for_domain(&g).with_tol(1e-4);
    let cap = critical_position(&g, Vec2::new(1.0, 0.0), &params).unwrap();
    assert!((cap.critical_m - 0.3).abs() < 1e-3, "m = {}", cap.critical_m);
}

#[test]
fn centrally_symmetric_domains_stop_at_their_center() {
    let g = DomainSpec::ellipse(Vec2::new(0.4, -0.3), 1.2, 0.9).unwrap();
    let params = CriticalSearchParams::for_domain(&g).with_tol(1e-4);
    for k in 0..6 {
        let w = Vec2::from_angle(std::f64::consts::PI * k as f64 / 6.0);
        let cap = critical_position(&g, w, &params).unwrap();
        let expected = Vec2::new(0.4, -0.3).dot(w);
        assert!(
            (cap.critical_m - expected).abs() < 2e-3,
            "direction {k}: m = {}, expected {expected}",
            cap.critical_m
        );
    }
}

/// Brute-force λ-grid oracle for the union test case: scan the containment
/// predicate built directly on the signed distance.
#[test]
fn union_critical_position_matches_grid_scan() {
    let g = DomainSpec::union(vec![
        DomainKind::Disk(super::domain::DiskParams {
            center: Vec2::ZERO,
            radius: 1.0,
        }),
        DomainKind::Disk(super::domain::DiskParams {
            center: Vec2::new(0.8, 0.0),
            radius: 0.5,
        }),
    ])
    .unwrap();
    let omega = Vec2::new(1.0, 0.0);
    let tol = 1e-3;

    // Oracle: first failing offset on a 1e-4 grid, walking down from M.
    let m_max = g.extent(omega);
    let step = 1e-4;
    let mut oracle = f64::NEG_INFINITY;
    let mut lambda = m_max - step;
    while lambda > -g.extent(-omega) {
        if !reflected_cap_contained(&g, omega, lambda, 4096, tol) {
            oracle = lambda + step;
            break;
        }
        lambda -= step;
    }
    assert!(oracle.is_finite(), "oracle scan found no critical offset");

    let params = CriticalSearchParams {
        boundary_samples: 4096,
        containment_tol: tol,
        coarse_steps: 256,
        bisection_steps: 40,
        normal_angle_tol: 0.08,
    };
    let cap = critical_position(&g, omega, &params).unwrap();
    assert!(
        (cap.critical_m - oracle).abs() < 2e-4,
        "bisection m = {}, oracle m = {}",
        cap.critical_m,
        oracle
    );
}

#[test]
fn containment_is_monotone_above_critical() {
    let g = flower(0.08);
    let params = CriticalSearchParams::for_domain(&g).with_tol(2e-3);
    let omega = Vec2::new(1.0, 0.0);
    let cap = critical_position(&g, omega, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let a = rng.gen_range(cap.critical_m + 2e-3..cap.extent);
        assert!(
            reflected_cap_contained(&g, omega, a, 2048, 2e-3),
            "containment failed above m at {a}"
        );
    }
    // Below the critical offset, containment must fail.
    let below = cap.critical_m - 4.0 * 2e-3;
    assert!(!reflected_cap_contained(&g, omega, below, 2048, 2e-3));
}

#[test]
fn inner_containment_implies_outer_containment() {
    let g = flower(0.08);
    let omega_dir = Vec2::new(1.0, 0.0);
    let params = CriticalSearchParams::for_domain(&g).with_tol(1e-3);
    let cap = critical_position(&g, omega_dir, &params).unwrap();
    let domain = minkowski_sum_ball(g, 0.4).unwrap();
    // For λ safely above critical, reflected boundary samples of the outer
    // cap must stay inside the outer domain.
    let lambda = cap.critical_m + 0.05;
    let frame = HyperplaneFrame {
        omega: omega_dir,
        lambda,
    };
    let mut checked = 0;
    for (p, _) in domain.boundary_samples(2000) {
        if frame.height(p) > 0.0 {
            let q = reflect(p, &frame);
            assert!(
                domain.signed_distance(q) <= 2e-3,
                "outer reflected point escaped at {:?}",
                q
            );
            checked += 1;
        }
    }
    assert!(checked >= 100);
}

#[test]
fn parallel_set_of_disk_is_smaller_disk() {
    let g = disk(0.0, 0.0, 1.0);
    let ps = parallel_set(&g, 0.25).unwrap();
    let small = disk(0.0, 0.0, 0.75);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let p = Vec2::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        assert_eq!(ps.contains(p), small.contains(p), "at {p:?}");
    }
}

#[test]
fn parallel_set_at_zero_depth_is_the_domain() {
    let g = flower(0.05);
    let ps = parallel_set(&g, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let p = Vec2::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
        assert_eq!(ps.contains(p), g.contains(p));
    }
}

#[test]
fn parallel_set_connectedness_by_flood_fill() {
    let g = DomainSpec::ellipse(Vec2::ZERO, 1.0, 1.05).unwrap();
    let ps = parallel_set(&g, 0.5).unwrap();
    let mask = crate::grid::rasterize(&ps, 1.0 / 64.0).unwrap();
    // Flood fill from one inside node must reach all inside nodes.
    let inside: Vec<usize> = mask.inside_indices().collect();
    let mut seen = vec![false; mask.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[inside[0]] = true;
    queue.push_back(inside[0]);
    let mut reached = 0;
    while let Some(idx) = queue.pop_front() {
        reached += 1;
        let (i, j) = (idx % mask.nx, idx / mask.nx);
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let (ii, jj) = (i as isize + di, j as isize + dj);
            if ii < 0 || jj < 0 || ii >= mask.nx as isize || jj >= mask.ny as isize {
                continue;
            }
            let n = mask.index(ii as usize, jj as usize);
            if !seen[n] && mask.kind_at(n) != crate::grid::CellKind::Exterior {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    assert_eq!(reached, inside.len(), "parallel set is disconnected");
}

#[test]
fn parallel_set_depth_out_of_range() {
    let g = disk(0.0, 0.0, 1.0);
    assert!(matches!(
        parallel_set(&g, 1.0),
        Err(Error::DepthExceedsRho { .. })
    ));
}

#[test]
fn interior_ball_radius_closed_forms() {
    assert!((disk(0.0, 0.0, 1.0).rho() - 1.0).abs() < 1e-12);
    let e = DomainSpec::ellipse(Vec2::ZERO, 2.0, 1.0).unwrap();
    assert!((e.rho() - 0.5).abs() < 1e-12);
}

#[test]
fn interior_ball_radius_flower_against_polar_curvature() {
    let g = flower(0.05);
    // Oracle: minimum of (r² + r'²)^(3/2) / (r² + 2r'² − r·r'') over θ.
    let curve = FourierCurve {
        center: Vec2::ZERO,
        base: 1.0,
        cos_coeffs: &[0.0, 0.0, 0.05],
        sin_coeffs: &[],
    };
    let mut oracle = f64::INFINITY;
    for k in 0..4096 {
        let t = std::f64::consts::TAU * k as f64 / 4096.0;
        let rc = curve.curvature_radius(t);
        if rc > 0.0 {
            oracle = oracle.min(rc);
        }
    }
    let got = g.rho();
    assert!(
        (got - oracle).abs() / oracle < 0.1,
        "rho = {got}, curvature oracle = {oracle}"
    );
}

#[test]
fn domain_json_round_trip_and_unknown_field_rejection() {
    let json = r#"{"kind":"disk","params":{"center":[0.5,-0.25],"radius":2.0}}"#;
    let g: DomainSpec = serde_json::from_str(json).unwrap();
    assert!((g.diameter() - 4.0).abs() < 1e-12);

    let bad = r#"{"kind":"disk","params":{"center":[0.0,0.0],"radius":1.0,"radiusx":2}}"#;
    let err = serde_json::from_str::<DomainSpec>(bad).unwrap_err();
    assert!(err.to_string().contains("radiusx"), "message: {err}");

    let invalid = r#"{"kind":"fourier_disk","params":{"center":[0,0],"base_radius":1.0,"cos_coeffs":[1.5]}}"#;
    assert!(serde_json::from_str::<DomainSpec>(invalid).is_err());
}

#[test]
fn polygon_square_metrics() {
    let g = DomainSpec::polygon(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ])
    .unwrap();
    assert!((g.diameter() - 2f64.sqrt()).abs() < 1e-9);
    assert!((g.inradius() - 0.5).abs() < 0.02);
    assert!((g.signed_distance(Vec2::new(0.5, 0.5)) + 0.5).abs() < 1e-12);
    assert!((g.signed_distance(Vec2::new(2.0, 0.5)) - 1.0).abs() < 1e-12);
}

#[test]
fn centroid_of_flower_is_origin() {
    let g = flower(0.1);
    assert!(g.centroid().norm() < 1e-3);
}

#[test]
fn fourier_rotation_matches_point_rotation() {
    let g = flower(0.07);
    let angle = 0.5;
    let rotated = g.rotated_about(Vec2::ZERO, angle).unwrap();
    for k in 0..64 {
        let t = std::f64::consts::TAU * k as f64 / 64.0;
        let p = Vec2::from_angle(t) * (1.0 + 0.07 * (3.0 * t).cos());
        let q = p.rotated(angle);
        assert!(rotated.signed_distance(q).abs() < 1e-9, "at {t}");
    }
}
