//! Metric and group-invariance properties of the geodesic distances, checked
//! on randomly sampled points.

use geomds::linalg::{det, norm2, Mat};
use geomds::{
    distance, geodesic_walk, pairwise_distances, random_point, so_exp, so_log, sphere_distance,
    ManifoldKind, ManifoldPoint, PointData,
};
use proptest::prelude::*;

const KINDS: [ManifoldKind; 4] = [
    ManifoldKind::SpecialOrthogonal(4),
    ManifoldKind::UnitSphere(3),
    ManifoldKind::SymmetricPositiveDefinite(3),
    ManifoldKind::SpecialUnitary(3),
];

#[test]
fn metric_axioms_on_sampled_triples() {
    for kind in KINDS {
        for t in 0..200u64 {
            let base = 10_000 * t;
            let x = random_point(kind, base).unwrap();
            let y = random_point(kind, base + 1).unwrap();
            let z = random_point(kind, base + 2).unwrap();
            let dxy = distance(&x, &y).unwrap();
            let dyz = distance(&y, &z).unwrap();
            let dxz = distance(&x, &z).unwrap();
            assert!(dxy >= 0.0 && dyz >= 0.0 && dxz >= 0.0);
            assert!(
                dxz <= dxy + dyz + 1e-9,
                "triangle inequality violated on {kind:?}: {dxz} > {dxy} + {dyz}"
            );
            // identity of indiscernibles, both directions; arccos and the
            // log maps leave rounding-level residue at coincident points
            assert!(distance(&x, &x).unwrap() <= 1e-7);
            assert!(dxy > 1e-6, "distinct samples should be well separated");
        }
    }
}

#[test]
fn pairwise_matrix_is_exactly_symmetric() {
    for kind in KINDS {
        let pts: Vec<ManifoldPoint> = (0..6).map(|s| random_point(kind, s + 40).unwrap()).collect();
        let d = pairwise_distances(&pts).unwrap();
        for i in 0..6 {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..6 {
                assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }
}

#[test]
fn so_distance_matches_rodrigues_oracle_on_so3() {
    // independent oracle on SO(3): a rotation has a single angle theta with
    // tr(r) = 1 + 2 cos(theta), and the geodesic distance is sqrt(2) * theta
    let kind = ManifoldKind::SpecialOrthogonal(3);
    for s in 0..50u64 {
        let x = random_point(kind, 3 * s).unwrap();
        let y = random_point(kind, 3 * s + 1).unwrap();
        let r = x
            .as_real()
            .unwrap()
            .transpose()
            .matmul(y.as_real().unwrap());
        let tr = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
        let theta = ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
        let oracle = 2f64.sqrt() * theta;
        let d = distance(&x, &y).unwrap();
        assert!(
            (d - oracle).abs() <= 1e-9 * (1.0 + oracle),
            "seed {s}: {d} vs oracle {oracle}"
        );
    }
}

#[test]
fn so_bi_invariance() {
    let kind = ManifoldKind::SpecialOrthogonal(4);
    for s in 0..40u64 {
        let r = random_point(kind, 7000 + 3 * s).unwrap();
        let x = random_point(kind, 7001 + 3 * s).unwrap();
        let y = random_point(kind, 7002 + 3 * s).unwrap();
        let d = distance(&x, &y).unwrap();
        let rm = r.as_real().unwrap();
        let left = |p: &ManifoldPoint| {
            ManifoldPoint::new(kind, PointData::Real(rm.matmul(p.as_real().unwrap()))).unwrap()
        };
        let right = |p: &ManifoldPoint| {
            ManifoldPoint::new(kind, PointData::Real(p.as_real().unwrap().matmul(rm))).unwrap()
        };
        let dl = distance(&left(&x), &left(&y)).unwrap();
        let dr = distance(&right(&x), &right(&y)).unwrap();
        assert!((dl - d).abs() <= 1e-9, "left invariance: {dl} vs {d}");
        assert!((dr - d).abs() <= 1e-9, "right invariance: {dr} vs {d}");
    }
}

#[test]
fn spd_affine_invariance() {
    let kind = ManifoldKind::SymmetricPositiveDefinite(3);
    for s in 0..40u64 {
        let x = random_point(kind, 9000 + 3 * s).unwrap();
        let y = random_point(kind, 9001 + 3 * s).unwrap();
        let d = distance(&x, &y).unwrap();
        // random well-conditioned congruence a . a^T
        let g = random_point(ManifoldKind::SpecialOrthogonal(3), 9002 + 3 * s).unwrap();
        let a = g.as_real().unwrap().add(&Mat::identity(3).scale(0.5));
        assert!(det(&a).abs() > 1e-6);
        let congr = |p: &ManifoldPoint| {
            let m = a
                .matmul(p.as_real().unwrap())
                .matmul(&a.transpose())
                .symmetrize();
            ManifoldPoint::new(kind, PointData::Real(m)).unwrap()
        };
        let dt = distance(&congr(&x), &congr(&y)).unwrap();
        assert!(
            (dt - d).abs() <= 1e-8 * (1.0 + d),
            "affine invariance: {dt} vs {d}"
        );
    }
}

#[test]
fn so_log_exp_round_trip_away_from_cut_locus() {
    let kind = ManifoldKind::SpecialOrthogonal(4);
    for s in 0..40u64 {
        let x = random_point(kind, 100 + 2 * s).unwrap();
        let y = random_point(kind, 101 + 2 * s).unwrap();
        let omega = so_log(&x, &y).unwrap();
        let back = so_exp(&x, &omega).unwrap();
        let err = back
            .as_real()
            .unwrap()
            .sub(y.as_real().unwrap())
            .max_abs();
        assert!(err <= 1e-9, "round trip error {err} at seed {s}");
    }
}

#[test]
fn geodesic_walk_steps_shrink() {
    let pts = geodesic_walk(ManifoldKind::SpecialOrthogonal(5), 30, 0.4, 0.9, 17).unwrap();
    let gaps: Vec<f64> = pts
        .windows(2)
        .map(|w| distance(&w[0], &w[1]).unwrap())
        .collect();
    for (k, pair) in gaps.windows(2).enumerate() {
        assert!(
            pair[1] < pair[0],
            "step {k}: gap grew from {} to {}",
            pair[0],
            pair[1]
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sphere_distance_stays_in_range(raw in prop::collection::vec(-1e3f64..1e3, 3), raw2 in prop::collection::vec(-1e3f64..1e3, 3)) {
        let nx = norm2(&raw);
        let ny = norm2(&raw2);
        prop_assume!(nx > 1e-3 && ny > 1e-3);
        let x: Vec<f64> = raw.iter().map(|v| v / nx).collect();
        let y: Vec<f64> = raw2.iter().map(|v| v / ny).collect();
        let d = sphere_distance(&x, &y).unwrap();
        prop_assert!((0.0..=std::f64::consts::PI).contains(&d));
        // antipodal and identical points exercise the clamp
        let d_self = sphere_distance(&x, &x).unwrap();
        prop_assert!((0.0..1e-6).contains(&d_self));
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let d_anti = sphere_distance(&x, &neg).unwrap();
        prop_assert!(d_anti <= std::f64::consts::PI);
        prop_assert!(d_anti > std::f64::consts::PI - 1e-6);
    }
}
