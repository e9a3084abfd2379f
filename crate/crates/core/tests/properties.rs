//! Property-based invariants across the backends.

use geodesic_minimax::geometry::{check_cn_inequality, check_quadrilateral_cs, Point, Space};
use geodesic_minimax::problems::library_entry;
use geodesic_minimax::spaces::{EuclideanSpace, MetricTree, PoincareBall};
use proptest::prelude::*;

fn plane() -> Space {
    Space::Euclidean(EuclideanSpace::unconstrained(2))
}

fn disk() -> Space {
    Space::Poincare(PoincareBall::new(2))
}

fn star() -> Space {
    Space::Tree(MetricTree::new(4, &[(0, 3, 1.0), (1, 3, 1.0), (2, 3, 2.0)]).unwrap())
}

prop_compose! {
    fn plane_point()(x in -5.0f64..5.0, y in -5.0f64..5.0) -> Point {
        Point::vector([x, y])
    }
}

prop_compose! {
    // Coordinates in [−0.6, 0.6] keep the norm below the 0.85 sampling cap.
    fn disk_point()(x in -0.6f64..0.6, y in -0.6f64..0.6) -> Point {
        Point::vector([x, y])
    }
}

prop_compose! {
    fn star_point()(edge in 0usize..3, frac in 0.0f64..1.0) -> Point {
        let len = if edge == 2 { 2.0 } else { 1.0 };
        Point::tree(edge, frac * len)
    }
}

fn metric_axioms(space: &Space, p: &Point, q: &Point, r: &Point) {
    let dpq = space.distance(p, q).unwrap();
    let dqp = space.distance(q, p).unwrap();
    assert!((dpq - dqp).abs() <= 1e-12);
    assert!(dpq >= 0.0);
    let dpr = space.distance(p, r).unwrap();
    let dqr = space.distance(q, r).unwrap();
    assert!(dpr <= dpq + dqr + 1e-9);
}

fn geodesic_law(space: &Space, p: &Point, q: &Point, s: f64, t: f64, tol: f64) {
    let d = space.distance(p, q).unwrap();
    let gs = space.geodesic_point(p, q, s).unwrap();
    let gt = space.geodesic_point(p, q, t).unwrap();
    let dst = space.distance(&gs, &gt).unwrap();
    assert!((dst - (s - t).abs() * d).abs() <= tol, "offset {}", dst - (s - t).abs() * d);
}

proptest! {
    #[test]
    fn euclidean_metric_axioms(p in plane_point(), q in plane_point(), r in plane_point()) {
        metric_axioms(&plane(), &p, &q, &r);
    }

    #[test]
    fn poincare_metric_axioms(p in disk_point(), q in disk_point(), r in disk_point()) {
        metric_axioms(&disk(), &p, &q, &r);
    }

    #[test]
    fn tree_metric_axioms(p in star_point(), q in star_point(), r in star_point()) {
        metric_axioms(&star(), &p, &q, &r);
    }

    #[test]
    fn euclidean_geodesic_law(
        p in plane_point(), q in plane_point(),
        s in 0.0f64..1.0, t in 0.0f64..1.0,
    ) {
        geodesic_law(&plane(), &p, &q, s, t, 1e-9);
    }

    #[test]
    fn poincare_geodesic_law(
        p in disk_point(), q in disk_point(),
        s in 0.0f64..1.0, t in 0.0f64..1.0,
    ) {
        geodesic_law(&disk(), &p, &q, s, t, 1e-7);
    }

    #[test]
    fn tree_geodesic_law(
        p in star_point(), q in star_point(),
        s in 0.0f64..1.0, t in 0.0f64..1.0,
    ) {
        geodesic_law(&star(), &p, &q, s, t, 1e-9);
    }

    #[test]
    fn cn_inequality_everywhere(
        p in disk_point(), q in disk_point(), z in disk_point(),
        tp in star_point(), tq in star_point(), tz in star_point(),
        alpha in 0.0f64..=1.0,
    ) {
        prop_assert!(check_cn_inequality(&disk(), &p, &q, &z, alpha).unwrap() <= 1e-7);
        prop_assert!(check_cn_inequality(&star(), &tp, &tq, &tz, alpha).unwrap() <= 1e-9);
    }

    #[test]
    fn quadrilateral_cs_everywhere(
        p1 in plane_point(), p2 in plane_point(), p3 in plane_point(), p4 in plane_point(),
        h1 in disk_point(), h2 in disk_point(), h3 in disk_point(), h4 in disk_point(),
    ) {
        prop_assert!(check_quadrilateral_cs(&plane(), &p1, &p2, &p3, &p4).unwrap() <= 1e-9);
        prop_assert!(check_quadrilateral_cs(&disk(), &h1, &h2, &h3, &h4).unwrap() <= 1e-7);
    }

    #[test]
    fn bifunction_is_antisymmetric(
        zx in -2.0f64..2.0, zy in -2.0f64..2.0,
        wx in -2.0f64..2.0, wy in -2.0f64..2.0,
    ) {
        use geodesic_minimax::geometry::ProductPoint;
        let entry = library_entry("bilinear").unwrap();
        let z = ProductPoint::new(Point::vector([zx]), Point::vector([zy]));
        let w = ProductPoint::new(Point::vector([wx]), Point::vector([wy]));
        let fw = entry.problem.bifunction(&z, &w).unwrap();
        let bw = entry.problem.bifunction(&w, &z).unwrap();
        prop_assert!((fw + bw).abs() <= 1e-12);
        prop_assert!(entry.problem.bifunction(&z, &z).unwrap() == 0.0);
    }

    #[test]
    fn trace_csv_floats_round_trip(v in proptest::num::f64::NORMAL) {
        // The trace format relies on shortest round-trip float printing.
        let text = format!("{v}");
        prop_assert!(text.parse::<f64>().unwrap() == v);
    }
}
