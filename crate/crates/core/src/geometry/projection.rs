//! Metric projection onto geodesic segments.

use super::{GeometryError, Point, Space};
use crate::search::LineSearch;

/// Nearest point to `x` on the segment [a, b].
///
/// Computed by golden section on t ↦ d(γ(a,b,t), x), which is convex along
/// the geodesic; ties break toward the smaller parameter.
pub fn project_to_segment(
    space: &Space,
    a: &Point,
    b: &Point,
    x: &Point,
) -> Result<Point, GeometryError> {
    space.validate(a)?;
    space.validate(b)?;
    space.validate(x)?;
    let ls = LineSearch::with_tol(1e-13);
    let (t, _) = ls.golden_min(
        |t| {
            let g = space.geodesic_unchecked(a, b, t.clamp(0.0, 1.0));
            space.distance_unchecked(&g, x)
        },
        0.0,
        1.0,
    );
    Ok(space.geodesic_unchecked(a, b, t.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{EuclideanSpace, MetricTree, PoincareBall};
    use rand::SeedableRng;

    fn plane() -> Space {
        Space::Euclidean(EuclideanSpace::unconstrained(2))
    }

    #[test]
    fn orthogonal_drop() {
        let s = plane();
        let p = project_to_segment(
            &s,
            &Point::vector([0.0, 0.0]),
            &Point::vector([2.0, 0.0]),
            &Point::vector([1.0, 1.0]),
        )
        .unwrap();
        let v = p.as_vector().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-9);
        assert!(v[1].abs() < 1e-9);
    }

    #[test]
    fn clamps_to_endpoint() {
        let s = plane();
        let p = project_to_segment(
            &s,
            &Point::vector([0.0, 0.0]),
            &Point::vector([2.0, 0.0]),
            &Point::vector([5.0, 3.0]),
        )
        .unwrap();
        let v = p.as_vector().unwrap();
        assert!((v[0] - 2.0).abs() < 1e-9);
        assert!(v[1].abs() < 1e-9);
    }

    #[test]
    fn fixes_points_already_on_the_segment() {
        let s = plane();
        let x = Point::vector([0.75, 0.0]);
        let p = project_to_segment(&s, &Point::vector([0.0, 0.0]), &Point::vector([2.0, 0.0]), &x)
            .unwrap();
        assert!(s.distance(&p, &x).unwrap() < 1e-9);
    }

    /// d(z, Px)² + d(Px, x)² ≤ d(z, x)² for every z on the segment.
    fn assert_projection_inequality(space: &Space, a: &Point, b: &Point, x: &Point) {
        let p = project_to_segment(space, a, b, x).unwrap();
        let dpx = space.distance(&p, x).unwrap();
        for i in 0..=10 {
            let z = space.geodesic_point(a, b, i as f64 / 10.0).unwrap();
            let dzp = space.distance(&z, &p).unwrap();
            let dzx = space.distance(&z, x).unwrap();
            assert!(
                dzp * dzp + dpx * dpx <= dzx * dzx + 1e-7,
                "firm projection inequality violated by {}",
                dzp * dzp + dpx * dpx - dzx * dzx
            );
        }
    }

    #[test]
    fn projection_inequality_across_backends() {
        let spaces = [
            plane(),
            Space::Poincare(PoincareBall::new(2)),
            Space::Tree(
                MetricTree::new(4, &[(0, 1, 1.0), (1, 2, 2.0), (1, 3, 1.5)]).unwrap(),
            ),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for space in &spaces {
            for _ in 0..100 {
                let a = space.sample(&mut rng);
                let b = space.sample(&mut rng);
                let x = space.sample(&mut rng);
                assert_projection_inequality(space, &a, &b, &x);
            }
        }
    }
}
