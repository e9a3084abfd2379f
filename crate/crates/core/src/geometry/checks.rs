//! Signed-residual checks for the two quantitative CAT(0) inequalities.
//!
//! Both return LHS − RHS of the respective inequality, so a CAT(0) backend
//! must produce values ≤ 0 up to numerical tolerance. Euclidean backends
//! satisfy the CN check with equality (parallelogram identity).

use super::{GeometryError, Point, Space};

/// Residual of d((1−α)x ⊕ αy, z)² ≤ (1−α)d(x,z)² + αd(y,z)² − α(1−α)d(x,y)².
pub fn check_cn_inequality(
    space: &Space,
    x: &Point,
    y: &Point,
    z: &Point,
    alpha: f64,
) -> Result<f64, GeometryError> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(GeometryError::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mix = space.geodesic_point(x, y, alpha)?;
    let lhs = space.distance(&mix, z)?.powi(2);
    let dxz = space.distance(x, z)?;
    let dyz = space.distance(y, z)?;
    let dxy = space.distance(x, y)?;
    let rhs = (1.0 - alpha) * dxz * dxz + alpha * dyz * dyz - alpha * (1.0 - alpha) * dxy * dxy;
    Ok(lhs - rhs)
}

/// Residual of the four-point Cauchy–Schwarz characterization:
/// ½(d(x₁,x₄)² + d(x₂,x₃)² − d(x₁,x₃)² − d(x₂,x₄)²) ≤ d(x₁,x₂)·d(x₃,x₄).
pub fn check_quadrilateral_cs(
    space: &Space,
    x1: &Point,
    x2: &Point,
    x3: &Point,
    x4: &Point,
) -> Result<f64, GeometryError> {
    let d14 = space.distance(x1, x4)?;
    let d23 = space.distance(x2, x3)?;
    let d13 = space.distance(x1, x3)?;
    let d24 = space.distance(x2, x4)?;
    let d12 = space.distance(x1, x2)?;
    let d34 = space.distance(x3, x4)?;
    Ok(0.5 * (d14 * d14 + d23 * d23 - d13 * d13 - d24 * d24) - d12 * d34)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{EuclideanSpace, MetricTree, PoincareBall};
    use rand::SeedableRng;

    #[test]
    fn cn_is_parallelogram_identity_in_the_plane() {
        let s = Space::Euclidean(EuclideanSpace::unconstrained(2));
        let x = Point::vector([0.7, -0.2]);
        let y = Point::vector([-1.3, 0.4]);
        let z = Point::vector([0.1, 2.0]);
        for alpha in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let r = check_cn_inequality(&s, &x, &y, &z, alpha).unwrap();
            assert!(r.abs() < 1e-12, "alpha {alpha}: residual {r}");
        }
    }

    #[test]
    fn cn_alpha_zero_is_exact() {
        let s = Space::Euclidean(EuclideanSpace::unconstrained(2));
        let r = check_cn_inequality(
            &s,
            &Point::vector([1.0, 0.0]),
            &Point::vector([5.0, 5.0]),
            &Point::vector([-2.0, 1.0]),
            0.0,
        )
        .unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn cn_nonpositive_on_curved_backends() {
        let ball = Space::Poincare(PoincareBall::new(2));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let x = ball.sample(&mut rng);
            let y = ball.sample(&mut rng);
            let z = ball.sample(&mut rng);
            for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let r = check_cn_inequality(&ball, &x, &y, &z, alpha).unwrap();
                assert!(r <= 1e-7, "residual {r}");
            }
        }
    }

    #[test]
    fn cs_unit_square_value() {
        // Corners in order give residual ½(1+1−2−2) − 1 = −2.
        let s = Space::Euclidean(EuclideanSpace::unconstrained(2));
        let r = check_quadrilateral_cs(
            &s,
            &Point::vector([0.0, 0.0]),
            &Point::vector([1.0, 0.0]),
            &Point::vector([1.0, 1.0]),
            &Point::vector([0.0, 1.0]),
        )
        .unwrap();
        assert!((r + 2.0).abs() < 1e-12);
    }

    #[test]
    fn cs_degenerate_pair_is_zero() {
        let s = Space::Euclidean(EuclideanSpace::unconstrained(2));
        let x1 = Point::vector([0.4, 1.0]);
        let x3 = Point::vector([-2.0, 0.3]);
        let x4 = Point::vector([1.5, 1.5]);
        let r = check_quadrilateral_cs(&s, &x1, &x1, &x3, &x4).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn cs_nonpositive_on_tree() {
        let tree = Space::Tree(
            MetricTree::new(5, &[(0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 1.5)]).unwrap(),
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let pts: Vec<Point> = (0..4).map(|_| tree.sample(&mut rng)).collect();
            let r = check_quadrilateral_cs(&tree, &pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
            assert!(r <= 1e-9, "residual {r}");
        }
    }
}
