//! Euclidean comparison triangles.

use super::GeometryError;
use serde::{Deserialize, Serialize};

/// Planar triangle whose pairwise distances reproduce three given side
/// lengths (the comparison triangle of CAT(0) geometry).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub z: (f64, f64),
}

impl ComparisonTriangle {
    /// Side lengths as realized by the planar points, in the input order
    /// (d(y,z), d(z,x), d(x,y)).
    pub fn side_lengths(&self) -> (f64, f64, f64) {
        (
            dist(self.y, self.z),
            dist(self.z, self.x),
            dist(self.x, self.y),
        )
    }
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Builds the comparison triangle for side lengths `a = d(y,z)`,
/// `b = d(z,x)`, `c = d(x,y)`.
///
/// Inputs are relabeled internally so the largest side plays the role of
/// the base; the returned points are expressed in the original labels. The
/// base construction places x̄ at the origin, ȳ on the positive axis, and
/// z̄ = ((b²+c²−a²)/2c, √((a+b+c)(a+b−c)(b+c−a)(c+a−b))/2c).
pub fn comparison_triangle(
    a: f64,
    b: f64,
    c: f64,
) -> Result<ComparisonTriangle, GeometryError> {
    for side in [a, b, c] {
        if side < 0.0 || side.is_nan() {
            return Err(GeometryError::TriangleInequalityViolated { a, b, c });
        }
    }
    if a > b + c || b > c + a || c > a + b {
        return Err(GeometryError::TriangleInequalityViolated { a, b, c });
    }
    // Relabel so the largest side is the base between the first two points.
    // Label map: base construction on sides (a', b', c') gives points
    // (x̄', ȳ', z̄') with c' = d(x̄', ȳ'), b' = d(z̄', x̄'), a' = d(ȳ', z̄').
    let (x, y, z) = if c >= a && c >= b {
        let (xp, yp, zp) = base_construction(a, b, c)?;
        (xp, yp, zp)
    } else if a >= b && a >= c {
        // a = d(y,z) is the base: construct on (b', c') = sides seen from
        // (y, z, x) ordering: d(z,x) = b stays opposite y, d(x,y) = c
        // opposite z.
        let (yp, zp, xp) = base_construction(b, c, a)?;
        (xp, yp, zp)
    } else {
        let (zp, xp, yp) = base_construction(c, a, b)?;
        (xp, yp, zp)
    };
    Ok(ComparisonTriangle { x, y, z })
}

/// Canonical construction with `c` the largest side: x̄ = (0,0), ȳ = (c,0),
/// z̄ from the simultaneous circle equations s²+t² = b², (s−c)²+t² = a².
#[allow(clippy::type_complexity)]
fn base_construction(
    a: f64,
    b: f64,
    c: f64,
) -> Result<((f64, f64), (f64, f64), (f64, f64)), GeometryError> {
    if c == 0.0 {
        return Ok(((0.0, 0.0), (0.0, 0.0), (0.0, 0.0)));
    }
    let s = (b * b + c * c - a * a) / (2.0 * c);
    let heron = (a + b + c) * (a + b - c) * (b + c - a) * (c + a - b);
    let t = heron.max(0.0).sqrt() / (2.0 * c);
    Ok(((0.0, 0.0), (c, 0.0), (s, t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(1.0)
    }

    #[test]
    fn degenerate_all_zero() {
        let t = comparison_triangle(0.0, 0.0, 0.0).unwrap();
        assert_eq!(t.x, (0.0, 0.0));
        assert_eq!(t.y, (0.0, 0.0));
        assert_eq!(t.z, (0.0, 0.0));
    }

    #[test]
    fn three_four_five() {
        let t = comparison_triangle(3.0, 4.0, 5.0).unwrap();
        assert_eq!(t.x, (0.0, 0.0));
        assert_eq!(t.y, (5.0, 0.0));
        assert!((t.z.0 - 3.2).abs() < 1e-12);
        assert!((t.z.1 - 2.4).abs() < 1e-12);
        let (a, b, c) = t.side_lengths();
        assert!(rel_err(a, 3.0) < 1e-12);
        assert!(rel_err(b, 4.0) < 1e-12);
        assert!(rel_err(c, 5.0) < 1e-12);
    }

    #[test]
    fn collinear_case_is_flat() {
        // a + b = c puts z̄ on the base segment.
        let t = comparison_triangle(1.0, 2.0, 3.0).unwrap();
        assert!(t.z.1.abs() < 1e-12);
        let (a, b, c) = t.side_lengths();
        assert!(rel_err(a, 1.0) < 1e-12);
        assert!(rel_err(b, 2.0) < 1e-12);
        assert!(rel_err(c, 3.0) < 1e-12);
    }

    #[test]
    fn relabeling_handles_any_largest_side() {
        for (a, b, c) in [(5.0, 3.0, 4.0), (4.0, 5.0, 3.0), (2.0, 2.0, 2.0)] {
            let t = comparison_triangle(a, b, c).unwrap();
            let (ra, rb, rc) = t.side_lengths();
            assert!(rel_err(ra, a) < 1e-12, "a: {ra} vs {a}");
            assert!(rel_err(rb, b) < 1e-12, "b: {rb} vs {b}");
            assert!(rel_err(rc, c) < 1e-12, "c: {rc} vs {c}");
        }
    }

    #[test]
    fn triangle_inequality_violation() {
        assert!(matches!(
            comparison_triangle(10.0, 1.0, 2.0),
            Err(GeometryError::TriangleInequalityViolated { .. })
        ));
        assert!(comparison_triangle(-1.0, 1.0, 1.0).is_err());
    }
}
