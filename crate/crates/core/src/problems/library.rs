//! Benchmark saddle problems.
//!
//! Every entry with a known saddle point keeps its residual below 1e−8 on a
//! dense probe grid, and entries with closed-form resolvents expose them so
//! solvers and tests can cross-check the generic scheme.

use super::{Certificates, SaddleProblem};
use crate::geometry::{Point, ProductPoint, ProductSpace, Space};
use crate::spaces::{EuclideanSpace, MetricTree, PoincareBall};

/// A named problem plus provenance notes.
#[derive(Clone, Debug)]
pub struct ProblemLibraryEntry {
    pub name: &'static str,
    pub problem: SaddleProblem,
    pub provenance: &'static str,
}

/// Looks up a library entry by name.
pub fn library_entry(name: &str) -> Option<ProblemLibraryEntry> {
    library().into_iter().find(|e| e.name == name)
}

fn line(sample: f64) -> Space {
    Space::Euclidean(EuclideanSpace::unconstrained(1).with_sample_box(vec![(-sample, sample)]))
}

fn segment() -> Space {
    Space::Euclidean(EuclideanSpace::boxed(vec![(-1.0, 1.0)]))
}

fn x0(p: &Point) -> f64 {
    p.as_vector().unwrap()[0]
}

/// The benchmark library.
pub fn library() -> Vec<ProblemLibraryEntry> {
    let mut entries = Vec::new();

    entries.push(ProblemLibraryEntry {
        name: "zero",
        problem: SaddleProblem::new(
            "zero",
            ProductSpace::new(line(2.0), line(2.0)),
            |_, _| 0.0,
            Certificates::concave_convex(),
        )
        .with_known_saddle(ProductPoint::new(Point::vector([0.0]), Point::vector([0.0])))
        .with_closed_form_resolvent(|_, base| base.clone()),
        provenance: "identically zero coupling; the resolvent is the identity",
    });

    entries.push(ProblemLibraryEntry {
        name: "bilinear",
        problem: SaddleProblem::new(
            "bilinear",
            ProductSpace::new(line(2.0), line(2.0)),
            |x, y| x0(x) * x0(y),
            Certificates::concave_convex(),
        )
        .with_known_saddle(ProductPoint::new(Point::vector([0.0]), Point::vector([0.0])))
        .with_closed_form_resolvent(|lambda, base| {
            let (x, y) = (x0(&base.x), x0(&base.y));
            let denom = 1.0 + lambda * lambda;
            ProductPoint::new(
                Point::vector([(x + lambda * y) / denom]),
                Point::vector([(y - lambda * x) / denom]),
            )
        }),
        provenance: "f(x, y) = xy on the line pair; first-order conditions solve linearly",
    });

    entries.push(ProblemLibraryEntry {
        name: "bilinear_box",
        problem: SaddleProblem::new(
            "bilinear_box",
            ProductSpace::new(segment(), segment()),
            |x, y| x0(x) * x0(y),
            Certificates::concave_convex(),
        )
        .with_known_saddle(ProductPoint::new(Point::vector([0.0]), Point::vector([0.0]))),
        provenance: "f(x, y) = xy restricted to [-1,1]^2; exercised by the generic solver",
    });

    entries.push(ProblemLibraryEntry {
        name: "matrix_game",
        problem: SaddleProblem::new(
            "matrix_game",
            ProductSpace::new(
                Space::Euclidean(EuclideanSpace::simplex(2)),
                Space::Euclidean(EuclideanSpace::simplex(2)),
            ),
            |p, q| {
                let p = p.as_vector().unwrap();
                let q = q.as_vector().unwrap();
                // Matching pennies payoff [[1, -1], [-1, 1]].
                p[0] * q[0] - p[0] * q[1] - p[1] * q[0] + p[1] * q[1]
            },
            Certificates::concave_convex(),
        )
        .with_known_saddle(ProductPoint::new(
            Point::vector([0.5, 0.5]),
            Point::vector([0.5, 0.5]),
        )),
        provenance: "matching-pennies matrix game on probability simplices; value 0 at uniform play",
    });

    entries.push(ProblemLibraryEntry {
        name: "quadratic",
        problem: quadratic_entry(vec![0.3], vec![-0.2], 2.0),
        provenance: "decoupled quadratic saddle on the line pair; unique critical point",
    });

    entries.push(ProblemLibraryEntry {
        name: "quadratic2d",
        problem: quadratic_entry(vec![0.3, -0.1], vec![-0.2, 0.4], 2.0),
        provenance: "decoupled quadratic saddle on the plane pair",
    });

    entries.push(ProblemLibraryEntry {
        name: "sion_sqrt",
        problem: SaddleProblem::new(
            "sion_sqrt",
            ProductSpace::new(segment(), segment()),
            |x, y| (x0(y) + 0.5).abs().sqrt() - (x0(x) - 0.25).abs().sqrt(),
            Certificates::quasi_only(),
        )
        .with_known_saddle(ProductPoint::new(
            Point::vector([0.25]),
            Point::vector([-0.5]),
        )),
        provenance: "square roots of distances: quasi-concave/quasi-convex but not concave/convex",
    });

    entries.push(ProblemLibraryEntry {
        name: "hyperbolic",
        problem: dsq_entry(
            "hyperbolic",
            Space::Poincare(PoincareBall::new(2)),
            Space::Poincare(PoincareBall::new(2)),
            Point::vector([0.3, 0.1]),
            Point::vector([-0.2, 0.25]),
        ),
        provenance: "half squared-distance saddle on a Poincaré ball pair",
    });

    entries.push(ProblemLibraryEntry {
        name: "tree_dsq",
        problem: {
            let tree = benchmark_tree();
            dsq_entry(
                "tree_dsq",
                Space::Tree(tree.clone()),
                Space::Tree(tree),
                Point::tree(0, 0.4),
                Point::tree(2, 1.2),
            )
        },
        provenance: "half squared-distance saddle on a weighted star tree pair",
    });

    entries.push(ProblemLibraryEntry {
        name: "linear_escape",
        problem: SaddleProblem::new(
            "linear_escape",
            ProductSpace::new(line(2.0), line(2.0)),
            |x, y| x0(x) - x0(y),
            Certificates::concave_convex(),
        )
        .with_closed_form_resolvent(|lambda, base| {
            ProductPoint::new(
                Point::vector([x0(&base.x) + lambda]),
                Point::vector([x0(&base.y) + lambda]),
            )
        }),
        provenance: "f(x, y) = x - y has no saddle point; proximal orbits escape linearly",
    });

    entries.push(ProblemLibraryEntry {
        name: "sin_control",
        problem: SaddleProblem::new(
            "sin_control",
            ProductSpace::new(segment(), segment()),
            |x, y| (3.0 * (x0(x) + x0(y))).sin(),
            Certificates::continuous_only(),
        ),
        provenance: "oscillatory control without quasi-convexity; its minimax gap stays open",
    });

    entries
}

/// f(x, y) = −‖x − a‖² + ‖y − b‖² on Euclidean factors, with the decoupled
/// closed-form resolvent.
fn quadratic_entry(a: Vec<f64>, b: Vec<f64>, sample: f64) -> SaddleProblem {
    let space_x = Space::Euclidean(
        EuclideanSpace::unconstrained(a.len()).with_sample_box(vec![(-sample, sample); a.len()]),
    );
    let space_y = Space::Euclidean(
        EuclideanSpace::unconstrained(b.len()).with_sample_box(vec![(-sample, sample); b.len()]),
    );
    let (fa, fb) = (a.clone(), b.clone());
    let (ra, rb) = (a.clone(), b.clone());
    SaddleProblem::new(
        "quadratic",
        ProductSpace::new(space_x, space_y),
        move |x, y| {
            let x = x.as_vector().unwrap();
            let y = y.as_vector().unwrap();
            let dx: f64 = x.iter().zip(&fa).map(|(u, v)| (u - v) * (u - v)).sum();
            let dy: f64 = y.iter().zip(&fb).map(|(u, v)| (u - v) * (u - v)).sum();
            dy - dx
        },
        Certificates::concave_convex(),
    )
    .with_known_saddle(ProductPoint::new(
        Point::Vector(a.clone()),
        Point::Vector(b.clone()),
    ))
    .with_closed_form_resolvent(move |lambda, base| {
        let shrink = |p: &Point, target: &[f64]| {
            Point::Vector(
                p.as_vector()
                    .unwrap()
                    .iter()
                    .zip(target)
                    .map(|(u, t)| (u + 2.0 * lambda * t) / (1.0 + 2.0 * lambda))
                    .collect(),
            )
        };
        ProductPoint::new(shrink(&base.x, &ra), shrink(&base.y, &rb))
    })
}

/// f(x, y) = d_Y(y, b)²/2 − d_X(x, a)²/2 with the geodesic-scaling
/// resolvent: each component moves the fraction λ/(1+λ) toward its anchor.
fn dsq_entry(name: &'static str, space_x: Space, space_y: Space, a: Point, b: Point) -> SaddleProblem {
    let domain = ProductSpace::new(space_x.clone(), space_y.clone());
    let (ea, eb) = (a.clone(), b.clone());
    let (sx, sy) = (space_x.clone(), space_y.clone());
    let (ra, rb) = (a.clone(), b.clone());
    SaddleProblem::new(
        name,
        domain,
        move |x, y| {
            let dx = sx.distance_unchecked(x, &ea);
            let dy = sy.distance_unchecked(y, &eb);
            0.5 * dy * dy - 0.5 * dx * dx
        },
        Certificates::concave_convex(),
    )
    .with_known_saddle(ProductPoint::new(a, b))
    .with_closed_form_resolvent(move |lambda, base| {
        let t = lambda / (1.0 + lambda);
        ProductPoint::new(
            space_x.geodesic_unchecked(&base.x, &ra, t),
            space_y.geodesic_unchecked(&base.y, &rb, t),
        )
    })
}

/// Star tree with three leaf edges of lengths 1, 1, 2 meeting at vertex 3.
pub fn benchmark_tree() -> MetricTree {
    MetricTree::new(4, &[(0, 3, 1.0), (1, 3, 1.0), (2, 3, 2.0)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::fuzz_certificates;
    use rand::SeedableRng;

    #[test]
    fn library_contains_the_required_entries() {
        let names: Vec<&str> = library().iter().map(|e| e.name).collect();
        for required in [
            "zero",
            "bilinear",
            "bilinear_box",
            "matrix_game",
            "quadratic",
            "quadratic2d",
            "sion_sqrt",
            "hyperbolic",
            "tree_dsq",
            "linear_escape",
            "sin_control",
        ] {
            assert!(names.contains(&required), "missing entry {required}");
        }
    }

    #[test]
    fn known_saddles_have_tiny_residuals() {
        for entry in library() {
            let Some(saddle) = entry.problem.known_saddle().cloned() else {
                continue;
            };
            let probes = entry.problem.default_probes(256);
            let residual = entry.problem.saddle_residual(&saddle, &probes).unwrap();
            assert!(
                residual <= 1e-8,
                "{}: saddle residual {residual}",
                entry.name
            );
        }
    }

    #[test]
    fn certificates_survive_fuzzing() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for entry in library() {
            let fuzz = fuzz_certificates(&entry.problem, &mut rng, 1000);
            assert!(
                fuzz.worst() <= 1e-7,
                "{}: certificate violation {fuzz:?}",
                entry.name
            );
        }
    }

    #[test]
    fn matrix_game_uniform_value_is_zero() {
        let entry = library_entry("matrix_game").unwrap();
        let uniform = entry.problem.known_saddle().unwrap().clone();
        assert_eq!(entry.problem.eval_product(&uniform), 0.0);
    }

    #[test]
    fn closed_forms_fix_known_saddles() {
        for entry in library() {
            let (Some(saddle), true) = (entry.problem.known_saddle(), entry.problem.has_closed_form())
            else {
                continue;
            };
            for lambda in [0.1, 1.0, 10.0] {
                let image = entry.problem.closed_form_resolvent(lambda, saddle).unwrap();
                let moved = entry
                    .problem
                    .domain()
                    .distance(saddle, &image)
                    .unwrap();
                assert!(moved < 1e-12, "{} at lambda {lambda}: {moved}", entry.name);
            }
        }
    }
}
