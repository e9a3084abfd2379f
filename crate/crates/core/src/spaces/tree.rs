//! Finite weighted metric trees.
//!
//! A point is an (edge id, offset) pair with the offset measured from the
//! edge's first vertex. Vertex points are normalized to the incident edge
//! with the smallest id (offset 0 or the full length) so equality tests are
//! canonical. Distance is the length of the unique path; geodesics are its
//! arc-length parameterization.

use crate::geometry::{halton, GeometryError, MinimizeOpts, Point};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Point on a [`MetricTree`]: offset ∈ [0, length] along edge `edge`,
/// measured from the edge's first vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Clone, Copy, Debug)]
struct TreeEdge {
    u: usize,
    v: usize,
    len: f64,
}

/// Serialized form: vertex count plus `[u, v, length]` triples.
#[derive(Serialize, Deserialize)]
struct TreeSpec {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TreeSpec", into = "TreeSpec")]
pub struct MetricTree {
    vertices: usize,
    edges: Vec<TreeEdge>,
    /// adjacency[v] = (edge id, neighbor) pairs.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Precomputed vertex-to-vertex path lengths.
    vertex_dist: Vec<Vec<f64>>,
}

impl TryFrom<TreeSpec> for MetricTree {
    type Error = GeometryError;
    fn try_from(spec: TreeSpec) -> Result<Self, Self::Error> {
        MetricTree::new(spec.vertices, &spec.edges)
    }
}

impl From<MetricTree> for TreeSpec {
    fn from(t: MetricTree) -> TreeSpec {
        TreeSpec {
            vertices: t.vertices,
            edges: t.edges.iter().map(|e| (e.u, e.v, e.len)).collect(),
        }
    }
}

impl MetricTree {
    /// Builds a tree from `[u, v, length]` triples. Fails unless the graph
    /// is a connected tree with positive edge lengths.
    pub fn new(vertices: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GeometryError> {
        let invalid = |msg: String| GeometryError::InvalidPoint(msg);
        if vertices == 0 {
            return Err(invalid("tree needs at least one vertex".into()));
        }
        if edges.len() + 1 != vertices {
            return Err(invalid(format!(
                "a tree on {vertices} vertices needs {} edges, got {}",
                vertices - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        let mut parsed = Vec::with_capacity(edges.len());
        for (id, &(u, v, len)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices || u == v {
                return Err(invalid(format!("edge {id} = ({u}, {v}) is malformed")));
            }
            if len <= 0.0 || len.is_nan() {
                return Err(invalid(format!("edge {id} has nonpositive length {len}")));
            }
            adjacency[u].push((id, v));
            adjacency[v].push((id, u));
            parsed.push(TreeEdge { u, v, len });
        }
        // Connectivity check; |E| = |V|−1 plus connected ⇒ acyclic.
        let mut seen = vec![false; vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(_, y) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("edge list does not connect all vertices".into()));
        }
        let mut tree = MetricTree {
            vertices,
            edges: parsed,
            adjacency,
            vertex_dist: Vec::new(),
        };
        tree.vertex_dist = (0..vertices).map(|v| tree.distances_from(v)).collect();
        Ok(tree)
    }

    fn distances_from(&self, root: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices];
        dist[root] = 0.0;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(eid, y) in &self.adjacency[x] {
                if dist[y].is_infinite() {
                    dist[y] = dist[x] + self.edges[eid].len;
                    stack.push(y);
                }
            }
        }
        dist
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        self.edges[edge].len
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    pub fn validate(&self, p: TreePoint) -> Result<(), GeometryError> {
        if p.edge >= self.edges.len() {
            return Err(GeometryError::InvalidEdgeId {
                id: p.edge,
                count: self.edges.len(),
            });
        }
        let len = self.edges[p.edge].len;
        if !(0.0..=len).contains(&p.offset) || p.offset.is_nan() {
            return Err(GeometryError::OffsetOutOfRange {
                offset: p.offset,
                len,
            });
        }
        Ok(())
    }

    /// Canonical point sitting at vertex `v`.
    pub fn vertex_point(&self, v: usize) -> TreePoint {
        let &(eid, _) = self.adjacency[v]
            .iter()
            .min_by_key(|(eid, _)| *eid)
            .expect("tree vertex with no incident edge");
        if self.edges[eid].u == v {
            TreePoint {
                edge: eid,
                offset: 0.0,
            }
        } else {
            TreePoint {
                edge: eid,
                offset: self.edges[eid].len,
            }
        }
    }

    /// Snaps near-vertex offsets and rewrites vertex points canonically.
    pub fn canonicalize(&self, p: TreePoint) -> TreePoint {
        let e = self.edges[p.edge];
        let snap = 1e-12 * e.len.max(1.0);
        if p.offset <= snap {
            self.vertex_point(e.u)
        } else if p.offset >= e.len - snap {
            self.vertex_point(e.v)
        } else {
            p
        }
    }

    /// Distances from `p` to both endpoints of its edge, as
    /// `[(vertex, arc to it), …]`.
    fn endpoint_legs(&self, p: TreePoint) -> [(usize, f64); 2] {
        let e = self.edges[p.edge];
        [(e.u, p.offset), (e.v, e.len - p.offset)]
    }

    pub fn distance(&self, p: TreePoint, q: TreePoint) -> f64 {
        if p.edge == q.edge {
            return (p.offset - q.offset).abs();
        }
        let mut best = f64::INFINITY;
        for (pu, pd) in self.endpoint_legs(p) {
            for (qu, qd) in self.endpoint_legs(q) {
                best = best.min(pd + self.vertex_dist[pu][qu] + qd);
            }
        }
        best
    }

    /// Vertex sequence of the unique path between two vertices.
    fn vertex_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.vertices];
        let mut seen = vec![false; self.vertices];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            if x == to {
                break;
            }
            for &(eid, y) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, eid));
                    stack.push(y);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            let (prev, _) = parent[cur].expect("disconnected tree path");
            path.push(prev);
            cur = prev;
        }
        path.reverse();
        path
    }

    fn edge_between(&self, x: usize, y: usize) -> usize {
        self.adjacency[x]
            .iter()
            .find(|&&(_, nb)| nb == y)
            .map(|&(eid, _)| eid)
            .expect("adjacent vertices share an edge")
    }

    /// Path from `p` to `q` as legs `(edge, from_offset, to_offset)`.
    fn path_legs(&self, p: TreePoint, q: TreePoint) -> Vec<(usize, f64, f64)> {
        if p.edge == q.edge {
            return vec![(p.edge, p.offset, q.offset)];
        }
        // Pick the endpoint pair realizing the distance, first-min ties.
        let mut best = (f64::INFINITY, 0, 0);
        for (i, (pu, pd)) in self.endpoint_legs(p).into_iter().enumerate() {
            for (j, (qu, qd)) in self.endpoint_legs(q).into_iter().enumerate() {
                let total = pd + self.vertex_dist[pu][qu] + qd;
                if total < best.0 {
                    best = (total, i, j);
                }
            }
        }
        let (pu, _) = self.endpoint_legs(p)[best.1];
        let (qu, _) = self.endpoint_legs(q)[best.2];
        let mut legs = Vec::new();
        let exit_offset = if self.edges[p.edge].u == pu {
            0.0
        } else {
            self.edges[p.edge].len
        };
        legs.push((p.edge, p.offset, exit_offset));
        let path = self.vertex_path(pu, qu);
        for pair in path.windows(2) {
            let eid = self.edge_between(pair[0], pair[1]);
            let e = self.edges[eid];
            if e.u == pair[0] {
                legs.push((eid, 0.0, e.len));
            } else {
                legs.push((eid, e.len, 0.0));
            }
        }
        let enter_offset = if self.edges[q.edge].u == qu {
            0.0
        } else {
            self.edges[q.edge].len
        };
        legs.push((q.edge, enter_offset, q.offset));
        legs
    }

    pub fn geodesic(&self, p: TreePoint, q: TreePoint, t: f64) -> TreePoint {
        let total = self.distance(p, q);
        if total == 0.0 {
            return self.canonicalize(p);
        }
        let target = t * total;
        let mut walked = 0.0;
        for (eid, from, to) in self.path_legs(p, q) {
            let leg = (to - from).abs();
            if walked + leg >= target - 1e-15 * total.max(1.0) {
                let within = (target - walked).clamp(0.0, leg);
                let offset = from + (to - from).signum() * within;
                return self.canonicalize(TreePoint { edge: eid, offset });
            }
            walked += leg;
        }
        self.canonicalize(q)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> TreePoint {
        self.point_at_total_offset(rng.gen_range(0.0..self.total_length()))
    }

    pub fn probe_point(&self, index: usize) -> TreePoint {
        self.point_at_total_offset(halton(index, 2) * self.total_length())
    }

    fn point_at_total_offset(&self, mut s: f64) -> TreePoint {
        for (eid, e) in self.edges.iter().enumerate() {
            if s <= e.len {
                return self.canonicalize(TreePoint {
                    edge: eid,
                    offset: s,
                });
            }
            s -= e.len;
        }
        let last = self.edges.len() - 1;
        self.vertex_point(self.edges[last].v)
    }

    pub(crate) fn sample_scale(&self) -> f64 {
        self.total_length()
    }

    /// Global minimization by per-edge golden section: trees are locally
    /// one-dimensional, and a geodesically convex function is convex in the
    /// offset along every edge.
    pub(crate) fn minimize<F: FnMut(&Point) -> f64>(
        &self,
        mut h: F,
        _start: &Point,
        opts: &MinimizeOpts,
    ) -> (Point, f64) {
        let mut best: Option<(TreePoint, f64)> = None;
        for (eid, e) in self.edges.iter().enumerate() {
            let eval = |off: f64| {
                h(&Point::Tree(TreePoint {
                    edge: eid,
                    offset: off.clamp(0.0, e.len),
                }))
            };
            let (off, v) = opts.line.golden_min(eval, 0.0, e.len);
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((
                    self.canonicalize(TreePoint {
                        edge: eid,
                        offset: off,
                    }),
                    v,
                ));
            }
        }
        let (p, v) = best.expect("tree has at least one edge");
        (Point::Tree(p), v)
    }

    fn leaves(&self) -> Vec<usize> {
        (0..self.vertices)
            .filter(|&v| self.adjacency[v].len() == 1)
            .collect()
    }

    pub(crate) fn walk_directions(&self) -> usize {
        self.leaves().len()
    }

    /// Walks distance `s` from `p` toward the `k`-th leaf, capped there.
    pub(crate) fn walk(&self, p: TreePoint, k: usize, s: f64) -> (TreePoint, f64) {
        let leaves = self.leaves();
        let leaf = self.vertex_point(leaves[k % leaves.len()]);
        let d = self.distance(p, leaf);
        if d < 1e-15 {
            return (leaf, 0.0);
        }
        let travelled = s.min(d);
        (self.geodesic(p, leaf, travelled / d), travelled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path graph a–b–c with lengths 1 and 2.
    fn path_tree() -> MetricTree {
        MetricTree::new(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap()
    }

    /// Star with three unit edges (leaf_i, center); center is vertex 3.
    fn star_tree() -> MetricTree {
        MetricTree::new(4, &[(0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)]).unwrap()
    }

    #[test]
    fn rejects_non_trees() {
        assert!(MetricTree::new(3, &[(0, 1, 1.0)]).is_err());
        assert!(MetricTree::new(3, &[(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        assert!(MetricTree::new(2, &[(0, 0, 1.0)]).is_err());
        assert!(MetricTree::new(2, &[(0, 1, 0.0)]).is_err());
    }

    #[test]
    fn path_distances() {
        let t = path_tree();
        let a = t.vertex_point(0);
        let c = t.vertex_point(2);
        assert_eq!(t.distance(a, c), 3.0);
        let p = TreePoint {
            edge: 0,
            offset: 0.5,
        };
        let q = TreePoint {
            edge: 1,
            offset: 1.5,
        };
        assert_eq!(t.distance(p, q), 0.5 + 1.5);
        assert_eq!(t.distance(p, p), 0.0);
    }

    #[test]
    fn path_geodesic_crosses_branch_vertex() {
        // Arc length 2.25 from vertex a lands at offset 1.25 on edge b–c.
        let t = path_tree();
        let a = t.vertex_point(0);
        let c = t.vertex_point(2);
        let g = t.geodesic(a, c, 0.75);
        assert_eq!(g.edge, 1);
        assert!((g.offset - 1.25).abs() < 1e-12);
    }

    #[test]
    fn star_midpoint_is_center() {
        let t = star_tree();
        let p = TreePoint {
            edge: 0,
            offset: 0.5,
        };
        let q = TreePoint {
            edge: 1,
            offset: 0.5,
        };
        assert_eq!(t.distance(p, q), 1.0);
        let mid = t.geodesic(p, q, 0.5);
        let center = t.vertex_point(3);
        assert!(t.distance(mid, center) < 1e-12);
    }

    #[test]
    fn vertex_points_are_canonical() {
        let t = star_tree();
        // Center (vertex 3) is incident to all three edges; smallest id wins.
        let c = t.vertex_point(3);
        assert_eq!(c.edge, 0);
        assert_eq!(c.offset, 1.0);
        let snapped = t.canonicalize(TreePoint {
            edge: 2,
            offset: 1.0 - 1e-14,
        });
        assert_eq!(snapped, c);
    }

    #[test]
    fn invalid_points_are_rejected() {
        let t = path_tree();
        assert!(matches!(
            t.validate(TreePoint {
                edge: 5,
                offset: 0.0
            }),
            Err(GeometryError::InvalidEdgeId { .. })
        ));
        assert!(matches!(
            t.validate(TreePoint {
                edge: 0,
                offset: 1.5
            }),
            Err(GeometryError::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn three_geodesics_meet_at_the_median() {
        let t = star_tree();
        let x = TreePoint {
            edge: 0,
            offset: 0.25,
        };
        let y = TreePoint {
            edge: 1,
            offset: 0.5,
        };
        let z = TreePoint {
            edge: 2,
            offset: 0.75,
        };
        let dxy = t.distance(x, y);
        let dyz = t.distance(y, z);
        let dzx = t.distance(z, x);
        let m1 = t.geodesic(x, y, (dxy + dzx - dyz) / (2.0 * dxy));
        let m2 = t.geodesic(y, z, (dyz + dxy - dzx) / (2.0 * dyz));
        let m3 = t.geodesic(z, x, (dzx + dyz - dxy) / (2.0 * dzx));
        assert!(t.distance(m1, m2) < 1e-12);
        assert!(t.distance(m2, m3) < 1e-12);
        let center = t.vertex_point(3);
        assert!(t.distance(m1, center) < 1e-12);
    }

    #[test]
    fn minimize_distance_squared() {
        let t = path_tree();
        let target = TreePoint {
            edge: 1,
            offset: 0.75,
        };
        let (p, v) = t.minimize(
            |p| t.distance(p.as_tree().unwrap(), target).powi(2),
            &Point::tree(0, 0.0),
            &MinimizeOpts::default(),
        );
        assert!(t.distance(p.as_tree().unwrap(), target) < 1e-9);
        assert!(v < 1e-18);
    }
}
