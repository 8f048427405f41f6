//! Truncated combinatorial horoballs over finite metric spaces.
//!
//! The vertex set is `base × {0..=L}`. A horizontal edge joins `(p,l)` and
//! `(q,l)` when `0 < d(p,q) <= 2^l`; a vertical edge joins `(p,l)` and
//! `(p,l+1)`. BFS on the truncation can only overestimate distances in the
//! infinite horoball, which is why every exhaustive check pairs a query with
//! a re-run on an enlarged truncation.

mod checks;
mod normal_form;

pub use checks::{
    depth_shift_scan, geodesic_hausdorff_bound, gromov_product_profile, hausdorff_distance,
    normal_form_audit, DepthShiftReport, DepthShiftScan, GromovProfile, NormalFormAudit,
};
pub use normal_form::{normal_form, NormalForm};

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHABLE};
use crate::group::{GroupElement, GroupModel};
use crate::half::HalfInt;
use crate::limits::Limits;

/// A finite metric space with an exact integer metric, stored as a dense
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<u32>,
}

impl FiniteMetricSpace {
    pub fn from_points<T>(
        points: &[T],
        metric: impl Fn(&T, &T) -> u32,
        label: impl Fn(&T) -> String,
    ) -> Self {
        let n = points.len();
        let mut dist = vec![0u32; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric(&points[i], &points[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        FiniteMetricSpace {
            labels: points.iter().map(label).collect(),
            dist,
        }
    }

    /// The integers `lo..=hi` with `|x - y|`.
    pub fn integer_segment(lo: i64, hi: i64) -> Self {
        let pts: Vec<i64> = (lo..=hi).collect();
        Self::from_points(&pts, |a, b| a.abs_diff(*b) as u32, |a| a.to_string())
    }

    /// The ℓ¹ ball of the given radius in ℤ², in row-major order.
    pub fn l1_ball(radius: i64) -> Self {
        let mut pts = Vec::new();
        for x in -radius..=radius {
            for y in -radius..=radius {
                if x.abs() + y.abs() <= radius {
                    pts.push((x, y));
                }
            }
        }
        Self::from_points(
            &pts,
            |a, b| (a.0.abs_diff(b.0) + a.1.abs_diff(b.1)) as u32,
            |a| format!("({},{})", a.0, a.1),
        )
    }

    /// A set of group elements with the restricted word metric.
    pub fn from_group_elements(model: &GroupModel, elements: &[GroupElement]) -> Self {
        Self::from_points(
            elements,
            |a, b| model.distance_unchecked(a, b) as u32,
            |g| model.format(g),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn dist(&self, p: usize, q: usize) -> u32 {
        self.dist[p * self.len() + q]
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Whether the base is connected at scale 1.
    pub fn is_unit_connected(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(p) = stack.pop() {
            for q in 0..n {
                if !seen[q] && self.dist(p, q) == 1 {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A chain `p = x_0, …, x_h = q` with hops of size at most `step`,
    /// chosen greedily by minimizing the remaining distance (ties broken by
    /// index). Fails when the base does not admit a chain of exactly
    /// `ceil(d(p,q)/step)` hops.
    pub fn chain(&self, p: usize, q: usize, step: u64) -> Result<Vec<usize>> {
        let d = u64::from(self.dist(p, q));
        let hops = d.div_ceil(step);
        let mut chain = vec![p];
        let mut cur = p;
        while cur != q {
            if chain.len() as u64 > hops {
                return Err(Error::pre(format!(
                    "base has no {hops}-hop chain from {} to {} at scale {step}",
                    self.label(p),
                    self.label(q)
                )));
            }
            let next = (0..self.len())
                .filter(|&x| u64::from(self.dist(cur, x)) <= step)
                .min_by_key(|&x| (self.dist(x, q), x))
                .expect("cur itself qualifies");
            if next == cur {
                return Err(Error::pre("greedy chain stalled"));
            }
            cur = next;
            chain.push(cur);
        }
        if chain.len() as u64 != hops + 1 {
            return Err(Error::pre(format!(
                "base has no {hops}-hop chain from {} to {} at scale {step}",
                self.label(p),
                self.label(q)
            )));
        }
        Ok(chain)
    }
}

/// A vertex `(p, l)`: base point index and depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HoroVertex {
    pub point: usize,
    pub depth: u32,
}

impl HoroVertex {
    pub fn new(point: usize, depth: u32) -> Self {
        HoroVertex { point, depth }
    }
}

/// Whether `d` is within the horizontal scale `2^depth`.
#[inline]
pub(crate) fn within_scale(d: u32, depth: u32) -> bool {
    depth >= 32 || u64::from(d) <= 1u64 << depth
}

#[derive(Debug, Clone)]
pub struct HoroballGraph {
    base: FiniteMetricSpace,
    depth: u32,
    graph: Graph,
}

pub fn build_horoball(base: FiniteMetricSpace, depth: u32, limits: &Limits) -> Result<HoroballGraph> {
    HoroballGraph::build(base, depth, limits)
}

impl HoroballGraph {
    pub fn build(base: FiniteMetricSpace, depth: u32, limits: &Limits) -> Result<Self> {
        let n = base.len();
        let layers = depth as usize + 1;
        limits.check_vertices("horoball", n * layers)?;
        let mut edges = Vec::new();
        for l in 0..=depth {
            let off = l as usize * n;
            for p in 0..n {
                for q in (p + 1)..n {
                    let d = base.dist(p, q);
                    if d > 0 && within_scale(d, l) {
                        edges.push(((off + p) as u32, (off + q) as u32));
                    }
                }
                if l < depth {
                    edges.push(((off + p) as u32, (off + n + p) as u32));
                }
            }
        }
        let graph = Graph::from_edges(n * layers, &edges);
        Ok(HoroballGraph { base, depth, graph })
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn vertex_id(&self, v: HoroVertex) -> Result<u32> {
        if v.point >= self.base.len() || v.depth > self.depth {
            return Err(Error::miss(format!(
                "vertex ({}, {}) outside the truncation",
                v.point, v.depth
            )));
        }
        Ok((v.depth as usize * self.base.len() + v.point) as u32)
    }

    pub fn vertex(&self, id: u32) -> HoroVertex {
        let n = self.base.len();
        HoroVertex::new(id as usize % n, (id as usize / n) as u32)
    }

    pub fn vertices(&self) -> impl Iterator<Item = HoroVertex> + '_ {
        (0..self.n_vertices() as u32).map(|id| self.vertex(id))
    }

    pub fn label(&self, v: HoroVertex) -> String {
        format!("{}@{}", self.base.label(v.point), v.depth)
    }

    pub fn bfs_distance(&self, u: HoroVertex, v: HoroVertex) -> Result<u32> {
        self.graph.distance(self.vertex_id(u)?, self.vertex_id(v)?)
    }

    pub fn bfs_geodesic(&self, u: HoroVertex, v: HoroVertex) -> Result<Vec<HoroVertex>> {
        let path = self.graph.shortest_path(self.vertex_id(u)?, self.vertex_id(v)?)?;
        Ok(path.into_iter().map(|id| self.vertex(id)).collect())
    }

    /// Closed-form distance in the infinite horoball; a truncation miss when
    /// the deepest optimal turning depth is below the truncation.
    pub fn normal_form_distance(&self, u: HoroVertex, v: HoroVertex) -> Result<u32> {
        Ok(self.normal_form_of(u, v)?.distance)
    }

    pub fn normal_form_of(&self, u: HoroVertex, v: HoroVertex) -> Result<NormalForm> {
        self.vertex_id(u)?;
        self.vertex_id(v)?;
        let nf = normal_form(u.depth, v.depth, self.base.dist(u.point, v.point));
        if nf.turn_depth > self.depth {
            return Err(Error::miss(format!(
                "optimal turning depth {} exceeds truncation {}",
                nf.turn_depth, self.depth
            )));
        }
        Ok(nf)
    }

    /// Witness geodesic: up from `u`, a horizontal chain at the turning
    /// depth, down to `v`.
    pub fn normal_form_geodesic(&self, u: HoroVertex, v: HoroVertex) -> Result<Vec<HoroVertex>> {
        let nf = self.normal_form_of(u, v)?;
        let t = nf.turn_depth;
        let mut path: Vec<HoroVertex> = (u.depth..=t).map(|l| HoroVertex::new(u.point, l)).collect();
        let chain = self.base.chain(u.point, v.point, 1u64 << t.min(62))?;
        path.extend(chain.into_iter().skip(1).map(|p| HoroVertex::new(p, t)));
        path.extend((v.depth..t).rev().map(|l| HoroVertex::new(v.point, l)));
        debug_assert_eq!(path.len() as u32, nf.distance + 1);
        Ok(path)
    }

    /// `(u|v)_o = (d(o,u) + d(o,v) - d(u,v)) / 2`.
    pub fn gromov_product(&self, u: HoroVertex, v: HoroVertex, o: HoroVertex) -> Result<HalfInt> {
        let from_o = self.graph.bfs(self.vertex_id(o)?);
        let du = from_o[self.vertex_id(u)? as usize];
        let dv = from_o[self.vertex_id(v)? as usize];
        if du == UNREACHABLE || dv == UNREACHABLE {
            return Err(Error::Disconnected(o.point, u.point));
        }
        let duv = self.bfs_distance(u, v)?;
        Ok(HalfInt::from_twice(i64::from(du) + i64::from(dv) - i64::from(duv)))
    }

    /// Checks `d(A', B) <= d(A, B)` for `A' = (a, s + D)` under the
    /// preconditions `R > s + D + 2`, `t > s`, `d(O,B) > d(O,A)`.
    pub fn check_depth_shift(
        &self,
        o: HoroVertex,
        a: HoroVertex,
        b: HoroVertex,
        shift: u32,
    ) -> Result<DepthShiftReport> {
        let dist = |x: HoroVertex, y: HoroVertex| self.bfs_distance(x, y);
        checks::depth_shift_report(self, o, a, b, shift, dist)
    }

    /// Graphviz export; vertices are labelled `p@l`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph horoball {\n");
        for v in self.vertices() {
            let _ = writeln!(out, "  \"{}\";", self.label(v));
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\";",
                self.label(self.vertex(u)),
                self.label(self.vertex(v))
            );
        }
        out.push_str("}\n");
        out
    }

    /// Vertex ids of `self` mapped into `larger` by base label.
    pub fn embedding_into(&self, larger: &HoroballGraph) -> Result<Vec<u32>> {
        let index: HashMap<&str, usize> = (0..larger.base.len()).map(|p| (larger.base.label(p), p)).collect();
        self.vertices()
            .map(|v| {
                let p = *index
                    .get(self.base.label(v.point))
                    .ok_or_else(|| Error::pre(format!("base point {} missing", self.base.label(v.point))))?;
                larger.vertex_id(HoroVertex::new(p, v.depth))
            })
            .collect()
    }
}
