//! The augmented space: the Cayley ball with a truncated combinatorial
//! horoball glued over each materialized peripheral coset.
//!
//! Depth-0 horoball vertices are not separate objects. `(i, g, 0)` and the
//! Cayley vertex `g` share one vertex id, so the pasting is structural.

mod delta;

pub use delta::{delta_four_point, delta_scan, four_point_delta, DeltaMode, DeltaRow, DeltaScanParams};

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{CosetIndex, CosetOrder, GroupElement, GroupModel};
use crate::horoball::within_scale;
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AugVertex {
    Cayley(GroupElement),
    /// `(i, p, l)` with `p ∈ g_i P_(i)` and `1 <= l <= L`.
    Horo {
        coset: CosetIndex,
        point: GroupElement,
        depth: u32,
    },
}

impl AugVertex {
    /// `(i, p, l)`, normalized to the Cayley vertex `p` when `l = 0`.
    pub fn horo(coset: CosetIndex, point: GroupElement, depth: u32) -> Self {
        if depth == 0 {
            AugVertex::Cayley(point)
        } else {
            AugVertex::Horo { coset, point, depth }
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            AugVertex::Cayley(_) => 0,
            AugVertex::Horo { depth, .. } => *depth,
        }
    }
}

/// The members of one coset inside the Cayley ball.
#[derive(Debug, Clone)]
pub struct CosetBlock {
    pub index: CosetIndex,
    /// Cayley ids of `g_i P_(i) ∩ ball`, in shortlex order.
    pub members: Vec<u32>,
    offset: u32,
}

#[derive(Debug, Clone)]
pub struct AugGraph {
    model: GroupModel,
    cayley_radius: usize,
    depth: u32,
    cutoff: usize,
    ball: Vec<GroupElement>,
    ball_index: HashMap<GroupElement, u32>,
    blocks: Vec<CosetBlock>,
    block_of: HashMap<CosetIndex, usize>,
    graph: Graph,
}

pub fn build_augmented(order: &CosetOrder, cayley_radius: usize, depth: u32, limits: &Limits) -> Result<AugGraph> {
    AugGraph::build(order, cayley_radius, depth, limits)
}

impl AugGraph {
    /// Cosets are those materialized by `order` (its cutoff); each is glued
    /// over its intersection with the ball of radius `cayley_radius`.
    pub fn build(order: &CosetOrder, cayley_radius: usize, depth: u32, limits: &Limits) -> Result<Self> {
        let model = order.model().clone();
        let ball = model.ball(cayley_radius, limits)?;
        let ball_index: HashMap<GroupElement, u32> =
            ball.iter().enumerate().map(|(i, g)| (g.clone(), i as u32)).collect();

        let mut members: HashMap<CosetIndex, Vec<u32>> = HashMap::new();
        for r in 1..=order.k() {
            for (id, g) in ball.iter().enumerate() {
                if let Some(i) = order.index_of(r, g) {
                    members.entry(i).or_default().push(id as u32);
                }
            }
        }

        let mut n = ball.len();
        let mut blocks = Vec::new();
        for i in order.indices() {
            let Some(m) = members.remove(&i) else { continue };
            let offset = n as u32;
            n += m.len() * depth as usize;
            limits.check_vertices("augmented space", n)?;
            blocks.push(CosetBlock {
                index: i,
                members: m,
                offset,
            });
        }
        let block_of = blocks.iter().enumerate().map(|(b, blk)| (blk.index, b)).collect();

        let gens = model.symmetric_generators();
        let mut edges = Vec::new();
        for (u, g) in ball.iter().enumerate() {
            for s in &gens {
                if let Some(&v) = ball_index.get(&model.mul_unchecked(g, s)) {
                    edges.push((u as u32, v));
                }
            }
        }
        for blk in &blocks {
            let m = blk.members.len();
            let id = |pos: usize, l: u32| -> u32 {
                if l == 0 {
                    blk.members[pos]
                } else {
                    blk.offset + ((l - 1) as usize * m + pos) as u32
                }
            };
            let pts: Vec<&GroupElement> = blk.members.iter().map(|&c| &ball[c as usize]).collect();
            for p in 0..m {
                for q in (p + 1)..m {
                    let d = model.distance_unchecked(pts[p], pts[q]) as u32;
                    // depth 0 horizontal edges are Cayley edges already
                    for l in 1..=depth {
                        if within_scale(d, l) {
                            edges.push((id(p, l), id(q, l)));
                        }
                    }
                }
                for l in 0..depth {
                    edges.push((id(p, l), id(p, l + 1)));
                }
            }
        }
        let graph = Graph::from_edges(n, &edges);
        Ok(AugGraph {
            model,
            cayley_radius,
            depth,
            cutoff: order.cutoff(),
            ball,
            ball_index,
            blocks,
            block_of,
            graph,
        })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn cayley_radius(&self) -> usize {
        self.cayley_radius
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    /// Cayley vertices occupy ids `0..n_cayley()`, in shortlex order.
    pub fn n_cayley(&self) -> usize {
        self.ball.len()
    }

    pub fn ball(&self) -> &[GroupElement] {
        &self.ball
    }

    pub fn blocks(&self) -> &[CosetBlock] {
        &self.blocks
    }

    pub fn block(&self, i: CosetIndex) -> Option<&CosetBlock> {
        self.block_of.get(&i).map(|&b| &self.blocks[b])
    }

    pub fn cayley_id(&self, g: &GroupElement) -> Result<u32> {
        self.ball_index
            .get(g)
            .copied()
            .ok_or_else(|| Error::miss(format!("{} lies outside the Cayley ball", self.model.format(g))))
    }

    pub fn vertex_id(&self, v: &AugVertex) -> Result<u32> {
        match v {
            AugVertex::Cayley(g) => self.cayley_id(g),
            AugVertex::Horo { coset, point, depth } => {
                let blk = self
                    .block(*coset)
                    .ok_or_else(|| Error::miss(format!("coset {coset} is not materialized")))?;
                if *depth > self.depth {
                    return Err(Error::miss(format!("depth {depth} beyond truncation {}", self.depth)));
                }
                let c = self.cayley_id(point)?;
                let pos = blk.members.binary_search(&c).map_err(|_| {
                    Error::pre(format!("{} is not in coset {coset}", self.model.format(point)))
                })?;
                if *depth == 0 {
                    return Ok(c);
                }
                Ok(blk.offset + ((*depth - 1) as usize * blk.members.len() + pos) as u32)
            }
        }
    }

    pub fn vertex(&self, id: u32) -> AugVertex {
        if (id as usize) < self.ball.len() {
            return AugVertex::Cayley(self.ball[id as usize].clone());
        }
        let b = self.blocks.partition_point(|blk| blk.offset <= id) - 1;
        let blk = &self.blocks[b];
        let m = blk.members.len() as u32;
        let rel = id - blk.offset;
        AugVertex::Horo {
            coset: blk.index,
            point: self.ball[blk.members[(rel % m) as usize] as usize].clone(),
            depth: rel / m + 1,
        }
    }

    pub fn distance(&self, u: &AugVertex, v: &AugVertex) -> Result<u32> {
        self.graph.distance(self.vertex_id(u)?, self.vertex_id(v)?)
    }

    pub fn label(&self, v: &AugVertex) -> String {
        match v {
            AugVertex::Cayley(g) => self.model.format(g),
            AugVertex::Horo { coset, point, depth } => {
                format!("({},{},{})", coset, self.model.format(point), depth)
            }
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph augmented {\n");
        for id in 0..self.n_vertices() as u32 {
            let v = self.vertex(id);
            let shape = if matches!(v, AugVertex::Cayley(_)) { "circle" } else { "point" };
            let _ = writeln!(out, "  {id} [label=\"{}\", shape={shape}];", self.label(&v));
        }
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "  {u} -- {v};");
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for AugGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "augmented space: r_c={}, L={}, cutoff={}, {} vertices ({} Cayley, {} cosets), {} edges",
            self.cayley_radius,
            self.depth,
            self.cutoff,
            self.n_vertices(),
            self.n_cayley(),
            self.blocks.len(),
            self.graph.n_edges()
        )
    }
}
