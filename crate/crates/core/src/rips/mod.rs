//! Rips complexes, depth-window vertex filters and exact integral
//! (co)homology.

mod homology;
mod snf;

pub use homology::{homology, reduced_cohomology, reduced_homology, DegreeGroup, HomologyKind, HomologyResult};
pub use snf::{dense_from_columns, mat_mul, smith_normal_form, sparse_invariant_factors, to_bigint, IntMatrix, Snf};

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::augmented::{AugGraph, AugVertex};
use crate::error::{Error, Result};
use crate::limits::Limits;

pub const DEFAULT_DIM_CAP: usize = 3;

/// Strictly increasing vertex list.
pub type Simplex = Vec<u32>;

/// A finite simplicial complex closed under faces. Simplices of each
/// dimension are stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    /// Simplices above `simplices.len() - 1` may exist but were not built.
    capped: bool,
}

impl SimplicialComplex {
    fn from_levels(n_vertices: usize, mut levels: Vec<Vec<Simplex>>, capped: bool) -> Self {
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        for level in &mut levels {
            level.sort_unstable();
            level.dedup();
        }
        let index = levels
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        SimplicialComplex {
            n_vertices,
            simplices: levels,
            index,
            capped,
        }
    }

    /// The closure of `facets` under taking faces. Vertex ids must be below
    /// `n_vertices`; isolated vertices need not appear in any facet.
    pub fn from_facets(n_vertices: usize, facets: &[Simplex], limits: &Limits) -> Result<Self> {
        let mut levels: Vec<BTreeSet<Simplex>> = Vec::new();
        let mut total = 0usize;
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if f.is_empty() {
                continue;
            }
            if let Some(&v) = f.iter().find(|&&v| v as usize >= n_vertices) {
                return Err(Error::pre(format!("facet vertex {v} out of range {n_vertices}")));
            }
            if f.len() > 24 {
                return Err(Error::pre("facets above dimension 23 are not supported"));
            }
            for mask in 1u32..(1 << f.len()) {
                let face: Simplex = (0..f.len()).filter(|&b| mask & (1 << b) != 0).map(|b| f[b]).collect();
                let dim = face.len() - 1;
                if levels.len() <= dim {
                    levels.resize_with(dim + 1, BTreeSet::new);
                }
                if levels[dim].insert(face) {
                    total += 1;
                    limits.check_simplices("complex", total)?;
                }
            }
        }
        if levels.is_empty() {
            levels.push(BTreeSet::new());
        }
        for v in 0..n_vertices as u32 {
            levels[0].insert(vec![v]);
        }
        Ok(Self::from_levels(
            n_vertices,
            levels.into_iter().map(|l| l.into_iter().collect()).collect(),
            false,
        ))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest dimension present.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn is_capped(&self) -> bool {
        self.capped
    }

    pub fn simplices(&self, dim: usize) -> &[Simplex] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices(dim).len()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        s.len()
            .checked_sub(1)
            .and_then(|d| self.index.get(d))
            .is_some_and(|m| m.contains_key(s))
    }

    pub fn position(&self, s: &[u32]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    /// Euler characteristic of the built part.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// `∂_k` as sparse columns indexed by `k`-simplices, rows by
    /// `(k-1)`-simplices; face `i` (vertex `i` dropped) carries `(-1)^i`.
    pub fn boundary_columns(&self, k: usize) -> Vec<Vec<(u32, i64)>> {
        if k == 0 {
            return vec![Vec::new(); self.count(0)];
        }
        self.simplices(k)
            .iter()
            .map(|s| {
                let mut col: Vec<(u32, i64)> = (0..s.len())
                    .map(|i| {
                        let mut face = s.clone();
                        face.remove(i);
                        let row = self.index[k - 1][&face] as u32;
                        (row, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect()
    }

    /// Whether `∂_{k-1} ∘ ∂_k = 0` for every built `k`.
    pub fn boundary_squared_is_zero(&self) -> bool {
        (2..self.simplices.len()).all(|k| {
            let inner = self.boundary_columns(k - 1);
            self.boundary_columns(k).iter().all(|col| {
                let mut acc: HashMap<u32, i64> = HashMap::new();
                for &(face, c) in col {
                    for &(row, d) in &inner[face as usize] {
                        *acc.entry(row).or_insert(0) += c * d;
                    }
                }
                acc.values().all(|&v| v == 0)
            })
        })
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.iter().flatten().all(|s| other.contains(s))
    }

    /// Full subcomplex on `keep`, with vertices renumbered by their position
    /// in `keep` (which must be strictly increasing).
    pub fn induced(&self, keep: &[u32]) -> Result<SimplicialComplex> {
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::pre("induced vertex list must be strictly increasing"));
        }
        let pos: HashMap<u32, u32> = keep.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let levels = self
            .simplices
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter_map(|s| s.iter().map(|v| pos.get(v).copied()).collect::<Option<Simplex>>())
                    .collect()
            })
            .collect();
        Ok(Self::from_levels(keep.len(), levels, self.capped))
    }

    /// Maximal simplices, in dimension then lexicographic order.
    pub fn facets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (d, level) in self.simplices.iter().enumerate() {
            let covered: HashSet<Simplex> = self.simplices(d + 1).iter().flat_map(faces).collect();
            out.extend(level.iter().filter(|s| !covered.contains(*s)).cloned());
        }
        out
    }

    /// The first barycentric subdivision: one vertex per simplex (numbered
    /// by dimension then lexicographic order), one simplex per chain.
    pub fn barycentric_subdivision(&self, limits: &Limits) -> Result<SimplicialComplex> {
        let mut offset = Vec::with_capacity(self.simplices.len());
        let mut n = 0;
        for level in &self.simplices {
            offset.push(n);
            n += level.len();
        }
        let id = |s: &Simplex| (offset[s.len() - 1] + self.index[s.len() - 1][s]) as u32;
        // maximal chains end at facets; enumerate flags downward
        let mut flags = Vec::new();
        for facet in self.facets() {
            let mut stack = vec![(facet.clone(), vec![id(&facet)])];
            while let Some((s, chain)) = stack.pop() {
                if s.len() == 1 {
                    flags.push(chain);
                    continue;
                }
                for f in faces(&s) {
                    let mut next = chain.clone();
                    next.push(id(&f));
                    stack.push((f, next));
                }
            }
        }
        SimplicialComplex::from_facets(n, &flags, limits)
    }

    pub fn to_facets_json(&self) -> FacetList {
        FacetList {
            n_vertices: Some(self.n_vertices),
            facets: self.facets(),
        }
    }

    /// Disjoint union; vertices of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let shift = self.n_vertices as u32;
        let depth = self.simplices.len().max(other.simplices.len());
        let levels = (0..depth)
            .map(|d| {
                let mut level = self.simplices(d).to_vec();
                level.extend(other.simplices(d).iter().map(|s| s.iter().map(|v| v + shift).collect()));
                level
            })
            .collect();
        Self::from_levels(self.n_vertices + other.n_vertices, levels, self.capped || other.capped)
    }
}

fn faces(s: &Simplex) -> Vec<Simplex> {
    (0..s.len())
        .map(|i| {
            let mut f = s.clone();
            f.remove(i);
            f
        })
        .collect()
}

/// `{"facets": [[v, ...], ...]}`, optionally with the vertex count so that
/// isolated vertices survive a round trip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetList {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_vertices: Option<usize>,
    pub facets: Vec<Simplex>,
}

impl FacetList {
    /// Errors carry the JSON path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))
    }

    pub fn build(&self, limits: &Limits) -> Result<SimplicialComplex> {
        let seen = self.facets.iter().flatten().map(|&v| v as usize + 1).max().unwrap_or(0);
        let n = self.n_vertices.unwrap_or(seen);
        SimplicialComplex::from_facets(n, &self.facets, limits)
    }
}

/// Every simplex of diameter at most `scale`, up to dimension `dim_cap`.
/// Vertex `i` of the complex is index `i` of the metric.
pub fn rips_complex(
    n: usize,
    dist: impl Fn(usize, usize) -> u32,
    scale: u32,
    dim_cap: usize,
    limits: &Limits,
) -> Result<SimplicialComplex> {
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(i, j) <= scale {
                nbrs[i].push(j as u32);
            }
        }
    }
    let mut levels: Vec<Vec<Simplex>> = vec![(0..n as u32).map(|v| vec![v]).collect()];
    // candidate extensions of each simplex: common upper neighbours
    let mut cands: Vec<Vec<u32>> = nbrs.clone();
    let mut total = n;
    limits.check_simplices("Rips complex", total)?;
    let mut capped = false;
    for dim in 1..=dim_cap + 1 {
        let mut next = Vec::new();
        let mut next_cands = Vec::new();
        for (s, cs) in levels[dim - 1].iter().zip(&cands) {
            for (k, &v) in cs.iter().enumerate() {
                let mut t = s.clone();
                t.push(v);
                let common: Vec<u32> = cs[k + 1..]
                    .iter()
                    .copied()
                    .filter(|w| nbrs[v as usize].binary_search(w).is_ok())
                    .collect();
                next.push(t);
                next_cands.push(common);
            }
        }
        if next.is_empty() {
            break;
        }
        if dim == dim_cap + 1 {
            capped = true;
            break;
        }
        total += next.len();
        limits.check_simplices("Rips complex", total)?;
        levels.push(next);
        cands = next_cands;
    }
    Ok(SimplicialComplex::from_levels(n, levels, capped))
}

/// The three vertex filters of a depth window on an augmented space, as
/// sorted vertex ids: `V_r` (depth ≥ r), `V^R` (depth ≤ R) and
/// `V_r^R = V_r ∩ V^R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthWindow {
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
    pub window: Vec<u32>,
}

/// Requires `r + D < R`.
pub fn depth_window(aug: &AugGraph, r: u32, upper: u32, scale: u32) -> Result<DepthWindow> {
    if r + scale >= upper {
        return Err(Error::pre(format!("depth window needs r + D < R, got r={r}, D={scale}, R={upper}")));
    }
    let mut out = DepthWindow {
        lower: Vec::new(),
        upper: Vec::new(),
        window: Vec::new(),
    };
    for id in 0..aug.n_vertices() as u32 {
        let l = match aug.vertex(id) {
            AugVertex::Cayley(_) => 0,
            AugVertex::Horo { depth, .. } => depth,
        };
        if l >= r {
            out.lower.push(id);
        }
        if l <= upper {
            out.upper.push(id);
        }
        if l >= r && l <= upper {
            out.window.push(id);
        }
    }
    Ok(out)
}

/// The Rips complex of `vertices` (ids into `aug`) under the augmented
/// graph metric.
pub fn rips_on_augmented(
    aug: &AugGraph,
    vertices: &[u32],
    scale: u32,
    dim_cap: usize,
    limits: &Limits,
) -> Result<SimplicialComplex> {
    let d = crate::graph::DistanceMatrix::from_graph(aug.graph(), vertices)?;
    rips_complex(vertices.len(), |i, j| d.get(i, j), scale, dim_cap, limits)
}

/// Boundary of the `(n+1)`-vertex simplex, a triangulated `S^{n-1}`.
pub fn simplex_boundary(n: usize) -> SimplicialComplex {
    let verts: Vec<u32> = (0..=n as u32).collect();
    let facets = faces(&verts);
    SimplicialComplex::from_facets(n + 1, &facets, &Limits::default()).expect("small")
}

/// Boundary of the `n`-dimensional cross-polytope on vertices `±e_i`
/// (`2i` for `+e_i`, `2i+1` for `-e_i`), a triangulated `S^{n-1}`.
pub fn cross_polytope_boundary(n: usize) -> SimplicialComplex {
    let facets: Vec<Simplex> = (0..1u32 << n)
        .map(|signs| (0..n as u32).map(|i| 2 * i + ((signs >> i) & 1)).collect())
        .collect();
    SimplicialComplex::from_facets(2 * n, &facets, &Limits::default()).expect("small")
}

/// The 6-vertex triangulation of the real projective plane (the quotient
/// of the icosahedron by the antipodal map).
pub fn projective_plane() -> SimplicialComplex {
    let facets: Vec<Simplex> = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 1, 5],
        [1, 2, 4],
        [2, 3, 5],
        [1, 3, 4],
        [2, 4, 5],
        [1, 3, 5],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect();
    SimplicialComplex::from_facets(6, &facets, &Limits::default()).expect("small")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmented::build_augmented;
    use crate::group::{coset_order, GroupPair};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn triangle_and_path() {
        let tri = rips_complex(3, |_, _| 1, 1, 3, &lim()).unwrap();
        assert_eq!((tri.count(0), tri.count(1), tri.count(2)), (3, 3, 1));
        let path = rips_complex(3, |i, j| i.abs_diff(j) as u32, 1, 3, &lim()).unwrap();
        assert_eq!((path.count(1), path.count(2)), (2, 0));
    }

    #[test]
    fn rips_agrees_with_clique_definition() {
        let pts: Vec<(i32, i32)> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let d = |i: usize, j: usize| pts[i].0.abs_diff(pts[j].0) + pts[i].1.abs_diff(pts[j].1);
        let c = rips_complex(9, d, 2, 4, &lim()).unwrap();
        for size in 1..=4usize {
            let mut expect = 0;
            for mask in 0u32..(1 << 9) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let vs: Vec<usize> = (0..9).filter(|&b| mask & (1 << b) != 0).collect();
                if vs.iter().all(|&a| vs.iter().all(|&b| d(a, b) <= 2)) {
                    expect += 1;
                    let s: Simplex = vs.iter().map(|&v| v as u32).collect();
                    assert!(c.contains(&s));
                }
            }
            assert_eq!(c.count(size - 1), expect, "dim {}", size - 1);
        }
        assert!(c.boundary_squared_is_zero());
    }

    #[test]
    fn cap_marks_truncation() {
        let full = rips_complex(5, |_, _| 1, 1, 2, &lim()).unwrap();
        assert!(full.is_capped());
        assert_eq!(full.dim(), Some(2));
        let exact = rips_complex(3, |_, _| 1, 1, 2, &lim()).unwrap();
        assert!(!exact.is_capped());
    }

    #[test]
    fn simplex_budget() {
        let tight = Limits {
            max_vertices: 100,
            max_simplices: 10,
        };
        let err = rips_complex(6, |_, _| 1, 1, 3, &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn facets_round_trip() {
        let rp2 = projective_plane();
        assert_eq!(rp2.facets().len(), 10);
        let json = serde_json::to_string(&rp2.to_facets_json()).unwrap();
        let back: FacetList = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build(&lim()).unwrap(), rp2);
        assert_eq!(rp2.euler_characteristic(), 1);
    }

    #[test]
    fn model_spheres() {
        let s1 = cross_polytope_boundary(2);
        assert_eq!((s1.count(0), s1.count(1), s1.dim()), (4, 4, Some(1)));
        let oct = cross_polytope_boundary(3);
        assert_eq!((oct.count(0), oct.count(1), oct.count(2)), (6, 12, 8));
        let tet = simplex_boundary(3);
        assert_eq!((tet.count(0), tet.count(2), tet.dim()), (4, 4, Some(2)));
    }

    #[test]
    fn subdivision_counts() {
        let sd = simplex_boundary(2).barycentric_subdivision(&lim()).unwrap();
        // hexagon
        assert_eq!((sd.count(0), sd.count(1), sd.dim()), (6, 6, Some(1)));
        let sd2 = projective_plane().barycentric_subdivision(&lim()).unwrap();
        assert_eq!(sd2.count(2), 60);
        assert_eq!(sd2.euler_characteristic(), 1);
        assert!(sd2.boundary_squared_is_zero());
    }

    #[test]
    fn containment_across_scales() {
        let d = |i: usize, j: usize| ((i * 7) % 11).abs_diff((j * 7) % 11) as u32;
        let small = rips_complex(11, d, 2, 3, &lim()).unwrap();
        let big = rips_complex(11, d, 4, 3, &lim()).unwrap();
        assert!(small.is_subcomplex_of(&big));
        assert!(!big.is_subcomplex_of(&small));
    }

    #[test]
    fn depth_window_counts() {
        let order = coset_order(&GroupPair::free_group_cyclic_peripheral(), 2, &lim()).unwrap();
        let aug = build_augmented(&order, 2, 5, &lim()).unwrap();
        let glued: usize = aug.blocks().iter().map(|b| b.members.len()).sum();
        let w = depth_window(&aug, 1, 4, 2).unwrap();
        assert_eq!(w.window.len(), glued * 4);
        assert_eq!(w.lower.len(), glued * 5);
        assert_eq!(w.upper.len(), aug.n_cayley() + glued * 4);
        let all = depth_window(&aug, 1, 5, 0).unwrap();
        assert_eq!(all.upper.len(), aug.n_vertices());
        assert_eq!(depth_window(&aug, 3, 4, 0).unwrap().window.len(), glued * 2);
        assert!(depth_window(&aug, 2, 4, 2).is_err());
    }

    #[test]
    fn induced_and_union() {
        let oct = cross_polytope_boundary(3);
        let part = oct.induced(&[0, 1, 2]).unwrap();
        assert_eq!(part.count(1), 2);
        let two = oct.disjoint_union(&oct);
        assert_eq!(two.count(2), 16);
        assert_eq!(two.n_vertices(), 12);
    }
}
