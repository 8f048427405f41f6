use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::snf::sparse_invariant_factors;
use super::SimplicialComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomologyKind {
    Homology,
    ReducedHomology,
    ReducedCohomology,
}

/// One degree: free rank and the invariant factors (> 1) of the torsion.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeGroup {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl Serialize for DegreeGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let torsion: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|t| match u64::try_from(t) {
                Ok(v) => serde_json::Value::from(v),
                Err(_) => serde_json::Value::from(t.to_string()),
            })
            .collect();
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("betti", &self.betti)?;
        m.serialize_entry("torsion", &torsion)?;
        m.end()
    }
}

/// Groups in degrees `0..degrees.len()`; only degrees that the built part
/// of the complex determines exactly are reported. Serialized as
/// `{"0": {"betti": .., "torsion": [..]}, ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyResult {
    pub kind: HomologyKind,
    pub degrees: Vec<DegreeGroup>,
}

impl HomologyResult {
    pub fn betti(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |g| g.betti)
    }

    pub fn torsion(&self, k: usize) -> &[BigInt] {
        self.degrees.get(k).map_or(&[], |g| g.torsion.as_slice())
    }

    pub fn bettis(&self) -> Vec<usize> {
        self.degrees.iter().map(|g| g.betti).collect()
    }

    /// Whether every reported degree is zero.
    pub fn is_trivial(&self) -> bool {
        self.degrees.iter().all(|g| g.betti == 0 && g.torsion.is_empty())
    }
}

impl Serialize for HomologyResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let by_degree: BTreeMap<usize, &DegreeGroup> = self.degrees.iter().enumerate().collect();
        let mut m = s.serialize_map(Some(by_degree.len()))?;
        for (k, g) in by_degree {
            m.serialize_entry(&k.to_string(), g)?;
        }
        m.end()
    }
}

/// Highest degree determined exactly by the built simplices.
fn exact_top(c: &SimplicialComplex) -> Option<usize> {
    match c.dim() {
        None => None,
        Some(d) if c.is_capped() => d.checked_sub(1),
        Some(d) => Some(d),
    }
}

/// Invariant factors of `∂_k` for `k = 0..=top+1`; degree 0 is the
/// augmentation when `reduced`.
fn boundary_factors(c: &SimplicialComplex, top: usize, reduced: bool) -> Vec<Vec<BigInt>> {
    (0..=top + 1)
        .map(|k| {
            if k == 0 {
                return if reduced && c.count(0) > 0 { vec![BigInt::one()] } else { Vec::new() };
            }
            sparse_invariant_factors(c.count(k - 1), &c.boundary_columns(k))
        })
        .collect()
}

fn assemble(c: &SimplicialComplex, kind: HomologyKind, top: usize, rank: &[usize], torsion_from: impl Fn(usize) -> Vec<BigInt>) -> HomologyResult {
    let degrees = (0..=top)
        .map(|k| DegreeGroup {
            betti: c.count(k) - rank[k] - rank[k + 1],
            torsion: torsion_from(k),
        })
        .collect();
    HomologyResult { kind, degrees }
}

fn homology_impl(c: &SimplicialComplex, reduced: bool) -> HomologyResult {
    let kind = if reduced { HomologyKind::ReducedHomology } else { HomologyKind::Homology };
    let Some(top) = exact_top(c) else {
        return HomologyResult { kind, degrees: Vec::new() };
    };
    let factors = boundary_factors(c, top, reduced);
    let rank: Vec<usize> = factors.iter().map(Vec::len).collect();
    let unit = BigInt::one();
    assemble(c, kind, top, &rank, |k| factors[k + 1].iter().filter(|d| **d != unit).cloned().collect())
}

pub fn homology(c: &SimplicialComplex) -> HomologyResult {
    homology_impl(c, false)
}

pub fn reduced_homology(c: &SimplicialComplex) -> HomologyResult {
    homology_impl(c, true)
}

/// Computed from the coboundary matrices directly rather than by the
/// universal coefficient theorem, so it doubles as a cross-check.
pub fn reduced_cohomology(c: &SimplicialComplex) -> HomologyResult {
    let kind = HomologyKind::ReducedCohomology;
    let Some(top) = exact_top(c) else {
        return HomologyResult { kind, degrees: Vec::new() };
    };
    // cofactors[k]: invariant factors of δ^{k-1}: C^{k-1} -> C^k, with
    // δ^{-1} the coaugmentation
    let cofactors: Vec<Vec<BigInt>> = (0..=top + 1)
        .map(|k| {
            if k == 0 {
                return if c.count(0) > 0 { vec![BigInt::one()] } else { Vec::new() };
            }
            sparse_invariant_factors(c.count(k), &coboundary_columns(c, k - 1))
        })
        .collect();
    let rank: Vec<usize> = cofactors.iter().map(Vec::len).collect();
    let unit = BigInt::one();
    assemble(c, kind, top, &rank, |k| cofactors[k].iter().filter(|d| **d != unit).cloned().collect())
}

/// `δ^k` as sparse columns indexed by `k`-simplices, rows by
/// `(k+1)`-simplices.
fn coboundary_columns(c: &SimplicialComplex, k: usize) -> Vec<Vec<(u32, i64)>> {
    let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); c.count(k)];
    for (row, s) in c.simplices(k + 1).iter().enumerate() {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let col = c.position(&face).expect("closed under faces");
            cols[col].push((row as u32, if i % 2 == 0 { 1 } else { -1 }));
        }
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::super::{cross_polytope_boundary, projective_plane, rips_complex, simplex_boundary};
    use super::*;
    use crate::limits::Limits;

    #[test]
    fn spheres() {
        for n in 1..=4 {
            let h = homology(&simplex_boundary(n));
            let mut expect = vec![0; n];
            expect[0] += 1;
            expect[n - 1] += 1;
            assert_eq!(h.bettis(), expect, "S^{}", n - 1);
        }
        let r = reduced_homology(&cross_polytope_boundary(3));
        assert_eq!(r.bettis(), vec![0, 0, 1]);
    }

    #[test]
    fn projective_plane_torsion() {
        let rp2 = projective_plane();
        let h = homology(&rp2);
        assert_eq!(h.bettis(), vec![1, 0, 0]);
        assert_eq!(h.torsion(1), &[BigInt::from(2)]);
        let co = reduced_cohomology(&rp2);
        assert_eq!(co.bettis(), vec![0, 0, 0]);
        assert_eq!(co.torsion(2), &[BigInt::from(2)]);
        assert!(co.torsion(1).is_empty());
    }

    #[test]
    fn reduced_points() {
        let pts = rips_complex(5, |_, _| 9, 1, 2, &Limits::default()).unwrap();
        assert_eq!(reduced_homology(&pts).bettis(), vec![4]);
        assert_eq!(reduced_cohomology(&pts).bettis(), vec![4]);
        assert_eq!(homology(&pts).bettis(), vec![5]);
    }

    #[test]
    fn capped_complexes_report_exact_degrees_only() {
        // full simplex on 6 points capped at dimension 2
        let c = rips_complex(6, |_, _| 1, 1, 2, &Limits::default()).unwrap();
        let h = reduced_homology(&c);
        assert_eq!(h.degrees.len(), 2);
        assert!(h.is_trivial());
    }

    #[test]
    fn json_shape() {
        let h = homology(&projective_plane());
        let v = serde_json::to_value(&h).unwrap();
        assert_eq!(v["1"]["torsion"], serde_json::json!([2]));
        assert_eq!(v["0"]["betti"], 1);
    }
}
