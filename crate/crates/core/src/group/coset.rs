use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use super::{FactorKind, GroupElement, GroupModel, Run};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// A peripheral subgroup generated by a subset of the basis generators.
/// Normal forms of its elements are exactly the normal forms using only
/// those generators, so membership is a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peripheral {
    gens: Vec<u32>,
    mask: Vec<bool>,
    label: String,
}

impl Peripheral {
    pub fn from_generators(model: &GroupModel, mut gens: Vec<u32>) -> Result<Self> {
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() {
            return Err(Error::config("peripherals", "a peripheral subgroup needs at least one generator"));
        }
        let mut mask = vec![false; model.num_generators()];
        for &g in &gens {
            let slot = mask
                .get_mut(g as usize)
                .ok_or_else(|| Error::config("peripherals.generators", format!("generator {g} out of range")))?;
            *slot = true;
        }
        let label = format!(
            "<{}>",
            gens.iter().map(|&g| model.generator_name(g)).collect::<Vec<_>>().join(",")
        );
        Ok(Peripheral { gens, mask, label })
    }

    pub fn from_factor(model: &GroupModel, factor: usize) -> Result<Self> {
        let f = model
            .factors()
            .get(factor)
            .ok_or_else(|| Error::config("peripherals.factor", format!("factor {factor} out of range")))?;
        Self::from_generators(model, f.generators().collect())
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains_gen(&self, gen: u32) -> bool {
        self.mask[gen as usize]
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.runs.iter().all(|r| self.contains_gen(r.gen))
    }

    /// Whether the subgroup is free abelian (all generators in one free
    /// abelian factor) of the given rank.
    pub fn is_free_abelian_of_rank(&self, model: &GroupModel, n: usize) -> bool {
        self.gens.len() == n
            && self.gens.iter().all(|&g| {
                let f = model.factor_of(g);
                f == model.factor_of(self.gens[0]) && model.factors()[f].kind == FactorKind::FreeAbelian
            })
    }

    /// Shortlex-minimal representative of `gP`: strip the longest suffix
    /// lying in the subgroup.
    pub fn coset_rep(&self, model: &GroupModel, g: &GroupElement) -> GroupElement {
        let mut runs = g.runs.clone();
        while let Some(last) = runs.last() {
            let f = model.factor_of(last.gen);
            let mut start = runs.len();
            while start > 0 && model.factor_of(runs[start - 1].gen) == f {
                start -= 1;
            }
            match model.factors()[f].kind {
                FactorKind::FreeAbelian => {
                    let kept: Vec<Run> = runs[start..]
                        .iter()
                        .copied()
                        .filter(|r| !self.contains_gen(r.gen))
                        .collect();
                    let emptied = kept.is_empty();
                    runs.truncate(start);
                    runs.extend(kept);
                    if !emptied {
                        break;
                    }
                }
                FactorKind::FreeGroup => {
                    let mut end = runs.len();
                    while end > start && self.contains_gen(runs[end - 1].gen) {
                        end -= 1;
                    }
                    runs.truncate(end);
                    if end > start {
                        break;
                    }
                }
            }
        }
        GroupElement { model: g.model, runs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeripheralStructure {
    subgroups: Vec<Peripheral>,
}

impl PeripheralStructure {
    pub fn new(subgroups: Vec<Peripheral>) -> Self {
        PeripheralStructure { subgroups }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn k(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// The peripheral `P_r` for `r` in `1..=k`.
    pub fn get(&self, r: usize) -> &Peripheral {
        &self.subgroups[r - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Peripheral> {
        self.subgroups.iter()
    }
}

/// A group together with its peripheral family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPair {
    pub model: GroupModel,
    pub peripherals: PeripheralStructure,
}

impl GroupPair {
    pub fn new(model: GroupModel, peripherals: PeripheralStructure) -> Self {
        GroupPair { model, peripherals }
    }

    /// `(F_2, {<a>})`.
    pub fn free_group_cyclic_peripheral() -> Self {
        let model = GroupModel::free_group(2).expect("rank 2");
        let p = Peripheral::from_generators(&model, vec![0]).expect("generator a");
        GroupPair::new(model, PeripheralStructure::new(vec![p]))
    }

    /// `(Z^n * Z^n, {Z^n, Z^n})`.
    pub fn abelian_free_product(n: u32) -> Self {
        use super::GroupKind::FreeAbelian;
        let model = GroupModel::free_product(vec![FreeAbelian(n), FreeAbelian(n)]).expect("valid rank");
        let ps = (0..2)
            .map(|f| Peripheral::from_factor(&model, f).expect("factor"))
            .collect();
        GroupPair::new(model, PeripheralStructure::new(ps))
    }

    /// Heuristic infinite-index check: the number of cosets of each
    /// peripheral meeting the ball must grow from `radius` to `radius + 1`.
    pub fn check_infinite_index(&self, radius: usize, limits: &Limits) -> Result<()> {
        let small = self.model.ball(radius, limits)?;
        let large = self.model.ball(radius + 1, limits)?;
        for (idx, p) in self.peripherals.iter().enumerate() {
            let count = |ball: &[GroupElement]| {
                ball.iter()
                    .map(|g| p.coset_rep(&self.model, g))
                    .collect::<BTreeSet<_>>()
                    .len()
            };
            if count(&small) == count(&large) {
                return Err(Error::config(
                    format!("peripherals[{idx}]"),
                    format!("{} appears to have finite index", p.label()),
                ));
            }
        }
        Ok(())
    }
}

/// Position `i >= 1` in the order of cosets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CosetIndex(usize);

impl CosetIndex {
    pub fn new(i: usize) -> Self {
        assert!(i >= 1, "coset indices start at 1");
        CosetIndex(i)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `(i) = ((i - 1) mod k) + 1`, so residues live in `1..=k` and
    /// `g_r` represents `eP_r`.
    pub fn residue(self, k: usize) -> usize {
        (self.0 - 1) % k + 1
    }

    /// Position among the cosets of `P_(i)`: `i = a*k + (i)`.
    pub fn slot(self, k: usize) -> usize {
        (self.0 - 1) / k
    }

    pub fn from_slot(slot: usize, residue: usize, k: usize) -> Self {
        CosetIndex(slot * k + residue)
    }
}

impl fmt::Display for CosetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Finite prefix of an order of cosets `{g_n}`: every coset of every
/// peripheral meeting the ball of radius `cutoff` appears exactly once.
/// Per residue, cosets are listed by shortlex order of their minimal
/// representatives, then interleaved so that `g_{ak+r}` is the `a`-th coset
/// of `P_r`.
#[derive(Debug, Clone)]
pub struct CosetOrder {
    pair: GroupPair,
    cutoff: usize,
    by_residue: Vec<Vec<GroupElement>>,
    lookup: HashMap<(usize, GroupElement), CosetIndex>,
}

pub fn coset_order(pair: &GroupPair, cutoff: usize, limits: &Limits) -> Result<CosetOrder> {
    CosetOrder::build(pair, cutoff, limits)
}

impl CosetOrder {
    pub fn build(pair: &GroupPair, cutoff: usize, limits: &Limits) -> Result<Self> {
        let k = pair.peripherals.k();
        let ball = if k == 0 {
            Vec::new()
        } else {
            pair.model.ball(cutoff, limits)?
        };
        let mut by_residue = Vec::with_capacity(k);
        let mut lookup = HashMap::new();
        for r in 1..=k {
            let p = pair.peripherals.get(r);
            // Ball elements are visited in shortlex order, and a minimal
            // representative is fixed by stripping, so filtering keeps order.
            let reps: Vec<GroupElement> = ball
                .iter()
                .filter(|g| p.coset_rep(&pair.model, g) == **g)
                .cloned()
                .collect();
            for (slot, g) in reps.iter().enumerate() {
                lookup.insert((r, g.clone()), CosetIndex::from_slot(slot, r, k));
            }
            by_residue.push(reps);
        }
        Ok(CosetOrder {
            pair: pair.clone(),
            cutoff,
            by_residue,
            lookup,
        })
    }

    pub fn pair(&self) -> &GroupPair {
        &self.pair
    }

    pub fn model(&self) -> &GroupModel {
        &self.pair.model
    }

    pub fn k(&self) -> usize {
        self.pair.peripherals.k()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn peripheral(&self, i: CosetIndex) -> &Peripheral {
        self.pair.peripherals.get(i.residue(self.k()))
    }

    /// `g_i`, if index `i` is materialized.
    pub fn rep(&self, i: CosetIndex) -> Option<&GroupElement> {
        let k = self.k();
        if k == 0 {
            return None;
        }
        self.by_residue[i.residue(k) - 1].get(i.slot(k))
    }

    /// Materialized indices in increasing order.
    pub fn indices(&self) -> Vec<CosetIndex> {
        let k = self.k();
        let mut out: Vec<CosetIndex> = self
            .by_residue
            .iter()
            .enumerate()
            .flat_map(|(r0, reps)| (0..reps.len()).map(move |slot| CosetIndex::from_slot(slot, r0 + 1, k)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Materialized indices whose representative has length at most `len`.
    pub fn indices_within(&self, len: usize) -> Vec<CosetIndex> {
        self.indices()
            .into_iter()
            .filter(|&i| self.rep(i).is_some_and(|g| g.len() <= len))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.by_residue.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The index of the coset `gP_r`, if materialized.
    pub fn index_of(&self, residue: usize, g: &GroupElement) -> Option<CosetIndex> {
        let rep = self.pair.peripherals.get(residue).coset_rep(&self.pair.model, g);
        self.lookup.get(&(residue, rep)).copied()
    }

    fn rep_or_err(&self, i: CosetIndex) -> Result<&GroupElement> {
        self.rep(i)
            .ok_or_else(|| Error::pre(format!("coset index {i} is not materialized (cutoff {})", self.cutoff)))
    }

    /// `φ_i(h)`: the unique `j` with `h g_i P_(i) = g_j P_(i)`.
    pub fn phi(&self, i: CosetIndex, h: &GroupElement) -> Result<CosetIndex> {
        let model = &self.pair.model;
        let gi = self.rep_or_err(i)?;
        let hg = model.multiply(h, gi)?;
        let r = i.residue(self.k());
        self.index_of(r, &hg).ok_or_else(|| {
            Error::miss(format!(
                "coset {}{} lies beyond cutoff {}",
                model.format(&self.pair.peripherals.get(r).coset_rep(model, &hg)),
                self.pair.peripherals.get(r).label(),
                self.cutoff
            ))
        })
    }

    /// `ψ_i(h) = g_{φ_i(h)}⁻¹ h g_i`, an element of `P_(i)`.
    pub fn psi(&self, i: CosetIndex, h: &GroupElement) -> Result<GroupElement> {
        let j = self.phi(i, h)?;
        let model = &self.pair.model;
        let gi = self.rep_or_err(i)?;
        let gj = self.rep_or_err(j)?;
        let value = model.mul_unchecked(&model.inv_unchecked(gj), &model.mul_unchecked(h, gi));
        if !self.peripheral(i).contains(&value) {
            return Err(Error::Internal(format!(
                "psi_{i}({}) = {} is not in {}",
                model.format(h),
                model.format(&value),
                self.peripheral(i).label()
            )));
        }
        Ok(value)
    }
}
