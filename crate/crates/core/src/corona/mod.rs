//! Finite-stage models of the boundary of a free or free-product group,
//! the collapse of peripheral limit sets to parabolic points, and the
//! blow-up that replaces each parabolic point by a peripheral corona.
//!
//! A stage-`d` cylinder is a normal-form word of length exactly `d`; it
//! stands for every boundary point whose ray starts with that word.

mod checks;

pub use checks::{action_check, corona_betti, roundtrip_check, ActionCheckReport, CoronaBettiReport, RoundtripReport};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{CosetIndex, CosetOrder, GroupElement, GroupKind, GroupModel, Peripheral};
use crate::limits::Limits;
use crate::rips::{cross_polytope_boundary, SimplicialComplex};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryCylinder {
    pub word: GroupElement,
    pub stage: usize,
}

impl BoundaryCylinder {
    pub fn new(word: GroupElement) -> Self {
        let stage = word.len();
        BoundaryCylinder { word, stage }
    }

    /// The stage-`d` cylinder containing this one.
    pub fn coarsen(&self, d: usize) -> BoundaryCylinder {
        BoundaryCylinder::new(self.word.prefix(d))
    }
}

/// All cylinders at stage `d`, in shortlex order.
pub fn stage_boundary(model: &GroupModel, d: usize, limits: &Limits) -> Result<Vec<BoundaryCylinder>> {
    if matches!(model.kind(), GroupKind::FreeAbelian(_)) {
        return Err(Error::Unsupported("cylinder boundaries need a free group or free product".into()));
    }
    if d == 0 {
        return Err(Error::pre("stage depth must be at least 1"));
    }
    Ok(model.sphere(d, limits)?.into_iter().map(BoundaryCylinder::new).collect())
}

/// Elements of `p` of word length exactly `r`, in shortlex order.
pub fn peripheral_sphere(model: &GroupModel, p: &Peripheral, r: usize, limits: &Limits) -> Result<Vec<GroupElement>> {
    let gens: Vec<GroupElement> = model
        .symmetric_generators()
        .into_iter()
        .filter(|s| p.contains(s))
        .collect();
    let mut layer = vec![model.identity()];
    let mut seen: HashSet<GroupElement> = layer.iter().cloned().collect();
    for _ in 0..r {
        let mut next = Vec::new();
        for g in &layer {
            for s in &gens {
                let x = model.mul_unchecked(g, s);
                if seen.insert(x.clone()) {
                    next.push(x);
                }
            }
        }
        limits.check_vertices("peripheral ball", seen.len())?;
        next.sort();
        layer = next;
    }
    Ok(layer)
}

/// The stage-`d` cylinders meeting `g_i · ∂P_(i)`: the words `g_i p` with
/// `p ∈ P_(i)` of length `d - |g_i|`.
pub fn limit_set_cylinders(order: &CosetOrder, i: CosetIndex, d: usize, limits: &Limits) -> Result<Vec<BoundaryCylinder>> {
    let model = order.model();
    let gi = order
        .rep(i)
        .ok_or_else(|| Error::miss(format!("coset {i} is not materialized")))?;
    if gi.len() >= d {
        return Err(Error::miss(format!(
            "limit set of coset {i} (|g_i| = {}) is not visible at stage {d}",
            gi.len()
        )));
    }
    let sphere = peripheral_sphere(model, order.peripheral(i), d - gi.len(), limits)?;
    let mut out = Vec::with_capacity(sphere.len());
    for p in sphere {
        let w = model.mul_unchecked(gi, &p);
        if w.len() != d {
            return Err(Error::Internal(format!(
                "{} · {} is not reduced",
                model.format(gi),
                model.format(&p)
            )));
        }
        out.push(BoundaryCylinder::new(w));
    }
    out.sort();
    Ok(out)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassLabel {
    /// A singleton class, by cylinder position.
    Conical(usize),
    Parabolic(CosetIndex),
}

/// The partition of the stage-`d` cylinders into collapsed limit sets and
/// singletons. Classes are numbered by their first cylinder.
#[derive(Debug, Clone)]
pub struct DecompositionClasses {
    stage: usize,
    cylinders: Vec<BoundaryCylinder>,
    position: HashMap<GroupElement, usize>,
    class_of: Vec<usize>,
    classes: Vec<(ClassLabel, Vec<usize>)>,
    parabolic: BTreeMap<CosetIndex, usize>,
}

/// Collapses the limit set of every materialized coset.
pub fn collapse(order: &CosetOrder, d: usize, limits: &Limits) -> Result<DecompositionClasses> {
    collapse_selected(order, d, &order.indices(), limits)
}

/// Collapses the limit sets of `selected` only; every other cylinder is a
/// singleton.
pub fn collapse_selected(
    order: &CosetOrder,
    d: usize,
    selected: &[CosetIndex],
    limits: &Limits,
) -> Result<DecompositionClasses> {
    let cylinders = stage_boundary(order.model(), d, limits)?;
    let position: HashMap<GroupElement, usize> =
        cylinders.iter().enumerate().map(|(i, c)| (c.word.clone(), i)).collect();
    let mut uf = UnionFind::new(cylinders.len());
    let mut owner: Vec<Option<CosetIndex>> = vec![None; cylinders.len()];
    for &i in selected {
        let limit = limit_set_cylinders(order, i, d, limits)?;
        let mut first = None;
        for c in &limit {
            let pos = *position
                .get(&c.word)
                .ok_or_else(|| Error::Internal(format!("limit cylinder of {i} missing from stage {d}")))?;
            if let Some(other) = owner[pos] {
                if other != i {
                    return Err(Error::MalnormalityViolation {
                        first: other.get(),
                        second: i.get(),
                        cylinder: order.model().format(&c.word),
                    });
                }
            }
            owner[pos] = Some(i);
            match first {
                None => first = Some(pos),
                Some(f) => uf.union(f, pos),
            }
        }
    }
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(cylinders.len());
    let mut classes: Vec<(ClassLabel, Vec<usize>)> = Vec::new();
    let mut parabolic = BTreeMap::new();
    for pos in 0..cylinders.len() {
        let root = uf.find(pos);
        let id = *root_class.entry(root).or_insert_with(|| {
            let label = match owner[pos] {
                Some(i) => {
                    parabolic.insert(i, classes.len());
                    ClassLabel::Parabolic(i)
                }
                None => ClassLabel::Conical(pos),
            };
            classes.push((label, Vec::new()));
            classes.len() - 1
        });
        classes[id].1.push(pos);
        class_of.push(id);
    }
    Ok(DecompositionClasses {
        stage: d,
        cylinders,
        position,
        class_of,
        classes,
        parabolic,
    })
}

impl DecompositionClasses {
    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn cylinders(&self) -> &[BoundaryCylinder] {
        &self.cylinders
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn label(&self, class: usize) -> ClassLabel {
        self.classes[class].0
    }

    pub fn members(&self, class: usize) -> &[usize] {
        &self.classes[class].1
    }

    /// The class of a stage-`d` word.
    pub fn class_of_word(&self, w: &GroupElement) -> Option<usize> {
        self.position.get(w).map(|&p| self.class_of[p])
    }

    pub fn parabolic_class(&self, i: CosetIndex) -> Option<usize> {
        self.parabolic.get(&i).copied()
    }

    pub fn parabolic_cosets(&self) -> impl Iterator<Item = CosetIndex> + '_ {
        self.parabolic.keys().copied()
    }
}

/// The corona `W_i` glued in for a parabolic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoronaModel {
    /// `{+∞, −∞}` for a cyclic peripheral; point 0 is `+`.
    TwoPoint,
    /// Boundary of the `n`-dimensional cross-polytope, an `S^{n-1}`;
    /// point `2j` is `+e_j`, point `2j+1` is `-e_j`.
    SphereComplex(usize),
}

impl CoronaModel {
    /// TwoPoint for ℤ, SphereComplex(n) for ℤⁿ with `n >= 2`.
    pub fn for_peripheral(model: &GroupModel, p: &Peripheral) -> Result<Self> {
        match p.rank() {
            1 => Ok(CoronaModel::TwoPoint),
            n if p.is_free_abelian_of_rank(model, n) => Ok(CoronaModel::SphereComplex(n)),
            _ => Err(Error::Unsupported(format!("no corona model for peripheral {}", p.label()))),
        }
    }

    pub fn n_points(&self) -> usize {
        match self {
            CoronaModel::TwoPoint => 2,
            CoronaModel::SphereComplex(n) => 2 * n,
        }
    }

    pub fn point_label(&self, p: usize) -> String {
        match self {
            CoronaModel::TwoPoint => if p == 0 { "+" } else { "-" }.to_string(),
            CoronaModel::SphereComplex(_) => format!("{}e{}", if p.is_multiple_of(2) { "+" } else { "-" }, p / 2 + 1),
        }
    }

    pub fn complex(&self) -> SimplicialComplex {
        match self {
            CoronaModel::TwoPoint => cross_polytope_boundary(1),
            CoronaModel::SphereComplex(n) => cross_polytope_boundary(*n),
        }
    }

    /// The action of `ψ ∈ P` on `W`. Translations fix both ends of a line
    /// and every direction at infinity of ℤⁿ, so it is trivial.
    pub fn act(&self, _psi: &GroupElement, p: usize) -> usize {
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlownPoint {
    /// A point of `Λ`, by its stage cylinder word.
    Conical(GroupElement),
    Corona { coset: CosetIndex, point: usize },
}

/// Conical classes plus one corona copy per collapsed coset, with the
/// projection `π` back to the collapsed classes.
#[derive(Debug, Clone)]
pub struct BlownCoronaStage {
    classes: DecompositionClasses,
    models: BTreeMap<CosetIndex, CoronaModel>,
    points: Vec<BlownPoint>,
    projection: Vec<usize>,
}

pub fn blow_up(
    classes: DecompositionClasses,
    model_for: impl Fn(CosetIndex) -> Option<CoronaModel>,
) -> Result<BlownCoronaStage> {
    let mut models = BTreeMap::new();
    let mut points = Vec::new();
    let mut projection = Vec::new();
    for class in 0..classes.len() {
        match classes.label(class) {
            ClassLabel::Conical(pos) => {
                points.push(BlownPoint::Conical(classes.cylinders[pos].word.clone()));
                projection.push(class);
            }
            ClassLabel::Parabolic(i) => {
                let w = model_for(i).ok_or(Error::MissingCoronaModel(i.get()))?;
                models.insert(i, w);
                for point in 0..w.n_points() {
                    points.push(BlownPoint::Corona { coset: i, point });
                    projection.push(class);
                }
            }
        }
    }
    Ok(BlownCoronaStage {
        classes,
        models,
        points,
        projection,
    })
}

/// Blow-up with the default corona of each peripheral.
pub fn blow_up_default(order: &CosetOrder, classes: DecompositionClasses) -> Result<BlownCoronaStage> {
    let mut models = BTreeMap::new();
    for i in classes.parabolic_cosets() {
        models.insert(i, CoronaModel::for_peripheral(order.model(), order.peripheral(i))?);
    }
    blow_up(classes, |i| models.get(&i).copied())
}

impl BlownCoronaStage {
    pub fn stage(&self) -> usize {
        self.classes.stage
    }

    pub fn classes(&self) -> &DecompositionClasses {
        &self.classes
    }

    pub fn points(&self) -> &[BlownPoint] {
        &self.points
    }

    pub fn corona_model(&self, i: CosetIndex) -> Option<CoronaModel> {
        self.models.get(&i).copied()
    }

    /// `π` on point `k`, as a class id.
    pub fn project(&self, k: usize) -> usize {
        self.projection[k]
    }

    /// `π` on an arbitrary blown point of this stage.
    pub fn project_point(&self, x: &BlownPoint) -> Option<usize> {
        match x {
            BlownPoint::Conical(w) => self.classes.class_of_word(w),
            BlownPoint::Corona { coset, .. } => self.classes.parabolic_class(*coset),
        }
    }

    pub fn fiber(&self, class: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&k| self.projection[k] == class).collect()
    }

    pub fn label(&self, model: &GroupModel, x: &BlownPoint) -> String {
        match x {
            BlownPoint::Conical(w) => model.format(w),
            BlownPoint::Corona { coset, point } => {
                let tag = self
                    .models
                    .get(coset)
                    .map_or_else(|| point.to_string(), |m| m.point_label(*point));
                format!("({coset},{tag})")
            }
        }
    }
}

/// `α(h)·x`. Conical points move by left multiplication and truncation to
/// stage `d`; corona points move by `(i, w) ↦ (φ_i(h), ψ_i(h)·w)`.
pub fn act(order: &CosetOrder, d: usize, h: &GroupElement, x: &BlownPoint, model_of: impl Fn(CosetIndex) -> CoronaModel) -> Result<BlownPoint> {
    let model = order.model();
    match x {
        BlownPoint::Conical(w) => {
            let hw = model.multiply(h, w)?;
            if hw.len() < d {
                return Err(Error::StageUnderflow {
                    word: model.format(&hw),
                    stage: d,
                });
            }
            Ok(BlownPoint::Conical(hw.prefix(d)))
        }
        BlownPoint::Corona { coset, point } => {
            let j = order.phi(*coset, h)?;
            let psi = order.psi(*coset, h)?;
            Ok(BlownPoint::Corona {
                coset: j,
                point: model_of(*coset).act(&psi, *point),
            })
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Conical(pos) => write!(f, "conical#{pos}"),
            ClassLabel::Parabolic(i) => write!(f, "s_{i}"),
        }
    }
}
