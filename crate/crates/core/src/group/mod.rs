//! Group models with linear-time normal forms: free abelian groups, free
//! groups, and free products of those.
//!
//! Every element is stored as a canonical list of generator runs. Within a
//! free factor consecutive runs use different generators; within a free
//! abelian factor a syllable lists each generator at most once in increasing
//! order. Because canonical forms are unique, structural equality is group
//! equality.

mod config;
mod coset;

pub use config::{GroupSpec, GroupSpecKind, PairSpec, PeripheralSpec};
pub use coset::{coset_order, CosetIndex, CosetOrder, GroupPair, PeripheralStructure, Peripheral};

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::limits::Limits;

/// Fingerprint of a group model; carried by every element so mixing models
/// is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelId(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    FreeAbelian,
    FreeGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    FreeAbelian(u32),
    FreeGroup(u32),
    FreeProduct(Vec<GroupKind>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    pub first_gen: u32,
    pub rank: u32,
}

impl Factor {
    pub fn generators(&self) -> impl Iterator<Item = u32> {
        self.first_gen..self.first_gen + self.rank
    }
}

/// A power `gen^exp` with `exp != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub gen: u32,
    pub exp: i32,
}

impl Run {
    pub fn new(gen: u32, exp: i32) -> Self {
        Run { gen, exp }
    }
}

#[derive(Debug, Clone)]
pub struct GroupModel {
    kind: GroupKind,
    factors: Vec<Factor>,
    gen_factor: Vec<usize>,
    names: Vec<String>,
    id: ModelId,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for GroupModel {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    model: ModelId,
    runs: Vec<Run>,
}

impl GroupElement {
    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn model_id(&self) -> ModelId {
        self.model
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Word length with respect to the standard symmetric generating set.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.exp.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Letters of the normal-form word, encoded as `2*gen` for a generator
    /// and `2*gen + 1` for its inverse.
    pub fn letters(&self) -> impl Iterator<Item = u32> + '_ {
        self.runs.iter().flat_map(|r| {
            let code = 2 * r.gen + u32::from(r.exp < 0);
            std::iter::repeat_n(code, r.exp.unsigned_abs() as usize)
        })
    }

    /// The first `len` letters of the normal form. A prefix of a canonical
    /// word is itself canonical in every supported model.
    pub fn prefix(&self, len: usize) -> GroupElement {
        let mut runs = Vec::new();
        let mut left = len;
        for r in &self.runs {
            if left == 0 {
                break;
            }
            let n = r.exp.unsigned_abs() as usize;
            if n <= left {
                runs.push(*r);
                left -= n;
            } else {
                runs.push(Run::new(r.gen, r.exp.signum() * left as i32));
                left = 0;
            }
        }
        GroupElement {
            model: self.model,
            runs,
        }
    }
}

impl Ord for GroupElement {
    /// Shortlex: word length first, then lexicographic on letters with
    /// `a < a⁻¹ < b < b⁻¹ < …`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.model
            .cmp(&other.model)
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_runs(&self.runs, None))
    }
}

fn gen_name(gen: u32, total: usize) -> String {
    if total <= 26 {
        char::from(b'a' + gen as u8).to_string()
    } else {
        format!("g{gen}")
    }
}

fn format_runs(runs: &[Run], names: Option<&[String]>) -> String {
    if runs.is_empty() {
        return "e".to_string();
    }
    let mut out = String::new();
    for r in runs {
        match names {
            Some(n) => out.push_str(&n[r.gen as usize]),
            None => {
                out.push('g');
                out.push_str(&r.gen.to_string());
            }
        }
        if r.exp != 1 {
            out.push('^');
            out.push_str(&r.exp.to_string());
        }
    }
    out
}

impl GroupModel {
    pub fn free_abelian(n: u32) -> Result<Self> {
        Self::new(GroupKind::FreeAbelian(n))
    }

    pub fn free_group(rank: u32) -> Result<Self> {
        Self::new(GroupKind::FreeGroup(rank))
    }

    pub fn free_product(factors: Vec<GroupKind>) -> Result<Self> {
        Self::new(GroupKind::FreeProduct(factors))
    }

    pub fn new(kind: GroupKind) -> Result<Self> {
        let mut flat = Vec::new();
        flatten(&kind, &mut flat)?;
        if flat.is_empty() {
            return Err(Error::config("group.factors", "a free product needs at least one factor"));
        }
        let mut factors = Vec::with_capacity(flat.len());
        let mut gen_factor = Vec::new();
        let mut first_gen = 0u32;
        for (idx, (fk, rank)) in flat.into_iter().enumerate() {
            factors.push(Factor {
                kind: fk,
                first_gen,
                rank,
            });
            gen_factor.extend(std::iter::repeat_n(idx, rank as usize));
            first_gen += rank;
        }
        let total = gen_factor.len();
        let names = (0..total as u32).map(|g| gen_name(g, total)).collect();

        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        kind.hash(&mut hasher);
        let id = ModelId(hasher.finish());
        Ok(GroupModel {
            kind,
            factors,
            gen_factor,
            names,
            id,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_of(&self, gen: u32) -> usize {
        self.gen_factor[gen as usize]
    }

    pub fn num_generators(&self) -> usize {
        self.gen_factor.len()
    }

    pub fn generator_name(&self, gen: u32) -> &str {
        &self.names[gen as usize]
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            model: self.id,
            runs: Vec::new(),
        }
    }

    pub fn generator(&self, gen: u32) -> GroupElement {
        assert!((gen as usize) < self.num_generators(), "generator {gen} out of range");
        GroupElement {
            model: self.id,
            runs: vec![Run::new(gen, 1)],
        }
    }

    /// The symmetric generating set 𝒮 in the order `a, a⁻¹, b, b⁻¹, …`.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        (0..self.num_generators() as u32)
            .flat_map(|g| [Run::new(g, 1), Run::new(g, -1)])
            .map(|r| GroupElement {
                model: self.id,
                runs: vec![r],
            })
            .collect()
    }

    /// Normalizes an arbitrary run sequence.
    pub fn from_runs(&self, runs: impl IntoIterator<Item = Run>) -> Result<GroupElement> {
        let mut stack = Vec::new();
        for r in runs {
            if (r.gen as usize) >= self.num_generators() {
                return Err(Error::pre(format!("generator index {} out of range", r.gen)));
            }
            self.push_run(&mut stack, r);
        }
        Ok(GroupElement {
            model: self.id,
            runs: stack,
        })
    }

    /// Coordinate vector for a free abelian model.
    pub fn from_coords(&self, coords: &[i32]) -> Result<GroupElement> {
        if !matches!(self.kind, GroupKind::FreeAbelian(_)) || coords.len() != self.num_generators() {
            return Err(Error::pre("coordinates need a free abelian model of matching rank"));
        }
        self.from_runs(
            coords
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(g, &c)| Run::new(g as u32, c)),
        )
    }

    /// Parses words such as `ab^-1a^2` (or `g0g12^-1` with more than 26
    /// generators). `e` or the empty string is the identity.
    pub fn parse(&self, text: &str) -> Result<GroupElement> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == ['e'] {
            return Ok(self.identity());
        }
        let total = self.num_generators();
        let mut runs = Vec::new();
        let mut i = 0;
        while i < s.len() {
            let gen = if total <= 26 {
                let c = s[i];
                i += 1;
                if !c.is_ascii_lowercase() || (c as u8 - b'a') as usize >= total {
                    return Err(Error::pre(format!("unknown generator `{c}` in `{text}`")));
                }
                u32::from(c as u8 - b'a')
            } else {
                if s[i] != 'g' {
                    return Err(Error::pre(format!("expected `g<index>` in `{text}`")));
                }
                i += 1;
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = s[start..i].iter().collect();
                digits
                    .parse::<u32>()
                    .map_err(|_| Error::pre(format!("bad generator index in `{text}`")))?
            };
            let mut exp = 1i32;
            if i < s.len() && s[i] == '^' {
                i += 1;
                let start = i;
                if i < s.len() && s[i] == '-' {
                    i += 1;
                }
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = s[start..i].iter().collect();
                exp = digits
                    .parse::<i32>()
                    .map_err(|_| Error::pre(format!("bad exponent in `{text}`")))?;
            }
            if exp != 0 {
                runs.push(Run::new(gen, exp));
            }
        }
        self.from_runs(runs)
    }

    pub fn format(&self, g: &GroupElement) -> String {
        format_runs(&g.runs, Some(&self.names))
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.model != self.id {
            return Err(Error::ModelMismatch);
        }
        Ok(())
    }

    /// Pushes one run onto a canonical stack, keeping it canonical.
    fn push_run(&self, stack: &mut Vec<Run>, run: Run) {
        if run.exp == 0 {
            return;
        }
        let f = self.gen_factor[run.gen as usize];
        match self.factors[f].kind {
            FactorKind::FreeGroup => match stack.last_mut() {
                Some(top) if top.gen == run.gen => {
                    top.exp += run.exp;
                    if top.exp == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push(run),
            },
            FactorKind::FreeAbelian => {
                let mut start = stack.len();
                while start > 0 && self.gen_factor[stack[start - 1].gen as usize] == f {
                    start -= 1;
                }
                let syllable = &stack[start..];
                match syllable.binary_search_by(|r| r.gen.cmp(&run.gen)) {
                    Ok(pos) => {
                        let at = start + pos;
                        stack[at].exp += run.exp;
                        if stack[at].exp == 0 {
                            stack.remove(at);
                        }
                    }
                    Err(pos) => stack.insert(start + pos, run),
                }
            }
        }
    }

    pub(crate) fn mul_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut stack = Vec::with_capacity(g.runs.len() + h.runs.len());
        stack.extend_from_slice(&g.runs);
        for r in &h.runs {
            self.push_run(&mut stack, *r);
        }
        GroupElement {
            model: self.id,
            runs: stack,
        }
    }

    pub(crate) fn inv_unchecked(&self, g: &GroupElement) -> GroupElement {
        let mut stack = Vec::with_capacity(g.runs.len());
        for r in g.runs.iter().rev() {
            self.push_run(&mut stack, Run::new(r.gen, -r.exp));
        }
        GroupElement {
            model: self.id,
            runs: stack,
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul_unchecked(g, h))
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inv_unchecked(g))
    }

    pub fn word_length(&self, g: &GroupElement) -> Result<usize> {
        self.check(g)?;
        Ok(g.len())
    }

    /// The left-invariant word metric `d(g, h) = |g⁻¹h|`.
    pub fn distance(&self, g: &GroupElement, h: &GroupElement) -> Result<usize> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.distance_unchecked(g, h))
    }

    pub(crate) fn distance_unchecked(&self, g: &GroupElement, h: &GroupElement) -> usize {
        let mut stack = Vec::with_capacity(g.runs.len() + h.runs.len());
        for r in g.runs.iter().rev() {
            self.push_run(&mut stack, Run::new(r.gen, -r.exp));
        }
        for r in &h.runs {
            self.push_run(&mut stack, *r);
        }
        stack.iter().map(|r| r.exp.unsigned_abs() as usize).sum()
    }

    /// All elements of length exactly `r`, in shortlex order.
    pub fn sphere(&self, r: usize, limits: &Limits) -> Result<Vec<GroupElement>> {
        let mut layers = self.layers(r, limits)?;
        Ok(layers.pop().unwrap_or_default())
    }

    /// The closed ball of radius `r` around `e`, in shortlex order.
    pub fn ball(&self, r: usize, limits: &Limits) -> Result<Vec<GroupElement>> {
        Ok(self.layers(r, limits)?.into_iter().flatten().collect())
    }

    fn layers(&self, r: usize, limits: &Limits) -> Result<Vec<Vec<GroupElement>>> {
        let gens = self.symmetric_generators();
        let mut layers = vec![vec![self.identity()]];
        let mut total = 1usize;
        for len in 1..=r {
            let mut next: HashSet<GroupElement> = HashSet::new();
            for g in layers.last().expect("nonempty") {
                for s in &gens {
                    let gs = self.mul_unchecked(g, s);
                    if gs.len() == len {
                        next.insert(gs);
                    }
                }
            }
            total += next.len();
            limits.check_vertices(&format!("ball of radius {r}"), total)?;
            let sorted: BTreeSet<GroupElement> = next.into_iter().collect();
            layers.push(sorted.into_iter().collect());
        }
        Ok(layers)
    }
}

fn flatten(kind: &GroupKind, out: &mut Vec<(FactorKind, u32)>) -> Result<()> {
    match kind {
        GroupKind::FreeAbelian(n) => {
            if *n == 0 {
                return Err(Error::config("group.n", "rank must be at least 1"));
            }
            out.push((FactorKind::FreeAbelian, *n));
        }
        GroupKind::FreeGroup(r) => {
            if *r == 0 {
                return Err(Error::config("group.rank", "rank must be at least 1"));
            }
            out.push((FactorKind::FreeGroup, *r));
        }
        GroupKind::FreeProduct(fs) => {
            for f in fs {
                flatten(f, out)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_star_z2() -> GroupModel {
        GroupModel::free_product(vec![GroupKind::FreeAbelian(2), GroupKind::FreeAbelian(2)]).unwrap()
    }

    #[test]
    fn free_reduction() {
        let f2 = GroupModel::free_group(2).unwrap();
        let ab = f2.parse("ab").unwrap();
        let binv = f2.parse("b^-1").unwrap();
        assert_eq!(f2.multiply(&ab, &binv).unwrap(), f2.parse("a").unwrap());
    }

    #[test]
    fn abelian_coordinates_add() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let g = z2.from_coords(&[1, 2]).unwrap();
        let h = z2.from_coords(&[3, -1]).unwrap();
        assert_eq!(z2.multiply(&g, &h).unwrap(), z2.from_coords(&[4, 1]).unwrap());
        assert_eq!(z2.parse("b^2a").unwrap(), z2.parse("ab^2").unwrap());
    }

    #[test]
    fn free_product_syllables_remerge() {
        // factor 0 = <a,b>, factor 1 = <c,d>
        let g = z2_star_z2();
        let xs = g.parse("ac").unwrap();
        let sy = g.parse("c^-1d").unwrap();
        let prod = g.multiply(&xs, &sy).unwrap();
        assert_eq!(prod, g.parse("ad").unwrap());
        // a c c^-1 a -> a^2 : syllables of factor 0 merge after cancellation
        let back = g.multiply(&xs, &g.parse("c^-1b").unwrap()).unwrap();
        assert_eq!(back, g.parse("ab").unwrap());
        assert_eq!(back.runs().len(), 2);
    }

    #[test]
    fn word_lengths() {
        let f2 = GroupModel::free_group(2).unwrap();
        assert_eq!(f2.word_length(&f2.parse("abab^-1").unwrap()).unwrap(), 4);
        let z2 = GroupModel::free_abelian(2).unwrap();
        assert_eq!(z2.word_length(&z2.from_coords(&[3, -2]).unwrap()).unwrap(), 5);
        let g = z2_star_z2();
        let x1 = g.generator(0);
        let y1 = g.generator(2);
        assert_eq!(g.distance(&g.identity(), &g.multiply(&x1, &y1).unwrap()).unwrap(), 2);
    }

    #[test]
    fn ball_sizes() {
        let lim = Limits::default();
        let f2 = GroupModel::free_group(2).unwrap();
        let b1 = f2.ball(1, &lim).unwrap();
        assert_eq!(b1.len(), 5);
        assert_eq!(b1[0], f2.identity());
        assert_eq!(b1[1], f2.parse("a").unwrap());
        assert_eq!(b1[2], f2.parse("a^-1").unwrap());
        assert_eq!(f2.ball(3, &lim).unwrap().len(), 53);
        let z2 = GroupModel::free_abelian(2).unwrap();
        assert_eq!(z2.ball(2, &lim).unwrap().len(), 13);
    }

    #[test]
    fn ball_respects_cap() {
        let f2 = GroupModel::free_group(2).unwrap();
        let lim = Limits {
            max_vertices: 100,
            ..Limits::default()
        };
        assert!(matches!(f2.ball(5, &lim), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn model_mismatch_is_reported() {
        let f2 = GroupModel::free_group(2).unwrap();
        let z2 = GroupModel::free_abelian(2).unwrap();
        assert_eq!(
            f2.multiply(&f2.generator(0), &z2.generator(0)),
            Err(Error::ModelMismatch)
        );
    }

    #[test]
    fn prefix_and_format_roundtrip() {
        let f2 = GroupModel::free_group(2).unwrap();
        let w = f2.parse("ba^3b^-1").unwrap();
        assert_eq!(f2.format(&w.prefix(3)), "ba^2");
        assert_eq!(f2.parse(&f2.format(&w)).unwrap(), w);
        assert_eq!(f2.format(&f2.identity()), "e");
    }

    #[test]
    fn nested_products_flatten() {
        let g = GroupModel::free_product(vec![
            GroupKind::FreeAbelian(1),
            GroupKind::FreeProduct(vec![GroupKind::FreeAbelian(2)]),
        ])
        .unwrap();
        assert_eq!(g.factors().len(), 2);
        assert_eq!(g.num_generators(), 3);
    }
}
