use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{
    act, blow_up_default, collapse, BlownCoronaStage, BlownPoint, ClassLabel, CoronaModel,
};
use crate::error::{Error, Result};
use crate::group::{coset_order, CosetIndex, CosetOrder, GroupElement, GroupPair};
use crate::limits::Limits;
use crate::rips::{reduced_cohomology, HomologyResult, Simplex, SimplicialComplex};

const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub stage: usize,
    pub cylinders: usize,
    pub blown_points: usize,
    pub parabolic_cosets: usize,
    pub corona_cylinders: usize,
    pub conical_cylinders: usize,
    pub bijective: bool,
    pub limit_sets_matched: bool,
    pub refinement_compatible: bool,
    pub passed: bool,
    pub witness: Option<String>,
}

struct Stage {
    order: CosetOrder,
    blown: BlownCoronaStage,
}

impl Stage {
    fn build(pair: &GroupPair, d: usize, limits: &Limits) -> Result<Self> {
        let order = coset_order(pair, d - 1, limits)?;
        let blown = blow_up_default(&order, collapse(&order, d, limits)?)?;
        Ok(Stage { order, blown })
    }

    /// The blown point a stage cylinder stands for: its corona point if it
    /// lies in a collapsed limit set, itself otherwise.
    fn realize(&self, w: &GroupElement) -> Result<BlownPoint> {
        let classes = self.blown.classes();
        let class = classes
            .class_of_word(w)
            .ok_or_else(|| Error::Internal("word is not a stage cylinder".into()))?;
        match classes.label(class) {
            ClassLabel::Conical(_) => Ok(BlownPoint::Conical(w.clone())),
            ClassLabel::Parabolic(i) => Ok(BlownPoint::Corona {
                coset: i,
                point: two_point_sign(&self.order, i, w)?,
            }),
        }
    }
}

/// 0 for the `+` end, 1 for the `−` end of `g_i P` with `P` cyclic.
fn two_point_sign(order: &CosetOrder, i: CosetIndex, w: &GroupElement) -> Result<usize> {
    let model = order.model();
    let gi = order.rep(i).expect("collapsed cosets are materialized");
    let p = model.mul_unchecked(&model.inv_unchecked(gi), w);
    match p.runs() {
        [run] => Ok(usize::from(run.exp < 0)),
        _ => Err(Error::Unsupported(format!(
            "round trip needs cyclic peripherals; {} is not a power of one generator",
            model.format(&p)
        ))),
    }
}

/// Checks that collapsing limit sets and blowing up parabolic points
/// returns a bijection onto the stage-`d` cylinders, with each limit-set
/// cylinder `g_i a^{±m}` matched to `(i, ±)` and conical cylinders fixed,
/// and that the identification commutes with refinement to stage `d + 1`.
/// Peripherals must be cyclic.
pub fn roundtrip_check(pair: &GroupPair, d: usize, limits: &Limits) -> Result<RoundtripReport> {
    if d == 0 {
        return Err(Error::pre("stage depth must be at least 1"));
    }
    if pair.peripherals.iter().any(|p| p.rank() != 1) {
        return Err(Error::Unsupported("round trip needs cyclic peripherals".into()));
    }
    let model = &pair.model;
    let here = Stage::build(pair, d, limits)?;
    let finer = Stage::build(pair, d + 1, limits)?;
    let cylinders = here.blown.classes().cylinders();
    let mut witness: Option<String> = None;
    let mut note = |msg: String| {
        witness.get_or_insert(msg);
    };

    // bijectivity onto the blown points
    let mut image: HashMap<BlownPoint, usize> = HashMap::new();
    let mut injective = true;
    for (pos, c) in cylinders.iter().enumerate() {
        let x = here.realize(&c.word)?;
        if let Some(prev) = image.insert(x, pos) {
            injective = false;
            note(format!(
                "cylinders {} and {} collide",
                model.format(&cylinders[prev].word),
                model.format(&c.word)
            ));
        }
    }
    let surjective = here.blown.points().iter().all(|x| image.contains_key(x));
    if !surjective {
        note("some blown point has no cylinder".into());
    }
    let bijective = injective && surjective && image.len() == here.blown.points().len();

    // limit-set matching, built directly from the representatives
    let mut expected_corona: HashMap<GroupElement, BlownPoint> = HashMap::new();
    for i in here.order.indices() {
        let gi = here.order.rep(i).expect("listed");
        let gen = here.order.peripheral(i).generators()[0];
        let m = (d - gi.len()) as i32;
        for (point, exp) in [(0, m), (1, -m)] {
            let w = model.mul_unchecked(gi, &model.from_runs([crate::group::Run::new(gen, exp)])?);
            expected_corona.insert(w, BlownPoint::Corona { coset: i, point });
        }
    }
    let mut limit_sets_matched = true;
    for c in cylinders {
        let got = here.realize(&c.word)?;
        let want = expected_corona
            .get(&c.word)
            .cloned()
            .unwrap_or_else(|| BlownPoint::Conical(c.word.clone()));
        if got != want {
            limit_sets_matched = false;
            note(format!(
                "cylinder {} realized as {} instead of {}",
                model.format(&c.word),
                here.blown.label(model, &got),
                here.blown.label(model, &want)
            ));
        }
    }

    // refinement: coarsening blown points of stage d+1 commutes with realize
    let coarsen = |x: &BlownPoint| -> Result<BlownPoint> {
        match x {
            BlownPoint::Conical(w) => here.realize(&w.prefix(d)),
            BlownPoint::Corona { coset, point } => {
                let gi = finer.order.rep(*coset).expect("listed");
                if gi.len() < d {
                    Ok(x.clone())
                } else {
                    // parabolic point first visible at stage d+1
                    let gen = finer.order.peripheral(*coset).generators()[0];
                    let exp = if *point == 0 { 1 } else { -1 };
                    let w = model.mul_unchecked(gi, &model.from_runs([crate::group::Run::new(gen, exp)])?);
                    here.realize(&w.prefix(d))
                }
            }
        }
    };
    let mut refinement_compatible = true;
    let mut hit: HashSet<BlownPoint> = HashSet::new();
    for c in finer.blown.classes().cylinders() {
        let via_finer = coarsen(&finer.realize(&c.word)?)?;
        let via_prefix = here.realize(&c.word.prefix(d))?;
        if via_finer != via_prefix {
            refinement_compatible = false;
            note(format!("refinement of {} does not commute", model.format(&c.word)));
        }
        hit.insert(via_finer);
    }
    if hit.len() != here.blown.points().len() {
        refinement_compatible = false;
        note("refinement map is not onto the coarser stage".into());
    }

    let corona_cylinders = expected_corona.len();
    let passed = bijective && limit_sets_matched && refinement_compatible;
    Ok(RoundtripReport {
        stage: d,
        cylinders: cylinders.len(),
        blown_points: here.blown.points().len(),
        parabolic_cosets: here.order.len(),
        corona_cylinders,
        conical_cylinders: cylinders.len() - corona_cylinders,
        bijective,
        limit_sets_matched,
        refinement_compatible,
        passed,
        witness: if passed { None } else { witness },
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: u64,
    pub skipped: u64,
    pub violations: u64,
}

impl Tally {
    fn record(&mut self, outcome: Result<bool>, witnesses: &mut Vec<String>, describe: impl FnOnce() -> String) {
        match outcome {
            Ok(true) => self.checked += 1,
            Ok(false) => {
                self.checked += 1;
                self.violations += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(describe());
                }
            }
            Err(e) if e.is_truncation_miss() || matches!(e, Error::StageUnderflow { .. }) => self.skipped += 1,
            Err(e) => {
                self.violations += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(format!("{}: {e}", describe()));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionCheckReport {
    pub radius: usize,
    pub stage: usize,
    pub cutoff: usize,
    /// Cutoff of the order `φ`, `ψ` and the action are evaluated in.
    pub phi_cutoff: usize,
    pub cosets: usize,
    pub blown_points: usize,
    pub phi_cocycle: Tally,
    pub psi_chain: Tally,
    pub action_axiom: Tally,
    pub equivariance: Tally,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

/// Over all `h, k` in the ball of `radius` and every materialized coset:
/// `φ_{φ_i(k)}(h) = φ_i(hk)`, `ψ_i(hk) = ψ_{φ_i(k)}(h) ψ_i(k)`,
/// `α(hk)x = α(h)α(k)x` on every blown point of `stage`, and
/// `π(α(h)x) = h·π(x)` on the collapsed stage. The identities are
/// evaluated in the order of cutoff `cutoff + 2·radius`, which extends the
/// cutoff order index for index; comparisons that still leave it are
/// counted as skipped.
pub fn action_check(pair: &GroupPair, radius: usize, stage: usize, cutoff: usize, limits: &Limits) -> Result<ActionCheckReport> {
    if cutoff >= stage {
        return Err(Error::pre(format!("cutoff {cutoff} must be below the stage {stage}")));
    }
    let order = coset_order(pair, cutoff, limits)?;
    let model = order.model();
    let blown = blow_up_default(&order, collapse(&order, stage, limits)?)?;
    let phi_cutoff = cutoff + 2 * radius;
    let wide = coset_order(pair, phi_cutoff, limits)?;
    if let Some(i) = order.indices().into_iter().find(|&i| wide.rep(i) != order.rep(i)) {
        return Err(Error::Internal(format!("coset order is not prefix-stable at index {i}")));
    }
    let corona_of = |i: CosetIndex| {
        blown
            .corona_model(i)
            .or_else(|| CoronaModel::for_peripheral(model, order.peripheral(i)).ok())
            .unwrap_or(CoronaModel::TwoPoint)
    };
    let ball = model.ball(radius, limits)?;
    let indices = order.indices();
    let mut witnesses = Vec::new();
    let mut phi_cocycle = Tally::default();
    let mut psi_chain = Tally::default();
    let mut action_axiom = Tally::default();
    let mut equivariance = Tally::default();

    for &i in &indices {
        for h in &ball {
            for k in &ball {
                let hk = model.mul_unchecked(h, k);
                let outcome = (|| {
                    let j = wide.phi(i, k)?;
                    Ok(wide.phi(j, h)? == wide.phi(i, &hk)?)
                })();
                phi_cocycle.record(outcome, &mut witnesses, || {
                    format!("phi cocycle at i={i}, h={}, k={}", model.format(h), model.format(k))
                });
                let outcome = (|| {
                    let j = wide.phi(i, k)?;
                    let chain = model.mul_unchecked(&wide.psi(j, h)?, &wide.psi(i, k)?);
                    Ok(wide.psi(i, &hk)? == chain)
                })();
                psi_chain.record(outcome, &mut witnesses, || {
                    format!("psi chain at i={i}, h={}, k={}", model.format(h), model.format(k))
                });
            }
        }
    }

    for x in blown.points() {
        for h in &ball {
            for k in &ball {
                let hk = model.mul_unchecked(h, k);
                let outcome = (|| {
                    let once = act(&wide, stage, &hk, x, corona_of)?;
                    let twice = act(&wide, stage, h, &act(&wide, stage, k, x, corona_of)?, corona_of)?;
                    Ok(once == twice)
                })();
                action_axiom.record(outcome, &mut witnesses, || {
                    format!(
                        "action axiom at x={}, h={}, k={}",
                        blown.label(model, x),
                        model.format(h),
                        model.format(k)
                    )
                });
            }
            let outcome = equivariant_at(&order, &wide, &blown, h, x, corona_of);
            equivariance.record(outcome, &mut witnesses, || {
                format!("equivariance at x={}, h={}", blown.label(model, x), model.format(h))
            });
        }
    }

    let passed = [&phi_cocycle, &psi_chain, &action_axiom, &equivariance]
        .iter()
        .all(|t| t.violations == 0);
    Ok(ActionCheckReport {
        radius,
        stage,
        cutoff,
        phi_cutoff,
        cosets: indices.len(),
        blown_points: blown.points().len(),
        phi_cocycle,
        psi_chain,
        action_axiom,
        equivariance,
        passed,
        witnesses,
    })
}

/// `π(α(h)x)` against the action of `h` on the collapsed stage, computed
/// geometrically: a parabolic class moves by translating one long
/// representative of its limit set and truncating.
fn equivariant_at(
    order: &CosetOrder,
    wide: &CosetOrder,
    blown: &BlownCoronaStage,
    h: &GroupElement,
    x: &BlownPoint,
    corona_of: impl Fn(CosetIndex) -> CoronaModel,
) -> Result<bool> {
    let model = order.model();
    let d = blown.stage();
    let classes = blown.classes();
    let moved = act(wide, d, h, x, corona_of)?;
    let lhs = blown
        .project_point(&moved)
        .ok_or_else(|| Error::miss("image lies in a parabolic class beyond the stage"))?;
    let rep = match x {
        BlownPoint::Conical(w) => w.clone(),
        BlownPoint::Corona { coset, .. } => {
            let gi = order.rep(*coset).expect("materialized");
            let gen = order.peripheral(*coset).generators()[0];
            let long = (d + h.len()) as i32;
            model.mul_unchecked(gi, &model.from_runs([crate::group::Run::new(gen, long)])?)
        }
    };
    let hw = model.mul_unchecked(h, &rep);
    if hw.len() < d {
        return Err(Error::StageUnderflow {
            word: model.format(&hw),
            stage: d,
        });
    }
    let rhs = classes
        .class_of_word(&hw.prefix(d))
        .ok_or_else(|| Error::Internal("truncated word is not a stage cylinder".into()))?;
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoronaBettiReport {
    pub n: usize,
    pub m: usize,
    pub stage: usize,
    pub cylinders: usize,
    pub visible_cosets: usize,
    pub blown_cosets: Vec<CosetIndex>,
    pub components: usize,
    pub reduced_cohomology: HomologyResult,
    /// Rank of `H̃^{n-1}`; expected `m`.
    pub top_rank: usize,
    /// Rank of `H̃^0`; expected `components - 1`.
    pub zero_rank: usize,
    pub passed: bool,
}

/// The stage-`d` blown corona of `(ℤⁿ∗ℤⁿ, {ℤⁿ, ℤⁿ})` with the first `m`
/// visible parabolic points blown up into `S^{n-1}` and everything else
/// left as isolated points, and its reduced integral cohomology.
pub fn corona_betti(n: usize, m: usize, d: usize, limits: &Limits) -> Result<CoronaBettiReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::pre(format!("n must be 2 or 3, got {n}")));
    }
    if d == 0 {
        return Err(Error::pre("stage depth must be at least 1"));
    }
    let pair = GroupPair::abelian_free_product(n as u32);
    let order = coset_order(&pair, d - 1, limits)?;
    let classes = collapse(&order, d, limits)?;
    let visible = order.indices();
    if m > visible.len() {
        return Err(Error::pre(format!(
            "m = {m} exceeds the {} cosets visible at stage {d}",
            visible.len()
        )));
    }
    let blown: Vec<CosetIndex> = visible[..m].to_vec();
    let sphere = CoronaModel::SphereComplex(n).complex();

    let mut facets: Vec<Simplex> = Vec::new();
    let mut next = 0u32;
    for class in 0..classes.len() {
        match classes.label(class) {
            ClassLabel::Parabolic(i) if blown.contains(&i) => {
                facets.extend(sphere.facets().iter().map(|f| f.iter().map(|v| v + next).collect()));
                next += sphere.n_vertices() as u32;
            }
            _ => next += 1,
        }
    }
    let complex = SimplicialComplex::from_facets(next as usize, &facets, limits)?;
    let cohomology = reduced_cohomology(&complex);
    let components = classes.len();
    let top_rank = cohomology.betti(n - 1);
    let zero_rank = cohomology.betti(0);
    let others_vanish = (1..cohomology.degrees.len())
        .filter(|&k| k != n - 1)
        .all(|k| cohomology.betti(k) == 0 && cohomology.torsion(k).is_empty());
    let passed = top_rank == m && zero_rank + 1 == components && others_vanish;
    Ok(CoronaBettiReport {
        n,
        m,
        stage: d,
        cylinders: classes.cylinders().len(),
        visible_cosets: visible.len(),
        blown_cosets: blown,
        components,
        reduced_cohomology: cohomology,
        top_rank,
        zero_rank,
        passed,
    })
}
