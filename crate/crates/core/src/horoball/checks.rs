use rayon::prelude::*;
use serde::Serialize;

use super::{HoroVertex, HoroballGraph};
use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHABLE};
use crate::half::HalfInt;

/// Symmetrized Hausdorff distance between two vertex sequences.
pub fn hausdorff_distance<T>(a: &[T], b: &[T], metric: impl Fn(&T, &T) -> u32) -> u32 {
    let one_sided = |xs: &[T], ys: &[T]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| metric(x, y)).min().unwrap_or(0))
            .max()
            .unwrap_or(0)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// The largest Hausdorff distance between `reference` and any geodesic
/// from `u` to `v`, without enumerating geodesics.
///
/// Every vertex of the geodesic interval `I(u,v)` lies on some geodesic,
/// which bounds one side exactly. For the other side, a max-min dynamic
/// program over the layered interval finds, for each reference vertex `y`,
/// the geodesic staying farthest from `y`.
pub fn geodesic_hausdorff_bound(graph: &Graph, rows: &[Vec<u32>], u: u32, v: u32, reference: &[u32]) -> u32 {
    let total = rows[u as usize][v as usize];
    let from_u = &rows[u as usize];
    let to_v = |x: u32| rows[x as usize][v as usize];
    // layers[t]: sorted interval vertices at distance t from u
    let mut layers: Vec<Vec<u32>> = Vec::with_capacity(total as usize + 1);
    layers.push(vec![u]);
    for t in 0..total {
        let mut next: Vec<u32> = layers[t as usize]
            .iter()
            .flat_map(|&x| graph.neighbors(x).iter().copied())
            .filter(|&w| from_u[w as usize] == t + 1 && to_v(w) == total - t - 1)
            .collect();
        next.sort_unstable();
        next.dedup();
        layers.push(next);
    }

    let mut worst = 0;
    for layer in &layers {
        for &x in layer {
            let near = reference.iter().map(|&y| rows[y as usize][x as usize]).min().unwrap_or(0);
            worst = worst.max(near);
        }
    }

    // succ[t][p]: positions in layers[t+1] of the neighbors of layers[t][p]
    let succ: Vec<Vec<Vec<u32>>> = (0..layers.len())
        .map(|t| {
            layers[t]
                .iter()
                .map(|&x| match layers.get(t + 1) {
                    Some(ahead) => graph
                        .neighbors(x)
                        .iter()
                        .filter_map(|w| ahead.binary_search(w).ok().map(|q| q as u32))
                        .collect(),
                    None => Vec::new(),
                })
                .collect()
        })
        .collect();

    // far[t][p]: over geodesics from layers[t][p] to v, the largest
    // minimum distance to y
    let mut far: Vec<Vec<u32>> = layers.iter().map(|l| vec![0; l.len()]).collect();
    for &y in reference {
        let dy = &rows[y as usize];
        // every geodesic passes through u and v
        if dy[u as usize].min(dy[v as usize]) <= worst {
            continue;
        }
        let top = layers.len() - 1;
        for (slot, &x) in far[top].iter_mut().zip(&layers[top]) {
            *slot = dy[x as usize];
        }
        for t in (0..top).rev() {
            let (below, above) = far.split_at_mut(t + 1);
            let ahead = &above[0];
            for ((slot, &x), next) in below[t].iter_mut().zip(&layers[t]).zip(&succ[t]) {
                let best = next.iter().map(|&q| ahead[q as usize]).max().unwrap_or(0);
                *slot = dy[x as usize].min(best);
            }
        }
        worst = worst.max(far[0][0]);
    }
    worst
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NormalFormAudit {
    pub pairs: u64,
    pub stable_pairs: u64,
    pub unstable_pairs: u64,
    pub truncation_misses: u64,
    pub distance_mismatches: u64,
    pub max_horizontal: u32,
    pub horizontal_violations: u64,
    pub max_hausdorff: u32,
    pub hausdorff_violations: u64,
    /// First failing pair as `(u, v, bfs, normal form)` labels.
    pub witness: Option<String>,
}

impl NormalFormAudit {
    pub fn passed(&self) -> bool {
        self.distance_mismatches == 0 && self.horizontal_violations == 0 && self.hausdorff_violations == 0
    }

    fn merge(mut self, other: NormalFormAudit) -> NormalFormAudit {
        self.pairs += other.pairs;
        self.stable_pairs += other.stable_pairs;
        self.unstable_pairs += other.unstable_pairs;
        self.truncation_misses += other.truncation_misses;
        self.distance_mismatches += other.distance_mismatches;
        self.max_horizontal = self.max_horizontal.max(other.max_horizontal);
        self.horizontal_violations += other.horizontal_violations;
        self.max_hausdorff = self.max_hausdorff.max(other.max_hausdorff);
        self.hausdorff_violations += other.hausdorff_violations;
        self.witness = match (self.witness, other.witness) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Compares closed-form and BFS distances over all vertex pairs of `small`,
/// and bounds every BFS geodesic's Hausdorff distance to the normal-form
/// geodesic. Only pairs whose distance is unchanged in `large` (a strictly
/// larger truncation containing `small`) are judged.
pub fn normal_form_audit(small: &HoroballGraph, large: &HoroballGraph) -> Result<NormalFormAudit> {
    let n = small.n_vertices() as u32;
    let all: Vec<u32> = (0..n).collect();
    let rows = small.graph().distance_rows(&all);
    let embed = small.embedding_into(large)?;
    let large_rows = large.graph().distance_rows(&embed);

    let audit = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut acc = NormalFormAudit::default();
            for v in (u + 1)..n {
                acc.pairs += 1;
                let d = rows[u as usize][v as usize];
                if d == UNREACHABLE || large_rows[u as usize][embed[v as usize] as usize] != d {
                    acc.unstable_pairs += 1;
                    continue;
                }
                acc.stable_pairs += 1;
                let (hu, hv) = (small.vertex(u), small.vertex(v));
                let nf = match small.normal_form_of(hu, hv) {
                    Ok(nf) => nf,
                    Err(_) => {
                        acc.truncation_misses += 1;
                        continue;
                    }
                };
                let label = || format!("{} {} bfs={} nf={}", small.label(hu), small.label(hv), d, nf.distance);
                if nf.distance != d {
                    acc.distance_mismatches += 1;
                    acc.witness.get_or_insert_with(label);
                    continue;
                }
                acc.max_horizontal = acc.max_horizontal.max(nf.horizontal);
                if nf.horizontal > 3 {
                    acc.horizontal_violations += 1;
                    acc.witness.get_or_insert_with(label);
                }
                let path = match small.normal_form_geodesic(hu, hv) {
                    Ok(p) => p,
                    Err(_) => {
                        acc.distance_mismatches += 1;
                        acc.witness.get_or_insert_with(label);
                        continue;
                    }
                };
                let ids: Vec<u32> = path.iter().map(|&x| small.vertex_id(x).expect("on graph")).collect();
                let hd = geodesic_hausdorff_bound(small.graph(), &rows, u, v, &ids);
                acc.max_hausdorff = acc.max_hausdorff.max(hd);
                if hd > 4 {
                    acc.hausdorff_violations += 1;
                    acc.witness.get_or_insert_with(label);
                }
            }
            acc
        })
        .reduce(NormalFormAudit::default, NormalFormAudit::merge);
    Ok(audit)
}

/// One instance of the depth-shift inequality. Serialized as
/// `{O, A, B, D, dOA, dOB, dAB, dA'B, pass}`; `pass` is null when the
/// preconditions do not hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthShiftReport {
    #[serde(rename = "O")]
    pub o: String,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "D")]
    pub shift: u32,
    #[serde(rename = "dOA")]
    pub d_oa: u32,
    #[serde(rename = "dOB")]
    pub d_ob: u32,
    #[serde(rename = "dAB")]
    pub d_ab: u32,
    #[serde(rename = "dA'B")]
    pub d_shifted_b: Option<u32>,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition: Option<String>,
}

pub(crate) fn depth_shift_report(
    h: &HoroballGraph,
    o: HoroVertex,
    a: HoroVertex,
    b: HoroVertex,
    shift: u32,
    dist: impl Fn(HoroVertex, HoroVertex) -> Result<u32>,
) -> Result<DepthShiftReport> {
    let (r, s, t) = (o.depth, a.depth, b.depth);
    let mut report = DepthShiftReport {
        o: h.label(o),
        a: h.label(a),
        b: h.label(b),
        shift,
        d_oa: dist(o, a)?,
        d_ob: dist(o, b)?,
        d_ab: dist(a, b)?,
        d_shifted_b: None,
        pass: None,
        precondition: None,
    };
    if r <= s + shift + 2 {
        report.precondition = Some(format!("R > s + D + 2 fails: R={r}, s={s}, D={shift}"));
    } else if t <= s {
        report.precondition = Some(format!("t > s fails: s={s}, t={t}"));
    } else if report.d_ob <= report.d_oa {
        report.precondition = Some(format!(
            "d(O,B) > d(O,A) fails: {} <= {}",
            report.d_ob, report.d_oa
        ));
    }
    if report.precondition.is_none() {
        let shifted = HoroVertex::new(a.point, s + shift);
        let d = dist(shifted, b)?;
        report.d_shifted_b = Some(d);
        report.pass = Some(d <= report.d_ab);
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DepthShiftScan {
    pub max_shift: u32,
    pub triples_checked: u64,
    pub filtered_by_precondition: u64,
    pub violations: Vec<DepthShiftReport>,
}

impl DepthShiftScan {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every triple `(O, A, B)` of the truncation and every shift `0..=max_shift`
/// whose preconditions hold.
pub fn depth_shift_scan(h: &HoroballGraph, max_shift: u32) -> Result<DepthShiftScan> {
    let n = h.n_vertices() as u32;
    let all: Vec<u32> = (0..n).collect();
    let rows = h.graph().distance_rows(&all);
    if rows.iter().any(|r| r.contains(&UNREACHABLE)) {
        return Err(Error::pre("horoball truncation is disconnected"));
    }
    let dist = |x: HoroVertex, y: HoroVertex| -> Result<u32> {
        Ok(rows[h.vertex_id(x)? as usize][h.vertex_id(y)? as usize])
    };
    let parts: Vec<Result<DepthShiftScan>> = (0..n)
        .into_par_iter()
        .map(|oi| {
            let o = h.vertex(oi);
            let mut acc = DepthShiftScan {
                max_shift,
                ..Default::default()
            };
            for ai in 0..n {
                let a = h.vertex(ai);
                for bi in 0..n {
                    let b = h.vertex(bi);
                    for shift in 0..=max_shift {
                        if o.depth <= a.depth + shift + 2 || b.depth <= a.depth {
                            acc.filtered_by_precondition += 1;
                            continue;
                        }
                        let d_oa = rows[oi as usize][ai as usize];
                        let d_ob = rows[oi as usize][bi as usize];
                        if d_ob <= d_oa {
                            acc.filtered_by_precondition += 1;
                            continue;
                        }
                        acc.triples_checked += 1;
                        let shifted = h.vertex_id(HoroVertex::new(a.point, a.depth + shift))?;
                        if rows[shifted as usize][bi as usize] > rows[ai as usize][bi as usize] {
                            acc.violations.push(depth_shift_report(h, o, a, b, shift, dist)?);
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut scan = DepthShiftScan {
        max_shift,
        ..Default::default()
    };
    for part in parts {
        let part = part?;
        scan.triples_checked += part.triples_checked;
        scan.filtered_by_precondition += part.filtered_by_precondition;
        scan.violations.extend(part.violations);
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GromovProfile {
    pub base_point: String,
    /// `(l, min (u|v)_o over distinct u, v of depth >= l)`.
    pub minima: Vec<(u32, HalfInt)>,
    pub nondecreasing: bool,
    /// `max_l (l - minimum_l)`: how far the minima fall below the depth.
    pub lag: HalfInt,
}

/// Minimum pairwise Gromov product, based at `o`, over vertices of depth at
/// least `l`, for each `l` in `depths`.
pub fn gromov_product_profile(h: &HoroballGraph, o: HoroVertex, depths: std::ops::RangeInclusive<u32>) -> Result<GromovProfile> {
    let lowest = *depths.start();
    if *depths.end() > h.depth() {
        return Err(Error::miss(format!("depth {} beyond truncation {}", depths.end(), h.depth())));
    }
    let deep: Vec<u32> = (0..h.n_vertices() as u32).filter(|&id| h.vertex(id).depth >= lowest).collect();
    let from_o = h.graph().bfs(h.vertex_id(o)?);
    let rows = h.graph().distance_rows(&deep);
    // best[m]: minimum over pairs whose shallower endpoint has depth m
    let levels = h.depth() as usize + 1;
    let best: Vec<i64> = (0..deep.len())
        .into_par_iter()
        .map(|i| {
            let mut local = vec![i64::MAX; levels];
            let u = deep[i];
            let du = i64::from(from_o[u as usize]);
            for (j, &v) in deep.iter().enumerate().skip(i + 1) {
                let twice = du + i64::from(from_o[v as usize]) - i64::from(rows[i][v as usize]);
                let m = h.vertex(u).depth.min(h.vertex(v).depth) as usize;
                let _ = j;
                local[m] = local[m].min(twice);
            }
            local
        })
        .reduce(
            || vec![i64::MAX; levels],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect(),
        );
    let mut minima = Vec::new();
    for l in depths {
        let twice = best[l as usize..].iter().copied().min().unwrap_or(i64::MAX);
        if twice == i64::MAX {
            return Err(Error::pre(format!("fewer than two vertices of depth >= {l}")));
        }
        minima.push((l, HalfInt::from_twice(twice)));
    }
    let nondecreasing = minima.windows(2).all(|w| w[0].1 <= w[1].1);
    let lag = minima
        .iter()
        .map(|&(l, m)| HalfInt::from_int(i64::from(l)) - m)
        .max()
        .unwrap_or(HalfInt::ZERO);
    Ok(GromovProfile {
        base_point: h.label(o),
        minima,
        nondecreasing,
        lag,
    })
}
