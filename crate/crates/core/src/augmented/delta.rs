use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_augmented, AugGraph, AugVertex};
use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::group::{coset_order, GroupPair};
use crate::half::HalfInt;
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    /// Every 4-subset; exact on the vertex set.
    Exhaustive,
    /// `quadruples` uniform draws; a lower bound, reproducible per seed.
    Sampled { seed: u64, quadruples: u64 },
}

/// Twice the four-point defect of one quadruple: the largest of the three
/// pair sums minus the middle one.
#[inline]
fn defect(d: &DistanceMatrix, w: usize, x: usize, y: usize, z: usize) -> i64 {
    let a = i64::from(d.get(w, x)) + i64::from(d.get(y, z));
    let b = i64::from(d.get(w, y)) + i64::from(d.get(x, z));
    let c = i64::from(d.get(w, z)) + i64::from(d.get(x, y));
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if c >= hi {
        c - hi
    } else {
        hi - lo.max(c)
    }
}

/// The least `δ` with `(x|z)_w >= min((x|y)_w, (y|z)_w) - δ` over the
/// quadruples selected by `mode`. Equivalently, half the largest gap
/// between the two biggest pair sums of a quadruple.
pub fn four_point_delta(d: &DistanceMatrix, mode: DeltaMode) -> Result<HalfInt> {
    let n = d.len();
    if n == 0 {
        return Err(Error::pre("four-point delta of an empty vertex set"));
    }
    let twice = match mode {
        DeltaMode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|w| {
                let mut best = 0;
                for x in (w + 1)..n {
                    for y in (x + 1)..n {
                        for z in (y + 1)..n {
                            best = best.max(defect(d, w, x, y, z));
                        }
                    }
                }
                best
            })
            .max()
            .unwrap_or(0),
        DeltaMode::Sampled { seed, quadruples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = 0;
            for _ in 0..quadruples {
                let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..n));
                best = best.max(defect(d, q[0], q[1], q[2], q[3]));
            }
            best
        }
    };
    Ok(HalfInt::from_twice(twice))
}

/// Four-point δ of `vertices` under the graph metric of `aug`.
pub fn delta_four_point(aug: &AugGraph, vertices: &[AugVertex], mode: DeltaMode) -> Result<HalfInt> {
    let ids = vertices.iter().map(|v| aug.vertex_id(v)).collect::<Result<Vec<_>>>()?;
    four_point_delta(&DistanceMatrix::from_graph(aug.graph(), &ids)?, mode)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaScanParams {
    pub radii: Vec<usize>,
    pub depth: u32,
    pub seed: u64,
    /// Ball vertices drawn in addition to the peripheral landmarks.
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub radius: usize,
    pub n_vertices: usize,
    pub delta_cayley: HalfInt,
    pub delta_augmented: HalfInt,
    pub seed: u64,
}

/// Per radius `r`: the augmented space with Cayley radius `r`, coset
/// cutoff `r` and depth `L`, and the exact four-point δ of one vertex set
/// under both the word metric and the augmented metric. The vertex set is
/// every ball element of a peripheral subgroup through `e` plus a seeded
/// sample of the rest of the ball.
pub fn delta_scan(pair: &GroupPair, params: &DeltaScanParams, limits: &Limits) -> Result<Vec<DeltaRow>> {
    if params.radii.is_empty() {
        return Err(Error::pre("empty radius list"));
    }
    if params.radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::pre("radii must be strictly increasing"));
    }
    let mut rows = Vec::with_capacity(params.radii.len());
    for &r in &params.radii {
        let order = coset_order(pair, r, limits)?;
        let aug = build_augmented(&order, r, params.depth, limits)?;
        let ids = scan_vertices(&aug, pair, r, params);
        let model = aug.model();
        let ball = aug.ball();
        let cayley = DistanceMatrix::from_fn(ids.len(), |i, j| {
            model.distance_unchecked(&ball[ids[i] as usize], &ball[ids[j] as usize]) as u32
        });
        let augmented = DistanceMatrix::from_graph(aug.graph(), &ids)?;
        rows.push(DeltaRow {
            radius: r,
            n_vertices: aug.n_vertices(),
            delta_cayley: four_point_delta(&cayley, DeltaMode::Exhaustive)?,
            delta_augmented: four_point_delta(&augmented, DeltaMode::Exhaustive)?,
            seed: params.seed,
        });
    }
    Ok(rows)
}

fn scan_vertices(aug: &AugGraph, pair: &GroupPair, radius: usize, params: &DeltaScanParams) -> Vec<u32> {
    let (mut chosen, rest): (Vec<u32>, Vec<u32>) = (0..aug.n_cayley() as u32)
        .partition(|&id| pair.peripherals.iter().any(|p| p.contains(&aug.ball()[id as usize])));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(radius as u64);
    let take = params.sample.min(rest.len());
    chosen.extend(index::sample(&mut rng, rest.len(), take).into_iter().map(|i| rest[i]));
    chosen.sort_unstable();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PeripheralStructure;

    fn line(n: usize) -> DistanceMatrix {
        DistanceMatrix::from_fn(n, |i, j| i.abs_diff(j) as u32)
    }

    #[test]
    fn trees_and_lines_are_zero_hyperbolic() {
        assert_eq!(four_point_delta(&line(9), DeltaMode::Exhaustive).unwrap(), HalfInt::ZERO);
        assert_eq!(four_point_delta(&line(1), DeltaMode::Exhaustive).unwrap(), HalfInt::ZERO);
        assert!(four_point_delta(&line(0), DeltaMode::Exhaustive).is_err());
    }

    #[test]
    fn four_cycle() {
        // C4: the diagonal sum 2+2 exceeds both side sums 1+1
        let d = DistanceMatrix::from_fn(4, |i, j| {
            let k = i.abs_diff(j);
            k.min(4 - k) as u32
        });
        assert_eq!(four_point_delta(&d, DeltaMode::Exhaustive).unwrap(), HalfInt::from_int(1));
    }

    #[test]
    fn matches_gromov_product_definition() {
        // brute force over ordered quadruples with the product form
        let pts: Vec<(i32, i32)> = (0..4).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let n = pts.len();
        let d = DistanceMatrix::from_fn(n, |i, j| pts[i].0.abs_diff(pts[j].0) + pts[i].1.abs_diff(pts[j].1));
        let g = |x: usize, y: usize, w: usize| i64::from(d.get(w, x)) + i64::from(d.get(w, y)) - i64::from(d.get(x, y));
        let mut twice = 0;
        for w in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        twice = twice.max(g(x, y, w).min(g(y, z, w)) - g(x, z, w));
                    }
                }
            }
        }
        assert_eq!(four_point_delta(&d, DeltaMode::Exhaustive).unwrap(), HalfInt::from_twice(twice));
    }

    #[test]
    fn sampled_is_a_reproducible_lower_bound() {
        let d = DistanceMatrix::from_fn(30, |i, j| {
            let k = i.abs_diff(j);
            k.min(30 - k) as u32
        });
        let exact = four_point_delta(&d, DeltaMode::Exhaustive).unwrap();
        let mode = DeltaMode::Sampled { seed: 7, quadruples: 2000 };
        let a = four_point_delta(&d, mode).unwrap();
        assert!(a <= exact);
        assert_eq!(a, four_point_delta(&d, mode).unwrap());
    }

    #[test]
    fn free_group_without_peripherals_is_a_tree() {
        let mut pair = GroupPair::free_group_cyclic_peripheral();
        pair.peripherals = PeripheralStructure::empty();
        let params = DeltaScanParams {
            radii: vec![1, 2, 3],
            depth: 3,
            seed: 11,
            sample: 40,
        };
        let rows = delta_scan(&pair, &params, &Limits::default()).unwrap();
        assert_eq!(rows.len(), 3);
        for row in rows {
            assert_eq!(row.delta_cayley, HalfInt::ZERO);
            assert_eq!(row.delta_augmented, HalfInt::ZERO);
        }
    }

    #[test]
    fn scan_rejects_unsorted_radii() {
        let params = DeltaScanParams {
            radii: vec![3, 2],
            depth: 2,
            seed: 0,
            sample: 4,
        };
        assert!(delta_scan(&GroupPair::free_group_cyclic_peripheral(), &params, &Limits::default()).is_err());
    }

    #[test]
    fn single_radius_single_row() {
        let params = DeltaScanParams {
            radii: vec![2],
            depth: 3,
            seed: 5,
            sample: 10,
        };
        let rows = delta_scan(&GroupPair::free_group_cyclic_peripheral(), &params, &Limits::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].seed, 5);
    }
}
