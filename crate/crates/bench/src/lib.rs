//! Fixed inputs shared by the benchmarks, so that every run measures the
//! same work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relhyp_core::graph::DistanceMatrix;
use relhyp_core::group::{GroupModel, GroupPair};
use relhyp_core::horoball::{FiniteMetricSpace, HoroballGraph};
use relhyp_core::rips::{to_bigint, IntMatrix, SimplicialComplex};
use relhyp_core::Limits;

pub fn free_group() -> GroupModel {
    GroupModel::free_group(2).expect("rank 2")
}

pub fn segment_horoball(len: i64, depth: u32) -> HoroballGraph {
    HoroballGraph::build(FiniteMetricSpace::integer_segment(0, len), depth, &Limits::default()).expect("within limits")
}

/// Word metric on the ball of `radius` in `ℤ² ∗ ℤ²`.
pub fn free_product_ball_metric(radius: usize) -> DistanceMatrix {
    let pair = GroupPair::abelian_free_product(2);
    let ball = pair.model.ball(radius, &Limits::default()).expect("within limits");
    DistanceMatrix::from_fn(ball.len(), |i, j| pair.model.distance(&ball[i], &ball[j]).expect("same model") as u32)
}

/// A dense matrix with entries in `-9..=9` from a fixed seed.
pub fn dense_matrix(n: usize) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
    to_bigint(&rows)
}

/// The Rips complex of the radius-3 ball of `F₂` at scale 2.
pub fn tree_rips() -> SimplicialComplex {
    let f2 = free_group();
    let ball = f2.ball(3, &Limits::default()).expect("within limits");
    relhyp_core::rips::rips_complex(
        ball.len(),
        |i, j| f2.distance(&ball[i], &ball[j]).expect("same model") as u32,
        2,
        3,
        &Limits::default(),
    )
    .expect("within limits")
}
