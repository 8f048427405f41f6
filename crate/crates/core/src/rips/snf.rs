//! Exact Smith normal form over ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// `s = u · m · v` with `u`, `v` unimodular and `s` diagonal, its nonzero
/// entries positive and each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// The nonzero diagonal entries `d_1 | d_2 | …`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.len().min(self.s.first().map_or(0, Vec::len)))
            .map(|i| self.s[i][i].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn to_bigint(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i -= q * row_j
    fn sub_row(&mut self, i: usize, j: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(&src) {
                *x -= q * y;
            }
        }
    }

    /// col_i -= q * col_j
    fn sub_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            let y = row[j].clone();
            row[i] -= q * y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Smallest-magnitude pivoting with repeated division; exact throughout.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut w = Work {
        a: m.clone(),
        u: identity(rows),
        v: identity(cols),
    };
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = smallest_nonzero(&w.a, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in (t + 1)..rows {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.sub_row(i, t, &q);
                    if !w.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in (t + 1)..cols {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.sub_col(j, t, &q);
                    if !w.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // a nonzero remainder is smaller than the pivot; promote it
                let (pi, pj) = smallest_in_cross(&w.a, t);
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offender = ((t + 1)..rows).find(|&i| ((t + 1)..cols).any(|j| !w.a[i][j].is_multiple_of(&w.a[t][t])));
            match offender {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    w.sub_row(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    Snf { u: w.u, s: w.a, v: w.v }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn smallest_in_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut consider = |i: usize, j: usize| {
        let (bi, bj) = best;
        if !a[i][j].is_zero() && a[i][j].abs() < a[bi][bj].abs() {
            best = (i, j);
        }
    };
    for i in t..a.len() {
        consider(i, t);
    }
    for j in t..a[t].len() {
        consider(t, j);
    }
    best
}

/// Invariant factors of an integer matrix given column-sparse, without
/// materializing unimodular transforms. Columns with a unit entry are
/// eliminated first (each contributes a factor 1), and only the remainder
/// goes through the dense big-integer SNF.
pub fn sparse_invariant_factors(n_rows: usize, columns: &[Vec<(u32, i64)>]) -> Vec<BigInt> {
    let mut cols: Vec<Vec<(u32, i64)>> = columns.to_vec();
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); n_rows];
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r as usize].push(c as u32);
        }
    }
    let mut row_alive = vec![true; n_rows];
    let mut col_alive = vec![true; cols.len()];
    let mut units = 0usize;
    let mut overflow = false;

    for c in 0..cols.len() {
        let Some(&(r, pv)) = cols[c].iter().find(|&&(_, v)| v == 1 || v == -1) else { continue };
        let pivot = cols[c].clone();
        let others: Vec<u32> = std::mem::take(&mut row_cols[r as usize]);
        for &j in &others {
            let j = j as usize;
            if j == c || !col_alive[j] {
                continue;
            }
            let Ok(pos) = cols[j].binary_search_by_key(&r, |&(row, _)| row) else { continue };
            // col_j -= (a_rj / a_rc) col_c, and a_rc = ±1
            let q = cols[j][pos].1 * pv;
            match axpy(&cols[j], &pivot, q) {
                Some(merged) => {
                    for &(row, _) in &merged {
                        if cols[j].binary_search_by_key(&row, |&(x, _)| x).is_err() {
                            row_cols[row as usize].push(j as u32);
                        }
                    }
                    cols[j] = merged;
                }
                None => overflow = true,
            }
        }
        if overflow {
            break;
        }
        row_alive[r as usize] = false;
        col_alive[c] = false;
        cols[c].clear();
        units += 1;
    }
    if overflow {
        // machine words were not enough; redo everything densely
        let dense = dense_from_columns(n_rows, columns);
        return smith_normal_form(&dense).invariant_factors();
    }

    let live_rows: Vec<usize> = (0..n_rows).filter(|&r| row_alive[r]).collect();
    let mut row_pos = vec![usize::MAX; n_rows];
    for (k, &r) in live_rows.iter().enumerate() {
        row_pos[r] = k;
    }
    let rest: Vec<&Vec<(u32, i64)>> = cols
        .iter()
        .enumerate()
        .filter(|&(c, col)| col_alive[c] && !col.is_empty())
        .map(|(_, col)| col)
        .collect();
    let mut factors = vec![BigInt::one(); units];
    if !rest.is_empty() {
        let mut dense = vec![vec![BigInt::zero(); rest.len()]; live_rows.len()];
        for (k, col) in rest.iter().enumerate() {
            for &(r, v) in col.iter() {
                debug_assert!(row_alive[r as usize]);
                dense[row_pos[r as usize]][k] = BigInt::from(v);
            }
        }
        factors.extend(smith_normal_form(&dense).invariant_factors());
    }
    factors
}

/// `x - q·y` on sorted sparse vectors; `None` on overflow.
fn axpy(x: &[(u32, i64)], y: &[(u32, i64)], q: i64) -> Option<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (row, v) = if take_x {
            i += 1;
            x[i - 1]
        } else if take_y {
            j += 1;
            (y[j - 1].0, q.checked_mul(y[j - 1].1)?.checked_neg()?)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, x[i - 1].1.checked_sub(q.checked_mul(y[j - 1].1)?)?)
        };
        if v != 0 {
            out.push((row, v));
        }
    }
    Some(out)
}

pub fn dense_from_columns(n_rows: usize, columns: &[Vec<(u32, i64)>]) -> IntMatrix {
    let mut m = vec![vec![BigInt::zero(); columns.len()]; n_rows];
    for (c, col) in columns.iter().enumerate() {
        for &(r, v) in col {
            m[r as usize][c] = BigInt::from(v);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(m: &[Vec<i64>]) -> Snf {
        let m = to_bigint(m);
        let snf = smith_normal_form(&m);
        assert_eq!(mat_mul(&mat_mul(&snf.u, &m), &snf.v), snf.s);
        for (i, row) in snf.s.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    assert!(x.is_zero());
                }
            }
        }
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(f.iter().all(|d| d.is_positive()));
        snf
    }

    #[test]
    fn two_by_two_example() {
        assert_eq!(check(&[vec![2, 4], vec![6, 8]]).invariant_factors(), big(&[2, 4]));
    }

    #[test]
    fn identity_and_zero() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(check(&id).s, to_bigint(&id));
        assert_eq!(check(&[vec![0, 0], vec![0, 0]]).rank(), 0);
        assert_eq!(smith_normal_form(&Vec::new()).rank(), 0);
    }

    #[test]
    fn divisibility_needs_mixing() {
        // diag(2, 3) is not in normal form; the answer is diag(1, 6)
        assert_eq!(check(&[vec![2, 0], vec![0, 3]]).invariant_factors(), big(&[1, 6]));
    }

    #[test]
    fn rectangular() {
        let f = check(&[vec![4, 6, 2], vec![2, 2, 0]]).invariant_factors();
        assert_eq!(f, big(&[2, 2]));
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let columns = vec![
            vec![(0, 1), (1, -1)],
            vec![(1, 1), (2, -1)],
            vec![(0, 1), (2, -1)],
            vec![(2, 2)],
            vec![(0, 3), (3, 6)],
        ];
        let dense = dense_from_columns(4, &columns);
        assert_eq!(
            sparse_invariant_factors(4, &columns),
            smith_normal_form(&dense).invariant_factors()
        );
    }
}
