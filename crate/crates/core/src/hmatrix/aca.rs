//! Adaptive cross approximation with partial pivoting.

use nalgebra::DMatrix;

/// `U Vᵀ` factorization of a `p × q` block; `U` is `p × k`, `V` is `q × k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankBlock {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

impl LowRankBlock {
    pub fn zero(p: usize, q: usize) -> Self {
        LowRankBlock {
            u: DMatrix::zeros(p, 0),
            v: DMatrix::zeros(q, 0),
        }
    }

    pub fn rank(&self) -> usize {
        self.u.ncols()
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        &self.u * self.v.transpose()
    }

    /// `y += U (Vᵀ x)`
    pub fn gemv_acc(&self, x: &[f64], y: &mut [f64]) {
        gemv_factored(&self.u, &self.v, x, y);
    }

    /// `y += V (Uᵀ x)`
    pub fn gemv_transpose_acc(&self, x: &[f64], y: &mut [f64]) {
        gemv_factored(&self.v, &self.u, x, y);
    }
}

fn gemv_factored(left: &DMatrix<f64>, right: &DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let (p, q) = (left.nrows(), right.nrows());
    for l in 0..left.ncols() {
        let rc = &right.as_slice()[l * q..(l + 1) * q];
        let t: f64 = rc.iter().zip(x).map(|(a, b)| a * b).sum();
        if t == 0.0 {
            continue;
        }
        let lc = &left.as_slice()[l * p..(l + 1) * p];
        for (yi, &a) in y.iter_mut().zip(lc) {
            *yi += a * t;
        }
    }
}

/// Builds a low-rank approximation of the `p × q` block whose entries are
/// `entry(i, j)`, adding one cross `u_k v_kᵀ` per step until
/// `‖u_k‖‖v_k‖ <= epsilon · ‖Σ u_l v_lᵀ‖_F` or `k_max` crosses.
///
/// Pivots: the row pivot starts at 0 and then moves to the largest entry of
/// the latest column among rows not yet used; the column pivot is the largest
/// entry of the residual row. Before stopping (on the criterion or on a
/// vanishing residual row) a few rows and columns are sampled; if one of
/// them still carries more than its share of the allowed residual
/// (`ε‖S‖_F/√p` per row, `ε‖S‖_F/√q` per column), iteration resumes from it.
/// A block whose rows are all zero yields rank 0.
pub fn aca_approximate(
    entry: impl Fn(usize, usize) -> f64,
    p: usize,
    q: usize,
    epsilon: f64,
    k_max: usize,
) -> LowRankBlock {
    let k_max = k_max.min(p).min(q);
    if k_max == 0 {
        return LowRankBlock::zero(p, q);
    }
    let mut us: Vec<Vec<f64>> = Vec::new();
    let mut vs: Vec<Vec<f64>> = Vec::new();
    let mut row_used = vec![false; p];
    let mut frob2: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut pivot_row = Some(0);
    let mut sampler = Sampler::new(p, q);

    let residual_row = |i: usize, us: &[Vec<f64>], vs: &[Vec<f64>]| -> Vec<f64> {
        let mut row: Vec<f64> = (0..q).map(|j| entry(i, j)).collect();
        for (u, v) in us.iter().zip(vs) {
            let ui = u[i];
            row.iter_mut().zip(v).for_each(|(r, vj)| *r -= ui * vj);
        }
        row
    };
    let residual_col = |j: usize, us: &[Vec<f64>], vs: &[Vec<f64>]| -> Vec<f64> {
        let mut col: Vec<f64> = (0..p).map(|i| entry(i, j)).collect();
        for (u, v) in us.iter().zip(vs) {
            let vj = v[j];
            col.iter_mut().zip(u).for_each(|(c, ui)| *c -= ui * vj);
        }
        col
    };

    while let Some(i) = pivot_row {
        if us.len() >= k_max {
            break;
        }
        row_used[i] = true;
        let row = residual_row(i, &us, &vs);
        scale = row.iter().fold(scale, |m, v| m.max(v.abs()));
        let (pivot_col, delta) = row
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bj, bv), (j, &r)| if r.abs() > bv.abs() { (j, r) } else { (bj, bv) });

        if delta == 0.0 || delta.abs() <= 1e-14 * scale {
            pivot_row = if us.is_empty() {
                row_used.iter().position(|&used| !used)
            } else {
                sampler.restart_row(
                    &row_used,
                    epsilon * frob2.sqrt(),
                    |r| residual_row(r, &us, &vs),
                    |c| residual_col(c, &us, &vs),
                )
            };
            continue;
        }

        let v: Vec<f64> = row.iter().map(|r| r / delta).collect();
        let u = residual_col(pivot_col, &us, &vs);

        let nu2: f64 = u.iter().map(|x| x * x).sum();
        let nv2: f64 = v.iter().map(|x| x * x).sum();
        let cross: f64 = us
            .iter()
            .zip(&vs)
            .map(|(ul, vl)| dot(ul, &u) * dot(vl, &v))
            .sum();
        frob2 = (frob2 + 2.0 * cross + nu2 * nv2).max(0.0);

        let next = largest_unused(&u, &row_used);
        us.push(u);
        vs.push(v);

        pivot_row = if (nu2 * nv2).sqrt() <= epsilon * frob2.sqrt() {
            sampler.restart_row(
                &row_used,
                epsilon * frob2.sqrt(),
                |r| residual_row(r, &us, &vs),
                |c| residual_col(c, &us, &vs),
            )
        } else {
            next
        };
    }

    let k = us.len();
    LowRankBlock {
        u: DMatrix::from_fn(p, k, |i, l| us[l][i]),
        v: DMatrix::from_fn(q, k, |j, l| vs[l][j]),
    }
}

fn largest_unused(col: &[f64], used: &[bool]) -> Option<usize> {
    (0..col.len())
        .filter(|&r| !used[r])
        .fold(None, |best: Option<usize>, r| match best {
            Some(b) if col[b].abs() >= col[r].abs() => best,
            _ => Some(r),
        })
}

const STOP_SAMPLES: usize = 6;

/// Deterministic pseudo-random rows and columns for the stopping check.
struct Sampler {
    state: u64,
    p: usize,
    q: usize,
}

impl Sampler {
    fn new(p: usize, q: usize) -> Self {
        Sampler {
            state: 0x9e37_79b9_7f4a_7c15 ^ ((p as u64) << 32) ^ q as u64,
            p,
            q,
        }
    }

    fn next_below(&mut self, n: usize) -> usize {
        // splitmix64
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ((z ^ (z >> 31)) % n as u64) as usize
    }

    /// A row to resume from, or `None` when the sampled residual rows and
    /// columns are all within their share of `tol = ε‖S‖_F`.
    fn restart_row(
        &mut self,
        used: &[bool],
        tol: f64,
        residual_row: impl Fn(usize) -> Vec<f64>,
        residual_col: impl Fn(usize) -> Vec<f64>,
    ) -> Option<usize> {
        if used.iter().all(|&u| u) {
            return None;
        }
        let row_budget = tol / (self.p as f64).sqrt();
        let col_budget = tol / (self.q as f64).sqrt();
        let mut worst: Option<(usize, f64)> = None;
        for _ in 0..STOP_SAMPLES {
            let mut r = self.next_below(self.p);
            while used[r] {
                r = (r + 1) % self.p;
            }
            let excess = norm(&residual_row(r)) / row_budget;
            if worst.is_none_or(|(_, w)| excess > w) {
                worst = Some((r, excess));
            }
            let col = residual_col(self.next_below(self.q));
            if let Some(r) = largest_unused(&col, used) {
                let excess = norm(&col) / col_budget;
                if worst.is_none_or(|(_, w)| excess > w) {
                    worst = Some((r, excess));
                }
            }
        }
        worst.filter(|&(_, w)| w > 1.0).map(|(r, _)| r)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
