//! Envelope (profile) Cholesky factorization after reverse Cuthill–McKee
//! reordering. The symbolic analysis depends only on the sparsity pattern,
//! so it is computed once and reused for every numeric factorization.

use std::collections::VecDeque;

use super::sparse::{CsrMatrix, CsrPattern};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// `inv[old] = new`
    inv: Vec<usize>,
    /// First column of the envelope in each permuted row.
    first: Vec<usize>,
    /// Offset of each permuted row in the packed factor storage.
    offset: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EnvelopeFactor<'a> {
    sym: &'a EnvelopeCholesky,
    l: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn analyze(pattern: &CsrPattern) -> Self {
        let perm = reverse_cuthill_mckee(pattern);
        let n = perm.len();
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for &j_old in pattern.row(old) {
                let j = inv[j_old];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i] + 1));
        }
        EnvelopeCholesky { perm, inv, first, offset }
    }

    pub fn envelope_size(&self) -> usize {
        *self.offset.last().unwrap_or(&0)
    }

    pub fn factor(&self, a: &CsrMatrix) -> Result<EnvelopeFactor<'_>> {
        let n = self.perm.len();
        let mut l = vec![0.0; self.envelope_size()];
        let pattern = a.pattern();
        for old in 0..n {
            let i = self.inv[old];
            for k in pattern.row_range(old) {
                let j = self.inv[pattern.row(old)[k - pattern.row_range(old).start]];
                if j <= i {
                    l[self.offset[i] + j - self.first[i]] = a.values()[k];
                }
            }
        }
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offset[i];
            for j in fi..i {
                let fj = self.first[j];
                let oj = self.offset[j];
                let k0 = fi.max(fj);
                let mut s = l[oi + j - fi];
                let ri = &l[oi + k0 - fi..oi + j - fi];
                let rj = &l[oj + k0 - fj..oj + j - fj];
                s -= ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>();
                l[oi + j - fi] = s / l[oj + j - fj];
            }
            let row = &l[oi..oi + i - fi];
            let d = l[oi + i - fi] - row.iter().map(|v| v * v).sum::<f64>();
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::Solver(format!(
                    "matrix not positive definite (pivot {d:e} at row {})",
                    self.perm[i]
                )));
            }
            l[oi + i - fi] = d.sqrt();
        }
        Ok(EnvelopeFactor { sym: self, l })
    }
}

impl EnvelopeFactor<'_> {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let s = self.sym;
        let n = s.perm.len();
        let mut y: Vec<f64> = (0..n).map(|i| b[s.perm[i]]).collect();
        // L y = b
        for i in 0..n {
            let fi = s.first[i];
            let oi = s.offset[i];
            let row = &self.l[oi..oi + i - fi];
            let acc: f64 = row.iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - acc) / self.l[oi + i - fi];
        }
        // Lᵀ x = y, column sweep
        for i in (0..n).rev() {
            let fi = s.first[i];
            let oi = s.offset[i];
            y[i] /= self.l[oi + i - fi];
            let yi = y[i];
            for (k, v) in self.l[oi..oi + i - fi].iter().enumerate() {
                y[fi + k] -= v * yi;
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[s.perm[i]] = y[i];
        }
        x
    }
}

/// Reverse Cuthill–McKee ordering, one BFS per connected component, each
/// started from a pseudo-peripheral vertex.
fn reverse_cuthill_mckee(pattern: &CsrPattern) -> Vec<usize> {
    let n = pattern.dim();
    let degree: Vec<usize> = (0..n).map(|i| pattern.row(i).iter().filter(|&&j| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, mask: &[bool]| -> (Vec<usize>, usize) {
        let mut depth = vec![usize::MAX; n];
        let mut q = VecDeque::from([start]);
        depth[start] = 0;
        let mut last = Vec::new();
        let mut max_depth = 0;
        while let Some(v) = q.pop_front() {
            if depth[v] > max_depth {
                max_depth = depth[v];
                last.clear();
            }
            last.push(v);
            for &w in pattern.row(v) {
                if !mask[w] && depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    q.push_back(w);
                }
            }
        }
        (last, max_depth)
    };

    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (degree[v], v));
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        let mut root = seed;
        let (mut far, mut ecc) = bfs_levels(root, &visited);
        for _ in 0..8 {
            let cand = *far.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            let (f2, e2) = bfs_levels(cand, &visited);
            if e2 <= ecc {
                break;
            }
            root = cand;
            far = f2;
            ecc = e2;
        }
        let mut q = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = q.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = pattern.row(v).iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}
