//! Hierarchical matrix compression of the covariance Galerkin matrix.
//!
//! Core elements are clustered by a box tree, the index square is
//! partitioned by a block cluster tree, and each admissible block is
//! compressed with ACA. Everything downstream only needs [`HMatrix::apply`].

mod aca;
mod block;
mod cluster;

use std::collections::HashMap;
use std::mem::size_of;
use std::ops::Range;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use aca::{aca_approximate, LowRankBlock};
pub use block::{admissible, BlockClusterTree, BlockKind, BlockNode};
pub use cluster::{ClusterNode, ClusterTree};

use crate::kle::CovarianceKernel;
use crate::linalg::{norm2, LinearOperator};
use crate::mesh::ElementGeometry;
use crate::{Error, Result};

/// Compression parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HParams {
    /// Leaf size cap of the cluster tree.
    pub n_min: usize,
    pub eta: f64,
    /// ACA relative tolerance.
    pub epsilon: f64,
    /// ACA rank cap; `None` means `min(p, q, 128)`.
    pub k_max: Option<usize>,
}

impl Default for HParams {
    fn default() -> Self {
        HParams {
            n_min: 256,
            eta: 1.0,
            epsilon: 0.01,
            k_max: None,
        }
    }
}

const DEFAULT_RANK_CAP: usize = 128;

#[derive(Debug, Clone)]
pub enum BlockData {
    Dense(DMatrix<f64>),
    LowRank(LowRankBlock),
}

#[derive(Debug, Clone)]
pub struct Leaf {
    /// Row positions (cluster ordering).
    pub rows: Range<usize>,
    /// Column positions (cluster ordering).
    pub cols: Range<usize>,
    pub data: BlockData,
}

#[derive(Debug, Clone)]
pub struct HMatrix {
    tree: ClusterTree,
    blocks: BlockClusterTree,
    leaves: Vec<Leaf>,
}

/// Covariance Galerkin entry with one-point centroid quadrature:
/// `Cov(c_i, c_j) · |τ_i| · |τ_j|`.
pub fn covariance_entry(kernel: &CovarianceKernel, gi: &ElementGeometry, gj: &ElementGeometry) -> f64 {
    kernel.eval(gi.centroid, gj.centroid) * gi.area * gj.area
}

/// Dense covariance Galerkin matrix; the reference the H-matrix is measured
/// against.
pub fn covariance_matrix_dense(geometries: &[ElementGeometry], kernel: &CovarianceKernel) -> DMatrix<f64> {
    let n = geometries.len();
    DMatrix::from_fn(n, n, |i, j| covariance_entry(kernel, &geometries[i], &geometries[j]))
}

/// Builds the cluster tree, block cluster tree and compressed covariance
/// matrix over the given core elements.
pub fn assemble_covariance_hmatrix(
    geometries: &[ElementGeometry],
    kernel: &CovarianceKernel,
    params: &HParams,
) -> HMatrix {
    let tree = ClusterTree::build(geometries, params.n_min);
    let blocks = BlockClusterTree::build(&tree, params.eta);
    HMatrix::from_symmetric_entries(tree, blocks, params, |i, j| {
        covariance_entry(kernel, &geometries[i], &geometries[j])
    })
}

fn leaf_data<F>(tree: &ClusterTree, params: &HParams, entry: &F, rows: &Range<usize>, cols: &Range<usize>, kind: BlockKind) -> BlockData
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let perm = tree.permutation();
    let (p, q) = (rows.len(), cols.len());
    let (r0, c0) = (rows.start, cols.start);
    match kind {
        BlockKind::Admissible => {
            let cap = params.k_max.unwrap_or(DEFAULT_RANK_CAP);
            BlockData::LowRank(aca_approximate(|i, j| entry(perm[r0 + i], perm[c0 + j]), p, q, params.epsilon, cap))
        }
        _ => BlockData::Dense(DMatrix::from_fn(p, q, |i, j| entry(perm[r0 + i], perm[c0 + j]))),
    }
}

impl HMatrix {
    /// Fills every leaf from `entry(i, j)`, indexed in the original
    /// (unpermuted) numbering. Leaves are assembled in parallel.
    pub fn from_entries<F>(tree: ClusterTree, blocks: BlockClusterTree, params: &HParams, entry: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let boxes = blocks.leaf_boxes(&tree);
        let leaves = boxes
            .into_par_iter()
            .map(|(rows, cols, kind)| {
                let data = leaf_data(&tree, params, &entry, &rows, &cols, kind);
                Leaf { rows, cols, data }
            })
            .collect();
        HMatrix { tree, blocks, leaves }
    }

    /// Like [`HMatrix::from_entries`] for a symmetric `entry`: only leaves on
    /// or above the block diagonal are approximated and each mirrored leaf
    /// stores the transposed data, so the result is exactly symmetric.
    pub fn from_symmetric_entries<F>(tree: ClusterTree, blocks: BlockClusterTree, params: &HParams, entry: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let boxes = blocks.leaf_boxes(&tree);
        let upper: Vec<usize> = (0..boxes.len()).filter(|&b| boxes[b].0.start <= boxes[b].1.start).collect();
        let computed: Vec<BlockData> = upper
            .par_iter()
            .map(|&b| {
                let (rows, cols, kind) = &boxes[b];
                leaf_data(&tree, params, &entry, rows, cols, *kind)
            })
            .collect();
        let index: HashMap<(usize, usize), usize> = upper
            .iter()
            .enumerate()
            .map(|(k, &b)| ((boxes[b].0.start, boxes[b].1.start), k))
            .collect();
        let leaves = boxes
            .into_iter()
            .map(|(rows, cols, _)| {
                let data = if rows.start <= cols.start {
                    computed[index[&(rows.start, cols.start)]].clone()
                } else {
                    match &computed[index[&(cols.start, rows.start)]] {
                        BlockData::Dense(m) => BlockData::Dense(m.transpose()),
                        BlockData::LowRank(lr) => BlockData::LowRank(LowRankBlock { u: lr.v.clone(), v: lr.u.clone() }),
                    }
                };
                Leaf { rows, cols, data }
            })
            .collect();
        HMatrix { tree, blocks, leaves }
    }

    pub fn dim(&self) -> usize {
        self.tree.len()
    }

    pub fn cluster_tree(&self) -> &ClusterTree {
        &self.tree
    }

    pub fn block_tree(&self) -> &BlockClusterTree {
        &self.blocks
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    fn permuted_product(&self, x: &[f64], transpose: bool) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "hmatvec dimension mismatch");
        let perm = self.tree.permutation();
        let xp: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        let mut yp = vec![0.0; n];
        for leaf in &self.leaves {
            let (rows, cols) = if transpose {
                (&leaf.cols, &leaf.rows)
            } else {
                (&leaf.rows, &leaf.cols)
            };
            let xs = &xp[cols.clone()];
            let ys = &mut yp[rows.clone()];
            match (&leaf.data, transpose) {
                (BlockData::Dense(m), false) => dense_gemv_acc(m, xs, ys),
                (BlockData::Dense(m), true) => dense_gemv_t_acc(m, xs, ys),
                (BlockData::LowRank(lr), false) => lr.gemv_acc(xs, ys),
                (BlockData::LowRank(lr), true) => lr.gemv_transpose_acc(xs, ys),
            }
        }
        let mut y = vec![0.0; n];
        for (pos, &i) in perm.iter().enumerate() {
            y[i] = yp[pos];
        }
        y
    }

    /// `y = Ã x` in original element order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.permuted_product(x, false))
    }

    /// `y = Ãᵀ x` in original element order.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.permuted_product(x, true))
    }

    /// Expands to a dense matrix in original ordering.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let perm = self.tree.permutation();
        let mut out = DMatrix::zeros(n, n);
        for leaf in &self.leaves {
            let block = match &leaf.data {
                BlockData::Dense(m) => m.clone(),
                BlockData::LowRank(lr) => lr.to_dense(),
            };
            for (a, i) in leaf.rows.clone().enumerate() {
                for (b, j) in leaf.cols.clone().enumerate() {
                    out[(perm[i], perm[j])] = block[(a, b)];
                }
            }
        }
        out
    }

    pub fn max_rank(&self) -> usize {
        self.leaves
            .iter()
            .filter_map(|l| match &l.data {
                BlockData::LowRank(lr) => Some(lr.rank()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn memory_report(&self) -> MemoryReport {
        let mut dense_bytes = 0;
        let mut low_rank_bytes = 0;
        let mut dense_blocks = 0;
        let mut low_rank_blocks = 0;
        for leaf in &self.leaves {
            match &leaf.data {
                BlockData::Dense(m) => {
                    dense_blocks += 1;
                    dense_bytes += m.len() * size_of::<f64>();
                }
                BlockData::LowRank(lr) => {
                    low_rank_blocks += 1;
                    low_rank_bytes += lr.rank() * (lr.rows() + lr.cols()) * size_of::<f64>();
                }
            }
        }
        let overhead = self.tree.len() * size_of::<usize>()
            + size_of_val(self.tree.nodes())
            + size_of_val(self.blocks.nodes())
            + self.leaves.len() * size_of::<Leaf>();
        let n = self.dim();
        let bytes_hmatrix = dense_bytes + low_rank_bytes + overhead;
        let bytes_dense = n * n * size_of::<f64>();
        MemoryReport {
            n,
            bytes_hmatrix,
            bytes_dense,
            ratio: bytes_hmatrix as f64 / bytes_dense as f64,
            max_rank: self.max_rank(),
            dense_blocks,
            low_rank_blocks,
        }
    }

    /// `Δ = ‖A − Ã‖₂ / ‖A‖₂` against the densely assembled covariance matrix.
    /// Both spectral norms come from power iteration on the normal operator
    /// (at most 50 steps, or until the estimate moves by less than 1e-6).
    ///
    /// Refuses with [`Error::NotComputable`] when the dense matrix would take
    /// more than `budget_bytes`.
    pub fn relative_error_dense(
        &self,
        geometries: &[ElementGeometry],
        kernel: &CovarianceKernel,
        budget_bytes: usize,
    ) -> Result<f64> {
        let n = self.dim();
        let need = n.saturating_mul(n).saturating_mul(size_of::<f64>());
        if need > budget_bytes {
            return Err(Error::NotComputable(format!(
                "dense {n}x{n} matrix needs {need} bytes, budget {budget_bytes}"
            )));
        }
        let a = covariance_matrix_dense(geometries, kernel);
        let err = |x: &[f64], transpose: bool| -> Vec<f64> {
            let mut ax = a.apply_vec(x);
            let hx = if transpose {
                self.permuted_product(x, true)
            } else {
                self.permuted_product(x, false)
            };
            ax.iter_mut().zip(hx).for_each(|(u, v)| *u -= v);
            ax
        };
        let num = normal_power_iteration(n, |x| err(&err(x, false), true));
        let den = normal_power_iteration(n, |x| a.apply_vec(&a.apply_vec(x)));
        Ok(if den == 0.0 { 0.0 } else { num / den })
    }
}

impl LinearOperator for HMatrix {
    fn dim(&self) -> usize {
        self.tree.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.permuted_product(x, false));
    }
}

/// Largest singular value from power iteration on `x ↦ Eᵀ E x`.
fn normal_power_iteration(n: usize, normal: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    // deterministic, non-degenerate start
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut est = 0.0f64;
    for _ in 0..50 {
        let y = normal(&x);
        let ny = norm2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let converged = (ny - est).abs() <= 1e-6 * ny;
        est = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if converged {
            break;
        }
    }
    est.sqrt()
}

fn dense_gemv_acc(m: &DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let p = m.nrows();
    for (j, &xj) in x.iter().enumerate() {
        let col = &m.as_slice()[j * p..(j + 1) * p];
        for (yi, &a) in y.iter_mut().zip(col) {
            *yi += a * xj;
        }
    }
}

fn dense_gemv_t_acc(m: &DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let p = m.nrows();
    for (j, yj) in y.iter_mut().enumerate() {
        let col = &m.as_slice()[j * p..(j + 1) * p];
        *yj += col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Storage summary of an [`HMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryReport {
    pub n: usize,
    /// Dense leaves, low-rank factors, and tree bookkeeping.
    pub bytes_hmatrix: usize,
    /// `n² · 8`.
    pub bytes_dense: usize,
    pub ratio: f64,
    pub max_rank: usize,
    pub dense_blocks: usize,
    pub low_rank_blocks: usize,
}
