//! Non-intrusive stochastic collocation on tensor Gauss–Legendre grids.

mod quadrature;

pub use quadrature::{gauss_legendre_1d, XI_BOUND};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fem::InductanceModel;
use crate::kle::KleModel;
use crate::{Error, Result};

/// Default cap on the number of tensor grid nodes.
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Full tensor grid over `[−√3, √3]^M` with weights that integrate the
/// uniform joint density.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    pub dim: usize,
    pub nodes_1d: Vec<f64>,
    pub weights_1d: Vec<f64>,
    /// Node `k` has multi-index digits of `k` in base `points_per_dim`,
    /// dimension 0 varying fastest.
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl CollocationGrid {
    pub fn points_per_dim(&self) -> usize {
        self.nodes_1d.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let base = self.points_per_dim();
        (0..self.dim)
            .map(|_| {
                let d = k % base;
                k /= base;
                d
            })
            .collect()
    }
}

/// Tensor product of the `(p + 1)`-point rule in `m` dimensions. `m = 0`
/// gives the single node `ξ = ()` with weight one.
pub fn tensor_grid(p: usize, m: usize, node_budget: usize) -> Result<CollocationGrid> {
    let (x, w) = gauss_legendre_1d(p);
    let count = (p + 1)
        .checked_pow(m as u32)
        .filter(|&c| c <= node_budget)
        .ok_or_else(|| Error::Budget(format!("(p+1)^M = {}^{m} collocation nodes exceed budget {node_budget}", p + 1)))?;
    let mut grid = CollocationGrid {
        dim: m,
        nodes_1d: x,
        weights_1d: w,
        nodes: Vec::with_capacity(count),
        weights: Vec::with_capacity(count),
    };
    for k in 0..count {
        let idx = grid.multi_index(k);
        grid.nodes.push(idx.iter().map(|&i| grid.nodes_1d[i]).collect());
        grid.weights.push(idx.iter().map(|&i| grid.weights_1d[i]).product());
    }
    Ok(grid)
}

/// Inductance at each grid node; `None` where the field sample was not
/// strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationRun {
    pub values: Vec<Option<f64>>,
    pub rejected: usize,
}

/// Solves the deterministic problem at every node (in parallel; results are
/// in node order and independent of scheduling).
pub fn run_collocation(grid: &CollocationGrid, kle: &KleModel, model: &InductanceModel) -> Result<CollocationRun> {
    if grid.dim != kle.order() || model.stiffness.order() != kle.order() {
        return Err(Error::Dimension {
            expected: kle.order(),
            got: grid.dim,
        });
    }
    let values = grid
        .nodes
        .par_iter()
        .enumerate()
        .map(|(k, xi)| evaluate_node(k, xi, kle, model))
        .collect::<Result<Vec<_>>>()?;
    let rejected = values.iter().filter(|v| v.is_none()).count();
    if rejected == values.len() {
        return Err(Error::AllRejected(rejected));
    }
    Ok(CollocationRun { values, rejected })
}

fn evaluate_node(k: usize, xi: &[f64], kle: &KleModel, model: &InductanceModel) -> Result<Option<f64>> {
    if !kle.sample(xi)?.valid {
        return Ok(None);
    }
    match model.evaluate(xi) {
        Ok(e) => Ok(Some(e.inductance)),
        Err(Error::Solver(msg)) => Err(Error::Solver(format!("collocation node {k} (xi = {xi:?}): {msg}"))),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
    pub rejected: usize,
}

/// Quadrature mean and standard deviation, `L_μ = Σ w_k L_k`,
/// `L_std = sqrt(Σ w_k (L_k − L_μ)²)`. Rejected nodes are dropped and the
/// remaining weights renormalized.
pub fn moments(values: &[Option<f64>], weights: &[f64]) -> Result<Moments> {
    if values.len() != weights.len() {
        return Err(Error::Dimension {
            expected: weights.len(),
            got: values.len(),
        });
    }
    let kept: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter_map(|(v, &w)| v.map(|l| (l, w)))
        .collect();
    let rejected = values.len() - kept.len();
    let wsum: f64 = kept.iter().map(|(_, w)| w).sum();
    if kept.is_empty() || wsum <= 0.0 {
        return Err(Error::AllRejected(values.len()));
    }
    let mean = kept.iter().map(|(l, w)| l * w).sum::<f64>() / wsum;
    let var = kept.iter().map(|(l, w)| w * (l - mean) * (l - mean)).sum::<f64>() / wsum;
    Ok(Moments {
        mean,
        std: var.max(0.0).sqrt(),
        rejected,
    })
}

/// One row of the inductance statistics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub l_mu: f64,
    pub l_std: f64,
    /// KLE truncation order.
    pub m: usize,
    pub p: usize,
    pub n_c: usize,
    pub rejected: usize,
    pub d: f64,
    pub sigma: f64,
}

/// Grid construction, per-node solves, and moments for one KLE.
pub fn collocation_statistics(kle: &KleModel, model: &InductanceModel, p: usize, node_budget: usize) -> Result<(MomentReport, CollocationGrid, CollocationRun)> {
    let grid = tensor_grid(p, kle.order(), node_budget)?;
    let run = run_collocation(&grid, kle, model)?;
    let mom = moments(&run.values, &grid.weights)?;
    Ok((
        MomentReport {
            l_mu: mom.mean,
            l_std: mom.std,
            m: kle.order(),
            p,
            n_c: grid.len(),
            rejected: mom.rejected,
            d: kle.kernel.d,
            sigma: kle.kernel.sigma,
        },
        grid,
        run,
    ))
}

/// Tensor Lagrange interpolation of nodal values, barycentric per
/// dimension.
pub fn interpolate_surrogate(grid: &CollocationGrid, values: &[f64], query: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: values.len(),
        });
    }
    if query.len() != grid.dim {
        return Err(Error::Dimension {
            expected: grid.dim,
            got: query.len(),
        });
    }
    let nodes = &grid.nodes_1d;
    let n = nodes.len();
    let bary: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product::<f64>())
        .collect();
    let basis: Vec<Vec<f64>> = query
        .iter()
        .map(|&q| {
            if let Some(hit) = nodes.iter().position(|&x| x == q) {
                return (0..n).map(|j| if j == hit { 1.0 } else { 0.0 }).collect();
            }
            let terms: Vec<f64> = (0..n).map(|j| bary[j] / (q - nodes[j])).collect();
            let denom: f64 = terms.iter().sum();
            terms.into_iter().map(|t| t / denom).collect()
        })
        .collect();
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let idx = grid.multi_index(k);
            v * idx.iter().enumerate().map(|(d, &i)| basis[d][i]).product::<f64>()
        })
        .sum())
}

/// Plain Monte Carlo with independent uniform `ξ_i` on `[−√3, √3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std: f64,
    /// Standard error of the mean, `std / √n`.
    pub mean_stderr: f64,
    /// Standard error of the standard deviation estimate.
    pub std_stderr: f64,
    pub samples: usize,
    pub rejected: usize,
}

pub fn monte_carlo(kle: &KleModel, model: &InductanceModel, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..kle.order()).map(|_| rng.random_range(-XI_BOUND..XI_BOUND)).collect())
        .collect();
    let values = draws
        .par_iter()
        .enumerate()
        .map(|(k, xi)| evaluate_node(k, xi, kle, model))
        .collect::<Result<Vec<_>>>()?;
    let kept: Vec<f64> = values.into_iter().flatten().collect();
    let n = kept.len();
    if n < 2 {
        return Err(Error::AllRejected(samples));
    }
    let mean = kept.iter().sum::<f64>() / n as f64;
    let m2 = kept.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let m4 = kept.iter().map(|l| (l - mean).powi(4)).sum::<f64>() / n as f64;
    let std = m2.sqrt();
    // delta method: Var(s) ≈ (μ₄ − σ⁴) / (4 n σ²)
    let std_stderr = if m2 > 0.0 {
        ((m4 - m2 * m2).max(0.0) / (4.0 * n as f64 * m2)).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        mean,
        std,
        mean_stderr: std / (n as f64).sqrt(),
        std_stderr,
        samples: n,
        rejected: samples - n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_weights() {
        let g = tensor_grid(2, 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(g.len(), 27);
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(g.nodes.iter().flatten().all(|x| x.abs() < XI_BOUND));
    }

    #[test]
    fn one_dimensional_grid_is_the_rule() {
        let g = tensor_grid(3, 1, 100).unwrap();
        let (x, w) = gauss_legendre_1d(3);
        assert_eq!(g.nodes.iter().map(|n| n[0]).collect::<Vec<_>>(), x);
        assert_eq!(g.weights, w);
    }

    #[test]
    fn zero_dimensional_grid() {
        let g = tensor_grid(2, 0, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.weights, vec![1.0]);
    }

    #[test]
    fn budget_guard_names_count() {
        match tensor_grid(2, 20, DEFAULT_NODE_BUDGET) {
            Err(Error::Budget(msg)) => assert!(msg.contains("3^20")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_node_moments() {
        let m = moments(&[Some(1.0), Some(3.0)], &[0.5, 0.5]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
    }

    #[test]
    fn constant_values_have_zero_spread() {
        let l = 1.234_567e-3;
        let m = moments(&[Some(l); 9], &tensor_grid(2, 2, 100).unwrap().weights).unwrap();
        assert!(m.std <= 1e-14 * l);
    }

    #[test]
    fn rejected_nodes_are_renormalized() {
        let m = moments(&[Some(2.0), None, Some(4.0)], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(m.rejected, 1);
        assert_eq!(m.mean, 3.0);
        assert!(moments(&[None, None], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn surrogate_interpolates_nodes() {
        let g = tensor_grid(2, 2, 100).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|k| (k as f64).sin() + 2.0).collect();
        for (k, node) in g.nodes.iter().enumerate() {
            let s = interpolate_surrogate(&g, &vals, node).unwrap();
            assert!((s - vals[k]).abs() <= 1e-12 * vals[k].abs());
        }
    }
}
