//! Lanczos iteration for the symmetric-definite pencil `A f = λ B f` with
//! diagonal `B`.
//!
//! The pencil is symmetrized as `C = B^{-1/2} A B^{-1/2}` and Lanczos runs on
//! `C` with full (two-pass Gram–Schmidt) reorthogonalization. Ritz vectors
//! `g` are mapped back as `f = B^{-1/2} g`, which makes them B-orthonormal.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, norm2, LinearOperator};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub m_request: usize,
    /// Relative residual `‖A f − λ B f‖ / ‖A f‖` accepted as converged.
    pub tol: f64,
    /// Krylov dimension cap; `None` means `4 m_request + 100`.
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            m_request: 20,
            tol: 1e-8,
            max_iter: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Descending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub converged: Vec<bool>,
    /// `‖A f − λ B f‖ / ‖A f‖` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl EigenPairs {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

struct Symmetrized<'a, Op: ?Sized> {
    a: &'a Op,
    scale: Vec<f64>,
}

impl<Op: LinearOperator + ?Sized> Symmetrized<'_, Op> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let xs: Vec<f64> = x.iter().zip(&self.scale).map(|(a, s)| a * s).collect();
        let mut y = self.a.apply_vec(&xs);
        y.iter_mut().zip(&self.scale).for_each(|(a, s)| *a *= s);
        y
    }
}

/// The `m_request` largest eigenpairs of `A f = λ B f`, `B = diag(b)`.
///
/// A zero `β` (invariant subspace) restarts with a fresh random vector
/// orthogonalized against the current basis. Pairs that miss `tol` within the
/// iteration cap are returned with `converged = false`.
pub fn lanczos_generalized(
    a: &(impl LinearOperator + ?Sized),
    b: &[f64],
    opts: &LanczosOptions,
) -> Result<EigenPairs> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    if let Some(bad) = b.iter().position(|&v| v <= 0.0 || v.is_nan()) {
        return Err(Error::Config(format!("mass diagonal entry {bad} is not positive")));
    }
    if opts.m_request > n {
        return Err(Error::Config(format!(
            "requested {} eigenpairs of a {n}-dimensional problem",
            opts.m_request
        )));
    }
    let m = opts.m_request;
    if m == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: vec![],
            converged: vec![],
            residuals: vec![],
            iterations: 0,
        });
    }
    let k_cap = opts.max_iter.unwrap_or(4 * m + 100).min(n).max(m);
    let op = Symmetrized {
        a,
        scale: b.iter().map(|v| 1.0 / v.sqrt()).collect(),
    };
    let (bmin, bmax) = b.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    // Ritz residuals live in the symmetrized space; this factor bounds the
    // generalized relative residual by the symmetrized one.
    let ritz_tol = opts.tol * (bmin / bmax).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k_cap);
    let mut alpha: Vec<f64> = Vec::with_capacity(k_cap);
    let mut beta: Vec<f64> = Vec::with_capacity(k_cap);

    let mut q = random_orthonormal(n, &basis, &mut rng)
        .ok_or_else(|| Error::Solver("could not draw a start vector".into()))?;
    let mut ritz: Option<(Vec<f64>, DMatrix<f64>)> = None;
    let mut op_scale: f64 = 0.0;

    while basis.len() < k_cap {
        let mut w = op.apply(&q);
        let a_j = dot(&q, &w);
        basis.push(q);
        alpha.push(a_j);
        for _ in 0..2 {
            for v in &basis {
                let h = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= h * vi);
            }
        }
        let b_j = norm2(&w);
        op_scale = op_scale.max(a_j.abs()).max(b_j);
        let k = basis.len();

        let check = k >= m && (k == k_cap || k.is_multiple_of(5) || b_j <= 1e-12 * op_scale);
        if check {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta);
            let done = (0..m).all(|i| (b_j * s[(k - 1, i)]).abs() <= ritz_tol * theta[i].abs().max(1e-300));
            ritz = Some((theta, s));
            if done {
                break;
            }
        }
        if k == k_cap {
            break;
        }
        if b_j <= 1e-12 * op_scale {
            match random_orthonormal(n, &basis, &mut rng) {
                Some(fresh) => {
                    beta.push(0.0);
                    q = fresh;
                }
                None => break,
            }
        } else {
            beta.push(b_j);
            q = w.into_iter().map(|v| v / b_j).collect();
        }
    }

    let k = basis.len();
    let (theta, s) = match ritz {
        Some(r) if r.0.len() == k => r,
        _ => tridiagonal_eigen(&alpha, &beta[..k - 1]),
    };

    let mut values = Vec::with_capacity(m);
    let mut vectors = Vec::with_capacity(m);
    let mut converged = Vec::with_capacity(m);
    let mut residuals = Vec::with_capacity(m);
    for i in 0..m {
        let mut g = vec![0.0; n];
        for (j, v) in basis.iter().enumerate() {
            let c = s[(j, i)];
            g.iter_mut().zip(v).for_each(|(gi, vi)| *gi += c * vi);
        }
        let ng = norm2(&g);
        let f: Vec<f64> = g.iter().zip(&op.scale).map(|(gi, sc)| gi / ng * sc).collect();
        let af = a.apply_vec(&f);
        let lam = theta[i];
        let r: Vec<f64> = af.iter().zip(&f).zip(b).map(|((x, fi), bi)| x - lam * bi * fi).collect();
        let naf = norm2(&af);
        let rel = if naf > 0.0 { norm2(&r) / naf } else { norm2(&r) };
        values.push(lam);
        vectors.push(f);
        converged.push(rel <= opts.tol);
        residuals.push(rel);
    }
    Ok(EigenPairs {
        values,
        vectors,
        converged,
        residuals,
        iterations: k,
    })
}

/// Eigenvalues (descending) and eigenvectors (columns, same order) of the
/// tridiagonal matrix with diagonal `alpha` and off-diagonal `beta`.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let theta = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let s = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (theta, s)
}

fn random_orthonormal(n: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n0 = norm2(&v);
        for _ in 0..2 {
            for u in basis {
                let h = dot(u, &v);
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= h * ui);
            }
        }
        let nv = norm2(&v);
        if nv > 1e-8 * n0 {
            return Some(v.into_iter().map(|x| x / nv).collect());
        }
    }
    None
}

/// Dense reference solver: all eigenvalues of `A f = λ B f` (descending) via
/// a full symmetric eigendecomposition of `B^{-1/2} A B^{-1/2}`.
pub fn dense_generalized_eigenvalues(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = a.nrows();
    let s: Vec<f64> = b.iter().map(|v| 1.0 / v.sqrt()).collect();
    let c = DMatrix::from_fn(n, n, |i, j| s[i] * a[(i, j)] * s[j]);
    let c = 0.5 * (&c + c.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0]));
        let r = lanczos_generalized(
            &a,
            &[1.0, 1.0],
            &LanczosOptions {
                m_request: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.values[0] - 2.0).abs() < 1e-12);
        assert!((r.values[1] - 1.0).abs() < 1e-12);
        assert!(r.vectors[0][1].abs() < 1e-10 && (r.vectors[0][0].abs() - 1.0).abs() < 1e-10);
        assert!(r.vectors[1][0].abs() < 1e-10 && (r.vectors[1][1].abs() - 1.0).abs() < 1e-10);
        assert!(r.all_converged());
    }

    #[test]
    fn identity_pencil_has_unit_spectrum() {
        let b = vec![0.5, 2.0, 1.5, 3.0, 0.25];
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b.clone()));
        let r = lanczos_generalized(
            &a,
            &b,
            &LanczosOptions {
                m_request: 3,
                ..Default::default()
            },
        )
        .unwrap();
        // C = I: the first step already spans an invariant subspace
        for v in &r.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(r.all_converged());
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = DMatrix::<f64>::identity(3, 3);
        let opts = LanczosOptions {
            m_request: 2,
            ..Default::default()
        };
        assert!(lanczos_generalized(&a, &[1.0, 0.0, 1.0], &opts).is_err());
        assert!(lanczos_generalized(&a, &[1.0, 1.0], &opts).is_err());
        let too_many = LanczosOptions {
            m_request: 4,
            ..Default::default()
        };
        assert!(lanczos_generalized(&a, &[1.0; 3], &too_many).is_err());
    }

    #[test]
    fn matches_dense_on_random_spd() {
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &g * g.transpose();
        let b: Vec<f64> = (0..n).map(|i| 0.5 + (i % 7) as f64 * 0.1).collect();
        let dense = dense_generalized_eigenvalues(&a, &b);
        let r = lanczos_generalized(
            &a,
            &b,
            &LanczosOptions {
                m_request: 5,
                ..Default::default()
            },
        )
        .unwrap();
        for i in 0..5 {
            assert!((r.values[i] - dense[i]).abs() <= 1e-8 * dense[i]);
        }
        assert!(r.all_converged());
    }
}
