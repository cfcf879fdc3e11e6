//! Linear algebra plumbing: operator trait, sparse storage, direct solver,
//! norm estimation.

mod cholesky;
mod sparse;

pub use cholesky::{EnvelopeCholesky, EnvelopeFactor};
pub use sparse::{CsrMatrix, CsrPattern};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Square linear map applied by matrix-vector products.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`. `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        y.iter_mut().for_each(|v| *v = 0.0);
        // column-major: accumulate column by column
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let col = &self.as_slice()[j * n..(j + 1) * n];
            for (yi, &a) in y.iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
    }
}

/// `A - B` as an operator.
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: LinearOperator + ?Sized, B: LinearOperator + ?Sized> LinearOperator for Difference<'_, A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y);
        let z = self.1.apply_vec(x);
        y.iter_mut().zip(z).for_each(|(a, b)| *a -= b);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Spectral norm of a symmetric operator by power iteration, stopping after
/// `max_iter` steps or when the estimate changes by less than `rel_tol`.
pub fn spectral_norm(op: &(impl LinearOperator + ?Sized), max_iter: usize, rel_tol: f64, seed: u64) -> f64 {
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut est = 0.0;
    for _ in 0..max_iter {
        let y = op.apply_vec(&x);
        let ny = norm2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let converged = (ny - est).abs() <= rel_tol * ny;
        est = ny;
        x = y.into_iter().map(|v| v / ny).collect();
        if converged {
            break;
        }
    }
    est
}
