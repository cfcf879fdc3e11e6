//! Truncated Karhunen–Loève expansion of the core reluctivity.
//!
//! Eigenfunctions are piecewise constant on core elements. The Galerkin
//! eigenproblem `A f = λ B f` has the (H-matrix compressed) covariance matrix
//! `A` and the diagonal area matrix `B`.

mod analytic;
mod kernel;
mod lanczos;

pub use analytic::analytic_eigenvalues_1d;
pub use kernel::{CovarianceKernel, KernelKind};
pub use lanczos::{dense_generalized_eigenvalues, lanczos_generalized, EigenPairs, LanczosOptions};

use crate::hmatrix::{assemble_covariance_hmatrix, HMatrix, HParams};
use crate::mesh::{CoreElements, ElementGeometry};
use crate::{Error, Result};

/// `B = diag(|τ_i|)`: piecewise-constant trial and test functions only
/// overlap on their own element.
pub fn assemble_mass_diagonal(geometries: &[ElementGeometry]) -> Vec<f64> {
    geometries.iter().map(|g| g.area).collect()
}

/// Smallest `M` with `Σ_{i≤M} λ_i / (σ² |D_c|) >= threshold`, together with
/// the captured ratio. The denominator is the exact operator trace.
pub fn truncate(eigenvalues: &[f64], kernel: &CovarianceKernel, core_area: f64, threshold: f64) -> Result<(usize, f64)> {
    let trace = kernel.variance() * core_area;
    if trace == 0.0 {
        return Ok((0, 1.0));
    }
    let mut acc = 0.0;
    for (i, &l) in eigenvalues.iter().enumerate() {
        acc += l;
        if acc / trace >= threshold {
            return Ok((i + 1, acc / trace));
        }
    }
    Err(Error::NeedMoreEigenpairs {
        count: eigenvalues.len(),
        achieved: acc / trace,
        threshold,
    })
}

/// Cumulative `Ψ_m` for every prefix of `eigenvalues`.
pub fn cumulative_psi(eigenvalues: &[f64], kernel: &CovarianceKernel, core_area: f64) -> Vec<f64> {
    let trace = kernel.variance() * core_area;
    let mut acc = 0.0;
    eigenvalues
        .iter()
        .map(|l| {
            acc += l;
            if trace > 0.0 {
                acc / trace
            } else {
                1.0
            }
        })
        .collect()
}

/// Truncated expansion `ν(x) = ν̄ + Σ √λ_i f_i(x) ξ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleModel {
    /// `λ_1 >= … >= λ_M > 0`.
    pub eigenvalues: Vec<f64>,
    /// `f_i` per core element, B-orthonormal.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `ν̄` per core element.
    pub mean_field: Vec<f64>,
    /// Mesh element index of each core position.
    pub core_elements: Vec<usize>,
    /// Captured variance ratio `Ψ_M`.
    pub psi: f64,
    pub kernel: CovarianceKernel,
}

/// Result of a full KLE computation.
#[derive(Debug, Clone)]
pub struct KleSolve {
    pub model: KleModel,
    /// All computed eigenvalues (descending), beyond the truncation order.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub converged: Vec<bool>,
    pub hmatrix: Option<HMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KleOptions {
    pub threshold: f64,
    pub lanczos: LanczosOptions,
}

impl Default for KleOptions {
    fn default() -> Self {
        KleOptions {
            threshold: 0.95,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl KleModel {
    /// A field without randomness (`M = 0`).
    pub fn deterministic(core: &CoreElements, mean: f64, kernel: CovarianceKernel) -> Self {
        KleModel {
            eigenvalues: vec![],
            eigenvectors: vec![],
            mean_field: vec![mean; core.len()],
            core_elements: core.elements.clone(),
            psi: 1.0,
            kernel,
        }
    }

    /// Compresses the covariance matrix, runs Lanczos and truncates.
    ///
    /// A zero-variance kernel short-circuits to [`KleModel::deterministic`].
    pub fn compute(
        core: &CoreElements,
        kernel: &CovarianceKernel,
        mean: f64,
        hparams: &HParams,
        opts: &KleOptions,
    ) -> Result<KleSolve> {
        kernel.validate()?;
        if core.is_empty() {
            return Err(Error::Config("mesh has no core elements".into()));
        }
        if kernel.sigma == 0.0 {
            return Ok(KleSolve {
                model: KleModel::deterministic(core, mean, *kernel),
                eigenvalues: vec![],
                eigenvectors: vec![],
                converged: vec![],
                hmatrix: None,
            });
        }
        let h = assemble_covariance_hmatrix(&core.geometries, kernel, hparams);
        let b = assemble_mass_diagonal(&core.geometries);
        let mut lopts = opts.lanczos;
        lopts.m_request = lopts.m_request.min(core.len());
        let pairs = lanczos_generalized(&h, &b, &lopts)?;
        let model = KleModel::from_eigenpairs(core, kernel, mean, &pairs.values, &pairs.vectors, opts.threshold)?;
        Ok(KleSolve {
            model,
            eigenvalues: pairs.values,
            eigenvectors: pairs.vectors,
            converged: pairs.converged,
            hmatrix: Some(h),
        })
    }

    pub fn from_eigenpairs(
        core: &CoreElements,
        kernel: &CovarianceKernel,
        mean: f64,
        values: &[f64],
        vectors: &[Vec<f64>],
        threshold: f64,
    ) -> Result<KleModel> {
        let (m, psi) = truncate(values, kernel, core.area(), threshold)?;
        if let Some(bad) = values[..m].iter().position(|&l| l <= 0.0 || l.is_nan()) {
            return Err(Error::Solver(format!("eigenvalue {bad} is not positive: {}", values[bad])));
        }
        Ok(KleModel {
            eigenvalues: values[..m].to_vec(),
            eigenvectors: vectors[..m].to_vec(),
            mean_field: vec![mean; core.len()],
            core_elements: core.elements.clone(),
            psi,
            kernel: *kernel,
        })
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_core(&self) -> usize {
        self.mean_field.len()
    }

    /// Realization for the given `ξ`. Non-positive values flag the sample
    /// invalid rather than failing.
    pub fn sample(&self, xi: &[f64]) -> Result<FieldSample> {
        if xi.len() != self.order() {
            return Err(Error::Dimension {
                expected: self.order(),
                got: xi.len(),
            });
        }
        let mut values = self.mean_field.clone();
        for ((lam, f), &x) in self.eigenvalues.iter().zip(&self.eigenvectors).zip(xi) {
            let w = lam.sqrt() * x;
            values.iter_mut().zip(f).for_each(|(v, fe)| *v += w * fe);
        }
        let valid = values.iter().all(|&v| v > 0.0);
        Ok(FieldSample {
            xi: xi.to_vec(),
            values,
            valid,
        })
    }

    /// Pointwise variance of the truncated field, `Σ λ_i f_{i,e}²`.
    pub fn variance(&self) -> Vec<f64> {
        let mut var = vec![0.0; self.num_core()];
        for (lam, f) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            var.iter_mut().zip(f).for_each(|(v, fe)| *v += lam * fe * fe);
        }
        var
    }
}

/// One realization of the reluctivity over the core elements.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub xi: Vec<f64>,
    pub values: Vec<f64>,
    /// `false` if any value is non-positive.
    pub valid: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_by_cumulative_sum() {
        // trace 10 = σ² · area with σ = 1, area = 10
        let k = CovarianceKernel::exponential(1.0, 1.0);
        assert_eq!(truncate(&[8.0, 1.0, 0.5, 0.5], &k, 10.0, 0.95).unwrap(), (3, 0.95));
        assert_eq!(truncate(&[8.0, 1.0, 0.5, 0.5], &k, 10.0, 0.5).unwrap().0, 1);
    }

    #[test]
    fn unreachable_threshold_reports_psi() {
        let k = CovarianceKernel::exponential(1.0, 1.0);
        match truncate(&[5.0, 1.0], &k, 10.0, 0.95) {
            Err(Error::NeedMoreEigenpairs { achieved, count, .. }) => {
                assert_eq!(count, 2);
                assert!((achieved - 0.6).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mass_diagonal_is_areas() {
        use crate::geometry::{Point2, Rect};
        let g = |area| ElementGeometry {
            area,
            centroid: Point2::default(),
            bbox: Rect::new(Point2::default(), Point2::default()),
        };
        assert_eq!(assemble_mass_diagonal(&[g(0.5), g(0.25)]), vec![0.5, 0.25]);
    }

    fn toy_model() -> KleModel {
        KleModel {
            eigenvalues: vec![4.0, 1.0],
            eigenvectors: vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.0, -1.0]],
            mean_field: vec![10.0; 3],
            core_elements: vec![0, 1, 2],
            psi: 1.0,
            kernel: CovarianceKernel::exponential(1.0, 1.0),
        }
    }

    #[test]
    fn zero_xi_gives_mean() {
        let s = toy_model().sample(&[0.0, 0.0]).unwrap();
        assert_eq!(s.values, vec![10.0; 3]);
        assert!(s.valid);
    }

    #[test]
    fn opposite_xi_symmetric_about_mean() {
        let m = toy_model();
        let p = m.sample(&[1.0, 0.0]).unwrap();
        let n = m.sample(&[-1.0, 0.0]).unwrap();
        for e in 0..3 {
            assert!((p.values[e] + n.values[e] - 20.0).abs() < 1e-14);
        }
        assert_eq!(p.values, vec![12.0; 3]);
    }

    #[test]
    fn negative_values_are_flagged() {
        let s = toy_model().sample(&[-6.0, 0.0]).unwrap();
        assert!(!s.valid);
        assert!(toy_model().sample(&[1.0]).is_err());
    }
}
