//! P1 finite elements for the 2D magnetostatic vector potential `A_z`.
//!
//! Reluctivity is piecewise constant per element, so every stiffness entry
//! is exact with a single evaluation of `ν`. The homogeneous Dirichlet
//! condition on the outer boundary is imposed by symmetric elimination.

mod assembly;

pub use assembly::{
    assemble_affine_stiffness, assemble_load, assemble_load_density, assemble_load_function,
    assemble_direct, assemble_stiffness, element_stiffness, sparsity_pattern, AffineStiffness,
};

use crate::linalg::{norm2, CsrMatrix, EnvelopeCholesky};
use crate::mesh::{Region, TriMesh};
use crate::{Error, Result, NU0};

/// Deterministic material and source data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialConfig {
    /// Reluctivity of air and gaps (H⁻¹m).
    pub nu_air: f64,
    /// Reluctivity of the coil regions (H⁻¹m).
    pub nu_coil: f64,
    /// Number of turns of the primary coil.
    pub n_turns: u32,
    /// Primary coil current (A).
    pub current: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            nu_air: NU0,
            nu_coil: NU0,
            n_turns: 260,
            current: 1.0,
        }
    }
}

impl MaterialConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu_air > 0.0 && self.nu_coil > 0.0) {
            return Err(Error::Config("reluctivities must be positive".into()));
        }
        if self.n_turns < 1 {
            return Err(Error::Config("turn count must be at least 1".into()));
        }
        if self.current == 0.0 || !self.current.is_finite() {
            return Err(Error::Config("coil current must be nonzero".into()));
        }
        Ok(())
    }

    /// Reluctivity of non-core regions.
    pub fn fixed_reluctivity(&self, region: Region) -> Option<f64> {
        match region {
            Region::Core => None,
            Region::Air => Some(self.nu_air),
            Region::CoilPlusPrimary | Region::CoilMinusPrimary | Region::CoilSecondary => Some(self.nu_coil),
        }
    }

    /// Primary conductor cross-sections `(S⁺, S⁻)` measured on the mesh.
    pub fn coil_areas(mesh: &TriMesh) -> Result<(f64, f64)> {
        let plus = mesh.region_area(Region::CoilPlusPrimary);
        let minus = mesh.region_area(Region::CoilMinusPrimary);
        if plus <= 0.0 || minus <= 0.0 {
            return Err(Error::Config("mesh lacks a primary coil polarity region".into()));
        }
        Ok((plus, minus))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemSolution {
    /// Nodal values of `A_z` (V·s/m).
    pub a: Vec<f64>,
    /// `‖K a − F‖ / ‖F‖` after the solve.
    pub residual: f64,
}

/// Direct SPD solver; the symbolic factorization is reused across
/// matrices with the same pattern.
#[derive(Debug, Clone)]
pub struct FemSolver {
    symbolic: EnvelopeCholesky,
    dirichlet: Vec<usize>,
}

const RESIDUAL_TOL: f64 = 1e-10;

impl FemSolver {
    pub fn new(stiffness: &AffineStiffness) -> Self {
        FemSolver {
            symbolic: EnvelopeCholesky::analyze(stiffness.k_mean.pattern()),
            dirichlet: stiffness.dirichlet.clone(),
        }
    }

    /// Solves `K a = F` with `F` zeroed on Dirichlet vertices. Up to three
    /// steps of iterative refinement are applied if the residual misses
    /// `1e-10`.
    pub fn solve(&self, k: &CsrMatrix, load: &[f64]) -> Result<FemSolution> {
        if load.len() != k.dim() {
            return Err(Error::Dimension {
                expected: k.dim(),
                got: load.len(),
            });
        }
        let mut f = load.to_vec();
        for &v in &self.dirichlet {
            f[v] = 0.0;
        }
        let nf = norm2(&f);
        if nf == 0.0 {
            return Ok(FemSolution {
                a: vec![0.0; f.len()],
                residual: 0.0,
            });
        }
        let factor = self.symbolic.factor(k)?;
        let mut a = factor.solve(&f);
        let mut residual = f64::INFINITY;
        for _ in 0..4 {
            let r: Vec<f64> = f.iter().zip(k.mul_vec(&a)).map(|(fi, ki)| fi - ki).collect();
            residual = norm2(&r) / nf;
            if residual <= RESIDUAL_TOL {
                break;
            }
            let da = factor.solve(&r);
            a.iter_mut().zip(da).for_each(|(x, d)| *x += d);
        }
        if residual > RESIDUAL_TOL {
            return Err(Error::Solver(format!("relative residual {residual:e} above {RESIDUAL_TOL:e}")));
        }
        for &v in &self.dirichlet {
            a[v] = 0.0;
        }
        Ok(FemSolution { a, residual })
    }
}

/// Magnetic energy per unit depth, `½ aᵀ K a` (J/m).
pub fn energy(k: &CsrMatrix, a: &[f64]) -> f64 {
    0.5 * a.iter().zip(k.mul_vec(a)).map(|(x, y)| x * y).sum::<f64>()
}

/// Self-inductance per unit depth, `2W / I²` (H/m).
pub fn inductance(energy: f64, current: f64) -> Result<f64> {
    if current == 0.0 {
        return Err(Error::Config("inductance undefined for zero current".into()));
    }
    Ok(2.0 * energy / (current * current))
}

/// Everything needed to map a KLE coordinate `ξ` to an inductance.
#[derive(Debug, Clone)]
pub struct InductanceModel {
    pub stiffness: AffineStiffness,
    pub load: Vec<f64>,
    pub current: f64,
    solver: FemSolver,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub inductance: f64,
    pub energy: f64,
    pub residual: f64,
}

impl InductanceModel {
    pub fn new(mesh: &TriMesh, materials: &MaterialConfig, kle: &crate::kle::KleModel) -> Result<Self> {
        materials.validate()?;
        let stiffness = assemble_affine_stiffness(mesh, materials, kle)?;
        let load = assemble_load(mesh, materials)?;
        let solver = FemSolver::new(&stiffness);
        Ok(InductanceModel {
            stiffness,
            load,
            current: materials.current,
            solver,
        })
    }

    pub fn solver(&self) -> &FemSolver {
        &self.solver
    }

    pub fn solve_at(&self, xi: &[f64]) -> Result<(CsrMatrix, FemSolution)> {
        let k = self.stiffness.matrix_at(xi)?;
        let sol = self.solver.solve(&k, &self.load)?;
        Ok((k, sol))
    }

    pub fn evaluate(&self, xi: &[f64]) -> Result<Evaluation> {
        let (k, sol) = self.solve_at(xi)?;
        let w = energy(&k, &sol.a);
        Ok(Evaluation {
            inductance: inductance(w, self.current)?,
            energy: w,
            residual: sol.residual,
        })
    }
}
