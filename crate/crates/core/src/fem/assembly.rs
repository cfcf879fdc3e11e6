use std::sync::Arc;

use crate::fem::MaterialConfig;
use crate::geometry::Point2;
use crate::kle::KleModel;
use crate::linalg::{CsrMatrix, CsrPattern};
use crate::mesh::{Region, TriMesh};
use crate::{Error, Result};

/// P1 stiffness of one triangle for unit reluctivity:
/// `∫ ∇φ_i · ∇φ_j = (b_i b_j + c_i c_j) / (4|τ|)`.
pub fn element_stiffness(p: [Point2; 3]) -> [[f64; 3]; 3] {
    let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
    let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
        }
    }
    k
}

pub fn sparsity_pattern(mesh: &TriMesh) -> CsrPattern {
    let entries = mesh
        .elements()
        .iter()
        .flat_map(|t| t.iter().flat_map(move |&i| t.iter().map(move |&j| (i, j))));
    CsrPattern::from_entries(mesh.num_vertices(), entries)
}

fn accumulate(k: &mut CsrMatrix, mesh: &TriMesh, coeff: impl Fn(usize) -> f64) {
    for (e, tri) in mesh.elements().iter().enumerate() {
        let c = coeff(e);
        if c == 0.0 {
            continue;
        }
        let ke = element_stiffness(mesh.corners(e));
        for a in 0..3 {
            for b in 0..3 {
                k.add(tri[a], tri[b], c * ke[a][b]);
            }
        }
    }
}

/// Stiffness matrix for per-element reluctivity `coeff(e)` with Dirichlet
/// rows/columns eliminated (unit diagonal).
pub fn assemble_stiffness(mesh: &TriMesh, coeff: impl Fn(usize) -> f64) -> CsrMatrix {
    let mut k = CsrMatrix::zeros(Arc::new(sparsity_pattern(mesh)));
    accumulate(&mut k, mesh, coeff);
    for &v in mesh.boundary_vertices() {
        k.eliminate(v, 1.0);
    }
    k
}

/// `K(ξ) = K̄ + Σ ξ_i K_i` over a single shared sparsity pattern.
#[derive(Debug, Clone)]
pub struct AffineStiffness {
    /// Mean reluctivity on the core, fixed values elsewhere; unit diagonal
    /// on Dirichlet rows.
    pub k_mean: CsrMatrix,
    /// `√λ_i f_i` on core elements, zero elsewhere; Dirichlet rows and
    /// columns fully zero.
    pub k_modes: Vec<CsrMatrix>,
    /// Constrained vertex indices.
    pub dirichlet: Vec<usize>,
}

impl AffineStiffness {
    pub fn order(&self) -> usize {
        self.k_modes.len()
    }

    pub fn matrix_at(&self, xi: &[f64]) -> Result<CsrMatrix> {
        if xi.len() != self.k_modes.len() {
            return Err(Error::Dimension {
                expected: self.k_modes.len(),
                got: xi.len(),
            });
        }
        let mut k = self.k_mean.clone();
        for (x, km) in xi.iter().zip(&self.k_modes) {
            k.axpy(*x, km);
        }
        Ok(k)
    }
}

/// Position of each mesh element in the KLE core ordering.
fn core_positions(mesh: &TriMesh, kle: &KleModel) -> Result<Vec<Option<usize>>> {
    let core = mesh.elements_in(Region::Core);
    if core != kle.core_elements {
        return Err(Error::Assembly(format!(
            "KLE defined on {} core elements, mesh has {} (or a different set)",
            kle.core_elements.len(),
            core.len()
        )));
    }
    let mut pos = vec![None; mesh.num_elements()];
    for (k, &e) in core.iter().enumerate() {
        pos[e] = Some(k);
    }
    Ok(pos)
}

/// Per-element reluctivity for given core values.
pub(crate) fn reluctivity(mesh: &TriMesh, materials: &MaterialConfig, core_values: &[f64], pos: &[Option<usize>]) -> Vec<f64> {
    (0..mesh.num_elements())
        .map(|e| match pos[e] {
            Some(k) => core_values[k],
            None => materials.fixed_reluctivity(mesh.region(e)).unwrap_or(0.0),
        })
        .collect()
}

pub fn assemble_affine_stiffness(mesh: &TriMesh, materials: &MaterialConfig, kle: &KleModel) -> Result<AffineStiffness> {
    let pos = core_positions(mesh, kle)?;
    let nu = reluctivity(mesh, materials, &kle.mean_field, &pos);
    let k_mean = assemble_stiffness(mesh, |e| nu[e]);
    let pattern = k_mean.pattern().clone();
    let k_modes = kle
        .eigenvalues
        .iter()
        .zip(&kle.eigenvectors)
        .map(|(lam, f)| {
            let s = lam.sqrt();
            let mut k = CsrMatrix::zeros(pattern.clone());
            accumulate(&mut k, mesh, |e| pos[e].map_or(0.0, |p| s * f[p]));
            for &v in mesh.boundary_vertices() {
                k.eliminate(v, 0.0);
            }
            k
        })
        .collect();
    Ok(AffineStiffness {
        k_mean,
        k_modes,
        dirichlet: mesh.boundary_vertices().to_vec(),
    })
}

/// Stiffness assembled directly from sampled core reluctivities; the
/// reference for the affine decomposition.
pub fn assemble_direct(mesh: &TriMesh, materials: &MaterialConfig, kle: &KleModel, core_values: &[f64]) -> Result<CsrMatrix> {
    let pos = core_positions(mesh, kle)?;
    let nu = reluctivity(mesh, materials, core_values, &pos);
    Ok(assemble_stiffness(mesh, |e| nu[e]))
}

/// Load vector of a piecewise-constant current density `j(region)`:
/// `F_v = Σ j · |τ| / 3` over elements touching `v`.
pub fn assemble_load_density(mesh: &TriMesh, j: impl Fn(Region) -> f64) -> Vec<f64> {
    let mut f = vec![0.0; mesh.num_vertices()];
    for (e, tri) in mesh.elements().iter().enumerate() {
        let jz = j(mesh.region(e));
        if jz == 0.0 {
            continue;
        }
        let share = jz * mesh.element_geometry(e).area / 3.0;
        for &v in tri {
            f[v] += share;
        }
    }
    f
}

/// Stranded-conductor source: `J = ±N I / S±` on the primary polarity
/// regions, zero elsewhere (the secondary is open).
pub fn assemble_load(mesh: &TriMesh, materials: &MaterialConfig) -> Result<Vec<f64>> {
    let (s_plus, s_minus) = MaterialConfig::coil_areas(mesh)?;
    let ni = materials.n_turns as f64 * materials.current;
    Ok(assemble_load_density(mesh, |r| match r {
        Region::CoilPlusPrimary => ni / s_plus,
        Region::CoilMinusPrimary => -ni / s_minus,
        _ => 0.0,
    }))
}

/// Load vector for a smooth source `f(x)`, integrated with the edge-midpoint
/// rule (exact for quadratic integrands).
pub fn assemble_load_function(mesh: &TriMesh, f: impl Fn(Point2) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for (e, tri) in mesh.elements().iter().enumerate() {
        let p = mesh.corners(e);
        let w = mesh.element_geometry(e).area / 3.0;
        let mid = |a: usize, b: usize| Point2::new(0.5 * (p[a].x + p[b].x), 0.5 * (p[a].y + p[b].y));
        let fm = [f(mid(0, 1)), f(mid(1, 2)), f(mid(2, 0))];
        // φ_k is 1/2 at the midpoints of its two edges and 0 at the third
        out[tri[0]] += w * 0.5 * (fm[0] + fm[2]);
        out[tri[1]] += w * 0.5 * (fm[0] + fm[1]);
        out[tri[2]] += w * 0.5 * (fm[1] + fm[2]);
    }
    out
}
