//! Shared fixtures for the benchmarks.

use hkle::fem::InductanceModel;
use hkle::hmatrix::HParams;
use hkle::kle::KleOptions;
use hkle::mesh::{CoreElements, ReferenceGeometry};
use hkle::{CovarianceKernel, KleModel, MaterialConfig, TriMesh};

pub const NU_MEAN: f64 = 795.774;

/// Reference transformer mesh at element size `h` (0.004 gives 480 core
/// elements, 0.0024 gives 1456).
pub fn reference_mesh(h: f64) -> TriMesh {
    ReferenceGeometry::default().with_element_size(h).generate().expect("reference geometry is valid")
}

pub fn core(h: f64) -> CoreElements {
    reference_mesh(h).core()
}

/// KLE and FEM model for `σ = 10` at correlation length `d`.
pub fn inductance_model(mesh: &TriMesh, d: f64) -> (KleModel, InductanceModel) {
    let kle = KleModel::compute(&mesh.core(), &CovarianceKernel::exponential(10.0, d), NU_MEAN, &HParams::default(), &KleOptions::default())
        .expect("KLE converges on the reference mesh")
        .model;
    let model = InductanceModel::new(mesh, &MaterialConfig::default(), &kle).expect("reference mesh has all regions");
    (kle, model)
}
