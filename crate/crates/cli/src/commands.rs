use std::path::PathBuf;

use hkle::fem::InductanceModel;
use hkle::hmatrix::assemble_covariance_hmatrix;
use hkle::kle::cumulative_psi;
use hkle::mesh::load_triangle_mesh;
use hkle::uq::{collocation_statistics, XI_BOUND};
use hkle::{KleModel, Region, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{tag, Table};
use crate::{CliError, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Eigenvalue table and retained eigenfunctions per correlation length.
    Eigens,
    /// H-matrix storage and accuracy per (mesh size, correlation length).
    Memory,
    /// Collocation statistics of the inductance per correlation length.
    Uq,
    /// One field realization; `xi` overrides `sample.xi`.
    Sample { xi: Option<Vec<f64>> },
    /// Mesh statistics per region.
    MeshInfo,
}

/// Runs `command` and returns the files written, in order.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Eigens => eigens(cfg),
        Command::Memory => memory(cfg),
        Command::Uq => uq(cfg),
        Command::Sample { xi } => sample(cfg, xi.as_deref().or(cfg.sample.xi.as_deref())),
        Command::MeshInfo => mesh_info(cfg),
    }
}

fn f(v: f64) -> String {
    v.to_string()
}

fn load_mesh(cfg: &RunConfig, element_size: f64) -> Result<TriMesh, CliError> {
    Ok(match (&cfg.mesh.node, &cfg.mesh.ele) {
        (Some(node), Some(ele)) => load_triangle_mesh(node, ele)?,
        _ => cfg.reference_geometry(element_size).generate()?,
    })
}

fn kle(cfg: &RunConfig, mesh: &TriMesh, d: f64) -> Result<hkle::kle::KleSolve, CliError> {
    Ok(KleModel::compute(&mesh.core(), &cfg.kernel(d), cfg.material.nu_mean, &cfg.hparams(), &cfg.kle_options())?)
}

fn eigens(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let echo = cfg.echo();
    let mesh = load_mesh(cfg, cfg.geometry.element_size)?;
    let core = mesh.core();
    let mut written = Vec::new();
    for &d in &cfg.kernel.d {
        let solve = kle(cfg, &mesh, d)?;
        let psi = cumulative_psi(&solve.eigenvalues, &cfg.kernel(d), core.area());
        let mut t = Table::create(&cfg.output.dir, &format!("eigenvalues_d{}.csv", tag(d)), &echo, &["index", "lambda", "cumulative_psi"])?;
        for (i, (lam, p)) in solve.eigenvalues.iter().zip(&psi).enumerate() {
            t.row([(i + 1).to_string(), f(*lam), f(*p)])?;
        }
        written.push(t.finish()?);
        for (i, mode) in solve.model.eigenvectors.iter().enumerate() {
            let name = format!("eigenfunction_d{}_mode{}.csv", tag(d), i + 1);
            let mut t = Table::create(&cfg.output.dir, &name, &echo, &["element_id", "x", "y", "f"])?;
            for ((&e, g), v) in core.elements.iter().zip(&core.geometries).zip(mode) {
                t.row([e.to_string(), f(g.centroid.x), f(g.centroid.y), f(*v)])?;
            }
            written.push(t.finish()?);
        }
    }
    Ok(written)
}

fn memory(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let sizes = if cfg.mesh.node.is_some() || cfg.memory.element_sizes.is_empty() {
        vec![cfg.geometry.element_size]
    } else {
        cfg.memory.element_sizes.clone()
    };
    let budget = cfg.memory.dense_budget_bytes.min(usize::MAX as f64) as usize;
    let header = ["N", "eta", "n_min", "epsilon", "d", "bytes_hmatrix", "bytes_dense", "ratio", "max_rank", "delta"];
    let mut t = Table::create(&cfg.output.dir, "memory.csv", &cfg.echo(), &header)?;
    for &h in &sizes {
        let mesh = load_mesh(cfg, h)?;
        let core = mesh.core();
        if core.is_empty() {
            return Err(CliError::config("mesh has no core elements"));
        }
        for &d in &cfg.kernel.d {
            let kernel = cfg.kernel(d);
            kernel.validate()?;
            let hm = assemble_covariance_hmatrix(&core.geometries, &kernel, &cfg.hparams());
            let r = hm.memory_report();
            let delta = match hm.relative_error_dense(&core.geometries, &kernel, budget) {
                Ok(delta) => f(delta),
                Err(hkle::Error::NotComputable(_)) => "nc".to_string(),
                Err(e) => return Err(e.into()),
            };
            t.row([
                r.n.to_string(),
                f(cfg.hmatrix.eta),
                cfg.hmatrix.n_min.to_string(),
                f(cfg.hmatrix.epsilon),
                f(d),
                r.bytes_hmatrix.to_string(),
                r.bytes_dense.to_string(),
                f(r.ratio),
                r.max_rank.to_string(),
                delta,
            ])?;
        }
    }
    Ok(vec![t.finish()?])
}

fn uq(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mesh = load_mesh(cfg, cfg.geometry.element_size)?;
    let materials = cfg.materials();
    let header = ["d", "sigma", "M", "p", "N_c", "rejected", "L_mu", "L_std"];
    let mut t = Table::create(&cfg.output.dir, "uq.csv", &cfg.echo(), &header)?;
    for &d in &cfg.kernel.d {
        let model = kle(cfg, &mesh, d)?.model;
        let fem = InductanceModel::new(&mesh, &materials, &model)?;
        let (r, _, _) = collocation_statistics(&model, &fem, cfg.uq.p, cfg.uq.node_budget)?;
        t.row([f(d), f(cfg.kernel.sigma), r.m.to_string(), r.p.to_string(), r.n_c.to_string(), r.rejected.to_string(), f(r.l_mu), f(r.l_std)])?;
    }
    Ok(vec![t.finish()?])
}

fn sample(cfg: &RunConfig, explicit: Option<&[f64]>) -> Result<Vec<PathBuf>, CliError> {
    let echo = cfg.echo();
    let mesh = load_mesh(cfg, cfg.geometry.element_size)?;
    let core = mesh.core();
    let mut written = Vec::new();
    for &d in &cfg.kernel.d {
        let model = kle(cfg, &mesh, d)?.model;
        let xi: Vec<f64> = match explicit {
            Some(xi) => xi.to_vec(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                (0..model.order()).map(|_| rng.random_range(-XI_BOUND..XI_BOUND)).collect()
            }
        };
        let s = model.sample(&xi)?;
        let mut t = Table::create(&cfg.output.dir, &format!("sample_d{}_xi.csv", tag(d)), &echo, &["index", "xi"])?;
        for (i, x) in s.xi.iter().enumerate() {
            t.row([(i + 1).to_string(), f(*x)])?;
        }
        written.push(t.finish()?);
        let mut t = Table::create(&cfg.output.dir, &format!("sample_d{}.csv", tag(d)), &echo, &["element_id", "x", "y", "nu", "positive"])?;
        for ((&e, g), &nu) in core.elements.iter().zip(&core.geometries).zip(&s.values) {
            t.row([e.to_string(), f(g.centroid.x), f(g.centroid.y), f(nu), u8::from(nu > 0.0).to_string()])?;
        }
        written.push(t.finish()?);
        // a flagged realization has no meaningful field solution
        if s.valid {
            let fem = InductanceModel::new(&mesh, &cfg.materials(), &model)?;
            let (_, sol) = fem.solve_at(&xi)?;
            let mut t = Table::create(&cfg.output.dir, &format!("solution_d{}.csv", tag(d)), &echo, &["vertex_id", "x", "y", "A_z"])?;
            for (v, (p, a)) in mesh.vertices().iter().zip(&sol.a).enumerate() {
                t.row([v.to_string(), f(p.x), f(p.y), f(*a)])?;
            }
            written.push(t.finish()?);
        }
    }
    Ok(written)
}

fn mesh_info(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mesh = load_mesh(cfg, cfg.geometry.element_size)?;
    let census = mesh.edge_census();
    let bbox = mesh.bounding_box();
    let mut t = Table::create(&cfg.output.dir, "mesh_info.csv", &cfg.echo(), &["region", "attribute", "elements", "area", "components"])?;
    for region in Region::ALL {
        t.row([
            region.name().to_string(),
            region.attribute().to_string(),
            mesh.elements_in(region).len().to_string(),
            f(mesh.region_area(region)),
            mesh.region_components(region).to_string(),
        ])?;
    }
    let area: f64 = Region::ALL.iter().map(|&r| mesh.region_area(r)).sum();
    t.row(["all".to_string(), String::new(), mesh.num_elements().to_string(), f(area), String::new()])?;
    let summary = t.finish()?;
    let mut s = Table::create(&cfg.output.dir, "mesh_summary.csv", &cfg.echo(), &["quantity", "value"])?;
    for (k, v) in [
        ("vertices", mesh.num_vertices().to_string()),
        ("elements", mesh.num_elements().to_string()),
        ("boundary_vertices", mesh.boundary_vertices().len().to_string()),
        ("boundary_edges", census.boundary.to_string()),
        ("nonconforming_edges", census.nonconforming.to_string()),
        ("xmin", f(bbox.min.x)),
        ("ymin", f(bbox.min.y)),
        ("xmax", f(bbox.max.x)),
        ("ymax", f(bbox.max.y)),
    ] {
        s.row([k.to_string(), v])?;
    }
    Ok(vec![summary, s.finish()?])
}
