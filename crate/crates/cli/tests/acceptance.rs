//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hkle::fem::{assemble_direct, assemble_load_function, assemble_stiffness, FemSolver, InductanceModel};
use hkle::hmatrix::{assemble_covariance_hmatrix, covariance_matrix_dense, HParams};
use hkle::kle::{
    analytic_eigenvalues_1d, assemble_mass_diagonal, dense_generalized_eigenvalues, lanczos_generalized, truncate, KleOptions, LanczosOptions,
};
use hkle::mesh::{grid_mesh, ReferenceGeometry};
use hkle::uq::{collocation_statistics, monte_carlo, DEFAULT_NODE_BUDGET, XI_BOUND};
use hkle::{AffineStiffness, CovarianceKernel, KleModel, MaterialConfig, Region, TriMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NU_MEAN: f64 = 795.774;
const EPS: f64 = 0.01;
/// Element size giving a core of about 1300 elements (1456).
const H_MID: f64 = 0.0024;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reference(h: f64) -> TriMesh {
    ReferenceGeometry::default().with_element_size(h).generate().unwrap()
}

fn kle_options(m_request: usize) -> KleOptions {
    KleOptions {
        lanczos: LanczosOptions { m_request, ..Default::default() },
        ..Default::default()
    }
}

fn analytic_rectangle() -> Outcome {
    let (a, b, nx, ny, d) = (1.0, 0.6, 64usize, 40usize, 0.3);
    let xs: Vec<f64> = (0..=nx).map(|i| a * i as f64 / nx as f64).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| b * j as f64 / ny as f64).collect();
    let core = grid_mesh(&xs, &ys, |_| Region::Core).unwrap().core();
    let kernel = CovarianceKernel::exponential(1.0, d);
    let h = assemble_covariance_hmatrix(&core.geometries, &kernel, &HParams::default());
    let pairs = lanczos_generalized(&h, &assemble_mass_diagonal(&core.geometries), &LanczosOptions { m_request: 10, ..Default::default() }).unwrap();
    let lx = analytic_eigenvalues_1d(1.0, d, a, 12).unwrap();
    let ly = analytic_eigenvalues_1d(1.0, d, b, 12).unwrap();
    let mut products: Vec<f64> = lx.iter().flat_map(|x| ly.iter().map(move |y| x * y)).collect();
    products.sort_by(|x, y| y.total_cmp(x));
    let worst = (0..10).map(|i| (pairs.values[i] / products[i] - 1.0).abs()).fold(0.0, f64::max);
    ensure(
        core.len() >= 5000 && worst <= 0.02,
        format!("{} elements, d = {d}: worst relative error of top 10 = {worst:.2e} (limit 2e-2)", core.len()),
    )
}

fn dense_equivalence() -> Outcome {
    let core = reference(H_MID).core();
    let b = assemble_mass_diagonal(&core.geometries);
    let opts = LanczosOptions { m_request: 10, ..Default::default() };
    let mut h_time = 0.0;
    let mut parts = vec![];
    let mut ok = core.len() <= 2000;
    // top ten where they sit well above the compression error, retained
    // modes at long correlation lengths
    for (d, retained_only) in [(0.05, false), (0.2, false), (2.0, true), (10.0, true)] {
        let kernel = CovarianceKernel::exponential(1.0, d);
        let start = Instant::now();
        let h = assemble_covariance_hmatrix(&core.geometries, &kernel, &HParams::default());
        let ph = lanczos_generalized(&h, &b, &opts).unwrap();
        h_time += start.elapsed().as_secs_f64();
        let exact = dense_generalized_eigenvalues(&covariance_matrix_dense(&core.geometries, &kernel), &b);
        let n = if retained_only { truncate(&exact, &kernel, core.area(), 0.95).unwrap().0 } else { 10 };
        let worst = (0..n).map(|i| (ph.values[i] / exact[i] - 1.0).abs()).fold(0.0, f64::max);
        ok &= worst <= 5.0 * EPS;
        parts.push(format!("d={d}: {n} eigenvalues, worst {worst:.1e}"));
    }
    ok &= h_time <= 60.0;
    ensure(ok, format!("N = {}, {}; H-matrix path {h_time:.1} s", core.len(), parts.join("; ")))
}

fn hmatrix_accuracy() -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for h in [0.004, H_MID] {
        let core = reference(h).core();
        for d in [0.05, 0.2, 2.0, 10.0] {
            let kernel = CovarianceKernel::exponential(1.0, d);
            let hm = assemble_covariance_hmatrix(&core.geometries, &kernel, &HParams::default());
            let delta = hm.relative_error_dense(&core.geometries, &kernel, usize::MAX).unwrap();
            ok &= delta <= EPS;
            if h == H_MID {
                ok &= (1e-5..=1e-2).contains(&delta);
            }
            parts.push(format!("N={} d={d}: {delta:.1e}", core.len()));
        }
    }
    ensure(ok, parts.join(", "))
}

fn compression_trends() -> Outcome {
    let core = reference(H_MID).core();
    // scale = 0.1 m, the order of the core diagonal
    let report = |d: f64| assemble_covariance_hmatrix(&core.geometries, &CovarianceKernel::exponential(1.0, d), &HParams::default()).memory_report();
    let (short, long) = (report(0.2), report(1.0));
    ensure(
        long.bytes_hmatrix <= short.bytes_hmatrix && long.max_rank <= short.max_rank,
        format!(
            "N = {}: d=0.2 {} bytes k={}, d=1 {} bytes k={}",
            core.len(),
            short.bytes_hmatrix,
            short.max_rank,
            long.bytes_hmatrix,
            long.max_rank
        ),
    )
}

fn eigenvalue_decay() -> Outcome {
    let core = reference(H_MID).core();
    let m: Vec<usize> = [0.1, 0.5, 2.0]
        .iter()
        .map(|&d| {
            KleModel::compute(&core, &CovarianceKernel::exponential(1.0, d), 1.0, &HParams::default(), &kle_options(40))
                .unwrap()
                .model
                .order()
        })
        .collect();
    ensure(m[0] >= m[1] && m[1] >= m[2] && m[2] <= 10, format!("M(0.1, 0.5, 2) = {m:?}"))
}

fn dunavant7() -> Vec<([f64; 3], f64)> {
    let (a1, b1, w1) = (0.059_715_871_789_770, 0.470_142_064_105_115, 0.132_394_152_788_506);
    let (a2, b2, w2) = (0.797_426_985_353_087, 0.101_286_507_323_456, 0.125_939_180_544_827);
    vec![
        ([1.0 / 3.0; 3], 0.225),
        ([a1, b1, b1], w1),
        ([b1, a1, b1], w1),
        ([b1, b1, a1], w1),
        ([a2, b2, b2], w2),
        ([b2, a2, b2], w2),
        ([b2, b2, a2], w2),
    ]
}

fn poisson_l2_error(n: usize) -> f64 {
    let t: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let mesh = grid_mesh(&t, &t, |_| Region::Core).unwrap();
    let k = assemble_stiffness(&mesh, |_| 1.0);
    let stiffness = AffineStiffness {
        k_mean: k.clone(),
        k_modes: vec![],
        dirichlet: mesh.boundary_vertices().to_vec(),
    };
    let f = assemble_load_function(&mesh, |p| 2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin());
    let a = FemSolver::new(&stiffness).solve(&k, &f).unwrap().a;
    let mut err2 = 0.0;
    for (e, tri) in mesh.elements().iter().enumerate() {
        let p = mesh.corners(e);
        let area = mesh.element_geometry(e).area;
        for (l, w) in dunavant7() {
            let x = l[0] * p[0].x + l[1] * p[1].x + l[2] * p[2].x;
            let y = l[0] * p[0].y + l[1] * p[1].y + l[2] * p[2].y;
            let ah = l[0] * a[tri[0]] + l[1] * a[tri[1]] + l[2] * a[tri[2]];
            err2 += w * area * (ah - (PI * x).sin() * (PI * y).sin()).powi(2);
        }
    }
    err2.sqrt()
}

fn fem_correctness() -> Outcome {
    let errors: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| poisson_l2_error(n)).collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let converges = orders.iter().all(|o| (o - 2.0).abs() <= 0.25);

    let mesh = reference(0.004);
    let materials = MaterialConfig::default();
    let kle = KleModel::compute(&mesh.core(), &CovarianceKernel::exponential(10.0, 0.2), NU_MEAN, &HParams::default(), &KleOptions::default())
        .unwrap()
        .model;
    let model = InductanceModel::new(&mesh, &materials, &kle).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut dirichlet_clean = true;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let xi: Vec<f64> = (0..kle.order()).map(|_| rng.random_range(-XI_BOUND..XI_BOUND)).collect();
        let (k, sol) = model.solve_at(&xi).unwrap();
        let direct = assemble_direct(&mesh, &materials, &kle, &kle.sample(&xi).unwrap().values).unwrap();
        let pattern = k.pattern();
        for i in 0..pattern.dim() {
            for &j in pattern.row(i) {
                let scale = (k.get(i, i) * k.get(j, j)).abs().sqrt();
                worst = worst.max((k.get(i, j) - direct.get(i, j)).abs() / scale);
            }
        }
        for &v in mesh.boundary_vertices() {
            dirichlet_clean &= sol.a[v] == 0.0 && pattern.row(v).iter().all(|&j| k.get(v, j) == if j == v { 1.0 } else { 0.0 });
        }
    }
    ensure(
        converges && dirichlet_clean && worst <= 1e-12,
        format!(
            "L2 orders {:?}, Dirichlet rows exact: {dirichlet_clean}, affine vs direct (M = {}, 20 xi) {worst:.1e}",
            orders.iter().map(|o| (o * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            kle.order()
        ),
    )
}

fn inductance_invariance() -> Outcome {
    let mesh = reference(0.004);
    let core = mesh.core();
    let kernel = CovarianceKernel::exponential(10.0, 0.5);
    let fixed = KleModel::deterministic(&core, NU_MEAN, kernel);
    let l = |current: f64| {
        let materials = MaterialConfig { current, ..Default::default() };
        InductanceModel::new(&mesh, &materials, &fixed).unwrap().evaluate(&[]).unwrap().inductance
    };
    let base = l(1.0);
    let spread = [0.5, 2.0].iter().map(|&c| (l(c) / base - 1.0).abs()).fold(0.0, f64::max);
    let random = KleModel::compute(&core, &kernel, NU_MEAN, &HParams::default(), &KleOptions::default()).unwrap().model;
    let at_zero = InductanceModel::new(&mesh, &MaterialConfig::default(), &random)
        .unwrap()
        .evaluate(&vec![0.0; random.order()])
        .unwrap()
        .inductance;
    ensure(
        spread <= 1e-9 && at_zero == base,
        format!("L = {base:.9} H/m, relative spread over I in {{0.5, 1, 2}} A = {spread:.1e}, L(xi = 0) == L(nu mean): {}", at_zero == base),
    )
}

fn uq_trend() -> Outcome {
    let mesh = reference(0.004);
    let mut mu = vec![];
    let mut std = vec![];
    let sweep = [0.2, 0.5, 2.0, 10.0, 100.0];
    for &d in &sweep {
        let kle = KleModel::compute(&mesh.core(), &CovarianceKernel::exponential(10.0, d), NU_MEAN, &HParams::default(), &kle_options(40))
            .unwrap()
            .model;
        let model = InductanceModel::new(&mesh, &MaterialConfig::default(), &kle).unwrap();
        let (r, _, _) = collocation_statistics(&kle, &model, 2, DEFAULT_NODE_BUDGET).unwrap();
        mu.push(r.l_mu);
        std.push(r.l_std);
    }
    let increasing = std.windows(2).all(|w| w[1] >= w[0]);
    let n = std.len();
    let saturated = (std[n - 1] / std[n - 2] - 1.0).abs() <= 0.02;
    let mu_range = mu.iter().cloned().fold(f64::MIN, f64::max) - mu.iter().cloned().fold(f64::MAX, f64::min);
    let std_min = std.iter().cloned().fold(f64::MAX, f64::min);
    ensure(
        increasing && saturated && mu_range < std_min,
        format!(
            "d = {sweep:?}: L_std = [{}], L_mu range {mu_range:.2e} vs min L_std {std_min:.2e}",
            std.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn quadrature_vs_monte_carlo() -> Outcome {
    let mesh = reference(0.004);
    let kle = KleModel::compute(&mesh.core(), &CovarianceKernel::exponential(10.0, 0.5), NU_MEAN, &HParams::default(), &KleOptions::default())
        .unwrap()
        .model;
    let model = InductanceModel::new(&mesh, &MaterialConfig::default(), &kle).unwrap();
    let (r, _, _) = collocation_statistics(&kle, &model, 2, DEFAULT_NODE_BUDGET).unwrap();
    let mc = monte_carlo(&kle, &model, 10_000, 2024).unwrap();
    let zm = (r.l_mu - mc.mean).abs() / mc.mean_stderr;
    let zs = (r.l_std - mc.std).abs() / mc.std_stderr;
    ensure(
        kle.order() <= 4 && zm <= 3.0 && zs <= 3.0,
        format!("M = {}: mean off by {zm:.2} SE, std off by {zs:.2} SE (10^4 samples)", kle.order()),
    )
}

fn run_cli(cwd: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hkle")).current_dir(cwd).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["eigens", "--set", "kernel.d=[0.5, 2]"],
        &["memory", "--set", "kernel.d=[0.2, 2]", "--set", "memory.element_sizes=[0.004, 0.0024]"],
        &["uq", "--set", "kernel.d=[0.5, 10]"],
        &["sample", "--seed", "7", "--set", "kernel.d=0.2"],
        &["mesh-info"],
    ];
    let runs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for run in &runs {
        for cmd in commands {
            let mut args = cmd.to_vec();
            args.extend(["--out", "out"]);
            run_cli(run.path(), &args)?;
        }
    }
    let (a, b) = (csv_files(&runs[0].path().join("out")), csv_files(&runs[1].path().join("out")));
    let names = |f: &[PathBuf]| f.iter().map(|p| p.file_name().unwrap().to_owned()).collect::<Vec<_>>();
    if names(&a) != names(&b) {
        return Err("the two runs wrote different file sets".into());
    }
    let differing: Vec<String> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| fs::read(x).unwrap() != fs::read(y).unwrap())
        .map(|(x, _)| x.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    ensure(differing.is_empty(), format!("{} CSV files from 5 commands compared, differing: {differing:?}", a.len()))
}

fn main() {
    let criteria: [Check; 10] = [
        ("analytic KLE oracle", analytic_rectangle),
        ("dense-oracle equivalence", dense_equivalence),
        ("H-matrix accuracy", hmatrix_accuracy),
        ("compression trends", compression_trends),
        ("eigenvalue-decay ordering", eigenvalue_decay),
        ("FEM correctness", fem_correctness),
        ("inductance invariance", inductance_invariance),
        ("UQ trend reproduction", uq_trend),
        ("quadrature vs Monte Carlo", quadrature_vs_monte_carlo),
        ("determinism", cli_determinism),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.0} s", criteria.len() - failed, criteria.len(), total.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
