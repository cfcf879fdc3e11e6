//! Run configuration: a TOML key-value file with one section per stage.
//!
//! Every key is optional; missing keys take the defaults below. Dotted
//! overrides (`kernel.d=[2, 10]`) are applied on top of the file before the
//! values are checked.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `seed` | 0 | RNG seed for Lanczos start vectors and field samples (0 to 2^63 - 1) |
//! | `mesh.node`, `mesh.ele` | unset | Triangle files; when unset the reference geometry is generated |
//! | `geometry.*` | see [`GeometryConfig`] | reference geometry dimensions (m) |
//! | `kernel.sigma` | 10 | field standard deviation (H⁻¹m) |
//! | `kernel.d` | `[2.0]` | correlation lengths (m); every command runs once per entry |
//! | `hmatrix.n_min` | 256 | cluster leaf size |
//! | `hmatrix.eta` | 1.0 | admissibility parameter |
//! | `hmatrix.epsilon` | 0.01 | ACA tolerance |
//! | `hmatrix.k_max` | unset | ACA rank cap (unset: 128) |
//! | `kle.threshold` | 0.95 | captured variance ratio Ψ |
//! | `kle.m_request` | 20 | eigenpairs computed |
//! | `kle.tol` | 1e-8 | Lanczos residual tolerance |
//! | `kle.max_iter` | unset | Krylov dimension cap (unset: 4 m_request + 100) |
//! | `material.nu_mean` | 795.774 | mean core reluctivity ν̄ |
//! | `material.nu_air`, `material.nu_coil` | 1/μ0 | fixed reluctivities |
//! | `material.n_turns` | 260 | primary turns |
//! | `material.current` | 1.0 | primary current (A) |
//! | `uq.p` | 2 | polynomial degree per dimension |
//! | `uq.node_budget` | 100000 | maximum collocation nodes |
//! | `memory.dense_budget_bytes` | 2e9 | largest dense matrix built for Δ |
//! | `memory.element_sizes` | `[]` | meshes for the memory study (empty: `geometry.element_size`) |
//! | `sample.xi` | unset | explicit ξ for `sample` (unset: uniform draws from `seed`) |
//! | `output.dir` | `out` | directory for CSV files |

use std::path::{Path, PathBuf};

use hkle::hmatrix::HParams;
use hkle::kle::{KleOptions, LanczosOptions};
use hkle::mesh::ReferenceGeometry;
use hkle::{CovarianceKernel, MaterialConfig, NU0};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub mesh: MeshSource,
    pub geometry: GeometryConfig,
    pub kernel: KernelConfig,
    pub hmatrix: HMatrixConfig,
    pub kle: KleConfig,
    pub material: MaterialSection,
    pub uq: UqConfig,
    pub memory: MemoryConfig,
    pub sample: SampleConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSource {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ele: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub core_width: f64,
    pub core_height: f64,
    pub limb_width: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub gap: f64,
    pub coil_width: f64,
    pub air_margin: f64,
    pub element_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub sigma: f64,
    #[serde(deserialize_with = "one_or_many")]
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HMatrixConfig {
    pub n_min: usize,
    pub eta: f64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KleConfig {
    pub threshold: f64,
    pub m_request: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSection {
    pub nu_mean: f64,
    pub nu_air: f64,
    pub nu_coil: f64,
    pub n_turns: u32,
    pub current: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UqConfig {
    pub p: usize,
    pub node_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemoryConfig {
    pub dense_budget_bytes: f64,
    pub element_sizes: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = ReferenceGeometry::default();
        GeometryConfig {
            core_width: g.core_width,
            core_height: g.core_height,
            limb_width: g.limb_width,
            window_width: g.window_width,
            window_height: g.window_height,
            gap: g.gap,
            coil_width: g.coil_width,
            air_margin: g.air_margin,
            element_size: g.element_size,
        }
    }
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { sigma: 10.0, d: vec![2.0] }
    }
}

impl Default for HMatrixConfig {
    fn default() -> Self {
        let h = HParams::default();
        HMatrixConfig {
            n_min: h.n_min,
            eta: h.eta,
            epsilon: h.epsilon,
            k_max: h.k_max,
        }
    }
}

impl Default for KleConfig {
    fn default() -> Self {
        let k = KleOptions::default();
        KleConfig {
            threshold: k.threshold,
            m_request: k.lanczos.m_request,
            tol: k.lanczos.tol,
            max_iter: k.lanczos.max_iter,
        }
    }
}

impl Default for MaterialSection {
    fn default() -> Self {
        MaterialSection {
            nu_mean: 795.774,
            nu_air: NU0,
            nu_coil: NU0,
            n_turns: 260,
            current: 1.0,
        }
    }
}

impl Default for UqConfig {
    fn default() -> Self {
        UqConfig {
            p: 2,
            node_budget: hkle::uq::DEFAULT_NODE_BUDGET,
        }
    }
}

impl Default for MemoryConfig {
    fn default() -> Self {
        MemoryConfig {
            dense_budget_bytes: 2e9,
            element_sizes: vec![],
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    /// Parses `text`, applies `overrides` (`key=value` with dotted keys and
    /// TOML values; bare words are taken as strings) and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::config(format!("config: {e}")))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let cfg: RunConfig = table.try_into().map_err(|e| CliError::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        RunConfig::parse(&text, overrides)
    }

    /// Canonical TOML text; parsing it yields the same configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    /// All resolved keys as one `key=value` line, for CSV headers.
    pub fn echo(&self) -> String {
        let table = toml::Table::try_from(self).expect("configuration always serializes");
        let mut parts = Vec::new();
        flatten("", &table, &mut parts);
        parts.join(" ")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(CliError::config(msg.to_string())) };
        check(self.mesh.node.is_some() == self.mesh.ele.is_some(), "mesh.node and mesh.ele must be given together")?;
        check(self.kernel.sigma >= 0.0 && self.kernel.sigma.is_finite(), "kernel.sigma must be >= 0")?;
        check(!self.kernel.d.is_empty(), "kernel.d needs at least one correlation length")?;
        check(self.kernel.d.iter().all(|&d| d > 0.0 && d.is_finite()), "kernel.d entries must be > 0")?;
        check(self.hmatrix.n_min >= 1, "hmatrix.n_min must be >= 1")?;
        check(self.hmatrix.eta > 0.0, "hmatrix.eta must be > 0")?;
        check(self.hmatrix.epsilon > 0.0 && self.hmatrix.epsilon < 1.0, "hmatrix.epsilon must lie in (0, 1)")?;
        check(self.hmatrix.k_max != Some(0), "hmatrix.k_max must be >= 1")?;
        check(self.kle.threshold > 0.0 && self.kle.threshold <= 1.0, "kle.threshold must lie in (0, 1]")?;
        check(self.kle.m_request >= 1, "kle.m_request must be >= 1")?;
        check(self.kle.tol > 0.0 && self.kle.tol < 1.0, "kle.tol must lie in (0, 1)")?;
        check(self.kle.max_iter != Some(0), "kle.max_iter must be >= 1")?;
        check(self.material.nu_mean > 0.0, "material.nu_mean must be > 0")?;
        self.materials().validate().map_err(|e| CliError::config(format!("material: {e}")))?;
        check(self.uq.p <= 32, "uq.p must be <= 32")?;
        check(self.uq.node_budget >= 1, "uq.node_budget must be >= 1")?;
        check(self.memory.dense_budget_bytes >= 0.0, "memory.dense_budget_bytes must be >= 0")?;
        check(self.memory.element_sizes.iter().all(|&h| h > 0.0), "memory.element_sizes entries must be > 0")?;
        if self.mesh.node.is_none() {
            self.reference_geometry(self.geometry.element_size)
                .validate()
                .map_err(|e| CliError::config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn reference_geometry(&self, element_size: f64) -> ReferenceGeometry {
        let g = &self.geometry;
        ReferenceGeometry {
            core_width: g.core_width,
            core_height: g.core_height,
            limb_width: g.limb_width,
            window_width: g.window_width,
            window_height: g.window_height,
            gap: g.gap,
            coil_width: g.coil_width,
            air_margin: g.air_margin,
            element_size,
        }
    }

    pub fn kernel(&self, d: f64) -> CovarianceKernel {
        CovarianceKernel::exponential(self.kernel.sigma, d)
    }

    pub fn hparams(&self) -> HParams {
        HParams {
            n_min: self.hmatrix.n_min,
            eta: self.hmatrix.eta,
            epsilon: self.hmatrix.epsilon,
            k_max: self.hmatrix.k_max,
        }
    }

    pub fn kle_options(&self) -> KleOptions {
        KleOptions {
            threshold: self.kle.threshold,
            lanczos: LanczosOptions {
                m_request: self.kle.m_request,
                tol: self.kle.tol,
                max_iter: self.kle.max_iter,
                seed: self.seed,
            },
        }
    }

    pub fn materials(&self) -> MaterialConfig {
        MaterialConfig {
            nu_air: self.material.nu_air,
            nu_coil: self.material.nu_coil,
            n_turns: self.material.n_turns,
            current: self.material.current,
        }
    }
}

/// Accepts `d = 2.0` as well as `d = [2.0, 10.0]`.
fn one_or_many<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{item}` is not key=value")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut path: Vec<&str> = key.split('.').collect();
    let last = path.pop().filter(|k| !k.is_empty()).ok_or_else(|| CliError::config(format!("empty key in `{item}`")))?;
    let mut node = table;
    for part in path {
        node = node
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("`{part}` in `{key}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<String>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push(format!("{key}={other}")),
        }
    }
}
