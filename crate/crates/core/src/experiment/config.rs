use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::genericdomain::{MixupConfig, MixupMode};
use crate::metrics::DomainClassifierConfig;
use crate::numerics::derive_seed;
use crate::sfda::{ClientConfig, VendorConfig};
use crate::synthdata::{
    gen_gaussian_domains, gen_shape_texture, gen_two_moons,
    io::{load_dataset, load_eval_labels},
    DomainDataset, DomainRole, EvalLabels, GaussianDomainConfig, MoonsConfig, ShapeTextureConfig,
};
use crate::theoremlab::TheoremSetup;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchmarkSpec {
    ShapeTexture(ShapeTextureConfig),
    TwoMoons(MoonsConfig),
    Gaussian(GaussianDomainConfig),
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec::ShapeTexture(ShapeTextureConfig::default())
    }
}

/// A generated source/target pair with the quarantined target labels.
#[derive(Clone, Debug)]
pub struct BenchmarkData {
    pub source: DomainDataset,
    pub target: DomainDataset,
    pub target_labels: EvalLabels,
}

impl BenchmarkSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkSpec::ShapeTexture(_) => "shape-texture",
            BenchmarkSpec::TwoMoons(_) => "two-moons",
            BenchmarkSpec::Gaussian(_) => "gaussian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BenchmarkSpec::ShapeTexture(c) => c.validate(),
            BenchmarkSpec::TwoMoons(c) => c.validate(),
            BenchmarkSpec::Gaussian(c) => {
                c.validate()?;
                for role in [DomainRole::Source, DomainRole::Target] {
                    if !c.domains.iter().any(|d| d.role == role) {
                        return Err(Error::config(
                            "benchmark.domains",
                            format!("no domain with role {role}"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Generates the benchmark with its generator seed replaced by `seed`.
    pub fn generate(&self, seed: u64) -> Result<BenchmarkData> {
        self.validate()?;
        let (source, target, target_labels) = match self {
            BenchmarkSpec::ShapeTexture(c) => gen_shape_texture(&ShapeTextureConfig { seed, ..c.clone() })?,
            BenchmarkSpec::TwoMoons(c) => gen_two_moons(&MoonsConfig { seed, ..c.clone() })?,
            BenchmarkSpec::Gaussian(c) => {
                let domains = gen_gaussian_domains(&GaussianDomainConfig { seed, ..c.clone() })?;
                let pick = |role| domains.iter().find(|d| d.dataset.role == role).cloned();
                let s = pick(DomainRole::Source).expect("validated");
                let t = pick(DomainRole::Target).expect("validated");
                let labels = t
                    .eval_labels
                    .ok_or_else(|| Error::Role("target domain lacks eval labels".into()))?;
                (s.dataset, t.dataset, labels)
            }
        };
        Ok(BenchmarkData {
            source,
            target,
            target_labels,
        })
    }
}

fn default_schema() -> u32 {
    0
}

fn default_seeds() -> usize {
    1
}

fn default_grid() -> Vec<f64> {
    vec![0.0, 0.1, 0.25, 0.5, 0.8, 1.0]
}

/// Pre-generated datasets used instead of the inline generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetPaths {
    pub source: PathBuf,
    pub target: PathBuf,
    pub target_labels: PathBuf,
}

impl DatasetPaths {
    pub fn load(&self) -> Result<BenchmarkData> {
        let source = load_dataset(&self.source)?;
        let target = load_dataset(&self.target)?;
        let target_labels = load_eval_labels(&self.target_labels)?;
        if target_labels.len() != target.len() {
            return Err(Error::config(
                "datasets.target_labels",
                format!("{} labels for {} target samples", target_labels.len(), target.len()),
            ));
        }
        Ok(BenchmarkData {
            source,
            target,
            target_labels,
        })
    }
}

/// Divergence-plus-joint-error comparison run by the theorem command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InsightConfig {
    pub lambda: f64,
    pub mode: MixupMode,
    pub tolerance: f64,
}

impl Default for InsightConfig {
    fn default() -> Self {
        InsightConfig {
            lambda: 0.1,
            mode: MixupMode::Feature,
            tolerance: 0.02,
        }
    }
}

/// Complete description of an experiment; serialized as TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    /// First run seed; runs use `seed, seed + 1, ...`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default = "default_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub benchmark: BenchmarkSpec,
    /// Vendor-side mixup; also the client's unless `client_lambda` is set.
    #[serde(default)]
    pub mixup: MixupConfig,
    #[serde(default)]
    pub client_lambda: Option<f64>,
    #[serde(default)]
    pub vendor: VendorConfig,
    #[serde(default)]
    pub client: ClientConfig,
    #[serde(default)]
    pub metrics: DomainClassifierConfig,
    #[serde(default)]
    pub theorem: TheoremSetup,
    #[serde(default)]
    pub insight: Option<InsightConfig>,
    #[serde(default)]
    pub datasets: Option<DatasetPaths>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            seed: 0,
            seeds: default_seeds(),
            lambda_grid: default_grid(),
            benchmark: BenchmarkSpec::default(),
            mixup: MixupConfig::default(),
            client_lambda: None,
            vendor: VendorConfig::default(),
            client: ClientConfig::default(),
            metrics: DomainClassifierConfig::default(),
            theorem: TheoremSetup::default(),
            insight: None,
            datasets: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("expected schema = {SCHEMA_VERSION}, found {}", self.schema),
            ));
        }
        if self.seeds == 0 {
            return Err(Error::config("seeds", "must be >= 1"));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::config("lambda_grid", "grid is empty"));
        }
        for (i, &l) in self.lambda_grid.iter().enumerate() {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::config(
                    format!("lambda_grid[{i}]"),
                    format!("{l} is outside [0, 1]"),
                ));
            }
        }
        if let Some(l) = self.client_lambda {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::config("client_lambda", format!("{l} is outside [0, 1]")));
            }
        }
        if let Some(i) = &self.insight {
            if !(0.0..=1.0).contains(&i.lambda) {
                return Err(Error::config(
                    "insight.lambda",
                    format!("{} is outside [0, 1]", i.lambda),
                ));
            }
        }
        self.benchmark.validate()?;
        self.mixup.validate()?;
        self.vendor.validate()?;
        self.client.validate()?;
        self.metrics.validate()
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }

    /// Vendor settings for one run at vendor-side ratio `lambda`.
    pub fn vendor_for(&self, run_seed: u64, lambda: f64) -> VendorConfig {
        VendorConfig {
            mixup: MixupConfig {
                lambda,
                ..self.mixup.clone()
            },
            seed: derive_seed(run_seed, "vendor"),
            ..self.vendor.clone()
        }
    }

    /// Client settings; the client ratio follows the vendor's unless fixed.
    pub fn client_for(&self, run_seed: u64, lambda: f64) -> ClientConfig {
        ClientConfig {
            mixup: MixupConfig {
                lambda: self.client_lambda.unwrap_or(lambda),
                ..self.mixup.clone()
            },
            seed: derive_seed(run_seed, "client"),
            ..self.client.clone()
        }
    }

    pub fn metrics_for(&self, run_seed: u64) -> DomainClassifierConfig {
        DomainClassifierConfig {
            seed: derive_seed(run_seed, "metrics"),
            ..self.metrics.clone()
        }
    }

    pub fn data_seed(run_seed: u64) -> u64 {
        derive_seed(run_seed, "data")
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ExperimentConfig {
    /// Data for one run: the configured files, or the generator at the
    /// run's data seed.
    pub fn data_for(&self, run_seed: u64) -> Result<BenchmarkData> {
        match &self.datasets {
            Some(p) => p.load(),
            None => self.benchmark.generate(ExperimentConfig::data_seed(run_seed)),
        }
    }
}
