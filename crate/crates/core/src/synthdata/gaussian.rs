use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::{DomainDataset, DomainRole, EvalLabels, LabeledSample, PayloadKind};
use crate::error::{Error, Result};
use crate::numerics::substream;

/// Diagonal Gaussian for one (domain, class) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCell {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDomainSpec {
    pub role: DomainRole,
    /// One cell per class.
    pub classes: Vec<GaussianCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDomainConfig {
    pub domains: Vec<GaussianDomainSpec>,
    pub samples_per_cell: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedDomain {
    pub dataset: DomainDataset,
    /// Present for target-like roles, whose samples carry no labels.
    pub eval_labels: Option<EvalLabels>,
}

impl GaussianDomainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return Err(Error::config("gaussian.domains", "need at least one domain"));
        }
        if self.samples_per_cell == 0 {
            return Err(Error::config("gaussian.samples_per_cell", "must be >= 1"));
        }
        let dim = self.domains[0].classes.first().map(|c| c.mean.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::config(
                "gaussian.domains[0].classes",
                "need at least one class of dim >= 1",
            ));
        }
        let classes = self.domains[0].classes.len();
        for (d, spec) in self.domains.iter().enumerate() {
            if spec.classes.len() != classes {
                return Err(Error::config(
                    format!("gaussian.domains[{d}].classes"),
                    "all domains need the same class count",
                ));
            }
            for (c, cell) in spec.classes.iter().enumerate() {
                let field = format!("gaussian.domains[{d}].classes[{c}]");
                if cell.mean.len() != dim || cell.variance.len() != dim {
                    return Err(Error::config(field, format!("mean and variance must have dim {dim}")));
                }
                if cell.variance.iter().any(|v| !(*v >= 0.0)) {
                    return Err(Error::config(field, "variances must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Samples `samples_per_cell` points per (domain, class), classes interleaved.
pub fn gen_gaussian_domains(cfg: &GaussianDomainConfig) -> Result<Vec<GeneratedDomain>> {
    cfg.validate()?;
    let dim = cfg.domains[0].classes[0].mean.len();
    let classes = cfg.domains[0].classes.len();
    let mut out = Vec::with_capacity(cfg.domains.len());
    for (d, spec) in cfg.domains.iter().enumerate() {
        let mut rng = substream(cfg.seed, &format!("gaussian/{d}/{}", spec.role));
        let mut samples = Vec::with_capacity(cfg.samples_per_cell * classes);
        let mut labels = Vec::with_capacity(samples.capacity());
        for _ in 0..cfg.samples_per_cell {
            for (c, cell) in spec.classes.iter().enumerate() {
                let payload = cell
                    .mean
                    .iter()
                    .zip(&cell.variance)
                    .map(|(&m, &v)| {
                        let n: f64 = StandardNormal.sample(&mut rng);
                        if v == 0.0 {
                            m
                        } else {
                            m + v.sqrt() * n
                        }
                    })
                    .collect();
                samples.push(LabeledSample {
                    payload,
                    label: Some(c),
                });
                labels.push(c);
            }
        }
        let source_like = spec.role.is_source_like();
        if !source_like {
            for s in &mut samples {
                s.label = None;
            }
        }
        out.push(GeneratedDomain {
            dataset: DomainDataset {
                role: spec.role,
                samples,
                class_count: classes,
                payload_kind: PayloadKind::Vector { dim },
                provenance: format!("gaussian domain {d} seed={}", cfg.seed),
            },
            eval_labels: (!source_like).then(|| EvalLabels::new(labels)),
        });
    }
    Ok(out)
}
