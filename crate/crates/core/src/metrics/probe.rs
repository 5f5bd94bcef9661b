//! Small standardized classifiers used to approximate sup/min over H.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    mlp_value_and_grad, optimizer_step, substream, Activation, LossSpec, Mlp, MlpSpec, OptimizerConfig, OptimizerState,
    Tensor,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HypothesisFamily {
    Linear,
    Mlp { hidden: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainClassifierConfig {
    pub family: HypothesisFamily,
    /// Full-batch optimizer steps.
    pub epochs: usize,
    pub lr: f64,
    /// Held-out share of every estimation split.
    pub eval_fraction: f64,
    /// Derived from the run seed by the experiment layer.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for DomainClassifierConfig {
    fn default() -> Self {
        DomainClassifierConfig {
            family: HypothesisFamily::Linear,
            epochs: 300,
            lr: 0.05,
            eval_fraction: 0.5,
            seed: 0,
        }
    }
}

impl DomainClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("domain_classifier.epochs", "must be positive"));
        }
        if !(self.lr > 0.0) {
            return Err(Error::config("domain_classifier.lr", "must be positive"));
        }
        if !(self.eval_fraction > 0.0 && self.eval_fraction < 1.0) {
            return Err(Error::config("domain_classifier.eval_fraction", "must lie in (0, 1)"));
        }
        if let HypothesisFamily::Mlp { hidden } = &self.family {
            if hidden.is_empty() || hidden.contains(&0) {
                return Err(Error::config("domain_classifier.family.hidden", "need positive widths"));
            }
        }
        Ok(())
    }
}

/// Softmax classifier on standardized inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeClassifier {
    mean: Vec<f64>,
    scale: Vec<f64>,
    mlp: Mlp,
}

impl ProbeClassifier {
    pub fn fit(x: &Tensor, y: &[usize], classes: usize, cfg: &DomainClassifierConfig, label: &str) -> Result<Self> {
        cfg.validate()?;
        if x.shape().len() != 2 || x.rows() == 0 || x.rows() != y.len() {
            return Err(Error::dim(
                "probe_fit",
                format!("x {:?}, {} labels", x.shape(), y.len()),
            ));
        }
        let (n, d) = (x.rows(), x.cols());
        let mut mean = vec![0.0; d];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v / n as f64;
            }
        }
        let mut var = vec![0.0; d];
        for i in 0..n {
            for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
                *s += (v - m) * (v - m) / n as f64;
            }
        }
        let scale = var
            .iter()
            .map(|v| if *v > 1e-24 { 1.0 / v.sqrt() } else { 1.0 })
            .collect();
        let mut widths = vec![d];
        if let HypothesisFamily::Mlp { hidden } = &cfg.family {
            widths.extend(hidden);
        }
        widths.push(classes);
        let mut rng = substream(cfg.seed, &format!("probe/{label}"));
        let mut probe = ProbeClassifier {
            mean,
            scale,
            mlp: Mlp::init(MlpSpec::head(widths, Activation::Relu)?, &mut rng)?,
        };
        let xs = probe.standardize(x)?;
        let opt = OptimizerConfig::adam(cfg.lr);
        let mut state = OptimizerState::new();
        let loss = LossSpec::CrossEntropy {
            labels: y,
            smoothing: 0.0,
        };
        for _ in 0..cfg.epochs {
            let rec = mlp_value_and_grad(&probe.mlp, &xs, &loss)?;
            optimizer_step(&mut probe.mlp.params_mut(), &rec.grads, &mut state, &opt)?;
        }
        Ok(probe)
    }

    fn standardize(&self, x: &Tensor) -> Result<Tensor> {
        x.require_matrix("probe", self.mean.len())?;
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) * s;
            }
        }
        Ok(out)
    }

    pub fn predict(&self, x: &Tensor) -> Result<Vec<usize>> {
        Ok(self.mlp.forward(&self.standardize(x)?)?.argmax_rows())
    }

    /// Fraction of rows predicted as `class`.
    pub fn rate(&self, x: &Tensor, class: usize) -> Result<f64> {
        if x.rows() == 0 {
            return Err(Error::config("eval_set", "empty evaluation set"));
        }
        let p = self.predict(x)?;
        Ok(p.iter().filter(|&&k| k == class).count() as f64 / p.len() as f64)
    }

    pub fn error(&self, x: &Tensor, y: &[usize]) -> Result<f64> {
        if x.rows() == 0 || x.rows() != y.len() {
            return Err(Error::config("eval_set", "empty or misaligned evaluation set"));
        }
        let p = self.predict(x)?;
        Ok(p.iter().zip(y).filter(|(a, b)| a != b).count() as f64 / y.len() as f64)
    }
}
