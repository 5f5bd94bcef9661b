use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::dataset::{DomainDataset, DomainRole, EvalLabels, LabeledSample, PayloadKind};
use crate::error::{Error, Result};
use crate::numerics::substream;

/// Centre of the noiseless two-moons point set; rotations pivot here.
pub const MOONS_CENTROID: [f64; 2] = [0.5, 0.25];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoonsConfig {
    /// Points per domain.
    pub samples: usize,
    pub noise: f64,
    /// Target rotation in radians, `[0, 2π)`.
    pub theta: f64,
    pub seed: u64,
}

impl Default for MoonsConfig {
    fn default() -> Self {
        MoonsConfig {
            samples: 400,
            noise: 0.1,
            theta: 30f64.to_radians(),
            seed: 0,
        }
    }
}

impl MoonsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..2.0 * PI).contains(&self.theta) {
            return Err(Error::config("moons.theta", "must lie in [0, 2π)"));
        }
        if self.samples < 2 {
            return Err(Error::config("moons.samples", "must be >= 2"));
        }
        if !(self.noise >= 0.0) {
            return Err(Error::config("moons.noise", "must be >= 0"));
        }
        Ok(())
    }
}

pub fn rotate_about(p: [f64; 2], center: [f64; 2], theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
    [center[0] + c * dx - s * dy, center[1] + s * dx + c * dy]
}

/// Classic two moons: class 0 on the upper arc `(cos t, sin t)`, class 1 on
/// the lower arc `(1 − cos t, 0.5 − sin t)`, `t ~ U[0, π]`, labels alternating.
pub fn moons_points<R: Rng>(n: usize, noise: f64, rng: &mut R) -> (Vec<[f64; 2]>, Vec<usize>) {
    let normal = Normal::new(0.0, noise.max(0.0)).unwrap();
    let mut pts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let t = rng.random_range(0.0..=PI);
        let mut p = if class == 0 {
            [t.cos(), t.sin()]
        } else {
            [1.0 - t.cos(), 0.5 - t.sin()]
        };
        if noise > 0.0 {
            p[0] += normal.sample(rng);
            p[1] += normal.sample(rng);
        }
        pts.push(p);
        labels.push(class);
    }
    (pts, labels)
}

/// Source moons, and an independently drawn target set rotated by `theta`
/// about [`MOONS_CENTROID`], with its labels quarantined.
pub fn gen_two_moons(cfg: &MoonsConfig) -> Result<(DomainDataset, DomainDataset, EvalLabels)> {
    cfg.validate()?;
    let (sp, sl) = moons_points(cfg.samples, cfg.noise, &mut substream(cfg.seed, "moons/source"));
    let (tp, tl) = moons_points(cfg.samples, cfg.noise, &mut substream(cfg.seed, "moons/target"));
    let provenance = format!(
        "two-moons n={} noise={} theta={} seed={}",
        cfg.samples, cfg.noise, cfg.theta, cfg.seed
    );
    let source = DomainDataset {
        role: DomainRole::Source,
        samples: sp
            .iter()
            .zip(&sl)
            .map(|(p, &y)| LabeledSample {
                payload: p.to_vec(),
                label: Some(y),
            })
            .collect(),
        class_count: 2,
        payload_kind: PayloadKind::Vector { dim: 2 },
        provenance: provenance.clone(),
    };
    let target = DomainDataset {
        role: DomainRole::Target,
        samples: tp
            .iter()
            .map(|&p| LabeledSample {
                payload: if cfg.theta == 0.0 {
                    p.to_vec()
                } else {
                    rotate_about(p, MOONS_CENTROID, cfg.theta).to_vec()
                },
                label: None,
            })
            .collect(),
        class_count: 2,
        payload_kind: PayloadKind::Vector { dim: 2 },
        provenance,
    };
    Ok((source, target, EvalLabels::new(tl)))
}
