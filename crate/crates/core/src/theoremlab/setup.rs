use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::substream;

pub const MIN_MC_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gaussian1d {
    pub mean: f64,
    pub std: f64,
}

impl Gaussian1d {
    pub const fn new(mean: f64, std: f64) -> Self {
        Gaussian1d { mean, std }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.std > 0.0) || !self.mean.is_finite() || !self.std.is_finite() {
            return Err(Error::config(field, "need a finite mean and a positive std"));
        }
        Ok(())
    }

    pub fn sample(&self, n: usize, seed: u64, label: &str) -> Result<Vec<f64>> {
        let normal = Normal::new(self.mean, self.std).map_err(|e| Error::config(label.to_string(), e.to_string()))?;
        let mut rng = substream(seed, label);
        Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
    }
}

/// `f_d(z) = weight·z + bias`; positive means "target".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearFd {
    pub weight: f64,
    pub bias: f64,
}

impl LinearFd {
    pub fn eval(&self, z: f64) -> f64 {
        self.weight * z + self.bias
    }

    /// Fraction of `z` with `f_d(z) > 0`; zero counts as non-positive.
    pub fn positive_rate(&self, z: &[f64]) -> f64 {
        z.iter().filter(|&&v| self.eval(v) > 0.0).count() as f64 / z.len() as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Independence {
    /// Generic draws are independent of the original draws.
    #[default]
    Independent,
    /// `z_g = μ_g + σ_g·(z − μ)/σ`, a deterministic function of `z`.
    Paired,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremSetup {
    pub source: Gaussian1d,
    pub target: Gaussian1d,
    pub source_generic: Gaussian1d,
    pub target_generic: Gaussian1d,
    pub independence: Independence,
    /// Fixed domain classifier; when absent the optimal threshold on the
    /// original samples is used.
    pub f_d: Option<LinearFd>,
    pub lambdas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub assert_assumptions: bool,
}

impl Default for TheoremSetup {
    fn default() -> Self {
        TheoremSetup {
            source: Gaussian1d::new(-2.0, 0.25),
            target: Gaussian1d::new(2.0, 0.25),
            source_generic: Gaussian1d::new(0.0, 1.0),
            target_generic: Gaussian1d::new(0.0, 1.0),
            independence: Independence::Independent,
            f_d: None,
            lambdas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            samples: 200_000,
            seed: 0,
            assert_assumptions: true,
        }
    }
}

impl TheoremSetup {
    pub fn validate(&self) -> Result<()> {
        self.source.validate("theorem.source")?;
        self.target.validate("theorem.target")?;
        self.source_generic.validate("theorem.source_generic")?;
        self.target_generic.validate("theorem.target_generic")?;
        if self.samples < MIN_MC_SAMPLES {
            return Err(Error::config(
                "theorem.samples",
                format!("{} < {MIN_MC_SAMPLES} Monte-Carlo draws", self.samples),
            ));
        }
        if self.lambdas.is_empty() {
            return Err(Error::config("theorem.lambdas", "grid is empty"));
        }
        for &l in &self.lambdas {
            crate::numerics::mix::check_lambda(l)?;
        }
        Ok(())
    }
}

/// `(φ, stderr)` with `φ = Pr[f_d(z) > 0]` over `n` draws.
pub fn mc_phi(dist: &Gaussian1d, f_d: &LinearFd, n: usize, seed: u64) -> Result<(f64, f64)> {
    if n < MIN_MC_SAMPLES {
        return Err(Error::config("n", format!("{n} < {MIN_MC_SAMPLES} Monte-Carlo draws")));
    }
    dist.validate("distribution")?;
    let z = dist.sample(n, seed, "mc_phi")?;
    let phi = f_d.positive_rate(&z);
    Ok((phi, crate::metrics::binomial_stderr(phi, n)))
}

/// Best 1-D linear domain classifier: threshold at the midpoint of the
/// gap that maximizes `|rate_t − rate_s|`, oriented so target is positive.
pub fn optimal_threshold(source: &[f64], target: &[f64]) -> (LinearFd, f64) {
    let mut all: Vec<(f64, bool)> = source
        .iter()
        .map(|&v| (v, false))
        .chain(target.iter().map(|&v| (v, true)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (ns, nt) = (source.len() as f64, target.len() as f64);
    // Threshold below everything: all above.
    let (mut above_s, mut above_t) = (ns, nt);
    let mut best = (0.0_f64, all.first().map_or(0.0, |p| p.0 - 1.0));
    let mut i = 0;
    while i < all.len() {
        let v = all[i].0;
        while i < all.len() && all[i].0 == v {
            if all[i].1 {
                above_t -= 1.0;
            } else {
                above_s -= 1.0;
            }
            i += 1;
        }
        let cut = if i < all.len() { 0.5 * (v + all[i].0) } else { v + 1.0 };
        let diff = above_t / nt - above_s / ns;
        if diff.abs() > best.0.abs() {
            best = (diff, cut);
        }
    }
    let (diff, cut) = best;
    let fd = if diff >= 0.0 {
        LinearFd {
            weight: 1.0,
            bias: -cut,
        }
    } else {
        LinearFd {
            weight: -1.0,
            bias: cut,
        }
    };
    (fd, diff.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_separates_disjoint_sets() {
        let (fd, d) = optimal_threshold(&[-3.0, -2.0, -1.0], &[1.0, 2.5]);
        assert_eq!(d, 1.0);
        assert_eq!(fd.eval(0.0), 0.0);
        assert!(fd.eval(1.0) > 0.0);
    }

    #[test]
    fn threshold_flips_orientation() {
        let (fd, d) = optimal_threshold(&[2.0, 3.0], &[-1.0, -2.0]);
        assert_eq!(d, 1.0);
        assert_eq!(fd.weight, -1.0);
        assert_eq!(fd.positive_rate(&[-1.0, -2.0]), 1.0);
    }

    #[test]
    fn small_n_is_rejected() {
        let fd = LinearFd { weight: 1.0, bias: 0.0 };
        assert!(mc_phi(&Gaussian1d::new(0.0, 1.0), &fd, 100, 0).is_err());
    }
}
