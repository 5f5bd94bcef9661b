//! Bound terms `d_H`, `κ` and the trade-off metrics `γ_T`, `γ_D`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::{substream, Tensor};
use rand::seq::SliceRandom;

use super::probe::{DomainClassifierConfig, ProbeClassifier};

pub const SOURCE: usize = 0;
pub const TARGET: usize = 1;

fn require_same_dim(a: &Tensor, b: &Tensor, op: &'static str) -> Result<()> {
    if a.shape().len() != 2 || b.shape().len() != 2 || a.cols() != b.cols() {
        return Err(Error::dim(op, format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    if a.rows() == 0 || b.rows() == 0 {
        return Err(Error::config("features", format!("{op} needs nonempty feature sets")));
    }
    Ok(())
}

/// Domain classifier with label 1 = target. The larger side is subsampled
/// so that both domains contribute equally.
pub fn fit_domain_classifier(
    source: &Tensor,
    target: &Tensor,
    cfg: &DomainClassifierConfig,
) -> Result<ProbeClassifier> {
    require_same_dim(source, target, "fit_domain_classifier")?;
    let n = source.rows().min(target.rows());
    let mut rng = substream(cfg.seed, "domain/balance");
    let pick = |t: &Tensor, rng: &mut _| {
        let mut idx: Vec<usize> = (0..t.rows()).collect();
        if t.rows() > n {
            idx.shuffle(rng);
            idx.truncate(n);
            idx.sort_unstable();
        }
        t.select_rows(&idx)
    };
    let s = pick(source, &mut rng);
    let t = pick(target, &mut rng);
    let x = Tensor::new(vec![2 * n, source.cols()], [s.data(), t.data()].concat())?;
    let y: Vec<usize> = std::iter::repeat_n(SOURCE, n)
        .chain(std::iter::repeat_n(TARGET, n))
        .collect();
    ProbeClassifier::fit(&x, &y, 2, cfg, "domain")
}

/// `|P_s[f_d = 1] − P_t[f_d = 1]|` on held-out features.
pub fn estimate_dh(classifier: &ProbeClassifier, source: &Tensor, target: &Tensor) -> Result<f64> {
    require_same_dim(source, target, "estimate_dh")?;
    let rs = classifier.rate(source, TARGET)?;
    let rt = classifier.rate(target, TARGET)?;
    Ok((rs - rt).abs().clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaEstimate {
    pub kappa: f64,
    pub eps_s: f64,
    pub eps_t: f64,
}

/// Held-out `ε_s + ε_t` of one classifier trained on both domains. The
/// train/eval tensors are supplied already split.
pub fn estimate_kappa(
    train: (&Tensor, &[usize], &Tensor, &[usize]),
    eval: (&Tensor, &[usize], &Tensor, &[usize]),
    classes: usize,
    cfg: &DomainClassifierConfig,
) -> Result<KappaEstimate> {
    let (xs, ys, xt, yt) = train;
    require_same_dim(xs, xt, "estimate_kappa")?;
    if yt.is_empty() || eval.3.is_empty() {
        return Err(Error::Role("kappa needs target evaluation labels".into()));
    }
    let x = Tensor::new(vec![xs.rows() + xt.rows(), xs.cols()], [xs.data(), xt.data()].concat())?;
    let y = [ys, yt].concat();
    let clf = ProbeClassifier::fit(&x, &y, classes, cfg, "joint")?;
    let eps_s = clf.error(eval.0, eval.1)?;
    let eps_t = clf.error(eval.2, eval.3)?;
    Ok(KappaEstimate {
        kappa: (eps_s + eps_t).clamp(0.0, 2.0),
        eps_s,
        eps_t,
    })
}

/// `(γ_T, γ_D) = (1 − d_H, 1 − κ/2)`.
pub fn gammas(d_h: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&d_h) {
        return Err(Error::config("d_H", format!("{d_h} is outside [0, 1]")));
    }
    if !(0.0..=2.0).contains(&kappa) {
        return Err(Error::config("kappa", format!("{kappa} is outside [0, 2]")));
    }
    Ok((1.0 - d_h, 1.0 - kappa / 2.0))
}

/// Binomial standard error of a rate estimated from `n` draws.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub lambda: f64,
    pub mode: String,
    pub d_h: f64,
    pub kappa: f64,
    pub gamma_t: f64,
    pub gamma_d: f64,
    pub eps_s: f64,
    pub eps_t: f64,
    pub bound: f64,
    pub target_acc: f64,
    pub n_source_eval: usize,
    pub n_target_eval: usize,
    pub seed: u64,
}

pub const METRICS_HEADER: &str = "lambda,mode,gamma_T,gamma_D,d_H,kappa,eps_s,eps_t,target_acc,seed";

impl MetricsReport {
    pub fn new(
        lambda: f64,
        mode: &str,
        d_h: f64,
        k: KappaEstimate,
        target_acc: f64,
        n: (usize, usize),
        seed: u64,
    ) -> Result<Self> {
        let (gamma_t, gamma_d) = gammas(d_h, k.kappa)?;
        Ok(MetricsReport {
            lambda,
            mode: mode.to_string(),
            d_h,
            kappa: k.kappa,
            gamma_t,
            gamma_d,
            eps_s: k.eps_s,
            eps_t: k.eps_t,
            bound: k.eps_s + d_h + k.kappa,
            target_acc,
            n_source_eval: n.0,
            n_target_eval: n.1,
            seed,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:.6},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.lambda,
            self.mode,
            self.gamma_t,
            self.gamma_d,
            self.d_h,
            self.kappa,
            self.eps_s,
            self.eps_t,
            self.target_acc,
            self.seed
        )
    }
}

pub fn metrics_csv(rows: &[MetricsReport]) -> String {
    let mut s = String::from(METRICS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(gammas(0.0, 0.0).unwrap(), (1.0, 1.0));
        assert_eq!(gammas(0.5, 2.0).unwrap().1, 0.0);
        assert!((gammas(0.9476, 0.0).unwrap().0 - 0.0524).abs() < 1e-12);
        assert!(gammas(1.2, 0.0).is_err());
        assert!(gammas(0.2, -0.1).is_err());
    }
}
