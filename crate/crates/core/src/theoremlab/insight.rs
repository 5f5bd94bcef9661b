use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::genericdomain::MixupMode;
use crate::metrics::{tradeoff_curve, DomainClassifierConfig, LabeledDomains, MetricsReport};
use crate::numerics::derive_seed;
use crate::sfda::VendorConfig;
use crate::synthdata::{DomainDataset, EvalLabels};

/// One seed's benchmark draw.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub source: DomainDataset,
    pub target: DomainDataset,
    pub target_labels: EvalLabels,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Insight2Report {
    pub lambda: f64,
    pub mode: MixupMode,
    /// Mean `d_H + κ` on the mixup domains.
    pub mixup_side: f64,
    /// Mean `d_H + κ` on the original domains.
    pub original_side: f64,
    /// `mixup_side − original_side`.
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub rows: Vec<(MetricsReport, MetricsReport)>,
}

impl Insight2Report {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} insight2 mode={} lambda={:.6} mixup={:.6} original={:.6} diff={:.6} tol={:.6}",
            if self.pass { "PASS" } else { "FAIL" },
            self.mode.as_str(),
            self.lambda,
            self.mixup_side,
            self.original_side,
            self.difference,
            self.tolerance
        );
        s
    }
}

/// Empirical check of `d_H + κ` (mixup, λ) ≤ `d_H + κ` (original), averaged
/// over seeds. Each seed trains a vendor at `λ` and at `0`, with vendor and
/// probe seeds derived from the run seed as in a pipeline run.
pub fn insight2_check(
    runs: &[SeedRun],
    vendor: &VendorConfig,
    mode: MixupMode,
    lambda: f64,
    cfg: &DomainClassifierConfig,
    tolerance: f64,
) -> Result<Insight2Report> {
    if runs.is_empty() {
        return Err(Error::config("seeds", "need at least one seed"));
    }
    let mut rows = Vec::new();
    for run in runs {
        let data = LabeledDomains {
            source: &run.source,
            target: &run.target,
            target_labels: &run.target_labels,
        };
        let v = VendorConfig {
            seed: derive_seed(run.seed, "vendor"),
            ..vendor.clone()
        };
        let c = DomainClassifierConfig {
            seed: derive_seed(run.seed, "metrics"),
            ..cfg.clone()
        };
        let mut curve = tradeoff_curve(data, &v, mode, &[lambda, 0.0], &c)?;
        let base = curve.pop().expect("two rows");
        let mix = curve.pop().expect("two rows");
        rows.push((mix, base));
    }
    let k = rows.len() as f64;
    let mixup_side = rows.iter().map(|(m, _)| m.d_h + m.kappa).sum::<f64>() / k;
    let original_side = rows.iter().map(|(_, b)| b.d_h + b.kappa).sum::<f64>() / k;
    let difference = mixup_side - original_side;
    Ok(Insight2Report {
        lambda,
        mode,
        mixup_side,
        original_side,
        difference,
        tolerance,
        pass: difference <= tolerance,
        rows,
    })
}
