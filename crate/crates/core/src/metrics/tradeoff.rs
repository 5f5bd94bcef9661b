//! Trade-off measurement on a frozen vendor backbone: the domain classifier
//! is fit on original features and evaluated on mixup features; the joint
//! task classifier is fit and evaluated on mixup features.

use rayon::prelude::*;

use super::bounds::{estimate_dh, estimate_kappa, fit_domain_classifier, MetricsReport};
use super::probe::DomainClassifierConfig;
use crate::error::Result;
use crate::genericdomain::{MixupConfig, MixupMode};
use crate::numerics::derive_seed;
use crate::sfda::train::MixedInputs;
use crate::sfda::{evaluate_with, vendor_train, SfdaModel, VendorConfig};
use crate::synthdata::{split_indices, DomainDataset, EvalLabels};

#[derive(Clone, Copy, Debug)]
pub struct LabeledDomains<'a> {
    pub source: &'a DomainDataset,
    pub target: &'a DomainDataset,
    /// Experimenter-only target labels.
    pub target_labels: &'a EvalLabels,
}

/// Metrics of `model` with the mixup translation `mix` applied to both
/// domains. `target_acc` is the model's accuracy on the original target.
pub fn frozen_metrics(
    model: &SfdaModel,
    data: LabeledDomains<'_>,
    mix: &MixupConfig,
    cfg: &DomainClassifierConfig,
    seed: u64,
) -> Result<MetricsReport> {
    let ys = data.source.labels()?;
    let yt = data.target_labels.as_slice();
    let net = &model.net;
    let stem = model.conv_stem;
    let all = |d: &DomainDataset| (0..d.len()).collect::<Vec<_>>();

    let plain = MixupConfig::edge(0.0);
    let orig_s = MixedInputs::build(data.source, &plain, stem, 0)?.features(net, &all(data.source))?;
    let orig_t = MixedInputs::build(data.target, &plain, stem, 0)?.features(net, &all(data.target))?;
    let aug_seed = derive_seed(seed, "metrics/augment");
    let mix_s = MixedInputs::build(data.source, mix, stem, aug_seed)?.features(net, &all(data.source))?;
    let mix_t = MixedInputs::build(data.target, mix, stem, aug_seed)?.features(net, &all(data.target))?;

    let train_fraction = 1.0 - cfg.eval_fraction;
    let (s_tr, s_ev) = split_indices(
        Some(&ys),
        ys.len(),
        train_fraction,
        derive_seed(seed, "metrics/split/source"),
    )?;
    let (t_tr, t_ev) = split_indices(
        Some(yt),
        yt.len(),
        train_fraction,
        derive_seed(seed, "metrics/split/target"),
    )?;
    let pick = |y: &[usize], idx: &[usize]| idx.iter().map(|&i| y[i]).collect::<Vec<_>>();

    let probe_cfg = DomainClassifierConfig {
        seed: derive_seed(seed, "metrics/probe"),
        ..cfg.clone()
    };
    let f_d = fit_domain_classifier(&orig_s.select_rows(&s_tr), &orig_t.select_rows(&t_tr), &probe_cfg)?;
    let d_h = estimate_dh(&f_d, &mix_s.select_rows(&s_ev), &mix_t.select_rows(&t_ev))?;

    let (ys_tr, ys_ev, yt_tr, yt_ev) = (pick(&ys, &s_tr), pick(&ys, &s_ev), pick(yt, &t_tr), pick(yt, &t_ev));
    let kappa = estimate_kappa(
        (&mix_s.select_rows(&s_tr), &ys_tr, &mix_t.select_rows(&t_tr), &yt_tr),
        (&mix_s.select_rows(&s_ev), &ys_ev, &mix_t.select_rows(&t_ev), &yt_ev),
        data.source.class_count,
        &probe_cfg,
    )?;
    let target_acc = evaluate_with(model, data.target, data.target_labels)?;
    MetricsReport::new(
        mix.lambda,
        mix.mode.as_str(),
        d_h,
        kappa,
        target_acc,
        (s_ev.len(), t_ev.len()),
        seed,
    )
}

/// One row per λ, in grid order: train the vendor on `D_{s_m}(λ)`, freeze,
/// then measure with the same translation on both domains.
pub fn tradeoff_curve(
    data: LabeledDomains<'_>,
    vendor: &VendorConfig,
    mode: MixupMode,
    grid: &[f64],
    cfg: &DomainClassifierConfig,
) -> Result<Vec<MetricsReport>> {
    grid.par_iter()
        .map(|&lambda| {
            let mix = MixupConfig {
                lambda,
                mode,
                ..vendor.mixup.clone()
            };
            let vcfg = VendorConfig {
                mixup: mix.clone(),
                ..vendor.clone()
            };
            let (model, _) = vendor_train(data.source, &vcfg)?;
            frozen_metrics(&model, data, &mix, cfg, vendor.seed)
        })
        .collect()
}
