use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::{BenchmarkData, ExperimentConfig};
use crate::error::Result;
use crate::metrics::{frozen_metrics, LabeledDomains, MetricsReport};
use crate::sfda::{client_adapt, evaluate_with, vendor_train, SfdaModel, TrainLog};

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub seed: u64,
    pub lambda: f64,
    pub vendor_model: SfdaModel,
    pub adapted_model: SfdaModel,
    pub vendor_log: TrainLog,
    pub client_log: TrainLog,
    pub pre_target_acc: f64,
    pub post_target_acc: f64,
    /// Bound terms on the frozen vendor backbone; `target_acc` is the
    /// post-adaptation accuracy.
    pub metrics: Option<MetricsReport>,
}

fn labeled(data: &BenchmarkData) -> LabeledDomains<'_> {
    LabeledDomains {
        source: &data.source,
        target: &data.target,
        target_labels: &data.target_labels,
    }
}

/// vendor → client → finetune → evaluate for one seed and vendor ratio.
pub fn run_pipeline(cfg: &ExperimentConfig, run_seed: u64, lambda: f64, with_metrics: bool) -> Result<PipelineResult> {
    let data = cfg.data_for(run_seed)?;
    run_pipeline_on(cfg, &data, run_seed, lambda, with_metrics)
}

pub fn run_pipeline_on(
    cfg: &ExperimentConfig,
    data: &BenchmarkData,
    run_seed: u64,
    lambda: f64,
    with_metrics: bool,
) -> Result<PipelineResult> {
    let vcfg = cfg.vendor_for(run_seed, lambda);
    let (vendor_model, vendor_log) = vendor_train(&data.source, &vcfg)?;
    let pre_target_acc = evaluate_with(&vendor_model, &data.target, &data.target_labels)?;
    let probe = |m: &SfdaModel| evaluate_with(m, &data.target, &data.target_labels);
    let (adapted_model, client_log) = client_adapt(
        &vendor_model,
        &data.target,
        &cfg.client_for(run_seed, lambda),
        Some(&probe),
    )?;
    let post_target_acc = evaluate_with(&adapted_model, &data.target, &data.target_labels)?;
    let metrics = if with_metrics {
        let mut m = frozen_metrics(
            &vendor_model,
            labeled(data),
            &vcfg.mixup,
            &cfg.metrics_for(run_seed),
            run_seed,
        )?;
        m.target_acc = post_target_acc;
        Some(m)
    } else {
        None
    };
    Ok(PipelineResult {
        seed: run_seed,
        lambda,
        vendor_model,
        adapted_model,
        vendor_log,
        client_log,
        pre_target_acc,
        post_target_acc,
        metrics,
    })
}

/// Every (λ, seed) pair of the grid, run concurrently and returned in grid
/// order (λ-major, then seed).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<MetricsReport>> {
    cfg.validate()?;
    let seeds = cfg.seed_list();
    let data: Vec<BenchmarkData> = seeds.par_iter().map(|&s| cfg.data_for(s)).collect::<Result<_>>()?;
    let points: Vec<(f64, usize)> = cfg
        .lambda_grid
        .iter()
        .flat_map(|&l| (0..seeds.len()).map(move |i| (l, i)))
        .collect();
    points
        .par_iter()
        .map(|&(l, i)| {
            let r = run_pipeline_on(cfg, &data[i], seeds[i], l, true)?;
            Ok(r.metrics.expect("metrics requested"))
        })
        .collect()
}

/// `tradeoff_curve` per seed on the frozen vendor backbone; `target_acc`
/// is the pre-adaptation accuracy. Rows are λ-major, then seed.
pub fn run_tradeoff(cfg: &ExperimentConfig) -> Result<Vec<MetricsReport>> {
    cfg.validate()?;
    let seeds = cfg.seed_list();
    let per_seed: Vec<Vec<MetricsReport>> = seeds
        .par_iter()
        .map(|&s| {
            let data = cfg.data_for(s)?;
            let v = cfg.vendor_for(s, cfg.mixup.lambda);
            let mut rows = crate::metrics::tradeoff_curve(
                labeled(&data),
                &v,
                cfg.mixup.mode,
                &cfg.lambda_grid,
                &cfg.metrics_for(s),
            )?;
            for r in &mut rows {
                r.seed = s;
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for li in 0..cfg.lambda_grid.len() {
        for rows in &per_seed {
            out.push(rows[li].clone());
        }
    }
    Ok(out)
}

/// Mean and standard error across seeds, per λ in first-seen order.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub lambda: f64,
    pub mode: String,
    pub n: usize,
    /// (mean, stderr) of γ_T, γ_D, d_H, κ, target_acc.
    pub stats: [(f64, f64); 5],
}

pub const AGGREGATE_HEADER: &str = "lambda,mode,n_seeds,gamma_T_mean,gamma_T_stderr,gamma_D_mean,gamma_D_stderr,d_H_mean,d_H_stderr,kappa_mean,kappa_stderr,target_acc_mean,target_acc_stderr";

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(rows: &[MetricsReport]) -> Vec<AggregateRow> {
    let mut lambdas: Vec<(f64, String)> = Vec::new();
    for r in rows {
        if !lambdas.iter().any(|(l, m)| *l == r.lambda && *m == r.mode) {
            lambdas.push((r.lambda, r.mode.clone()));
        }
    }
    lambdas
        .into_iter()
        .map(|(lambda, mode)| {
            let group: Vec<&MetricsReport> = rows.iter().filter(|r| r.lambda == lambda && r.mode == mode).collect();
            let col = |f: fn(&MetricsReport) -> f64| mean_stderr(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            AggregateRow {
                lambda,
                mode,
                n: group.len(),
                stats: [
                    col(|r| r.gamma_t),
                    col(|r| r.gamma_d),
                    col(|r| r.d_h),
                    col(|r| r.kappa),
                    col(|r| r.target_acc),
                ],
            }
        })
        .collect()
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = write!(s, "{:.6},{},{}", r.lambda, r.mode, r.n);
        for (m, e) in r.stats {
            let _ = write!(s, ",{m:.6},{e:.6}");
        }
        s.push('\n');
    }
    s
}
