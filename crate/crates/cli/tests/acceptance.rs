//! Acceptance gate: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. The test fails if any criterion fails.

use std::fs;
use std::io::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use genmix::experiment::{run_pipeline, run_sweep, BenchmarkSpec, ExperimentConfig};
use genmix::genericdomain::{build_mixup_dataset, sobel_edges, EdgeParams, MixupConfig, MixupMode, MixupProduct};
use genmix::metrics::{estimate_dh, estimate_kappa, fit_domain_classifier, DomainClassifierConfig, MetricsReport};
use genmix::numerics::mix::mean_of;
use genmix::numerics::{
    seeded_rng, value_and_grad, Activation, FeatureMixing, GenericBranch, GradientRecord, LossSpec, Mlp, MlpSpec,
    ModelBundle, Tensor,
};
use genmix::sfda::{MixedInputs, ModelConfig, SfdaModel};
use genmix::synthdata::{gen_shape_texture, ShapeTextureConfig};
use genmix::theoremlab::{
    direct_positive_count, exact_case_decomposition, insight2_check, verify_theorem1, Gaussian1d, Independence,
    LinearFd, SeedRun, TheoremSetup,
};
use genmix::Error;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn bits(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

// ---- theorem ----------------------------------------------------------

fn oracle_dh_mix(lambda: f64, gap: f64, sd: f64, g_sd: f64) -> f64 {
    let mean = gap * (1.0 - lambda);
    let s = ((lambda * g_sd).powi(2) + ((1.0 - lambda) * sd).powi(2)).sqrt();
    2.0 * Normal::new(0.0, 1.0).unwrap().cdf(mean / s) - 1.0
}

fn c1_theorem() -> Outcome {
    let t = Instant::now();
    let r = verify_theorem1(&TheoremSetup::default()).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let bound_ok = r
        .assertions
        .iter()
        .filter(|a| a.name == "dH_mix_le_dH_orig")
        .all(|a| a.pass);
    check(bound_ok, "d_H(mix) exceeded d_H(orig) + 3 stderr")?;
    let half = r
        .rows
        .iter()
        .find(|row| row.lambda == 0.5)
        .ok_or("no lambda = 0.5 row")?;
    let oracle = oracle_dh_mix(0.5, 2.0, 0.25, 1.0);
    check(
        (half.dh_mix - 0.9476).abs() <= 0.01,
        format!("d_H(mix) at 0.5 = {:.4}", half.dh_mix),
    )?;
    check((oracle - 0.9476).abs() <= 1e-3, format!("oracle {oracle:.4}"))?;
    check(secs < 10.0, format!("runtime {secs:.2} s"))?;
    Ok(format!(
        "dH_mix(0.5)={:.4} oracle={oracle:.4} runtime={secs:.2}s",
        half.dh_mix
    ))
}

fn random_setup(seed: u64) -> TheoremSetup {
    let mut rng = seeded_rng(seed);
    let gap = rng.random_range(2.0..5.0);
    let sd = rng.random_range(0.1..0.4);
    let g_sd = rng.random_range(0.5..2.0);
    TheoremSetup {
        source: Gaussian1d::new(-gap, sd),
        target: Gaussian1d::new(gap + rng.random_range(-0.5..0.5), sd * rng.random_range(0.8..1.2)),
        source_generic: Gaussian1d::new(0.0, g_sd),
        target_generic: Gaussian1d::new(0.0, g_sd),
        independence: if seed % 2 == 0 {
            Independence::Independent
        } else {
            Independence::Paired
        },
        samples: 20_000,
        seed,
        ..TheoremSetup::default()
    }
}

fn c2_cases() -> Outcome {
    let t = Instant::now();
    let mut cells = 0;
    for seed in 0..10 {
        let setup = random_setup(500 + seed);
        let mut rng = seeded_rng(900 + seed);
        let f_d = LinearFd {
            weight: rng.random_range(0.5..2.0),
            bias: rng.random_range(-0.5..0.5),
        };
        let z = setup
            .source
            .sample(setup.samples, setup.seed, "z")
            .map_err(|e| e.to_string())?;
        let z_g = setup
            .source_generic
            .sample(setup.samples, setup.seed, "z_g")
            .map_err(|e| e.to_string())?;
        for &lambda in &setup.lambdas {
            let cases = exact_case_decomposition(&z_g, &z, lambda, &f_d).map_err(|e| e.to_string())?;
            let direct = direct_positive_count(&z_g, &z, lambda, &f_d).map_err(|e| e.to_string())?;
            check(
                cases.positive() == direct,
                format!("seed {seed} lambda {lambda}: {} vs {direct}", cases.positive()),
            )?;
            cells += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(cells == 90, format!("{cells} cells"))?;
    check(secs < 5.0, format!("runtime {secs:.2} s"))?;
    Ok(format!("{cells} setup x lambda cells exact, runtime={secs:.2}s"))
}

fn c3_monotone() -> Outcome {
    let mut setups = 0;
    for seed in 0..12 {
        let r = match verify_theorem1(&random_setup(seed)) {
            Ok(r) => r,
            Err(Error::Assumption { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        setups += 1;
        for a in &r.assertions {
            if a.name == "source_error_increases" || a.name == "target_accuracy_decreases" {
                check(a.pass, format!("seed {seed} {} at {}: {}", a.name, a.lambda, a.detail))?;
            }
        }
    }
    check(setups >= 10, format!("only {setups} setups satisfied the assumptions"))?;
    Ok(format!("{setups} assumption-satisfying setups x 9 lambdas"))
}

// ---- endpoints, gradients, stop-gradient -------------------------------

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.benchmark = BenchmarkSpec::ShapeTexture(ShapeTextureConfig {
        samples_per_class: 12,
        ..ShapeTextureConfig::default()
    });
    cfg.vendor.epochs = 3;
    cfg.client.epochs = 2;
    cfg.metrics.epochs = 50;
    cfg
}

fn c4_endpoints() -> Outcome {
    let (source, target, _) = gen_shape_texture(&ShapeTextureConfig {
        samples_per_class: 12,
        seed: 1,
        ..ShapeTextureConfig::default()
    })
    .map_err(|e| e.to_string())?;
    for d in [&source, &target] {
        let MixupProduct::Materialized(m) = build_mixup_dataset(d, &MixupConfig::edge(0.0), 0, false).unwrap() else {
            return Err("edge mode did not materialize".into());
        };
        for (a, b) in m.samples.iter().zip(&d.samples) {
            check(
                bits(&a.payload) == bits(&b.payload),
                "lambda=0 edge mixup differs from the original",
            )?;
        }
        let MixupProduct::Materialized(e) = build_mixup_dataset(d, &MixupConfig::edge(1.0), 0, false).unwrap() else {
            return Err("edge mode did not materialize".into());
        };
        for (a, b) in e.samples.iter().zip(&d.samples) {
            let edge = sobel_edges(&b.payload, d.payload_kind, &EdgeParams::default()).unwrap();
            check(
                bits(&a.payload) == bits(&edge),
                "lambda=1 edge mixup differs from the edge map",
            )?;
        }
    }
    let model = SfdaModel::init(&ModelConfig::default(), source.payload_kind, 4, &mut seeded_rng(2)).unwrap();
    let idx: Vec<usize> = (0..source.len()).collect();
    let MixupProduct::Features(p) = build_mixup_dataset(&source, &MixupConfig::feature(0.0), 0, true).unwrap() else {
        return Err("feature mode did not produce batches".into());
    };
    let b = p.batch(&model.net, &idx).unwrap();
    check(
        bits(b.z_m.data()) == bits(b.z.data()),
        "lambda=0 feature batch differs from z",
    )?;

    let mut edge = small_config();
    edge.mixup.mode = MixupMode::Edge;
    let mut feature = small_config();
    feature.mixup.mode = MixupMode::Feature;
    feature.mixup.stop_gradient = false;
    let a = run_pipeline(&edge, 3, 0.0, true).map_err(|e| e.to_string())?;
    let b = run_pipeline(&feature, 3, 0.0, true).map_err(|e| e.to_string())?;
    check(
        a.adapted_model == b.adapted_model,
        "lambda=0 pipelines produced different models",
    )?;
    check(a.vendor_log.to_csv() == b.vendor_log.to_csv(), "vendor logs differ")?;
    check(a.client_log.to_csv() == b.client_log.to_csv(), "client logs differ")?;
    let (ma, mb) = (a.metrics.unwrap(), b.metrics.unwrap());
    // The rows differ only in the mode label.
    let nums = |m: &MetricsReport| bits(&[m.d_h, m.kappa, m.eps_s, m.eps_t, m.target_acc]);
    check(nums(&ma) == nums(&mb), "metrics differ")?;
    Ok("datasets, batches and full pipeline bitwise".into())
}

struct GradInstance {
    model: ModelBundle,
    batch: Tensor,
    augs: Vec<Tensor>,
    labels: Vec<usize>,
    loss_kind: usize,
    mixing: usize,
    lambda: f64,
}

fn rand_tensor(rng: &mut impl rand::Rng, rows: usize, cols: usize) -> Tensor {
    Tensor::new(
        vec![rows, cols],
        (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

fn grad_instance(seed: u64) -> GradInstance {
    let mut rng = seeded_rng(seed);
    let (input, hidden, feat, classes) = (
        rng.random_range(2..6),
        rng.random_range(2..6),
        rng.random_range(2..5),
        rng.random_range(2..5),
    );
    let act = [Activation::Tanh, Activation::Relu, Activation::Identity][rng.random_range(0..3)];
    let backbone = Mlp::init(
        MlpSpec::new(vec![input, hidden, feat], vec![act, Activation::Tanh], false).unwrap(),
        &mut rng,
    )
    .unwrap();
    let classifier = Mlp::init(
        MlpSpec::head(vec![feat, classes], Activation::Identity).unwrap(),
        &mut rng,
    )
    .unwrap();
    let rows = rng.random_range(2..7);
    let batch = rand_tensor(&mut rng, rows, input);
    let augs = (0..3).map(|_| rand_tensor(&mut rng, rows, input)).collect();
    let labels = (0..rows).map(|_| rng.random_range(0..classes)).collect();
    GradInstance {
        model: ModelBundle::new(backbone, classifier).unwrap(),
        batch,
        augs,
        labels,
        loss_kind: rng.random_range(0..4),
        mixing: rng.random_range(0..3),
        lambda: rng.random_range(0.05..0.95),
    }
}

fn grad_eval(model: &ModelBundle, g: &GradInstance, z_g: &Tensor) -> GradientRecord {
    let ce = LossSpec::CrossEntropy {
        labels: &g.labels,
        smoothing: 0.1,
    };
    let loss = match g.loss_kind {
        0 => ce,
        1 => LossSpec::Entropy,
        2 => LossSpec::Diversity,
        _ => LossSpec::Composite(vec![(1.0, LossSpec::Entropy), (1.0, LossSpec::Diversity), (0.3, ce)]),
    };
    let mixing = match g.mixing {
        0 => None,
        1 => Some(FeatureMixing {
            generic: GenericBranch::Detached(z_g),
            lambda: g.lambda,
        }),
        _ => Some(FeatureMixing {
            generic: GenericBranch::Live(&g.augs),
            lambda: g.lambda,
        }),
    };
    value_and_grad(model, &g.batch, mixing, &loss).unwrap()
}

fn c5_gradients() -> Outcome {
    const H: f64 = 1e-5;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let g = grad_instance(7000 + seed);
        let feats: Vec<Tensor> = g.augs.iter().map(|a| g.model.features(a).unwrap()).collect();
        let z_g = mean_of(&feats).unwrap();
        let analytic = grad_eval(&g.model, &g, &z_g).grads;
        let base: Vec<Tensor> = g.model.params().into_iter().cloned().collect();
        for (p, grad) in analytic.iter().enumerate() {
            for i in 0..grad.len() {
                let at = |delta: f64| {
                    let mut params = base.clone();
                    params[p].data_mut()[i] += delta;
                    let mut m = g.model.clone();
                    m.set_params(params).unwrap();
                    grad_eval(&m, &g, &z_g).loss
                };
                let numeric = (at(H) - at(-H)) / (2.0 * H);
                let a = grad.data()[i];
                worst = worst.max((a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6));
            }
        }
    }
    check(worst < 1e-4, format!("max relative error {worst:.3e}"))?;
    Ok(format!("20 instances, max relative error {worst:.3e}"))
}

fn c6_stop_gradient() -> Outcome {
    let (source, _, _) = gen_shape_texture(&ShapeTextureConfig {
        samples_per_class: 12,
        seed: 3,
        ..ShapeTextureConfig::default()
    })
    .unwrap();
    let cfg = ModelConfig::default();
    let model = SfdaModel::init(&cfg, source.payload_kind, 4, &mut seeded_rng(9)).unwrap();
    let inputs = MixedInputs::build(&source, &MixupConfig::feature(0.3), cfg.conv_stem, 21).unwrap();
    let idx: Vec<usize> = (0..24).collect();
    let labels = source.labels().unwrap();
    let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    let loss = LossSpec::CrossEntropy {
        labels: &y,
        smoothing: 0.1,
    };
    let trained = inputs.grad(&model.net, &idx, &loss).unwrap();
    let producer = inputs.producer.as_ref().ok_or("no feature producer")?;
    let z_g = producer.batch(&model.net, &idx).unwrap().z_g;
    let constant = Tensor::new(z_g.shape().to_vec(), z_g.data().to_vec()).unwrap();
    let substituted = value_and_grad(
        &model.net,
        &producer.view_batch(0, &idx).unwrap(),
        Some(FeatureMixing {
            generic: GenericBranch::Detached(&constant),
            lambda: 0.3,
        }),
        &loss,
    )
    .unwrap();
    let equal = trained.grads.len() == substituted.grads.len()
        && trained
            .grads
            .iter()
            .zip(&substituted.grads)
            .all(|(a, b)| bits(a.data()) == bits(b.data()));
    check(equal, "parameter gradients differ from the constant-substitution run")?;
    Ok(format!("{} parameter tensors bitwise equal", trained.grads.len()))
}

// ---- trade-off ---------------------------------------------------------

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn mean_where(rows: &[MetricsReport], lambda: f64, f: impl Fn(&MetricsReport) -> f64) -> f64 {
    let v: Vec<f64> = rows.iter().filter(|r| r.lambda == lambda).map(f).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn benchmark_config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 0,
        seeds: 5,
        ..ExperimentConfig::default()
    }
}

fn c7_tradeoff(all: &mut Vec<MetricsReport>) -> Outcome {
    let t = Instant::now();
    let mut cfg = benchmark_config();
    if let BenchmarkSpec::ShapeTexture(st) = &cfg.benchmark {
        check(st.texture_class_corr == 0.5, "benchmark texture_class_corr is not 0.5")?;
    }
    cfg.mixup.mode = MixupMode::Edge;
    cfg.lambda_grid = vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.8, 1.0];
    let edge = run_sweep(&cfg).map_err(|e| e.to_string())?;
    cfg.mixup.mode = MixupMode::Feature;
    cfg.lambda_grid = vec![0.1];
    let feature = run_sweep(&cfg).map_err(|e| e.to_string())?;
    all.extend(edge.iter().cloned());
    all.extend(feature.iter().cloned());

    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let gamma_t: Vec<f64> = grid.iter().map(|&l| mean_where(&edge, l, |r| r.gamma_t)).collect();
    let rho = spearman(&grid, &gamma_t);
    let gd0 = mean_where(&edge, 0.0, |r| r.gamma_d);
    let gd1 = mean_where(&edge, 1.0, |r| r.gamma_d);
    let acc = |rows: &[MetricsReport], l| mean_where(rows, l, |r| r.target_acc);
    let (base, e01, e08, f01) = (acc(&edge, 0.0), acc(&edge, 0.1), acc(&edge, 0.8), acc(&feature, 0.1));
    let secs = t.elapsed().as_secs_f64();
    let detail = format!(
        "rho={rho:.3} gamma_T={gamma_t:.3?} gamma_D(0)={gd0:.4} gamma_D(1)={gd1:.4} acc(0)={base:.4} \
         edge(0.1)={e01:.4} feature(0.1)={f01:.4} edge(0.8)={e08:.4} runtime={secs:.0}s"
    );
    check(rho > 0.8, format!("Spearman too low: {detail}"))?;
    check(gd1 < gd0, format!("gamma_D did not drop: {detail}"))?;
    check(e01 >= base, format!("edge lambda=0.1 below baseline: {detail}"))?;
    check(f01 >= base, format!("feature lambda=0.1 below baseline: {detail}"))?;
    check(e08 < base, format!("edge lambda=0.8 not below baseline: {detail}"))?;
    check(secs < 600.0, format!("runtime: {detail}"))?;
    Ok(detail)
}

fn c8_insight(all: &mut Vec<MetricsReport>) -> Outcome {
    let cfg = benchmark_config();
    let runs = cfg
        .seed_list()
        .into_iter()
        .map(|s| {
            let d = cfg.data_for(s)?;
            Ok(SeedRun {
                seed: s,
                source: d.source,
                target: d.target,
                target_labels: d.target_labels,
            })
        })
        .collect::<genmix::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let r =
        insight2_check(&runs, &cfg.vendor, MixupMode::Feature, 0.1, &cfg.metrics, 0.02).map_err(|e| e.to_string())?;
    for (m, b) in &r.rows {
        all.push(m.clone());
        all.push(b.clone());
    }
    let detail = format!(
        "mixup={:.4} original={:.4} diff={:+.4} tol=0.02",
        r.mixup_side, r.original_side, r.difference
    );
    check(r.pass, detail.clone())?;
    Ok(detail)
}

fn gaussian(n: usize, mean: f64, seed: u64) -> Tensor {
    let mut rng = seeded_rng(seed);
    let data = (0..n * 5)
        .map(|_| mean + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    Tensor::new(vec![n, 5], data).unwrap()
}

fn c9_calibration(all: &[MetricsReport]) -> Outcome {
    let cfg = DomainClassifierConfig::default();
    let dh = |ms: f64, mt: f64| {
        let clf = fit_domain_classifier(&gaussian(400, ms, 1), &gaussian(400, mt, 2), &cfg).unwrap();
        estimate_dh(&clf, &gaussian(400, ms, 3), &gaussian(400, mt, 4)).unwrap()
    };
    let same = dh(0.0, 0.0);
    let disjoint = dh(-5.0, 5.0);
    let mut rng = seeded_rng(77);
    let mut labels = |n: usize| (0..n).map(|_| rng.random_range(0..4)).collect::<Vec<usize>>();
    let (ys, yt, es, et) = (labels(400), labels(400), labels(400), labels(400));
    let k = estimate_kappa(
        (&gaussian(400, 0.0, 5), &ys, &gaussian(400, 0.5, 6), &yt),
        (&gaussian(400, 0.0, 7), &es, &gaussian(400, 0.5, 8), &et),
        4,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let in_range = |r: &MetricsReport| {
        (0.0..=1.0).contains(&r.d_h)
            && (0.0..=2.0).contains(&r.kappa)
            && (0.0..=1.0).contains(&r.gamma_t)
            && (0.0..=1.0).contains(&r.gamma_d)
    };
    let violations = all.iter().filter(|r| !in_range(r)).count();
    let detail = format!(
        "same={same:.4} disjoint={disjoint:.4} kappa_shuffled={:.4} range_checked={} violations={violations}",
        k.kappa,
        all.len()
    );
    check(
        same < 0.1 && disjoint > 0.99 && (k.kappa - 1.5).abs() <= 0.1 && violations == 0,
        detail.clone(),
    )?;
    Ok(detail)
}

// ---- CLI reproducibility -------------------------------------------------

const CLI_CONFIG: &str = r#"schema = 1
seed = 11
seeds = 2
lambda_grid = [0.0, 0.25, 1.0]

[benchmark]
kind = "shape-texture"
samples_per_class = 8

[mixup]
lambda = 0.1
mode = "feature"

[vendor]
epochs = 2

[client]
epochs = 1

[metrics]
epochs = 30

[theorem]
samples = 20000

[insight]
lambda = 0.1
"#;

fn output_tables(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "gmxdata"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn c10_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("exp.toml");
    fs::write(&cfg, CLI_CONFIG).unwrap();
    let mut files = 0;
    for cmd in ["gen-data", "pipeline", "sweep", "metrics", "theorem"] {
        let mut outs = Vec::new();
        for rep in 0..2 {
            let out = tmp.path().join(format!("{cmd}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_genmix"))
                .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .output()
                .unwrap();
            check(
                status.status.code() == Some(0),
                format!(
                    "{cmd} exited {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ),
            )?;
            outs.push(output_tables(&out));
        }
        check(!outs[0].is_empty(), format!("{cmd} wrote no CSV"))?;
        check(outs[0] == outs[1], format!("{cmd} reruns differ"))?;
        files += outs[0].len();
    }
    Ok(format!("5 commands, {files} files byte-identical across reruns"))
}

fn run_criterion(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    // Written straight to the process stdout so the lines survive the
    // harness's output capture.
    let line = format!(
        "{tag} criterion {n:>2} {name} [{:.1}s]: {detail}\n",
        t.elapsed().as_secs_f64()
    );
    let _ = std::io::stdout().write_all(line.as_bytes());
    outcome.is_ok()
}

#[test]
fn acceptance_criteria() {
    let _ = std::io::stdout().write_all(b"\n");
    let mut reports = Vec::new();
    let results = [
        run_criterion(1, "mixup divergence bound", c1_theorem),
        run_criterion(2, "exact case decomposition", c2_cases),
        run_criterion(3, "monotone interpretation", c3_monotone),
        run_criterion(4, "endpoint identities", c4_endpoints),
        run_criterion(5, "gradient correctness", c5_gradients),
        run_criterion(6, "stop-gradient", c6_stop_gradient),
        run_criterion(7, "trade-off trend", || c7_tradeoff(&mut reports)),
        run_criterion(8, "divergence plus joint error", || c8_insight(&mut reports)),
        run_criterion(9, "metric calibration", || c9_calibration(&reports)),
        run_criterion(10, "reproducibility", c10_reproducibility),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    let _ = std::io::stdout().write_all(format!("acceptance: {passed}/10 criteria passed\n").as_bytes());
    assert_eq!(passed, 10, "acceptance criteria failed");
}
