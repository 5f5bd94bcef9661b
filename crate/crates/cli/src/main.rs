//! `genmix` command-line driver.
//!
//! Every command reads a TOML experiment config, copies it verbatim into the
//! output directory and writes `manifest.json` next to its results.
//! Exit codes: 0 success, 1 assertion failure, 2 config/IO error, 3 theorem
//! assumption violated.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use genmix::experiment::{
    aggregate, aggregate_csv, run_pipeline_on, run_sweep, run_tradeoff, sha256_hex, AssertionOutcome, ExperimentConfig,
    FileEntry, RunManifest,
};
use genmix::metrics::{metrics_csv, MetricsReport};
use genmix::numerics::checkpoint::save_model;
use genmix::synthdata::io::{format_dataset, format_eval_labels};
use genmix::theoremlab::{insight2_check, verify_theorem1, SeedRun};
use genmix::Error;

#[derive(Parser, Debug)]
#[command(name = "genmix", version, about = "Generic-domain mixup experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write source/target datasets and the target label sidecar.
    GenData(CommonArgs),
    /// Vendor training, client adaptation and evaluation at `mixup.lambda`.
    Pipeline(CommonArgs),
    /// One pipeline per (λ, seed) with aggregated trade-off metrics.
    Sweep(CommonArgs),
    /// Trade-off curve on frozen vendor backbones.
    Metrics(CommonArgs),
    /// Monte-Carlo check of the mixup divergence inequality.
    Theorem(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Assumption { .. }) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.out.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
        let t = Instant::now();
        let v = f()?;
        self.manifest
            .timings_ms
            .push((label.to_string(), t.elapsed().as_millis()));
        Ok(v)
    }

    fn assert(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.manifest.assertions.push(AssertionOutcome {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

fn parse_config(raw: &str) -> CliResult<ExperimentConfig> {
    let de = toml::Deserializer::parse(raw).map_err(|e| Failure::Usage(format!("config syntax error: {e}")))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Failure::Usage(format!("invalid config at `{path}`: {}", e.inner().message().trim()))
    })
}

fn prepare(command: &str, args: &CommonArgs) -> CliResult<Run> {
    let raw = fs::read(&args.config).map_err(|e| Error::io(&args.config, e))?;
    let text = String::from_utf8(raw.clone())
        .map_err(|_| Failure::Usage(format!("{} is not UTF-8", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    let mut overrides = Vec::new();
    if let Some(s) = args.seed {
        cfg.seed = s;
        cfg.theorem.seed = s;
        overrides.push(format!("seed={s}"));
    }
    if let Some(n) = args.seeds {
        cfg.seeds = n;
        overrides.push(format!("seeds={n}"));
    }
    if let Some(g) = &args.lambda_grid {
        cfg.lambda_grid = g.clone();
        cfg.theorem.lambdas = g.clone();
        let cells: Vec<String> = g.iter().map(|l| l.to_string()).collect();
        overrides.push(format!("lambda_grid={}", cells.join(",")));
    }
    cfg.validate()?;
    if command == "theorem" {
        cfg.theorem.validate()?;
    }

    let out = match (&args.out, &cfg.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => PathBuf::from(o),
        (None, None) => {
            return Err(Failure::Usage(
                "no output directory: pass --out or set output_dir".into(),
            ))
        }
    };
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut run = Run {
        manifest: RunManifest {
            command: command.to_string(),
            config_hash: sha256_hex(&raw),
            seeds: if command == "theorem" {
                vec![cfg.theorem.seed]
            } else {
                cfg.seed_list()
            },
            overrides,
            ..RunManifest::default()
        },
        cfg,
        out,
    };
    run.write("config.toml", &raw)?;
    Ok(run)
}

fn finish(mut run: Run) -> CliResult<bool> {
    let path = run.out.join("manifest.json");
    run.manifest.files.sort_by(|a, b| a.path.cmp(&b.path));
    let json = serde_json::to_string_pretty(&run.manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    for a in &run.manifest.assertions {
        println!("{} {} {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("wrote {}", run.out.display());
    Ok(run.manifest.passed())
}

fn check_ranges(run: &mut Run, rows: &[MetricsReport]) {
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| {
            !((0.0..=1.0).contains(&r.d_h)
                && (0.0..=2.0).contains(&r.kappa)
                && (0.0..=1.0).contains(&r.gamma_t)
                && (0.0..=1.0).contains(&r.gamma_d))
        })
        .map(|r| format!("lambda={} seed={}", r.lambda, r.seed))
        .collect();
    let detail = if bad.is_empty() {
        format!("{} rows", rows.len())
    } else {
        bad.join("; ")
    };
    run.assert("metric-ranges", bad.is_empty(), detail);
}

fn gen_data(args: &CommonArgs) -> CliResult<bool> {
    let mut run = prepare("gen-data", args)?;
    let benchmark = run.cfg.benchmark.clone();
    for s in run.cfg.seed_list() {
        let data = run.time(&format!("generate/{s}"), || {
            Ok(benchmark.generate(ExperimentConfig::data_seed(s))?)
        })?;
        run.write(&format!("source-{s}.gmxdata"), format_dataset(&data.source).as_bytes())?;
        run.write(&format!("target-{s}.gmxdata"), format_dataset(&data.target).as_bytes())?;
        run.write(
            &format!("target-labels-{s}.csv"),
            format_eval_labels(&data.target_labels).as_bytes(),
        )?;
    }
    finish(run)
}

fn pipeline(args: &CommonArgs) -> CliResult<bool> {
    let mut run = prepare("pipeline", args)?;
    let cfg = run.cfg.clone();
    let lambda = cfg.mixup.lambda;
    let mut rows = Vec::new();
    let mut summary = String::from("seed,lambda,mode,pre_target_acc,post_target_acc\n");
    for s in cfg.seed_list() {
        let data = run.time(&format!("data/{s}"), || Ok(cfg.data_for(s)?))?;
        let r = run.time(&format!("pipeline/{s}"), || {
            Ok(run_pipeline_on(&cfg, &data, s, lambda, true)?)
        })?;
        run.write(&format!("vendor-log-{s}.csv"), r.vendor_log.to_csv().as_bytes())?;
        run.write(&format!("client-log-{s}.csv"), r.client_log.to_csv().as_bytes())?;
        for (name, model) in [("vendor", &r.vendor_model), ("adapted", &r.adapted_model)] {
            let file = format!("{name}-{s}.ckpt");
            let path = run.out.join(&file);
            save_model(&model.net, &path)?;
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            run.manifest.files.push(FileEntry {
                path: file,
                sha256: sha256_hex(&bytes),
            });
        }
        summary.push_str(&format!(
            "{s},{lambda:.6},{},{:.6},{:.6}\n",
            cfg.mixup.mode.as_str(),
            r.pre_target_acc,
            r.post_target_acc
        ));
        let floor = cfg.vendor.source_acc_floor;
        let warnings = r.vendor_log.warnings.join("; ");
        run.assert(
            format!("vendor-source-floor/{s}"),
            r.vendor_log.warnings.is_empty(),
            if warnings.is_empty() {
                format!("floor {floor}")
            } else {
                warnings
            },
        );
        rows.push(r.metrics.expect("metrics requested"));
    }
    check_ranges(&mut run, &rows);
    run.write("metrics.csv", metrics_csv(&rows).as_bytes())?;
    run.write("accuracy.csv", summary.as_bytes())?;
    print!("{summary}");
    finish(run)
}

fn sweep(args: &CommonArgs) -> CliResult<bool> {
    let mut run = prepare("sweep", args)?;
    let cfg = run.cfg.clone();
    let rows = run.time("sweep", || Ok(run_sweep(&cfg)?))?;
    check_ranges(&mut run, &rows);
    let agg = aggregate_csv(&aggregate(&rows));
    run.write("sweep.csv", metrics_csv(&rows).as_bytes())?;
    run.write("sweep_summary.csv", agg.as_bytes())?;
    print!("{agg}");
    finish(run)
}

fn metrics(args: &CommonArgs) -> CliResult<bool> {
    let mut run = prepare("metrics", args)?;
    let cfg = run.cfg.clone();
    let rows = run.time("tradeoff", || Ok(run_tradeoff(&cfg)?))?;
    check_ranges(&mut run, &rows);
    let agg = aggregate_csv(&aggregate(&rows));
    run.write("tradeoff.csv", metrics_csv(&rows).as_bytes())?;
    run.write("tradeoff_summary.csv", agg.as_bytes())?;
    print!("{agg}");
    finish(run)
}

fn theorem(args: &CommonArgs) -> CliResult<bool> {
    let mut run = prepare("theorem", args)?;
    let cfg = run.cfg.clone();
    let report = run.time("theorem", || Ok(verify_theorem1(&cfg.theorem)?))?;
    let mut summary = report.summary();
    for a in &report.assertions {
        run.assert(format!("{}/{}", a.name, a.lambda), a.pass, a.detail.clone());
    }
    run.write("theorem.csv", report.to_csv().as_bytes())?;

    if let Some(ins) = &cfg.insight {
        let report = run.time("insight", || {
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
                .collect::<genmix::Result<Vec<_>>>()?;
            Ok(insight2_check(
                &runs,
                &cfg.vendor,
                ins.mode,
                ins.lambda,
                &cfg.metrics,
                ins.tolerance,
            )?)
        })?;
        summary.push_str(&report.summary());
        let detail = format!(
            "mixup={:.6} original={:.6} diff={:.6} tol={}",
            report.mixup_side, report.original_side, report.difference, report.tolerance
        );
        run.assert(format!("insight2/{}", report.lambda), report.pass, detail);
        let pairs: Vec<MetricsReport> = report.rows.iter().flat_map(|(m, b)| [m.clone(), b.clone()]).collect();
        run.write("insight.csv", metrics_csv(&pairs).as_bytes())?;
    }
    run.write("theorem_summary.txt", summary.as_bytes())?;
    finish(run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenData(a) => gen_data(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Sweep(a) => sweep(a),
        Command::Metrics(a) => metrics(a),
        Command::Theorem(a) => theorem(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("genmix: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
