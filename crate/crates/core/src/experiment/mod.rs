//! Config-driven experiments tying the modules together.

pub mod config;
pub mod manifest;
pub mod run;

pub use config::{
    sha256_hex, BenchmarkData, BenchmarkSpec, DatasetPaths, ExperimentConfig, InsightConfig, SCHEMA_VERSION,
};
pub use manifest::{AssertionOutcome, FileEntry, RunManifest};
pub use run::{
    aggregate, aggregate_csv, run_pipeline, run_pipeline_on, run_sweep, run_tradeoff, AggregateRow, PipelineResult,
    AGGREGATE_HEADER,
};
