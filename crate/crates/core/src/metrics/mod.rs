//! Bound-term estimators and trade-off metrics.

pub mod bounds;
pub mod probe;
pub mod tradeoff;

pub use bounds::{
    binomial_stderr, estimate_dh, estimate_kappa, fit_domain_classifier, gammas, metrics_csv, KappaEstimate,
    MetricsReport, METRICS_HEADER,
};
pub use probe::{DomainClassifierConfig, HypothesisFamily, ProbeClassifier};
pub use tradeoff::{frozen_metrics, tradeoff_curve, LabeledDomains};
