//! Monte-Carlo checks of the mixup divergence theorem on 1-D Gaussians, and
//! the empirical divergence-plus-joint-error inequality on benchmarks.

pub mod cases;
pub mod insight;
pub mod setup;
pub mod verify;

pub use cases::{direct_positive_count, exact_case_decomposition, zeta, zeta_counts, CaseTableCounts};
pub use insight::{insight2_check, Insight2Report, SeedRun};
pub use setup::{mc_phi, optimal_threshold, Gaussian1d, Independence, LinearFd, TheoremSetup, MIN_MC_SAMPLES};
pub use verify::{
    verify_theorem1, Assertion, LambdaRow, TheoremReport, GENERIC_INSEPARABLE, PERFECT_SEPARATION, THEOREM_HEADER,
};
