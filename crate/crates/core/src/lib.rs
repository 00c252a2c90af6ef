//! Truncated variation of sampled càdlàg paths.
//!
//! The crate computes the upward, downward and total truncated variations
//! of a path, the finite-variation approximation `X^c` that stays within
//! `c` of the path, p-variation surrogates under three partition regimes,
//! and pathwise Stieltjes integrals against `X^c`. A Monte Carlo harness
//! sweeps `c` to study the limits of those integrals as `c ↓ 0`.

pub mod error;
pub mod generators;
pub mod harness;
pub mod path;
pub mod selftest;
pub mod stieltjes;
pub mod truncation;
pub mod variation;

pub use error::{Error, Result};
pub use generators::{generate, split_parts, GeneratedPath, GeneratorConfig, GeneratorKind, Jump};
pub use harness::{run_experiment, ExperimentConfig, ExperimentReport, TargetKind};
pub use path::{dyadic_partitions, Partition, SampledPath};
pub use truncation::{
    decompose, running_truncated_variations, truncated_path, truncated_variations,
    truncated_variations_bruteforce, TruncationLevel, TruncationResult,
};
