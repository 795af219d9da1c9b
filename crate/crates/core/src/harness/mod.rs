//! Experiment configuration, the end-to-end pipeline, Monte-Carlo sweeps and
//! result emission.

pub mod config;
pub mod oracle;
pub mod output;
pub mod pipeline;
pub mod sweep;

pub use config::ExperimentConfig;
pub use output::{aggregate, emit_results, AggregateRow};
pub use pipeline::{run_pipeline, Pipeline, PipelineOutput, SoiFallback};
pub use sweep::{sweep_snapshots, sweep_snr, trial_seed, SweepAxis, TrialResult, TrialTable};
