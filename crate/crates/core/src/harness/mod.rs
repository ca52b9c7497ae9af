//! Experiment orchestration: datasets, training repeats, four-speaker
//! evaluation, word-shift reports, lambda sweeps and export.

mod config;
mod eval;
mod experiment;
mod report;

pub use config::{Disparity, ExperimentConfig};
pub use eval::{evaluate_speaker, Slice, SliceCounts, SpeakerEvaluation, SpeakerKind};
pub use experiment::{
    evaluate_repeats, lambda_sweep, load_policies, prepare_dataset, run_experiment, train_repeats,
    write_checkpoints, write_outputs, write_reports, write_sweep, ExperimentOutcome,
    DEFAULT_RATIO_GRID,
};
pub use report::{
    export, format_sig6, gain_report, token_shares, AccuracyReport, AccuracyRow, ExportFormat,
    GainReport, GainRow, LambdaSweepReport, Report, ShiftReport, SpeakerShift, Stat, SweepPoint,
    TokenShare,
};
