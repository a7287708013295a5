//! Reproduction driver: ensembles, aggregation, power-law fits, export and plots.

pub mod config;
pub mod ensemble;
pub mod export;
pub mod fit;
pub mod plot;

pub use config::{ExperimentConfig, Mode, Preset};
pub use ensemble::{
    aggregate, quantile_sorted, run_ensemble, trial_rng, trial_seed, trial_target, EnsembleOutput, EnsembleStats,
    StatsRow, TrialOutcome,
};
pub use export::{export_results, read_stats_csv, read_summary, write_stats_csv, ExportedFiles, Summary};
pub use fit::{fit_power_law, FitWindow, PowerLawFit};
pub use plot::{emit_plot, PlotSeries};
