//! Seeded, order-independent ensembles over Haar-random targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::qpt::qpt_trial;
use crate::spsa::{run_learning_recorded, TraceRecord};
use crate::su2::{haar_random_su2, Su2Params, Unitary2};

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i`: `splitmix64(master ^ splitmix64(i))`.
///
/// Pure integer arithmetic, so identical on every platform. The trial's
/// ChaCha8 stream is seeded from this value with `seed_from_u64`.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial as u64))
}

pub fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial))
}

/// Raw outcome of one target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    /// Learner's final estimate; absent for the baseline.
    pub final_params: Option<Su2Params>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub iteration: u64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Median and interquartile range per recorded iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub rows: Vec<StatsRow>,
}

impl EnsembleStats {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&StatsRow> {
        self.rows.last()
    }

    pub fn at_iteration(&self, k: u64) -> Option<&StatsRow> {
        self.rows.iter().find(|r| r.iteration == k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleOutput {
    pub config: ExperimentConfig,
    pub stats: EnsembleStats,
    pub trials: Vec<TrialOutcome>,
}

/// Quantile by linear interpolation between order statistics of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Aggregates traces that share the same recorded iterations.
pub fn aggregate(trials: &[TrialOutcome]) -> Result<EnsembleStats> {
    let Some(first) = trials.first() else {
        return Err(Error::Config("no trials to aggregate".into()));
    };
    let points: Vec<u64> = first.records.iter().map(|r| r.iteration).collect();
    for t in trials {
        if t.records.len() != points.len() || t.records.iter().zip(&points).any(|(r, &k)| r.iteration != k) {
            return Err(Error::Config(format!(
                "trial {} has a mismatched trace layout",
                t.trial
            )));
        }
    }
    let mut column = Vec::with_capacity(trials.len());
    let rows = points
        .iter()
        .enumerate()
        .map(|(idx, &iteration)| {
            column.clear();
            column.extend(trials.iter().map(|t| t.records[idx].infidelity));
            column.sort_by(f64::total_cmp);
            StatsRow {
                iteration,
                median: quantile_sorted(&column, 0.5),
                q25: quantile_sorted(&column, 0.25),
                q75: quantile_sorted(&column, 0.75),
            }
        })
        .collect();
    Ok(EnsembleStats { rows })
}

/// Haar target of trial `i`: the first draw from the trial's stream.
pub fn trial_target(master_seed: u64, trial: usize) -> Unitary2 {
    haar_random_su2(&mut trial_rng(master_seed, trial))
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialOutcome> {
    let seed = trial_seed(cfg.master_seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = haar_random_su2(&mut rng);
    match cfg.mode {
        Mode::Sgqpt => {
            let trace = run_learning_recorded(
                &target,
                cfg.init,
                &cfg.schedule,
                cfg.iterations,
                cfg.shots,
                &cfg.noise,
                cfg.spacing,
                &mut rng,
            )?;
            Ok(TrialOutcome {
                trial,
                seed,
                records: trace.records,
                final_params: Some(trace.final_params),
            })
        }
        Mode::QptBaseline => {
            let photons = cfg.total_photons_per_trial();
            let infidelity = qpt_trial(&target, photons, &cfg.noise, &mut rng)?;
            Ok(TrialOutcome {
                trial,
                seed,
                // One point, placed at the learner iteration with the same photon count.
                records: vec![TraceRecord {
                    iteration: cfg.iterations,
                    infidelity,
                    shots: photons,
                }],
                final_params: None,
            })
        }
    }
}

/// Runs every trial (in parallel on the current rayon pool) and aggregates.
///
/// The output depends only on `cfg`; thread count and scheduling order do not matter.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<EnsembleOutput> {
    cfg.validate()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            run_trial(cfg, i).map_err(|e| Error::Trial {
                trial: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = aggregate(&trials)?;
    Ok(EnsembleOutput {
        config: cfg.clone(),
        stats,
        trials,
    })
}
