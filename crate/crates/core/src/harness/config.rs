use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{NoiseModel, ShotBudget};
use crate::spsa::{GainSchedule, RecordSpacing};
use crate::su2::Su2Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Sgqpt,
    QptBaseline,
}

/// Everything needed to reproduce an ensemble bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Number of Haar-random targets.
    pub trials: usize,
    pub iterations: u64,
    /// Shots `N` per probability estimate.
    pub shots: ShotBudget,
    /// Baseline photon budget per target; defaults to `2 N iterations`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photons: Option<u64>,
    pub schedule: GainSchedule,
    pub noise: NoiseModel,
    #[serde(default)]
    pub init: Su2Params,
    pub master_seed: u64,
    #[serde(default)]
    pub spacing: RecordSpacing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Named parameter sets for the standard reproduction runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Noiseless scaling: gamma 0.42, alpha 0.92, N = 1000, 1e5 iterations, 100 targets.
    NoiselessScaling,
    /// Jittered scaling: gamma 0.21, alpha 0.94, N = 1000.
    JitterScaling,
    /// Short experiment: gamma 0.06, alpha 0.85, N = 100, 50 iterations, 20 targets.
    ShortRun,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::NoiselessScaling => Self {
                mode: Mode::Sgqpt,
                trials: 100,
                iterations: 100_000,
                shots: ShotBudget::new(1000).expect("nonzero"),
                photons: None,
                schedule: GainSchedule::noiseless_preset(),
                noise: NoiseModel::Ideal,
                init: Su2Params::default_initial(),
                master_seed: 0,
                spacing: RecordSpacing::Log { per_decade: 20 },
                output: None,
            },
            Preset::JitterScaling => Self {
                schedule: GainSchedule::jitter_preset(),
                noise: NoiseModel::WaveplateJitter { epsilon_deg: 1.0 },
                iterations: 10_000,
                trials: 50,
                ..Self::preset(Preset::NoiselessScaling)
            },
            Preset::ShortRun => Self {
                mode: Mode::Sgqpt,
                trials: 20,
                iterations: 50,
                shots: ShotBudget::new(100).expect("nonzero"),
                photons: None,
                schedule: GainSchedule::short_run_preset(),
                noise: NoiseModel::Ideal,
                init: Su2Params::default_initial(),
                master_seed: 0,
                spacing: RecordSpacing::Every { stride: 1 },
                output: None,
            },
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        self.schedule.validate()?;
        self.noise.validate()?;
        self.spacing.validate()?;
        if !self.init.is_finite() {
            return Err(Error::Config("initial parameters must be finite".into()));
        }
        if self.mode == Mode::QptBaseline && self.total_photons_per_trial() < crate::qpt::NUM_SETTINGS {
            return Err(Error::Budget {
                given: self.total_photons_per_trial(),
                required: crate::qpt::NUM_SETTINGS,
            });
        }
        Ok(())
    }

    /// Photons spent on one target: `2 N iterations` for the learner, or the baseline budget.
    pub fn total_photons_per_trial(&self) -> u64 {
        match self.mode {
            Mode::Sgqpt => 2 * self.shots.get() * self.iterations,
            Mode::QptBaseline => self.photons.unwrap_or(2 * self.shots.get() * self.iterations),
        }
    }

    pub fn total_shots(&self) -> u64 {
        self.total_photons_per_trial() * self.trials as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in [Preset::NoiselessScaling, Preset::JitterScaling, Preset::ShortRun] {
            ExperimentConfig::preset(p).validate().unwrap();
        }
        let s = ExperimentConfig::preset(Preset::ShortRun);
        assert_eq!(s.total_photons_per_trial(), 10_000);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::preset(Preset::JitterScaling);
        cfg.output = Some("out/dir".into());
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn hand_written_toml() {
        let text = r#"
            mode = "qpt-baseline"
            trials = 20
            iterations = 50
            shots = 100
            master_seed = 7
            [schedule]
            delta0 = 0.2
            g0 = 2.0
            a_stability = 0.0
            gamma = 0.06
            alpha_exp = 0.85
            [noise]
            kind = "waveplate_jitter"
            epsilon_deg = 6.0
        "#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.mode, Mode::QptBaseline);
        assert_eq!(cfg.noise.epsilon_deg(), Some(6.0));
        assert_eq!(cfg.init, Su2Params::default_initial());
        assert_eq!(cfg.total_shots(), 20 * 10_000);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = ExperimentConfig::preset(Preset::ShortRun);
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset(Preset::ShortRun);
        cfg.mode = Mode::QptBaseline;
        cfg.photons = Some(10);
        assert!(matches!(cfg.validate(), Err(Error::Budget { .. })));
        assert!(ExperimentConfig::from_toml_str("mode = \"sgqpt\"").is_err());
        assert!(ExperimentConfig::from_toml_str("shots = 0").is_err());
    }
}
