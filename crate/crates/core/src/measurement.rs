//! Simulated Bell-measurement experiment with finite shots and optional
//! waveplate jitter on the learning control.

use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su2::{decompose_to_waveplates, fidelity_unchecked, waveplate_compose, Unitary2, WaveplateTriple};

/// How a requested control is physically realized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    Ideal,
    /// Each plate angle receives an independent uniform error in `(-epsilon_deg, epsilon_deg)`.
    WaveplateJitter {
        epsilon_deg: f64,
    },
}

impl NoiseModel {
    pub fn jitter(epsilon_deg: f64) -> Result<Self> {
        let m = NoiseModel::WaveplateJitter { epsilon_deg };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Ideal => Ok(()),
            NoiseModel::WaveplateJitter { epsilon_deg } if epsilon_deg.is_finite() && epsilon_deg >= 0.0 => Ok(()),
            NoiseModel::WaveplateJitter { epsilon_deg } => Err(Error::InvalidParameter(format!(
                "jitter half-width must be finite and nonnegative, got {epsilon_deg}"
            ))),
        }
    }

    pub fn epsilon_deg(&self) -> Option<f64> {
        match *self {
            NoiseModel::Ideal => None,
            NoiseModel::WaveplateJitter { epsilon_deg } => Some(epsilon_deg),
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Ideal => write!(f, "ideal"),
            NoiseModel::WaveplateJitter { epsilon_deg } => write!(f, "jitter({epsilon_deg} deg)"),
        }
    }
}

/// Number of repeated measurements per probability estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct ShotBudget(NonZeroU64);

impl ShotBudget {
    pub fn new(n: u64) -> Result<Self> {
        NonZeroU64::new(n)
            .map(Self)
            .ok_or_else(|| Error::InvalidParameter("shot budget must be at least 1".into()))
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }
}

impl TryFrom<u64> for ShotBudget {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ShotBudget> for u64 {
    fn from(s: ShotBudget) -> u64 {
        s.get()
    }
}

impl FromStr for ShotBudget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n: u64 = s
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("shot budget {s:?}: {e}")))?;
        Self::new(n)
    }
}

/// Adds an independent uniform `(-eps, eps)` error to each plate angle.
pub fn jitter_triple<R: Rng + ?Sized>(w: WaveplateTriple, epsilon_deg: f64, rng: &mut R) -> WaveplateTriple {
    let mut draw = || {
        if epsilon_deg > 0.0 {
            rng.random_range(-epsilon_deg..epsilon_deg)
        } else {
            0.0
        }
    };
    let (dq1, dh, dq2) = (draw(), draw(), draw());
    WaveplateTriple::new(w.q1 + dq1, w.h + dh, w.q2 + dq2)
}

/// The unitary actually applied when `v_requested` is dialled in under `noise`.
pub fn realize_control<R: Rng + ?Sized>(v_requested: &Unitary2, noise: &NoiseModel, rng: &mut R) -> Result<Unitary2> {
    match *noise {
        NoiseModel::Ideal => Ok(*v_requested),
        NoiseModel::WaveplateJitter { epsilon_deg } => {
            let w = decompose_to_waveplates(v_requested)?;
            Ok(waveplate_compose(jitter_triple(w, epsilon_deg, rng)))
        }
    }
}

/// Draws `k ~ Binomial(n, p)` and returns `k / n`.
pub fn sample_frequency<R: Rng + ?Sized>(p: f64, shots: ShotBudget, rng: &mut R) -> f64 {
    let n = shots.get();
    let p = p.clamp(0.0, 1.0);
    let k = Binomial::new(n, p).expect("probability clamped to [0, 1]").sample(rng);
    k as f64 / n as f64
}

/// Finite-shot estimate of the Bell-outcome probability for control `v_requested`.
///
/// The control is re-realized (fresh jitter) on every call; `u_true` is exact.
pub fn measure_overlap<R: Rng + ?Sized>(
    u_true: &Unitary2,
    v_requested: &Unitary2,
    shots: ShotBudget,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<f64> {
    let realized = realize_control(v_requested, noise, rng)?;
    let p = fidelity_unchecked(u_true, &realized);
    Ok(sample_frequency(p, shots, rng))
}
