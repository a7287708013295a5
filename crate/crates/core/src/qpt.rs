//! Standard process tomography baseline for unitary targets.
//!
//! Six Pauli-eigenstate probes are each measured in the three Pauli bases.
//! The unitary is recovered by fitting the rotation that best maps probe
//! Bloch vectors onto the estimated outputs, then lifting it to SU(2).

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{realize_control, NoiseModel};
use crate::su2::{
    bloch_rotation, fidelity_unchecked, nearest_rotation, so3_to_su2, su2_from_params_unchecked, Su2Params, Unitary2,
};

pub const NUM_PROBES: usize = 6;
pub const NUM_BASES: usize = 3;
pub const NUM_SETTINGS: u64 = (NUM_PROBES * NUM_BASES) as u64;

/// Probe Bloch vectors in canonical order `+x, -x, +y, -y, +z, -z`.
pub const PROBES: [[f64; 3]; NUM_PROBES] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// Per-probe expectation values of `sigma_x, sigma_y, sigma_z` on the output.
pub type Expectations = [[f64; NUM_BASES]; NUM_PROBES];

/// Observed `+1` counts for each (probe, basis) setting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomogramData {
    pub n_setting: u64,
    pub counts: [[u64; NUM_BASES]; NUM_PROBES],
}

impl TomogramData {
    pub fn photons_used(&self) -> u64 {
        self.n_setting * NUM_SETTINGS
    }

    /// Frequency estimates `2 k / n - 1`.
    pub fn expectations(&self) -> Expectations {
        let n = self.n_setting as f64;
        self.counts.map(|row| row.map(|k| 2.0 * k as f64 / n - 1.0))
    }

    fn validate(&self) -> Result<()> {
        if self.n_setting == 0 {
            return Err(Error::Reconstruction("zero photons per setting".into()));
        }
        if self.counts.iter().flatten().any(|&k| k > self.n_setting) {
            return Err(Error::Reconstruction("count exceeds photons per setting".into()));
        }
        Ok(())
    }
}

/// Unitary that rotates the `basis` axis onto `z` before a computational-basis projection.
pub fn basis_change(basis: usize) -> Unitary2 {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    match basis {
        // R_y(-pi/2): x -> z
        0 => su2_from_params_unchecked(Su2Params::new(FRAC_PI_4, FRAC_PI_2, FRAC_PI_2)),
        // R_x(pi/2): y -> z
        1 => su2_from_params_unchecked(Su2Params::new(-FRAC_PI_4, FRAC_PI_2, 0.0)),
        2 => Unitary2::identity(),
        _ => panic!("basis index {basis} out of range"),
    }
}

fn probe(i: usize) -> Vector3<f64> {
    Vector3::from(PROBES[i])
}

/// Noiseless expectations for `u_true`.
pub fn exact_expectations(u_true: &Unitary2) -> Expectations {
    let r = bloch_rotation(u_true);
    std::array::from_fn(|i| {
        let out = r * probe(i);
        [out[0], out[1], out[2]]
    })
}

/// Simulates the 18-setting experiment with an even photon split.
///
/// Under jitter, each setting's basis-change unitary is realized through
/// freshly jittered waveplates; probe preparation is exact.
pub fn simulate_qpt_counts<R: Rng + ?Sized>(
    u_true: &Unitary2,
    total_photons: u64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<TomogramData> {
    if total_photons < NUM_SETTINGS {
        return Err(Error::Budget {
            given: total_photons,
            required: NUM_SETTINGS,
        });
    }
    u_true.ensure_unitary()?;
    noise.validate()?;
    let n_setting = total_photons / NUM_SETTINGS;
    let r_true = bloch_rotation(u_true);
    let bases: [Unitary2; NUM_BASES] = std::array::from_fn(basis_change);

    let mut counts = [[0u64; NUM_BASES]; NUM_PROBES];
    for (i, row) in counts.iter_mut().enumerate() {
        let out = r_true * probe(i);
        for (j, count) in row.iter_mut().enumerate() {
            let expectation = match noise {
                NoiseModel::Ideal => out[j],
                NoiseModel::WaveplateJitter { .. } => {
                    let b = realize_control(&bases[j], noise, rng)?;
                    (bloch_rotation(&b) * out)[2]
                }
            };
            let p = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
            *count = rand_distr::Distribution::sample(
                &rand_distr::Binomial::new(n_setting, p).expect("clamped probability"),
                rng,
            );
        }
    }
    Ok(TomogramData { n_setting, counts })
}

/// Procrustes fit of the probe-to-output rotation, lifted to SU(2).
pub fn reconstruct_from_expectations(expectations: &Expectations) -> Result<Unitary2> {
    let mut cross = Matrix3::zeros();
    for (i, e) in expectations.iter().enumerate() {
        cross += Vector3::from(*e) * probe(i).transpose();
    }
    let r = nearest_rotation(&cross).map_err(|e| Error::Reconstruction(e.to_string()))?;
    so3_to_su2(&r)
}

pub fn reconstruct_unitary(data: &TomogramData) -> Result<Unitary2> {
    data.validate()?;
    reconstruct_from_expectations(&data.expectations())
}

/// Infidelity of the tomographic estimate of `u_true`.
pub fn qpt_trial<R: Rng + ?Sized>(
    u_true: &Unitary2,
    total_photons: u64,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<f64> {
    let data = simulate_qpt_counts(u_true, total_photons, noise, rng)?;
    let estimate = reconstruct_unitary(&data)?;
    Ok(1.0 - fidelity_unchecked(u_true, &estimate))
}
