//! Jones matrices for rotated quarter- and half-wave plates and the
//! QWP-HWP-QWP gadget that realizes any SU(2) polarization transform.
//!
//! Convention: a retarder with fast-axis angle `t` is `R(t) diag(1, d) R(-t)`
//! with `d = i` (QWP) or `d = -1` (HWP). The gadget determinant is exactly one.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Unitary2, ONE};
use crate::error::{Error, Result};

/// Plate angles in degrees; light traverses `q1`, then `h`, then `q2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveplateTriple {
    pub q1: f64,
    pub h: f64,
    pub q2: f64,
}

impl WaveplateTriple {
    pub const fn new(q1: f64, h: f64, q2: f64) -> Self {
        Self { q1, h, q2 }
    }

    fn to_array(self) -> [f64; 3] {
        [self.q1, self.h, self.q2]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Residual accepted for a decomposition, in phase-equivalent Frobenius norm.
pub const DECOMPOSITION_TOL: f64 = 1e-8;

const QWP_RETARDANCE: Complex64 = Complex64::new(0.0, 1.0);
const HWP_RETARDANCE: Complex64 = Complex64::new(-1.0, 0.0);

fn retarder(angle_deg: f64, d: Complex64) -> Unitary2 {
    let (s2, c2) = (2.0 * angle_deg.to_radians()).sin_cos();
    let mean = (ONE + d) * 0.5;
    let half = (ONE - d) * 0.5;
    Unitary2::from_raw([[mean + half * c2, half * s2], [half * s2, mean - half * c2]])
}

/// Derivative of [`retarder`] with respect to the angle in degrees.
fn retarder_derivative(angle_deg: f64, d: Complex64) -> Unitary2 {
    let (s2, c2) = (2.0 * angle_deg.to_radians()).sin_cos();
    let k = (ONE - d) * 1f64.to_radians();
    Unitary2::from_raw([[-k * s2, k * c2], [k * c2, k * s2]])
}

pub fn qwp_matrix(angle_deg: f64) -> Unitary2 {
    retarder(angle_deg, QWP_RETARDANCE)
}

pub fn hwp_matrix(angle_deg: f64) -> Unitary2 {
    retarder(angle_deg, HWP_RETARDANCE)
}

/// `QWP(q2) HWP(h) QWP(q1)`.
pub fn waveplate_compose(w: WaveplateTriple) -> Unitary2 {
    qwp_matrix(w.q2) * hwp_matrix(w.h) * qwp_matrix(w.q1)
}

const GRID_STEPS: usize = 6;
const GRID_SPACING: f64 = 180.0 / GRID_STEPS as f64;
const MAX_STARTS: usize = 24;
const MAX_LM_ITERS: usize = 200;

fn start_grid() -> &'static [(WaveplateTriple, Unitary2)] {
    static GRID: OnceLock<Vec<(WaveplateTriple, Unitary2)>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut grid = Vec::with_capacity(GRID_STEPS.pow(3));
        for i in 0..GRID_STEPS {
            for j in 0..GRID_STEPS {
                for k in 0..GRID_STEPS {
                    let w = WaveplateTriple::new(
                        (i as f64 + 0.5) * GRID_SPACING,
                        (j as f64 + 0.5) * GRID_SPACING,
                        (k as f64 + 0.5) * GRID_SPACING,
                    );
                    grid.push((w, waveplate_compose(w)));
                }
            }
        }
        grid
    })
}

/// Finds plate angles whose composition equals `v` up to a global phase.
///
/// Multi-start Levenberg-Marquardt on the eight real components of
/// `compose(angles) - s v'`, where `v'` is `v` rescaled to unit determinant
/// and `s = +-1` picks the nearer sheet of the double cover.
pub fn decompose_to_waveplates(v: &Unitary2) -> Result<WaveplateTriple> {
    v.ensure_unitary()?;
    let det = v.det();
    let target = v.with_phase(-0.5 * det.arg());

    let mut starts: Vec<(f64, &(WaveplateTriple, Unitary2))> = start_grid()
        .iter()
        .map(|entry| (target.inner(&entry.1).norm(), entry))
        .collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = (f64::INFINITY, WaveplateTriple::new(0.0, 0.0, 0.0));
    for (_, (w0, m0)) in starts.iter().take(MAX_STARTS) {
        let sign = if target.inner(m0).re >= 0.0 { 1.0 } else { -1.0 };
        let signed = target.with_phase(if sign > 0.0 { 0.0 } else { std::f64::consts::PI });
        let w = levenberg_marquardt(&signed, *w0);
        let residual = v.phase_distance(&waveplate_compose(w));
        if residual < best.0 {
            best = (residual, w);
        }
        if best.0 <= DECOMPOSITION_TOL * 1e-2 {
            break;
        }
    }
    if best.0 <= DECOMPOSITION_TOL {
        Ok(canonicalize(best.1))
    } else {
        Err(Error::DecompositionFailed { residual: best.0 })
    }
}

fn canonicalize(w: WaveplateTriple) -> WaveplateTriple {
    // Each plate is 180-degree periodic as a matrix.
    let wrap = |a: f64| a.rem_euclid(180.0);
    WaveplateTriple::new(wrap(w.q1), wrap(w.h), wrap(w.q2))
}

fn residual_vector(target: &Unitary2, m: &Unitary2) -> [f64; 8] {
    let mut r = [0.0; 8];
    for (idx, (a, b)) in m
        .entries()
        .iter()
        .flatten()
        .zip(target.entries().iter().flatten())
        .enumerate()
    {
        let d = a - b;
        r[2 * idx] = d.re;
        r[2 * idx + 1] = d.im;
    }
    r
}

fn jacobian(w: WaveplateTriple) -> [[f64; 3]; 8] {
    let (q1, h, q2) = (qwp_matrix(w.q1), hwp_matrix(w.h), qwp_matrix(w.q2));
    let cols = [
        q2 * h * retarder_derivative(w.q1, QWP_RETARDANCE),
        q2 * retarder_derivative(w.h, HWP_RETARDANCE) * q1,
        retarder_derivative(w.q2, QWP_RETARDANCE) * h * q1,
    ];
    let mut j = [[0.0; 3]; 8];
    for (c, d) in cols.iter().enumerate() {
        for (idx, z) in d.entries().iter().flatten().enumerate() {
            j[2 * idx][c] = z.re;
            j[2 * idx + 1][c] = z.im;
        }
    }
    j
}

fn cost(r: &[f64; 8]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn levenberg_marquardt(target: &Unitary2, start: WaveplateTriple) -> WaveplateTriple {
    let mut w = start;
    let mut r = residual_vector(target, &waveplate_compose(w));
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..MAX_LM_ITERS {
        if c < 1e-30 {
            break;
        }
        let j = jacobian(w);
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (row, ri) in j.iter().zip(r.iter()) {
            for a in 0..3 {
                jtr[a] += row[a] * ri;
                for b in 0..3 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..16 {
            let mut damped = jtj;
            for a in 0..3 {
                damped[(a, a)] += lambda * (jtj[(a, a)] + 1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = w.to_array();
            for (t, s) in trial.iter_mut().zip(step.iter()) {
                *t += s;
            }
            let trial = WaveplateTriple::from_array(trial);
            let tr = residual_vector(target, &waveplate_compose(trial));
            let tc = cost(&tr);
            if tc < c {
                let small = step.norm() < 1e-14;
                w = trial;
                r = tr;
                c = tc;
                lambda = (lambda / 3.0).max(1e-15);
                improved = !small;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    w
}
