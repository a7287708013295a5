//! Exact single-qubit kernel: the axis-angle parameterization of SU(2),
//! process fidelity, Haar sampling, waveplate optics and the SO(3)
//! utilities used by the tomography baseline.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod rotation;
mod waveplate;

pub use rotation::{bloch_rotation, nearest_rotation, so3_to_su2, Rotation3};
pub use waveplate::{decompose_to_waveplates, hwp_matrix, qwp_matrix, waveplate_compose, WaveplateTriple};

/// Tolerance used when validating externally supplied unitaries.
pub const UNITARY_INPUT_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Axis-angle coordinates `(alpha, theta, phi)` of `exp(i alpha n(theta, phi) . sigma)`.
///
/// The coordinates double as the vector space in which SPSA perturbations,
/// gradient estimates and updates are taken. No range restriction applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su2Params {
    pub alpha: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Su2Params {
    pub const fn new(alpha: f64, theta: f64, phi: f64) -> Self {
        Self { alpha, theta, phi }
    }

    /// The conventional starting point `(pi/4, pi/2, pi)`.
    pub const fn default_initial() -> Self {
        Self::new(
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::PI,
        )
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.theta, self.phi]
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.theta.is_finite() && self.phi.is_finite()
    }

    /// Unit rotation axis `(sin t cos p, sin t sin p, cos t)`.
    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn norm(&self) -> f64 {
        (self.alpha * self.alpha + self.theta * self.theta + self.phi * self.phi).sqrt()
    }
}

impl Default for Su2Params {
    fn default() -> Self {
        Self::default_initial()
    }
}

impl Add for Su2Params {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.alpha + o.alpha, self.theta + o.theta, self.phi + o.phi)
    }
}

impl Sub for Su2Params {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.alpha - o.alpha, self.theta - o.theta, self.phi - o.phi)
    }
}

impl Neg for Su2Params {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.alpha, -self.theta, -self.phi)
    }
}

impl Mul<f64> for Su2Params {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.alpha * s, self.theta * s, self.phi * s)
    }
}

/// A 2x2 unitary matrix, stored row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2([[Complex64; 2]; 2]);

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "Unitary2[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Unitary2 {
    /// Validates unitarity to [`UNITARY_INPUT_TOL`].
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = Self(entries);
        u.ensure_unitary()?;
        Ok(u)
    }

    /// Wraps entries known to be unitary by construction.
    pub(crate) const fn from_raw(entries: [[Complex64; 2]; 2]) -> Self {
        Self(entries)
    }

    pub const fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn pauli_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn pauli_y() -> Self {
        Self([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn pauli_z() -> Self {
        Self([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]])
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Multiplies by the global phase `exp(i phase)`.
    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        self.map(|z| z * p)
    }

    /// `tr(self^dagger other)` without forming the product.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let (a, b) = (&self.0, &other.0);
        a[0][0].conj() * b[0][0] + a[1][0].conj() * b[1][0] + a[0][1].conj() * b[0][1] + a[1][1].conj() * b[1][1]
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint() * *self;
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c { ONE } else { ZERO };
                dev = dev.max((p.0[r][c] - target).norm());
            }
        }
        dev
    }

    pub(crate) fn ensure_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation.is_finite() && deviation <= UNITARY_INPUT_TOL {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    /// Frobenius distance between two matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                acc += (self.0[r][c] - other.0[r][c]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `min_phi || exp(i phi) self - other ||_F`.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let t = self.inner(other);
        let phase = if t.norm() > 0.0 { t.arg() } else { 0.0 };
        self.with_phase(phase).distance(other)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = &self.0;
        Self([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;
    fn mul(self, o: Unitary2) -> Unitary2 {
        let (a, b) = (&self.0, &o.0);
        Unitary2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// `exp(i alpha n . sigma) = cos(alpha) I + i sin(alpha) n . sigma`.
pub fn su2_from_params(p: Su2Params) -> Result<Unitary2> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite SU(2) parameters {p:?}")));
    }
    Ok(su2_from_params_unchecked(p))
}

pub(crate) fn su2_from_params_unchecked(p: Su2Params) -> Unitary2 {
    let [nx, ny, nz] = p.axis();
    let (s, c) = p.alpha.sin_cos();
    // i sin(a) (n . sigma) = i s [[nz, nx - i ny], [nx + i ny, -nz]]
    Unitary2([
        [Complex64::new(c, s * nz), Complex64::new(s * ny, s * nx)],
        [Complex64::new(-s * ny, s * nx), Complex64::new(c, -s * nz)],
    ])
}

/// Bell-outcome probability `|tr(v^dagger u)|^2 / 4`.
pub fn process_fidelity(u: &Unitary2, v: &Unitary2) -> Result<f64> {
    u.ensure_unitary()?;
    v.ensure_unitary()?;
    Ok(fidelity_unchecked(u, v))
}

pub fn infidelity(u: &Unitary2, v: &Unitary2) -> Result<f64> {
    Ok(1.0 - process_fidelity(u, v)?)
}

pub(crate) fn fidelity_unchecked(u: &Unitary2, v: &Unitary2) -> f64 {
    (v.inner(u).norm_sqr() / 4.0).clamp(0.0, 1.0)
}

/// Haar-random element of SU(2) via Shoemake's uniform unit-quaternion construction.
pub fn haar_random_su2<R: Rng + ?Sized>(rng: &mut R) -> Unitary2 {
    use std::f64::consts::TAU;
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (r1, r2) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (s2, c2) = (TAU * u2).sin_cos();
    let (s3, c3) = (TAU * u3).sin_cos();
    let a = Complex64::new(r1 * s2, r1 * c2);
    let b = Complex64::new(r2 * s3, r2 * c3);
    Unitary2([[a, -b.conj()], [b, a.conj()]])
}
