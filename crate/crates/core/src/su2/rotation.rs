//! SO(3) side of the double cover: Bloch rotations, nearest-rotation
//! projection and the lift back to SU(2).

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::Unitary2;
use crate::error::{Error, Result};

pub type Rotation3 = Matrix3<f64>;

const ROTATION_INPUT_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-12;

fn paulis() -> [Unitary2; 3] {
    [Unitary2::pauli_x(), Unitary2::pauli_y(), Unitary2::pauli_z()]
}

/// Bloch-sphere action of `u`: `r_jk = tr(sigma_j u sigma_k u^dagger) / 2`.
pub fn bloch_rotation(u: &Unitary2) -> Rotation3 {
    let s = paulis();
    let ud = u.adjoint();
    let mut r = Matrix3::zeros();
    for k in 0..3 {
        let conj = *u * s[k] * ud;
        for j in 0..3 {
            r[(j, k)] = 0.5 * s[j].inner(&conj).re;
        }
    }
    r
}

/// Orthogonal Procrustes projection of `m` onto SO(3).
///
/// With `m = A S B^T`, returns `A diag(1, 1, det(A B^T)) B^T`, the sign flip
/// applied along the smallest singular direction.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Result<Rotation3> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite matrix".into()));
    }
    let svd = m.svd(true, true);
    let (Some(a), Some(b_t)) = (svd.u, svd.v_t) else {
        return Err(Error::IllConditioned("SVD did not produce singular vectors".into()));
    };
    let sv = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let (largest, middle) = (sv[order[0]], sv[order[1]]);
    if largest <= 0.0 || middle <= RANK_TOL * largest {
        return Err(Error::IllConditioned(format!(
            "rank below 2 (singular values {:.3e}, {:.3e}, {:.3e})",
            sv[0], sv[1], sv[2]
        )));
    }
    let mut d = Matrix3::identity();
    d[(order[2], order[2])] = (a * b_t).determinant().signum();
    Ok(a * d * b_t)
}

/// Lifts a rotation to SU(2) so that `U sigma_k U^dagger = sum_j r_jk sigma_j`.
///
/// Of the two preimages, the one with nonnegative real trace is returned.
pub fn so3_to_su2(r: &Rotation3) -> Result<Unitary2> {
    let ortho = (r.transpose() * r - Matrix3::identity()).amax();
    let det_dev = (r.determinant() - 1.0).abs();
    let deviation = ortho.max(det_dev);
    if !deviation.is_finite() || deviation > ROTATION_INPUT_TOL {
        return Err(Error::NotRotation { deviation });
    }

    // Shepperd's method: branch on the largest of (trace, diagonal).
    let tr = r.trace();
    let (w, x, y, z);
    if tr >= r[(0, 0)] && tr >= r[(1, 1)] && tr >= r[(2, 2)] {
        let s = 2.0 * (1.0 + tr).sqrt();
        w = 0.25 * s;
        x = (r[(2, 1)] - r[(1, 2)]) / s;
        y = (r[(0, 2)] - r[(2, 0)]) / s;
        z = (r[(1, 0)] - r[(0, 1)]) / s;
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
        w = (r[(2, 1)] - r[(1, 2)]) / s;
        x = 0.25 * s;
        y = (r[(0, 1)] + r[(1, 0)]) / s;
        z = (r[(0, 2)] + r[(2, 0)]) / s;
    } else if r[(1, 1)] >= r[(2, 2)] {
        let s = 2.0 * (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt();
        w = (r[(0, 2)] - r[(2, 0)]) / s;
        x = (r[(0, 1)] + r[(1, 0)]) / s;
        y = 0.25 * s;
        z = (r[(1, 2)] + r[(2, 1)]) / s;
    } else {
        let s = 2.0 * (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt();
        w = (r[(1, 0)] - r[(0, 1)]) / s;
        x = (r[(0, 2)] + r[(2, 0)]) / s;
        y = (r[(1, 2)] + r[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let norm = (w * w + x * x + y * y + z * z).sqrt();
    let sign = if w < 0.0 { -1.0 } else { 1.0 } / norm;
    let (w, x, y, z) = (w * sign, x * sign, y * sign, z * sign);

    // w I - i (x sx + y sy + z sz)
    Ok(Unitary2::from_raw([
        [Complex64::new(w, -z), Complex64::new(-y, -x)],
        [Complex64::new(y, -x), Complex64::new(w, z)],
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{fidelity_unchecked, haar_random_su2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rot_z(angle: f64) -> Rotation3 {
        let (s, c) = angle.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    }

    #[test]
    fn rotation_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let r = bloch_rotation(&haar_random_su2(&mut rng));
            let p = nearest_rotation(&r).unwrap();
            assert!((p - r).amax() < 1e-12);
        }
    }

    #[test]
    fn scaled_identity_projects_to_identity() {
        let p = nearest_rotation(&(Matrix3::identity() * 0.5)).unwrap();
        assert!((p - Matrix3::identity()).amax() < 1e-12);
    }

    #[test]
    fn reflection_is_corrected_to_rotation() {
        let m = Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, 1.0, -0.1));
        let p = nearest_rotation(&m).unwrap();
        assert!((p.determinant() - 1.0).abs() < 1e-12);
        assert!((p - Matrix3::identity()).amax() < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(nearest_rotation(&m), Err(Error::IllConditioned(_))));
        assert!(nearest_rotation(&Matrix3::zeros()).is_err());
    }

    /// Brute-force check: the projection beats every rotation on a dense
    /// sample of SO(3) in Frobenius distance to the noisy input.
    #[test]
    fn perturbed_rotation_recovers_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let r = bloch_rotation(&haar_random_su2(&mut rng));
            let noisy = r + Matrix3::from_fn(|_, _| rng.random_range(-1e-3..1e-3));
            let p = nearest_rotation(&noisy).unwrap();
            assert!((p - r).norm() < 1e-2);
            let d_p = (p - noisy).norm();
            for _ in 0..500 {
                let q = bloch_rotation(&haar_random_su2(&mut rng));
                assert!(d_p <= (q - noisy).norm() + 1e-12);
            }
            assert!(d_p <= (r - noisy).norm() + 1e-12);
        }
    }

    #[test]
    fn lift_of_identity_and_z_half_turn() {
        let u = so3_to_su2(&Matrix3::identity()).unwrap();
        assert!(u.distance(&Unitary2::identity()) < 1e-15);
        let u = so3_to_su2(&rot_z(std::f64::consts::PI)).unwrap();
        let iz = Unitary2::pauli_z().with_phase(std::f64::consts::FRAC_PI_2);
        assert!(u.phase_distance(&iz) < 1e-12);
    }

    #[test]
    fn lift_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let u = haar_random_su2(&mut rng);
            let r = bloch_rotation(&u);
            let back = so3_to_su2(&r).unwrap();
            assert!((1.0 - fidelity_unchecked(&u, &back)).abs() < 1e-10);
            assert!(back.trace().re >= 0.0);
            assert!((bloch_rotation(&back) - r).amax() < 1e-12);
        }
    }

    #[test]
    fn bloch_rotation_of_z_quarter_turn() {
        // exp(-i pi/4 sz) rotates x onto y
        let u =
            crate::su2::su2_from_params(crate::su2::Su2Params::new(-std::f64::consts::FRAC_PI_4, 0.0, 0.0)).unwrap();
        let r = bloch_rotation(&u);
        assert!((r - rot_z(std::f64::consts::FRAC_PI_2)).amax() < 1e-14);
    }

    #[test]
    fn lift_rejects_non_rotation() {
        let m = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0));
        assert!(matches!(so3_to_su2(&m), Err(Error::NotRotation { .. })));
        assert!(so3_to_su2(&(Matrix3::identity() * 1.1)).is_err());
    }
}
