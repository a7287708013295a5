//! The self-guided learner: SPSA ascent on the measured Bell-outcome
//! probability in `(alpha, theta, phi)` coordinates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{measure_overlap, NoiseModel, ShotBudget};
use crate::su2::{fidelity_unchecked, su2_from_params, su2_from_params_unchecked, Su2Params, Unitary2};

/// Decay constants for the perturbation size `delta_k` and step size `g_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainSchedule {
    pub delta0: f64,
    pub g0: f64,
    /// Stability offset `A` in the step-size denominator.
    pub a_stability: f64,
    pub gamma: f64,
    pub alpha_exp: f64,
}

/// Gains for one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    pub delta: f64,
    pub g: f64,
}

impl GainSchedule {
    pub const DEFAULT_DELTA0: f64 = 0.2;
    pub const DEFAULT_G0: f64 = 2.0;
    pub const DEFAULT_A: f64 = 0.0;

    pub fn new(delta0: f64, g0: f64, a_stability: f64, gamma: f64, alpha_exp: f64) -> Result<Self> {
        let s = Self {
            delta0,
            g0,
            a_stability,
            gamma,
            alpha_exp,
        };
        s.validate()?;
        Ok(s)
    }

    /// Default `delta0`, `g0` and `A` with the given exponents.
    pub fn with_exponents(gamma: f64, alpha_exp: f64) -> Result<Self> {
        Self::new(
            Self::DEFAULT_DELTA0,
            Self::DEFAULT_G0,
            Self::DEFAULT_A,
            gamma,
            alpha_exp,
        )
    }

    /// Exponents tuned for noiseless asymptotic scaling.
    pub fn noiseless_preset() -> Self {
        Self::with_exponents(0.42, 0.92).expect("valid preset")
    }

    /// Exponents tuned for long runs under waveplate jitter.
    pub fn jitter_preset() -> Self {
        Self::with_exponents(0.21, 0.94).expect("valid preset")
    }

    /// Exponents tuned for short 50-iteration experiments.
    pub fn short_run_preset() -> Self {
        Self::with_exponents(0.06, 0.85).expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x <= 1.0;
        let ok = self.delta0 > 0.0
            && self.g0 > 0.0
            && self.a_stability >= 0.0
            && self.delta0.is_finite()
            && self.g0.is_finite()
            && self.a_stability.is_finite()
            && unit(self.gamma)
            && unit(self.alpha_exp);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid gain schedule {self:?}")))
        }
    }

    /// `delta_k = delta0 / (k+1)^gamma`, `g_k = g0 / (k+1+A)^alpha`.
    pub fn gains_at(&self, k: u64) -> Gains {
        let k1 = k as f64 + 1.0;
        Gains {
            delta: self.delta0 / k1.powf(self.gamma),
            g: self.g0 / (k1 + self.a_stability).powf(self.alpha_exp),
        }
    }
}

impl Default for GainSchedule {
    fn default() -> Self {
        Self::noiseless_preset()
    }
}

/// Rademacher direction: independent fair `+-1` entries.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    std::array::from_fn(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pub k: u64,
    pub params: Su2Params,
}

impl LearnerState {
    pub fn new(params: Su2Params) -> Self {
        Self { k: 0, params }
    }
}

/// Two-sided simultaneous-perturbation gradient estimate along `direction`.
pub fn gradient_estimate<R, F>(
    params: Su2Params,
    delta: f64,
    direction: [f64; 3],
    rng: &mut R,
    mut evaluate: F,
) -> Result<Su2Params>
where
    R: Rng + ?Sized,
    F: FnMut(Su2Params, &mut R) -> Result<f64>,
{
    let d = Su2Params::from_array(direction);
    let plus = evaluate(params + d * delta, rng)?;
    let minus = evaluate(params - d * delta, rng)?;
    Ok(d * ((plus - minus) / (2.0 * delta)))
}

/// One ascent step against an arbitrary probability oracle.
pub fn spsa_step<R, F>(state: LearnerState, schedule: &GainSchedule, rng: &mut R, evaluate: F) -> Result<LearnerState>
where
    R: Rng + ?Sized,
    F: FnMut(Su2Params, &mut R) -> Result<f64>,
{
    let Gains { delta, g } = schedule.gains_at(state.k);
    let direction = sample_direction(rng);
    let grad = gradient_estimate(state.params, delta, direction, rng, evaluate)?;
    Ok(LearnerState {
        k: state.k + 1,
        params: state.params + grad * g,
    })
}

/// One iteration against the simulated experiment; consumes exactly `2 N` shots.
pub fn spsa_iteration<R: Rng + ?Sized>(
    state: LearnerState,
    schedule: &GainSchedule,
    u_true: &Unitary2,
    shots: ShotBudget,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<LearnerState> {
    spsa_step(state, schedule, rng, |p, rng| {
        let v = su2_from_params(p)?;
        measure_overlap(u_true, &v, shots, noise, rng)
    })
}

/// Which iterations are written to a [`TrialTrace`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecordSpacing {
    /// Every `stride`-th iteration.
    Every { stride: u64 },
    /// Roughly `per_decade` logarithmically spaced iterations per decade.
    Log { per_decade: u32 },
}

impl Default for RecordSpacing {
    fn default() -> Self {
        RecordSpacing::Every { stride: 1 }
    }
}

impl RecordSpacing {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RecordSpacing::Every { stride } if stride >= 1 => Ok(()),
            RecordSpacing::Log { per_decade } if per_decade >= 1 => Ok(()),
            _ => Err(Error::InvalidParameter(format!("invalid record spacing {self:?}"))),
        }
    }

    /// Recorded iteration counts in `1..=iterations`; the last iteration is always included.
    pub fn points(&self, iterations: u64) -> Vec<u64> {
        let mut pts = match *self {
            RecordSpacing::Every { stride } => (1..=iterations / stride.max(1)).map(|j| j * stride).collect(),
            RecordSpacing::Log { per_decade } => {
                let mut pts = Vec::new();
                let mut j = 0u32;
                loop {
                    let k = 10f64.powf(j as f64 / per_decade.max(1) as f64).round() as u64;
                    if k > iterations {
                        break;
                    }
                    if pts.last() != Some(&k) {
                        pts.push(k);
                    }
                    j += 1;
                }
                pts
            }
        };
        if iterations > 0 && pts.last() != Some(&iterations) {
            pts.push(iterations);
        }
        pts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Number of completed iterations.
    pub iteration: u64,
    /// True infidelity of the requested estimate against the unknown unitary.
    pub infidelity: f64,
    pub shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub records: Vec<TraceRecord>,
    pub final_params: Su2Params,
}

impl TrialTrace {
    pub fn final_infidelity(&self) -> Option<f64> {
        self.records.last().map(|r| r.infidelity)
    }
}

/// Runs the learner, recording every iteration.
#[allow(clippy::too_many_arguments)]
pub fn run_learning<R: Rng + ?Sized>(
    u_true: &Unitary2,
    init: Su2Params,
    schedule: &GainSchedule,
    iterations: u64,
    shots: ShotBudget,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<TrialTrace> {
    run_learning_recorded(
        u_true,
        init,
        schedule,
        iterations,
        shots,
        noise,
        RecordSpacing::default(),
        rng,
    )
}

/// Runs the learner, recording true infidelity at the iterations selected by `spacing`.
///
/// The infidelity is scored against the requested control, and is never
/// visible to the learner.
#[allow(clippy::too_many_arguments)]
pub fn run_learning_recorded<R: Rng + ?Sized>(
    u_true: &Unitary2,
    init: Su2Params,
    schedule: &GainSchedule,
    iterations: u64,
    shots: ShotBudget,
    noise: &NoiseModel,
    spacing: RecordSpacing,
    rng: &mut R,
) -> Result<TrialTrace> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be at least 1".into()));
    }
    schedule.validate()?;
    noise.validate()?;
    spacing.validate()?;
    u_true.ensure_unitary()?;
    su2_from_params(init)?;

    let points = spacing.points(iterations);
    let mut next = points.iter().peekable();
    let mut records = Vec::with_capacity(points.len());
    let mut state = LearnerState::new(init);
    let per_iter = 2 * shots.get();
    while state.k < iterations {
        state = spsa_iteration(state, schedule, u_true, shots, noise, rng)?;
        if next.peek() == Some(&&state.k) {
            next.next();
            let v = su2_from_params_unchecked(state.params);
            records.push(TraceRecord {
                iteration: state.k,
                infidelity: 1.0 - fidelity_unchecked(u_true, &v),
                shots: per_iter * state.k,
            });
        }
    }
    Ok(TrialTrace {
        records,
        final_params: state.params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::haar_random_su2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_gains_are_the_base_constants() {
        for (gamma, alpha) in [(0.42, 0.92), (0.06, 0.85), (1.0, 1.0)] {
            let s = GainSchedule::with_exponents(gamma, alpha).unwrap();
            let g = s.gains_at(0);
            assert_eq!(g.delta, 0.2);
            assert_eq!(g.g, 2.0);
        }
    }

    #[test]
    fn gains_at_iteration_99() {
        let s = GainSchedule::noiseless_preset();
        let g = s.gains_at(99);
        // 0.2 * 100^-0.42 = 0.2 * 10^-0.84 ; 2 * 100^-0.92 = 2 * 10^-1.84
        assert!((g.delta - 0.028_908_795_4).abs() < 1e-9, "{}", g.delta);
        assert!((g.g - 0.028_908_795_4).abs() < 1e-9, "{}", g.g);
    }

    #[test]
    fn gains_strictly_decrease() {
        let s = GainSchedule::new(0.2, 2.0, 3.0, 0.3, 0.7).unwrap();
        let mut prev = s.gains_at(0);
        for k in 1..2000 {
            let g = s.gains_at(k);
            assert!(g.delta < prev.delta && g.g < prev.g);
            prev = g;
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(GainSchedule::new(0.0, 2.0, 0.0, 0.5, 0.5).is_err());
        assert!(GainSchedule::new(0.2, -1.0, 0.0, 0.5, 0.5).is_err());
        assert!(GainSchedule::new(0.2, 2.0, -1.0, 0.5, 0.5).is_err());
        assert!(GainSchedule::new(0.2, 2.0, 0.0, 0.0, 0.5).is_err());
        assert!(GainSchedule::new(0.2, 2.0, 0.0, 0.5, 1.1).is_err());
        assert!(GainSchedule::new(0.2, 2.0, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn directions_are_rademacher_and_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut counts = [0u32; 8];
        let n = 80_000;
        for _ in 0..n {
            let d = sample_direction(&mut rng);
            let mut idx = 0;
            for (bit, x) in d.iter().enumerate() {
                assert!(*x == 1.0 || *x == -1.0);
                if *x > 0.0 {
                    idx |= 1 << bit;
                }
            }
            counts[idx] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.125).abs() < 0.005, "{counts:?}");
        }
        let a: Vec<_> = (0..5)
            .map(|_| sample_direction(&mut ChaCha8Rng::seed_from_u64(3)))
            .collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn equal_evaluations_leave_params_unchanged() {
        let init = LearnerState::new(Su2Params::new(0.3, 0.2, 0.1));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = GainSchedule::default();
        let next = spsa_step(init, &s, &mut rng, |_, _| Ok(0.7)).unwrap();
        assert_eq!(next.params, init.params);
        assert_eq!(next.k, 1);
    }

    #[test]
    fn update_is_ascent_along_estimated_gradient() {
        // f(x) = alpha: the gradient estimate is exactly (1,0,0) . direction * direction.
        let init = LearnerState::new(Su2Params::new(0.0, 0.0, 0.0));
        let s = GainSchedule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let next = spsa_step(init, &s, &mut rng, |p, _| Ok(p.alpha)).unwrap();
        let d = sample_direction(&mut ChaCha8Rng::seed_from_u64(2));
        assert!((next.params.alpha - 2.0).abs() < 1e-12);
        assert!((next.params.theta - 2.0 * d[0] * d[1]).abs() < 1e-12);
        assert!((next.params.phi - 2.0 * d[0] * d[2]).abs() < 1e-12);
    }

    #[test]
    fn record_spacing_points() {
        assert_eq!(RecordSpacing::Every { stride: 1 }.points(4), vec![1, 2, 3, 4]);
        assert_eq!(RecordSpacing::Every { stride: 3 }.points(10), vec![3, 6, 9, 10]);
        let log = RecordSpacing::Log { per_decade: 10 }.points(1000);
        assert_eq!(log.first(), Some(&1));
        assert_eq!(log.last(), Some(&1000));
        assert!(log.windows(2).all(|w| w[0] < w[1]));
        assert!(log.contains(&100) && log.contains(&10));
        assert!(RecordSpacing::Every { stride: 0 }.validate().is_err());
    }

    #[test]
    fn trace_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_random_su2(&mut rng);
        let shots = ShotBudget::new(25).unwrap();
        let t = run_learning(
            &u,
            Su2Params::default(),
            &GainSchedule::default(),
            40,
            shots,
            &NoiseModel::Ideal,
            &mut rng,
        )
        .unwrap();
        assert_eq!(t.records.len(), 40);
        for (i, r) in t.records.iter().enumerate() {
            assert_eq!(r.iteration, i as u64 + 1);
            assert_eq!(r.shots, 50 * (i as u64 + 1));
            assert!((0.0..=1.0).contains(&r.infidelity));
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shots = ShotBudget::new(25).unwrap();
        let r = run_learning(
            &Unitary2::identity(),
            Su2Params::default(),
            &GainSchedule::default(),
            0,
            shots,
            &NoiseModel::Ideal,
            &mut rng,
        );
        assert!(r.is_err());
    }

    #[test]
    fn deterministic_trace() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let u = haar_random_su2(&mut rng);
            let shots = ShotBudget::new(10).unwrap();
            let noise = NoiseModel::jitter(3.0).unwrap();
            run_learning(
                &u,
                Su2Params::default(),
                &GainSchedule::short_run_preset(),
                30,
                shots,
                &noise,
                &mut rng,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }
}
