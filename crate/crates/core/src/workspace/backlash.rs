use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{forward_kinematics, inverse_kinematics, FkError, IkError};
use crate::mechanism::{MechanismParams, PlatformCommand, TipPose};
use crate::scalar::{lit, Real};

/// Default rotary deadband half-width, degrees. A fitted value, not a
/// measured one.
pub const DEFAULT_EPSILON_SERVO_DEG: f64 = 0.25;

/// Uniform servo slop: each realized horn angle differs from the commanded
/// one by an independent draw from `±epsilon_servo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacklashModel {
    pub epsilon_servo: f64,
    /// Leadscrew slop, mm.
    pub epsilon_linear: f64,
    pub seed: u64,
}

impl Default for BacklashModel {
    fn default() -> Self {
        Self {
            epsilon_servo: DEFAULT_EPSILON_SERVO_DEG,
            epsilon_linear: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BacklashError {
    #[error("backlash half-widths must be finite and non-negative")]
    InvalidModel,
    #[error("target {index}: {source}")]
    Ik { index: usize, source: IkError },
    #[error("target {index}: {source}")]
    Fk { index: usize, source: FkError },
}

/// `(commanded, observed)`.
pub type PosePair<T = f64> = (TipPose<T>, TipPose<T>);

/// Commanded/observed pairs: each target is solved, its command perturbed
/// by the model, and the perturbed command mapped back through forward
/// kinematics. Perturbed commands are clamped to the servo range and the
/// platform travel.
///
/// Draws are taken per target in the order pitch, yaw, travel.
pub fn simulate_observed<T: Real>(
    params: &MechanismParams<T>,
    targets: &[TipPose<T>],
    model: &BacklashModel,
) -> Result<Vec<PosePair<T>>, BacklashError> {
    let ok = |e: f64| e.is_finite() && e >= 0.0;
    if !ok(model.epsilon_servo) || !ok(model.epsilon_linear) {
        return Err(BacklashError::InvalidModel);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut slop = |e: f64| lit::<T>(rng.random_range(-e..=e));
    targets
        .iter()
        .enumerate()
        .map(|(index, &target)| {
            let sol = inverse_kinematics(params, target)
                .map_err(|source| BacklashError::Ik { index, source })?;
            let c = sol.command;
            let perturbed = PlatformCommand::new(
                params
                    .servo_rom
                    .clamp(c.pitch_deg + slop(model.epsilon_servo)),
                params
                    .servo_rom
                    .clamp(c.yaw_deg + slop(model.epsilon_servo)),
                params
                    .travel
                    .clamp(c.travel_mm + slop(model.epsilon_linear)),
            );
            let observed = forward_kinematics(params, perturbed)
                .map_err(|source| BacklashError::Fk { index, source })?;
            Ok((target, observed))
        })
        .collect()
}
