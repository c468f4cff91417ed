//! Platform kinematics: closed-form inverse kinematics through circle
//! intersections, a numerically solved forward map, and servo conversions.

mod forward;
mod inverse;

pub use forward::{forward_kinematics, forward_kinematics_with, FkError, FkOptions, FkSolution};
pub use inverse::{
    inverse_kinematics, linkage_residual, servo_horn_tip, AxisSolution, IkError, IkSolution,
};

use serde::{Deserialize, Serialize};

use crate::mechanism::MechanismParams;
use crate::scalar::{to_f64, Real};

/// Servo axis of a platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Pitch,
    Yaw,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::Pitch => "pitch",
            Axis::Yaw => "yaw",
        })
    }
}

/// Linear servo rotation, in revolutions, that produces `travel_mm`.
pub fn travel_to_servo_rotation<T: Real>(
    params: &MechanismParams<T>,
    travel_mm: T,
) -> Result<T, IkError> {
    if !params.travel.contains(travel_mm) {
        return Err(IkError::TravelExceeded {
            travel: to_f64(travel_mm),
            min: to_f64(params.travel.min),
            max: to_f64(params.travel.max),
        });
    }
    Ok(travel_mm / params.leadscrew_lead)
}
