use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{inverse_kinematics, Axis, IkError};
use crate::mechanism::{DualConfig, PlatformCommand, TipPose};
use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PinchError {
    #[error("object width {width} mm is not below the baseline {baseline} mm")]
    ObjectTooWide { width: f64, baseline: f64 },
    #[error("invalid grip: {0}")]
    InvalidGrip(&'static str),
    #[error("{side} platform cannot reach its pinch point{}: {source}", axis.map(|a| format!(" ({a} axis)")).unwrap_or_default())]
    UnreachablePinch {
        side: Side,
        axis: Option<Axis>,
        source: IkError,
    },
}

/// Tip targets and servo commands for a two-point pinch.
///
/// The end-effector frame has its origin midway between the two pivots,
/// `x` along the baseline towards the right platform and `z` along the
/// platform axes towards the tips. Tip positions are given both in that
/// frame and in each platform's own frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinchPlan {
    pub left_tip: TipPose,
    pub right_tip: TipPose,
    /// Tip targets in the end-effector frame.
    pub left_world: Vec3<f64>,
    pub right_world: Vec3<f64>,
    pub left_command: PlatformCommand,
    pub right_command: PlatformCommand,
    /// N, per contact.
    pub grip_force: f64,
    /// Squeeze per side, mm.
    pub penetration: f64,
    /// Unit approach direction in the end-effector frame.
    pub approach: Vec3<f64>,
    pub object_center: Vec3<f64>,
}

impl PinchPlan {
    pub fn tip_separation(&self) -> f64 {
        self.right_world.x - self.left_world.x
    }
}

fn axis_of(e: &IkError) -> Option<Axis> {
    match e {
        IkError::LinkageInfeasible { axis, .. } | IkError::RomViolated { axis, .. } => Some(*axis),
        _ => None,
    }
}

/// Maps an end-effector point into the frame of one platform.
pub fn to_platform_frame(config: &DualConfig, side: Side, p: Vec3<f64>) -> TipPose {
    let half = config.baseline / 2.0;
    match side {
        Side::Left => TipPose::new(p.x + half, p.y, p.z),
        Side::Right if config.mirror => TipPose::new(half - p.x, p.y, p.z),
        Side::Right => TipPose::new(p.x - half, p.y, p.z),
    }
}

/// Places the two tips on the baseline axis through `object_center`,
/// each `width / 2 - grip_force / stiffness` from the center, and solves
/// both platforms.
pub fn plan_pinch(
    config: &DualConfig,
    object_center: Vec3<f64>,
    width: f64,
    grip_force: f64,
    stiffness: f64,
) -> Result<PinchPlan, PinchError> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(PinchError::InvalidGrip("width must be positive"));
    }
    if width >= config.baseline {
        return Err(PinchError::ObjectTooWide {
            width,
            baseline: config.baseline,
        });
    }
    if !(grip_force >= 0.0) || !grip_force.is_finite() {
        return Err(PinchError::InvalidGrip("grip force must be non-negative"));
    }
    if !(stiffness > 0.0) {
        return Err(PinchError::InvalidGrip("stiffness must be positive"));
    }
    let penetration = grip_force / stiffness;
    let reach = width / 2.0 - penetration;
    if reach < 0.0 {
        return Err(PinchError::InvalidGrip(
            "squeeze exceeds half the object width",
        ));
    }
    let left_world = Vec3::new(object_center.x - reach, object_center.y, object_center.z);
    let right_world = Vec3::new(object_center.x + reach, object_center.y, object_center.z);
    let left_tip = to_platform_frame(config, Side::Left, left_world);
    let right_tip = to_platform_frame(config, Side::Right, right_world);
    let solve = |side: Side, params, tip| {
        inverse_kinematics(params, tip)
            .map(|s| s.command)
            .map_err(|source| PinchError::UnreachablePinch {
                side,
                axis: axis_of(&source),
                source,
            })
    };
    Ok(PinchPlan {
        left_tip,
        right_tip,
        left_world,
        right_world,
        left_command: solve(Side::Left, &config.left, left_tip)?,
        right_command: solve(Side::Right, &config.right, right_tip)?,
        grip_force,
        penetration,
        approach: Vec3::new(0.0, 0.0, 1.0),
        object_center,
    })
}
