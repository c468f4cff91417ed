//! Kinematics, workspace analysis, force sensing and grasp planning for a
//! dual-chopstick robot end effector.

// `!(x > 0.0)` is the intended NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bus;
pub mod config;
pub mod geometry;
pub mod grasp;
pub mod kinematics;
pub mod mechanism;
pub mod scalar;
pub mod sensing;
pub mod validation;
pub mod vector;
pub mod workspace;

pub use config::{load_config, load_config_file, to_toml, ConfigError};
pub use geometry::{Circle2, Sphere3, SphericalDir};
pub use kinematics::{
    forward_kinematics, inverse_kinematics, travel_to_servo_rotation, Axis, FkError, IkError,
    IkSolution,
};
pub use mechanism::{
    default_params, DualConfig, Interval, MechanismParams, PlatformCommand, TipPose,
};
pub use scalar::Real;
pub use vector::{Vec2, Vec3};

/// Single-precision aliases. The default type parameter already gives the
/// f64 forms (`MechanismParams` is `MechanismParams<f64>`).
pub type MechanismParamsF32 = MechanismParams<f32>;
pub type TipPoseF32 = TipPose<f32>;
pub type PlatformCommandF32 = PlatformCommand<f32>;
pub type IkSolutionF32 = IkSolution<f32>;
pub type Vec2F32 = Vec2<f32>;
pub type Vec3F32 = Vec3<f32>;
pub type Circle2F32 = Circle2<f32>;

pub type MechanismParamsF64 = MechanismParams<f64>;
pub type TipPoseF64 = TipPose<f64>;
pub type PlatformCommandF64 = PlatformCommand<f64>;
pub type IkSolutionF64 = IkSolution<f64>;
pub type Vec2F64 = Vec2<f64>;
pub type Vec3F64 = Vec3<f64>;
pub type Circle2F64 = Circle2<f64>;
