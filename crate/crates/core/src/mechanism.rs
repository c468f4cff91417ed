//! Geometric constants and frame conventions of a chopstick platform.
//!
//! Every platform is described in the frame of its spherical pivot joint.
//! The chopstick is a rigid rod through the pivot: the tip sits `chopstick_len`
//! from the pivot on one side and the two linkage mounts of the backend sit
//! `pitch_horn_len` / `yaw_horn_len` from the pivot on the other. The pitch
//! servo horn turns in the plane `x = 0`, the yaw servo horn in the plane
//! `y = 0`. All lengths are millimeters and all servo angles degrees.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, to_f64, Real};
use crate::vector::Vec2;

/// A closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T = f64> {
    pub min: T,
    pub max: T,
}

impl<T: Real> Interval<T> {
    pub fn new(min: T, max: T) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: T) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn width(&self) -> T {
        self.max - self.min
    }

    pub fn clamp(&self, v: T) -> T {
        v.max(self.min).min(self.max)
    }
}

/// Violated parameter bound.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ParamError {
    pub field: &'static str,
    pub reason: String,
}

impl ParamError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// All geometric constants of one chopstick platform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams<T = f64> {
    /// Pivot to tip.
    pub chopstick_len: T,
    /// Ball-joint linkage between servo horn and backend mount.
    pub linkage_len: T,
    /// Pitch servo horn length; also the pivot-to-pitch-mount distance.
    pub pitch_horn_len: T,
    /// Yaw servo horn length; also the pivot-to-yaw-mount distance.
    pub yaw_horn_len: T,
    /// Constant between commanded Z and platform travel.
    pub z_offset: T,
    /// Pitch horn rotation axis in the `x = 0` plane, as `(y, z)`.
    pub pitch_pivot: Vec2<T>,
    /// Yaw horn rotation axis in the `y = 0` plane, as `(x, z)`.
    pub yaw_pivot: Vec2<T>,
    /// Admissible horn displacement, degrees.
    pub servo_rom: Interval<T>,
    /// Admissible platform travel, mm.
    pub travel: Interval<T>,
    /// Leadscrew advance per revolution of the linear servo, mm/rev.
    pub leadscrew_lead: T,
}

pub const DEFAULT_CHOPSTICK_LEN: f64 = 162.0;
pub const DEFAULT_LINKAGE_LEN: f64 = 32.5;
pub const DEFAULT_PITCH_HORN_LEN: f64 = 28.0;
pub const DEFAULT_YAW_HORN_LEN: f64 = 32.0;
pub const DEFAULT_SERVO_ROM_DEG: f64 = 90.0;
pub const DEFAULT_TRAVEL_MAX: f64 = 35.0;
pub const DEFAULT_LEADSCREW_LEAD: f64 = 2.0;
pub const DEFAULT_BASELINE: f64 = 100.0;

/// Horn axis placement that closes the linkage at the zero pose.
///
/// At zero horn angle the horn points along `+z` and its tip lies level with
/// the backend mount `(0, -mount_dist)`, exactly `linkage_len` away from it.
pub fn default_pivot<T: Real>(linkage_len: T, horn_len: T) -> Vec2<T> {
    Vec2::new(-linkage_len, -(horn_len + horn_len))
}

/// Platform constants with the reference hardware lengths and default
/// offsets for everything the hardware documentation leaves open.
pub fn default_params<T: Real>() -> MechanismParams<T> {
    let linkage_len = lit(DEFAULT_LINKAGE_LEN);
    let pitch_horn_len = lit(DEFAULT_PITCH_HORN_LEN);
    let yaw_horn_len = lit(DEFAULT_YAW_HORN_LEN);
    MechanismParams {
        chopstick_len: lit(DEFAULT_CHOPSTICK_LEN),
        linkage_len,
        pitch_horn_len,
        yaw_horn_len,
        z_offset: T::zero(),
        pitch_pivot: default_pivot(linkage_len, pitch_horn_len),
        yaw_pivot: default_pivot(linkage_len, yaw_horn_len),
        servo_rom: Interval::new(lit(-DEFAULT_SERVO_ROM_DEG), lit(DEFAULT_SERVO_ROM_DEG)),
        travel: Interval::new(T::zero(), lit(DEFAULT_TRAVEL_MAX)),
        leadscrew_lead: lit(DEFAULT_LEADSCREW_LEAD),
    }
}

impl<T: Real> Default for MechanismParams<T> {
    fn default() -> Self {
        default_params()
    }
}

impl<T: Real> MechanismParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        let positive = [
            ("chopstick_length", self.chopstick_len),
            ("linkage_length", self.linkage_len),
            ("pitch_horn_length", self.pitch_horn_len),
            ("yaw_horn_length", self.yaw_horn_len),
            ("leadscrew_lead", self.leadscrew_lead),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(ParamError::new(
                    field,
                    format!("nonpositive length {} (must be > 0)", to_f64(v)),
                ));
            }
        }
        for (field, v) in [
            ("z_offset", self.z_offset),
            ("pitch_pivot", self.pitch_pivot.h),
            ("pitch_pivot", self.pitch_pivot.v),
            ("yaw_pivot", self.yaw_pivot.h),
            ("yaw_pivot", self.yaw_pivot.v),
        ] {
            if !v.is_finite() {
                return Err(ParamError::new(field, "not finite"));
            }
        }
        if !(self.travel.min >= T::zero() && self.travel.min < self.travel.max) {
            return Err(ParamError::new(
                "linear_travel",
                format!(
                    "need 0 <= min < max, got [{}, {}]",
                    to_f64(self.travel.min),
                    to_f64(self.travel.max)
                ),
            ));
        }
        let rom = self.servo_rom;
        if !(rom.min < rom.max && rom.contains(T::zero())) {
            return Err(ParamError::new(
                "servo_rom",
                format!(
                    "need a nonempty interval containing 0, got [{}, {}]",
                    to_f64(rom.min),
                    to_f64(rom.max)
                ),
            ));
        }
        if self.linkage_len >= self.pitch_horn_len + self.pitch_pivot.norm() {
            return Err(ParamError::new(
                "pitch_pivot",
                format!(
                    "linkage length {} must be < pitch horn length + pivot distance ({})",
                    to_f64(self.linkage_len),
                    to_f64(self.pitch_horn_len + self.pitch_pivot.norm())
                ),
            ));
        }
        if self.linkage_len >= self.yaw_horn_len + self.yaw_pivot.norm() {
            return Err(ParamError::new(
                "yaw_pivot",
                format!(
                    "linkage length {} must be < yaw horn length + pivot distance ({})",
                    to_f64(self.linkage_len),
                    to_f64(self.yaw_horn_len + self.yaw_pivot.norm())
                ),
            ));
        }
        Ok(())
    }

    /// Commanded Z of the tip at zero tilt and zero travel.
    pub fn zero_pose_z(&self) -> T {
        self.chopstick_len + self.z_offset
    }

    /// Tip position at the zero command.
    pub fn zero_pose(&self) -> TipPose<T> {
        TipPose::new(T::zero(), T::zero(), self.zero_pose_z() + self.travel.min)
    }
}

/// Both platforms of the end effector.
///
/// The end-effector frame has its origin midway between the two pivot axes,
/// `x` along the line joining them (left platform at `-baseline / 2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualConfig<T = f64> {
    pub left: MechanismParams<T>,
    pub right: MechanismParams<T>,
    /// Separation between the two pivot axes, mm.
    pub baseline: T,
    /// Whether the right platform frame is reflected in `x`.
    pub mirror: bool,
}

impl<T: Real> Default for DualConfig<T> {
    fn default() -> Self {
        Self {
            left: default_params(),
            right: default_params(),
            baseline: lit(DEFAULT_BASELINE),
            mirror: true,
        }
    }
}

impl<T: Real> DualConfig<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.baseline.is_finite() && self.baseline > T::zero()) {
            return Err(ParamError::new(
                "baseline",
                format!("nonpositive length {} (must be > 0)", to_f64(self.baseline)),
            ));
        }
        self.left.validate()?;
        self.right.validate()
    }
}

/// Tip position in a platform frame, mm. `z` is the commanded Z coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TipPose<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> TipPose<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    /// Distance from the platform Z axis.
    pub fn radial(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Self) -> T {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Servo-space state of one platform.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlatformCommand<T = f64> {
    /// Pitch horn displacement, degrees.
    pub pitch_deg: T,
    /// Yaw horn displacement, degrees.
    pub yaw_deg: T,
    /// Platform travel, mm.
    pub travel_mm: T,
}

impl<T: Real> PlatformCommand<T> {
    pub fn new(pitch_deg: T, yaw_deg: T, travel_mm: T) -> Self {
        Self {
            pitch_deg,
            yaw_deg,
            travel_mm,
        }
    }

    pub fn within(&self, params: &MechanismParams<T>) -> bool {
        params.servo_rom.contains(self.pitch_deg)
            && params.servo_rom.contains(self.yaw_deg)
            && params.travel.contains(self.travel_mm)
    }
}
