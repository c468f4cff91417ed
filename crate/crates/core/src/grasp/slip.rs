//! Two-contact Coulomb slip check per trajectory phase.
//!
//! The friction available at the two tips is `2 * mu * grip_force`. Each
//! phase needs enough of it to hold the object's weight plus its peak
//! inertial load. For rotations the weight is replaced by its component
//! across the grip axis, taken at the worst orientation of a 1° sweep;
//! the component along the grip axis is carried by the contact normals.
//! Torsional slip about the grip axis is not modeled.

use serde::{Deserialize, Serialize};

use super::pinch::PinchPlan;
use super::trajectory::{Phase, RotationAxis, TrialTrajectory};
use super::FoodItem;
use crate::vector::Vec3;

/// Standard gravity, mm/s².
pub const GRAVITY_MM_S2: f64 = 9810.0;

/// Sweep resolution for rotations, degrees.
const SWEEP_STEP_DEG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseVerdict {
    pub phase: Phase,
    /// N
    pub required: f64,
    /// N
    pub available: f64,
    pub hold: bool,
}

impl PhaseVerdict {
    /// Available minus required friction, N.
    pub fn margin(&self) -> f64 {
        self.available - self.required
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlipReport {
    pub phases: Vec<PhaseVerdict>,
    /// Grasp, lift and rotate phases all hold.
    pub rot: bool,
    /// Grasp, lift and translate phases all hold.
    pub lin: bool,
}

impl SlipReport {
    /// Phase with the smallest margin.
    pub fn limiting(&self) -> Option<&PhaseVerdict> {
        self.phases
            .iter()
            .min_by(|a, b| a.margin().total_cmp(&b.margin()))
    }
}

/// Grip axis in world coordinates after rotating by `ry` about Y, then by
/// `rz` about Z (degrees, world axes).
fn grip_axis(ry: f64, rz: f64) -> Vec3<f64> {
    let (sy, cy) = ry.to_radians().sin_cos();
    let (sz, cz) = rz.to_radians().sin_cos();
    // Rz * Ry * x̂
    let v = Vec3::new(cy, 0.0, -sy);
    Vec3::new(cz * v.x - sz * v.y, sz * v.x + cz * v.y, v.z)
}

/// Component of gravity across the grip axis, mm/s².
fn gravity_across(g: f64, axis: Vec3<f64>) -> f64 {
    let gv = Vec3::new(0.0, 0.0, -g);
    let along = gv.dot(axis);
    (gv - axis * along).norm()
}

/// Hold/slip verdict for every phase present in `traj`.
pub fn predict_slip(
    item: &FoodItem,
    plan: &PinchPlan,
    traj: &TrialTrajectory,
    g: f64,
) -> SlipReport {
    let mass_kg = item.mass_g / 1000.0;
    let available = 2.0 * item.mu * plan.grip_force;
    // inertial loads in mm/s², converted to N via kg * m/s²
    let newtons = |acc_mm: f64| mass_kg * acc_mm / 1000.0;
    let lever = plan.object_center.norm();

    let mut worst: Vec<(Phase, f64)> = Vec::new();
    let mut bump = |phase: Phase, req: f64| match worst.iter_mut().find(|(p, _)| *p == phase) {
        Some((_, r)) => *r = r.max(req),
        None => worst.push((phase, req)),
    };
    for seg in &traj.segments {
        let req = match seg.phase {
            Phase::Grasp => newtons(g),
            Phase::Lift | Phase::Translate => newtons(g + seg.profile.peak_accel()),
            Phase::Rotate => {
                let w = &traj.waypoints[seg.waypoints.0];
                let (ry, rz) = (w.rot_y_deg, w.rot_z_deg);
                let steps = (seg.displacement.abs() / SWEEP_STEP_DEG).ceil() as usize;
                let step = seg.displacement / steps.max(1) as f64;
                let mut g_max: f64 = 0.0;
                for k in 0..=steps {
                    let d = step * k as f64;
                    let (y, z) = match seg.axis {
                        Some(RotationAxis::Y) => (ry + d, rz),
                        _ => (ry, rz + d),
                    };
                    g_max = g_max.max(gravity_across(g, grip_axis(y, z)));
                }
                // tangential and centripetal load at the object's lever arm
                let alpha = seg.profile.peak_accel().to_radians();
                let omega = seg.profile.peak_speed.to_radians();
                let a_rot = lever * alpha.hypot(omega * omega);
                newtons(g_max + a_rot)
            }
        };
        bump(seg.phase, req);
    }
    let phases: Vec<PhaseVerdict> = worst
        .into_iter()
        .map(|(phase, required)| PhaseVerdict {
            phase,
            required,
            available,
            hold: available >= required,
        })
        .collect();
    let all_hold = |set: &[Phase]| {
        phases
            .iter()
            .filter(|v| set.contains(&v.phase))
            .all(|v| v.hold)
    };
    SlipReport {
        rot: all_hold(&[Phase::Grasp, Phase::Lift, Phase::Rotate]),
        lin: all_hold(&[Phase::Grasp, Phase::Lift, Phase::Translate]),
        phases,
    }
}
