use serde::Serialize;
use thiserror::Error;

use super::Axis;
use crate::geometry::{
    backend_mount_position, circle_circle_intersect, horn_tip, pick_feasible_intersection,
    sphere_plane_circle, Circle2, CoordinatePlane, GeometryError, Sphere3, SphericalDir,
};
use crate::mechanism::{MechanismParams, PlatformCommand, TipPose};
use crate::scalar::{rad_to_deg, to_f64, Real};
use crate::vector::{Vec2, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IkError {
    #[error("target out of reach: radial distance {radial} mm >= chopstick length {limit} mm")]
    OutOfReach { radial: f64, limit: f64 },
    #[error("platform travel {travel} mm outside [{min}, {max}] mm")]
    TravelExceeded { travel: f64, min: f64, max: f64 },
    #[error("{axis} linkage cannot close: {source}")]
    LinkageInfeasible { axis: Axis, source: GeometryError },
    #[error("{axis} horn angles {angles_deg:?} deg outside servo range")]
    RomViolated { axis: Axis, angles_deg: [f64; 2] },
    #[error("target is not finite")]
    NonFinite,
}

/// Construction details for one servo plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSolution<T = f64> {
    /// Backend mount position in the pivot frame.
    pub mount: Vec3<T>,
    /// Section of the linkage sphere by the servo plane.
    pub section: Circle2<T>,
    /// Circle swept by the horn tip.
    pub horn_circle: Circle2<T>,
    pub candidates: [Vec2<T>; 2],
    pub candidate_angles_deg: [T; 2],
    pub chosen: Vec2<T>,
    pub angle_deg: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IkSolution<T = f64> {
    pub command: PlatformCommand<T>,
    pub dir: SphericalDir<T>,
    /// Vertical extent of the chopstick below the pivot, mm.
    pub z_calc: T,
    pub pitch: AxisSolution<T>,
    pub yaw: AxisSolution<T>,
}

/// Horn tip of `axis` in the pivot frame for a horn angle in degrees.
pub fn servo_horn_tip<T: Real>(params: &MechanismParams<T>, axis: Axis, angle_deg: T) -> Vec3<T> {
    match axis {
        Axis::Pitch => {
            let t = horn_tip(params.pitch_pivot, params.pitch_horn_len, angle_deg);
            Vec3::new(T::zero(), t.h, t.v)
        }
        Axis::Yaw => {
            let t = horn_tip(params.yaw_pivot, params.yaw_horn_len, angle_deg);
            Vec3::new(t.h, T::zero(), t.v)
        }
    }
}

/// Signed linkage length error for a horn angle and chopstick direction:
/// distance from horn tip to backend mount minus the linkage length.
pub fn linkage_residual<T: Real>(
    params: &MechanismParams<T>,
    axis: Axis,
    angle_deg: T,
    dir: SphericalDir<T>,
) -> T {
    let (mount_dist, _) = axis_geometry(params, axis);
    let mount = backend_mount_position(dir, mount_dist);
    servo_horn_tip(params, axis, angle_deg).distance(mount) - params.linkage_len
}

fn axis_geometry<T: Real>(params: &MechanismParams<T>, axis: Axis) -> (T, Vec2<T>) {
    match axis {
        Axis::Pitch => (params.pitch_horn_len, params.pitch_pivot),
        Axis::Yaw => (params.yaw_horn_len, params.yaw_pivot),
    }
}

fn solve_axis<T: Real>(
    params: &MechanismParams<T>,
    axis: Axis,
    dir: SphericalDir<T>,
) -> Result<AxisSolution<T>, IkError> {
    let (mount_dist, pivot) = axis_geometry(params, axis);
    let plane = match axis {
        Axis::Pitch => CoordinatePlane::X(T::zero()),
        Axis::Yaw => CoordinatePlane::Y(T::zero()),
    };
    let mount = backend_mount_position(dir, mount_dist);
    let infeasible = |source| IkError::LinkageInfeasible { axis, source };
    let section =
        sphere_plane_circle(Sphere3::new(mount, params.linkage_len), plane).map_err(infeasible)?;
    let horn_circle = Circle2::new(pivot, mount_dist);
    let hit = circle_circle_intersect(horn_circle, section).map_err(infeasible)?;
    let picked =
        pick_feasible_intersection(hit.points, pivot, params.servo_rom).map_err(|e| match e {
            GeometryError::NoFeasibleSolution { angles_deg } => {
                IkError::RomViolated { axis, angles_deg }
            }
            other => infeasible(other),
        })?;
    Ok(AxisSolution {
        mount,
        section,
        horn_circle,
        candidates: hit.points,
        candidate_angles_deg: hit
            .points
            .map(|p| crate::geometry::horn_angle_deg(p, pivot)),
        chosen: picked.point,
        angle_deg: picked.angle_deg,
    })
}

/// Servo command placing the chopstick tip at `target`.
///
/// The azimuth is `atan2(x, y)` (zero on the platform axis), the polar
/// angle follows from the vertical extent `sqrt(l_c^2 - r^2)`, and the
/// travel is `z - z_calc - z_offset`. Each horn angle is then read off the
/// intersection of its horn circle with the section of the linkage sphere
/// by the servo plane.
pub fn inverse_kinematics<T: Real>(
    params: &MechanismParams<T>,
    target: TipPose<T>,
) -> Result<IkSolution<T>, IkError> {
    if !target.is_finite() {
        return Err(IkError::NonFinite);
    }
    let radial = target.radial();
    if radial >= params.chopstick_len {
        return Err(IkError::OutOfReach {
            radial: to_f64(radial),
            limit: to_f64(params.chopstick_len),
        });
    }
    let psi = if radial == T::zero() {
        T::zero()
    } else {
        target.x.atan2(target.y)
    };
    let lc = params.chopstick_len;
    let z_calc = ((lc - radial) * (lc + radial)).sqrt();
    let phi = (z_calc / lc).min(T::one()).acos();
    let travel = target.z - z_calc - params.z_offset;
    if !params.travel.contains(travel) {
        return Err(IkError::TravelExceeded {
            travel: to_f64(travel),
            min: to_f64(params.travel.min),
            max: to_f64(params.travel.max),
        });
    }
    let dir = SphericalDir::new(phi, psi);
    let pitch = solve_axis(params, Axis::Pitch, dir)?;
    let yaw = solve_axis(params, Axis::Yaw, dir)?;
    Ok(IkSolution {
        command: PlatformCommand::new(pitch.angle_deg, yaw.angle_deg, travel),
        dir,
        z_calc,
        pitch,
        yaw,
    })
}

impl<T: Real> IkSolution<T> {
    pub fn phi_deg(&self) -> T {
        rad_to_deg(self.dir.phi)
    }

    pub fn psi_deg(&self) -> T {
        rad_to_deg(self.dir.psi)
    }
}
