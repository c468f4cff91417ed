//! Geometric primitives behind the inverse kinematics: the spherical
//! mapping of the chopstick direction, sphere/plane sections and planar
//! circle intersection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanism::Interval;
use crate::scalar::{lit, rad_to_deg, to_f64, Real};
use crate::vector::{Vec2, Vec3};

/// Distance slack under which nearly-touching circles count as tangent.
pub const TOUCH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("sphere does not reach the plane (distance {distance}, radius {radius})")]
    NoIntersection { distance: f64, radius: f64 },
    #[error("circles are disjoint (d = {d} > r1 + r2 = {sum})")]
    Disjoint { d: f64, sum: f64 },
    #[error("one circle contains the other (d = {d} < |r1 - r2| = {diff})")]
    Contained { d: f64, diff: f64 },
    #[error("circles are concentric")]
    Concentric,
    #[error("no intersection inside the servo range (horn angles {angles_deg:?} deg)")]
    NoFeasibleSolution { angles_deg: [f64; 2] },
}

/// Chopstick direction: polar angle `phi` from the pivot axis and azimuth
/// `psi`, both radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SphericalDir<T = f64> {
    pub phi: T,
    pub psi: T,
}

impl<T: Real> SphericalDir<T> {
    pub fn new(phi: T, psi: T) -> Self {
        Self { phi, psi }
    }

    /// Unit vector along the chopstick from the pivot towards the tip.
    pub fn tip_direction(&self) -> Vec3<T> {
        let (sp, cp) = self.phi.sin_cos();
        let (ss, cs) = self.psi.sin_cos();
        Vec3::new(sp * ss, sp * cs, cp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle2<T = f64> {
    pub center: Vec2<T>,
    pub radius: T,
}

impl<T: Real> Circle2<T> {
    pub fn new(center: Vec2<T>, radius: T) -> Self {
        Self { center, radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere3<T = f64> {
    pub center: Vec3<T>,
    pub radius: T,
}

impl<T: Real> Sphere3<T> {
    pub fn new(center: Vec3<T>, radius: T) -> Self {
        Self { center, radius }
    }
}

/// An axis-aligned plane. In-plane coordinates are `(y, z)` for `X`,
/// `(x, z)` for `Y` and `(x, y)` for `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordinatePlane<T = f64> {
    X(T),
    Y(T),
    Z(T),
}

impl<T: Real> CoordinatePlane<T> {
    pub fn signed_distance(&self, p: Vec3<T>) -> T {
        match *self {
            Self::X(c) => p.x - c,
            Self::Y(c) => p.y - c,
            Self::Z(c) => p.z - c,
        }
    }

    pub fn project(&self, p: Vec3<T>) -> Vec2<T> {
        match self {
            Self::X(_) => Vec2::new(p.y, p.z),
            Self::Y(_) => Vec2::new(p.x, p.z),
            Self::Z(_) => Vec2::new(p.x, p.y),
        }
    }
}

/// Position of a backend linkage mount `mount_dist` from the pivot, on the
/// opposite side of the pivot from the tip.
pub fn backend_mount_position<T: Real>(dir: SphericalDir<T>, mount_dist: T) -> Vec3<T> {
    let (sp, cp) = dir.phi.sin_cos();
    let (ss, cs) = dir.psi.sin_cos();
    Vec3::new(
        -mount_dist * sp * ss,
        -mount_dist * sp * cs,
        -mount_dist * cp,
    )
}

/// Section of a sphere by a coordinate plane, in the plane's coordinates.
pub fn sphere_plane_circle<T: Real>(
    sphere: Sphere3<T>,
    plane: CoordinatePlane<T>,
) -> Result<Circle2<T>, GeometryError> {
    let dist = plane.signed_distance(sphere.center);
    let r2 = sphere.radius * sphere.radius - dist * dist;
    if r2 < T::zero() {
        return Err(GeometryError::NoIntersection {
            distance: to_f64(dist.abs()),
            radius: to_f64(sphere.radius),
        });
    }
    Ok(Circle2::new(plane.project(sphere.center), r2.sqrt()))
}

/// Both intersection points of two circles plus the construction lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleIntersection<T = f64> {
    /// Center distance.
    pub d: T,
    /// Distance from the first center to the radical line along the center line.
    pub l: T,
    /// Half-chord: distance of each point from the center line.
    pub h: T,
    pub points: [Vec2<T>; 2],
}

/// Intersects two circles through the radical line.
///
/// With `u = c2 - c1`, the points are `c1 + (l/d) u ± (h/d) (u.v, -u.h)`;
/// the first point takes the `+` sign. Circles within [`TOUCH_TOLERANCE`]
/// of touching are treated as tangent and return two coincident points.
pub fn circle_circle_intersect<T: Real>(
    c1: Circle2<T>,
    c2: Circle2<T>,
) -> Result<CircleIntersection<T>, GeometryError> {
    let u = c2.center - c1.center;
    let d = u.norm();
    if d == T::zero() {
        return Err(GeometryError::Concentric);
    }
    let tol = lit::<T>(TOUCH_TOLERANCE);
    let (r1, r2) = (c1.radius, c2.radius);
    if d > r1 + r2 + tol {
        return Err(GeometryError::Disjoint {
            d: to_f64(d),
            sum: to_f64(r1 + r2),
        });
    }
    if d < (r1 - r2).abs() - tol {
        return Err(GeometryError::Contained {
            d: to_f64(d),
            diff: to_f64((r1 - r2).abs()),
        });
    }
    let l = (r1 * r1 - r2 * r2 + d * d) / (d + d);
    let h = (r1 * r1 - l * l).max(T::zero()).sqrt();
    let base = c1.center + u * (l / d);
    let offset = Vec2::new(u.v, -u.h) * (h / d);
    Ok(CircleIntersection {
        d,
        l,
        h,
        points: [base + offset, base - offset],
    })
}

/// Horn displacement angle in degrees of a horn tip about its rotation axis:
/// zero with the horn along `+v`, positive towards `+h`.
pub fn horn_angle_deg<T: Real>(tip: Vec2<T>, pivot: Vec2<T>) -> T {
    rad_to_deg((tip.h - pivot.h).atan2(tip.v - pivot.v))
}

/// Inverse of [`horn_angle_deg`]: the horn tip for a given angle.
pub fn horn_tip<T: Real>(pivot: Vec2<T>, horn_len: T, angle_deg: T) -> Vec2<T> {
    let (s, c) = crate::scalar::deg_to_rad(angle_deg).sin_cos();
    Vec2::new(pivot.h + horn_len * s, pivot.v + horn_len * c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasiblePoint<T = f64> {
    pub point: Vec2<T>,
    pub angle_deg: T,
}

/// Chooses the intersection whose horn angle lies inside `rom_deg`.
///
/// When both qualify the smaller `|angle|` wins; an exact tie goes to the
/// negative angle.
pub fn pick_feasible_intersection<T: Real>(
    points: [Vec2<T>; 2],
    pivot: Vec2<T>,
    rom_deg: Interval<T>,
) -> Result<FeasiblePoint<T>, GeometryError> {
    let cands = points.map(|point| FeasiblePoint {
        point,
        angle_deg: horn_angle_deg(point, pivot),
    });
    let mut best: Option<FeasiblePoint<T>> = None;
    for c in cands.into_iter().filter(|c| rom_deg.contains(c.angle_deg)) {
        best = match best {
            None => Some(c),
            Some(b) => {
                let (ca, ba) = (c.angle_deg.abs(), b.angle_deg.abs());
                if ca < ba || (ca == ba && c.angle_deg < b.angle_deg) {
                    Some(c)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.ok_or(GeometryError::NoFeasibleSolution {
        angles_deg: cands.map(|c| to_f64(c.angle_deg)),
    })
}
