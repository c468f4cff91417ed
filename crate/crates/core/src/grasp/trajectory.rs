//! Timed end-effector waypoints for a grasp trial: hold, lift, two
//! rotations at the apex, then back-and-forth translations.
//!
//! Every motion follows a trapezoidal speed profile. Waypoints include all
//! profile breakpoints, so the speed is linear between consecutive
//! waypoints and the trapezoid rule integrates it exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Grasp,
    Lift,
    Rotate,
    Translate,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Grasp => "grasp",
            Phase::Lift => "lift",
            Phase::Rotate => "rotate",
            Phase::Translate => "translate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RotationAxis {
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialProtocol {
    /// mm
    pub lift: f64,
    /// One-way translation length, mm.
    pub translate: f64,
    /// Cruise speed for lift and translation, mm/s.
    pub speed: f64,
    /// Back-and-forth translation cycles.
    pub cycles: usize,
    /// Rotations at the apex, degrees, applied in order about world axes.
    pub rotations: Vec<(RotationAxis, f64)>,
    /// deg/s
    pub rotation_speed: f64,
    /// deg/s²
    pub rotation_accel: f64,
    /// Stationary hold after closing, s.
    pub grasp_hold: f64,
}

impl Default for TrialProtocol {
    fn default() -> Self {
        Self {
            lift: 250.0,
            translate: 200.0,
            speed: 200.0,
            cycles: 3,
            rotations: vec![(RotationAxis::Y, 90.0), (RotationAxis::Z, 90.0)],
            rotation_speed: 90.0,
            rotation_accel: 360.0,
            grasp_hold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrajectoryError {
    #[error("infeasible profile: {0} must be positive")]
    InfeasibleProfile(&'static str),
}

/// Trapezoidal (or, for short moves, triangular) speed profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub distance: f64,
    pub peak_speed: f64,
    pub accel: f64,
    pub ramp_time: f64,
    pub cruise_time: f64,
}

impl Trapezoid {
    pub fn new(distance: f64, max_speed: f64, accel: f64) -> Self {
        let ramp_dist = max_speed * max_speed / accel;
        let (peak_speed, cruise_time) = if distance >= ramp_dist {
            (max_speed, (distance - ramp_dist) / max_speed)
        } else {
            ((distance * accel).sqrt(), 0.0)
        };
        Self {
            distance,
            peak_speed,
            accel,
            ramp_time: peak_speed / accel,
            cruise_time,
        }
    }

    pub fn duration(&self) -> f64 {
        2.0 * self.ramp_time + self.cruise_time
    }

    /// Breakpoints: start, end of ramp up, start of ramp down, end.
    fn breakpoints(&self) -> [f64; 4] {
        [
            0.0,
            self.ramp_time,
            self.ramp_time + self.cruise_time,
            self.duration(),
        ]
    }

    /// Distance covered and speed at time `t` into the move.
    pub fn state(&self, t: f64) -> (f64, f64) {
        let (ta, tc, a) = (self.ramp_time, self.cruise_time, self.accel);
        if t <= 0.0 {
            (0.0, 0.0)
        } else if t < ta {
            (0.5 * a * t * t, a * t)
        } else if t <= ta + tc {
            (
                0.5 * a * ta * ta + self.peak_speed * (t - ta),
                self.peak_speed,
            )
        } else if t < self.duration() {
            let r = self.duration() - t;
            (self.distance - 0.5 * a * r * r, a * r)
        } else {
            (self.distance, 0.0)
        }
    }

    /// Largest acceleration magnitude along the move.
    pub fn peak_accel(&self) -> f64 {
        if self.distance > 0.0 {
            self.accel
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t: f64,
    pub phase: Phase,
    /// World position of the end-effector origin, mm, `z` up.
    pub position: Vec3<f64>,
    pub rot_y_deg: f64,
    pub rot_z_deg: f64,
    /// Linear speed, mm/s.
    pub speed: f64,
    /// Angular speed, deg/s.
    pub angular_speed: f64,
}

/// One profiled motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub phase: Phase,
    /// Rotation axis for rotate segments.
    pub axis: Option<RotationAxis>,
    pub start: f64,
    pub end: f64,
    /// mm for linear motion, degrees for rotations; signed.
    pub displacement: f64,
    pub profile: Trapezoid,
    /// Index range of this segment's waypoints (inclusive start, exclusive end).
    pub waypoints: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTrajectory {
    pub waypoints: Vec<Waypoint>,
    pub segments: Vec<Segment>,
}

/// Sampling interval between profile breakpoints, s.
pub const WAYPOINT_DT: f64 = 0.01;

struct Builder {
    waypoints: Vec<Waypoint>,
    segments: Vec<Segment>,
    t: f64,
    pos: Vec3<f64>,
    rot_y: f64,
    rot_z: f64,
}

impl Builder {
    fn push(&mut self, w: Waypoint) {
        if let Some(last) = self.waypoints.last() {
            if w.t <= last.t {
                return;
            }
        }
        self.waypoints.push(w);
    }

    fn hold(&mut self, phase: Phase, duration: f64) {
        let first = self.waypoints.len();
        let base = self.here(phase);
        self.push(base);
        self.push(Waypoint {
            t: self.t + duration,
            ..base
        });
        self.segments.push(Segment {
            phase,
            axis: None,
            start: self.t,
            end: self.t + duration,
            displacement: 0.0,
            profile: Trapezoid::new(0.0, 1.0, 1.0),
            waypoints: (first, self.waypoints.len()),
        });
        self.t += duration;
    }

    fn here(&self, phase: Phase) -> Waypoint {
        Waypoint {
            t: self.t,
            phase,
            position: self.pos,
            rot_y_deg: self.rot_y,
            rot_z_deg: self.rot_z,
            speed: 0.0,
            angular_speed: 0.0,
        }
    }

    fn times(profile: &Trapezoid) -> Vec<f64> {
        let mut ts: Vec<f64> = profile.breakpoints().to_vec();
        let n = (profile.duration() / WAYPOINT_DT).floor() as usize;
        ts.extend((1..=n).map(|k| k as f64 * WAYPOINT_DT));
        ts.retain(|&t| t <= profile.duration());
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts
    }

    fn linear(&mut self, phase: Phase, dir: Vec3<f64>, distance: f64, speed: f64, accel: f64) {
        let profile = Trapezoid::new(distance, speed, accel);
        let (start_pos, start_t) = (self.pos, self.t);
        // first waypoint may coincide with the previous segment's last one
        let first = match self.waypoints.last() {
            Some(w) if w.t >= start_t => self.waypoints.len() - 1,
            _ => self.waypoints.len(),
        };
        for tau in Self::times(&profile) {
            let (s, v) = profile.state(tau);
            self.pos = if tau == profile.duration() {
                start_pos + dir * distance
            } else {
                start_pos + dir * s
            };
            self.t = start_t + tau;
            let w = Waypoint {
                speed: v,
                ..self.here(phase)
            };
            if tau == 0.0 && first < self.waypoints.len() {
                continue;
            }
            self.push(w);
        }
        self.segments.push(Segment {
            phase,
            axis: None,
            start: start_t,
            end: self.t,
            // `dir` is a signed coordinate axis
            displacement: distance * (dir.x + dir.y + dir.z),
            profile,
            waypoints: (first, self.waypoints.len()),
        });
    }

    fn rotate(&mut self, axis: RotationAxis, angle: f64, speed: f64, accel: f64) {
        let profile = Trapezoid::new(angle.abs(), speed, accel);
        let sign = angle.signum();
        let (y0, z0, start_t) = (self.rot_y, self.rot_z, self.t);
        let first = match self.waypoints.last() {
            Some(w) if w.t >= start_t => self.waypoints.len() - 1,
            _ => self.waypoints.len(),
        };
        for tau in Self::times(&profile) {
            let (s, v) = profile.state(tau);
            let s = if tau == profile.duration() {
                angle.abs()
            } else {
                s
            };
            match axis {
                RotationAxis::Y => self.rot_y = y0 + sign * s,
                RotationAxis::Z => self.rot_z = z0 + sign * s,
            }
            self.t = start_t + tau;
            if tau == 0.0 && first < self.waypoints.len() {
                continue;
            }
            let w = Waypoint {
                angular_speed: v,
                ..self.here(Phase::Rotate)
            };
            self.push(w);
        }
        self.segments.push(Segment {
            phase: Phase::Rotate,
            axis: Some(axis),
            start: start_t,
            end: self.t,
            displacement: angle,
            profile,
            waypoints: (first, self.waypoints.len()),
        });
    }
}

/// Builds the trial trajectory for `protocol` with linear acceleration
/// `accel` in m/s².
pub fn build_trial_trajectory(
    protocol: &TrialProtocol,
    accel: f64,
) -> Result<TrialTrajectory, TrajectoryError> {
    let positive = |v: f64, what| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(TrajectoryError::InfeasibleProfile(what))
        }
    };
    positive(accel, "acceleration")?;
    positive(protocol.lift, "lift")?;
    positive(protocol.translate, "translation")?;
    positive(protocol.speed, "speed")?;
    positive(protocol.rotation_speed, "rotation speed")?;
    positive(protocol.rotation_accel, "rotation acceleration")?;
    positive(protocol.grasp_hold, "grasp hold")?;
    for &(_, a) in &protocol.rotations {
        if a == 0.0 || !a.is_finite() {
            return Err(TrajectoryError::InfeasibleProfile("rotation angle"));
        }
    }
    let accel_mm = accel * 1000.0;
    let mut b = Builder {
        waypoints: Vec::new(),
        segments: Vec::new(),
        t: 0.0,
        pos: Vec3::zero(),
        rot_y: 0.0,
        rot_z: 0.0,
    };
    b.hold(Phase::Grasp, protocol.grasp_hold);
    b.linear(
        Phase::Lift,
        Vec3::new(0.0, 0.0, 1.0),
        protocol.lift,
        protocol.speed,
        accel_mm,
    );
    for &(axis, angle) in &protocol.rotations {
        b.rotate(
            axis,
            angle,
            protocol.rotation_speed,
            protocol.rotation_accel,
        );
    }
    for _ in 0..protocol.cycles {
        for dir in [1.0, -1.0] {
            b.linear(
                Phase::Translate,
                Vec3::new(dir, 0.0, 0.0),
                protocol.translate,
                protocol.speed,
                accel_mm,
            );
        }
    }
    Ok(TrialTrajectory {
        waypoints: b.waypoints,
        segments: b.segments,
    })
}

impl TrialTrajectory {
    pub fn duration(&self) -> f64 {
        self.waypoints.last().map(|w| w.t).unwrap_or(0.0)
    }

    pub fn segments_of(&self, phase: Phase) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.phase == phase)
    }

    /// Path length of a segment by trapezoid-rule integration of its
    /// waypoint speeds (angle for rotations).
    pub fn integrate(&self, seg: &Segment) -> f64 {
        let w = &self.waypoints[seg.waypoints.0..seg.waypoints.1];
        w.windows(2)
            .map(|p| {
                let (a, b) = if seg.phase == Phase::Rotate {
                    (p[0].angular_speed, p[1].angular_speed)
                } else {
                    (p[0].speed, p[1].speed)
                };
                0.5 * (a + b) * (p[1].t - p[0].t)
            })
            .sum()
    }

    /// Largest linear speed over all waypoints, mm/s.
    pub fn peak_speed(&self) -> f64 {
        self.waypoints.iter().map(|w| w.speed).fold(0.0, f64::max)
    }
}
