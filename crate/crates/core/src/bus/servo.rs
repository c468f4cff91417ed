use serde::{Deserialize, Serialize};

use crate::mechanism::Interval;
use crate::workspace::DEFAULT_EPSILON_SERVO_DEG;

/// Servo time constant, s.
pub const DEFAULT_TAU: f64 = 0.05;
/// Servo backlash deadband, degrees.
pub const DEFAULT_DEADBAND_DEG: f64 = DEFAULT_EPSILON_SERVO_DEG;

/// First-order servo with a backlash deadband.
///
/// Units follow the axis: degrees for the horn servos, mm for the
/// leadscrew.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoSimState {
    pub position: f64,
    pub goal: f64,
    /// s
    pub tau: f64,
    pub deadband: f64,
    pub rom: Interval<f64>,
}

impl ServoSimState {
    /// At rest at `position`, clamped to `rom`.
    pub fn at_rest(position: f64, tau: f64, deadband: f64, rom: Interval<f64>) -> Self {
        let position = rom.clamp(position);
        Self {
            position,
            goal: position,
            tau,
            deadband,
            rom,
        }
    }

    /// Sets the goal, clamped to the range of motion.
    pub fn set_goal(&mut self, goal: f64) {
        self.goal = self.rom.clamp(goal);
    }

    pub fn error(&self) -> f64 {
        self.goal - self.position
    }
}

/// Advances the servo by `dt` seconds.
///
/// The servo moves only while the goal is more than one deadband away, and
/// then lags towards a point half a deadband short of the goal. A
/// non-positive or non-finite `dt` leaves the state unchanged.
pub fn step_servo(state: ServoSimState, dt: f64) -> ServoSimState {
    if !(dt > 0.0) || !dt.is_finite() {
        return state;
    }
    let gap = state.goal - state.position;
    if gap.abs() <= state.deadband {
        return state;
    }
    let goal_eff = state.goal - gap.signum() * state.deadband / 2.0;
    let alpha = if state.tau > 0.0 {
        1.0 - (-dt / state.tau).exp()
    } else {
        1.0
    };
    let position = state
        .rom
        .clamp(state.position + (goal_eff - state.position) * alpha);
    ServoSimState { position, ..state }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn servo(pos: f64, goal: f64) -> ServoSimState {
        let mut s = ServoSimState::at_rest(
            pos,
            DEFAULT_TAU,
            DEFAULT_DEADBAND_DEG,
            Interval::new(-90.0, 90.0),
        );
        s.set_goal(goal);
        s
    }

    #[test]
    fn fixed_point_and_deadband() {
        assert_eq!(step_servo(servo(10.0, 10.0), 0.01), servo(10.0, 10.0));
        assert_eq!(step_servo(servo(10.0, 10.1), 0.01), servo(10.0, 10.1));
        assert_eq!(step_servo(servo(0.0, 90.0), 0.0), servo(0.0, 90.0));
    }

    #[test]
    fn one_time_constant() {
        let s = step_servo(servo(0.0, 90.0), 0.05);
        let want = (1.0 - (-1.0f64).exp()) * (90.0 - 0.125);
        assert!((s.position - want).abs() < 1e-12);
    }

    #[test]
    fn goal_is_clamped() {
        assert_eq!(servo(0.0, 120.0).goal, 90.0);
    }
}
