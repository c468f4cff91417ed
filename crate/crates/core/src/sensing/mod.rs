//! Six-axis force/torque sensing: a 10-bit sensor model, taring, contact
//! detection, simulated grip cycles and contact-stiffness estimation.
//!
//! Forces are in N, torques in mNm (equivalently N·mm) and times in s.

mod sim;
mod stiffness;
mod stream;

pub use sim::{
    read_materials_csv, reference_materials, simulate_grip_cycle, GripCycle, Material,
    MaterialCsvError, DEFAULT_LEVER_ARM_MM,
};
pub use stiffness::{
    estimate_stiffness, estimate_stiffness_per_event, estimate_stiffness_with, StiffnessEstimate,
    StiffnessOptions,
};
pub use stream::{
    apply_bias, detect_contact, detect_contact_smoothed, read_samples_csv, tare, write_samples_csv,
    Bias, ContactEvent, SampleCsvError, SenseError, DEFAULT_HYSTERESIS, DEFAULT_SMOOTHING,
    DEFAULT_THRESHOLD, MIN_TARE_SAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::vector::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtSample {
    pub t: f64,
    pub force: Vec3<f64>,
    pub torque: Vec3<f64>,
    /// Values lie on the converter grid.
    pub quantized: bool,
    /// Some channel was clamped to full scale.
    pub saturated: bool,
}

impl FtSample {
    pub fn new(t: f64, force: Vec3<f64>, torque: Vec3<f64>) -> Self {
        Self {
            t,
            force,
            torque,
            quantized: false,
            saturated: false,
        }
    }

    pub fn channels(&self) -> [f64; 6] {
        [
            self.force.x,
            self.force.y,
            self.force.z,
            self.torque.x,
            self.torque.y,
            self.torque.z,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    /// N, symmetric.
    pub full_scale_force: f64,
    /// mNm, symmetric.
    pub full_scale_torque: f64,
    pub resolution_bits: u32,
    /// Hz
    pub rate: f64,
    /// Gaussian noise per force channel, N. Synthetic default.
    pub noise_std: f64,
    /// Force offset growth on the grip axis, N/s. Synthetic default.
    pub drift_rate: f64,
    /// Distance from the sensor to the contact point along the chopstick, mm.
    pub lever_arm: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            full_scale_force: 25.0,
            full_scale_torque: 125.0,
            resolution_bits: 10,
            rate: 1000.0,
            noise_std: 0.02,
            drift_rate: 0.001,
            lever_arm: DEFAULT_LEVER_ARM_MM,
        }
    }
}

impl SensorModel {
    pub fn is_valid(&self) -> bool {
        self.resolution_bits >= 1
            && self.resolution_bits <= 31
            && self.rate > 0.0
            && self.full_scale_force > 0.0
            && self.full_scale_torque > 0.0
            && self.noise_std >= 0.0
    }

    /// Force step of the converter: span / 2^bits.
    pub fn lsb_force(&self) -> f64 {
        2.0 * self.full_scale_force / self.levels() as f64
    }

    pub fn lsb_torque(&self) -> f64 {
        2.0 * self.full_scale_torque / self.levels() as f64
    }

    fn levels(&self) -> u64 {
        1u64 << self.resolution_bits
    }

    /// Inclusive code range: zero is a code, so the top of the span is one
    /// step short of full scale.
    pub fn code_range(&self) -> (i64, i64) {
        let half = (self.levels() / 2) as i64;
        (-half, half - 1)
    }

    /// Converter code of `v` for a channel with step `lsb`, and whether it
    /// was clamped.
    pub fn code(&self, v: f64, lsb: f64) -> (i64, bool) {
        let (lo, hi) = self.code_range();
        let raw = (v / lsb).round();
        if raw > hi as f64 {
            (hi, true)
        } else if raw < lo as f64 {
            (lo, true)
        } else {
            (raw as i64, false)
        }
    }
}

/// Rounds every channel to its nearest code, clamping out-of-range values
/// to the extreme codes and flagging them.
pub fn quantize(model: &SensorModel, s: &FtSample) -> FtSample {
    let (lf, lt) = (model.lsb_force(), model.lsb_torque());
    let mut saturated = s.saturated;
    let mut q = |v: f64, lsb: f64| {
        let (c, sat) = model.code(v, lsb);
        saturated |= sat;
        c as f64 * lsb
    };
    let force = Vec3::new(q(s.force.x, lf), q(s.force.y, lf), q(s.force.z, lf));
    let torque = Vec3::new(q(s.torque.x, lt), q(s.torque.y, lt), q(s.torque.z, lt));
    FtSample {
        t: s.t,
        force,
        torque,
        quantized: true,
        saturated,
    }
}
