use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{quantize, FtSample, SenseError, SensorModel};
use crate::vector::Vec3;

pub const DEFAULT_LEVER_ARM_MM: f64 = 20.0;

/// Gap kept between the sticks and the object when open, mm.
const OPEN_CLEARANCE: f64 = 5.0;
const OPEN_HOLD_S: f64 = 0.3;
const RAMP_S: f64 = 0.3;
const CLOSED_HOLD_S: f64 = 0.4;

/// Commanded stick separation sampled at the sensor rate, against an
/// object modeled as a linear spring of width `rest_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripCycle {
    /// mm, one value per sensor sample.
    pub separation: Vec<f64>,
    /// N/mm
    pub stiffness: f64,
    /// mm
    pub rest_width: f64,
}

impl GripCycle {
    /// `cycles` identical close/hold/open cycles squeezing the object by
    /// `penetration` mm, each preceded by an open rest period.
    pub fn repeated(
        rate: f64,
        stiffness: f64,
        rest_width: f64,
        penetration: f64,
        cycles: usize,
    ) -> Self {
        let open = rest_width + OPEN_CLEARANCE;
        let closed = (rest_width - penetration).max(0.0);
        let n = |s: f64| (s * rate).round() as usize;
        let mut sep = Vec::new();
        let ramp = |sep: &mut Vec<f64>, from: f64, to: f64| {
            let k = n(RAMP_S);
            sep.extend((1..=k).map(|i| from + (to - from) * i as f64 / k as f64));
        };
        for _ in 0..cycles {
            sep.extend(std::iter::repeat_n(open, n(OPEN_HOLD_S)));
            ramp(&mut sep, open, closed);
            sep.extend(std::iter::repeat_n(closed, n(CLOSED_HOLD_S)));
            ramp(&mut sep, closed, open);
        }
        sep.extend(std::iter::repeat_n(open, n(OPEN_HOLD_S)));
        Self {
            separation: sep,
            stiffness,
            rest_width,
        }
    }

    pub fn validate(&self) -> Result<(), SenseError> {
        if !(self.stiffness > 0.0 && self.stiffness.is_finite()) {
            return Err(SenseError::InvalidCycle("stiffness must be positive"));
        }
        if !(self.rest_width > 0.0) {
            return Err(SenseError::InvalidCycle("rest width must be positive"));
        }
        if self
            .separation
            .iter()
            .any(|s| !(*s >= 0.0) || !s.is_finite())
        {
            return Err(SenseError::InvalidCycle(
                "separation must be finite and non-negative",
            ));
        }
        Ok(())
    }

    pub fn penetration(&self, i: usize) -> f64 {
        (self.rest_width - self.separation[i]).max(0.0)
    }
}

/// Sensor stream for a grip cycle: spring force on the grip axis (x) plus
/// Gaussian noise on every force channel and a drift ramp on the grip
/// axis, torques from the contact lever arm, all quantized.
pub fn simulate_grip_cycle(
    model: &SensorModel,
    cycle: &GripCycle,
    seed: u64,
) -> Result<Vec<FtSample>, SenseError> {
    if !model.is_valid() {
        return Err(SenseError::InvalidModel);
    }
    cycle.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, model.noise_std).map_err(|_| SenseError::InvalidModel)?;
    let lever = model.lever_arm;
    Ok((0..cycle.separation.len())
        .map(|i| {
            let t = i as f64 / model.rate;
            let mut draw = || noise.sample(&mut rng);
            let fx = cycle.stiffness * cycle.penetration(i) + draw() + model.drift_rate * t;
            let force = Vec3::new(fx, draw(), draw());
            // contact point sits `lever` mm below the sensor
            let torque = Vec3::new(lever * force.y, -lever * force.x, 0.0);
            quantize(model, &FtSample::new(t, force, torque))
        })
        .collect())
}

/// A test object for grip cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// N/mm
    pub stiffness: f64,
    /// mm
    pub rest_width: f64,
    /// Squeeze depth per cycle, mm.
    pub penetration: f64,
}

impl Material {
    pub fn cycle(&self, rate: f64, cycles: usize) -> GripCycle {
        GripCycle::repeated(
            rate,
            self.stiffness,
            self.rest_width,
            self.penetration,
            cycles,
        )
    }
}

/// Five cast-silicone blocks from soft to firm. Stiffness values are
/// synthetic; only their order is meaningful.
pub fn reference_materials() -> Vec<Material> {
    [
        ("00-40", 0.2),
        ("00-45", 0.35),
        ("00-50", 0.5),
        ("A-83", 0.8),
        ("A-95", 1.0),
    ]
    .into_iter()
    .map(|(name, k)| Material {
        name: name.to_owned(),
        stiffness: k,
        rest_width: 30.0,
        penetration: 3.0,
    })
    .collect()
}

#[derive(Debug, Error)]
pub enum MaterialCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

/// Reads `name,stiffness,rest_width,penetration` rows.
pub fn read_materials_csv<R: Read>(input: R) -> Result<Vec<Material>, MaterialCsvError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out = Vec::new();
    for (i, m) in r.deserialize::<Material>().enumerate() {
        let bad = |reason: String| MaterialCsvError::BadRow { row: i + 1, reason };
        let m = m.map_err(|e| bad(e.to_string()))?;
        if !(m.stiffness > 0.0 && m.rest_width > 0.0 && m.penetration >= 0.0) {
            return Err(bad(
                "stiffness and width must be positive, penetration non-negative".into(),
            ));
        }
        out.push(m);
    }
    Ok(out)
}
