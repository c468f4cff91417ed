//! Pinch planning for the two chopsticks, grasp-trial trajectories and a
//! friction-based slip predictor.

mod pinch;
mod slip;
mod suite;
mod trajectory;

pub use pinch::{plan_pinch, to_platform_frame, PinchError, PinchPlan, Side};
pub use slip::{predict_slip, PhaseVerdict, SlipReport, GRAVITY_MM_S2};
pub use suite::{
    reference_items, render_trial_csv, run_trial_suite, GripParams, TrialRow, DEFAULT_GRIP_FORCE,
};
pub use trajectory::{
    build_trial_trajectory, Phase, RotationAxis, Segment, TrajectoryError, Trapezoid,
    TrialProtocol, TrialTrajectory, Waypoint, WAYPOINT_DT,
};

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A food item for grasp trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoodItem {
    pub name: String,
    pub mass_g: f64,
    /// Length, width and height, mm. The grasp closes across the width.
    pub dims: [f64; 3],
    /// Friction coefficient against the silicone tip.
    pub mu: f64,
    /// Contact stiffness, N/mm.
    pub stiffness: f64,
}

impl FoodItem {
    pub fn width(&self) -> f64 {
        self.dims[1]
    }

    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.mass_g > 0.0) {
            return Err("mass must be positive");
        }
        if !self.dims.iter().all(|d| *d > 0.0) {
            return Err("dimensions must be positive");
        }
        if !(self.mu > 0.0) {
            return Err("friction coefficient must be positive");
        }
        if !(self.stiffness > 0.0) {
            return Err("stiffness must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ItemCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

#[derive(Deserialize)]
struct ItemRow {
    name: String,
    mass_g: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "W")]
    w: f64,
    #[serde(rename = "H")]
    h: f64,
    mu: f64,
    k: f64,
}

/// Reads `name,mass_g,L,W,H,mu,k` rows; lines starting with `#` are
/// comments.
pub fn read_items_csv<R: Read>(input: R) -> Result<Vec<FoodItem>, ItemCsvError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<ItemRow>().enumerate() {
        let bad = |reason: String| ItemCsvError::BadRow { row: i + 1, reason };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let item = FoodItem {
            name: row.name,
            mass_g: row.mass_g,
            dims: [row.l, row.w, row.h],
            mu: row.mu,
            stiffness: row.k,
        };
        item.validate().map_err(|e| bad(e.into()))?;
        out.push(item);
    }
    Ok(out)
}
