use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pinch::plan_pinch;
use super::slip::{predict_slip, GRAVITY_MM_S2};
use super::trajectory::{Phase, TrialTrajectory};
use super::{read_items_csv, FoodItem};
use crate::mechanism::DualConfig;
use crate::vector::Vec3;

/// Per-contact grip force used when none is given, N.
pub const DEFAULT_GRIP_FORCE: f64 = 2.0;

/// How one item is gripped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripParams {
    /// N
    pub grip_force: f64,
    /// Object center in the end-effector frame; defaults to the platform
    /// axis midway, 10 mm past the zero-pose tip height.
    pub center: Option<Vec3<f64>>,
}

impl Default for GripParams {
    fn default() -> Self {
        Self {
            grip_force: DEFAULT_GRIP_FORCE,
            center: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub name: String,
    pub mass_g: f64,
    pub width: f64,
    pub grip_force: f64,
    pub rot: Option<bool>,
    pub lin: Option<bool>,
    pub limiting_phase: Option<Phase>,
    /// Smallest friction surplus over all phases, N.
    pub margin: Option<f64>,
    pub error: Option<String>,
}

/// Items from the bundled fixture: published masses and sizes with
/// synthetic friction and stiffness.
pub fn reference_items() -> Vec<FoodItem> {
    read_items_csv(include_str!("../../fixtures/food_items.csv").as_bytes())
        .expect("bundled fixture parses")
}

/// Plans and scores every item; planning failures are recorded in the row
/// and the suite moves on. `grips[i]` applies to `items[i]`; missing
/// entries use [`GripParams::default`].
pub fn run_trial_suite(
    config: &DualConfig,
    items: &[FoodItem],
    grips: &[GripParams],
    traj: &TrialTrajectory,
) -> Vec<TrialRow> {
    let default_center = Vec3::new(0.0, 0.0, config.left.zero_pose_z() + 10.0);
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let grip = grips.get(i).copied().unwrap_or_default();
            let mut row = TrialRow {
                name: item.name.clone(),
                mass_g: item.mass_g,
                width: item.width(),
                grip_force: grip.grip_force,
                rot: None,
                lin: None,
                limiting_phase: None,
                margin: None,
                error: None,
            };
            if let Err(e) = item.validate() {
                row.error = Some(e.to_owned());
                return row;
            }
            let center = grip.center.unwrap_or(default_center);
            match plan_pinch(
                config,
                center,
                item.width(),
                grip.grip_force,
                item.stiffness,
            ) {
                Ok(plan) => {
                    let report = predict_slip(item, &plan, traj, GRAVITY_MM_S2);
                    row.rot = Some(report.rot);
                    row.lin = Some(report.lin);
                    if let Some(l) = report.limiting() {
                        row.limiting_phase = Some(l.phase);
                        row.margin = Some(l.margin());
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// CSV with header `name,mass_g,width_mm,grip_n,rot,lin,limiting_phase,margin_n,error`;
/// verdicts are `Y`/`N`, empty when planning failed.
pub fn render_trial_csv(rows: &[TrialRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let yn = |v: Option<bool>| match v {
        Some(true) => "Y".to_owned(),
        Some(false) => "N".to_owned(),
        None => String::new(),
    };
    w.write_record([
        "name",
        "mass_g",
        "width_mm",
        "grip_n",
        "rot",
        "lin",
        "limiting_phase",
        "margin_n",
        "error",
    ])
    .expect("in-memory write");
    for r in rows {
        let mut margin = String::new();
        if let Some(m) = r.margin {
            let _ = write!(margin, "{m:.6}");
        }
        w.write_record([
            r.name.clone(),
            r.mass_g.to_string(),
            r.width.to_string(),
            r.grip_force.to_string(),
            yn(r.rot),
            yn(r.lin),
            r.limiting_phase
                .map(|p| p.as_str().to_owned())
                .unwrap_or_default(),
            margin,
            r.error.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
