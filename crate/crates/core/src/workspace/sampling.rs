use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{inverse_kinematics, IkError};
use crate::mechanism::{MechanismParams, TipPose};
use crate::scalar::{lit, to_f64, Real};
use crate::vector::Vec3;

/// Half-width of the validated square workspace around the platform axis, mm.
pub const DEFAULT_BOX_HALF_WIDTH: f64 = 40.0;

/// Axis-aligned sampling region, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub min: Vec3<f64>,
    pub max: Vec3<f64>,
}

impl BoxRegion {
    pub fn new(min: Vec3<f64>, max: Vec3<f64>) -> Self {
        Self { min, max }
    }

    /// `±40 × ±40` mm around the axis, spanning the full travel above the
    /// zero pose.
    pub fn default_for<T: Real>(params: &MechanismParams<T>) -> Self {
        let z0 = to_f64(params.zero_pose_z()) + to_f64(params.travel.min);
        let h = DEFAULT_BOX_HALF_WIDTH;
        Self::new(
            Vec3::new(-h, -h, z0),
            Vec3::new(h, h, z0 + to_f64(params.travel.width())),
        )
    }

    /// A box is degenerate when any side is non-positive or not finite.
    pub fn is_degenerate(&self) -> bool {
        let d = self.max - self.min;
        !(d.x > 0.0 && d.y > 0.0 && d.z > 0.0) || !d.is_finite() || !self.min.is_finite()
    }

    pub fn volume(&self) -> f64 {
        let d = self.max - self.min;
        d.x * d.y * d.z
    }
}

/// IK failure class of an unreachable sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    OutOfReach,
    TravelExceeded,
    LinkageInfeasible,
    RomViolated,
    NonFinite,
}

impl FailureKind {
    pub fn of(err: &IkError) -> Self {
        match err {
            IkError::OutOfReach { .. } => Self::OutOfReach,
            IkError::TravelExceeded { .. } => Self::TravelExceeded,
            IkError::LinkageInfeasible { .. } => Self::LinkageInfeasible,
            IkError::RomViolated { .. } => Self::RomViolated,
            IkError::NonFinite => Self::NonFinite,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::OutOfReach => "out_of_reach",
            Self::TravelExceeded => "travel_exceeded",
            Self::LinkageInfeasible => "linkage_infeasible",
            Self::RomViolated => "rom_violated",
            Self::NonFinite => "non_finite",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Self::OutOfReach,
            Self::TravelExceeded,
            Self::LinkageInfeasible,
            Self::RomViolated,
            Self::NonFinite,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceSample<T = f64> {
    pub target: TipPose<T>,
    pub reachable: bool,
    pub failure: Option<FailureKind>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample count must be positive")]
    EmptyRequest,
    #[error("sampling box is degenerate")]
    DegenerateBox,
}

/// Classifies `target` by running inverse kinematics on it.
pub fn classify<T: Real>(params: &MechanismParams<T>, target: TipPose<T>) -> WorkspaceSample<T> {
    match inverse_kinematics(params, target) {
        Ok(_) => WorkspaceSample {
            target,
            reachable: true,
            failure: None,
        },
        Err(e) => WorkspaceSample {
            target,
            reachable: false,
            failure: Some(FailureKind::of(&e)),
        },
    }
}

/// Uniform targets in `region`, drawn x, y, z per point from a ChaCha8
/// stream seeded with `seed`.
pub fn uniform_targets<T: Real>(n: usize, region: &BoxRegion, seed: u64) -> Vec<TipPose<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: f64, hi: f64| lit::<T>(lo + (hi - lo) * rng.random::<f64>());
    (0..n)
        .map(|_| {
            let x = draw(region.min.x, region.max.x);
            let y = draw(region.min.y, region.max.y);
            let z = draw(region.min.z, region.max.z);
            TipPose::new(x, y, z)
        })
        .collect()
}

/// Draws `n` uniform targets from `region` and classifies each one.
pub fn sample_workspace<T: Real>(
    params: &MechanismParams<T>,
    n: usize,
    region: &BoxRegion,
    seed: u64,
) -> Result<Vec<WorkspaceSample<T>>, SampleError> {
    if n == 0 {
        return Err(SampleError::EmptyRequest);
    }
    if region.is_degenerate() {
        return Err(SampleError::DegenerateBox);
    }
    Ok(uniform_targets(n, region, seed)
        .into_iter()
        .map(|t| classify(params, t))
        .collect())
}

/// Reachable and unreachable counts.
pub fn count_reachable<T>(samples: &[WorkspaceSample<T>]) -> (usize, usize) {
    let ok = samples.iter().filter(|s| s.reachable).count();
    (ok, samples.len() - ok)
}

#[derive(Debug, Error)]
pub enum SampleCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    x: f64,
    y: f64,
    z: f64,
    reachable: u8,
    failure: String,
}

/// Writes samples as CSV with header `x,y,z,reachable,failure`.
pub fn write_samples_csv<T: Real, W: Write>(
    samples: &[WorkspaceSample<T>],
    out: W,
) -> Result<(), SampleCsvError> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(SampleRow {
            x: to_f64(s.target.x),
            y: to_f64(s.target.y),
            z: to_f64(s.target.z),
            reachable: s.reachable as u8,
            failure: s.failure.map(|f| f.as_str().to_owned()).unwrap_or_default(),
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads samples written by [`write_samples_csv`]. Rows are numbered from 1
/// after the header.
pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<WorkspaceSample>, SampleCsvError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<SampleRow>().enumerate() {
        let row = row.map_err(|e| SampleCsvError::BadRow {
            row: i + 1,
            reason: e.to_string(),
        })?;
        let failure = match row.failure.as_str() {
            "" => None,
            s => Some(FailureKind::parse(s).ok_or_else(|| SampleCsvError::BadRow {
                row: i + 1,
                reason: format!("unknown failure kind `{s}`"),
            })?),
        };
        let reachable = row.reachable != 0;
        if reachable == failure.is_some() {
            return Err(SampleCsvError::BadRow {
                row: i + 1,
                reason: "reachable and failure disagree".into(),
            });
        }
        out.push(WorkspaceSample {
            target: TipPose::new(row.x, row.y, row.z),
            reachable,
            failure,
        });
    }
    Ok(out)
}
