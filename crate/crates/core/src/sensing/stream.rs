use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::FtSample;
use crate::vector::Vec3;

pub const MIN_TARE_SAMPLES: usize = 10;
/// Contact onset force, N: three times the default noise.
pub const DEFAULT_THRESHOLD: f64 = 0.15;
pub const DEFAULT_HYSTERESIS: f64 = 0.05;
/// Trailing average length, samples, used by the stiffness pipeline.
pub const DEFAULT_SMOOTHING: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SenseError {
    #[error("tare window holds {found} samples, need {needed}")]
    WindowTooShort { found: usize, needed: usize },
    #[error("need threshold > hysteresis > 0")]
    InvalidThreshold,
    #[error("no contact in stream")]
    NoContact,
    #[error("closure series has {closure} points for {samples} samples")]
    LengthMismatch { samples: usize, closure: usize },
    #[error("sensor model is invalid")]
    InvalidModel,
    #[error("grip cycle is invalid: {0}")]
    InvalidCycle(&'static str),
}

/// Per-channel offset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bias {
    pub force: Vec3<f64>,
    pub torque: Vec3<f64>,
}

/// Mean of every channel over samples with `t < t_first + window`.
pub fn tare(stream: &[FtSample], window: f64) -> Result<Bias, SenseError> {
    let Some(first) = stream.first() else {
        return Err(SenseError::WindowTooShort {
            found: 0,
            needed: MIN_TARE_SAMPLES,
        });
    };
    let end = first.t + window;
    let inside: Vec<&FtSample> = stream.iter().take_while(|s| s.t < end).collect();
    if inside.len() < MIN_TARE_SAMPLES {
        return Err(SenseError::WindowTooShort {
            found: inside.len(),
            needed: MIN_TARE_SAMPLES,
        });
    }
    let mut sum = [0.0; 6];
    for s in &inside {
        for (acc, v) in sum.iter_mut().zip(s.channels()) {
            *acc += v;
        }
    }
    let n = inside.len() as f64;
    let m = sum.map(|v| v / n);
    Ok(Bias {
        force: Vec3::new(m[0], m[1], m[2]),
        torque: Vec3::new(m[3], m[4], m[5]),
    })
}

/// Subtracts `bias` from every sample. The result is no longer on the
/// converter grid.
pub fn apply_bias(stream: &[FtSample], bias: &Bias) -> Vec<FtSample> {
    stream
        .iter()
        .map(|s| FtSample {
            force: s.force - bias.force,
            torque: s.torque - bias.torque,
            quantized: false,
            ..*s
        })
        .collect()
}

/// Onset and release of one contact; `release` is `None` when the stream
/// ends in contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub onset: f64,
    pub release: Option<f64>,
}

/// Contacts found by a two-level trigger on the force magnitude: onset at
/// the first sample reaching `threshold`, release at the first later sample
/// below `threshold - hysteresis`.
pub fn detect_contact(
    stream: &[FtSample],
    threshold: f64,
    hysteresis: f64,
) -> Result<Vec<ContactEvent>, SenseError> {
    detect_contact_smoothed(stream, threshold, hysteresis, 1)
}

/// [`detect_contact`] on the trailing mean of the last `window` force
/// magnitudes, which keeps converter steps near the trigger levels from
/// splitting one contact into several.
pub fn detect_contact_smoothed(
    stream: &[FtSample],
    threshold: f64,
    hysteresis: f64,
    window: usize,
) -> Result<Vec<ContactEvent>, SenseError> {
    if !(hysteresis > 0.0 && threshold > hysteresis) || window == 0 {
        return Err(SenseError::InvalidThreshold);
    }
    let release_level = threshold - hysteresis;
    let mut events = Vec::new();
    let mut open: Option<f64> = None;
    let mags: Vec<f64> = stream.iter().map(|s| s.force.norm()).collect();
    let mut acc = 0.0;
    for (i, s) in stream.iter().enumerate() {
        acc += mags[i];
        if i >= window {
            acc -= mags[i - window];
        }
        let f = acc / window.min(i + 1) as f64;
        match open {
            None if f >= threshold => open = Some(s.t),
            Some(onset) if f < release_level => {
                events.push(ContactEvent {
                    onset,
                    release: Some(s.t),
                });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(onset) = open {
        events.push(ContactEvent {
            onset,
            release: None,
        });
    }
    Ok(events)
}

#[derive(Debug, Error)]
pub enum SampleCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

#[derive(Serialize, Deserialize)]
struct Row {
    t: f64,
    fx: f64,
    fy: f64,
    fz: f64,
    tx: f64,
    ty: f64,
    tz: f64,
    flags: u8,
}

const FLAG_QUANTIZED: u8 = 1;
const FLAG_SATURATED: u8 = 2;

/// Writes `t,fx,fy,fz,tx,ty,tz,flags`; flag bit 0 marks quantized samples,
/// bit 1 saturated ones.
pub fn write_samples_csv<W: Write>(stream: &[FtSample], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for s in stream {
        w.serialize(Row {
            t: s.t,
            fx: s.force.x,
            fy: s.force.y,
            fz: s.force.z,
            tx: s.torque.x,
            ty: s.torque.y,
            tz: s.torque.z,
            flags: (s.quantized as u8 * FLAG_QUANTIZED) | (s.saturated as u8 * FLAG_SATURATED),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<FtSample>, SampleCsvError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for (i, row) in r.deserialize::<Row>().enumerate() {
        let bad = |reason: String| SampleCsvError::BadRow { row: i + 1, reason };
        let row = row.map_err(|e| bad(e.to_string()))?;
        if !(row.t > last_t) {
            return Err(bad("timestamps must increase".into()));
        }
        last_t = row.t;
        out.push(FtSample {
            t: row.t,
            force: Vec3::new(row.fx, row.fy, row.fz),
            torque: Vec3::new(row.tx, row.ty, row.tz),
            quantized: row.flags & FLAG_QUANTIZED != 0,
            saturated: row.flags & FLAG_SATURATED != 0,
        });
    }
    Ok(out)
}
