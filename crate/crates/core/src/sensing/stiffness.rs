use serde::{Deserialize, Serialize};

use super::stream::{apply_bias, detect_contact_smoothed, tare, ContactEvent, SenseError};
use super::{FtSample, DEFAULT_HYSTERESIS, DEFAULT_SMOOTHING, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessEstimate {
    /// N/mm
    pub k_hat: f64,
    pub r_squared: f64,
    /// Time of the first detected contact, s.
    pub contact_onset: f64,
    pub events: usize,
    /// Samples used in the fit.
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessOptions {
    pub threshold: f64,
    pub hysteresis: f64,
    /// Trailing average length for contact detection, samples.
    pub smoothing: usize,
    /// Leading contact-free span used for taring, s.
    pub tare_window: f64,
}

impl Default for StiffnessOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            hysteresis: DEFAULT_HYSTERESIS,
            smoothing: DEFAULT_SMOOTHING,
            tare_window: 0.1,
        }
    }
}

pub fn estimate_stiffness(
    stream: &[FtSample],
    closure: &[f64],
) -> Result<StiffnessEstimate, SenseError> {
    estimate_stiffness_with(stream, closure, &StiffnessOptions::default())
}

/// Tares on the leading window, detects contacts on the smoothed force, and fits force magnitude
/// against closure depth (negated separation) over all contact samples.
/// The fitted intercept absorbs the unknown object width, so `closure` is
/// the commanded separation itself, one value per sample.
pub fn estimate_stiffness_with(
    stream: &[FtSample],
    closure: &[f64],
    opts: &StiffnessOptions,
) -> Result<StiffnessEstimate, SenseError> {
    let (tared, events) = prepare(stream, closure, opts)?;
    let first = events.first().ok_or(SenseError::NoContact)?.onset;
    let idx: Vec<usize> = events
        .iter()
        .flat_map(|e| contact_indices(&tared, e))
        .collect();
    let mut est = fit(&tared, closure, &idx)?;
    est.contact_onset = first;
    est.events = events.len();
    Ok(est)
}

/// One estimate per contact event.
pub fn estimate_stiffness_per_event(
    stream: &[FtSample],
    closure: &[f64],
    opts: &StiffnessOptions,
) -> Result<Vec<StiffnessEstimate>, SenseError> {
    let (tared, events) = prepare(stream, closure, opts)?;
    if events.is_empty() {
        return Err(SenseError::NoContact);
    }
    events
        .iter()
        .map(|e| {
            let mut est = fit(&tared, closure, &contact_indices(&tared, e))?;
            est.contact_onset = e.onset;
            est.events = 1;
            Ok(est)
        })
        .collect()
}

fn prepare(
    stream: &[FtSample],
    closure: &[f64],
    opts: &StiffnessOptions,
) -> Result<(Vec<FtSample>, Vec<ContactEvent>), SenseError> {
    if stream.len() != closure.len() {
        return Err(SenseError::LengthMismatch {
            samples: stream.len(),
            closure: closure.len(),
        });
    }
    let bias = tare(stream, opts.tare_window)?;
    let tared = apply_bias(stream, &bias);
    let events = detect_contact_smoothed(&tared, opts.threshold, opts.hysteresis, opts.smoothing)?;
    Ok((tared, events))
}

fn contact_indices(stream: &[FtSample], e: &ContactEvent) -> Vec<usize> {
    let end = e.release.unwrap_or(f64::INFINITY);
    stream
        .iter()
        .enumerate()
        .filter(|(_, s)| s.t >= e.onset && s.t < end)
        .map(|(i, _)| i)
        .collect()
}

fn fit(
    stream: &[FtSample],
    closure: &[f64],
    idx: &[usize],
) -> Result<StiffnessEstimate, SenseError> {
    let n = idx.len();
    if n < 2 {
        return Err(SenseError::NoContact);
    }
    let xs: Vec<f64> = idx.iter().map(|&i| -closure[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| stream[i].force.norm()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        // constant closure depth: no slope to fit
        return Err(SenseError::NoContact);
    }
    let k_hat = sxy / sxx;
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(StiffnessEstimate {
        k_hat,
        r_squared,
        contact_onset: 0.0,
        events: 0,
        n,
    })
}
