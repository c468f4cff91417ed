//! Commanded-versus-observed pose statistics.
//!
//! Pose pairs come from CSV exports with the header `cx,cy,cz,ox,oy,oz`
//! and an optional trailing `tag` column, all in mm. The report holds the
//! mean and sample standard deviation of the Euclidean tip error, the same
//! for the absolute error along each axis, and a least-squares line of the
//! Euclidean error against the commanded distance from the platform axis.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanism::TipPose;

pub const POSE_COLUMNS: [&str; 6] = ["cx", "cy", "cz", "ox", "oy", "oz"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosePairRecord {
    pub commanded: TipPose,
    pub observed: TipPose,
    pub tag: Option<String>,
}

impl PosePairRecord {
    pub fn new(commanded: TipPose, observed: TipPose) -> Self {
        Self {
            commanded,
            observed,
            tag: None,
        }
    }

    pub fn l2_error(&self) -> f64 {
        self.commanded.distance(&self.observed)
    }

    pub fn axis_errors(&self) -> [f64; 3] {
        let (c, o) = (&self.commanded, &self.observed);
        [(c.x - o.x).abs(), (c.y - o.y).abs(), (c.z - o.z).abs()]
    }
}

impl From<(TipPose, TipPose)> for PosePairRecord {
    fn from((c, o): (TipPose, TipPose)) -> Self {
        Self::new(c, o)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row} (line {line}): field `{column}` = {value:?} is not a finite number")]
    NonNumericField {
        row: usize,
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("no data rows")]
    EmptyFile,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads pose pairs from a CSV file.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<Vec<PosePairRecord>, IngestError> {
    ingest_reader(std::fs::File::open(path)?)
}

/// Reads pose pairs from CSV text. Rows are numbered from 1 after the header.
pub fn ingest_reader<R: Read>(input: R) -> Result<Vec<PosePairRecord>, IngestError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = r.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(IngestError::EmptyFile);
    }
    let find = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 6];
    for (slot, name) in idx.iter_mut().zip(POSE_COLUMNS) {
        *slot = find(name).ok_or_else(|| IngestError::MissingColumn(name.to_owned()))?;
    }
    let tag = find("tag");

    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let mut v = [0.0; 6];
        for (k, &col) in idx.iter().enumerate() {
            let raw = rec.get(col).unwrap_or("");
            v[k] = raw
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| IngestError::NonNumericField {
                    row: i + 1,
                    line,
                    column: POSE_COLUMNS[k],
                    value: raw.to_owned(),
                })?;
        }
        out.push(PosePairRecord {
            commanded: TipPose::new(v[0], v[1], v[2]),
            observed: TipPose::new(v[3], v[4], v[5]),
            tag: tag
                .and_then(|t| rec.get(t))
                .filter(|s| !s.is_empty())
                .map(str::to_owned),
        });
    }
    if out.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(out)
}

/// Writes pose pairs in the ingestion schema; the tag column is present
/// only when some record carries a tag.
pub fn write_pairs_csv<W: Write>(records: &[PosePairRecord], out: W) -> Result<(), csv::Error> {
    let tagged = records.iter().any(|r| r.tag.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = POSE_COLUMNS.to_vec();
    if tagged {
        header.push("tag");
    }
    w.write_record(&header)?;
    for r in records {
        let (c, o) = (&r.commanded, &r.observed);
        let mut row: Vec<String> = [c.x, c.y, c.z, o.x, o.y, o.z]
            .iter()
            .map(|v| v.to_string())
            .collect();
        if tagged {
            row.push(r.tag.clone().unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mean_l2: f64,
    pub std_l2: f64,
    pub x: AxisStats,
    pub y: AxisStats,
    pub z: AxisStats,
    /// Error growth per mm of commanded radial distance.
    pub slope: f64,
    /// Pearson correlation of error with commanded radial distance.
    pub r: f64,
    pub n: usize,
}

/// Published hardware figures, printed for comparison only.
pub const REFERENCE_ROW: ReferenceRow = ReferenceRow {
    mean_l2: AxisStats {
        mean: 2.93,
        std: 1.30,
    },
    x: AxisStats {
        mean: 1.88,
        std: 1.10,
    },
    y: AxisStats {
        mean: 1.79,
        std: 1.15,
    },
    z: AxisStats {
        mean: 0.79,
        std: 0.61,
    },
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub mean_l2: AxisStats,
    pub x: AxisStats,
    pub y: AxisStats,
    pub z: AxisStats,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("need at least 2 records, got {0}")]
    InsufficientData(usize),
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> AxisStats {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    AxisStats {
        mean,
        std: (ss / (n - 1.0)).sqrt(),
    }
}

/// Least-squares slope and Pearson correlation of `ys` on `xs`. Both are
/// zero when either variable is constant.
pub fn linear_trend(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 0.0);
    }
    (
        sxy / sxx,
        (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
    )
}

pub fn error_report(records: &[PosePairRecord]) -> Result<ErrorReport, ReportError> {
    if records.len() < 2 {
        return Err(ReportError::InsufficientData(records.len()));
    }
    let l2: Vec<f64> = records.iter().map(PosePairRecord::l2_error).collect();
    let axes: Vec<[f64; 3]> = records.iter().map(PosePairRecord::axis_errors).collect();
    let radial: Vec<f64> = records.iter().map(|r| r.commanded.radial()).collect();
    let l2_stats = mean_std(l2.iter().copied());
    let axis = |k: usize| mean_std(axes.iter().map(move |a| a[k]));
    let (slope, r) = linear_trend(&radial, &l2);
    Ok(ErrorReport {
        mean_l2: l2_stats.mean,
        std_l2: l2_stats.std,
        x: axis(0),
        y: axis(1),
        z: axis(2),
        slope,
        r,
        n: records.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Serializes a report.
///
/// * `json`: one object with keys `mean_l2, std_l2, x, y, z, slope, r, n`;
///   each axis is `{"mean", "std"}`.
/// * `csv`: header `label,n,mean_l2,std_l2,x_mean,x_std,y_mean,y_std,z_mean,z_std,slope,r`,
///   a `measured` row and a `reference` row whose `n`, `slope` and `r` are empty.
/// * `text`: aligned table with the reference row and notes.
pub fn render_report(report: &ErrorReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Text => render_text(report),
    }
}

fn render_csv(r: &ErrorReport) -> String {
    let reference = REFERENCE_ROW;
    let mut s =
        String::from("label,n,mean_l2,std_l2,x_mean,x_std,y_mean,y_std,z_mean,z_std,slope,r\n");
    let _ = writeln!(
        s,
        "measured,{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        r.n,
        r.mean_l2,
        r.std_l2,
        r.x.mean,
        r.x.std,
        r.y.mean,
        r.y.std,
        r.z.mean,
        r.z.std,
        r.slope,
        r.r
    );
    let _ = writeln!(
        s,
        "reference,,{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},,",
        reference.mean_l2.mean,
        reference.mean_l2.std,
        reference.x.mean,
        reference.x.std,
        reference.y.mean,
        reference.y.std,
        reference.z.mean,
        reference.z.std
    );
    s
}

fn render_text(r: &ErrorReport) -> String {
    let reference = REFERENCE_ROW;
    let cell = |a: AxisStats| format!("{:>7.3} ± {:<7.3}", a.mean, a.std);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<22}{:>17}{:>17}{:>17}{:>17}",
        "", "L2 (mm)", "x (mm)", "y (mm)", "z (mm)"
    );
    let _ = writeln!(
        s,
        "{:<22}{:>17}{:>17}{:>17}{:>17}",
        format!("measured (n={})", r.n),
        cell(AxisStats {
            mean: r.mean_l2,
            std: r.std_l2
        }),
        cell(r.x),
        cell(r.y),
        cell(r.z)
    );
    let _ = writeln!(
        s,
        "{:<22}{:>17}{:>17}{:>17}{:>17}",
        "reference (hardware)",
        cell(reference.mean_l2),
        cell(reference.x),
        cell(reference.y),
        cell(reference.z)
    );
    let trend = if r.slope > 0.0 {
        "increasing"
    } else if r.slope < 0.0 {
        "decreasing"
    } else {
        "flat"
    };
    let _ = writeln!(
        s,
        "radial trend: slope {:.6} mm/mm ({trend}), r = {:.4}",
        r.slope, r.r
    );
    s.push_str(
        "notes: axis columns are mean absolute errors; std is the sample standard deviation;\n",
    );
    s.push_str(
        "       the reference row is a published hardware measurement, not computed here.\n",
    );
    s
}
