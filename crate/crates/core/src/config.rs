//! TOML configuration for the dual-platform assembly.
//!
//! The document is flat key/value. Platform keys at the top level apply to
//! both platforms; a `[left]` or `[right]` table overrides them per side.
//! Omitted keys fall back to [`default_params`]. Units are mm and degrees.
//!
//! ```toml
//! baseline = 100.0          # mm between pivot axes
//! mirror = true             # reflect the right platform frame in x
//! chopstick_length = 162.0
//! linkage_length = 32.5
//!
//! [right]
//! yaw_horn_length = 30.0
//! ```
//!
//! Platform keys: `chopstick_length`, `linkage_length`, `pitch_horn_length`,
//! `yaw_horn_length`, `z_offset`, `pitch_pivot_y`, `pitch_pivot_z`,
//! `yaw_pivot_x`, `yaw_pivot_z`, `servo_rom_min`, `servo_rom_max`,
//! `travel_min`, `travel_max`, `leadscrew_lead`. Unknown keys are rejected.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mechanism::{
    default_params, default_pivot, DualConfig, Interval, MechanismParams, ParamError,
    DEFAULT_BASELINE,
};
use crate::scalar::{lit, Real};
use crate::vector::Vec2;

const PLATFORM_KEYS: [&str; 14] = [
    "chopstick_length",
    "linkage_length",
    "pitch_horn_length",
    "yaw_horn_length",
    "z_offset",
    "pitch_pivot_y",
    "pitch_pivot_z",
    "yaw_pivot_x",
    "yaw_pivot_z",
    "servo_rom_min",
    "servo_rom_max",
    "travel_min",
    "travel_max",
    "leadscrew_lead",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error(transparent)]
    Invalid(#[from] ParamError),
    #[error("config write error: {0}")]
    Write(#[from] toml::ser::Error),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlatformDoc<T> {
    #[serde(skip_serializing_if = "Option::is_none")]
    chopstick_length: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linkage_length: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pitch_horn_length: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    yaw_horn_length: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_offset: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pitch_pivot_y: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pitch_pivot_z: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    yaw_pivot_x: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    yaw_pivot_z: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    servo_rom_min: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    servo_rom_max: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    travel_min: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    travel_max: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    leadscrew_lead: Option<T>,
}

#[derive(Debug, Clone, Serialize)]
struct ConfigOut<T> {
    baseline: T,
    mirror: bool,
    left: PlatformDoc<T>,
    right: PlatformDoc<T>,
}

impl<T: Real> PlatformDoc<T> {
    fn overlay(&self, over: &PlatformDoc<T>) -> PlatformDoc<T> {
        macro_rules! pick {
            ($($f:ident),*) => { PlatformDoc { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            chopstick_length,
            linkage_length,
            pitch_horn_length,
            yaw_horn_length,
            z_offset,
            pitch_pivot_y,
            pitch_pivot_z,
            yaw_pivot_x,
            yaw_pivot_z,
            servo_rom_min,
            servo_rom_max,
            travel_min,
            travel_max,
            leadscrew_lead
        )
    }

    fn resolve(&self) -> Result<MechanismParams<T>, ParamError> {
        let d = default_params::<T>();
        let linkage_len = self.linkage_length.unwrap_or(d.linkage_len);
        let pitch_horn_len = self.pitch_horn_length.unwrap_or(d.pitch_horn_len);
        let yaw_horn_len = self.yaw_horn_length.unwrap_or(d.yaw_horn_len);
        let pitch_default = default_pivot(linkage_len, pitch_horn_len);
        let yaw_default = default_pivot(linkage_len, yaw_horn_len);
        let params = MechanismParams {
            chopstick_len: self.chopstick_length.unwrap_or(d.chopstick_len),
            linkage_len,
            pitch_horn_len,
            yaw_horn_len,
            z_offset: self.z_offset.unwrap_or(d.z_offset),
            pitch_pivot: Vec2::new(
                self.pitch_pivot_y.unwrap_or(pitch_default.h),
                self.pitch_pivot_z.unwrap_or(pitch_default.v),
            ),
            yaw_pivot: Vec2::new(
                self.yaw_pivot_x.unwrap_or(yaw_default.h),
                self.yaw_pivot_z.unwrap_or(yaw_default.v),
            ),
            servo_rom: Interval::new(
                self.servo_rom_min.unwrap_or(d.servo_rom.min),
                self.servo_rom_max.unwrap_or(d.servo_rom.max),
            ),
            travel: Interval::new(
                self.travel_min.unwrap_or(d.travel.min),
                self.travel_max.unwrap_or(d.travel.max),
            ),
            leadscrew_lead: self.leadscrew_lead.unwrap_or(d.leadscrew_lead),
        };
        params.validate()?;
        Ok(params)
    }

    fn from_params(p: &MechanismParams<T>) -> Self {
        PlatformDoc {
            chopstick_length: Some(p.chopstick_len),
            linkage_length: Some(p.linkage_len),
            pitch_horn_length: Some(p.pitch_horn_len),
            yaw_horn_length: Some(p.yaw_horn_len),
            z_offset: Some(p.z_offset),
            pitch_pivot_y: Some(p.pitch_pivot.h),
            pitch_pivot_z: Some(p.pitch_pivot.v),
            yaw_pivot_x: Some(p.yaw_pivot.h),
            yaw_pivot_z: Some(p.yaw_pivot.v),
            servo_rom_min: Some(p.servo_rom.min),
            servo_rom_max: Some(p.servo_rom.max),
            travel_min: Some(p.travel.min),
            travel_max: Some(p.travel.max),
            leadscrew_lead: Some(p.leadscrew_lead),
        }
    }
}

/// Parses and validates a configuration document.
pub fn load_config<T>(source: &str) -> Result<DualConfig<T>, ConfigError>
where
    T: Real + DeserializeOwned,
{
    let mut table: toml::Table = toml::from_str(source)?;
    let baseline: Option<T> = table.remove("baseline").map(|v| v.try_into()).transpose()?;
    let mirror: Option<bool> = table.remove("mirror").map(|v| v.try_into()).transpose()?;
    let side = |v: Option<toml::Value>| -> Result<PlatformDoc<T>, ConfigError> {
        Ok(v.map(|v| v.try_into()).transpose()?.unwrap_or_default())
    };
    let left_doc = side(table.remove("left"))?;
    let right_doc = side(table.remove("right"))?;
    if let Some(key) = table.keys().find(|k| !PLATFORM_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(key.clone()));
    }
    let shared: PlatformDoc<T> = toml::Value::Table(table).try_into()?;
    let left = shared.overlay(&left_doc).resolve()?;
    let right = shared.overlay(&right_doc).resolve()?;
    let config = DualConfig {
        left,
        right,
        baseline: baseline.unwrap_or_else(|| lit(DEFAULT_BASELINE)),
        mirror: mirror.unwrap_or(true),
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config_file<T>(path: impl AsRef<std::path::Path>) -> Result<DualConfig<T>, ConfigError>
where
    T: Real + DeserializeOwned,
{
    load_config(&std::fs::read_to_string(path)?)
}

/// Writes a fully explicit document (every key, both platform tables).
pub fn to_toml<T>(config: &DualConfig<T>) -> Result<String, ConfigError>
where
    T: Real + Serialize,
{
    let doc = ConfigOut {
        baseline: config.baseline,
        mirror: config.mirror,
        left: PlatformDoc::from_params(&config.left),
        right: PlatformDoc::from_params(&config.right),
    };
    Ok(toml::to_string(&doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_lengths_load() {
        let cfg: DualConfig = load_config(
            "chopstick_length = 162\nlinkage_length = 32.5\npitch_horn_length = 28\nyaw_horn_length = 32\n",
        )
        .unwrap();
        assert_eq!(cfg.left.chopstick_len, 162.0);
        assert_eq!(cfg.right.linkage_len, 32.5);
        assert_eq!(cfg.left, default_params());
    }

    #[test]
    fn zero_chopstick_length_rejected() {
        let err = load_config::<f64>("chopstick_length = 0\n").unwrap_err();
        match err {
            ConfigError::Invalid(e) => {
                assert_eq!(e.field, "chopstick_length");
                assert!(e.reason.contains("> 0"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn omitted_z_offset_defaults_to_zero() {
        let cfg: DualConfig = load_config("baseline = 90\n").unwrap();
        assert_eq!(cfg.left.z_offset, 0.0);
        assert_eq!(cfg.baseline, 90.0);
        assert!(cfg.mirror);
    }

    #[test]
    fn side_tables_override_shared_keys() {
        let cfg: DualConfig =
            load_config("z_offset = 5\n[right]\nz_offset = 7\nyaw_horn_length = 30\n").unwrap();
        assert_eq!(cfg.left.z_offset, 5.0);
        assert_eq!(cfg.right.z_offset, 7.0);
        assert_eq!(cfg.right.yaw_horn_len, 30.0);
        // default pivot follows the overridden horn length
        assert_eq!(cfg.right.yaw_pivot, default_pivot(32.5, 30.0));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            load_config::<f64>("chopstik_length = 1\n"),
            Err(ConfigError::UnknownKey(k)) if k == "chopstik_length"
        ));
        assert!(matches!(
            load_config::<f64>("[left]\nbogus = 1\n"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn malformed_document_is_parse_error() {
        assert!(matches!(
            load_config::<f64>("baseline = = 3"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn empty_rom_reports_field() {
        let err = load_config::<f64>("servo_rom_min = 10\nservo_rom_max = 5\n").unwrap_err();
        assert!(err.to_string().contains("servo_rom"));
    }

    #[test]
    fn explicit_document_round_trips() {
        let src =
            "baseline = 88.5\nmirror = false\nlinkage_length = 33.25\n[left]\nz_offset = -1.5\n";
        let cfg: DualConfig = load_config(src).unwrap();
        let again: DualConfig = load_config(&to_toml(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn single_precision_load() {
        let cfg: DualConfig<f32> = load_config("chopstick_length = 150\n").unwrap();
        assert_eq!(cfg.left.chopstick_len, 150.0f32);
    }
}
