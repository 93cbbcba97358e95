//! Resolved run configurations: defaults, then the config file, then flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use vdc_core::arena::ArenaConfig;
use vdc_core::avdm::AvdmParams;
use vdc_core::collision::CollisionParams;
use vdc_core::metric::SweepConfig;
use vdc_core::profiler::{DEFAULT_BINS, DEFAULT_BIN_WIDTH, DEFAULT_CELLS, DEFAULT_THRESHOLD};
use vdc_core::stimulus::GratingSpec;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files or parameter values.
    Usage(String),
    /// Failure while running a valid configuration.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

pub fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Reads `path` as TOML, or returns the defaults when no file is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn load_params(path: &Path) -> Result<AvdmParams, CliError> {
    AvdmParams::load(path).map_err(usage)
}

/// Writes the resolved configuration next to the outputs.
pub fn write_resolved<T: Serialize>(cfg: &T, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;
    let text = toml::to_string(cfg).map_err(runtime)?;
    let path = out.join("config.toml");
    fs::write(&path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenStimulusConfig {
    /// `grating`, `natural`, or an image path.
    pub texture: String,
    pub grating: GratingSpec,
    pub duration_s: f64,
    pub sample_rate: f64,
    pub width: usize,
    pub height: usize,
    pub cycle_px: f64,
    pub seed: u64,
}

impl Default for GenStimulusConfig {
    fn default() -> Self {
        GenStimulusConfig {
            texture: "grating".into(),
            grating: GratingSpec::default(),
            duration_s: 2.0,
            sample_rate: 300.0,
            width: 100,
            height: 100,
            cycle_px: 20.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRunConfig {
    pub sf_values: Vec<f64>,
    pub tf_values: Vec<f64>,
    pub stimulus: SweepConfig,
    pub params: AvdmParams,
}

impl Default for SweepRunConfig {
    fn default() -> Self {
        SweepRunConfig {
            sf_values: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0],
            tf_values: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 150.0],
            stimulus: SweepConfig::default(),
            params: AvdmParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitRunConfig {
    pub samples: Option<PathBuf>,
    pub calibrate: bool,
    pub sf_values: Vec<f64>,
    pub tf_values: Vec<f64>,
    pub stimulus: SweepConfig,
    pub params: AvdmParams,
}

impl Default for FitRunConfig {
    fn default() -> Self {
        FitRunConfig {
            samples: None,
            calibrate: false,
            sf_values: vec![2.0, 5.0, 10.0, 20.0],
            tf_values: vec![1.0, 2.0, 5.0, 10.0],
            stimulus: SweepConfig {
                duration_s: 1.0,
                ..SweepConfig::default()
            },
            params: AvdmParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproachRunConfig {
    pub arena: ArenaConfig,
    pub params: AvdmParams,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for ApproachRunConfig {
    fn default() -> Self {
        ApproachRunConfig {
            arena: ArenaConfig::default(),
            params: AvdmParams::default(),
            repeats: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NavigateRunConfig {
    pub arena: ArenaConfig,
    pub params: AvdmParams,
    pub duration_s: f64,
    pub seed: u64,
    pub cells: usize,
    pub threshold: f64,
    pub bin_width: f64,
    pub bins: usize,
}

impl Default for NavigateRunConfig {
    fn default() -> Self {
        NavigateRunConfig {
            arena: ArenaConfig::default(),
            params: AvdmParams::default(),
            duration_s: 1800.0,
            seed: 0,
            cells: DEFAULT_CELLS,
            threshold: DEFAULT_THRESHOLD,
            bin_width: DEFAULT_BIN_WIDTH,
            bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollisionRunConfig {
    pub arena: ArenaConfig,
    pub params: AvdmParams,
    pub collision: CollisionParams,
    pub duration_s: f64,
    pub seed: u64,
    pub cells: usize,
}

impl Default for CollisionRunConfig {
    fn default() -> Self {
        CollisionRunConfig {
            arena: ArenaConfig::default(),
            params: AvdmParams::default(),
            collision: CollisionParams::default(),
            duration_s: 1800.0,
            seed: 0,
            cells: DEFAULT_CELLS,
        }
    }
}

/// Absolute value, or a `+`/`-` prefixed adjustment of `current`.
pub fn adjust(current: f64, spec: &str) -> Result<f64, CliError> {
    let spec = spec.trim();
    let parse = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("not a number: {spec}")));
    if let Some(d) = spec.strip_prefix('+') {
        Ok(current + parse(d)?)
    } else if let Some(d) = spec.strip_prefix('-') {
        Ok(current - parse(d)?)
    } else {
        parse(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjust_forms() {
        assert_eq!(adjust(0.9, "0.95").unwrap(), 0.95);
        assert!((adjust(0.9, "+0.05").unwrap() - 0.95).abs() < 1e-15);
        assert!((adjust(0.9, "-0.1").unwrap() - 0.8).abs() < 1e-15);
        assert!(adjust(0.9, "+x").is_err());
    }

    #[test]
    fn configs_round_trip_through_toml() {
        let c = CollisionRunConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<CollisionRunConfig>(&text).unwrap(), c);
        let n = NavigateRunConfig::default();
        assert_eq!(toml::from_str::<NavigateRunConfig>(&toml::to_string(&n).unwrap()).unwrap(), n);
        let g = GenStimulusConfig::default();
        assert_eq!(toml::from_str::<GenStimulusConfig>(&toml::to_string(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<SweepRunConfig>("bogus = 1").is_err());
    }
}
