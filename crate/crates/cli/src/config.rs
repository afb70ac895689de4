use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spinscatter::analysis::DEFAULT_GRID_POINTS;
use spinscatter::scattering::{NoiseModel, ScatteringGeometry};

use crate::error::{CliError, Result};

pub const DEFAULT_COUNTS_PER_SETTING: u64 = 900;

/// Everything a run depends on. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub geometry: ScatteringGeometry,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default = "default_counts")]
    pub counts_per_setting: u64,
    /// Required by every sampled output.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Exact expectations instead of sampled counts, and no background.
    #[serde(default)]
    pub noiseless: bool,
    /// Single detector direction instead of the averaged window.
    #[serde(default)]
    pub ideal: bool,
}

fn default_counts() -> u64 {
    DEFAULT_COUNTS_PER_SETTING
}

fn default_grid() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("spinscatter-out")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: ScatteringGeometry::default(),
            noise: NoiseModel::default(),
            counts_per_setting: default_counts(),
            seed: None,
            grid_points: default_grid(),
            output_dir: default_output_dir(),
            noiseless: false,
            ideal: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub noiseless: bool,
    pub ideal: bool,
    pub window_deg: Option<f64>,
    pub na: Option<f64>,
    pub background: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(s) = o.seed {
            self.seed = Some(s);
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        self.noiseless |= o.noiseless;
        self.ideal |= o.ideal;
        if let Some(w) = o.window_deg {
            self.geometry = self.geometry.with_window_degrees(w);
        }
        if let Some(na) = o.na {
            self.geometry.numerical_aperture = na;
        }
        if let Some(p) = o.background {
            self.noise.background_fraction = p;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate().map_err(|e| CliError::Config(format!("geometry: {e}")))?;
        self.noise.validate().map_err(|e| CliError::Config(format!("noise: {e}")))?;
        if self.counts_per_setting == 0 {
            return Err(CliError::Config("counts_per_setting: must be positive".into()));
        }
        if self.grid_points == 0 {
            return Err(CliError::Config("grid_points: must be positive".into()));
        }
        Ok(())
    }

    /// Seed for sampled outputs; an error when a sampled run has none.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Config("seed: required for sampled runs (or pass --noiseless)".into()))
    }

    /// Noise actually applied to the joint state.
    pub fn effective_noise(&self) -> NoiseModel {
        if self.noiseless {
            NoiseModel { background_fraction: 0.0, ..self.noise.clone() }
        } else {
            self.noise.clone()
        }
    }

    /// SHA-256 of the key-sorted JSON form, `output_dir` left out.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output_dir");
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }
}
