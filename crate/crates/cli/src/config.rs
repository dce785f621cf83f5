//! Run configuration, loadable from TOML and overridable from flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use qmt_core::projection::FilterModel;
use qmt_core::signal::SampledBackend;
use qmt_core::{MeasurementChain, MeasurementOrder, NoiseConfig, ProjectionEngine};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Tonal,
    Sampled,
}

/// Windowed-sinc comb filters instead of ideal ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirConfig {
    pub taps: usize,
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    /// Samples per period for the sampled backend; `None` uses the floor.
    pub samples_per_period: Option<usize>,
    pub periods: usize,
    pub seed: u64,
    pub shots: u64,
    pub noise: NoiseConfig,
    pub fir: Option<FirConfig>,
    /// Measure qubits from the highest index down instead of ascending.
    pub descending: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Tonal,
            samples_per_period: None,
            periods: 1,
            seed: 0,
            shots: 1000,
            noise: NoiseConfig::ideal(),
            fir: None,
            descending: false,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text).context("invalid run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.noise.validate()?;
        if self.periods == 0 {
            bail!("periods must be at least 1");
        }
        if self.backend == BackendKind::Tonal && self.noise.awgn_sigma > 0.0 {
            bail!("additive white noise acts on samples; use --backend sampled");
        }
        Ok(())
    }

    pub fn sampled_backend(&self) -> SampledBackend {
        SampledBackend { samples_per_period: self.samples_per_period, periods: self.periods }
    }

    pub fn chain(&self) -> MeasurementChain {
        let filter = match self.fir {
            Some(FirConfig { taps, grid }) => FilterModel::Fir { taps, grid },
            None => FilterModel::Ideal,
        };
        let order = if self.descending { MeasurementOrder::Descending } else { MeasurementOrder::Ascending };
        MeasurementChain { engine: ProjectionEngine::new(filter), order }
    }

    pub fn out_dir(&self) -> anyhow::Result<&Path> {
        match &self.out {
            Some(p) => Ok(p),
            None => bail!("no output directory; pass --out DIR"),
        }
    }
}
