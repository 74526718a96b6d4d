//! Run configuration: a TOML file whose every field has a default, overridden
//! by command-line flags.

use std::path::PathBuf;

use photon_link::info::NamedLoss;
use photon_link::{DecoderConfig, GridSpec, LossChain, NoiseModel, PointSpread};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; unset uses one per core. Neither this nor `out` is
    /// recorded in the snapshot written next to results.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub detector: DetectorConfig,
    pub psf: PointSpread,
    pub noise: NoiseConfig,
    pub simulate: SimulateConfig,
    pub sweep: SweepConfig,
    pub coded: CodedConfig,
    pub decoder: DecoderConfig,
    pub losses: Vec<NamedLoss>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub width: usize,
    pub height: usize,
    pub bin_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub signal_to_dark_ratio: f64,
    /// The two ratios compared by the bin sweep.
    pub ratio_low: f64,
    pub ratio_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub events_per_symbol: u64,
    /// Also write the model channel as `channel.csv`.
    pub export_channel: bool,
    pub export_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub bin_sizes: Vec<usize>,
    /// Add a sampled MI column using `noise.signal_to_dark_ratio` and
    /// `simulate.events_per_symbol`.
    pub sampled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodedConfig {
    pub crossovers: Vec<f64>,
    pub frames_per_point: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: None,
            out: PathBuf::from("out"),
            detector: DetectorConfig::default(),
            psf: PointSpread::default(),
            noise: NoiseConfig::default(),
            simulate: SimulateConfig::default(),
            sweep: SweepConfig::default(),
            coded: CodedConfig::default(),
            decoder: DecoderConfig::default(),
            losses: LossChain::reference_setup().stages().to_vec(),
        }
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        let g = GridSpec::reference();
        Self {
            width: g.detector_width(),
            height: g.detector_height(),
            bin_size: g.bin_size(),
        }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            signal_to_dark_ratio: NoiseModel::REFERENCE_RATIO,
            ratio_low: 10.0,
            ratio_high: 100.0,
        }
    }
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            events_per_symbol: 7,
            export_channel: false,
            export_floor: photon_link::channel::DEFAULT_EXPORT_FLOOR,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            bin_sizes: vec![2, 4, 6, 8, 10, 12, 16, 24, 32],
            sampled: false,
        }
    }
}

impl Default for CodedConfig {
    fn default() -> Self {
        Self {
            crossovers: vec![
                1e-3, 0.01, 0.02, 0.04, 0.06, 0.07, 0.08, 0.09, 0.1, 0.12, 0.15, 0.2, 0.3, 0.45,
            ],
            frames_per_point: 10,
        }
    }
}

/// Objects every subcommand builds from a validated config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub grid: GridSpec,
    pub psf: PointSpread,
    pub noise: NoiseModel,
    pub losses: LossChain,
    pub decoder: DecoderConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks the settings shared by every subcommand.
    pub fn setup(&self) -> Result<Setup, String> {
        if self.threads == Some(0) {
            return Err("threads must be >= 1".into());
        }
        let d = &self.detector;
        Ok(Setup {
            grid: GridSpec::new(d.width, d.height, d.bin_size).map_err(|e| e.to_string())?,
            psf: self.psf.validated().map_err(|e| e.to_string())?,
            noise: NoiseModel::new(self.noise.signal_to_dark_ratio).map_err(|e| e.to_string())?,
            losses: LossChain::new(self.losses.iter().map(|l| (l.name.clone(), l.loss)))
                .map_err(|e| e.to_string())?,
            decoder: self.decoder.validated().map_err(|e| e.to_string())?,
        })
    }

    pub fn check_simulate(&self) -> Result<(), String> {
        let s = &self.simulate;
        if s.events_per_symbol == 0 {
            return Err("simulate.events_per_symbol must be >= 1".into());
        }
        if !(s.export_floor.is_finite() && s.export_floor >= 0.0) {
            return Err(format!(
                "simulate.export_floor must be finite and >= 0, got {}",
                s.export_floor
            ));
        }
        Ok(())
    }

    pub fn check_sweep(&self) -> Result<(), String> {
        if self.sweep.bin_sizes.is_empty() {
            return Err("sweep.bin_sizes is empty".into());
        }
        for &b in &self.sweep.bin_sizes {
            GridSpec::new(self.detector.width, self.detector.height, b)
                .map_err(|e| e.to_string())?;
        }
        for r in [self.noise.ratio_low, self.noise.ratio_high] {
            NoiseModel::new(r).map_err(|e| e.to_string())?;
        }
        if self.sweep.sampled {
            self.check_simulate()?;
        }
        Ok(())
    }

    pub fn check_coded(&self) -> Result<(), String> {
        let c = &self.coded;
        if c.crossovers.is_empty() {
            return Err("coded.crossovers is empty".into());
        }
        if let Some(p) = c.crossovers.iter().find(|&&p| !(p > 0.0 && p < 0.5)) {
            return Err(format!("crossover {p} not in (0, 0.5)"));
        }
        if c.frames_per_point == 0 {
            return Err("coded.frames_per_point must be >= 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_toml() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
        let s = c.setup().unwrap();
        assert_eq!(s.grid.n_symbols(), 9072);
        assert!((s.losses.throughput() - 0.011_941).abs() < 1e-5);
    }

    #[test]
    fn partial_tables_keep_defaults() {
        let c = RunConfig::parse(
            "seed = 9\n[psf]\nfwhm_y = 7.4\n[decoder]\nalgorithm = \"sum-product\"\n",
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!((c.psf.fwhm_x, c.psf.fwhm_y), (8.0, 7.4));
        assert_eq!(c.decoder.max_iterations, 50);
        assert_eq!(c.detector, DetectorConfig::default());
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(RunConfig::parse("sed = 1\n").is_err());
        let mut c = RunConfig::default();
        c.detector.bin_size = 0;
        assert!(c.setup().is_err());
        let mut c = RunConfig::default();
        c.losses[0].loss = 1.0;
        assert!(c.setup().is_err());
        let mut c = RunConfig::default();
        c.coded.crossovers = vec![0.1, 0.5];
        assert!(c.check_coded().is_err());
        let mut c = RunConfig::default();
        c.sweep.bin_sizes.clear();
        assert!(c.check_sweep().is_err());
    }
}
