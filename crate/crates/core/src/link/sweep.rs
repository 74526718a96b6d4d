use serde::{Deserialize, Serialize};

use super::{run_uncoded_on, ExperimentReport, LinkError, Parameters};
use crate::channel::{
    bin_hit_probability, build_channel_matrix, GridSpec, NoiseModel, PointSpread,
};
use crate::info::{expected_mutual_information, max_mutual_information, uniform_law};

/// Optional sampled measurement at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub signal_to_dark_ratio: f64,
    pub events_per_symbol: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub bin_sizes: Vec<usize>,
    pub detector_width: usize,
    pub detector_height: usize,
    pub psf: PointSpread,
    pub ratio_low: f64,
    pub ratio_high: f64,
    pub sampling: Option<SamplingSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub bin_size: usize,
    pub n_symbols: usize,
    /// `log2 N`, the noiseless limit.
    pub i_max_bits: f64,
    /// Probability that a photon aimed at a central cell lands in it.
    pub hit_probability: f64,
    pub mi_low_ratio_bits: f64,
    pub mi_high_ratio_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_mi_bits: Option<f64>,
}

/// Information limit, hit probability and exact mutual information at two
/// signal-to-dark ratios for each bin size.
pub fn sweep_bin_sizes(spec: &SweepSpec) -> Result<ExperimentReport, LinkError> {
    if spec.bin_sizes.is_empty() {
        return Err(LinkError::InvalidArgument("no bin sizes given".into()));
    }
    let low = NoiseModel::new(spec.ratio_low)?;
    let high = NoiseModel::new(spec.ratio_high)?;
    let sampled_noise = spec
        .sampling
        .map(|s| NoiseModel::new(s.signal_to_dark_ratio))
        .transpose()?;
    let psf = spec.psf.validated()?;

    let mut sweep = Vec::with_capacity(spec.bin_sizes.len());
    for &bin in &spec.bin_sizes {
        let grid = GridSpec::new(spec.detector_width, spec.detector_height, bin)?;
        let n = grid.n_symbols();
        let center = grid.symbol_at(grid.n_cols() / 2, grid.n_rows() / 2);
        let law = uniform_law(n);
        let mi_at = |noise: &NoiseModel| -> Result<f64, LinkError> {
            let ch = build_channel_matrix(&grid, &psf, noise)?;
            Ok(expected_mutual_information(&ch, &law)?)
        };
        let sampled_mi_bits = match (spec.sampling, sampled_noise) {
            (Some(s), Some(noise)) => {
                let ch = build_channel_matrix(&grid, &psf, &noise)?;
                Some(run_uncoded_on(&ch, s.events_per_symbol, s.seed)?.sampled_mi)
            }
            _ => None,
        };
        sweep.push(SweepPoint {
            bin_size: bin,
            n_symbols: n,
            i_max_bits: max_mutual_information(n)?,
            hit_probability: bin_hit_probability(&psf, &grid, center, center)?,
            mi_low_ratio_bits: mi_at(&low)?,
            mi_high_ratio_bits: mi_at(&high)?,
            sampled_mi_bits,
        });
    }

    Ok(ExperimentReport {
        experiment: "sweep-bins".into(),
        parameters: Parameters {
            detector_width: Some(spec.detector_width),
            detector_height: Some(spec.detector_height),
            bin_sizes: Some(spec.bin_sizes.clone()),
            psf: Some(psf),
            ratio_low: Some(spec.ratio_low),
            ratio_high: Some(spec.ratio_high),
            signal_to_dark_ratio: spec.sampling.map(|s| s.signal_to_dark_ratio),
            events_per_symbol: spec.sampling.map(|s| s.events_per_symbol),
            seed: spec.sampling.map(|s| s.seed),
            ..Default::default()
        },
        sweep,
        ..Default::default()
    })
}
