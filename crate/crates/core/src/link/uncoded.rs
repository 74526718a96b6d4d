use rayon::prelude::*;

use super::LinkError;
use crate::channel::{
    build_channel_matrix, ChannelMatrix, CountTable, GridSpec, NoiseModel, PointSpread, RowSampler,
};
use crate::info::{
    expected_mutual_information, joint_from_counts, mutual_information, uniform_law,
};
use crate::rng::stream_rng;

#[derive(Debug, Clone)]
pub struct UncodedResult {
    pub counts: CountTable,
    /// Plug-in estimate from the sampled counts, bits per detection.
    pub sampled_mi: f64,
    /// Exact value for the underlying channel with uniform input.
    pub expected_mi: f64,
}

/// Scans every symbol `events_per_symbol` times through the model channel.
pub fn run_uncoded_experiment(
    grid: &GridSpec,
    psf: &PointSpread,
    noise: &NoiseModel,
    events_per_symbol: u64,
    seed: u64,
) -> Result<UncodedResult, LinkError> {
    let channel = build_channel_matrix(grid, psf, noise)?;
    run_uncoded_on(&channel, events_per_symbol, seed)
}

/// As [`run_uncoded_experiment`] for an already-built channel.
pub fn run_uncoded_on(
    channel: &ChannelMatrix,
    events_per_symbol: u64,
    seed: u64,
) -> Result<UncodedResult, LinkError> {
    if events_per_symbol == 0 {
        return Err(LinkError::InvalidArgument(
            "events_per_symbol must be >= 1".into(),
        ));
    }
    let n = channel.n_symbols();
    let received: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let sampler = RowSampler::for_symbol(channel, x);
            let mut rng = stream_rng(seed, x as u64);
            (0..events_per_symbol)
                .map(|_| sampler.sample(&mut rng))
                .collect()
        })
        .collect();
    let mut counts = CountTable::new(n, n);
    for (x, ys) in received.iter().enumerate() {
        for &y in ys {
            counts.add(x, y, 1);
        }
    }
    let sampled_mi = mutual_information(&joint_from_counts(&counts)?);
    let expected_mi = expected_mutual_information(channel, &uniform_law(n))?;
    Ok(UncodedResult {
        counts,
        sampled_mi,
        expected_mi,
    })
}
