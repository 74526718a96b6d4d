use rand::Rng;

use super::{ChannelError, ChannelMatrix, Kernel};
use crate::rng::stream_rng;

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

/// Inverse-CDF lookup; never returns an index past the last positive mass.
fn invert(cdf: &[f64], last_positive: usize, u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(last_positive)
}

/// Cumulative distribution over indices.
#[derive(Debug, Clone)]
pub struct Cdf {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl Cdf {
    fn new(p: &[f64]) -> Self {
        Self {
            cdf: cumulative(p),
            last_positive: p.iter().rposition(|&v| v > 0.0).unwrap_or(0),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        invert(&self.cdf, self.last_positive, rng.random::<f64>())
    }
}

/// Sampler over one channel row.
///
/// Dense rows use a single inverse-CDF lookup. Rows of a separable channel
/// are sampled as the mixture they are built from: with probability `s` a
/// signal photon whose column and row come from the two factor CDFs,
/// otherwise a uniformly placed dark count.
#[derive(Debug, Clone)]
pub enum RowSampler {
    Row(Cdf),
    Mixture {
        n_cols: usize,
        n_symbols: usize,
        signal_fraction: f64,
        col: Cdf,
        row: Cdf,
    },
}

impl RowSampler {
    pub fn new(row: &[f64]) -> Self {
        RowSampler::Row(Cdf::new(row))
    }

    pub fn for_symbol(channel: &ChannelMatrix, sent: usize) -> Self {
        match channel.kernel() {
            Kernel::Separable(k) => {
                let (nc, nr) = (k.n_cols(), k.n_rows());
                let (cx, rx) = (sent % nc, sent / nc);
                RowSampler::Mixture {
                    n_cols: nc,
                    n_symbols: nc * nr,
                    signal_fraction: k.signal_fraction(),
                    col: Cdf::new(&k.col_factor()[cx * nc..(cx + 1) * nc]),
                    row: Cdf::new(&k.row_factor()[rx * nr..(rx + 1) * nr]),
                }
            }
            Kernel::Dense(_) => Self::new(&channel.row(sent)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            RowSampler::Row(cdf) => cdf.draw(rng),
            RowSampler::Mixture {
                n_cols,
                n_symbols,
                signal_fraction,
                col,
                row,
            } => {
                if *signal_fraction >= 1.0 || rng.random::<f64>() < *signal_fraction {
                    let c = col.draw(rng);
                    let r = row.draw(rng);
                    r * n_cols + c
                } else {
                    rng.random_range(0..*n_symbols)
                }
            }
        }
    }
}

/// Draws `n_events` detections for symbol `sent` and returns counts per
/// received symbol. The stream used is `sent` under the root `seed`.
pub fn sample_detections(
    channel: &ChannelMatrix,
    sent: usize,
    n_events: u64,
    seed: u64,
) -> Result<Vec<u64>, ChannelError> {
    channel.grid().check_symbol(sent)?;
    let mut counts = vec![0u64; channel.n_symbols()];
    if n_events == 0 {
        return Ok(counts);
    }
    let sampler = RowSampler::for_symbol(channel, sent);
    let mut rng = stream_rng(seed, sent as u64);
    for _ in 0..n_events {
        counts[sampler.sample(&mut rng)] += 1;
    }
    Ok(counts)
}
