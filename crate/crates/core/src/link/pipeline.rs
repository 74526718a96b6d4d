use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{payload_bit_error_profile, LinkError};
use crate::channel::{ChannelMatrix, GridSpec, RowSampler};
use crate::codec::{
    bit_error_rate, gray_decode, ldpc_decode, symbol_to_bits, BitFrame, GrayMap, LdpcCode,
};
use crate::rng::stream_rng;

/// Smallest crossover used to form LLRs; keeps magnitudes finite on
/// error-free channels and on bits that never flip.
const MIN_CROSSOVER: f64 = 1e-9;

/// Payload bits carried per symbol.
///
/// A codeword chunk must always name a cell on the grid, so each axis carries
/// `floor(log2 n)` bits and the transmitter only addresses the
/// `2^bits_x × 2^bits_y` block at the top-left corner. The receiver keeps the
/// low bits of the full Gray code of whatever cell it detects; because the
/// code is reflected, a detection just past the block edge reads as the edge
/// cell itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolPacking {
    pub bits_x: u32,
    pub bits_y: u32,
}

fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.leading_zeros()
}

impl SymbolPacking {
    pub fn for_grid(grid: &GridSpec, map: &GrayMap) -> Result<Self, LinkError> {
        map.check(grid)?;
        let packing = Self {
            bits_x: floor_log2(grid.n_cols()).min(map.bits_x),
            bits_y: floor_log2(grid.n_rows()).min(map.bits_y),
        };
        if packing.width() == 0 {
            return Err(LinkError::InvalidArgument(
                "a single-symbol grid cannot carry payload bits".into(),
            ));
        }
        Ok(packing)
    }

    pub fn width(&self) -> usize {
        (self.bits_x + self.bits_y) as usize
    }

    /// Cell addressed by one chunk of payload bits.
    pub fn chunk_to_symbol(&self, chunk: &[u8], grid: &GridSpec) -> usize {
        let (xb, yb) = chunk.split_at(self.bits_x as usize);
        grid.symbol_at(gray_decode(xb) as usize, gray_decode(yb) as usize)
    }

    /// Payload bits read from a detected cell.
    pub fn symbol_to_chunk(
        &self,
        symbol: usize,
        grid: &GridSpec,
        map: &GrayMap,
    ) -> Result<Vec<u8>, LinkError> {
        let bits = symbol_to_bits(symbol, grid, map)?;
        let (xb, yb) = bits.split_at(map.bits_x as usize);
        let mut chunk = xb[(map.bits_x - self.bits_x) as usize..].to_vec();
        chunk.extend_from_slice(&yb[(map.bits_y - self.bits_y) as usize..]);
        Ok(chunk)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineDiagnostics {
    pub payload_bits_per_symbol: usize,
    pub symbols: usize,
    pub symbol_errors: usize,
    /// Codeword bit errors before decoding.
    pub raw_ber: f64,
    /// Model estimate of `raw_ber`.
    pub crossover: f64,
    /// Model flip probability of each payload bit position, column bits
    /// first. These set the LLR magnitudes.
    pub position_crossovers: Vec<f64>,
    /// Message bit errors after decoding.
    pub post_ber: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub decoded: Vec<u8>,
    pub diagnostics: PipelineDiagnostics,
}

/// Stream of the fixed interleaver permutation; independent of any run seed.
const INTERLEAVER_SEED: u64 = 0x1e5_7e4d;

/// Fixed pseudo-random bit interleaver. `order[i]` is the codeword bit sent
/// in slot `i`. It keeps adjacent codeword bits, which share staircase parity
/// checks, out of the same symbol, and spreads each payload bit position (the
/// low Gray bits flip far more often than the high ones) over the whole
/// codeword.
fn interleaver(len: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut stream_rng(INTERLEAVER_SEED, len as u64));
    order
}

/// Sends `message` through the whole link: pad, encode, interleave, pack into
/// symbols, one detection per symbol, unpack, deinterleave, decode, strip
/// padding.
pub fn run_full_pipeline(
    message: &[u8],
    channel: &ChannelMatrix,
    map: &GrayMap,
    code: &LdpcCode,
    seed: u64,
) -> Result<PipelineResult, LinkError> {
    let grid = channel.grid();
    let packing = SymbolPacking::for_grid(grid, map)?;
    let width = packing.width();

    let info = BitFrame::pad(message, code.k())?;
    let codeword = code.encode(info.bits())?;
    let framed = BitFrame::pad(&codeword, codeword.len().div_ceil(width) * width)?;

    let order = interleaver(framed.bits().len());
    let slots: Vec<u8> = order.iter().map(|&j| framed.bits()[j]).collect();
    let sent: Vec<usize> = slots
        .chunks(width)
        .map(|c| packing.chunk_to_symbol(c, grid))
        .collect();
    let received: Vec<usize> = sent
        .iter()
        .enumerate()
        .map(|(i, &x)| RowSampler::for_symbol(channel, x).sample(&mut stream_rng(seed, i as u64)))
        .collect();

    let mut rx_bits = Vec::with_capacity(framed.bits().len());
    for &y in &received {
        rx_bits.extend(packing.symbol_to_chunk(y, grid, map)?);
    }
    let mut deinterleaved = vec![0; rx_bits.len()];
    let mut position = vec![0; rx_bits.len()];
    for (i, &j) in order.iter().enumerate() {
        deinterleaved[j] = rx_bits[i];
        position[j] = i % width;
    }
    let hard = BitFrame::from_parts(deinterleaved, framed.padding())?.into_payload();

    let raw_ber = bit_error_rate(&codeword, &hard)?;
    let position_crossovers = payload_bit_error_profile(channel, map, &packing)?;
    let crossover = position_crossovers.iter().sum::<f64>() / width as f64;
    let magnitude: Vec<f64> = position_crossovers
        .iter()
        .map(|p| {
            let p = p.clamp(MIN_CROSSOVER, 0.5 - MIN_CROSSOVER);
            ((1.0 - p) / p).ln()
        })
        .collect();
    let llrs: Vec<f64> = hard
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            if b == 0 {
                magnitude[position[j]]
            } else {
                -magnitude[position[j]]
            }
        })
        .collect();
    let outcome = ldpc_decode(&llrs, code)?;
    let decoded = BitFrame::from_parts(outcome.info, info.padding())?.into_payload();
    let post_ber = if message.is_empty() {
        0.0
    } else {
        bit_error_rate(message, &decoded)?
    };

    Ok(PipelineResult {
        decoded,
        diagnostics: PipelineDiagnostics {
            payload_bits_per_symbol: width,
            symbols: sent.len(),
            symbol_errors: sent.iter().zip(&received).filter(|(a, b)| a != b).count(),
            raw_ber,
            crossover,
            position_crossovers,
            post_ber,
            converged: outcome.converged,
            iterations: outcome.iterations,
        },
    })
}
