//! Symbol-to-bit mapping and the LDPC link layer.

mod bits;
mod decoder;
mod gray;
mod ldpc;
mod mapping;

pub use bits::{bit_error_rate, bits_to_hex, hex_to_bits, llr_from_hard_bits, BitFrame};
pub use decoder::{ldpc_decode, DecodeOutcome, Decoder};
pub use gray::{gray_decode, gray_encode};
pub use ldpc::{DecoderAlgorithm, DecoderConfig, DegreeStats, LdpcCode, GROUP_SIZE};
pub use mapping::{bits_to_symbol, hamming, symbol_to_bits, GrayMap, MappedSymbol};

use thiserror::Error;

use crate::channel::ChannelError;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: u32 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty bit string")]
    Empty,
    #[error("crossover probability {0} not in (0, 0.5)")]
    InvalidCrossover(f64),
    #[error("Gray map {bits_x}+{bits_y} bits cannot cover a {n_cols}x{n_rows} grid")]
    MapTooNarrow {
        bits_x: u32,
        bits_y: u32,
        n_cols: usize,
        n_rows: usize,
    },
    #[error("parity table line {line}: {reason}")]
    Table { line: usize, reason: String },
    #[error("invalid decoder configuration: {0}")]
    InvalidDecoderConfig(String),
    #[error("LLR {0} is not finite")]
    NonFiniteLlr(usize),
    #[error("invalid hex digit `{0}`")]
    InvalidHex(char),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Systematic LDPC encoding of exactly `k` information bits.
pub fn ldpc_encode(info: &[u8], code: &LdpcCode) -> Result<Vec<u8>, CodecError> {
    code.encode(info)
}
