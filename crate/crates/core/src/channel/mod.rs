//! The spatial symbol channel.
//!
//! Detector pixels are binned into square cells, numbered row-major from the
//! top-left corner. A photon aimed at one cell lands according to a separable
//! Gaussian point-spread function; whatever falls outside the binned area is
//! not detected. Dark counts add a uniform floor over all cells.

mod events;
mod grid;
mod matrix;
mod psf;
mod sampling;

pub use events::{
    read_counts_csv, write_channel_csv, write_counts_csv, CountTable, DetectionEvent,
    DEFAULT_EXPORT_FLOOR,
};
pub use grid::{grid_from_config, symbol_to_bin, BinPosition, GridSpec};
pub use matrix::{build_channel_matrix, ChannelMatrix, Kernel, SeparableKernel};
pub use psf::{axis_interval_mass, bin_hit_probability, DarkSpatialLaw, NoiseModel, PointSpread};
pub use sampling::{sample_detections, RowSampler};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid grid dimensions: {0}")]
    InvalidDimension(String),
    #[error("symbol {symbol} out of range for an alphabet of {n_symbols}")]
    SymbolOutOfRange { symbol: usize, n_symbols: usize },
    #[error("invalid point spread: {0}")]
    InvalidPointSpread(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid channel row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("spot aimed at {axis} {index} misses the grid entirely")]
    NoDetection { axis: String, index: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
