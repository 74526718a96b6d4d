//! Simulation and analysis of spatially encoded single photons.
//!
//! A photon is steered onto one cell of a virtual grid of binned detector
//! pixels; the cell index is the transmitted symbol. This crate models the
//! resulting discrete memoryless channel (Gaussian focal-spot crosstalk plus
//! uniformly spread dark counts), measures it information-theoretically, and
//! runs a coded link on top of it using a per-axis Gray mapping and the
//! DVB-S2 rate-1/2 normal-frame LDPC code.
//!
//! Modules:
//!
//! - [`channel`]: symbol grid, point-spread model, channel matrix, sampling.
//! - [`info`]: joint distributions, mutual information, loss budgets.
//! - [`codec`]: Gray mapping, LDPC encoder/decoder, BER helpers.
//! - [`link`]: end-to-end experiments and their reports.

pub mod channel;
pub mod codec;
pub mod info;
pub mod link;
pub mod rng;

pub use channel::{
    bin_hit_probability, build_channel_matrix, grid_from_config, sample_detections, symbol_to_bin,
    BinPosition, ChannelError, ChannelMatrix, CountTable, DetectionEvent, GridSpec, NoiseModel,
    PointSpread,
};
pub use codec::{
    bit_error_rate, bits_to_symbol, gray_decode, gray_encode, ldpc_decode, ldpc_encode,
    llr_from_hard_bits, symbol_to_bits, BitFrame, CodecError, DecodeOutcome, DecoderAlgorithm,
    DecoderConfig, GrayMap, LdpcCode,
};
pub use info::{
    expected_mutual_information, joint_from_counts, max_mutual_information, mutual_information,
    sent_photon_capacity, InfoError, JointDistribution, LossChain,
};
pub use link::{
    estimate_raw_ber, run_coded_experiment, run_full_pipeline, run_uncoded_experiment,
    sweep_bin_sizes, ExperimentReport, LinkError,
};
