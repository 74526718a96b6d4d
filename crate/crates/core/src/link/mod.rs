//! End-to-end experiments: uncoded information measurements, the bin-size
//! sweep, raw bit-error estimates, coded BER curves and the full coded link.

mod ber;
mod coded;
mod pipeline;
mod report;
mod sweep;
mod uncoded;

pub use ber::{
    estimate_payload_ber, estimate_raw_ber, expected_bit_error_profile, expected_bit_error_rate,
    payload_bit_error_profile, CoordinateCodes,
};
pub use coded::{run_coded_experiment, CodedPoint};
pub use pipeline::{run_full_pipeline, PipelineDiagnostics, PipelineResult, SymbolPacking};
pub use report::{
    write_bin_sweep_csv, write_coded_ber_csv, ExperimentReport, Parameters, BIN_SWEEP_HEADER,
    CODED_BER_HEADER,
};
pub use sweep::{sweep_bin_sizes, SamplingSpec, SweepPoint, SweepSpec};
pub use uncoded::{run_uncoded_experiment, run_uncoded_on, UncodedResult};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::codec::CodecError;
use crate::info::InfoError;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
