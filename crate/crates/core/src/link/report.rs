use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{CodedPoint, SweepPoint};
use crate::channel::{GridSpec, PointSpread};
use crate::codec::DecoderConfig;

pub const BIN_SWEEP_HEADER: &str = "bin,n_symbols,i_max_bits,hit_prob,mi_rlow_bits,mi_rhigh_bits";
pub const CODED_BER_HEADER: &str = "ber_in,ber_out,frames,converged_frac";

/// Inputs that produced a report. Every record of the report comes from this
/// snapshot; per-point sweep variables are stored in the records themselves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector_width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector_height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psf: Option<PointSpread>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_to_dark_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub events_per_symbol: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossovers: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames_per_point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<DecoderConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coded: Vec<CodedPoint>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `bin_sweep.csv`: one row per bin size.
pub fn write_bin_sweep_csv<W: Write>(mut w: W, points: &[SweepPoint]) -> std::io::Result<()> {
    writeln!(w, "{BIN_SWEEP_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.bin_size,
            p.n_symbols,
            p.i_max_bits,
            p.hit_probability,
            p.mi_low_ratio_bits,
            p.mi_high_ratio_bits
        )?;
    }
    w.flush()
}

/// `coded_ber.csv`: one row per crossover probability.
pub fn write_coded_ber_csv<W: Write>(mut w: W, points: &[CodedPoint]) -> std::io::Result<()> {
    writeln!(w, "{CODED_BER_HEADER}")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            p.ber_in, p.ber_out, p.frames, p.converged_frac
        )?;
    }
    w.flush()
}
