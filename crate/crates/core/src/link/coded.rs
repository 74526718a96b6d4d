use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentReport, LinkError, Parameters};
use crate::codec::{llr_from_hard_bits, Decoder, LdpcCode};
use crate::rng::stream_rng;

/// One point of the coded BER curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodedPoint {
    /// Crossover probability of the binary symmetric channel.
    pub ber_in: f64,
    /// Fraction of codeword bits actually flipped over all frames.
    pub ber_in_measured: f64,
    /// Mean information-bit error rate after decoding.
    pub ber_out: f64,
    /// Uncoded reference: without a decoder the output BER equals `ber_in`.
    pub diagonal: f64,
    pub frames: usize,
    pub converged_frac: f64,
    pub mean_iterations: f64,
}

struct FrameStat {
    flipped: usize,
    info_errors: usize,
    converged: bool,
    iterations: usize,
}

/// Coded BER over a binary symmetric channel at each crossover probability.
///
/// Frame `f` uses random stream `f` for both its message and its flip
/// pattern at every crossover, so the error patterns of a lower crossover are
/// subsets of those at a higher one.
pub fn run_coded_experiment(
    crossovers: &[f64],
    frames: usize,
    code: &LdpcCode,
    seed: u64,
) -> Result<ExperimentReport, LinkError> {
    if frames == 0 {
        return Err(LinkError::InvalidArgument(
            "frames per point must be >= 1".into(),
        ));
    }
    if crossovers.is_empty() {
        return Err(LinkError::InvalidArgument(
            "no crossover probabilities given".into(),
        ));
    }
    if let Some(p) = crossovers.iter().find(|&&p| !(p > 0.0 && p < 0.5)) {
        return Err(LinkError::InvalidArgument(format!(
            "crossover {p} not in (0, 0.5)"
        )));
    }
    let (n, k) = (code.n(), code.k());

    let per_frame: Vec<Vec<FrameStat>> = (0..frames)
        .into_par_iter()
        .map(|f| -> Result<Vec<FrameStat>, LinkError> {
            let mut rng = stream_rng(seed, f as u64);
            let info: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
            let uniforms: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let codeword = code.encode(&info)?;
            let mut decoder = Decoder::new(code);
            crossovers
                .iter()
                .map(|&p| {
                    let received: Vec<u8> = codeword
                        .iter()
                        .zip(&uniforms)
                        .map(|(&b, &u)| b ^ (u < p) as u8)
                        .collect();
                    let flipped = uniforms.iter().filter(|&&u| u < p).count();
                    let out = decoder.decode(&llr_from_hard_bits(&received, p)?)?;
                    let info_errors = out.info.iter().zip(&info).filter(|(a, b)| a != b).count();
                    Ok(FrameStat {
                        flipped,
                        info_errors,
                        converged: out.converged,
                        iterations: out.iterations,
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let coded = crossovers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let stats = per_frame.iter().map(|fs| &fs[i]);
            let (mut flipped, mut errors, mut converged, mut iterations) = (0, 0, 0, 0);
            for s in stats {
                flipped += s.flipped;
                errors += s.info_errors;
                converged += s.converged as usize;
                iterations += s.iterations;
            }
            CodedPoint {
                ber_in: p,
                ber_in_measured: flipped as f64 / (n * frames) as f64,
                ber_out: errors as f64 / (k * frames) as f64,
                diagonal: p,
                frames,
                converged_frac: converged as f64 / frames as f64,
                mean_iterations: iterations as f64 / frames as f64,
            }
        })
        .collect();

    Ok(ExperimentReport {
        experiment: "coded-ber".into(),
        parameters: Parameters {
            seed: Some(seed),
            crossovers: Some(crossovers.to_vec()),
            frames_per_point: Some(frames),
            code_n: Some(n),
            code_k: Some(k),
            decoder: Some(code.decoder),
            ..Default::default()
        },
        coded,
        ..Default::default()
    })
}
