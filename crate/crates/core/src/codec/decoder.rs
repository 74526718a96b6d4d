//! Flooding belief propagation on the LDPC graph.

use super::{CodecError, DecoderAlgorithm, LdpcCode};

// Magnitude limits for the sum-product `phi` transform.
const PHI_MIN: f64 = 1e-12;
const PHI_MAX: f64 = 40.0;

/// Result of decoding one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Hard decisions on the information bits.
    pub info: Vec<u8>,
    /// Hard decisions on the whole codeword.
    pub codeword: Vec<u8>,
    /// All checks satisfied and every posterior has a definite sign.
    pub converged: bool,
    /// Message-passing iterations run; 0 when the channel decisions already
    /// form a codeword.
    pub iterations: usize,
}

/// Message buffers for decoding frames of one code. Reusable across frames;
/// not shared between threads.
#[derive(Debug)]
pub struct Decoder<'a> {
    code: &'a LdpcCode,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    posterior: Vec<f64>,
    hard: Vec<u8>,
}

/// `-ln tanh(x/2)`, its own inverse.
#[inline]
fn phi(x: f64) -> f64 {
    let x = x.clamp(PHI_MIN, PHI_MAX);
    -(x * 0.5).tanh().ln()
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a LdpcCode) -> Self {
        let edges = code.edge_var.len();
        Self {
            code,
            v2c: vec![0.0; edges],
            c2v: vec![0.0; edges],
            posterior: vec![0.0; code.n()],
            hard: vec![0; code.n()],
        }
    }

    /// Decodes channel LLRs (positive favours 0) with the code's decoder settings.
    pub fn decode(&mut self, llrs: &[f64]) -> Result<DecodeOutcome, CodecError> {
        let code = self.code;
        if llrs.len() != code.n() {
            return Err(CodecError::LengthMismatch {
                expected: code.n(),
                got: llrs.len(),
            });
        }
        if let Some(i) = llrs.iter().position(|l| !l.is_finite()) {
            return Err(CodecError::NonFiniteLlr(i));
        }
        let cfg = code.decoder;

        self.posterior.copy_from_slice(llrs);
        for (e, &v) in code.edge_var.iter().enumerate() {
            self.v2c[e] = llrs[v as usize];
        }
        self.c2v.iter_mut().for_each(|m| *m = 0.0);

        let mut converged = self.settled();
        let mut iterations = 0;
        while !(converged && cfg.early_stop) && iterations < cfg.max_iterations {
            iterations += 1;
            match cfg.algorithm {
                DecoderAlgorithm::NormalizedMinSum => self.check_pass_min_sum(cfg.min_sum_factor),
                DecoderAlgorithm::SumProduct => self.check_pass_sum_product(),
            }
            self.variable_pass(llrs);
            converged = self.settled();
        }

        Ok(DecodeOutcome {
            info: self.hard[..code.k()].to_vec(),
            codeword: self.hard.clone(),
            converged,
            iterations,
        })
    }

    /// Takes hard decisions and reports whether they form a codeword with no
    /// undecided (zero) posteriors.
    fn settled(&mut self) -> bool {
        let mut undecided = false;
        for (h, &p) in self.hard.iter_mut().zip(&self.posterior) {
            *h = (p < 0.0) as u8;
            undecided |= p == 0.0;
        }
        !undecided && self.code.syndrome_weight(&self.hard) == 0
    }

    fn variable_pass(&mut self, llrs: &[f64]) {
        let code = self.code;
        for (v, &llr) in llrs.iter().enumerate() {
            let edges = &code.var_edges[code.var_offsets[v]..code.var_offsets[v + 1]];
            let total = llr + edges.iter().map(|&e| self.c2v[e as usize]).sum::<f64>();
            self.posterior[v] = total;
            for &e in edges {
                self.v2c[e as usize] = total - self.c2v[e as usize];
            }
        }
    }

    fn check_pass_min_sum(&mut self, factor: f64) {
        let code = self.code;
        for c in 0..code.m() {
            let range = code.check_offsets[c]..code.check_offsets[c + 1];
            let msgs = &self.v2c[range.clone()];
            let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, 0);
            let mut negative = false;
            for (i, &m) in msgs.iter().enumerate() {
                let a = m.abs();
                negative ^= m < 0.0;
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = i;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for (i, e) in range.enumerate() {
                let mag = if i == arg { min2 } else { min1 };
                let neg = negative ^ (self.v2c[e] < 0.0);
                let out = factor * mag;
                self.c2v[e] = if neg { -out } else { out };
            }
        }
    }

    fn check_pass_sum_product(&mut self) {
        let code = self.code;
        for c in 0..code.m() {
            let range = code.check_offsets[c]..code.check_offsets[c + 1];
            let mut sum = 0.0;
            let mut zeros = 0;
            let mut negative = false;
            for &m in &self.v2c[range.clone()] {
                negative ^= m < 0.0;
                if m == 0.0 {
                    zeros += 1;
                } else {
                    sum += phi(m.abs());
                }
            }
            for e in range {
                let m = self.v2c[e];
                // tanh(0) = 0: any other zero input silences the output.
                let mag = match (zeros, m == 0.0) {
                    (0, _) => phi(sum - phi(m.abs())),
                    (1, true) => phi(sum),
                    _ => 0.0,
                };
                let neg = negative ^ (m < 0.0);
                self.c2v[e] = if neg { -mag } else { mag };
            }
        }
    }
}

/// Decodes one frame with a fresh [`Decoder`].
pub fn ldpc_decode(llrs: &[f64], code: &LdpcCode) -> Result<DecodeOutcome, CodecError> {
    Decoder::new(code).decode(llrs)
}
