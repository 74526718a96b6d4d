//! DVB-S2 style LDPC codes built from an address table.
//!
//! The table lists, for each group of 360 information bits, the parity checks
//! touched by the first bit of the group; bit `w` of the group touches
//! `(address + w·q) mod m`. The parity part is a staircase, so encoding is a
//! running XOR over the checks.

use serde::{Deserialize, Serialize};

use super::CodecError;

/// Information bits per address-table group.
pub const GROUP_SIZE: usize = 360;

const DVB_S2_RATE_HALF_NORMAL: &str = include_str!("../../assets/dvbs2_r1_2_normal.v1.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderAlgorithm {
    SumProduct,
    #[default]
    NormalizedMinSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub algorithm: DecoderAlgorithm,
    pub max_iterations: usize,
    /// Scale applied to min-sum check messages.
    pub min_sum_factor: f64,
    pub early_stop: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            algorithm: DecoderAlgorithm::NormalizedMinSum,
            max_iterations: 50,
            min_sum_factor: 0.75,
            early_stop: true,
        }
    }
}

impl DecoderConfig {
    pub fn validated(self) -> Result<Self, CodecError> {
        if self.max_iterations == 0 {
            return Err(CodecError::InvalidDecoderConfig(
                "max_iterations must be >= 1".into(),
            ));
        }
        if !(self.min_sum_factor > 0.0 && self.min_sum_factor <= 1.0) {
            return Err(CodecError::InvalidDecoderConfig(format!(
                "min_sum_factor must be in (0, 1], got {}",
                self.min_sum_factor
            )));
        }
        Ok(self)
    }
}

/// Check-node degree summary of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeStats {
    /// Information-bit connections per check (identical for every check).
    pub check_info_degree: usize,
    pub min_check_degree: usize,
    pub max_check_degree: usize,
    pub edges: usize,
}

/// Sparse parity-check structure and decoder settings.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    q: usize,
    /// CSR: edges of check `c` are `check_offsets[c]..check_offsets[c + 1]`.
    pub(crate) check_offsets: Vec<usize>,
    pub(crate) edge_var: Vec<u32>,
    /// CSR over variables into edge indices.
    pub(crate) var_offsets: Vec<usize>,
    pub(crate) var_edges: Vec<u32>,
    /// Information bits per check, CSR sharing `info_offsets`.
    info_offsets: Vec<usize>,
    info_vars: Vec<u32>,
    stats: DegreeStats,
    pub decoder: DecoderConfig,
}

impl LdpcCode {
    /// The DVB-S2 rate-1/2 normal-frame code, n = 64800, k = 32400.
    pub fn dvb_s2_rate_half() -> Self {
        Self::from_table(DVB_S2_RATE_HALF_NORMAL).expect("bundled table is valid")
    }

    /// Parses an address table: a header line `n k`, then one line per group
    /// of 360 information bits with space-separated check addresses.
    pub fn from_table(text: &str) -> Result<Self, CodecError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, reason: String| CodecError::Table { line, reason };

        let (hline, header) = lines
            .next()
            .ok_or_else(|| bad(1, "missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| bad(hline, format!("invalid number `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        let [n, k] = dims[..] else {
            return Err(bad(hline, "header must be `n k`".into()));
        };
        if k == 0 || k >= n || k % GROUP_SIZE != 0 || (n - k) % GROUP_SIZE != 0 {
            return Err(bad(hline, format!("unsupported dimensions n={n} k={k}")));
        }
        let m = n - k;
        let q = m / GROUP_SIZE;

        let mut groups: Vec<Vec<usize>> = Vec::with_capacity(k / GROUP_SIZE);
        for (line, l) in lines {
            let addrs: Vec<usize> = l
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| bad(line, format!("invalid address `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            if addrs.is_empty() {
                return Err(bad(line, "empty group".into()));
            }
            if let Some(a) = addrs.iter().find(|&&a| a >= m) {
                return Err(bad(line, format!("address {a} >= m = {m}")));
            }
            let mut sorted = addrs.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(bad(line, "repeated address".into()));
            }
            groups.push(addrs);
        }
        if groups.len() != k / GROUP_SIZE {
            return Err(bad(
                0,
                format!("expected {} groups, found {}", k / GROUP_SIZE, groups.len()),
            ));
        }

        // Information part, gathered per check.
        let mut per_check: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (t, addrs) in groups.iter().enumerate() {
            for w in 0..GROUP_SIZE {
                let j = (t * GROUP_SIZE + w) as u32;
                for &a in addrs {
                    per_check[(a + w * q) % m].push(j);
                }
            }
        }
        let info_degree = per_check[0].len();
        if let Some(c) = per_check.iter().position(|v| v.len() != info_degree) {
            return Err(bad(
                0,
                format!(
                    "check {c} has {} information connections, check 0 has {info_degree}",
                    per_check[c].len()
                ),
            ));
        }
        let mut info_offsets = Vec::with_capacity(m + 1);
        let mut info_vars = Vec::with_capacity(m * info_degree);
        info_offsets.push(0);
        for v in &per_check {
            info_vars.extend_from_slice(v);
            info_offsets.push(info_vars.len());
        }

        // Full graph: information edges plus the staircase.
        let mut check_offsets = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::with_capacity(info_vars.len() + 2 * m);
        check_offsets.push(0);
        for (c, v) in per_check.iter().enumerate() {
            edge_var.extend_from_slice(v);
            if c > 0 {
                edge_var.push((k + c - 1) as u32);
            }
            edge_var.push((k + c) as u32);
            check_offsets.push(edge_var.len());
        }
        let mut var_count = vec![0usize; n];
        for &v in &edge_var {
            var_count[v as usize] += 1;
        }
        let mut var_offsets = Vec::with_capacity(n + 1);
        var_offsets.push(0);
        for c in &var_count {
            var_offsets.push(var_offsets.last().unwrap() + c);
        }
        let mut fill = var_offsets[..n].to_vec();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        let degrees = check_offsets.windows(2).map(|w| w[1] - w[0]);
        let stats = DegreeStats {
            check_info_degree: info_degree,
            min_check_degree: degrees.clone().min().unwrap_or(0),
            max_check_degree: degrees.max().unwrap_or(0),
            edges: edge_var.len(),
        };

        Ok(Self {
            n,
            k,
            q,
            check_offsets,
            edge_var,
            var_offsets,
            var_edges,
            info_offsets,
            info_vars,
            stats,
            decoder: DecoderConfig::default(),
        })
    }

    pub fn with_decoder(mut self, decoder: DecoderConfig) -> Result<Self, CodecError> {
        self.decoder = decoder.validated()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.n - self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn degree_stats(&self) -> DegreeStats {
        self.stats
    }

    /// Variables taking part in check `c`.
    pub fn check_vars(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_var[self.check_offsets[c]..self.check_offsets[c + 1]]
            .iter()
            .map(|&v| v as usize)
    }

    /// Number of unsatisfied checks of `word`, given as hard bits.
    pub fn syndrome_weight(&self, word: &[u8]) -> usize {
        assert_eq!(word.len(), self.n);
        (0..self.m())
            .filter(|&c| self.check_vars(c).fold(0u8, |acc, v| acc ^ word[v]) & 1 == 1)
            .count()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndrome_weight(word) == 0
    }

    /// Systematic encoding: information bits followed by parity bits.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>, CodecError> {
        if info.len() != self.k {
            return Err(CodecError::LengthMismatch {
                expected: self.k,
                got: info.len(),
            });
        }
        let mut word = Vec::with_capacity(self.n);
        word.extend(info.iter().map(|b| b & 1));
        let mut parity = 0u8;
        for c in 0..self.m() {
            let acc = self.info_vars[self.info_offsets[c]..self.info_offsets[c + 1]]
                .iter()
                .fold(0u8, |a, &j| a ^ word[j as usize]);
            parity ^= acc;
            word.push(parity);
        }
        Ok(word)
    }
}
