//! Joint distributions, mutual information and loss budgets.
//!
//! All logarithms are natural inside the sums; results are converted to bits
//! once at the end.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelMatrix, CountTable, Kernel, SeparableKernel};

/// Tolerance on the total mass of a probability vector or table.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Factor entries below this are treated as exactly zero when evaluating
/// conditional entropies of a separable channel.
const FACTOR_CUTOFF: f64 = 1e-20;

#[derive(Debug, Error)]
pub enum InfoError {
    #[error("count table has no detections")]
    EmptyCounts,
    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),
    #[error("invalid input law: {0}")]
    InvalidInputLaw(String),
    #[error("invalid loss `{name}`: {value} is not in [0, 1)")]
    InvalidLoss { name: String, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[inline]
fn xlnx(v: f64) -> f64 {
    if v > 0.0 {
        v * v.ln()
    } else {
        0.0
    }
}

/// Normalized joint probabilities `p(x,y)` with their marginals.
///
/// Only nonzero cells are stored, in (x, y) order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n_sent: usize,
    n_received: usize,
    cells: Vec<(usize, usize, f64)>,
    p_x: Vec<f64>,
    p_y: Vec<f64>,
}

impl JointDistribution {
    /// Builds a joint from nonzero cells; the mass must total one.
    pub fn from_cells(
        n_sent: usize,
        n_received: usize,
        mut cells: Vec<(usize, usize, f64)>,
    ) -> Result<Self, InfoError> {
        cells.retain(|c| c.2 != 0.0);
        cells.sort_by_key(|&(x, y, _)| (x, y));
        if cells
            .windows(2)
            .any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(InfoError::InvalidJoint("duplicate cell".into()));
        }
        let mut p_x = vec![0.0; n_sent];
        let mut p_y = vec![0.0; n_received];
        let mut total = 0.0;
        for &(x, y, p) in &cells {
            if x >= n_sent || y >= n_received {
                return Err(InfoError::InvalidJoint(format!(
                    "cell ({x},{y}) outside {n_sent}x{n_received}"
                )));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(InfoError::InvalidJoint(format!("p({x},{y}) = {p}")));
            }
            p_x[x] += p;
            p_y[y] += p;
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::InvalidJoint(format!("total mass {total}")));
        }
        Ok(Self {
            n_sent,
            n_received,
            cells,
            p_x,
            p_y,
        })
    }

    /// Builds a joint from a dense row-major table.
    pub fn from_dense(table: &[Vec<f64>]) -> Result<Self, InfoError> {
        let n_received = table.iter().map(Vec::len).max().unwrap_or(0);
        let cells = table
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().enumerate().map(move |(y, &p)| (x, y, p)))
            .collect();
        Self::from_cells(table.len(), n_received, cells)
    }

    pub fn n_sent(&self) -> usize {
        self.n_sent
    }

    pub fn n_received(&self) -> usize {
        self.n_received
    }

    pub fn cells(&self) -> &[(usize, usize, f64)] {
        &self.cells
    }

    pub fn p_x(&self) -> &[f64] {
        &self.p_x
    }

    pub fn p_y(&self) -> &[f64] {
        &self.p_y
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.cells
            .binary_search_by_key(&(x, y), |&(a, b, _)| (a, b))
            .map(|i| self.cells[i].2)
            .unwrap_or(0.0)
    }

    /// The same distribution with sender and receiver swapped.
    pub fn transpose(&self) -> Self {
        let mut cells: Vec<_> = self.cells.iter().map(|&(x, y, p)| (y, x, p)).collect();
        cells.sort_by_key(|&(x, y, _)| (x, y));
        Self {
            n_sent: self.n_received,
            n_received: self.n_sent,
            cells,
            p_x: self.p_y.clone(),
            p_y: self.p_x.clone(),
        }
    }
}

/// Normalizes a count table into a joint distribution.
pub fn joint_from_counts(counts: &CountTable) -> Result<JointDistribution, InfoError> {
    let total = counts.total();
    if total == 0 {
        return Err(InfoError::EmptyCounts);
    }
    let t = total as f64;
    let mut p_x = vec![0.0; counts.n_sent()];
    let mut p_y = vec![0.0; counts.n_received()];
    let mut row_counts = vec![0u64; counts.n_sent()];
    let mut col_counts = vec![0u64; counts.n_received()];
    let cells = counts
        .iter()
        .map(|(x, y, c)| {
            row_counts[x] += c;
            col_counts[y] += c;
            (x, y, c as f64 / t)
        })
        .collect();
    // Marginals from integer sums keep them exact up to one rounding.
    for (p, &c) in p_x.iter_mut().zip(&row_counts) {
        *p = c as f64 / t;
    }
    for (p, &c) in p_y.iter_mut().zip(&col_counts) {
        *p = c as f64 / t;
    }
    Ok(JointDistribution {
        n_sent: counts.n_sent(),
        n_received: counts.n_received(),
        cells,
        p_x,
        p_y,
    })
}

/// Plug-in mutual information `Σ p(x,y) log2(p(x,y) / (p(x) p(y)))` in bits.
///
/// Applied to sampled counts this estimator is biased upwards when the
/// number of detections per symbol is small.
pub fn mutual_information(joint: &JointDistribution) -> f64 {
    let nats: f64 = joint
        .cells
        .iter()
        .map(|&(x, y, p)| {
            let q = joint.p_x[x] * joint.p_y[y];
            assert!(q > 0.0, "cell ({x},{y}) has mass but a zero marginal");
            p * (p / q).ln()
        })
        .sum();
    nats / std::f64::consts::LN_2
}

/// `log2(n_symbols)`, the information of a perfect channel.
pub fn max_mutual_information(n_symbols: usize) -> Result<f64, InfoError> {
    if n_symbols == 0 {
        return Err(InfoError::InvalidArgument(
            "alphabet must be non-empty".into(),
        ));
    }
    Ok((n_symbols as f64).log2())
}

fn validate_input_law(law: &[f64], n: usize) -> Result<(), InfoError> {
    if law.len() != n {
        return Err(InfoError::InvalidInputLaw(format!(
            "expected {n} probabilities, got {}",
            law.len()
        )));
    }
    if law.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(InfoError::InvalidInputLaw(
            "entries must be finite and >= 0".into(),
        ));
    }
    let total: f64 = law.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(InfoError::InvalidInputLaw(format!("sums to {total}")));
    }
    Ok(())
}

pub fn uniform_law(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Exact mutual information in bits of `channel` driven by `input_law`.
pub fn expected_mutual_information(
    channel: &ChannelMatrix,
    input_law: &[f64],
) -> Result<f64, InfoError> {
    let n = channel.n_symbols();
    validate_input_law(input_law, n)?;
    let nats = match channel.kernel() {
        Kernel::Dense(rows) => dense_mi_nats(rows, input_law, n),
        Kernel::Separable(k) => separable_mi_nats(k, input_law),
    };
    Ok(nats / std::f64::consts::LN_2)
}

fn dense_mi_nats(rows: &[f64], law: &[f64], n: usize) -> f64 {
    let mut p_y = vec![0.0; n];
    for (x, &px) in law.iter().enumerate() {
        if px > 0.0 {
            for (acc, &p) in p_y.iter_mut().zip(&rows[x * n..(x + 1) * n]) {
                *acc += px * p;
            }
        }
    }
    law.iter()
        .enumerate()
        .filter(|(_, &px)| px > 0.0)
        .map(|(x, &px)| {
            let row = &rows[x * n..(x + 1) * n];
            px * row
                .iter()
                .zip(&p_y)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &q)| p * (p / q).ln())
                .sum::<f64>()
        })
        .sum()
}

/// `H(Y) − H(Y|X)` for a separable channel, without forming the full matrix.
fn separable_mi_nats(k: &SeparableKernel, law: &[f64]) -> f64 {
    let (nc, nr) = (k.n_cols, k.n_rows);
    let n = nc * nr;
    let (s, floor) = (k.signal_fraction, k.dark_floor);

    // Output law: p_sig = Rᵀ Π C with Π the input law laid out on the grid.
    let mut pi_c = vec![0.0; nr * nc];
    pi_c.par_chunks_mut(nc).enumerate().for_each(|(rx, out)| {
        for cx in 0..nc {
            let w = law[rx * nc + cx];
            if w > 0.0 {
                let cf = &k.col_factor[cx * nc..(cx + 1) * nc];
                for (o, &c) in out.iter_mut().zip(cf) {
                    *o += w * c;
                }
            }
        }
    });
    let h_y: f64 = (0..nr)
        .into_par_iter()
        .map(|ry| {
            let mut line = vec![0.0; nc];
            for rx in 0..nr {
                let r = k.row_factor[rx * nr + ry];
                if r > 0.0 {
                    for (o, &t) in line.iter_mut().zip(&pi_c[rx * nc..(rx + 1) * nc]) {
                        *o += r * t;
                    }
                }
            }
            -line.iter().map(|&p| xlnx(s * p + floor)).sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();

    // Conditional entropy; factor entries below the cutoff contribute the bare floor.
    let window = |factor: &[f64], m: usize, aim: usize| -> Vec<f64> {
        factor[aim * m..(aim + 1) * m]
            .iter()
            .copied()
            .filter(|&v| v > FACTOR_CUTOFF)
            .collect()
    };
    let col_windows: Vec<Vec<f64>> = (0..nc).map(|c| window(&k.col_factor, nc, c)).collect();
    let row_windows: Vec<Vec<f64>> = (0..nr).map(|r| window(&k.row_factor, nr, r)).collect();
    let floor_term = xlnx(floor);
    let h_y_given_x: f64 = (0..n)
        .into_par_iter()
        .map(|x| {
            let w = law[x];
            if w == 0.0 {
                return 0.0;
            }
            let cw = &col_windows[x % nc];
            let rw = &row_windows[x / nc];
            let mut acc = 0.0;
            for &r in rw {
                let sr = s * r;
                for &c in cw {
                    acc += xlnx(sr * c + floor);
                }
            }
            let outside = (n - cw.len() * rw.len()) as f64;
            -w * (acc + outside * floor_term)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    h_y - h_y_given_x
}

/// One named loss fraction of the optical path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedLoss {
    pub name: String,
    pub loss: f64,
}

/// Ordered optical losses between source and detection.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LossChain {
    stages: Vec<NamedLoss>,
}

impl LossChain {
    pub fn new<S: Into<String>>(
        stages: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self, InfoError> {
        let stages = stages
            .into_iter()
            .map(|(name, loss)| NamedLoss {
                name: name.into(),
                loss,
            })
            .collect();
        Self { stages }.validated()
    }

    pub fn validated(self) -> Result<Self, InfoError> {
        for s in &self.stages {
            if !(s.loss.is_finite() && (0.0..1.0).contains(&s.loss)) {
                return Err(InfoError::InvalidLoss {
                    name: s.name.clone(),
                    value: s.loss,
                });
            }
        }
        Ok(self)
    }

    /// Fiber coupling, SLM diffraction, spectral filter and detector quantum
    /// efficiency of the reference setup.
    pub fn reference_setup() -> Self {
        Self::new([
            ("fiber_coupling", 0.551),
            ("slm_diffraction", 0.24),
            ("spectral_filter", 0.30),
            ("detector_quantum_efficiency", 0.95),
        ])
        .expect("reference losses are valid")
    }

    pub fn stages(&self) -> &[NamedLoss] {
        &self.stages
    }

    /// `Π (1 − loss)`.
    pub fn throughput(&self) -> f64 {
        self.stages.iter().map(|s| 1.0 - s.loss).product()
    }
}

/// Mutual information per sent photon: per-detection information times the
/// optical throughput.
pub fn sent_photon_capacity(mi_per_detection: f64, chain: &LossChain) -> Result<f64, InfoError> {
    if !(mi_per_detection.is_finite() && mi_per_detection >= 0.0) {
        return Err(InfoError::InvalidArgument(format!(
            "mutual information must be finite and >= 0, got {mi_per_detection}"
        )));
    }
    Ok(mi_per_detection * chain.throughput())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_matrix, GridSpec, NoiseModel, PointSpread};

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn identity_counts_give_uniform_diagonal() {
        let dense: Vec<Vec<u64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 5 } else { 0 }).collect())
            .collect();
        let j = joint_from_counts(&CountTable::from_dense(&dense)).unwrap();
        for i in 0..4 {
            assert_eq!(j.prob(i, i), 0.25);
        }
        assert!((mutual_information(&j) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_cell() {
        let mut t = CountTable::new(3, 3);
        t.add(1, 2, 7);
        let j = joint_from_counts(&t).unwrap();
        assert_eq!(j.prob(1, 2), 1.0);
        assert_eq!(j.p_x(), &[0.0, 1.0, 0.0]);
        assert_eq!(j.p_y(), &[0.0, 0.0, 1.0]);
        assert_eq!(mutual_information(&j), 0.0);
    }

    #[test]
    fn two_by_two_counts() {
        let j = joint_from_counts(&CountTable::from_dense(&[vec![3, 1], vec![1, 3]])).unwrap();
        assert_eq!(j.prob(0, 0), 0.375);
        assert_eq!(j.prob(0, 1), 0.125);
        assert_eq!(j.prob(1, 0), 0.125);
        assert_eq!(j.prob(1, 1), 0.375);
        // 0.75·log2(1.5) − 0.25
        let expect = 0.75 * 1.5f64.log2() - 0.25;
        assert!((mutual_information(&j) - expect).abs() < 1e-15);
        assert!((mutual_information(&j) - 0.1887).abs() < 1e-4);
    }

    #[test]
    fn empty_counts_rejected() {
        assert!(matches!(
            joint_from_counts(&CountTable::new(2, 2)),
            Err(InfoError::EmptyCounts)
        ));
    }

    #[test]
    fn uniform_identity_reaches_log2_n() {
        let n = 9072;
        let cells = (0..n).map(|i| (i, i, 1.0 / n as f64)).collect();
        let j = JointDistribution::from_cells(n, n, cells).unwrap();
        let mi = mutual_information(&j);
        assert!((mi - (n as f64).log2()).abs() < 1e-9);
        assert!((mi - 13.15).abs() < 0.005);
    }

    #[test]
    fn independence_gives_zero() {
        let px = [0.2, 0.3, 0.5];
        let py = [0.6, 0.4];
        let table: Vec<Vec<f64>> = px
            .iter()
            .map(|a| py.iter().map(|b| a * b).collect())
            .collect();
        let mi = mutual_information(&JointDistribution::from_dense(&table).unwrap());
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn binary_symmetric_channel() {
        let p = 0.11;
        let table = vec![
            vec![0.5 * (1.0 - p), 0.5 * p],
            vec![0.5 * p, 0.5 * (1.0 - p)],
        ];
        let mi = mutual_information(&JointDistribution::from_dense(&table).unwrap());
        assert!((mi - (1.0 - h2(p))).abs() < 1e-12);
        assert!((mi - 0.5).abs() < 1e-3);
    }

    #[test]
    fn max_information() {
        assert!((max_mutual_information(9072).unwrap() - 13.15).abs() < 0.005);
        assert_eq!(max_mutual_information(1).unwrap(), 0.0);
        assert!((max_mutual_information(3996).unwrap() - 11.96).abs() < 0.005);
        assert!(max_mutual_information(0).is_err());
    }

    #[test]
    fn joint_validation() {
        assert!(JointDistribution::from_dense(&[vec![0.5, 0.4]]).is_err());
        assert!(JointDistribution::from_dense(&[vec![1.5, -0.5]]).is_err());
        assert!(JointDistribution::from_cells(1, 1, vec![(0, 0, 0.5), (0, 0, 0.5)]).is_err());
    }

    #[test]
    fn expected_mi_of_identity() {
        let grid = GridSpec::with_cells(12, 9, 8).unwrap();
        let ch = ChannelMatrix::identity(&grid);
        let mi = expected_mutual_information(&ch, &uniform_law(108)).unwrap();
        assert!((mi - 108f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn point_input_carries_nothing() {
        let ch = build_channel_matrix(
            &GridSpec::with_cells(10, 10, 8).unwrap(),
            &PointSpread::default(),
            &NoiseModel::default(),
        )
        .unwrap();
        let mut law = vec![0.0; 100];
        law[55] = 1.0;
        assert!(expected_mutual_information(&ch, &law).unwrap().abs() < 1e-12);
    }

    #[test]
    fn separable_matches_dense_brute_force() {
        let grid = GridSpec::with_cells(9, 7, 6).unwrap();
        let psf = PointSpread::new(7.9, 7.4)
            .unwrap()
            .with_offset(0.8, -1.1)
            .unwrap();
        for r in [0.5, 10.07, f64::INFINITY] {
            let noise = if r.is_infinite() {
                NoiseModel::noiseless()
            } else {
                NoiseModel::new(r).unwrap()
            };
            let ch = build_channel_matrix(&grid, &psf, &noise).unwrap();
            let rows: Vec<Vec<f64>> = (0..grid.n_symbols()).map(|x| ch.row(x)).collect();
            let dense = ChannelMatrix::from_rows(&grid, rows).unwrap();
            let law: Vec<f64> = (0..grid.n_symbols()).map(|i| (1 + i % 5) as f64).collect();
            let total: f64 = law.iter().sum();
            let law: Vec<f64> = law.iter().map(|w| w / total).collect();
            let a = expected_mutual_information(&ch, &law).unwrap();
            let b = expected_mutual_information(&dense, &law).unwrap();
            assert!((a - b).abs() < 1e-10, "R={r}: {a} vs {b}");
        }
    }

    #[test]
    fn input_law_validation() {
        let ch = ChannelMatrix::identity(&GridSpec::with_cells(2, 2, 4).unwrap());
        assert!(expected_mutual_information(&ch, &[0.5, 0.5]).is_err());
        assert!(expected_mutual_information(&ch, &[0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(expected_mutual_information(&ch, &[0.3, 0.3, 0.3, 0.3]).is_err());
    }

    #[test]
    fn capacity_per_sent_photon() {
        let chain = LossChain::reference_setup();
        let c = sent_photon_capacity(10.5, &chain).unwrap();
        let expect = 10.5 * (1.0 - 0.551) * (1.0 - 0.24) * (1.0 - 0.30) * (1.0 - 0.95);
        assert!((c - expect).abs() < 1e-15);
        assert!((c - 0.125).abs() < 1e-3);
        assert_eq!(
            sent_photon_capacity(3.0, &LossChain::default()).unwrap(),
            3.0
        );
        assert!(LossChain::new([("detector", 1.0)]).is_err());
        assert!(LossChain::new([("detector", -0.1)]).is_err());
        assert!(sent_photon_capacity(-1.0, &chain).is_err());
    }
}
