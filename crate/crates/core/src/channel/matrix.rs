use super::psf::axis_cell_mass;
use super::{ChannelError, GridSpec, NoiseModel, PointSpread};

/// Tolerance on row sums of a channel matrix.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Conditional distribution `p(y|x)` over symbols, conditioned on a detection.
///
/// The model channel is stored in factored form and never materialized: for a
/// separable spot the signal part of `p(y|x)` is a product of a column factor
/// and a row factor. Small hand-made channels can be given densely.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    grid: GridSpec,
    kernel: Kernel,
}

#[derive(Debug, Clone)]
pub enum Kernel {
    Separable(SeparableKernel),
    /// Row-major `N × N` probabilities.
    Dense(Vec<f64>),
}

/// `p(y|x) = s · col[cx][cy] · row[rx][ry] + floor`, with each factor row
/// summing to one.
#[derive(Debug, Clone)]
pub struct SeparableKernel {
    pub(crate) n_cols: usize,
    pub(crate) n_rows: usize,
    pub(crate) col_factor: Vec<f64>,
    pub(crate) row_factor: Vec<f64>,
    pub(crate) col_detect: Vec<f64>,
    pub(crate) row_detect: Vec<f64>,
    pub(crate) signal_fraction: f64,
    pub(crate) dark_floor: f64,
}

impl SeparableKernel {
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Normalized column factor `col[aim][landing]`, row-major `n_cols × n_cols`.
    pub fn col_factor(&self) -> &[f64] {
        &self.col_factor
    }

    /// Normalized row factor `row[aim][landing]`, row-major `n_rows × n_rows`.
    pub fn row_factor(&self) -> &[f64] {
        &self.row_factor
    }

    pub fn signal_fraction(&self) -> f64 {
        self.signal_fraction
    }

    /// Dark-count probability added to every entry.
    pub fn dark_floor(&self) -> f64 {
        self.dark_floor
    }

    #[inline]
    fn prob(&self, x: usize, y: usize) -> f64 {
        let (cx, rx) = (x % self.n_cols, x / self.n_cols);
        let (cy, ry) = (y % self.n_cols, y / self.n_cols);
        self.signal_fraction
            * self.col_factor[cx * self.n_cols + cy]
            * self.row_factor[rx * self.n_rows + ry]
            + self.dark_floor
    }
}

/// One axis of the crosstalk: raw landing masses and their row sums.
fn axis_factor(n: usize, bin: f64, sigma: f64, offset: f64) -> (Vec<f64>, Vec<f64>) {
    let mut raw = vec![0.0; n * n];
    let mut detect = vec![0.0; n];
    for aim in 0..n {
        let row = &mut raw[aim * n..(aim + 1) * n];
        for (cell, v) in row.iter_mut().enumerate() {
            *v = axis_cell_mass(aim, cell, bin, sigma, offset);
        }
        detect[aim] = row.iter().sum();
    }
    (raw, detect)
}

fn normalize_rows(
    raw: &mut [f64],
    detect: &[f64],
    n: usize,
    axis: &str,
) -> Result<(), ChannelError> {
    for (aim, &d) in detect.iter().enumerate() {
        if d <= 0.0 {
            return Err(ChannelError::NoDetection {
                axis: axis.to_string(),
                index: aim,
            });
        }
        raw[aim * n..(aim + 1) * n].iter_mut().for_each(|v| *v /= d);
    }
    Ok(())
}

/// Builds the detection-conditioned channel of the grid.
///
/// Signal photons land according to the spot; photons falling outside the
/// binned area are lost. Among detections, a fraction `1/(R+1)` are dark
/// counts spread uniformly over the alphabet.
pub fn build_channel_matrix(
    grid: &GridSpec,
    psf: &PointSpread,
    noise: &NoiseModel,
) -> Result<ChannelMatrix, ChannelError> {
    let psf = psf.validated()?;
    let noise = noise.validated()?;
    let b = grid.bin_size() as f64;
    let (n_cols, n_rows) = (grid.n_cols(), grid.n_rows());
    let (mut col_factor, col_detect) = axis_factor(n_cols, b, psf.sigma_x(), psf.pointing_offset_x);
    let (mut row_factor, row_detect) = axis_factor(n_rows, b, psf.sigma_y(), psf.pointing_offset_y);
    normalize_rows(&mut col_factor, &col_detect, n_cols, "column")?;
    normalize_rows(&mut row_factor, &row_detect, n_rows, "row")?;
    let n = grid.n_symbols() as f64;
    Ok(ChannelMatrix {
        grid: *grid,
        kernel: Kernel::Separable(SeparableKernel {
            n_cols,
            n_rows,
            col_factor,
            row_factor,
            col_detect,
            row_detect,
            signal_fraction: noise.signal_fraction(),
            dark_floor: noise.dark_fraction() / n,
        }),
    })
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

impl ChannelMatrix {
    /// The noiseless delta channel: every symbol is received as sent.
    pub fn identity(grid: &GridSpec) -> Self {
        let (n_cols, n_rows) = (grid.n_cols(), grid.n_rows());
        ChannelMatrix {
            grid: *grid,
            kernel: Kernel::Separable(SeparableKernel {
                n_cols,
                n_rows,
                col_factor: identity(n_cols),
                row_factor: identity(n_rows),
                col_detect: vec![1.0; n_cols],
                row_detect: vec![1.0; n_rows],
                signal_fraction: 1.0,
                dark_floor: 0.0,
            }),
        }
    }

    /// A channel given row by row; each row must be a probability vector.
    pub fn from_rows(grid: &GridSpec, rows: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let n = grid.n_symbols();
        if rows.len() != n {
            return Err(ChannelError::InvalidRow {
                row: rows.len(),
                reason: format!("expected {n} rows"),
            });
        }
        let mut dense = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(ChannelError::InvalidRow {
                    row: i,
                    reason: format!("expected {n} entries, got {}", row.len()),
                });
            }
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(ChannelError::InvalidRow {
                    row: i,
                    reason: "entries must be finite and non-negative".into(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(ChannelError::InvalidRow {
                    row: i,
                    reason: format!("sums to {sum}"),
                });
            }
            dense.extend(row);
        }
        Ok(ChannelMatrix {
            grid: *grid,
            kernel: Kernel::Dense(dense),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n_symbols(&self) -> usize {
        self.grid.n_symbols()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `p(y|x)`. Indices must be valid symbols.
    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        match &self.kernel {
            Kernel::Separable(k) => k.prob(x, y),
            Kernel::Dense(d) => d[x * self.n_symbols() + y],
        }
    }

    /// Writes row `x` into `out`, which must hold `n_symbols` entries.
    pub fn row_into(&self, x: usize, out: &mut [f64]) {
        let n = self.n_symbols();
        assert_eq!(out.len(), n);
        match &self.kernel {
            Kernel::Separable(k) => {
                let (cx, rx) = (x % k.n_cols, x / k.n_cols);
                let cf = &k.col_factor[cx * k.n_cols..(cx + 1) * k.n_cols];
                let rf = &k.row_factor[rx * k.n_rows..(rx + 1) * k.n_rows];
                for (ry, &r) in rf.iter().enumerate() {
                    let sr = k.signal_fraction * r;
                    for (cy, &c) in cf.iter().enumerate() {
                        out[ry * k.n_cols + cy] = sr * c + k.dark_floor;
                    }
                }
            }
            Kernel::Dense(d) => out.copy_from_slice(&d[x * n..(x + 1) * n]),
        }
    }

    pub fn row(&self, x: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_symbols()];
        self.row_into(x, &mut out);
        out
    }

    /// Probability that a signal photon aimed at `x` lands anywhere on the
    /// grid, before dark counts are mixed in.
    pub fn detect_prob(&self, x: usize) -> f64 {
        match &self.kernel {
            Kernel::Separable(k) => k.col_detect[x % k.n_cols] * k.row_detect[x / k.n_cols],
            Kernel::Dense(_) => 1.0,
        }
    }
}
