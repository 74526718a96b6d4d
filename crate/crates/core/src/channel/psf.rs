use serde::{Deserialize, Serialize};

use super::{ChannelError, GridSpec};

/// Factor converting a Gaussian FWHM to its standard deviation, `2·sqrt(2·ln 2)`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Separable Gaussian focal spot. Widths and offsets are in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointSpread {
    pub fwhm_x: f64,
    pub fwhm_y: f64,
    pub pointing_offset_x: f64,
    pub pointing_offset_y: f64,
}

impl PointSpread {
    pub const DEFAULT_FWHM: f64 = 8.0;

    pub fn new(fwhm_x: f64, fwhm_y: f64) -> Result<Self, ChannelError> {
        Self {
            fwhm_x,
            fwhm_y,
            pointing_offset_x: 0.0,
            pointing_offset_y: 0.0,
        }
        .validated()
    }

    pub fn isotropic(fwhm: f64) -> Result<Self, ChannelError> {
        Self::new(fwhm, fwhm)
    }

    pub fn with_offset(mut self, offset_x: f64, offset_y: f64) -> Result<Self, ChannelError> {
        self.pointing_offset_x = offset_x;
        self.pointing_offset_y = offset_y;
        self.validated()
    }

    pub fn validated(self) -> Result<Self, ChannelError> {
        for (name, w) in [("fwhm_x", self.fwhm_x), ("fwhm_y", self.fwhm_y)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(ChannelError::InvalidPointSpread(format!(
                    "{name} must be finite and > 0, got {w}"
                )));
            }
        }
        for (name, o) in [
            ("pointing_offset_x", self.pointing_offset_x),
            ("pointing_offset_y", self.pointing_offset_y),
        ] {
            if !o.is_finite() {
                return Err(ChannelError::InvalidPointSpread(format!(
                    "{name} must be finite, got {o}"
                )));
            }
        }
        Ok(self)
    }

    pub fn sigma_x(&self) -> f64 {
        self.fwhm_x / FWHM_PER_SIGMA
    }

    pub fn sigma_y(&self) -> f64 {
        self.fwhm_y / FWHM_PER_SIGMA
    }
}

impl Default for PointSpread {
    fn default() -> Self {
        Self::isotropic(Self::DEFAULT_FWHM).expect("default point spread is valid")
    }
}

/// How dark counts distribute over the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DarkSpatialLaw {
    #[default]
    UniformOverSymbols,
}

/// Detector noise: among detections, signal and dark events occur in the
/// ratio `signal_to_dark_ratio : 1`. An infinite ratio means no dark counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub signal_to_dark_ratio: f64,
    #[serde(default)]
    pub dark_spatial_law: DarkSpatialLaw,
}

impl NoiseModel {
    /// Ratio of the intensified camera used for the reference measurements.
    pub const REFERENCE_RATIO: f64 = 10.07;

    pub fn new(signal_to_dark_ratio: f64) -> Result<Self, ChannelError> {
        Self {
            signal_to_dark_ratio,
            dark_spatial_law: DarkSpatialLaw::UniformOverSymbols,
        }
        .validated()
    }

    pub fn noiseless() -> Self {
        Self {
            signal_to_dark_ratio: f64::INFINITY,
            dark_spatial_law: DarkSpatialLaw::UniformOverSymbols,
        }
    }

    pub fn validated(self) -> Result<Self, ChannelError> {
        let r = self.signal_to_dark_ratio;
        if r.is_nan() || r <= 0.0 {
            return Err(ChannelError::InvalidNoise(format!(
                "signal-to-dark ratio must be > 0, got {r}"
            )));
        }
        Ok(self)
    }

    /// Fraction of detections that are signal photons, `R/(R+1)`.
    pub fn signal_fraction(&self) -> f64 {
        let r = self.signal_to_dark_ratio;
        if r.is_infinite() {
            1.0
        } else {
            r / (r + 1.0)
        }
    }

    /// Fraction of detections that are dark counts, `1/(R+1)`.
    pub fn dark_fraction(&self) -> f64 {
        let r = self.signal_to_dark_ratio;
        if r.is_infinite() {
            0.0
        } else {
            1.0 / (r + 1.0)
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::new(Self::REFERENCE_RATIO).expect("reference noise is valid")
    }
}

/// Mass of a zero-mean normal with deviation `sigma` on `[lo, hi]`.
///
/// Tails are evaluated with `erfc` so that far-off cells keep their relative
/// precision instead of cancelling to zero.
pub fn axis_interval_mass(lo: f64, hi: f64, sigma: f64) -> f64 {
    debug_assert!(lo <= hi);
    let scale = 1.0 / (sigma * std::f64::consts::SQRT_2);
    let (zl, zh) = (lo * scale, hi * scale);
    let mass = if zl >= 0.0 {
        0.5 * (libm::erfc(zl) - libm::erfc(zh))
    } else if zh <= 0.0 {
        0.5 * (libm::erfc(-zh) - libm::erfc(-zl))
    } else {
        0.5 * (libm::erf(zh) - libm::erf(zl))
    };
    mass.max(0.0)
}

/// Fraction of the photons aimed at cell `aim` of one axis that land in cell
/// `cell`, for cells of `bin` pixels.
pub(crate) fn axis_cell_mass(aim: usize, cell: usize, bin: f64, sigma: f64, offset: f64) -> f64 {
    let center = (aim as f64 + 0.5) * bin + offset;
    let lo = cell as f64 * bin - center;
    axis_interval_mass(lo, lo + bin, sigma)
}

/// Probability that a photon aimed at `target` lands inside the cell of
/// `landing`. The spot is centered on the target's cell center plus the
/// pointing offset.
pub fn bin_hit_probability(
    psf: &PointSpread,
    grid: &GridSpec,
    target: usize,
    landing: usize,
) -> Result<f64, ChannelError> {
    grid.check_symbol(target)?;
    grid.check_symbol(landing)?;
    let n_cols = grid.n_cols();
    let b = grid.bin_size() as f64;
    let px = axis_cell_mass(
        target % n_cols,
        landing % n_cols,
        b,
        psf.sigma_x(),
        psf.pointing_offset_x,
    );
    let py = axis_cell_mass(
        target / n_cols,
        landing / n_cols,
        b,
        psf.sigma_y(),
        psf.pointing_offset_y,
    );
    Ok(px * py)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule integral of the 2-D Gaussian density over the landing
    /// cell on a `step`-pixel lattice.
    fn riemann_hit(
        psf: &PointSpread,
        grid: &GridSpec,
        target: usize,
        landing: usize,
        step: f64,
    ) -> f64 {
        let n = grid.n_cols();
        let b = grid.bin_size() as f64;
        let cx = ((target % n) as f64 + 0.5) * b + psf.pointing_offset_x;
        let cy = ((target / n) as f64 + 0.5) * b + psf.pointing_offset_y;
        let (x0, y0) = (((landing % n) as f64) * b, ((landing / n) as f64) * b);
        let (sx, sy) = (psf.sigma_x(), psf.sigma_y());
        let steps = (b / step).round() as usize;
        let norm = 1.0 / (2.0 * std::f64::consts::PI * sx * sy);
        let mut total = 0.0;
        for i in 0..steps {
            let dx = x0 + (i as f64 + 0.5) * step - cx;
            let gx = (-dx * dx / (2.0 * sx * sx)).exp();
            let mut col = 0.0;
            for j in 0..steps {
                let dy = y0 + (j as f64 + 0.5) * step - cy;
                col += (-dy * dy / (2.0 * sy * sy)).exp();
            }
            total += gx * col;
        }
        total * norm * step * step
    }

    #[test]
    fn sigma_from_fwhm() {
        let psf = PointSpread::isotropic(8.0).unwrap();
        assert!((psf.sigma_x() - 8.0 / (2.0 * (2.0 * 2f64.ln()).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn centered_hit_matches_riemann_oracle_bin8() {
        let grid = GridSpec::reference();
        let psf = PointSpread::default();
        let target = grid.symbol_at(50, 40);
        let exact = bin_hit_probability(&psf, &grid, target, target).unwrap();
        let oracle = riemann_hit(&psf, &grid, target, target, 0.01);
        assert!((exact - oracle).abs() < 1e-4, "{exact} vs {oracle}");
        assert!((exact - 0.579).abs() < 5e-3, "{exact}");
    }

    #[test]
    fn centered_hit_matches_riemann_oracle_bin12() {
        let grid = GridSpec::new(896, 648, 12).unwrap();
        let psf = PointSpread::default();
        let target = grid.symbol_at(30, 20);
        let exact = bin_hit_probability(&psf, &grid, target, target).unwrap();
        let oracle = riemann_hit(&psf, &grid, target, target, 0.01);
        assert!((exact - oracle).abs() < 1e-4, "{exact} vs {oracle}");
        assert!((exact - 0.852).abs() < 5e-3, "{exact}");
    }

    #[test]
    fn neighbours_and_offsets_match_riemann_oracle() {
        let grid = GridSpec::reference();
        let psf = PointSpread::new(7.9, 7.4)
            .unwrap()
            .with_offset(1.3, -0.7)
            .unwrap();
        let target = grid.symbol_at(10, 10);
        for landing in [
            target,
            target + 1,
            target - 1,
            target + grid.n_cols(),
            target - grid.n_cols() + 1,
        ] {
            let exact = bin_hit_probability(&psf, &grid, target, landing).unwrap();
            let oracle = riemann_hit(&psf, &grid, target, landing, 0.01);
            assert!(
                (exact - oracle).abs() < 1e-4,
                "{landing}: {exact} vs {oracle}"
            );
        }
    }

    #[test]
    fn large_bins_capture_everything() {
        let grid = GridSpec::with_cells(3, 3, 80).unwrap();
        let psf = PointSpread::default();
        let p = bin_hit_probability(&psf, &grid, 4, 4).unwrap();
        assert!((p - 1.0).abs() < 1e-6);
    }

    #[test]
    fn left_right_symmetry() {
        let grid = GridSpec::reference();
        let psf = PointSpread::default();
        let t = grid.symbol_at(40, 30);
        let l = bin_hit_probability(&psf, &grid, t, t - 1).unwrap();
        let r = bin_hit_probability(&psf, &grid, t, t + 1).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn far_tail_keeps_precision() {
        let m = axis_interval_mass(40.0, 48.0, 3.4);
        assert!(m > 0.0 && m < 1e-30);
    }

    #[test]
    fn index_validation() {
        let grid = GridSpec::reference();
        assert!(bin_hit_probability(&PointSpread::default(), &grid, 9072, 0).is_err());
    }

    #[test]
    fn noise_fractions() {
        let n = NoiseModel::new(10.0).unwrap();
        assert!((n.signal_fraction() - 10.0 / 11.0).abs() < 1e-15);
        assert!((n.dark_fraction() - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(NoiseModel::noiseless().signal_fraction(), 1.0);
        assert!(NoiseModel::new(0.0).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
        assert!(PointSpread::isotropic(0.0).is_err());
    }
}
