use serde::{Deserialize, Serialize};

use super::ChannelError;

/// Detector geometry and the pixel binning that defines the alphabet.
///
/// Pixels left over at the right and bottom edges belong to no symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    detector_width: usize,
    detector_height: usize,
    bin_size: usize,
    n_cols: usize,
    n_rows: usize,
}

impl GridSpec {
    pub const DEFAULT_WIDTH: usize = 896;
    pub const DEFAULT_HEIGHT: usize = 648;
    pub const DEFAULT_BIN: usize = 8;

    pub fn new(
        detector_width: usize,
        detector_height: usize,
        bin_size: usize,
    ) -> Result<Self, ChannelError> {
        if detector_width == 0 || detector_height == 0 || bin_size == 0 {
            return Err(ChannelError::InvalidDimension(format!(
                "detector {detector_width}x{detector_height} px with bin {bin_size} px: all must be >= 1"
            )));
        }
        if bin_size > detector_width.min(detector_height) {
            return Err(ChannelError::InvalidDimension(format!(
                "bin {bin_size} px exceeds the detector {detector_width}x{detector_height} px"
            )));
        }
        Ok(Self {
            detector_width,
            detector_height,
            bin_size,
            n_cols: detector_width / bin_size,
            n_rows: detector_height / bin_size,
        })
    }

    /// 896×648 px detector binned 8×8, i.e. 112×81 symbols.
    pub fn reference() -> Self {
        Self::new(Self::DEFAULT_WIDTH, Self::DEFAULT_HEIGHT, Self::DEFAULT_BIN)
            .expect("reference grid is valid")
    }

    /// Grid with `n_cols × n_rows` cells of `bin_size` pixels and no leftover pixels.
    pub fn with_cells(n_cols: usize, n_rows: usize, bin_size: usize) -> Result<Self, ChannelError> {
        Self::new(n_cols * bin_size, n_rows * bin_size, bin_size)
    }

    pub fn detector_width(&self) -> usize {
        self.detector_width
    }

    pub fn detector_height(&self) -> usize {
        self.detector_height
    }

    pub fn bin_size(&self) -> usize {
        self.bin_size
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_symbols(&self) -> usize {
        self.n_cols * self.n_rows
    }

    pub fn check_symbol(&self, symbol: usize) -> Result<(), ChannelError> {
        if symbol < self.n_symbols() {
            Ok(())
        } else {
            Err(ChannelError::SymbolOutOfRange {
                symbol,
                n_symbols: self.n_symbols(),
            })
        }
    }

    /// Row-major label of the cell at (`col`, `row`).
    pub fn symbol_at(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.n_cols && row < self.n_rows);
        row * self.n_cols + col
    }

    /// True when the symbol has all four axis neighbours on the grid.
    pub fn is_interior(&self, symbol: usize) -> bool {
        let (col, row) = (symbol % self.n_cols, symbol / self.n_cols);
        col > 0 && row > 0 && col + 1 < self.n_cols && row + 1 < self.n_rows
    }
}

pub fn grid_from_config(
    detector_width: usize,
    detector_height: usize,
    bin_size: usize,
) -> Result<GridSpec, ChannelError> {
    GridSpec::new(detector_width, detector_height, bin_size)
}

/// Location of a symbol on the detector. Centers are in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinPosition {
    pub col: usize,
    pub row: usize,
    pub center_x: f64,
    pub center_y: f64,
}

/// Symbols are numbered left to right, then top to bottom.
pub fn symbol_to_bin(symbol: usize, grid: &GridSpec) -> Result<BinPosition, ChannelError> {
    grid.check_symbol(symbol)?;
    let col = symbol % grid.n_cols;
    let row = symbol / grid.n_cols;
    let b = grid.bin_size as f64;
    Ok(BinPosition {
        col,
        row,
        center_x: (col as f64 + 0.5) * b,
        center_y: (row as f64 + 0.5) * b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid_has_9072_symbols() {
        let g = grid_from_config(896, 648, 8).unwrap();
        assert_eq!((g.n_cols(), g.n_rows(), g.n_symbols()), (112, 81, 9072));
        assert_eq!(g, GridSpec::reference());
    }

    #[test]
    fn single_symbol_grid() {
        let g = grid_from_config(896, 648, 648).unwrap();
        assert_eq!((g.n_cols(), g.n_rows(), g.n_symbols()), (1, 1, 1));
    }

    #[test]
    fn integer_division_leaves_edge_pixels() {
        let g = grid_from_config(896, 648, 12).unwrap();
        assert_eq!(
            (g.n_cols(), g.n_rows(), g.n_symbols()),
            (896 / 12, 648 / 12, 3996)
        );
    }

    #[test]
    fn invalid_dimensions() {
        assert!(grid_from_config(0, 648, 8).is_err());
        assert!(grid_from_config(896, 648, 0).is_err());
        assert!(grid_from_config(896, 648, 649).is_err());
    }

    #[test]
    fn symbol_positions() {
        let g = GridSpec::reference();
        let first = symbol_to_bin(0, &g).unwrap();
        assert_eq!(
            (first.col, first.row, first.center_x, first.center_y),
            (0, 0, 4.0, 4.0)
        );
        let below = symbol_to_bin(112, &g).unwrap();
        assert_eq!((below.col, below.row), (0, 1));
        let last = symbol_to_bin(9071, &g).unwrap();
        assert_eq!((last.col, last.row), (9071 % 112, 9071 / 112));
        assert_eq!((last.col, last.row), (111, 80));
        assert!(matches!(
            symbol_to_bin(9072, &g),
            Err(ChannelError::SymbolOutOfRange { .. })
        ));
    }
}
