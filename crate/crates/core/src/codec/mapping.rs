use serde::{Deserialize, Serialize};

use super::{gray_decode, gray_encode, CodecError};
use crate::channel::GridSpec;

/// Independent Gray codes for the column and row of a symbol.
///
/// The column bits come first, each coordinate most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayMap {
    pub bits_x: u32,
    pub bits_y: u32,
}

fn bits_for(n: usize) -> u32 {
    usize::BITS - (n.max(1) - 1).leading_zeros()
}

impl GrayMap {
    /// The narrowest map covering `grid`: 7 + 7 bits for 112×81 cells.
    pub fn for_grid(grid: &GridSpec) -> Self {
        Self {
            bits_x: bits_for(grid.n_cols()),
            bits_y: bits_for(grid.n_rows()),
        }
    }

    pub fn width(&self) -> usize {
        (self.bits_x + self.bits_y) as usize
    }

    pub fn check(&self, grid: &GridSpec) -> Result<(), CodecError> {
        let fits = |bits: u32, n: usize| bits < 64 && (1u64 << bits) >= n as u64;
        if fits(self.bits_x, grid.n_cols()) && fits(self.bits_y, grid.n_rows()) {
            Ok(())
        } else {
            Err(CodecError::MapTooNarrow {
                bits_x: self.bits_x,
                bits_y: self.bits_y,
                n_cols: grid.n_cols(),
                n_rows: grid.n_rows(),
            })
        }
    }
}

/// Result of mapping a bit pattern back onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappedSymbol {
    pub symbol: usize,
    /// Set when a decoded coordinate lay outside the grid and was clamped.
    pub clamped: bool,
}

/// `gray(col) ++ gray(row)`.
pub fn symbol_to_bits(
    symbol: usize,
    grid: &GridSpec,
    map: &GrayMap,
) -> Result<Vec<u8>, CodecError> {
    map.check(grid)?;
    grid.check_symbol(symbol)?;
    let (col, row) = (symbol % grid.n_cols(), symbol / grid.n_cols());
    let mut bits = gray_encode(col as u64, map.bits_x)?;
    bits.extend(gray_encode(row as u64, map.bits_y)?);
    Ok(bits)
}

/// Inverse of [`symbol_to_bits`]. Coordinates beyond the grid are clamped to
/// the last column or row and flagged.
pub fn bits_to_symbol(
    bits: &[u8],
    grid: &GridSpec,
    map: &GrayMap,
) -> Result<MappedSymbol, CodecError> {
    map.check(grid)?;
    if bits.len() != map.width() {
        return Err(CodecError::LengthMismatch {
            expected: map.width(),
            got: bits.len(),
        });
    }
    let (xb, yb) = bits.split_at(map.bits_x as usize);
    let col = gray_decode(xb) as usize;
    let row = gray_decode(yb) as usize;
    let clamped = col >= grid.n_cols() || row >= grid.n_rows();
    let col = col.min(grid.n_cols() - 1);
    let row = row.min(grid.n_rows() - 1);
    Ok(MappedSymbol {
        symbol: grid.symbol_at(col, row),
        clamped,
    })
}

/// Hamming distance between two bit slices of equal length.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_map_is_seven_by_seven() {
        let g = GridSpec::reference();
        assert_eq!(
            GrayMap::for_grid(&g),
            GrayMap {
                bits_x: 7,
                bits_y: 7
            }
        );
        assert!(GrayMap {
            bits_x: 6,
            bits_y: 7
        }
        .check(&g)
        .is_err());
        let single = GridSpec::new(648, 648, 648).unwrap();
        assert_eq!(GrayMap::for_grid(&single).width(), 0);
    }

    #[test]
    fn examples() {
        let g = GridSpec::reference();
        let m = GrayMap::for_grid(&g);
        assert_eq!(symbol_to_bits(0, &g, &m).unwrap(), vec![0; 14]);
        assert_eq!(
            symbol_to_bits(113, &g, &m).unwrap(),
            vec![0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1]
        );
        assert_eq!(bits_to_symbol(&[0; 14], &g, &m).unwrap().symbol, 0);
        let last = symbol_to_bits(9071, &g, &m).unwrap();
        assert_eq!(
            bits_to_symbol(&last, &g, &m).unwrap(),
            MappedSymbol {
                symbol: 9071,
                clamped: false
            }
        );
        assert!(symbol_to_bits(9072, &g, &m).is_err());
        assert!(bits_to_symbol(&[0; 13], &g, &m).is_err());
    }

    #[test]
    fn out_of_alphabet_columns_clamp() {
        let g = GridSpec::reference();
        let m = GrayMap::for_grid(&g);
        let mut bits = gray_encode(120, 7).unwrap();
        bits.extend(gray_encode(5, 7).unwrap());
        let d = bits_to_symbol(&bits, &g, &m).unwrap();
        assert!(d.clamped);
        assert_eq!(d.symbol, g.symbol_at(111, 5));
    }

    #[test]
    fn roundtrip_all_symbols() {
        let g = GridSpec::reference();
        let m = GrayMap::for_grid(&g);
        for s in 0..g.n_symbols() {
            let bits = symbol_to_bits(s, &g, &m).unwrap();
            assert_eq!(
                bits_to_symbol(&bits, &g, &m).unwrap(),
                MappedSymbol {
                    symbol: s,
                    clamped: false
                }
            );
        }
    }

    #[test]
    fn axis_neighbours_differ_in_one_bit() {
        let g = GridSpec::reference();
        let m = GrayMap::for_grid(&g);
        let n = g.n_cols();
        for s in (0..g.n_symbols()).filter(|&s| g.is_interior(s)) {
            let b = symbol_to_bits(s, &g, &m).unwrap();
            for t in [s - 1, s + 1, s - n, s + n] {
                assert_eq!(hamming(&b, &symbol_to_bits(t, &g, &m).unwrap()), 1);
            }
        }
    }
}
