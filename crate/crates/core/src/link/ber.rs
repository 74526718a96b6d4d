use super::{LinkError, SymbolPacking};
use crate::channel::{ChannelMatrix, GridSpec, Kernel};
use crate::codec::{gray_encode, GrayMap};
use crate::info::uniform_law;

/// Bit patterns assigned to every column and every row of a grid. A symbol's
/// pattern is its column code followed by its row code.
#[derive(Debug, Clone)]
pub struct CoordinateCodes {
    cols: Vec<Vec<u8>>,
    rows: Vec<Vec<u8>>,
}

impl CoordinateCodes {
    /// Full Gray codes of `map`.
    pub fn gray(grid: &GridSpec, map: &GrayMap) -> Result<Self, LinkError> {
        map.check(grid)?;
        Self::truncated(grid, map, map.bits_x, map.bits_y)
    }

    /// The low `keep_x`/`keep_y` bits of each coordinate's Gray code.
    pub fn truncated(
        grid: &GridSpec,
        map: &GrayMap,
        keep_x: u32,
        keep_y: u32,
    ) -> Result<Self, LinkError> {
        let codes = |n: usize, bits: u32, keep: u32| -> Result<Vec<Vec<u8>>, LinkError> {
            (0..n)
                .map(|v| {
                    let full = gray_encode(v as u64, bits)?;
                    Ok(full[(bits - keep) as usize..].to_vec())
                })
                .collect()
        };
        Ok(Self {
            cols: codes(grid.n_cols(), map.bits_x, keep_x.min(map.bits_x))?,
            rows: codes(grid.n_rows(), map.bits_y, keep_y.min(map.bits_y))?,
        })
    }

    pub fn width(&self) -> usize {
        self.cols.first().map_or(0, Vec::len) + self.rows.first().map_or(0, Vec::len)
    }

    /// `d[b][a·n + c]` is 1 where codes `a` and `c` differ in bit `b`.
    fn position_distances(codes: &[Vec<u8>]) -> Vec<Vec<f64>> {
        let n = codes.len();
        let width = codes.first().map_or(0, Vec::len);
        (0..width)
            .map(|b| {
                let mut d = vec![0.0; n * n];
                for a in 0..n {
                    for c in 0..n {
                        d[a * n + c] = (codes[a][b] != codes[c][b]) as u8 as f64;
                    }
                }
                d
            })
            .collect()
    }
}

/// Per-coordinate flip probability of one bit: signal part through the axis
/// factor plus dark detections spread over the `other` axis.
fn axis_flips(factor: &[f64], d: &[f64], n: usize, other: usize, s: f64, floor: f64) -> Vec<f64> {
    (0..n)
        .map(|a| {
            let sig: f64 = (0..n).map(|c| factor[a * n + c] * d[a * n + c]).sum();
            let all: f64 = d[a * n..(a + 1) * n].iter().sum();
            s * sig + floor * other as f64 * all
        })
        .collect()
}

/// Expected flip probability of each bit position when symbols drawn from
/// `law` cross the channel and both ends use `codes`. Column bits come first.
pub fn expected_bit_error_profile(
    channel: &ChannelMatrix,
    codes: &CoordinateCodes,
    law: &[f64],
) -> Result<Vec<f64>, LinkError> {
    let grid = channel.grid();
    let (nc, nr) = (grid.n_cols(), grid.n_rows());
    let n = nc * nr;
    if law.len() != n {
        return Err(LinkError::InvalidArgument(format!(
            "input law has {} entries for {n} symbols",
            law.len()
        )));
    }
    let dc = CoordinateCodes::position_distances(&codes.cols);
    let dr = CoordinateCodes::position_distances(&codes.rows);
    let weighted = |f: &dyn Fn(usize) -> f64| -> f64 {
        law.iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(x, &w)| w * f(x))
            .sum()
    };
    let profile = match channel.kernel() {
        Kernel::Separable(k) => {
            let (s, floor) = (k.signal_fraction(), k.dark_floor());
            let cols = dc.iter().map(|d| {
                let per = axis_flips(k.col_factor(), d, nc, nr, s, floor);
                weighted(&|x| per[x % nc])
            });
            let rows = dr.iter().map(|d| {
                let per = axis_flips(k.row_factor(), d, nr, nc, s, floor);
                weighted(&|x| per[x / nc])
            });
            cols.chain(rows).collect()
        }
        Kernel::Dense(rows) => {
            let flips = |x: usize, bit: &dyn Fn(usize, usize) -> f64| -> f64 {
                rows[x * n..(x + 1) * n]
                    .iter()
                    .enumerate()
                    .map(|(y, &p)| p * bit(x, y))
                    .sum()
            };
            let cols = dc
                .iter()
                .map(|d| weighted(&|x| flips(x, &|x, y| d[(x % nc) * nc + y % nc])));
            let rs = dr
                .iter()
                .map(|d| weighted(&|x| flips(x, &|x, y| d[(x / nc) * nr + y / nc])));
            cols.chain(rs).collect()
        }
    };
    Ok(profile)
}

/// Mean of [`expected_bit_error_profile`] over bit positions.
pub fn expected_bit_error_rate(
    channel: &ChannelMatrix,
    codes: &CoordinateCodes,
    law: &[f64],
) -> Result<f64, LinkError> {
    let profile = expected_bit_error_profile(channel, codes, law)?;
    if profile.is_empty() {
        return Ok(0.0);
    }
    Ok(profile.iter().sum::<f64>() / profile.len() as f64)
}

/// Raw bit error rate of the Gray-mapped symbol channel with uniform input:
/// `Σ_x Σ_y p(x) p(y|x) hamming(bits(x), bits(y)) / width`.
pub fn estimate_raw_ber(channel: &ChannelMatrix, map: &GrayMap) -> Result<f64, LinkError> {
    let codes = CoordinateCodes::gray(channel.grid(), map)?;
    expected_bit_error_rate(channel, &codes, &uniform_law(channel.n_symbols()))
}

/// Raw bit error rate seen by the payload bits of `packing`, with payload
/// symbols used uniformly.
pub fn estimate_payload_ber(
    channel: &ChannelMatrix,
    map: &GrayMap,
    packing: &SymbolPacking,
) -> Result<f64, LinkError> {
    let profile = payload_bit_error_profile(channel, map, packing)?;
    Ok(profile.iter().sum::<f64>() / profile.len() as f64)
}

/// Flip probability of each payload bit position of `packing`, column bits
/// first, with payload symbols used uniformly.
pub fn payload_bit_error_profile(
    channel: &ChannelMatrix,
    map: &GrayMap,
    packing: &SymbolPacking,
) -> Result<Vec<f64>, LinkError> {
    let grid = channel.grid();
    let codes = CoordinateCodes::truncated(grid, map, packing.bits_x, packing.bits_y)?;
    let mut law = vec![0.0; grid.n_symbols()];
    let (pc, pr) = (1usize << packing.bits_x, 1usize << packing.bits_y);
    let w = 1.0 / (pc * pr) as f64;
    for r in 0..pr {
        for c in 0..pc {
            law[grid.symbol_at(c, r)] = w;
        }
    }
    expected_bit_error_profile(channel, &codes, &law)
}
