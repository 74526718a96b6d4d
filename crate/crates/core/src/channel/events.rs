use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{ChannelError, ChannelMatrix};

/// Default probability floor for channel-matrix exports.
pub const DEFAULT_EXPORT_FLOOR: f64 = 1e-12;

const COUNTS_HEADER: &str = "sent,received,count";

/// A single detection: `received` was registered while `sent` was addressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub sent: usize,
    pub received: usize,
    pub trial: u64,
}

/// Sparse table of detection counts indexed by (sent, received).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountTable {
    n_sent: usize,
    n_received: usize,
    cells: BTreeMap<(usize, usize), u64>,
}

impl CountTable {
    pub fn new(n_sent: usize, n_received: usize) -> Self {
        Self {
            n_sent,
            n_received,
            cells: BTreeMap::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<u64>]) -> Self {
        let n_received = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut table = Self::new(rows.len(), n_received);
        for (x, row) in rows.iter().enumerate() {
            for (y, &c) in row.iter().enumerate() {
                table.add(x, y, c);
            }
        }
        table
    }

    pub fn from_events<'a>(
        n_sent: usize,
        n_received: usize,
        events: impl IntoIterator<Item = &'a DetectionEvent>,
    ) -> Result<Self, ChannelError> {
        let mut table = Self::new(n_sent, n_received);
        for e in events {
            table.check(e.sent, e.received)?;
            table.add(e.sent, e.received, 1);
        }
        Ok(table)
    }

    fn check(&self, sent: usize, received: usize) -> Result<(), ChannelError> {
        if sent >= self.n_sent {
            return Err(ChannelError::SymbolOutOfRange {
                symbol: sent,
                n_symbols: self.n_sent,
            });
        }
        if received >= self.n_received {
            return Err(ChannelError::SymbolOutOfRange {
                symbol: received,
                n_symbols: self.n_received,
            });
        }
        Ok(())
    }

    /// Adds `count` detections to a cell. Panics on out-of-range indices.
    pub fn add(&mut self, sent: usize, received: usize, count: u64) {
        assert!(sent < self.n_sent && received < self.n_received);
        if count > 0 {
            *self.cells.entry((sent, received)).or_insert(0) += count;
        }
    }

    /// Adds a dense count vector over received symbols for one sent symbol.
    pub fn add_row(&mut self, sent: usize, counts: &[u64]) {
        for (y, &c) in counts.iter().enumerate() {
            self.add(sent, y, c);
        }
    }

    pub fn get(&self, sent: usize, received: usize) -> u64 {
        self.cells.get(&(sent, received)).copied().unwrap_or(0)
    }

    pub fn n_sent(&self) -> usize {
        self.n_sent
    }

    pub fn n_received(&self) -> usize {
        self.n_received
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    /// Nonzero cells in (sent, received) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.cells.iter().map(|(&(x, y), &c)| (x, y, c))
    }

    pub fn nonzero_cells(&self) -> usize {
        self.cells.len()
    }

    /// Total counts at each received-minus-sent index offset.
    pub fn offset_totals(&self) -> BTreeMap<i64, u64> {
        let mut out = BTreeMap::new();
        for (x, y, c) in self.iter() {
            *out.entry(y as i64 - x as i64).or_insert(0) += c;
        }
        out
    }
}

/// Writes the `sent,received,count` table, one row per nonzero cell.
pub fn write_counts_csv<W: Write>(mut w: W, table: &CountTable) -> std::io::Result<()> {
    writeln!(w, "{COUNTS_HEADER}")?;
    for (x, y, c) in table.iter() {
        writeln!(w, "{x},{y},{c}")?;
    }
    w.flush()
}

/// Reads a `sent,received,count` table.
///
/// With `dims` unset, the alphabet sizes are one past the largest index seen.
pub fn read_counts_csv<R: BufRead>(
    r: R,
    dims: Option<(usize, usize)>,
) -> Result<CountTable, ChannelError> {
    let mut cells = BTreeMap::new();
    let mut saw_header = false;
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if !saw_header {
            if text != COUNTS_HEADER {
                return Err(ChannelError::Parse {
                    line: line_no,
                    reason: format!("expected header `{COUNTS_HEADER}`, got `{text}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(ChannelError::Parse {
                line: line_no,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| {
            s.parse::<u64>().map_err(|_| ChannelError::Parse {
                line: line_no,
                reason: format!("invalid {what} `{s}`"),
            })
        };
        let x = parse(fields[0], "sent index")? as usize;
        let y = parse(fields[1], "received index")? as usize;
        let c = parse(fields[2], "count")?;
        if let Some((ns, nr)) = dims {
            if x >= ns || y >= nr {
                return Err(ChannelError::Parse {
                    line: line_no,
                    reason: format!("cell ({x},{y}) outside a {ns}x{nr} alphabet"),
                });
            }
        }
        if cells.insert((x, y), c).is_some() {
            return Err(ChannelError::Parse {
                line: line_no,
                reason: format!("duplicate cell ({x},{y})"),
            });
        }
    }
    if !saw_header {
        return Err(ChannelError::Parse {
            line: 1,
            reason: "empty counts file".into(),
        });
    }
    let (n_sent, n_received) = dims.unwrap_or_else(|| {
        cells
            .keys()
            .fold((0, 0), |(a, b), &(x, y)| (a.max(x + 1), b.max(y + 1)))
    });
    cells.retain(|_, c| *c > 0);
    Ok(CountTable {
        n_sent,
        n_received,
        cells,
    })
}

/// Writes `x,y,p` for every entry with `p >= floor`.
pub fn write_channel_csv<W: Write>(
    mut w: W,
    channel: &ChannelMatrix,
    floor: f64,
) -> std::io::Result<()> {
    writeln!(w, "x,y,p")?;
    let mut row = vec![0.0; channel.n_symbols()];
    for x in 0..channel.n_symbols() {
        channel.row_into(x, &mut row);
        for (y, &p) in row.iter().enumerate() {
            if p >= floor && p > 0.0 {
                writeln!(w, "{x},{y},{p}")?;
            }
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::GridSpec;

    #[test]
    fn counts_roundtrip() {
        let t = CountTable::from_dense(&[vec![3, 1, 0], vec![0, 2, 5]]);
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "sent,received,count\n0,0,3\n0,1,1\n1,1,2\n1,2,5\n");
        let back = read_counts_csv(&buf[..], Some((2, 3))).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let bad = "sent,received,count\n0,0,3\n1,x,2\n";
        match read_counts_csv(bad.as_bytes(), None) {
            Err(ChannelError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let short = "sent,received,count\n0,0\n";
        assert!(matches!(
            read_counts_csv(short.as_bytes(), None),
            Err(ChannelError::Parse { line: 2, .. })
        ));
        let dup = "sent,received,count\n0,0,1\n0,0,1\n";
        assert!(matches!(
            read_counts_csv(dup.as_bytes(), None),
            Err(ChannelError::Parse { line: 3, .. })
        ));
        assert!(read_counts_csv("x,y,p\n".as_bytes(), None).is_err());
        assert!(read_counts_csv("sent,received,count\n5,0,1\n".as_bytes(), Some((2, 2))).is_err());
    }

    #[test]
    fn events_accumulate() {
        let ev = [
            DetectionEvent {
                sent: 0,
                received: 1,
                trial: 0,
            },
            DetectionEvent {
                sent: 0,
                received: 1,
                trial: 1,
            },
            DetectionEvent {
                sent: 1,
                received: 1,
                trial: 0,
            },
        ];
        let t = CountTable::from_events(2, 2, &ev).unwrap();
        assert_eq!((t.get(0, 1), t.get(1, 1), t.total()), (2, 1, 3));
        let bad = [DetectionEvent {
            sent: 2,
            received: 0,
            trial: 0,
        }];
        assert!(CountTable::from_events(2, 2, &bad).is_err());
    }

    #[test]
    fn channel_export_respects_floor() {
        let grid = GridSpec::with_cells(2, 1, 4).unwrap();
        let ch = ChannelMatrix::from_rows(&grid, vec![vec![0.9, 0.1], vec![1e-13, 1.0 - 1e-13]])
            .unwrap();
        let mut buf = Vec::new();
        write_channel_csv(&mut buf, &ch, DEFAULT_EXPORT_FLOOR).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x,y,p\n0,0,0.9\n"));
    }
}
