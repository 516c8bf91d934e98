//! Critical-value grids indexed by the number of samples labeled 1 (rows)
//! and labeled 0 (columns).
//!
//! CSV form: a header `ones,1,2,...,m` followed by one row per count of
//! ones, `w,c_1,...,c_m`, where `c_z` is the critical error count for `w`
//! ones and `z` zeros, empty when no count qualifies.

use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalGrid {
    max_size: usize,
    cells: Vec<Option<usize>>,
}

impl CriticalGrid {
    pub fn new(max_size: usize) -> Self {
        CriticalGrid {
            max_size,
            cells: vec![None; max_size * max_size],
        }
    }

    /// Fills every cell from `f(ones, zeros)`.
    pub fn from_fn(max_size: usize, mut f: impl FnMut(usize, usize) -> Option<usize>) -> Self {
        let mut grid = CriticalGrid::new(max_size);
        for ones in 1..=max_size {
            for zeros in 1..=max_size {
                grid.cells[(ones - 1) * max_size + zeros - 1] = f(ones, zeros);
            }
        }
        grid
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    fn slot(&self, ones: usize, zeros: usize) -> Option<usize> {
        (ones >= 1 && zeros >= 1 && ones <= self.max_size && zeros <= self.max_size)
            .then(|| (ones - 1) * self.max_size + zeros - 1)
    }

    /// `None` outside the grid, `Some(None)` for an empty cell.
    pub fn get(&self, ones: usize, zeros: usize) -> Option<Option<usize>> {
        self.slot(ones, zeros).map(|i| self.cells[i])
    }

    pub fn set(&mut self, ones: usize, zeros: usize, value: Option<usize>) {
        let i = self.slot(ones, zeros).expect("cell inside grid");
        self.cells[i] = value;
    }

    /// Cellwise minimum; an empty cell is smaller than any value.
    pub fn merge_min(&self, other: &CriticalGrid) -> Result<CriticalGrid> {
        if self.max_size != other.max_size {
            return Err(Error::param("merging grids of different sizes"));
        }
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => Some(*x.min(y)),
                _ => None,
            })
            .collect();
        Ok(CriticalGrid {
            max_size: self.max_size,
            cells,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ones");
        for zeros in 1..=self.max_size {
            let _ = write!(out, ",{zeros}");
        }
        out.push('\n');
        for ones in 1..=self.max_size {
            let _ = write!(out, "{ones}");
            for zeros in 1..=self.max_size {
                out.push(',');
                if let Some(Some(v)) = self.get(ones, zeros) {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<CriticalGrid> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::input("critical table is empty"))?;
        let size = header.split(',').count() - 1;
        if size == 0 {
            return Err(Error::input("critical table header has no columns"));
        }
        let mut grid = CriticalGrid::new(size);
        let mut rows = 0;
        for line in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != size + 1 {
                return Err(Error::input(format!("critical table row '{line}' has the wrong width")));
            }
            let ones: usize = fields[0]
                .parse()
                .map_err(|_| Error::input(format!("bad row label '{}'", fields[0])))?;
            if ones == 0 || ones > size {
                return Err(Error::input(format!("row label {ones} outside 1..={size}")));
            }
            for (z, f) in fields[1..].iter().enumerate() {
                let value = if f.is_empty() {
                    None
                } else {
                    Some(f.parse().map_err(|_| Error::input(format!("bad cell '{f}'")))?)
                };
                grid.set(ones, z + 1, value);
            }
            rows += 1;
        }
        if rows != size {
            return Err(Error::input(format!("critical table has {rows} rows, expected {size}")));
        }
        Ok(grid)
    }
}
