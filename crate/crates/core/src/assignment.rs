//! Cosine cost matrices and an exact rectangular linear sum assignment solver.
//!
//! The solver is the shortest augmenting path variant of Jonker-Volgenant
//! described by Crouse (2016): one Dijkstra-like search per row over reduced
//! costs, with dual variables kept feasible between augmentations. Wide
//! matrices are solved directly; tall ones are transposed first.

use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};

/// Cosine of the angle between two vectors, clamped to `[-1, 1]`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.len(), v.len())));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Dense row-major cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Invariant("cost matrix needs at least one row and column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invariant("cost matrix has a non-finite entry".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|&x| f(x)).collect())
    }
}

/// Entry `(i, j)` is `1 - cos(a[i], b[j])`. A zero vector is treated as
/// orthogonal to everything, so its entries are 1.
pub fn build_cost_matrix(a: &EmbeddingTable, b: &EmbeddingTable) -> Result<CostMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    let mut entries = Vec::with_capacity(a.len() * b.len());
    for u in a.vectors() {
        for v in b.vectors() {
            let sim = match cosine_similarity(u, v) {
                Ok(s) => s,
                Err(Error::ZeroVector) => 0.0,
                Err(e) => return Err(e),
            };
            entries.push(1.0 - sim);
        }
    }
    CostMatrix::new(a.len(), b.len(), entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_rows: Vec<usize>,
    pub unmatched_cols: Vec<usize>,
}

impl Assignment {
    pub fn total_cost(&self, m: &CostMatrix) -> f64 {
        self.matches.iter().map(|&(i, j)| m.get(i, j)).sum()
    }

    pub fn col_for_row(&self, row: usize) -> Option<usize> {
        self.matches.iter().find(|&&(i, _)| i == row).map(|&(_, j)| j)
    }
}

/// Minimum-cost injective matching of size `min(rows, cols)`.
///
/// The search scans rows in ascending order and, among equal reduced
/// costs, takes a free column before an assigned one and the lowest column
/// index after that, so the output is a deterministic function of the input.
pub fn solve_lsap(m: &CostMatrix) -> Assignment {
    let transposed = m.rows > m.cols;
    let work = if transposed { m.transpose() } else { m.clone() };
    let col4row = solve_wide(&work);

    let mut matches: Vec<(usize, usize)> = col4row
        .iter()
        .enumerate()
        .map(|(i, &j)| if transposed { (j, i) } else { (i, j) })
        .collect();
    matches.sort_unstable();

    let mut row_used = vec![false; m.rows];
    let mut col_used = vec![false; m.cols];
    for &(i, j) in &matches {
        row_used[i] = true;
        col_used[j] = true;
    }
    Assignment {
        matches,
        unmatched_rows: (0..m.rows).filter(|&i| !row_used[i]).collect(),
        unmatched_cols: (0..m.cols).filter(|&j| !col_used[j]).collect(),
    }
}

// Requires rows <= cols; returns the column assigned to each row.
fn solve_wide(m: &CostMatrix) -> Vec<usize> {
    let (nr, nc) = (m.rows, m.cols);
    debug_assert!(nr <= nc);

    let mut u = vec![0.0; nr];
    let mut v = vec![0.0; nc];
    let mut col4row: Vec<Option<usize>> = vec![None; nr];
    let mut row4col: Vec<Option<usize>> = vec![None; nc];

    let mut path = vec![0usize; nc];
    let mut shortest = vec![f64::INFINITY; nc];
    let mut scanned_rows = vec![false; nr];
    let mut scanned_cols = vec![false; nc];

    for cur_row in 0..nr {
        shortest.fill(f64::INFINITY);
        scanned_rows.fill(false);
        scanned_cols.fill(false);

        let mut min_val = 0.0;
        let mut i = cur_row;
        let sink = loop {
            scanned_rows[i] = true;
            let mut lowest = f64::INFINITY;
            let mut best: Option<usize> = None;
            for j in 0..nc {
                if scanned_cols[j] {
                    continue;
                }
                let reduced = min_val + m.get(i, j) - u[i] - v[j];
                if reduced < shortest[j] {
                    path[j] = i;
                    shortest[j] = reduced;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        shortest[j] < lowest || (shortest[j] == lowest && row4col[j].is_none() && row4col[b].is_some())
                    }
                };
                if better {
                    lowest = shortest[j];
                    best = Some(j);
                }
            }
            // finite entries and rows <= cols guarantee a free column
            let j = best.expect("a column remains unscanned while rows <= cols");
            min_val = lowest;
            scanned_cols[j] = true;
            match row4col[j] {
                None => break j,
                Some(next) => i = next,
            }
        };

        u[cur_row] += min_val;
        for r in 0..nr {
            if scanned_rows[r] && r != cur_row {
                let c = col4row[r].expect("scanned rows other than the current one are assigned");
                u[r] += min_val - shortest[c];
            }
        }
        for c in 0..nc {
            if scanned_cols[c] {
                v[c] -= min_val - shortest[c];
            }
        }

        let mut j = sink;
        loop {
            let r = path[j];
            row4col[j] = Some(r);
            let prev = col4row[r].replace(j);
            if r == cur_row {
                break;
            }
            j = prev.expect("rows on an augmenting path are assigned");
        }
    }

    col4row.into_iter().map(|c| c.expect("every row is assigned")).collect()
}
