//! Minimum-cost assignment between two path sets.
//!
//! Shortest-augmenting-path variant with potentials, O(n^3) on square
//! inputs. Rectangular matrices are handled by solving along the shorter
//! side; the longer side keeps its unmatched entries.

use super::FidelityError;

/// Dense row-major cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, FidelityError> {
        if data.len() != rows * cols {
            return Err(FidelityError::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(FidelityError::NonFinite(format!(
                "cost at ({}, {})",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, FidelityError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CostMatrix::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    fn transposed(&self) -> CostMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j));
            }
        }
        CostMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// A complete matching of the shorter side.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub total_cost: f64,
    /// `row_to_col[i]` is the column matched to row i, if any.
    pub row_to_col: Vec<Option<usize>>,
}

/// Solves the minimum-cost assignment. Every row is matched when
/// `rows <= cols`, every column otherwise.
pub fn solve(costs: &CostMatrix) -> Result<Assignment, FidelityError> {
    if costs.rows == 0 || costs.cols == 0 {
        return Ok(Assignment {
            total_cost: 0.0,
            row_to_col: vec![None; costs.rows],
        });
    }
    if costs.rows > costs.cols {
        let t = solve(&costs.transposed())?;
        let mut row_to_col = vec![None; costs.rows];
        for (col, assigned) in t.row_to_col.iter().enumerate() {
            if let Some(row) = assigned {
                row_to_col[*row] = Some(col);
            }
        }
        return Ok(Assignment {
            total_cost: t.total_cost,
            row_to_col,
        });
    }

    let (r, c) = (costs.rows, costs.cols);
    // Potentials; column c is a sentinel that seeds each augmentation.
    let mut u = vec![0.0f64; r];
    let mut v = vec![0.0f64; c + 1];
    // p[j] = row currently matched to column j.
    let mut p = vec![usize::MAX; c + 1];

    for row in 0..r {
        p[c] = row;
        let mut j0 = c;
        let mut minv = vec![f64::INFINITY; c];
        let mut way = vec![c; c];
        let mut used = vec![false; c + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = c;
            for j in 0..c {
                if used[j] {
                    continue;
                }
                let cur = costs.at(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            debug_assert!(delta.is_finite(), "some unused column must be reachable");
            for j in 0..=c {
                if used[j] {
                    if p[j] != usize::MAX {
                        u[p[j]] += delta;
                    }
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == usize::MAX {
                break;
            }
        }
        // Flip the alternating path back to the sentinel.
        while j0 != c {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }

    let mut row_to_col = vec![None; r];
    let mut total = 0.0;
    for (j, &row) in p.iter().take(c).enumerate() {
        if row != usize::MAX {
            row_to_col[row] = Some(j);
            total += costs.at(row, j);
        }
    }
    Ok(Assignment {
        total_cost: total,
        row_to_col,
    })
}
