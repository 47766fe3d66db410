//! Summed-area tables (integral images).
//!
//! The table is stored zero-padded: `(rows + 1) × (cols + 1)` entries where
//! the first row and first column are identically zero. Entry `(x + 1, y + 1)`
//! holds the sum of every source value at or above row `x` and at or left of
//! column `y`. The padding lets a rectangle query read its four corners
//! without any border branches.

use ndarray::ArrayView2;

use crate::error::{Error, Result};

/// Inclusive cell rectangle `[r0..=r1] × [c0..=c1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub r0: usize,
    pub r1: usize,
    pub c0: usize,
    pub c1: usize,
}

impl Rect {
    pub fn new(r0: usize, r1: usize, c0: usize, c1: usize) -> Rect {
        Rect { r0, r1, c0, c1 }
    }

    /// Number of cells covered.
    pub fn area(&self) -> usize {
        (self.r1 - self.r0 + 1) * (self.c1 - self.c0 + 1)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.r0..=self.r1).contains(&row) && (self.c0..=self.c1).contains(&col)
    }
}

/// Zero-padded prefix-sum table over a 2D source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedAreaTable {
    rows: usize,
    cols: usize,
    // row-major, stride cols + 1
    table: Vec<f64>,
}

impl SummedAreaTable {
    /// Builds the table with the recurrence
    /// `s(x, y) = i(x, y) + s(x-1, y) + s(x, y-1) - s(x-1, y-1)`.
    ///
    /// Accumulation is always in `f64`, whatever the source element type.
    ///
    /// ```
    /// use ndarray::array;
    /// use vitalcfar::sat::SummedAreaTable;
    ///
    /// let sat = SummedAreaTable::build(array![[1.0, 2.0], [3.0, 4.0]].view()).unwrap();
    /// assert_eq!(sat.prefix(1, 1), 10.0);
    /// assert_eq!(sat.prefix(0, 1), 3.0);
    /// ```
    pub fn build<T>(source: ArrayView2<'_, T>) -> Result<SummedAreaTable>
    where
        T: Copy + Into<f64>,
    {
        let (rows, cols) = source.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "summed-area table needs a non-empty matrix, got {rows}x{cols}"
            )));
        }
        let stride = cols + 1;
        let mut table = vec![0.0f64; (rows + 1) * stride];
        for x in 0..rows {
            let above = x * stride;
            let here = (x + 1) * stride;
            for y in 0..cols {
                let v: f64 = source[[x, y]].into();
                if !v.is_finite() {
                    return Err(Error::Input(format!("non-finite value {v} at ({x}, {y})")));
                }
                table[here + y + 1] = v + table[above + y + 1] + table[here + y] - table[above + y];
            }
        }
        Ok(SummedAreaTable { rows, cols, table })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Raw padded entry; `padded(0, _)` and `padded(_, 0)` are zero.
    pub fn padded(&self, i: usize, j: usize) -> f64 {
        self.table[i * (self.cols + 1) + j]
    }

    /// Unpadded `s(x, y)`: the sum over `[0..=x] × [0..=y]`.
    pub fn prefix(&self, x: usize, y: usize) -> f64 {
        self.padded(x + 1, y + 1)
    }

    /// Sum of the source over the inclusive rectangle, from four table reads.
    pub fn region_sum(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Result<f64> {
        if r0 > r1 || c0 > c1 || r1 >= self.rows || c1 >= self.cols {
            return Err(Error::Bounds(format!(
                "rectangle rows {r0}..={r1}, cols {c0}..={c1} invalid for {}x{} table",
                self.rows, self.cols
            )));
        }
        Ok(self.region_sum_unchecked(Rect { r0, r1, c0, c1 }))
    }

    /// Same as [`region_sum`](Self::region_sum) for a rectangle already known
    /// to lie inside the table.
    #[inline]
    pub fn rect_sum(&self, rect: Rect) -> f64 {
        debug_assert!(rect.r0 <= rect.r1 && rect.r1 < self.rows);
        debug_assert!(rect.c0 <= rect.c1 && rect.c1 < self.cols);
        self.region_sum_unchecked(rect)
    }

    #[inline]
    fn region_sum_unchecked(&self, rect: Rect) -> f64 {
        let stride = self.cols + 1;
        let top = rect.r0 * stride;
        let bottom = (rect.r1 + 1) * stride;
        let left = rect.c0;
        let right = rect.c1 + 1;
        // L1 and L4 on the main diagonal, L2 and L3 on the anti-diagonal
        let l1 = self.table[top + left];
        let l2 = self.table[top + right];
        let l3 = self.table[bottom + left];
        let l4 = self.table[bottom + right];
        l1 + l4 - (l2 + l3)
    }

    /// Sum of every source entry.
    pub fn total(&self) -> f64 {
        self.padded(self.rows, self.cols)
    }
}

/// Free-function form of [`SummedAreaTable::build`].
pub fn build_sat<T: Copy + Into<f64>>(source: ArrayView2<'_, T>) -> Result<SummedAreaTable> {
    SummedAreaTable::build(source)
}
