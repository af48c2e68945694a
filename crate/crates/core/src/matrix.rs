//! Confusion matrices, marginals and the relabelings used by the solvers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Absolute tolerance for cell and marginal comparisons.
pub const CELL_TOLERANCE: f64 = 1e-12;

/// A validated `d × d` joint probability mass `p_ij`, stored row-major.
///
/// Construction normalizes by the grand total, so counts and probabilities
/// are both accepted. The distance between the raw total and 1 is kept in
/// [`mass_deficit`](Self::mass_deficit).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    d: usize,
    cells: Vec<f64>,
    row: Vec<f64>,
    col: Vec<f64>,
    mass_deficit: f64,
}

impl ConfusionMatrix {
    /// Builds a matrix from rows of nonnegative numbers.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.len();
        let mut cells = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::NotSquare { row: i, len: row.len(), expected: d });
            }
            cells.extend_from_slice(row);
        }
        Self::from_cells(d, cells)
    }

    /// Builds a matrix from `d * d` row-major cells.
    pub fn from_cells(d: usize, cells: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::TooFewClasses(d));
        }
        if cells.len() != d * d {
            return Err(Error::NotSquare { row: cells.len() / d.max(1), len: cells.len() % d, expected: d });
        }
        for (k, &value) in cells.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCell { row: k / d, col: k % d, value });
            }
        }
        let total: f64 = cells.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let cells = cells.into_iter().map(|p| p / total).collect();
        let mut m = Self::from_normalized(d, cells);
        m.mass_deficit = (total - 1.0).abs();
        Ok(m)
    }

    /// Independent classifiers: `p_ij = row_i * col_j`.
    pub fn product(row: &[f64], col: &[f64]) -> Result<Self> {
        if row.len() != col.len() {
            return Err(Error::LengthMismatch(row.len(), col.len()));
        }
        let cells = row.iter().flat_map(|&r| col.iter().map(move |&c| r * c)).collect();
        Self::from_cells(row.len(), cells)
    }

    /// Perfect agreement with the given class masses on the diagonal.
    pub fn diagonal(mass: &[f64]) -> Result<Self> {
        let d = mass.len();
        let mut cells = vec![0.0; d * d];
        for (i, &p) in mass.iter().enumerate() {
            cells[i * d + i] = p;
        }
        Self::from_cells(d, cells)
    }

    /// Perfect reversal: mass only on cells `(i, d - 1 - i)`.
    pub fn anti_diagonal(mass: &[f64]) -> Result<Self> {
        let d = mass.len();
        let mut cells = vec![0.0; d * d];
        for (i, &p) in mass.iter().enumerate() {
            cells[i * d + (d - 1 - i)] = p;
        }
        Self::from_cells(d, cells)
    }

    fn from_normalized(d: usize, cells: Vec<f64>) -> Self {
        let mut row = vec![0.0; d];
        let mut col = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                let p = cells[i * d + j];
                row[i] += p;
                col[j] += p;
            }
        }
        Self { d, cells, row, col, mass_deficit: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.d + j]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.cells.chunks(self.d)
    }

    /// `p_i•`
    pub fn row_marginals(&self) -> &[f64] {
        &self.row
    }

    /// `p_•j`
    pub fn col_marginals(&self) -> &[f64] {
        &self.col
    }

    pub fn marginals(&self) -> (&[f64], &[f64]) {
        (&self.row, &self.col)
    }

    pub fn mass_deficit(&self) -> f64 {
        self.mass_deficit
    }

    /// `cell'(i, j) = cell(i, d - 1 - j)`. An involution.
    pub fn reverse_columns(&self) -> Self {
        let d = self.d;
        let cells = (0..d * d).map(|k| self.cells[(k / d) * d + (d - 1 - k % d)]).collect();
        let mut m = Self::from_normalized(d, cells);
        m.mass_deficit = self.mass_deficit;
        m
    }

    /// Relabels both classifiers with the same permutation:
    /// `cell'(i, j) = cell(perm[i], perm[j])` (0-based).
    pub fn permute_jointly(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.d)?;
        let d = self.d;
        let cells = (0..d * d).map(|k| self.cell(perm[k / d], perm[k % d])).collect();
        let mut m = Self::from_normalized(d, cells);
        m.mass_deficit = self.mass_deficit;
        Ok(m)
    }

    /// True when every cell equals the product of its marginals.
    pub fn is_product(&self) -> bool {
        (0..self.d).all(|i| {
            (0..self.d).all(|j| (self.cell(i, j) - self.row[i] * self.col[j]).abs() <= CELL_TOLERANCE)
        })
    }

    /// Drops rows and columns with zero marginal.
    ///
    /// Rows and columns are dropped independently, so the reduced table is
    /// rectangular in general. Scores of dropped classes never enter the
    /// correlation, which makes the reduction exact for every coefficient
    /// whose constraints act on `f` and `g` separately (SUP, II, ID).
    pub fn collapse_null_classes(&self) -> Result<(ReducedTable, ClassMap)> {
        let (kept_rows, dropped_rows) = split_positive(&self.row);
        let (kept_cols, dropped_cols) = split_positive(&self.col);
        if kept_rows.len() < 2 || kept_cols.len() < 2 {
            return Err(Error::DegenerateMatrix { rows: kept_rows.len(), cols: kept_cols.len() });
        }
        let cells = kept_rows
            .iter()
            .flat_map(|&i| kept_cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.cell(i, j))
            .collect();
        let table = ReducedTable::from_parts(
            kept_rows.len(),
            kept_cols.len(),
            cells,
            kept_rows.iter().map(|&i| self.row[i]).collect(),
            kept_cols.iter().map(|&j| self.col[j]).collect(),
        );
        let map = ClassMap { d: self.d, kept_rows, kept_cols, dropped_rows, dropped_cols };
        Ok((table, map))
    }
}

fn split_positive(marginal: &[f64]) -> (Vec<usize>, Vec<usize>) {
    (0..marginal.len()).partition(|&i| marginal[i] > CELL_TOLERANCE)
}

pub(crate) fn check_permutation(perm: &[usize], d: usize) -> Result<()> {
    if perm.len() != d {
        return Err(Error::InvalidPermutation(d));
    }
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::InvalidPermutation(d));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Bookkeeping for [`ConfusionMatrix::collapse_null_classes`]. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    pub d: usize,
    pub kept_rows: Vec<usize>,
    pub kept_cols: Vec<usize>,
    pub dropped_rows: Vec<usize>,
    pub dropped_cols: Vec<usize>,
}

impl ClassMap {
    /// Re-expands row scores to all `d` classes.
    pub fn expand_rows(&self, values: &[f64]) -> Vec<f64> {
        expand(values, &self.kept_rows, self.d)
    }

    /// Re-expands column scores to all `d` classes.
    pub fn expand_cols(&self, values: &[f64]) -> Vec<f64> {
        expand(values, &self.kept_cols, self.d)
    }

    pub fn is_identity(&self) -> bool {
        self.dropped_rows.is_empty() && self.dropped_cols.is_empty()
    }
}

/// Dropped classes take the value of the nearest kept class, the lower index
/// on ties. Monotone inputs stay monotone.
fn expand(values: &[f64], kept: &[usize], d: usize) -> Vec<f64> {
    debug_assert_eq!(values.len(), kept.len());
    (0..d)
        .map(|i| {
            let pos = kept.partition_point(|&k| k < i);
            if pos < kept.len() && kept[pos] == i {
                return values[pos];
            }
            match (pos.checked_sub(1), kept.get(pos)) {
                (Some(lo), Some(&hi)) => {
                    if i - kept[lo] <= hi - i {
                        values[lo]
                    } else {
                        values[pos]
                    }
                }
                (Some(lo), None) => values[lo],
                (None, Some(_)) => values[pos],
                (None, None) => 0.0,
            }
        })
        .collect()
}

/// A rectangular table with strictly positive marginals: the working form of
/// a confusion matrix inside the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTable {
    nrows: usize,
    ncols: usize,
    cells: Vec<f64>,
    row: Vec<f64>,
    col: Vec<f64>,
}

impl ReducedTable {
    fn from_parts(nrows: usize, ncols: usize, cells: Vec<f64>, row: Vec<f64>, col: Vec<f64>) -> Self {
        Self { nrows, ncols, cells, row, col }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.ncols + j]
    }

    pub fn row_marginals(&self) -> &[f64] {
        &self.row
    }

    pub fn col_marginals(&self) -> &[f64] {
        &self.col
    }

    /// `Σ_ij f_i p_ij g_j`
    pub fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cells
            .chunks(self.ncols)
            .zip(f)
            .map(|(row, &fi)| fi * row.iter().zip(g).map(|(p, gj)| p * gj).sum::<f64>())
            .sum()
    }

    /// Conditional mean of `f(X)` given each column: `(Σ_i f_i p_ij) / p_•j`.
    pub(crate) fn column_means_into(&self, f: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (row, &fi) in self.cells.chunks(self.ncols).zip(f) {
            for (o, p) in out.iter_mut().zip(row) {
                *o += fi * p;
            }
        }
        for (o, c) in out.iter_mut().zip(&self.col) {
            *o /= c;
        }
    }

    /// Conditional mean of `g(Y)` given each row: `(Σ_j p_ij g_j) / p_i•`.
    pub(crate) fn row_means_into(&self, g: &[f64], out: &mut [f64]) {
        for ((o, row), r) in out.iter_mut().zip(self.cells.chunks(self.ncols)).zip(&self.row) {
            *o = row.iter().zip(g).map(|(p, gj)| p * gj).sum::<f64>() / r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm0() -> ConfusionMatrix {
        ConfusionMatrix::from_rows(&[[0.1, 0.0, 0.1], [0.2, 0.0, 0.2], [0.0, 0.2, 0.2]]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn normalizes_counts() {
        let m = ConfusionMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(m.cells(), &[0.5, 0.0, 0.0, 0.5]);
        assert!((m.mass_deficit() - 1.0).abs() < 1e-15);
        let p = ConfusionMatrix::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert_eq!(p.cells(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(p.mass_deficit(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ConfusionMatrix::from_rows(&[[1.0]]), Err(Error::TooFewClasses(1)));
        assert!(matches!(
            ConfusionMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::NotSquare { row: 1, len: 1, expected: 2 })
        ));
        assert!(matches!(
            ConfusionMatrix::from_rows(&[[1.0, -0.1], [0.0, 1.0]]),
            Err(Error::InvalidCell { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            ConfusionMatrix::from_rows(&[[1.0, f64::NAN], [0.0, 1.0]]),
            Err(Error::InvalidCell { .. })
        ));
        assert_eq!(ConfusionMatrix::from_rows(&[[0.0, 0.0], [0.0, 0.0]]), Err(Error::ZeroMass));
    }

    #[test]
    fn marginals_of_cm0_and_cm2() {
        let m = cm0();
        assert!(close(m.row_marginals(), &[0.2, 0.4, 0.4], 1e-12));
        assert!(close(m.col_marginals(), &[0.3, 0.2, 0.5], 1e-12));
        let cm2 = ConfusionMatrix::from_rows(&[[0.1, 0.0, 0.0], [0.0, 0.4, 0.0], [0.2, 0.2, 0.1]]).unwrap();
        assert!(close(cm2.row_marginals(), &[0.1, 0.4, 0.5], 1e-12));
        assert!(close(cm2.col_marginals(), &[0.3, 0.6, 0.1], 1e-12));
        let id = ConfusionMatrix::diagonal(&[1.0, 1.0]).unwrap();
        assert_eq!(id.marginals(), (&[0.5, 0.5][..], &[0.5, 0.5][..]));
    }

    #[test]
    fn cm3_as_printed_has_mass_deficit() {
        let cm3 = ConfusionMatrix::from_rows(&[[0.1428, 0.0, 0.1428], [0.0, 0.0, 0.0], [0.3285, 0.2857, 0.0]]).unwrap();
        // 0.1428 + 0.1428 + 0.3285 + 0.2857 = 0.8998
        assert!((cm3.mass_deficit() - 0.1002).abs() < 1e-12);
        assert!((cm3.cells().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reverse_columns_two_by_two() {
        let m = ConfusionMatrix::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        let r = m.reverse_columns();
        assert!(close(r.cells(), &[0.2, 0.1, 0.4, 0.3], 1e-15));
        assert_eq!(r.reverse_columns(), m);
        let anti = ConfusionMatrix::anti_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(anti.reverse_columns(), ConfusionMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap());
    }

    #[test]
    fn permute_jointly_swaps_rows_and_columns() {
        let m = ConfusionMatrix::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        assert_eq!(m.permute_jointly(&[0, 1]).unwrap(), m);
        let p = m.permute_jointly(&[1, 0]).unwrap();
        assert!(close(p.cells(), &[0.4, 0.3, 0.2, 0.1], 1e-15));
        assert_eq!(m.permute_jointly(&[0, 0]), Err(Error::InvalidPermutation(2)));
        assert_eq!(m.permute_jointly(&[0]), Err(Error::InvalidPermutation(2)));
    }

    #[test]
    fn collapse_cm10() {
        let cm10 = ConfusionMatrix::from_rows(&[
            [0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.2083, 0.0291, 0.0, 0.0],
            [0.0, 0.0083, 0.3916, 0.0083, 0.0],
            [0.0, 0.0, 0.0458, 0.1625, 0.0],
            [0.0, 0.0, 0.0, 0.0208, 0.1250],
        ])
        .unwrap();
        let (t, map) = cm10.collapse_null_classes().unwrap();
        assert_eq!((t.nrows(), t.ncols()), (4, 4));
        assert_eq!(map.dropped_rows, vec![0]);
        assert_eq!(map.dropped_cols, vec![0]);
        assert_eq!(map.kept_rows, vec![1, 2, 3, 4]);
    }

    #[test]
    fn collapse_without_zero_classes_is_identity() {
        let (t, map) = cm0().collapse_null_classes().unwrap();
        assert!(map.is_identity());
        assert_eq!(t.nrows(), 3);
        assert_eq!(t.cell(2, 1), 0.2);
    }

    #[test]
    fn collapse_middle_class() {
        let m = ConfusionMatrix::from_rows(&[[0.3, 0.0, 0.1], [0.0, 0.0, 0.0], [0.2, 0.0, 0.4]]).unwrap();
        let (t, map) = m.collapse_null_classes().unwrap();
        assert_eq!((t.nrows(), t.ncols()), (2, 2));
        assert_eq!(map.dropped_rows, vec![1]);
        assert_eq!(map.dropped_cols, vec![1]);
        let one = ConfusionMatrix::from_rows(&[[0.0, 0.0], [0.3, 0.7]]).unwrap();
        assert_eq!(one.collapse_null_classes().unwrap_err(), Error::DegenerateMatrix { rows: 1, cols: 2 });
    }

    #[test]
    fn expansion_fills_from_nearest_kept_class() {
        let map = ClassMap {
            d: 6,
            kept_rows: vec![1, 4],
            kept_cols: vec![0, 1, 2, 3, 4, 5],
            dropped_rows: vec![0, 2, 3, 5],
            dropped_cols: vec![],
        };
        // 2 is nearer 1; 3 is nearer 4; 0 and 5 take the edge values.
        assert_eq!(map.expand_rows(&[-1.0, 2.0]), vec![-1.0, -1.0, -1.0, 2.0, 2.0, 2.0]);
        let tie = ClassMap { d: 3, kept_rows: vec![0, 2], kept_cols: vec![], dropped_rows: vec![1], dropped_cols: vec![] };
        assert_eq!(tie.expand_rows(&[5.0, 7.0]), vec![5.0, 5.0, 7.0]);
    }

    #[test]
    fn product_detection() {
        let p = ConfusionMatrix::product(&[0.2, 0.8], &[0.5, 0.5]).unwrap();
        assert!(p.is_product());
        assert!(!cm0().is_product());
    }
}
