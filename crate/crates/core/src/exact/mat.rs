use std::fmt;

use super::rat::Rat;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Mat { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    /// Builds a matrix from integer literals, row by row.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row.iter().map(|&v| Rat::from_int(v)));
        }
        Mat::new(r, c, entries)
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        Mat::new(r, c, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<Rat> {
        self.row(r).to_vec()
    }

    pub fn col_vec(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Rat]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        out
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut entries = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                entries.push(self.at(r, c).clone());
            }
        }
        Mat::new(self.rows, cols.len(), entries)
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows).map(|r| Rat::dot(self.row(r), v)).collect()
    }

    /// `vᵀ * self` for a row vector `v`.
    pub fn vec_mul(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        (0..self.cols)
            .map(|c| {
                (0..self.rows).fold(Rat::zero(), |acc, r| acc + &v[r] * self.at(r, c))
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().2
    }

    /// Reduced row echelon form, exact.
    ///
    /// Returns `(rref, pivot_columns, rank)` with pivot columns in increasing
    /// order. Pivots are scaled to 1 and eliminated above and below.
    pub fn rref(mut self) -> (Mat, Vec<usize>, usize) {
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(pivot_row, src);
            let inv = self.at(pivot_row, col).recip();
            for c in col..self.cols {
                let v = self.at(pivot_row, c) * &inv;
                *self.at_mut(pivot_row, c) = v;
            }
            for r in 0..self.rows {
                if r == pivot_row || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for c in col..self.cols {
                    let v = self.at(r, c) - &factor * self.at(pivot_row, c);
                    *self.at_mut(r, c) = v;
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let rank = pivots.len();
        (self, pivots, rank)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Exact basis of the right null space `{x : m·x = 0}`.
///
/// Rows of the result are the basis vectors; row count is `cols − rank`.
pub fn kernel_basis(m: &Mat) -> Mat {
    let cols = m.cols();
    let (red, pivots, rank) = m.clone().rref();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rat::zero(); cols];
        v[fc] = Rat::one();
        for (pr, &pc) in pivots.iter().enumerate() {
            v[pc] = -red.at(pr, fc);
        }
        rows.push(v);
    }
    debug_assert_eq!(rows.len(), cols - rank);
    if rows.is_empty() {
        Mat::zeros(0, cols)
    } else {
        Mat::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rref_identity_is_fixed() {
        let (r, pivots, rank) = Mat::identity(2).rref();
        assert_eq!(r, Mat::identity(2));
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rank, 2);
    }

    #[test]
    fn rref_zero_matrix() {
        let (r, pivots, rank) = Mat::zeros(3, 3).rref();
        assert_eq!(r, Mat::zeros(3, 3));
        assert!(pivots.is_empty());
        assert_eq!(rank, 0);
    }

    #[test]
    fn rref_rank_one_elimination() {
        // [[1,2],[2,4]] reduces to [[1,2],[0,0]] with a single pivot.
        let m = Mat::from_i64(&[&[1, 2], &[2, 4]]);
        let (r, pivots, rank) = m.rref();
        assert_eq!(r, Mat::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(pivots, vec![0]);
        assert_eq!(rank, 1);
    }

    #[test]
    fn kernel_of_single_equation() {
        let m = Mat::from_i64(&[&[1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.rows(), 1);
        // Proportional to (1, -1).
        let v = k.row(0);
        assert_eq!(&v[0] + &v[1], Rat::zero());
        assert!(!v[0].is_zero());
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        for n in 1..5 {
            let k = kernel_basis(&Mat::identity(n));
            assert_eq!(k.rows(), 0);
        }
    }

    #[test]
    fn kernel_rows_are_orthogonal_to_input() {
        let m = Mat::from_i64(&[&[1, 2, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.rows(), 2);
        for v in k.iter_rows() {
            assert_eq!(Rat::dot(m.row(0), v), Rat::zero());
        }
        let (_, _, krank) = k.clone().rref();
        assert_eq!(krank, 2, "kernel rows must be independent");
    }

    fn arb_mat() -> impl Strategy<Value = Mat> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c).prop_map(move |vals| {
                Mat::new(r, c, vals.into_iter().map(Rat::from_int).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(m in arb_mat()) {
            let (r1, _, _) = m.rref();
            let (r2, _, _) = r1.clone().rref();
            prop_assert_eq!(r1, r2);
        }

        #[test]
        fn rank_nullity_holds_exactly(m in arb_mat()) {
            let cols = m.cols();
            let rank = m.rank();
            let k = kernel_basis(&m);
            prop_assert_eq!(rank + k.rows(), cols);
            for v in k.iter_rows() {
                let image = m.mul_vec(v);
                prop_assert!(image.iter().all(Rat::is_zero));
            }
        }
    }
}
