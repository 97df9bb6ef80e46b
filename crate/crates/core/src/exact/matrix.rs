use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{ExactError, Rational};

pub type RatVector = Vec<Rational>;

/// Dense row-major matrix over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows of equal length; `cols` is only used when
    /// `rows` is empty.
    pub fn from_rows(rows: &[RatVector], cols: usize) -> Result<Self, ExactError> {
        let cols = rows.first().map_or(cols, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(ExactError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().cloned());
        }
        Ok(RatMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<RatVector> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
            .collect();
        Self::from_rows(&data, cols).expect("ragged integer matrix")
    }

    pub fn from_columns(columns: &[RatVector], rows: usize) -> Result<Self, ExactError> {
        let rows = columns.first().map_or(rows, Vec::len);
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(ExactError::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[Rational]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| &self[(i, i)]).sum()
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RatVector, ExactError> {
        if self.cols != v.len() {
            return Err(ExactError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .row_vectors()
            .map(|row| dot(row, v))
            .collect())
    }

    pub fn add(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &RatMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<RatMatrix, ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ExactError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Reduced row echelon form with the zero rows dropped, plus the rank.
    pub fn rref(&self) -> (RatMatrix, usize) {
        let mut rows: Vec<RatVector> = self.row_vectors().map(<[Rational]>::to_vec).collect();
        let pivots = rref_in_place(&mut rows, self.cols);
        let rank = pivots.len();
        rows.truncate(rank);
        (
            RatMatrix::from_rows(&rows, self.cols).expect("rows keep their width"),
            rank,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Determinant by fraction-carrying Gaussian elimination.
    pub fn determinant(&self) -> Result<Rational, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a: Vec<RatVector> = self.row_vectors().map(<[Rational]>::to_vec).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            let inv = pivot.recip();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                let (top, bottom) = a.split_at_mut(r);
                for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *dst -= &(&f * src);
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_vectors() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn axpy(acc: &mut [Rational], c: &Rational, v: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += &(c * x);
        }
    }
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_zero)
}

/// Gauss-Jordan elimination on a list of rows. Returns the pivot columns;
/// the first `pivots.len()` rows are the nonzero RREF rows.
pub(crate) fn rref_in_place(rows: &mut [RatVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut().skip(c) {
                *x = &*x * &inv;
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().expect("r < len");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            let f = other[c].clone();
            if f.is_zero() {
                continue;
            }
            for k in c..cols {
                if !pivot_row[k].is_zero() {
                    let t = &f * &pivot_row[k];
                    other[k] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_identity() {
        let (m, rank) = RatMatrix::identity(3).rref();
        assert_eq!(m, RatMatrix::identity(3));
        assert_eq!(rank, 3);
    }

    #[test]
    fn rref_zero_keeps_no_rows() {
        let (m, rank) = RatMatrix::zeros(2, 4).rref();
        assert_eq!(rank, 0);
        assert_eq!(m.rows(), 0);
        assert_eq!(m.cols(), 4);
    }

    #[test]
    fn rref_dependent_rows() {
        let (m, rank) = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(rank, 1);
        assert_eq!(m, RatMatrix::from_i64(&[&[1, 2]]));
    }

    #[test]
    fn rref_scales_pivots() {
        let (m, _) = RatMatrix::from_i64(&[&[0, 2, 4], &[3, 0, 3]]).rref();
        assert_eq!(m, RatMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 2]]));
    }

    #[test]
    fn determinant_small() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.determinant().unwrap(), Rational::one());
        let s = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(s.determinant().unwrap().is_zero());
        assert!(RatMatrix::zeros(2, 3).determinant().is_err());
    }

    #[test]
    fn mul_shapes() {
        let a = RatMatrix::from_i64(&[&[1, 2, 3]]);
        let b = RatMatrix::from_i64(&[&[1], &[1], &[1]]);
        assert_eq!(a.mul(&b).unwrap(), RatMatrix::from_i64(&[&[6]]));
        assert!(a.mul(&a).is_err());
    }
}
