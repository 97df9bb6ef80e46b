use serde::{Deserialize, Serialize};

use super::matrix::{rref_in_place, RatMatrix, RatVector};
use super::{ExactError, Rational};

/// A linear subspace of `Q^d` stored by its reduced row echelon basis.
///
/// RREF is canonical, so two subspaces are equal exactly when their basis
/// matrices are equal entry by entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RatMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: RatMatrix::zeros(0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: RatMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of the given vectors.
    pub fn span<V: AsRef<[Rational]>>(vectors: &[V], ambient_dim: usize) -> Result<Self, ExactError> {
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            let v = v.as_ref();
            if v.len() != ambient_dim {
                return Err(ExactError::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            rows.push(v.to_vec());
        }
        Ok(Self::from_rows_unchecked(rows, ambient_dim))
    }

    fn from_rows_unchecked(mut rows: Vec<RatVector>, ambient_dim: usize) -> Self {
        let pivots = rref_in_place(&mut rows, ambient_dim);
        rows.truncate(pivots.len());
        Subspace {
            ambient_dim,
            basis: RatMatrix::from_rows(&rows, ambient_dim).expect("uniform rows"),
            pivots,
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(indices: &[usize], ambient_dim: usize) -> Self {
        let rows: Vec<RatVector> = indices
            .iter()
            .map(|&i| {
                let mut v = vec![Rational::zero(); ambient_dim];
                v[i] = Rational::one();
                v
            })
            .collect();
        Self::from_rows_unchecked(rows, ambient_dim)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = &[Rational]> + '_ {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Exact membership: reduce `v` against the RREF rows and test for zero.
    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut r = v.to_vec();
        for (row, &p) in self.basis_vectors().zip(&self.pivots) {
            let f = r[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, b) in r.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
        }
        r.iter().all(Rational::is_zero)
    }

    /// Coordinates of `v` with respect to the RREF basis, if `v` lies in
    /// the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<RatVector> {
        if !self.contains(v) {
            return None;
        }
        // RREF rows have a 1 at their pivot and zeros at every other pivot.
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient_dim == self.ambient_dim && other.basis_vectors().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, ExactError> {
        self.check_ambient(other)?;
        let rows: Vec<RatVector> = self
            .basis_vectors()
            .chain(other.basis_vectors())
            .map(<[Rational]>::to_vec)
            .collect();
        Ok(Self::from_rows_unchecked(rows, self.ambient_dim))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, ExactError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        // (a, b) with a·U = b·W  <=>  [U^T | -W^T] (a, b)^T = 0
        let columns: Vec<RatVector> = self
            .basis_vectors()
            .map(<[Rational]>::to_vec)
            .chain(other.basis_vectors().map(|v| v.iter().map(|x| -x).collect()))
            .collect();
        let m = RatMatrix::from_columns(&columns, self.ambient_dim)?;
        let ker = super::kernel(&m);
        let k = self.dim();
        let vectors: Vec<RatVector> = ker
            .basis_vectors()
            .map(|coef| {
                let mut v = vec![Rational::zero(); self.ambient_dim];
                for (c, row) in coef[..k].iter().zip(self.basis_vectors()) {
                    super::matrix::axpy(&mut v, c, row);
                }
                v
            })
            .collect();
        Subspace::span(&vectors, self.ambient_dim)
    }

    /// Image of the subspace under a linear map given as a matrix acting on
    /// column vectors.
    pub fn image(&self, map: &RatMatrix) -> Result<Subspace, ExactError> {
        if map.cols() != self.ambient_dim {
            return Err(ExactError::DimensionMismatch {
                expected: self.ambient_dim,
                found: map.cols(),
            });
        }
        let vectors: Result<Vec<RatVector>, _> =
            self.basis_vectors().map(|v| map.mul_vec(v)).collect();
        Subspace::span(&vectors?, map.rows())
    }

    /// Image under an arbitrary linear function on vectors.
    pub fn map_vectors(
        &self,
        target_dim: usize,
        f: impl Fn(&[Rational]) -> RatVector,
    ) -> Result<Subspace, ExactError> {
        let vectors: Vec<RatVector> = self.basis_vectors().map(f).collect();
        Subspace::span(&vectors, target_dim)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), ExactError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(ExactError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }
}
