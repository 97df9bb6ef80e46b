//! Exact rational scalars, dense matrices, canonical subspaces, and the
//! interpolation routines the invariant machinery is built on.

mod matrix;
mod rational;
mod subspace;

pub use matrix::{axpy, dot, is_zero_vector, RatMatrix, RatVector};
pub use rational::{ParseRationalError, Rational};
pub use subspace::Subspace;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("interpolation nodes must be pairwise distinct (node {0} repeated)")]
    DuplicateNode(Rational),
}

/// Reduced row echelon form (zero rows dropped) and rank.
pub fn rref(m: &RatMatrix) -> (RatMatrix, usize) {
    m.rref()
}

/// Null space of `m` as a subspace of `Q^{cols}`.
pub fn kernel(m: &RatMatrix) -> Subspace {
    let cols = m.cols();
    let (r, _) = m.rref();
    let mut pivot_of_col = vec![None; cols];
    let mut pivots = Vec::with_capacity(r.rows());
    for (ri, row) in r.row_vectors().enumerate() {
        let p = row
            .iter()
            .position(|x| !x.is_zero())
            .expect("rref drops zero rows");
        pivot_of_col[p] = Some(ri);
        pivots.push(p);
    }
    let vectors: Vec<RatVector> = (0..cols)
        .filter(|c| pivot_of_col[*c].is_none())
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (ri, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(ri, free)];
            }
            v
        })
        .collect();
    Subspace::span(&vectors, cols).expect("kernel vectors have the domain width")
}

/// Solves `a·x = b` exactly. When `a` has dependent columns the free
/// variables are set to zero.
pub fn solve_linear(a: &RatMatrix, b: &[Rational]) -> Result<RatVector, ExactError> {
    if b.len() != a.rows() {
        return Err(ExactError::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let cols = a.cols();
    let augmented: Vec<RatVector> = a
        .row_vectors()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.to_vec();
            r.push(bi.clone());
            r
        })
        .collect();
    let m = RatMatrix::from_rows(&augmented, cols + 1)?;
    let (r, _) = m.rref();
    let mut x = vec![Rational::zero(); cols];
    for row in r.row_vectors() {
        let p = row.iter().position(|v| !v.is_zero()).expect("nonzero row");
        if p == cols {
            return Err(ExactError::NoSolution);
        }
        x[p] = row[cols].clone();
    }
    Ok(x)
}

/// Inverse of a square nonsingular matrix.
pub fn inverse(a: &RatMatrix) -> Result<RatMatrix, ExactError> {
    if !a.is_square() {
        return Err(ExactError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let columns: Result<Vec<RatVector>, _> = (0..n)
        .map(|j| {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            solve_linear(a, &e)
        })
        .collect();
    let inv = RatMatrix::from_columns(&columns?, n)?;
    if inv.mul(a)? != RatMatrix::identity(n) {
        return Err(ExactError::NoSolution);
    }
    Ok(inv)
}

/// Coefficients `c_0..c_d` of the unique vector-valued polynomial
/// `t ↦ Σ c_k t^k` of degree `≤ d = nodes.len() - 1` through
/// `(nodes[j], values[j])`.
///
/// Runs Newton divided differences and then expands the Newton form into
/// the monomial basis.
pub fn vandermonde_solve(
    nodes: &[Rational],
    values: &[RatVector],
) -> Result<Vec<RatVector>, ExactError> {
    if nodes.len() != values.len() {
        return Err(ExactError::DimensionMismatch {
            expected: nodes.len(),
            found: values.len(),
        });
    }
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    let width = values[0].len();
    if let Some(bad) = values.iter().find(|v| v.len() != width) {
        return Err(ExactError::DimensionMismatch {
            expected: width,
            found: bad.len(),
        });
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[..i].contains(a) {
            return Err(ExactError::DuplicateNode(a.clone()));
        }
    }
    let n = nodes.len();
    // divided differences, computed in place
    let mut dd: Vec<RatVector> = values.to_vec();
    for level in 1..n {
        for j in (level..n).rev() {
            let denom = (&nodes[j] - &nodes[j - level]).recip();
            let (lo, hi) = dd.split_at_mut(j);
            for (h, l) in hi[0].iter_mut().zip(&lo[j - 1]) {
                *h = &(&*h - l) * &denom;
            }
        }
    }
    // Horner on the Newton form: p = dd[n-1]; p = p·(t - x_k) + dd[k]
    let mut coeffs: Vec<RatVector> = vec![dd[n - 1].clone()];
    for k in (0..n - 1).rev() {
        let mut next = vec![vec![Rational::zero(); width]; coeffs.len() + 1];
        for (deg, c) in coeffs.iter().enumerate() {
            for (w, cv) in c.iter().enumerate() {
                if cv.is_zero() {
                    continue;
                }
                next[deg + 1][w] += cv;
                next[deg][w] -= &(cv * &nodes[k]);
            }
        }
        for (w, v) in dd[k].iter().enumerate() {
            next[0][w] += v;
        }
        coeffs = next;
    }
    Ok(coeffs)
}

/// Scalar convenience wrapper over [`vandermonde_solve`].
pub fn interpolate_scalar(nodes: &[Rational], values: &[Rational]) -> Result<RatVector, ExactError> {
    let wrapped: Vec<RatVector> = values.iter().map(|v| vec![v.clone()]).collect();
    Ok(vandermonde_solve(nodes, &wrapped)?
        .into_iter()
        .map(|mut c| c.pop().expect("width one"))
        .collect())
}

/// The integer nodes `0, 1, ..., count-1`.
pub fn integer_nodes(count: usize) -> Vec<Rational> {
    (0..count).map(Rational::from).collect()
}

/// Drops trailing zero coefficients; the zero polynomial becomes empty.
pub fn poly_trim(mut p: RatVector) -> RatVector {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

/// Remainder of `a` modulo a nonzero `b` (coefficients lowest first).
pub fn poly_rem(a: &[Rational], b: &[Rational]) -> RatVector {
    let b = poly_trim(b.to_vec());
    let lead = b.last().expect("nonzero divisor").recip();
    let mut r = poly_trim(a.to_vec());
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = &r[r.len() - 1] * &lead;
        for (k, bk) in b.iter().enumerate() {
            let t = &c * bk;
            r[shift + k] = &r[shift + k] - &t;
        }
        r.pop();
        r = poly_trim(r);
    }
    r
}

/// Monic greatest common divisor; `gcd(0, 0)` is the empty polynomial.
pub fn poly_gcd(a: &[Rational], b: &[Rational]) -> RatVector {
    let (mut a, mut b) = (poly_trim(a.to_vec()), poly_trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().map(Rational::recip) {
        for c in &mut a {
            *c = &*c * &lead;
        }
    }
    a
}

/// Coefficients `c_0..c_n` of `det(λI - m)`, lowest degree first, by the
/// Faddeev–LeVerrier recurrence. `c_n = 1`.
pub fn char_poly(m: &RatMatrix) -> Result<RatVector, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    // M_k = A·M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A·M_k)/k
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk)?;
        let c = coeffs[n - k + 1].clone();
        for i in 0..n {
            next[(i, i)] += &c;
        }
        mk = next;
        let am = m.mul(&mk)?;
        coeffs[n - k] = -(am.trace() / Rational::from(k));
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64) -> Rational {
        Rational::from_int(x)
    }

    fn v(xs: &[i64]) -> RatVector {
        xs.iter().map(|&x| q(x)).collect()
    }

    fn poly_mul(a: &[Rational], b: &[Rational]) -> RatVector {
        let mut out = vec![q(0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += &(x * y);
            }
        }
        out
    }

    #[test]
    fn polynomial_gcd() {
        // (t - 1)(t + 2) and (t - 1)(t - 3)
        let a = poly_mul(&v(&[-1, 1]), &v(&[2, 1]));
        let b = poly_mul(&v(&[-1, 1]), &v(&[-3, 1]));
        assert_eq!(poly_gcd(&a, &b), v(&[-1, 1]));
        assert_eq!(poly_gcd(&v(&[2, 1]), &v(&[-3, 1])), v(&[1]));
        assert_eq!(poly_gcd(&v(&[0, 0]), &v(&[0, 6])), v(&[0, 1]));
        assert!(poly_gcd(&[], &[]).is_empty());
        assert_eq!(poly_rem(&v(&[1, 0, 1]), &v(&[0, 1])), v(&[1]));
    }

    proptest! {
        #[test]
        fn gcd_divides_both(
            a in proptest::collection::vec(-5i64..=5, 1..5),
            b in proptest::collection::vec(-5i64..=5, 1..5),
            c in proptest::collection::vec(-5i64..=5, 1..4),
        ) {
            let c = poly_trim(v(&c));
            prop_assume!(!c.is_empty());
            let (pa, pb) = (poly_mul(&v(&a), &c), poly_mul(&v(&b), &c));
            let g = poly_gcd(&pa, &pb);
            if poly_trim(pa.clone()).is_empty() && poly_trim(pb.clone()).is_empty() {
                prop_assert!(g.is_empty());
            } else {
                prop_assert!(poly_rem(&pa, &g).is_empty());
                prop_assert!(poly_rem(&pb, &g).is_empty());
                prop_assert!(poly_rem(&g, &c).is_empty());
            }
        }
    }

    #[test]
    fn solve_examples() {
        let x = solve_linear(&RatMatrix::identity(2), &v(&[3, -5])).unwrap();
        assert_eq!(x, v(&[3, -5]));
        let vand = RatMatrix::from_i64(&[&[1, 0, 0], &[1, 1, 1], &[1, 2, 4]]);
        assert_eq!(solve_linear(&vand, &v(&[0, 1, 4])).unwrap(), v(&[0, 0, 1]));
        let bad = RatMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve_linear(&bad, &v(&[1, 3])), Err(ExactError::NoSolution));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&RatMatrix::zeros(2, 2)), Subspace::full(2));
        assert_eq!(kernel(&RatMatrix::identity(3)), Subspace::zero(3));
        // ad(h) on the sl_2 basis (e, f, h)
        let ad_h = RatMatrix::from_i64(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
        let k = kernel(&ad_h);
        assert_eq!(k, Subspace::coordinate(&[2], 3));
    }

    #[test]
    fn vandermonde_examples() {
        let c = interpolate_scalar(&[q(0), q(1)], &[q(5), q(7)]).unwrap();
        assert_eq!(c, v(&[5, 2]));
        let c = interpolate_scalar(&[q(0), q(1), q(2)], &[q(1), q(1), q(1)]).unwrap();
        assert_eq!(c, v(&[1, 0, 0]));
        // t ↦ (t², t) at nodes 0, 1, -1
        let c = vandermonde_solve(&[q(0), q(1), q(-1)], &[v(&[0, 0]), v(&[1, 1]), v(&[1, -1])])
            .unwrap();
        assert_eq!(c, vec![v(&[0, 0]), v(&[0, 1]), v(&[1, 0])]);
        assert!(matches!(
            interpolate_scalar(&[q(1), q(1)], &[q(0), q(0)]),
            Err(ExactError::DuplicateNode(_))
        ));
    }

    #[test]
    fn char_poly_diag() {
        let m = RatMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, -1]]);
        // λ³ - λ
        assert_eq!(char_poly(&m).unwrap(), v(&[0, -1, 0, 1]));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec((-6i64..=6, 1i64..=3), n * n).prop_map(move |e| {
            let entries = e.into_iter().map(|(a, b)| Rational::new(a, b)).collect();
            RatMatrix::from_vec(n, n, entries).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rref_is_idempotent(m in small_matrix(5)) {
            let (r, _) = m.rref();
            prop_assert_eq!(r.rref().0, r);
        }

        #[test]
        fn rank_nullity(m in small_matrix(6)) {
            prop_assert_eq!(kernel(&m).dim() + m.rank(), 6);
            for kv in kernel(&m).basis_vectors() {
                prop_assert!(is_zero_vector(&m.mul_vec(kv).unwrap()));
            }
        }

        #[test]
        fn vandermonde_reproduces_data(
            vals in proptest::collection::vec(proptest::collection::vec(-20i64..20, 3), 1..6)
        ) {
            let nodes: Vec<Rational> = (0..vals.len()).map(|i| Rational::new(2 * i as i64 - 3, 2)).collect();
            let values: Vec<RatVector> = vals.iter().map(|r| v(r)).collect();
            let coeffs = vandermonde_solve(&nodes, &values).unwrap();
            prop_assert_eq!(coeffs.len(), nodes.len());
            for (t, want) in nodes.iter().zip(&values) {
                let got: RatVector = (0..3)
                    .map(|w| coeffs.iter().enumerate().map(|(k, c)| &c[w] * &t.pow(k as u32)).sum())
                    .collect();
                prop_assert_eq!(&got, want);
            }
        }

        // oracle: det(λI - m) evaluated by elimination at n+1 integer points,
        // fitted through a dense Vandermonde solve
        #[test]
        fn char_poly_matches_determinants(m in small_matrix(4)) {
            let n = 4;
            let pts: Vec<i64> = (0..=n as i64).collect();
            let vals: RatVector = pts.iter().map(|&l| {
                let shifted = RatMatrix::identity(n).scale(&q(l)).sub(&m).unwrap();
                shifted.determinant().unwrap()
            }).collect();
            let vand: Vec<RatVector> = pts.iter().map(|&l| (0..=n as u32).map(|k| q(l).pow(k)).collect()).collect();
            let vand = RatMatrix::from_rows(&vand, n + 1).unwrap();
            let want = solve_linear(&vand, &vals).unwrap();
            prop_assert_eq!(char_poly(&m).unwrap(), want);
        }

        #[test]
        fn subspace_equality_is_mutual_containment(
            a in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 0..4),
            b in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 0..4),
        ) {
            let sa = Subspace::span(&a.iter().map(|r| v(r)).collect::<Vec<_>>(), 4).unwrap();
            let sb = Subspace::span(&b.iter().map(|r| v(r)).collect::<Vec<_>>(), 4).unwrap();
            prop_assert_eq!(sa == sb, sa.contains_subspace(&sb) && sb.contains_subspace(&sa));
            prop_assert_eq!(&sa, &sa.clone());
            let s = sa.sum(&sb).unwrap();
            let i = sa.intersection(&sb).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), sa.dim() + sb.dim());
            prop_assert!(sa.contains_subspace(&i) && sb.contains_subspace(&i));
        }
    }
}
