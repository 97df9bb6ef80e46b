//! `sl_n` on its standard basis.
//!
//! The basis is fixed and part of the public contract: first the root
//! vectors `E_ij` (`i != j`) in lexicographic order of `(i, j)`, then the
//! coroots `h_k = E_kk - E_{k+1,k+1}` for `k = 1..n-1`. The invariant form
//! is the trace form `tr(xy)`, a nonzero multiple of the Killing form.

use std::ops::{Add, Neg, Sub};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, axpy, is_zero_vector, RatMatrix, RatVector, Rational, Subspace};
use crate::parabolic::ParabolicData;
use crate::weyl::{Root, WeylError, MAX_RANK};

/// What a basis vector of `sl_n` is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisVector {
    /// `E_ij`, the root vector of `e_i - e_j`.
    Root(Root),
    /// `h_k = E_kk - E_{k+1,k+1}`.
    Coroot(usize),
}

/// An element of `sl_n` in coordinates over the fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(RatVector);

impl Element {
    pub(crate) fn from_coords(v: RatVector) -> Element {
        Element(v)
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> RatVector {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vector(&self.0)
    }

    pub fn scale(&self, c: &Rational) -> Element {
        Element(self.0.iter().map(|x| x * c).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: &Rational, other: &Element, b: &Rational) -> Element {
        Element(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| &(a * x) + &(b * y))
                .collect(),
        )
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        Element(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element(self.0.iter().map(|a| -a).collect())
    }
}

/// `sl_n` with its basis bookkeeping and Gram matrix of the trace form.
#[derive(Debug, Clone)]
pub struct SlAlgebra {
    n: usize,
    basis: Vec<BasisVector>,
    /// `root_index[(i-1)*n + (j-1)]` is the basis index of `E_ij`.
    root_index: Vec<Option<usize>>,
    gram: RatMatrix,
}

pub fn build_sl(n: usize) -> Result<SlAlgebra> {
    SlAlgebra::new(n)
}

impl SlAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&n) {
            return Err(WeylError::RankOutOfRange(n).into());
        }
        let mut basis = Vec::with_capacity(n * n - 1);
        let mut root_index = vec![None; n * n];
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    root_index[(i - 1) * n + (j - 1)] = Some(basis.len());
                    basis.push(BasisVector::Root(Root::new(i, j)));
                }
            }
        }
        basis.extend((1..n).map(BasisVector::Coroot));
        let mut g = SlAlgebra {
            n,
            basis,
            root_index,
            gram: RatMatrix::zeros(0, 0),
        };
        let d = g.dim();
        let mut gram = RatMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                gram[(a, b)] = g.form_on_basis(a, b);
            }
        }
        g.gram = gram;
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n - 1
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    /// `dim b = n(n+1)/2 - 1`.
    pub fn borel_dim(&self) -> usize {
        self.n * (self.n + 1) / 2 - 1
    }

    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn root_index(&self, r: Root) -> usize {
        self.root_index[(r.i - 1) * self.n + (r.j - 1)].expect("valid root")
    }

    pub fn coroot_index(&self, k: usize) -> usize {
        assert!(k >= 1 && k < self.n);
        self.n * (self.n - 1) + k - 1
    }

    pub fn cartan_indices(&self) -> Vec<usize> {
        (1..self.n).map(|k| self.coroot_index(k)).collect()
    }

    pub fn zero(&self) -> Element {
        Element(vec![Rational::zero(); self.dim()])
    }

    pub fn element(&self, coords: RatVector) -> Result<Element> {
        if coords.len() != self.dim() {
            return Err(Error::WrongLength {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        Ok(Element(coords))
    }

    pub fn basis_element(&self, k: usize) -> Element {
        let mut v = vec![Rational::zero(); self.dim()];
        v[k] = Rational::one();
        Element(v)
    }

    /// `E_ij` as an element.
    pub fn root_vector(&self, i: usize, j: usize) -> Element {
        self.basis_element(self.root_index(Root::new(i, j)))
    }

    /// `h_k` as an element.
    pub fn coroot(&self, k: usize) -> Element {
        self.basis_element(self.coroot_index(k))
    }

    /// The trace-zero diagonal matrix with the given entries.
    pub fn diagonal(&self, entries: &[Rational]) -> Result<Element> {
        let mut m = RatMatrix::zeros(self.n, self.n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        self.from_matrix(&m)
    }

    pub fn to_matrix(&self, x: &Element) -> RatMatrix {
        let n = self.n;
        let mut m = RatMatrix::zeros(n, n);
        for (c, b) in x.0.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            match *b {
                BasisVector::Root(r) => m[(r.i - 1, r.j - 1)] = c.clone(),
                BasisVector::Coroot(k) => {
                    m[(k - 1, k - 1)] += c;
                    m[(k, k)] -= c;
                }
            }
        }
        m
    }

    pub fn from_matrix(&self, m: &RatMatrix) -> Result<Element> {
        let n = self.n;
        if m.rows() != n || m.cols() != n {
            return Err(exact::ExactError::DimensionMismatch {
                expected: n * n,
                found: m.rows() * m.cols(),
            }
            .into());
        }
        let tr = m.trace();
        if !tr.is_zero() {
            return Err(Error::NotTraceless(tr.to_string()));
        }
        let mut coords = Vec::with_capacity(self.dim());
        let mut partial = Rational::zero();
        for b in &self.basis {
            match *b {
                BasisVector::Root(r) => coords.push(m[(r.i - 1, r.j - 1)].clone()),
                BasisVector::Coroot(k) => {
                    partial += &m[(k - 1, k - 1)];
                    coords.push(partial.clone());
                }
            }
        }
        Ok(Element(coords))
    }

    pub fn basis_matrix(&self, k: usize) -> RatMatrix {
        self.to_matrix(&self.basis_element(k))
    }

    fn form_on_basis(&self, a: usize, b: usize) -> Rational {
        match (self.basis[a], self.basis[b]) {
            (BasisVector::Root(r), BasisVector::Root(s)) if r.negate() == s => Rational::one(),
            (BasisVector::Coroot(k), BasisVector::Coroot(l)) => match k.abs_diff(l) {
                0 => Rational::from_int(2),
                1 => Rational::from_int(-1),
                _ => Rational::zero(),
            },
            _ => Rational::zero(),
        }
    }

    /// `[x, y] = xy - yx`.
    pub fn bracket(&self, x: &Element, y: &Element) -> Element {
        let (a, b) = (self.to_matrix(x), self.to_matrix(y));
        let c = a
            .mul(&b)
            .and_then(|ab| ab.sub(&b.mul(&a)?))
            .expect("square matrices of equal size");
        self.from_matrix(&c).expect("commutators are traceless")
    }

    /// Matrix of `v ↦ [x, v]` on the fixed basis (columns are images).
    pub fn ad_matrix(&self, x: &Element) -> RatMatrix {
        let d = self.dim();
        let xm = self.to_matrix(x);
        let mut ad = RatMatrix::zeros(d, d);
        for k in 0..d {
            let bm = self.basis_matrix(k);
            let c = xm
                .mul(&bm)
                .and_then(|ab| ab.sub(&bm.mul(&xm)?))
                .expect("square");
            let col = self.from_matrix(&c).expect("traceless");
            for (i, v) in col.0.into_iter().enumerate() {
                ad[(i, k)] = v;
            }
        }
        ad
    }

    /// The trace form `tr(xy)`.
    pub fn invariant_form(&self, x: &Element, y: &Element) -> Rational {
        let (a, b) = (self.to_matrix(x), self.to_matrix(y));
        a.mul(&b).expect("square").trace()
    }

    /// `g^x`, the centralizer of `x`.
    pub fn centralizer(&self, x: &Element) -> Subspace {
        exact::kernel(&self.ad_matrix(x))
    }

    pub fn is_regular(&self, x: &Element) -> bool {
        self.ad_matrix(x).rank() == self.dim() - self.rank()
    }

    /// Whether every nonzero point of `span{x, y}`, over the algebraic
    /// closure, is regular.
    ///
    /// `Z` is regular iff `I, Z, ..., Z^{n-1}` are independent. Along
    /// `Z = x + t y` the dependent locus is the common zero set of the
    /// maximal minors of that Krylov matrix, each a polynomial in `t` of
    /// degree at most `n(n-1)/2`; the affine part is regular iff their gcd
    /// is constant. The remaining point of the line is `y`.
    pub fn pencil_is_regular(&self, x: &Element, y: &Element) -> bool {
        if !self.is_regular(y) {
            return false;
        }
        let n = self.n;
        let nodes = exact::integer_nodes(n * (n - 1) / 2 + 1);
        // one n^2 x n Krylov matrix per node, rows indexed by matrix entry
        let krylov: Vec<Vec<RatVector>> = nodes
            .iter()
            .map(|t| {
                let z = self.to_matrix(&x.combine(&Rational::one(), y, t));
                let mut rows = vec![Vec::with_capacity(n); n * n];
                let mut power = RatMatrix::identity(n);
                for _ in 0..n {
                    for (r, v) in power.row_vectors().flatten().enumerate() {
                        rows[r].push(v.clone());
                    }
                    power = power.mul(&z).expect("square");
                }
                rows
            })
            .collect();
        let live: Vec<usize> = (0..n * n)
            .filter(|&r| krylov.iter().any(|k| !is_zero_vector(&k[r])))
            .collect();
        let mut gcd = RatVector::new();
        for subset in live.iter().copied().combinations(n) {
            let values: RatVector = krylov
                .iter()
                .map(|k| {
                    let rows: Vec<RatVector> = subset.iter().map(|&r| k[r].clone()).collect();
                    RatMatrix::from_rows(&rows, n)
                        .and_then(|m| m.determinant())
                        .expect("square minor")
                })
                .collect();
            if is_zero_vector(&values) {
                continue;
            }
            let minor = exact::interpolate_scalar(&nodes, &values).expect("distinct nodes");
            gcd = exact::poly_gcd(&gcd, &minor);
            if gcd.len() == 1 {
                return true;
            }
        }
        false
    }

    /// Membership in the Richardson orbit of `p`: for `x ∈ p_u`,
    /// `dim g^x = dim g - 2 dim p_u`.
    pub fn is_richardson(&self, x: &Element, p: &ParabolicData) -> Result<bool> {
        if !p.pu().contains(x.coords()) {
            return Err(Error::NotInSubspace("p_u"));
        }
        let centralizer_dim = self.dim() - self.ad_matrix(x).rank();
        Ok(centralizer_dim + 2 * p.pu().dim() == self.dim())
    }

    /// `Ad(exp(t·ad m))(x) = Σ_j t^j/j! (ad m)^j x` for ad-nilpotent `m`.
    pub fn conjugate_unipotent(&self, x: &Element, m: &Element, t: &Rational) -> Result<Element> {
        let ad = self.ad_matrix(m);
        let d = self.dim();
        // (ad m)^d = 0 iff ad m is nilpotent
        let mut power = ad.clone();
        for _ in 1..d {
            if power.is_zero() {
                break;
            }
            power = power.mul(&ad)?;
        }
        if !power.is_zero() {
            return Err(Error::NotNilpotent);
        }
        let mut acc = x.0.clone();
        let mut term = x.0.clone();
        for j in 1..=d {
            let next = ad.mul_vec(&term)?;
            if is_zero_vector(&next) {
                break;
            }
            let f = t / &Rational::from(j);
            term = next.iter().map(|v| v * &f).collect();
            axpy(&mut acc, &Rational::one(), &term);
        }
        Ok(Element(acc))
    }

    /// The principal `sl_2`-triple `(e, h, f)` with `e = Σ E_{i,i+1}`,
    /// `h = diag(n-1, n-3, ..., 1-n)` and `f = Σ i(n-i) E_{i+1,i}`.
    pub fn principal_triple(&self) -> (Element, Element, Element) {
        let n = self.n;
        let mut e = self.zero();
        let mut f = self.zero();
        for i in 1..n {
            e.0[self.root_index(Root::new(i, i + 1))] = Rational::one();
            f.0[self.root_index(Root::new(i + 1, i))] = Rational::from(i * (n - i));
        }
        let diag: Vec<Rational> = (0..n)
            .map(|i| Rational::from_int(n as i64 - 1 - 2 * i as i64))
            .collect();
        let h = self.diagonal(&diag).expect("traceless");
        (e, h, f)
    }

    pub fn cartan(&self) -> Subspace {
        Subspace::coordinate(&self.cartan_indices(), self.dim())
    }

    /// Upper-triangular trace-zero matrices.
    pub fn borel(&self) -> Subspace {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&k| match self.basis[k] {
                BasisVector::Root(r) => r.is_positive(),
                BasisVector::Coroot(_) => true,
            })
            .collect();
        Subspace::coordinate(&idx, self.dim())
    }
}
