//! Basic invariants of `sl_n` and of its standard Levi subalgebras, their
//! gradients through the trace form, and the polarized gradient spans
//! `V_{x,y}`.
//!
//! Invariants are polynomials in characteristic-polynomial coefficients of
//! diagonal blocks. For `g` itself there is one block and the generators
//! are the coefficients of `λ^{n-2}, ..., λ^0` in `det(λI - X)`; for a Levi
//! factor each block contributes all of its coefficients, minus one trace
//! that is redundant on trace-zero matrices.
//!
//! Every derivative and every polarization is extracted by exact
//! interpolation at the integer nodes `0, 1, 2, ...`; the degree bound makes
//! the result exact.

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, SlAlgebra};
use crate::error::{Error, Result};
use crate::exact::{self, RatMatrix, RatVector, Rational, Subspace};
use crate::parabolic::LeviElement;
use crate::weyl::LeviComposition;

/// The signed coefficient of `λ^{n_b - k}` in `det(λI - X_b)` for block `b`
/// (0-based). Homogeneous of degree `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockCoefficient {
    pub block: usize,
    pub k: usize,
}

/// A homogeneous polynomial in block coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    degree: usize,
    terms: Vec<(Rational, Vec<BlockCoefficient>)>,
}

impl Generator {
    pub fn coefficient(block: usize, k: usize) -> Self {
        Generator {
            degree: k,
            terms: vec![(Rational::one(), vec![BlockCoefficient { block, k }])],
        }
    }

    /// `self + c · Π factors`; the product must have the same degree.
    pub fn plus_product(&self, c: Rational, factors: Vec<BlockCoefficient>) -> Result<Self> {
        if factors.iter().map(|f| f.k).sum::<usize>() != self.degree {
            return Err(Error::InhomogeneousGenerator(self.degree));
        }
        let mut g = self.clone();
        g.terms.push((c, factors));
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, coeffs: &[RatVector]) -> Rational {
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors
                    .iter()
                    .fold(c.clone(), |acc, f| &acc * &coeffs[f.block][f.k])
            })
            .sum()
    }
}

/// A generating family of invariants for `l` (or `g`, when the Levi
/// composition is `(n)`), with everything needed to take gradients
/// against the trace form restricted to `l`.
#[derive(Debug, Clone)]
pub struct InvariantFamily {
    levi: LeviComposition,
    generators: Vec<Generator>,
    /// Basis indices spanning the ambient subalgebra (`l` or `g`).
    ambient: Vec<usize>,
    ambient_space: Subspace,
    gram_inverse: RatMatrix,
}

impl InvariantFamily {
    /// The basic invariants `p_1, ..., p_{n-1}` of `g = sl_n`, with
    /// `deg p_i = i + 1`.
    pub fn for_algebra(g: &SlAlgebra) -> Result<Self> {
        Self::for_levi(g, &LeviComposition::whole(g.n()))
    }

    /// Generators for the Levi factor of the given composition: every
    /// block coefficient except the trace of the last block.
    pub fn for_levi(g: &SlAlgebra, levi: &LeviComposition) -> Result<Self> {
        levi.check_rank(g.n())?;
        let last = levi.block_count() - 1;
        let generators = levi
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| (1..=size).map(move |k| (b, k)))
            .filter(|&(b, k)| !(b == last && k == 1))
            .map(|(b, k)| Generator::coefficient(b, k))
            .collect();
        Self::with_generators(g, levi, generators)
    }

    pub fn with_generators(
        g: &SlAlgebra,
        levi: &LeviComposition,
        generators: Vec<Generator>,
    ) -> Result<Self> {
        levi.check_rank(g.n())?;
        let ambient: Vec<usize> = (0..g.dim())
            .filter(|&k| match g.basis()[k] {
                crate::algebra::BasisVector::Root(r) => levi.same_block(r.i, r.j),
                crate::algebra::BasisVector::Coroot(_) => true,
            })
            .collect();
        let m = ambient.len();
        let mut gram = RatMatrix::zeros(m, m);
        for (a, &ia) in ambient.iter().enumerate() {
            for (b, &ib) in ambient.iter().enumerate() {
                gram[(a, b)] = g.gram()[(ia, ib)].clone();
            }
        }
        let gram_inverse = exact::inverse(&gram)?;
        Ok(InvariantFamily {
            levi: levi.clone(),
            generators,
            ambient_space: Subspace::coordinate(&ambient, g.dim()),
            ambient,
            gram_inverse,
        })
    }

    /// Returns a copy with generator `index` replaced.
    pub fn replace_generator(&self, index: usize, generator: Generator) -> Self {
        let mut f = self.clone();
        f.generators[index] = generator;
        f
    }

    /// Returns a copy without generator `index`.
    pub fn without_generator(&self, index: usize) -> Self {
        let mut f = self.clone();
        f.generators.remove(index);
        f
    }

    pub fn levi(&self) -> &LeviComposition {
        &self.levi
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.generators.iter().map(Generator::degree).collect()
    }

    /// The subalgebra the family lives on.
    pub fn ambient(&self) -> &Subspace {
        &self.ambient_space
    }

    fn max_degree(&self) -> usize {
        self.generators.iter().map(Generator::degree).max().unwrap_or(0)
    }

    fn block_coefficients(&self, g: &SlAlgebra, x: &[Rational]) -> RatVector2 {
        let m = g.to_matrix(&Element::from_coords(x.to_vec()));
        self.levi
            .blocks()
            .into_iter()
            .map(|range| {
                let (start, size) = (*range.start() - 1, range.clone().count());
                let mut b = RatMatrix::zeros(size, size);
                for i in 0..size {
                    for j in 0..size {
                        b[(i, j)] = m[(start + i, start + j)].clone();
                    }
                }
                // reorder so index k holds the degree-k coefficient
                let mut cp = exact::char_poly(&b).expect("square block");
                cp.reverse();
                cp
            })
            .collect()
    }

    /// Values of every generator at `x`.
    pub fn eval_all(&self, g: &SlAlgebra, x: &Element) -> RatVector {
        let coeffs = self.block_coefficients(g, x.coords());
        self.generators.iter().map(|p| p.eval(&coeffs)).collect()
    }

    pub fn eval(&self, g: &SlAlgebra, index: usize, x: &Element) -> Rational {
        let coeffs = self.block_coefficients(g, x.coords());
        self.generators[index].eval(&coeffs)
    }

    /// The `t`-linear coefficient of `φ(x + t v)`, from `deg φ + 1` nodes.
    pub fn directional_derivative(
        &self,
        g: &SlAlgebra,
        index: usize,
        x: &Element,
        v: &Element,
    ) -> Rational {
        let d = self.generators[index].degree;
        let nodes = exact::integer_nodes(d + 1);
        let values: RatVector = nodes
            .iter()
            .map(|t| self.eval(g, index, &x.combine(&Rational::one(), v, t)))
            .collect();
        let c = exact::interpolate_scalar(&nodes, &values).expect("distinct nodes");
        c.get(1).cloned().unwrap_or_else(Rational::zero)
    }

    /// Gradients of every generator at `x`, as elements of the ambient
    /// subalgebra: `<ε(x), v> = φ'(x)(v)` for all ambient `v`.
    pub fn gradients(&self, g: &SlAlgebra, x: &Element) -> Vec<Element> {
        let dmax = self.max_degree();
        let nodes = exact::integer_nodes(dmax + 1);
        // derivative[generator][ambient direction]
        let mut derivative = vec![vec![Rational::zero(); self.ambient.len()]; self.generators.len()];
        for (a, &dir) in self.ambient.iter().enumerate() {
            let samples: Vec<RatVector> = nodes
                .iter()
                .map(|t| {
                    let mut p = x.coords().to_vec();
                    p[dir] += t;
                    let coeffs = self.block_coefficients(g, &p);
                    self.generators.iter().map(|gen| gen.eval(&coeffs)).collect()
                })
                .collect();
            for (i, gen) in self.generators.iter().enumerate() {
                let d = gen.degree;
                let values: RatVector = samples[..=d].iter().map(|s| s[i].clone()).collect();
                let c = exact::interpolate_scalar(&nodes[..=d], &values).expect("distinct nodes");
                if let Some(c1) = c.get(1) {
                    derivative[i][a] = c1.clone();
                }
            }
        }
        derivative
            .into_iter()
            .map(|dv| self.lift(&self.gram_inverse.mul_vec(&dv).expect("square gram")))
            .collect()
    }

    fn lift(&self, ambient_coords: &[Rational]) -> Element {
        let mut v = vec![Rational::zero(); self.ambient_space.ambient_dim()];
        for (&k, c) in self.ambient.iter().zip(ambient_coords) {
            v[k] = c.clone();
        }
        Element::from_coords(v)
    }

    pub fn gradient(&self, g: &SlAlgebra, index: usize, x: &Element) -> Element {
        let mut all = self.gradients(g, x);
        all.swap_remove(index)
    }

    pub fn polarize(&self, g: &SlAlgebra, index: usize, x: &Element, y: &Element) -> PolarizationTable {
        let d = self.generators[index].degree;
        let line = |t: &Rational| x.combine(&Rational::one(), y, t);
        let nodes = exact::integer_nodes(d + 1);
        let values: RatVector = nodes.iter().map(|t| self.eval(g, index, &line(t))).collect();
        let scalars = exact::interpolate_scalar(&nodes, &values).expect("distinct nodes");
        let vnodes = &nodes[..d];
        let vvalues: Vec<RatVector> = vnodes
            .iter()
            .map(|t| self.gradient(g, index, &line(t)).into_coords())
            .collect();
        let vectors = exact::vandermonde_solve(vnodes, &vvalues)
            .expect("distinct nodes")
            .into_iter()
            .map(Element::from_coords)
            .collect();
        PolarizationTable {
            degree: d,
            scalars,
            vectors,
        }
    }

    /// All polarized gradient vectors `ε_i^{(m)}(x, y)`, `m < d_i`, grouped
    /// by generator.
    pub fn polarized_gradients(&self, g: &SlAlgebra, x: &Element, y: &Element) -> Vec<Vec<Element>> {
        let dmax = self.max_degree();
        if dmax == 0 {
            return Vec::new();
        }
        let nodes = exact::integer_nodes(dmax);
        let samples: Vec<Vec<Element>> = nodes
            .iter()
            .map(|t| self.gradients(g, &x.combine(&Rational::one(), y, t)))
            .collect();
        self.generators
            .iter()
            .enumerate()
            .map(|(i, gen)| {
                let d = gen.degree;
                let values: Vec<RatVector> =
                    samples[..d].iter().map(|s| s[i].coords().to_vec()).collect();
                exact::vandermonde_solve(&nodes[..d], &values)
                    .expect("distinct nodes")
                    .into_iter()
                    .map(Element::from_coords)
                    .collect()
            })
            .collect()
    }

    /// `V_{x,y}`: the span of every polarized gradient.
    pub fn v_space(&self, g: &SlAlgebra, x: &Element, y: &Element) -> Subspace {
        let vectors: Vec<RatVector> = self
            .polarized_gradients(g, x, y)
            .into_iter()
            .flatten()
            .map(Element::into_coords)
            .collect();
        Subspace::span(&vectors, g.dim()).expect("vectors live in g")
    }
}

type RatVector2 = Vec<RatVector>;

/// Polarization coefficients of one generator along the line `x + t y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationTable {
    pub degree: usize,
    /// `p^{(m)}(x, y)` for `m = 0..=d`: `p(ax + by) = Σ a^{d-m} b^m p^{(m)}`.
    pub scalars: RatVector,
    /// `ε^{(m)}(x, y)` for `m = 0..d`.
    pub vectors: Vec<Element>,
}

fn check_index(g: &SlAlgebra, i: usize) -> Result<()> {
    if i == 0 || i >= g.n() {
        return Err(Error::InvariantIndex {
            index: i,
            max: g.n() - 1,
        });
    }
    Ok(())
}

/// `p_i(x)`, the signed coefficient of `λ^{n-i-1}` in `det(λI - X)`.
pub fn eval_invariant(g: &SlAlgebra, i: usize, x: &Element) -> Result<Rational> {
    check_index(g, i)?;
    let mut cp = exact::char_poly(&g.to_matrix(x))?;
    Ok(cp.swap_remove(g.n() - i - 1))
}

/// `p_i'(x)(v)`.
pub fn directional_derivative(g: &SlAlgebra, i: usize, x: &Element, v: &Element) -> Result<Rational> {
    check_index(g, i)?;
    let nodes = exact::integer_nodes(i + 2);
    let values: Result<RatVector> = nodes
        .iter()
        .map(|t| eval_invariant(g, i, &x.combine(&Rational::one(), v, t)))
        .collect();
    let c = exact::interpolate_scalar(&nodes, &values?)?;
    Ok(c[1].clone())
}

/// `ε_i(x)`: the unique element with `<ε_i(x), v> = p_i'(x)(v)` for all `v`,
/// from an exact solve of the Gram system.
pub fn epsilon(g: &SlAlgebra, i: usize, x: &Element) -> Result<Element> {
    check_index(g, i)?;
    let rhs: Result<RatVector> = (0..g.dim())
        .map(|k| directional_derivative(g, i, x, &g.basis_element(k)))
        .collect();
    let coords = exact::solve_linear(g.gram(), &rhs?)?;
    g.element(coords)
}

pub fn polarize(g: &SlAlgebra, i: usize, x: &Element, y: &Element) -> Result<PolarizationTable> {
    check_index(g, i)?;
    Ok(InvariantFamily::for_algebra(g)?.polarize(g, i - 1, x, y))
}

pub fn v_space(g: &SlAlgebra, x: &Element, y: &Element) -> Result<Subspace> {
    Ok(InvariantFamily::for_algebra(g)?.v_space(g, x, y))
}

pub fn levi_invariants(g: &SlAlgebra, levi: &LeviComposition) -> Result<InvariantFamily> {
    InvariantFamily::for_levi(g, levi)
}

/// `V^l_{x̃,ỹ}` for the given Levi family.
pub fn v_space_levi(
    g: &SlAlgebra,
    family: &InvariantFamily,
    x: &LeviElement,
    y: &LeviElement,
) -> Result<Subspace> {
    for z in [x, y] {
        if !family.ambient().contains(z.as_element().coords()) {
            return Err(Error::NotInSubspace("l"));
        }
    }
    Ok(family.v_space(g, x.as_element(), y.as_element()))
}
