//! Standard parabolic subalgebras `p = l ⊕ p_u` of `sl_n`, the projection
//! `ϖ: p → l`, and seeded sampling of rational points in subspaces.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BasisVector, Element, SlAlgebra};
use crate::error::{Error, Result};
use crate::exact::{self, RatMatrix, RatVector, Rational, Subspace};
use crate::weyl::{self, LeviComposition, Root};

/// Default bound on sampled integer coefficients.
pub const DEFAULT_BOUND: i64 = 9;
/// Attempts before a sampler reports [`Error::DegenerateSampling`].
pub const MAX_RESAMPLES: usize = 100;

/// An element of the Levi factor `l`, kept in `sl_n` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LeviElement(Element);

impl LeviElement {
    /// Wraps `x` without checking membership in `l`.
    #[doc(hidden)]
    pub fn from_element_unchecked(x: Element) -> Self {
        LeviElement(x)
    }

    pub fn as_element(&self) -> &Element {
        &self.0
    }

    pub fn into_element(self) -> Element {
        self.0
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicData {
    levi: LeviComposition,
    p: Subspace,
    l: Subspace,
    pu: Subspace,
    pminus: Subspace,
    pminus_u: Subspace,
    r_l: BTreeSet<Root>,
    r_prime_plus: BTreeSet<Root>,
    b_g: usize,
    b_l: usize,
    /// Basis indices of `p_u` when it is the standard coordinate subspace;
    /// `None` after [`ParabolicData::with_radical`].
    standard_pu: Option<Vec<usize>>,
}

pub fn build_parabolic(g: &SlAlgebra, levi: &LeviComposition) -> Result<ParabolicData> {
    ParabolicData::new(g, levi)
}

impl ParabolicData {
    pub fn new(g: &SlAlgebra, levi: &LeviComposition) -> Result<Self> {
        levi.check_rank(g.n())?;
        let d = g.dim();
        let (mut l_idx, mut pu_idx, mut pmu_idx) = (Vec::new(), Vec::new(), Vec::new());
        for (k, b) in g.basis().iter().enumerate() {
            match *b {
                BasisVector::Coroot(_) => l_idx.push(k),
                BasisVector::Root(r) if levi.same_block(r.i, r.j) => l_idx.push(k),
                BasisVector::Root(r) if r.is_positive() => pu_idx.push(k),
                BasisVector::Root(_) => pmu_idx.push(k),
            }
        }
        let l = Subspace::coordinate(&l_idx, d);
        let pu = Subspace::coordinate(&pu_idx, d);
        let pminus_u = Subspace::coordinate(&pmu_idx, d);
        let p = l.sum(&pu)?;
        let pminus = l.sum(&pminus_u)?;
        let b_l = g.rank()
            + levi
                .parts()
                .iter()
                .map(|&k| k * (k - 1) / 2)
                .sum::<usize>();
        Ok(ParabolicData {
            levi: levi.clone(),
            p,
            l,
            pu,
            pminus,
            pminus_u,
            r_l: weyl::levi_roots(levi),
            r_prime_plus: weyl::r_prime_plus(levi),
            b_g: g.borel_dim(),
            b_l,
            standard_pu: Some(pu_idx),
        })
    }

    /// Replaces the nilradical by an arbitrary complement candidate `r`
    /// (so `p` becomes `l + r`). Only meaningful for harness self-tests,
    /// where it produces a deliberately wrong parabolic.
    #[doc(hidden)]
    pub fn with_radical(&self, r: Subspace) -> Result<ParabolicData> {
        let p = self.l.sum(&r)?;
        Ok(ParabolicData {
            p,
            pu: r,
            standard_pu: None,
            ..self.clone()
        })
    }

    pub fn levi(&self) -> &LeviComposition {
        &self.levi
    }

    pub fn p(&self) -> &Subspace {
        &self.p
    }

    pub fn l(&self) -> &Subspace {
        &self.l
    }

    pub fn pu(&self) -> &Subspace {
        &self.pu
    }

    pub fn pminus(&self) -> &Subspace {
        &self.pminus
    }

    pub fn pminus_u(&self) -> &Subspace {
        &self.pminus_u
    }

    pub fn r_l(&self) -> &BTreeSet<Root> {
        &self.r_l
    }

    pub fn r_prime_plus(&self) -> &BTreeSet<Root> {
        &self.r_prime_plus
    }

    /// `dim b`.
    pub fn b_g(&self) -> usize {
        self.b_g
    }

    /// Dimension of a Borel subalgebra of `l`.
    pub fn b_l(&self) -> usize {
        self.b_l
    }

    /// `ϖ(x)`: the `l`-component of `x ∈ p` along `p_u`.
    pub fn varpi(&self, x: &Element) -> Result<LeviElement> {
        if !self.p.contains(x.coords()) {
            return Err(Error::NotInSubspace("p"));
        }
        Ok(LeviElement(Element::from_coords(self.project(x.coords())?)))
    }

    fn project(&self, v: &[Rational]) -> Result<RatVector> {
        if let Some(pu_idx) = &self.standard_pu {
            let mut out = v.to_vec();
            for &k in pu_idx {
                out[k] = Rational::zero();
            }
            return Ok(out);
        }
        // v = a·L + b·R; solve on the stacked basis and keep a·L
        let stacked: Vec<RatVector> = self
            .l
            .basis_vectors()
            .chain(self.pu.basis_vectors())
            .map(<[Rational]>::to_vec)
            .collect();
        let m = RatMatrix::from_columns(&stacked, v.len())?;
        let coef = exact::solve_linear(&m, v)?;
        let mut out = vec![Rational::zero(); v.len()];
        for (c, row) in coef.iter().zip(self.l.basis_vectors()) {
            exact::axpy(&mut out, c, row);
        }
        Ok(out)
    }

    /// `ϖ(V)` for a subspace `V ⊆ p`.
    pub fn varpi_subspace(&self, v: &Subspace) -> Result<Subspace> {
        if !self.p.contains_subspace(v) {
            return Err(Error::NotInSubspace("p"));
        }
        let images: Result<Vec<RatVector>> = v.basis_vectors().map(|b| self.project(b)).collect();
        Ok(Subspace::span(&images?, v.ambient_dim())?)
    }

    /// `l^z`: the centralizer in `l` of `z ∈ l`, in `sl_n` coordinates.
    pub fn l_centralizer(&self, g: &SlAlgebra, z: &Element) -> Result<Subspace> {
        if !self.l.contains(z.coords()) {
            return Err(Error::NotInSubspace("l"));
        }
        let lb: Vec<Element> = self
            .l
            .basis_vectors()
            .map(|b| Element::from_coords(b.to_vec()))
            .collect();
        let columns: Vec<RatVector> = lb.iter().map(|b| g.bracket(z, b).into_coords()).collect();
        let m = RatMatrix::from_columns(&columns, g.dim())?;
        let ker = exact::kernel(&m);
        let vectors: Vec<RatVector> = ker
            .basis_vectors()
            .map(|c| {
                let mut v = vec![Rational::zero(); g.dim()];
                for (ck, b) in c.iter().zip(&lb) {
                    exact::axpy(&mut v, ck, b.coords());
                }
                v
            })
            .collect();
        Ok(Subspace::span(&vectors, g.dim())?)
    }

    /// Regular in `l`: `dim l^z = rk g`.
    pub fn is_l_regular(&self, g: &SlAlgebra, z: &Element) -> Result<bool> {
        Ok(self.l_centralizer(g, z)?.dim() == g.rank())
    }

    /// `x ∈ R_p`: `x` is regular in `g` and `ϖ(x)` is regular in `l`.
    pub fn in_r_p(&self, g: &SlAlgebra, x: &Element) -> Result<bool> {
        let lx = self.varpi(x)?;
        Ok(g.is_regular(x) && self.is_l_regular(g, lx.as_element())?)
    }

    /// `x ∈ R'_p`: `x ∈ R_p` and `g^x ∩ p_u = 0`.
    pub fn in_r_prime_p(&self, g: &SlAlgebra, x: &Element) -> Result<bool> {
        if !self.in_r_p(g, x)? {
            return Ok(false);
        }
        Ok(g.centralizer(x).intersection(&self.pu)?.is_zero())
    }
}

/// Integer combination of the subspace basis with coefficients in
/// `[-bound, bound]`, resampled until nonzero.
pub fn sample_in<R: Rng + ?Sized>(space: &Subspace, rng: &mut R, bound: i64) -> Result<Element> {
    if space.is_zero() {
        return Err(Error::EmptySampleSpace);
    }
    let bound = bound.max(1);
    for _ in 0..MAX_RESAMPLES {
        let mut v = vec![Rational::zero(); space.ambient_dim()];
        for row in space.basis_vectors() {
            let c = Rational::from_int(rng.gen_range(-bound..=bound));
            exact::axpy(&mut v, &c, row);
        }
        if !exact::is_zero_vector(&v) {
            return Ok(Element::from_coords(v));
        }
    }
    Err(Error::DegenerateSampling {
        what: "nonzero vector",
        attempts: MAX_RESAMPLES,
    })
}

/// Like [`sample_in`] but with every basis coefficient drawn from
/// `[-bound, bound] \ {0}`, so draws never lie on a coordinate hyperplane
/// of the basis.
pub fn sample_punctured<R: Rng + ?Sized>(space: &Subspace, rng: &mut R, bound: i64) -> Result<Element> {
    if space.is_zero() {
        return Err(Error::EmptySampleSpace);
    }
    let bound = bound.max(1);
    let mut v = vec![Rational::zero(); space.ambient_dim()];
    for row in space.basis_vectors() {
        let c = rng.gen_range(1..=bound) * if rng.gen_bool(0.5) { 1 } else { -1 };
        exact::axpy(&mut v, &Rational::from_int(c), row);
    }
    Ok(Element::from_coords(v))
}

/// Draws until `accept` holds, up to [`MAX_RESAMPLES`] attempts.
pub fn sample_until<R, F>(
    space: &Subspace,
    rng: &mut R,
    bound: i64,
    what: &'static str,
    mut accept: F,
) -> Result<Element>
where
    R: Rng + ?Sized,
    F: FnMut(&Element) -> Result<bool>,
{
    for _ in 0..MAX_RESAMPLES {
        let x = sample_in(space, rng, bound)?;
        if accept(&x)? {
            return Ok(x);
        }
    }
    Err(Error::DegenerateSampling {
        what,
        attempts: MAX_RESAMPLES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_sl;
    use crate::weyl::compositions;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(x: i64) -> Rational {
        Rational::from_int(x)
    }

    fn levi(parts: &[usize]) -> LeviComposition {
        LeviComposition::new(parts.to_vec()).unwrap()
    }

    fn basis_elements(s: &Subspace) -> Vec<Element> {
        s.basis_vectors().map(|b| Element::from_coords(b.to_vec())).collect()
    }

    #[test]
    fn dimension_examples() {
        let g = build_sl(3).unwrap();
        let b = build_parabolic(&g, &levi(&[1, 1, 1])).unwrap();
        assert_eq!((b.p().dim(), b.pu().dim(), b.b_l()), (5, 3, 2));
        assert_eq!(b.p(), &g.borel());
        let p = build_parabolic(&g, &levi(&[2, 1])).unwrap();
        assert_eq!((p.p().dim(), p.pu().dim(), p.b_l()), (6, 2, 3));
        assert_eq!(p.b_g(), p.b_l() + p.pu().dim());
        let g4 = build_sl(4).unwrap();
        let p = build_parabolic(&g4, &levi(&[2, 2])).unwrap();
        assert_eq!((p.pu().dim(), p.b_l(), p.b_g()), (4, 5, 9));
        assert!(build_parabolic(&g, &levi(&[2, 2])).is_err());
    }

    #[test]
    fn structural_identities() {
        for n in 2..=5 {
            let g = build_sl(n).unwrap();
            for c in compositions(n) {
                let p = build_parabolic(&g, &c).unwrap();
                assert_eq!(p.b_g(), p.b_l() + p.pu().dim(), "{c}");
                assert_eq!(p.p().dim(), p.l().dim() + p.pu().dim());
                assert!(p.l().intersection(p.pu()).unwrap().is_zero());
                assert_eq!(&p.p().intersection(p.pminus()).unwrap(), p.l());
                assert_eq!(p.p().sum(p.pminus()).unwrap(), Subspace::full(g.dim()));
                assert_eq!(p.r_prime_plus().len(), p.pu().dim());
                assert_eq!(p.r_l().len() + g.rank(), p.l().dim());
            }
        }
    }

    #[test]
    fn ideal_and_subalgebra_closure() {
        for n in 2..=4 {
            let g = build_sl(n).unwrap();
            for c in compositions(n) {
                let p = build_parabolic(&g, &c).unwrap();
                let (pb, ub, lb) = (basis_elements(p.p()), basis_elements(p.pu()), basis_elements(p.l()));
                for x in &pb {
                    for u in &ub {
                        assert!(p.pu().contains(g.bracket(x, u).coords()));
                    }
                }
                for x in &lb {
                    for y in &lb {
                        assert!(p.l().contains(g.bracket(x, y).coords()));
                    }
                }
            }
        }
    }

    #[test]
    fn varpi_examples() {
        let g = build_sl(3).unwrap();
        let p = build_parabolic(&g, &levi(&[2, 1])).unwrap();
        let x = &g.root_vector(1, 2) + &g.root_vector(1, 3);
        assert_eq!(p.varpi(&x).unwrap().as_element(), &g.root_vector(1, 2));
        let h = g.coroot(2);
        assert_eq!(p.varpi(&h).unwrap().into_element(), h);
        assert!(p.varpi(&g.root_vector(2, 3)).unwrap().as_element().is_zero());
        assert_eq!(p.varpi(&g.root_vector(3, 1)), Err(Error::NotInSubspace("p")));
    }

    #[test]
    fn varpi_is_a_lie_morphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            let g = build_sl(n).unwrap();
            for c in compositions(n) {
                let p = build_parabolic(&g, &c).unwrap();
                for _ in 0..10 {
                    let x = sample_in(p.p(), &mut rng, 9).unwrap();
                    let y = sample_in(p.p(), &mut rng, 9).unwrap();
                    let lhs = p.varpi(&g.bracket(&x, &y)).unwrap().into_element();
                    let (vx, vy) = (p.varpi(&x).unwrap(), p.varpi(&y).unwrap());
                    assert_eq!(lhs, g.bracket(vx.as_element(), vy.as_element()));
                    assert!(p.pu().contains((&x - vx.as_element()).coords()));
                }
            }
        }
    }

    #[test]
    fn nonstandard_radical_projection() {
        let g = build_sl(3).unwrap();
        let p = build_parabolic(&g, &levi(&[2, 1])).unwrap();
        let (e13, e23, h1) = (g.root_vector(1, 3), g.root_vector(2, 3), g.coroot(1));
        let r = Subspace::span(&[(&e13 + &h1).into_coords(), e23.into_coords()], g.dim()).unwrap();
        let m = p.with_radical(r).unwrap();
        // e13 = (e13 + h1) - h1
        assert_eq!(m.varpi(&e13).unwrap().into_element(), h1.scale(&q(-1)));
        let img = m.varpi_subspace(m.pu()).unwrap();
        assert!(img.is_zero());
    }

    #[test]
    fn sampler_contract() {
        let g = build_sl(4).unwrap();
        let p = build_parabolic(&g, &levi(&[2, 1, 1])).unwrap();
        let draw = |seed| sample_in(p.p(), &mut ChaCha8Rng::seed_from_u64(seed), 9).unwrap();
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = sample_in(p.pu(), &mut rng, 1).unwrap();
            assert!(!x.is_zero());
            assert!(p.pu().contains(x.coords()));
            assert!(x.coords().iter().all(|c| c.abs() <= q(1)));
        }
        assert_eq!(
            sample_in(&Subspace::zero(3), &mut rng, 9),
            Err(Error::EmptySampleSpace)
        );
        for _ in 0..50 {
            let x = sample_punctured(p.pu(), &mut rng, 2).unwrap();
            assert!(p.pu().contains(x.coords()));
            for &k in p.pu().pivots() {
                assert!(!x.coords()[k].is_zero() && x.coords()[k].abs() <= q(2));
            }
        }
        assert_eq!(
            sample_punctured(&Subspace::zero(3), &mut rng, 9),
            Err(Error::EmptySampleSpace)
        );
        let never = sample_until(p.p(), &mut rng, 9, "impossible", |_| Ok(false));
        assert!(matches!(never, Err(Error::DegenerateSampling { attempts: MAX_RESAMPLES, .. })));
    }

    #[test]
    fn r_prime_membership_examples() {
        let g = build_sl(3).unwrap();
        for c in compositions(3) {
            let p = build_parabolic(&g, &c).unwrap();
            let x = g.diagonal(&[q(1), q(2), q(-3)]).unwrap();
            assert!(p.in_r_prime_p(&g, &x).unwrap(), "{c}");
            assert!(!p.in_r_prime_p(&g, &g.zero()).unwrap());
        }
        let g2 = build_sl(2).unwrap();
        let b = build_parabolic(&g2, &LeviComposition::borel(2)).unwrap();
        let e = g2.root_vector(1, 2);
        assert!(b.in_r_p(&g2, &e).unwrap());
        assert!(!b.in_r_prime_p(&g2, &e).unwrap());
        assert!(b.in_r_prime_p(&g2, &g2.root_vector(2, 1)).is_err());
    }

    #[test]
    fn l_regularity() {
        let g = build_sl(4).unwrap();
        let p = build_parabolic(&g, &levi(&[2, 2])).unwrap();
        assert_eq!(p.l_centralizer(&g, &g.zero()).unwrap(), *p.l());
        let x = &g.root_vector(1, 2) + &g.root_vector(3, 4);
        assert!(p.is_l_regular(&g, &x).unwrap());
        // regular in l but not in g: the two nilpotent blocks
        assert!(!g.is_regular(&x));
        assert!(!p.is_l_regular(&g, &g.root_vector(1, 2)).unwrap());
        assert!(p.l_centralizer(&g, &g.root_vector(1, 3)).is_err());
    }

    #[test]
    fn richardson_examples() {
        let g = build_sl(2).unwrap();
        let b = build_parabolic(&g, &LeviComposition::borel(2)).unwrap();
        assert!(g.is_richardson(&g.root_vector(1, 2).scale(&q(-5)), &b).unwrap());
        let g = build_sl(3).unwrap();
        let p = build_parabolic(&g, &levi(&[2, 1])).unwrap();
        // minimal orbit: dim g^x = 4 = 8 - 2·2
        assert!(g.is_richardson(&g.root_vector(1, 3), &p).unwrap());
        let b = build_parabolic(&g, &LeviComposition::borel(3)).unwrap();
        assert!(!g.is_richardson(&g.root_vector(1, 3), &b).unwrap());
        assert!(g.is_richardson(&(&g.root_vector(1, 2) + &g.root_vector(2, 3)), &b).unwrap());
        assert!(g.is_richardson(&g.coroot(1), &b).is_err());
    }
}
