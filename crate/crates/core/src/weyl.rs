//! Type A root system and Weyl group.
//!
//! Roots are index pairs `(i, j)` standing for `e_i - e_j`, the Weyl group
//! is the symmetric group acting by relabeling indices, and a standard
//! Levi subalgebra is described by a composition of `n` into consecutive
//! blocks.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_RANK: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("n = {0} is outside the supported range 2..={MAX_RANK}")]
    RankOutOfRange(usize),
    #[error("composition {parts:?} sums to {sum}, expected {n}")]
    CompositionMismatch { parts: Vec<usize>, sum: usize, n: usize },
    #[error("composition parts must be positive")]
    EmptyPart,
    #[error("invalid composition `{0}`")]
    Parse(String),
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),
}

/// The root `e_i - e_j`, 1-based, `i != j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i != j && i > 0 && j > 0, "invalid root ({i}, {j})");
        Root { i, j }
    }

    pub fn is_positive(self) -> bool {
        self.i < self.j
    }

    pub fn negate(self) -> Root {
        Root {
            i: self.j,
            j: self.i,
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

pub fn positive_roots(n: usize) -> Vec<Root> {
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| Root::new(i, j)))
        .collect()
}

pub fn all_roots(n: usize) -> Vec<Root> {
    (1..=n)
        .flat_map(|i| (1..=n).filter(move |&j| j != i).map(move |j| Root::new(i, j)))
        .collect()
}

pub fn simple_roots(n: usize) -> Vec<Root> {
    (1..n).map(|i| Root::new(i, i + 1)).collect()
}

/// A Weyl group element as a permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElement {
    perm: Vec<usize>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement {
            perm: (1..=n).collect(),
        }
    }

    /// `images[k-1] = w(k)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, WeylError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || seen[x] {
                return Err(WeylError::NotAPermutation(n));
            }
            seen[x] = true;
        }
        Ok(WeylElement { perm: images })
    }

    /// The simple reflection `s_i` swapping `i` and `i + 1`.
    pub fn simple_reflection(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i < n);
        let mut w = Self::identity(n);
        w.perm.swap(i - 1, i);
        w
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, k: usize) -> usize {
        self.perm[k - 1]
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        WeylElement {
            perm: other.perm.iter().map(|&k| self.apply(k)).collect(),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut inv = vec![0; self.n()];
        for (k, &w) in self.perm.iter().enumerate() {
            inv[w - 1] = k + 1;
        }
        WeylElement { perm: inv }
    }

    /// Inversion count.
    pub fn length(&self) -> usize {
        let p = &self.perm;
        (0..p.len())
            .map(|a| (a + 1..p.len()).filter(|&b| p[a] > p[b]).count())
            .sum()
    }

    /// A reduced word `[i_1, ..., i_k]` with `self = s_{i_1} ⋯ s_{i_k}`,
    /// obtained by bubble-sorting the one-line notation.
    pub fn reduced_word(&self) -> Vec<usize> {
        // Each adjacent swap at positions (i, i+1) right-multiplies by s_i,
        // so sorting gives w·s_{a_1}⋯s_{a_k} = id and w = s_{a_k}⋯s_{a_1}.
        let mut p = self.perm.clone();
        let mut swaps = Vec::new();
        let n = p.len();
        for pass in 0..n {
            for i in 0..n.saturating_sub(1 + pass) {
                if p[i] > p[i + 1] {
                    p.swap(i, i + 1);
                    swaps.push(i + 1);
                }
            }
        }
        swaps.reverse();
        swaps
    }

    pub fn from_word(n: usize, word: &[usize]) -> Self {
        word.iter().fold(Self::identity(n), |acc, &i| {
            acc.compose(&Self::simple_reflection(n, i))
        })
    }

    pub fn act(&self, r: Root) -> Root {
        Root::new(self.apply(r.i), self.apply(r.j))
    }

    pub fn act_set<'a>(&self, roots: impl IntoIterator<Item = &'a Root>) -> BTreeSet<Root> {
        roots.into_iter().map(|&r| self.act(r)).collect()
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.perm.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

/// Free-function form of [`WeylElement::act`].
pub fn act(w: &WeylElement, r: Root) -> Root {
    w.act(r)
}

/// Every element of `S_n` in lexicographic order of one-line notation.
pub fn enumerate_weyl(n: usize) -> Result<Vec<WeylElement>, WeylError> {
    if !(1..=MAX_RANK).contains(&n) {
        return Err(WeylError::RankOutOfRange(n));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    permute(n, &mut cur, &mut used, &mut out);
    Ok(out)
}

fn permute(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<WeylElement>) {
    if cur.len() == n {
        out.push(WeylElement { perm: cur.clone() });
        return;
    }
    for x in 1..=n {
        if !used[x] {
            used[x] = true;
            cur.push(x);
            permute(n, cur, used, out);
            cur.pop();
            used[x] = false;
        }
    }
}

/// Block sizes `(n_1, ..., n_r)` of a standard Levi subalgebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LeviComposition {
    parts: Vec<usize>,
}

impl LeviComposition {
    pub fn new(parts: Vec<usize>) -> Result<Self, WeylError> {
        if parts.contains(&0) {
            return Err(WeylError::EmptyPart);
        }
        if parts.is_empty() {
            return Err(WeylError::Parse(String::new()));
        }
        Ok(LeviComposition { parts })
    }

    pub fn for_rank(parts: Vec<usize>, n: usize) -> Result<Self, WeylError> {
        let c = Self::new(parts)?;
        c.check_rank(n)?;
        Ok(c)
    }

    /// `(1, ..., 1)`: the Borel subalgebra.
    pub fn borel(n: usize) -> Self {
        LeviComposition { parts: vec![1; n] }
    }

    /// `(n)`: the whole algebra.
    pub fn whole(n: usize) -> Self {
        LeviComposition { parts: vec![n] }
    }

    pub fn check_rank(&self, n: usize) -> Result<(), WeylError> {
        if self.n() != n {
            return Err(WeylError::CompositionMismatch {
                parts: self.parts.clone(),
                sum: self.n(),
                n,
            });
        }
        Ok(())
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn block_count(&self) -> usize {
        self.parts.len()
    }

    /// 1-based index ranges of the blocks.
    pub fn blocks(&self) -> Vec<std::ops::RangeInclusive<usize>> {
        let mut start = 1;
        self.parts
            .iter()
            .map(|&p| {
                let r = start..=start + p - 1;
                start += p;
                r
            })
            .collect()
    }

    /// 0-based block index of the 1-based position `k`.
    pub fn block_of(&self, k: usize) -> usize {
        let mut end = 0;
        for (b, &p) in self.parts.iter().enumerate() {
            end += p;
            if k <= end {
                return b;
            }
        }
        panic!("position {k} outside composition of {}", self.n());
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.block_of(i) == self.block_of(j)
    }

    pub fn is_borel(&self) -> bool {
        self.parts.iter().all(|&p| p == 1)
    }

    pub fn is_whole(&self) -> bool {
        self.parts.len() == 1
    }
}

impl fmt::Display for LeviComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for LeviComposition {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse()).collect();
        let parts = parts.map_err(|_| WeylError::Parse(s.to_string()))?;
        Self::new(parts)
    }
}

/// All compositions of `n`, in lexicographic order of their part lists.
pub fn compositions(n: usize) -> Vec<LeviComposition> {
    fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<LeviComposition>) {
        if rest == 0 {
            out.push(LeviComposition { parts: cur.clone() });
            return;
        }
        for first in 1..=rest {
            cur.push(first);
            rec(rest - first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, &mut Vec::new(), &mut out);
    }
    out
}

/// Membership test for the parabolic subgroup `W_ℓ`.
#[derive(Debug, Clone)]
pub struct LeviSubgroup {
    levi: LeviComposition,
}

impl LeviSubgroup {
    pub fn contains(&self, w: &WeylElement) -> bool {
        (1..=w.n()).all(|k| self.levi.same_block(k, w.apply(k)))
    }

    pub fn elements(&self) -> Vec<WeylElement> {
        enumerate_weyl(self.levi.n())
            .expect("composition rank already validated")
            .into_iter()
            .filter(|w| self.contains(w))
            .collect()
    }
}

/// `W_ℓ` for the given composition: the permutations preserving each block.
pub fn weyl_subgroup(levi: &LeviComposition) -> LeviSubgroup {
    LeviSubgroup { levi: levi.clone() }
}

/// `R_ℓ`: roots with both indices in the same block.
pub fn levi_roots(levi: &LeviComposition) -> BTreeSet<Root> {
    all_roots(levi.n())
        .into_iter()
        .filter(|r| levi.same_block(r.i, r.j))
        .collect()
}

/// `R'_+`: positive roots whose root space lies in the nilradical.
pub fn r_prime_plus(levi: &LeviComposition) -> BTreeSet<Root> {
    positive_roots(levi.n())
        .into_iter()
        .filter(|r| !levi.same_block(r.i, r.j))
        .collect()
}

/// `R_ℓ ∪ R'_+`, the roots of the standard parabolic.
pub fn parabolic_roots(levi: &LeviComposition) -> BTreeSet<Root> {
    let mut s = levi_roots(levi);
    s.extend(r_prime_plus(levi));
    s
}

/// `|W / W_ℓ|` by explicit enumeration of the left cosets `w W_ℓ`.
pub fn coset_count(levi: &LeviComposition) -> Result<usize, WeylError> {
    let sub = weyl_subgroup(levi).elements();
    let mut cosets: HashSet<BTreeSet<WeylElement>> = HashSet::new();
    for w in enumerate_weyl(levi.n())? {
        cosets.insert(sub.iter().map(|u| w.compose(u)).collect());
    }
    Ok(cosets.len())
}

/// `n! / Π n_i!`.
pub fn multinomial(levi: &LeviComposition) -> usize {
    let fact = |k: usize| (1..=k).product::<usize>();
    fact(levi.n()) / levi.parts().iter().map(|&p| fact(p)).product::<usize>()
}
