//! Named verification checks with structured, reproducible results.
//!
//! Randomized checks give every trial a private ChaCha8 stream derived
//! from `(seed, check, n, levi, trial)`, so results do not depend on
//! scheduling. A trial redraws when its sample falls outside the check's
//! domain or fails the genericity probe; those redraws are counted in
//! `rejected` and never as failures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, SlAlgebra};
use crate::error::{Error, Result};
use crate::exact::{Rational, Subspace};
use crate::invariants::InvariantFamily;
use crate::par::{self, Execution};
use crate::parabolic::{self, ParabolicData, DEFAULT_BOUND, MAX_RESAMPLES};
use crate::weyl::{self, LeviComposition, WeylElement};

/// Minimum fraction of `p_u` draws that must be Richardson.
pub const RICHARDSON_THRESHOLD: f64 = 0.9;
/// Regularity probes along the pencil `ax + by` per genericity test.
pub const GENERICITY_PROBES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    VxyInP,
    VxyEqB,
    VxyDecomposition,
    VarpiImage,
    CentralizerCriterion,
    WeylLemma,
    ParabolicConjugacy,
    FiberCardinality,
    RichardsonDensity,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::VxyInP,
        CheckId::VxyEqB,
        CheckId::VxyDecomposition,
        CheckId::VarpiImage,
        CheckId::CentralizerCriterion,
        CheckId::WeylLemma,
        CheckId::ParabolicConjugacy,
        CheckId::FiberCardinality,
        CheckId::RichardsonDensity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::VxyInP => "vxy_in_p",
            CheckId::VxyEqB => "vxy_eq_b",
            CheckId::VxyDecomposition => "vxy_decomposition",
            CheckId::VarpiImage => "varpi_image",
            CheckId::CentralizerCriterion => "centralizer_criterion",
            CheckId::WeylLemma => "weyl_lemma",
            CheckId::ParabolicConjugacy => "parabolic_conjugacy",
            CheckId::FiberCardinality => "fiber_cardinality",
            CheckId::RichardsonDensity => "richardson_density",
        }
    }

    /// Exhaustive checks ignore `samples` and `seed`.
    pub fn is_randomized(self) -> bool {
        !matches!(
            self,
            CheckId::WeylLemma | CheckId::ParabolicConjugacy | CheckId::FiberCardinality
        )
    }

    fn tag(self) -> u64 {
        CheckId::ALL.iter().position(|&c| c == self).unwrap() as u64
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown check `{0}`")]
pub struct UnknownCheck(pub String);

impl FromStr for CheckId {
    type Err = UnknownCheck;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCheck(s.to_string()))
    }
}

/// What went wrong, with enough data to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Pair { x: Element, y: Element, reason: String },
    Point { x: Element, reason: String },
    Permutation { perm: Vec<usize>, reason: String },
    Counts {
        cosets: usize,
        translates: usize,
        multinomial: usize,
    },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Master seed of the run.
    pub seed: u64,
    /// Trial index for randomized checks.
    pub trial: Option<usize>,
    /// Seed of the trial's private generator.
    pub trial_seed: Option<u64>,
    #[serde(flatten)]
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub n: usize,
    /// `None` when the check aggregates over every composition of `n`.
    pub levi: Option<LeviComposition>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    /// Draws discarded by domain or genericity filters.
    #[serde(default)]
    pub rejected: usize,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub elapsed_ms: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn failed_with(check_id: CheckId, n: usize, levi: Option<LeviComposition>, seed: u64, err: &Error) -> Self {
        CheckResult {
            check_id,
            n,
            levi,
            samples: None,
            seed,
            trials: 0,
            failures: 1,
            rejected: 0,
            witnesses: vec![Witness {
                seed,
                trial: None,
                trial_seed: None,
                evidence: Evidence::Error {
                    message: err.to_string(),
                },
            }],
            details: serde_json::Value::Null,
            elapsed_ms: 0.0,
        }
    }
}

/// Sampling parameters shared by the randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub samples: usize,
    pub seed: u64,
    pub bound: i64,
    pub execution: Execution,
}

impl Params {
    pub fn new(samples: usize, seed: u64) -> Self {
        Params {
            samples,
            seed,
            bound: DEFAULT_BOUND,
            execution: Execution::Parallel,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the private generator for one trial.
pub fn trial_seed(seed: u64, check: CheckId, levi: &LeviComposition, trial: usize) -> u64 {
    let words = [seed, check.tag(), levi.n() as u64]
        .into_iter()
        .chain(levi.parts().iter().map(|&p| p as u64))
        .chain([u64::MAX, trial as u64]);
    words.fold(0, |h, w| splitmix64(h ^ w))
}

/// Membership of `(x, y)` in `Ω_g`: the pair spans a plane and every
/// nonzero point of the pencil is regular. Random probes along the pencil
/// reject most degenerate pairs cheaply; survivors get the exact
/// certificate [`SlAlgebra::pencil_is_regular`].
pub fn is_generic_pair<R: Rng + ?Sized>(
    g: &SlAlgebra,
    x: &Element,
    y: &Element,
    rng: &mut R,
    bound: i64,
) -> bool {
    let plane = Subspace::span(&[x.coords(), y.coords()], g.dim()).expect("same algebra");
    if plane.dim() != 2 {
        return false;
    }
    let bound = bound.max(1);
    (0..GENERICITY_PROBES).all(|_| {
        let (a, b) = loop {
            let (a, b) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            if a != 0 || b != 0 {
                break (a, b);
            }
        };
        g.is_regular(&x.combine(&Rational::from_int(a), y, &Rational::from_int(b)))
    }) && g.pencil_is_regular(x, y)
}

enum Draw {
    Pass(Option<&'static str>),
    Reject,
    Fail(Evidence),
}

struct TrialOutcome {
    rejected: usize,
    label: Option<&'static str>,
    failure: Option<Witness>,
}

/// One `(n, levi)` grid cell with everything the checks need. The
/// `with_*`/`without_*` builders produce deliberately broken cells for
/// self-testing the harness.
#[derive(Debug, Clone)]
pub struct Cell {
    g: SlAlgebra,
    parabolic: ParabolicData,
    g_family: InvariantFamily,
    l_family: InvariantFamily,
}

impl Cell {
    pub fn new(levi: &LeviComposition) -> Result<Self> {
        let g = SlAlgebra::new(levi.n())?;
        let parabolic = parabolic::build_parabolic(&g, levi)?;
        let g_family = InvariantFamily::for_algebra(&g)?;
        let l_family = InvariantFamily::for_levi(&g, levi)?;
        Ok(Cell {
            g,
            parabolic,
            g_family,
            l_family,
        })
    }

    pub fn with_radical(mut self, r: Subspace) -> Result<Self> {
        self.parabolic = self.parabolic.with_radical(r)?;
        Ok(self)
    }

    pub fn without_g_generator(mut self, index: usize) -> Self {
        self.g_family = self.g_family.without_generator(index);
        self
    }

    pub fn without_levi_generator(mut self, index: usize) -> Self {
        self.l_family = self.l_family.without_generator(index);
        self
    }

    pub fn algebra(&self) -> &SlAlgebra {
        &self.g
    }

    pub fn parabolic(&self) -> &ParabolicData {
        &self.parabolic
    }

    pub fn levi(&self) -> &LeviComposition {
        self.parabolic.levi()
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// Runs one check on this cell.
    pub fn run(&self, check: CheckId, params: &Params) -> CheckResult {
        let start = Instant::now();
        let mut result = match check {
            CheckId::WeylLemma => self.exhaustive(check, params.seed, weyl_lemma_witnesses),
            CheckId::ParabolicConjugacy => {
                self.exhaustive(check, params.seed, conjugacy_witnesses)
            }
            CheckId::FiberCardinality => self.fiber_cardinality(params.seed),
            CheckId::VxyEqB if !self.levi().is_borel() => {
                let err = Error::NotInSubspace("a Borel cell; vxy_eq_b needs levi (1,...,1)");
                CheckResult::failed_with(check, self.n(), Some(self.levi().clone()), params.seed, &err)
            }
            CheckId::RichardsonDensity => self.richardson(params),
            _ => self.randomized(check, params),
        };
        result.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        result
    }

    fn exhaustive(
        &self,
        check: CheckId,
        seed: u64,
        witnesses: fn(&[WeylElement], &LeviComposition) -> Vec<Evidence>,
    ) -> CheckResult {
        let levi = self.levi().clone();
        let w = match weyl::enumerate_weyl(self.n()) {
            Ok(w) => w,
            Err(e) => return CheckResult::failed_with(check, self.n(), Some(levi), seed, &e.into()),
        };
        let evidence = witnesses(&w, &levi);
        CheckResult {
            check_id: check,
            n: self.n(),
            levi: Some(levi),
            samples: None,
            seed,
            trials: w.len(),
            failures: evidence.len(),
            rejected: 0,
            witnesses: exhaustive_witnesses(seed, evidence),
            details: serde_json::Value::Null,
            elapsed_ms: 0.0,
        }
    }

    fn fiber_cardinality(&self, seed: u64) -> CheckResult {
        let levi = self.levi().clone();
        let counts = match fiber_counts(&levi) {
            Ok(c) => c,
            Err(e) => return CheckResult::failed_with(CheckId::FiberCardinality, self.n(), Some(levi), seed, &e),
        };
        let ok = counts.cosets == counts.translates && counts.cosets == counts.multinomial;
        CheckResult {
            check_id: CheckId::FiberCardinality,
            n: self.n(),
            levi: Some(levi),
            samples: None,
            seed,
            trials: 1,
            failures: usize::from(!ok),
            rejected: 0,
            witnesses: if ok {
                Vec::new()
            } else {
                exhaustive_witnesses(
                    seed,
                    vec![Evidence::Counts {
                        cosets: counts.cosets,
                        translates: counts.translates,
                        multinomial: counts.multinomial,
                    }],
                )
            },
            details: serde_json::json!({
                "cosets": counts.cosets,
                "translates": counts.translates,
                "multinomial": counts.multinomial,
                "non_normal": counts.cosets > 1,
            }),
            elapsed_ms: 0.0,
        }
    }

    fn trials(&self, check: CheckId, params: &Params) -> Vec<TrialOutcome> {
        let indices: Vec<usize> = (0..params.samples).collect();
        par::map(params.execution, &indices, |&t| self.trial(check, params, t))
    }

    fn trial(&self, check: CheckId, params: &Params, t: usize) -> TrialOutcome {
        let ts = trial_seed(params.seed, check, self.levi(), t);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let witness = |evidence| Witness {
            seed: params.seed,
            trial: Some(t),
            trial_seed: Some(ts),
            evidence,
        };
        let mut rejected = 0;
        for attempt in 0..MAX_RESAMPLES {
            match self.draw(check, params.bound, &mut rng, attempt + t) {
                Ok(Draw::Pass(label)) => {
                    return TrialOutcome {
                        rejected,
                        label,
                        failure: None,
                    }
                }
                Ok(Draw::Reject) => rejected += 1,
                Ok(Draw::Fail(evidence)) => {
                    return TrialOutcome {
                        rejected,
                        label: None,
                        failure: Some(witness(evidence)),
                    }
                }
                Err(e) => {
                    return TrialOutcome {
                        rejected,
                        label: None,
                        failure: Some(witness(Evidence::Error {
                            message: e.to_string(),
                        })),
                    }
                }
            }
        }
        let err = Error::DegenerateSampling {
            what: "accepted draw",
            attempts: MAX_RESAMPLES,
        };
        TrialOutcome {
            rejected,
            label: None,
            failure: Some(witness(Evidence::Error {
                message: err.to_string(),
            })),
        }
    }

    fn randomized(&self, check: CheckId, params: &Params) -> CheckResult {
        let outcomes = self.trials(check, params);
        let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
        for o in &outcomes {
            if let Some(l) = o.label {
                *labels.entry(l).or_default() += 1;
            }
        }
        let witnesses: Vec<Witness> = outcomes.iter().filter_map(|o| o.failure.clone()).collect();
        CheckResult {
            check_id: check,
            n: self.n(),
            levi: Some(self.levi().clone()),
            samples: Some(params.samples),
            seed: params.seed,
            trials: outcomes.len(),
            failures: witnesses.len(),
            rejected: outcomes.iter().map(|o| o.rejected).sum(),
            witnesses,
            details: if labels.is_empty() {
                serde_json::Value::Null
            } else {
                serde_json::to_value(labels).expect("string keys")
            },
            elapsed_ms: 0.0,
        }
    }

    fn richardson(&self, params: &Params) -> CheckResult {
        let mut r = self.randomized(CheckId::RichardsonDensity, params);
        let misses = r.witnesses.len();
        let rate = if r.trials == 0 {
            1.0
        } else {
            (r.trials - misses) as f64 / r.trials as f64
        };
        let dense = rate >= RICHARDSON_THRESHOLD;
        r.failures = if dense { 0 } else { misses };
        r.details = serde_json::json!({
            "misses": misses,
            "pass_rate": rate,
            "threshold": RICHARDSON_THRESHOLD,
        });
        r
    }

    fn draw(&self, check: CheckId, bound: i64, rng: &mut ChaCha8Rng, salt: usize) -> Result<Draw> {
        let (g, p) = (&self.g, &self.parabolic);
        match check {
            CheckId::VxyInP => {
                let (x, y) = (parabolic::sample_in(p.p(), rng, bound)?, parabolic::sample_in(p.p(), rng, bound)?);
                let v = self.g_family.v_space(g, &x, &y);
                Ok(if p.p().contains_subspace(&v) {
                    Draw::Pass(None)
                } else {
                    Draw::Fail(Evidence::Pair { x, y, reason: "V_{x,y} is not contained in p".into() })
                })
            }
            CheckId::VxyEqB => {
                let b = g.borel();
                let (x, y) = (parabolic::sample_in(&b, rng, bound)?, parabolic::sample_in(&b, rng, bound)?);
                let v = self.g_family.v_space(g, &x, &y);
                if v == b {
                    return Ok(Draw::Pass(None));
                }
                self.filtered(x, y, rng, bound, format!("dim V_{{x,y}} = {}, V_{{x,y}} != b", v.dim()))
            }
            CheckId::VxyDecomposition => {
                let (x, y) = (parabolic::sample_in(p.p(), rng, bound)?, parabolic::sample_in(p.p(), rng, bound)?);
                let v = self.g_family.v_space(g, &x, &y);
                let (vx, vy) = (p.varpi(&x)?, p.varpi(&y)?);
                let vl = self.l_family.v_space(g, vx.as_element(), vy.as_element());
                let mut problems = Vec::new();
                if v != vl.sum(p.pu())? {
                    problems.push("V_{x,y} != V^l + p_u".to_string());
                }
                if !v.contains_subspace(p.pu()) {
                    problems.push("p_u not contained in V_{x,y}".to_string());
                }
                match p.varpi_subspace(&v) {
                    Ok(img) if img.dim() == p.b_l() => {}
                    Ok(img) => problems.push(format!("dim varpi(V_{{x,y}}) = {} != b_l = {}", img.dim(), p.b_l())),
                    Err(_) => problems.push("V_{x,y} is not contained in p".to_string()),
                }
                if problems.is_empty() {
                    return Ok(Draw::Pass(None));
                }
                self.filtered(x, y, rng, bound, problems.join("; "))
            }
            CheckId::VarpiImage => {
                let x = parabolic::sample_in(p.p(), rng, bound)?;
                if !p.in_r_prime_p(g, &x)? {
                    return Ok(Draw::Reject);
                }
                let y = parabolic::sample_in(p.p(), rng, bound)?;
                let v = self.g_family.v_space(g, &x, &y);
                let (vx, vy) = (p.varpi(&x)?, p.varpi(&y)?);
                let vl = self.l_family.v_space(g, vx.as_element(), vy.as_element());
                let reason = match p.varpi_subspace(&v) {
                    Ok(img) if img == vl => return Ok(Draw::Pass(None)),
                    Ok(img) => format!("dim varpi(V_{{x,y}}) = {}, dim V^l = {}, images differ", img.dim(), vl.dim()),
                    Err(_) => "V_{x,y} is not contained in p".to_string(),
                };
                self.filtered(x, y, rng, bound, reason)
            }
            CheckId::CentralizerCriterion => {
                let x = if salt.is_multiple_of(2) {
                    parabolic::sample_in(p.p(), rng, bound)?
                } else {
                    self.collision_draw(rng, bound)?
                };
                if !p.in_r_p(g, &x)? {
                    return Ok(Draw::Reject);
                }
                let gx = g.centralizer(&x);
                let trivial_meet = gx.intersection(p.pu())?.is_zero();
                let Ok(image) = p.varpi_subspace(&gx) else {
                    return Ok(Draw::Fail(Evidence::Point { x, reason: "g^x is not contained in p".into() }));
                };
                let vx = p.varpi(&x)?;
                let matches = image == p.l_centralizer(g, vx.as_element())?;
                Ok(if matches == trivial_meet {
                    Draw::Pass(Some(if trivial_meet { "both_true" } else { "both_false" }))
                } else {
                    Draw::Fail(Evidence::Point {
                        x,
                        reason: format!("varpi(g^x) = l^varpi(x) is {matches}, g^x meets p_u trivially is {trivial_meet}"),
                    })
                })
            }
            CheckId::RichardsonDensity => {
                // for p = g the only point of p_u is 0
                let x = if p.pu().is_zero() {
                    g.zero()
                } else {
                    parabolic::sample_punctured(p.pu(), rng, bound)?
                };
                Ok(if g.is_richardson(&x, p)? {
                    Draw::Pass(None)
                } else {
                    let dim = g.centralizer(&x).dim();
                    Draw::Fail(Evidence::Point { x, reason: format!("dim g^x = {dim}") })
                })
            }
            CheckId::WeylLemma | CheckId::ParabolicConjugacy | CheckId::FiberCardinality => {
                unreachable!("exhaustive checks have no draws")
            }
        }
    }

    /// A failing draw counts only if the pair is generic; otherwise redraw.
    fn filtered(&self, x: Element, y: Element, rng: &mut ChaCha8Rng, bound: i64, reason: String) -> Result<Draw> {
        Ok(if is_generic_pair(&self.g, &x, &y, rng, bound) {
            Draw::Fail(Evidence::Pair { x, y, reason })
        } else {
            Draw::Reject
        })
    }

    /// An element of `p` whose diagonal repeats a value across two blocks,
    /// plus random strictly upper entries inside the blocks and a random
    /// `p_u` part. Such points tend to lie in `R_p` but not in `R'_p`.
    fn collision_draw(&self, rng: &mut ChaCha8Rng, bound: i64) -> Result<Element> {
        let (g, p) = (&self.g, &self.parabolic);
        let levi = self.levi();
        let n = g.n();
        if levi.block_count() < 2 {
            return parabolic::sample_in(p.p(), rng, bound);
        }
        let bound = bound.max(1);
        let mut d: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        let i = rng.gen_range(1..=n);
        let others: Vec<usize> = (1..=n).filter(|&j| !levi.same_block(i, j)).collect();
        let j = others[rng.gen_range(0..others.len())];
        d[j - 1] = d[i - 1];
        let mean = Rational::new(d.iter().sum(), n as i64);
        let diag: Vec<Rational> = d.iter().map(|&v| &Rational::from_int(v) - &mean).collect();
        let mut x = g.diagonal(&diag)?;
        for a in 1..=n {
            for b in a + 1..=n {
                if levi.same_block(a, b) {
                    let c = Rational::from_int(rng.gen_range(-bound..=bound));
                    x = x.combine(&Rational::one(), &g.root_vector(a, b), &c);
                }
            }
        }
        if !p.pu().is_zero() {
            x = &x + &parabolic::sample_in(p.pu(), rng, bound)?;
        }
        Ok(x)
    }
}

fn exhaustive_witnesses(seed: u64, evidence: Vec<Evidence>) -> Vec<Witness> {
    evidence
        .into_iter()
        .map(|evidence| Witness {
            seed,
            trial: None,
            trial_seed: None,
            evidence,
        })
        .collect()
}

/// Both implications: `w(R'_+) ⊆ R_+ ⇒ w ∈ W_l` and
/// `w(R'_+) ⊆ R_+ ∪ R_l ⇒ w ∈ W_l`.
fn weyl_lemma_witnesses(w: &[WeylElement], levi: &LeviComposition) -> Vec<Evidence> {
    let sub = weyl::weyl_subgroup(levi);
    let rp = weyl::r_prime_plus(levi);
    let rl = weyl::levi_roots(levi);
    let mut out = Vec::new();
    for w in w {
        if sub.contains(w) {
            continue;
        }
        let image = w.act_set(&rp);
        if image.iter().all(|r| r.is_positive()) {
            out.push(Evidence::Permutation {
                perm: w.images().to_vec(),
                reason: "w(R'_+) in R_+ but w not in W_l".into(),
            });
        }
        if image.iter().all(|r| r.is_positive() || rl.contains(r)) {
            out.push(Evidence::Permutation {
                perm: w.images().to_vec(),
                reason: "w(R'_+) in R_+ u R_l but w not in W_l".into(),
            });
        }
    }
    out
}

/// `R'_+ ⊆ w(roots(p))` forces `w(roots(p)) = roots(p)` and `w ∈ W_l`.
fn conjugacy_witnesses(w: &[WeylElement], levi: &LeviComposition) -> Vec<Evidence> {
    let sub = weyl::weyl_subgroup(levi);
    let rp = weyl::r_prime_plus(levi);
    let roots = weyl::parabolic_roots(levi);
    let mut out = Vec::new();
    for w in w {
        let image = w.act_set(&roots);
        if !rp.is_subset(&image) {
            continue;
        }
        if image != roots {
            out.push(Evidence::Permutation {
                perm: w.images().to_vec(),
                reason: "R'_+ in w(roots(p)) but w(roots(p)) != roots(p)".into(),
            });
        } else if !sub.contains(w) {
            out.push(Evidence::Permutation {
                perm: w.images().to_vec(),
                reason: "w stabilizes roots(p) but is not in W_l".into(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiberCounts {
    /// `|W/W_l|` by coset enumeration.
    pub cosets: usize,
    /// Distinct `w(roots(p))`.
    pub translates: usize,
    pub multinomial: usize,
}

pub fn fiber_counts(levi: &LeviComposition) -> Result<FiberCounts> {
    let roots = weyl::parabolic_roots(levi);
    let translates: std::collections::BTreeSet<_> = weyl::enumerate_weyl(levi.n())?
        .iter()
        .map(|w| w.act_set(&roots))
        .collect();
    Ok(FiberCounts {
        cosets: weyl::coset_count(levi)?,
        translates: translates.len(),
        multinomial: weyl::multinomial(levi),
    })
}

fn run_on(check: CheckId, levi: &LeviComposition, params: &Params) -> Result<CheckResult> {
    Ok(Cell::new(levi)?.run(check, params))
}

fn composition(n: usize, levi: &LeviComposition) -> Result<()> {
    Ok(levi.check_rank(n)?)
}

pub fn check_vxy_in_p(n: usize, levi: &LeviComposition, samples: usize, seed: u64) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::VxyInP, levi, &Params::new(samples, seed))
}

pub fn check_vxy_eq_b(n: usize, samples: usize, seed: u64) -> Result<CheckResult> {
    run_on(CheckId::VxyEqB, &LeviComposition::borel(n), &Params::new(samples, seed))
}

pub fn check_vxy_decomposition(n: usize, levi: &LeviComposition, samples: usize, seed: u64) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::VxyDecomposition, levi, &Params::new(samples, seed))
}

pub fn check_varpi_image(n: usize, levi: &LeviComposition, samples: usize, seed: u64) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::VarpiImage, levi, &Params::new(samples, seed))
}

pub fn check_centralizer_criterion(n: usize, levi: &LeviComposition, samples: usize, seed: u64) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::CentralizerCriterion, levi, &Params::new(samples, seed))
}

pub fn check_richardson_density(n: usize, levi: &LeviComposition, samples: usize, seed: u64) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::RichardsonDensity, levi, &Params::new(samples, seed))
}

pub fn check_fiber_cardinality(n: usize, levi: &LeviComposition) -> Result<CheckResult> {
    composition(n, levi)?;
    run_on(CheckId::FiberCardinality, levi, &Params::new(0, 0))
}

fn exhaustive_over_compositions(check: CheckId, n: usize) -> Result<CheckResult> {
    let start = Instant::now();
    let w = weyl::enumerate_weyl(n)?;
    let witnesses = match check {
        CheckId::WeylLemma => weyl_lemma_witnesses,
        _ => conjugacy_witnesses,
    };
    let comps = weyl::compositions(n);
    let evidence: Vec<Evidence> = comps.iter().flat_map(|c| witnesses(&w, c)).collect();
    Ok(CheckResult {
        check_id: check,
        n,
        levi: None,
        samples: None,
        seed: 0,
        trials: w.len() * comps.len(),
        failures: evidence.len(),
        rejected: 0,
        witnesses: exhaustive_witnesses(0, evidence),
        details: serde_json::Value::Null,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Both implications of the Weyl lemma for every `w ∈ W` and every
/// composition of `n`.
pub fn check_weyl_lemma(n: usize) -> Result<CheckResult> {
    exhaustive_over_compositions(CheckId::WeylLemma, n)
}

pub fn check_parabolic_conjugacy(n: usize) -> Result<CheckResult> {
    exhaustive_over_compositions(CheckId::ParabolicConjugacy, n)
}

/// Which Levi compositions to visit for each rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compositions {
    All,
    List(Vec<LeviComposition>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub ranks: Vec<usize>,
    pub compositions: Compositions,
    pub samples: usize,
    pub seed: u64,
    pub bound: i64,
    /// `None` runs every check.
    pub checks: Option<Vec<CheckId>>,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ranks: vec![2, 3, 4],
            compositions: Compositions::All,
            samples: 50,
            seed: 42,
            bound: DEFAULT_BOUND,
            checks: None,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("--rank: {0} is outside 2..={max}", max = weyl::MAX_RANK)]
    Rank(usize),
    #[error("--samples: must be at least 1")]
    Samples,
    #[error("--bound: must be at least 1")]
    Bound,
    #[error("--levi: composition {levi} sums to {sum}, which is not a requested rank {ranks:?}")]
    Levi {
        levi: LeviComposition,
        sum: usize,
        ranks: Vec<usize>,
    },
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(&n) = self.ranks.iter().find(|&&n| !(2..=weyl::MAX_RANK).contains(&n)) {
            return Err(ConfigError::Rank(n));
        }
        if self.samples == 0 {
            return Err(ConfigError::Samples);
        }
        if self.bound < 1 {
            return Err(ConfigError::Bound);
        }
        if let Compositions::List(list) = &self.compositions {
            if let Some(c) = list.iter().find(|c| !self.ranks.contains(&c.n())) {
                return Err(ConfigError::Levi {
                    levi: c.clone(),
                    sum: c.n(),
                    ranks: self.ranks.clone(),
                });
            }
        }
        Ok(())
    }

    /// Grid cells in rank order, compositions in lexicographic order (or
    /// in the given order for an explicit list).
    pub fn cells(&self) -> Vec<LeviComposition> {
        self.ranks
            .iter()
            .flat_map(|&n| match &self.compositions {
                Compositions::All => weyl::compositions(n),
                Compositions::List(list) => list.iter().filter(|c| c.n() == n).cloned().collect(),
            })
            .collect()
    }

    pub fn selected_checks(&self) -> Vec<CheckId> {
        match &self.checks {
            None => CheckId::ALL.to_vec(),
            Some(list) => CheckId::ALL.into_iter().filter(|c| list.contains(c)).collect(),
        }
    }

    pub fn params(&self) -> Params {
        Params {
            samples: self.samples,
            seed: self.seed,
            bound: self.bound,
            execution: self.execution,
        }
    }
}

/// Every selected check on every grid cell. `vxy_eq_b` runs only on Borel
/// cells. Results are ordered by cell, then by check. Construction errors
/// become failed results instead of aborting the run.
pub fn run_all(config: &RunConfig) -> Vec<CheckResult> {
    let params = config.params();
    let checks = config.selected_checks();
    let cells: Vec<(LeviComposition, Result<Cell>)> = config
        .cells()
        .into_iter()
        .map(|levi| {
            let cell = Cell::new(&levi);
            (levi, cell)
        })
        .collect();
    let jobs: Vec<(usize, CheckId)> = cells
        .iter()
        .enumerate()
        .flat_map(|(k, (levi, _))| {
            checks
                .iter()
                .filter(move |&&c| c != CheckId::VxyEqB || levi.is_borel())
                .map(move |&c| (k, c))
        })
        .collect();
    par::map(params.execution, &jobs, |&(k, check)| match &cells[k] {
        (_, Ok(cell)) => cell.run(check, &params),
        (levi, Err(e)) => CheckResult::failed_with(check, levi.n(), Some(levi.clone()), params.seed, e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levi(parts: &[usize]) -> LeviComposition {
        LeviComposition::new(parts.to_vec()).unwrap()
    }

    fn assert_pass(r: &CheckResult) {
        assert!(r.passed(), "{} {:?} failed: {:#?}", r.check_id, r.levi, r.witnesses);
    }

    #[test]
    fn check_ids_round_trip() {
        for c in CheckId::ALL {
            assert_eq!(c.as_str().parse::<CheckId>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{c}\""));
        }
        assert!("nope".parse::<CheckId>().is_err());
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let c = levi(&[2, 1]);
        let s: std::collections::BTreeSet<u64> = (0..100)
            .map(|t| trial_seed(42, CheckId::VxyInP, &c, t))
            .chain((0..100).map(|t| trial_seed(42, CheckId::VarpiImage, &c, t)))
            .chain((0..100).map(|t| trial_seed(42, CheckId::VxyInP, &levi(&[1, 2]), t)))
            .collect();
        assert_eq!(s.len(), 300);
        assert_eq!(trial_seed(7, CheckId::VxyInP, &c, 3), trial_seed(7, CheckId::VxyInP, &c, 3));
    }

    #[test]
    fn genericity_filter() {
        let g = SlAlgebra::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (e, h) = (g.root_vector(1, 2), g.coroot(1));
        assert!(!is_generic_pair(&g, &e, &e, &mut rng, 9));
        assert!(!is_generic_pair(&g, &e, &e.scale(&Rational::from_int(3)), &mut rng, 9));
        assert!(is_generic_pair(&g, &h, &e, &mut rng, 9));
        // every nonzero element of sl_2 is regular
        let f = g.root_vector(2, 1);
        assert!(is_generic_pair(&g, &e, &f, &mut rng, 9));
        // regular at every rational probe, but 2x - 3y is not regular
        let g = SlAlgebra::new(3).unwrap();
        let q = Rational::from_int;
        let x = g.element([-9, 0, 0, -7, 0, 0, -5, -1].map(q).to_vec()).unwrap();
        let y = g.element([-6, 0, 0, -8, 0, 0, -2, 2].map(q).to_vec()).unwrap();
        assert!(!is_generic_pair(&g, &x, &y, &mut rng, 9));
        let (e, h, _) = g.principal_triple();
        assert!(is_generic_pair(&g, &h, &e, &mut rng, 9));
    }

    #[test]
    fn small_examples_pass() {
        assert_pass(&check_vxy_in_p(2, &levi(&[1, 1]), 50, 42).unwrap());
        assert_pass(&check_vxy_in_p(3, &levi(&[2, 1]), 50, 42).unwrap());
        assert_pass(&check_vxy_eq_b(2, 20, 42).unwrap());
        assert_pass(&check_vxy_eq_b(3, 50, 42).unwrap());
        assert_pass(&check_vxy_decomposition(3, &levi(&[2, 1]), 50, 42).unwrap());
        assert_pass(&check_vxy_decomposition(4, &levi(&[2, 1, 1]), 25, 42).unwrap());
        assert_pass(&check_vxy_decomposition(3, &levi(&[3]), 10, 42).unwrap());
        assert_pass(&check_varpi_image(3, &levi(&[2, 1]), 25, 42).unwrap());
        assert_pass(&check_varpi_image(2, &levi(&[1, 1]), 25, 42).unwrap());
        assert_pass(&check_centralizer_criterion(3, &levi(&[2, 1]), 50, 42).unwrap());
        let r = check_richardson_density(3, &levi(&[2, 1]), 50, 42).unwrap();
        assert_pass(&r);
        assert!(r.details["misses"].as_u64().unwrap() <= 5);
        let r = check_richardson_density(2, &levi(&[1, 1]), 30, 42).unwrap();
        assert_eq!(r.details["misses"], 0);
        assert_pass(&check_richardson_density(3, &levi(&[3]), 5, 42).unwrap());
        assert!(check_vxy_in_p(3, &levi(&[2, 2]), 5, 42).is_err());
    }

    #[test]
    fn exhaustive_examples() {
        for n in 2..=5 {
            let r = check_weyl_lemma(n).unwrap();
            assert_pass(&r);
            assert_eq!(r.trials, (1..=n).product::<usize>() * weyl::compositions(n).len());
            assert_pass(&check_parabolic_conjugacy(n).unwrap());
        }
        let r = check_fiber_cardinality(3, &levi(&[2, 1])).unwrap();
        assert_pass(&r);
        assert_eq!(r.details["cosets"], 3);
        assert_eq!(r.details["non_normal"], true);
        let r = check_fiber_cardinality(3, &levi(&[3])).unwrap();
        assert_eq!(r.details["cosets"], 1);
        assert_eq!(r.details["non_normal"], false);
        let r = check_fiber_cardinality(4, &levi(&[2, 2])).unwrap();
        assert_eq!(r.details["cosets"], 6);
    }

    #[test]
    fn centralizer_check_sees_both_sides() {
        let r = check_centralizer_criterion(3, &levi(&[2, 1]), 40, 42).unwrap();
        assert_pass(&r);
        assert!(r.details["both_true"].as_u64().unwrap() > 0, "{}", r.details);
        assert!(r.details["both_false"].as_u64().unwrap() > 0, "{}", r.details);
    }

    #[test]
    fn execution_modes_agree() {
        let cell = Cell::new(&levi(&[1, 2])).unwrap();
        for check in CheckId::ALL {
            if check == CheckId::VxyEqB {
                continue;
            }
            let mut a = cell.run(check, &Params { execution: Execution::Sequential, ..Params::new(8, 9) });
            let mut b = cell.run(check, &Params { execution: Execution::Parallel, ..Params::new(8, 9) });
            a.elapsed_ms = 0.0;
            b.elapsed_ms = 0.0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn run_all_filters_and_orders() {
        let config = RunConfig {
            ranks: vec![2, 3],
            samples: 3,
            checks: Some(vec![CheckId::WeylLemma]),
            ..RunConfig::default()
        };
        let results = run_all(&config);
        assert_eq!(results.len(), 2 + 4);
        assert!(results.iter().all(|r| r.check_id == CheckId::WeylLemma && r.passed()));
        let levis: Vec<_> = results.iter().map(|r| r.levi.clone().unwrap().to_string()).collect();
        assert_eq!(levis, ["1,1", "2", "1,1,1", "1,2", "2,1", "3"]);

        let empty = RunConfig { ranks: vec![], ..RunConfig::default() };
        assert!(run_all(&empty).is_empty());

        let eq_b = RunConfig {
            ranks: vec![3],
            samples: 2,
            checks: Some(vec![CheckId::VxyEqB]),
            ..RunConfig::default()
        };
        let results = run_all(&eq_b);
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].levi, Some(LeviComposition::borel(3)));
    }

    #[test]
    fn config_validation() {
        assert_eq!(RunConfig::default().validate(), Ok(()));
        let bad = RunConfig {
            ranks: vec![3],
            compositions: Compositions::List(vec![levi(&[2, 2])]),
            ..RunConfig::default()
        };
        assert!(matches!(bad.validate(), Err(ConfigError::Levi { sum: 4, .. })));
        assert!(bad.validate().unwrap_err().to_string().starts_with("--levi"));
        let bad = RunConfig { ranks: vec![7], ..RunConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::Rank(7)));
        let bad = RunConfig { samples: 0, ..RunConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::Samples));
    }

    // Negative controls: each randomized check must be able to fail.

    /// A subspace of the same dimension as `p_u` that is not `ad l`-stable.
    fn skewed_radical(cell: &Cell) -> Subspace {
        let g = cell.algebra();
        let p = cell.parabolic();
        let h1 = g.coroot(1);
        let mut vectors: Vec<Vec<Rational>> = p.pu().basis_vectors().map(<[Rational]>::to_vec).collect();
        let first = Element::from_coords(vectors[0].clone());
        vectors[0] = (&first + &h1).into_coords();
        let lower = g.root_vector(g.n(), 1);
        if vectors.len() > 1 {
            let second = Element::from_coords(vectors[1].clone());
            vectors[1] = (&second + &lower).into_coords();
        }
        Subspace::span(&vectors, g.dim()).unwrap()
    }

    fn mutated(parts: &[usize]) -> Cell {
        let cell = Cell::new(&levi(parts)).unwrap();
        let r = skewed_radical(&cell);
        cell.with_radical(r).unwrap()
    }

    #[track_caller]
    fn assert_detects(r: &CheckResult) {
        assert!(r.failures > 0, "{} did not detect the mutation: {:?} {}", r.check_id, r.levi, r.details);
        for w in &r.witnesses {
            assert!(w.trial.is_some() && w.trial_seed.is_some());
            assert_eq!(w.seed, 42);
        }
    }

    #[test]
    fn vxy_in_p_detects_wrong_radical() {
        assert_detects(&mutated(&[2, 1]).run(CheckId::VxyInP, &Params::new(10, 42)));
    }

    #[test]
    fn vxy_eq_b_detects_missing_generator() {
        let cell = Cell::new(&LeviComposition::borel(3)).unwrap().without_g_generator(1);
        assert_detects(&cell.run(CheckId::VxyEqB, &Params::new(10, 42)));
    }

    #[test]
    fn decomposition_detects_wrong_radical() {
        assert_detects(&mutated(&[2, 1]).run(CheckId::VxyDecomposition, &Params::new(10, 42)));
        assert_detects(&mutated(&[1, 1, 2]).run(CheckId::VxyDecomposition, &Params::new(10, 42)));
    }

    #[test]
    fn varpi_image_detects_missing_generator() {
        let cell = Cell::new(&levi(&[2, 1])).unwrap().without_levi_generator(0);
        assert_detects(&cell.run(CheckId::VarpiImage, &Params::new(10, 42)));
        // without the cubic, V_{x,y} has dimension 2 < b_l
        let cell = Cell::new(&levi(&[2, 1])).unwrap().without_g_generator(1);
        assert_detects(&cell.run(CheckId::VarpiImage, &Params::new(10, 42)));
        // the quadratic alone is not missed: its polarizations already
        // project onto V^l, so this mutation is invisible to the check
        let cell = Cell::new(&levi(&[2, 1])).unwrap().without_g_generator(0);
        assert!(cell.run(CheckId::VarpiImage, &Params::new(10, 42)).passed());
    }

    #[test]
    fn centralizer_detects_wrong_radical() {
        assert_detects(&mutated(&[2, 1]).run(CheckId::CentralizerCriterion, &Params::new(20, 42)));
    }

    #[test]
    fn richardson_detects_wrong_radical() {
        let cell = Cell::new(&levi(&[2, 1])).unwrap();
        let g = cell.algebra();
        let r = Subspace::span(&[g.root_vector(1, 3).into_coords(), g.coroot(1).into_coords()], g.dim()).unwrap();
        let cell = cell.with_radical(r).unwrap();
        let r = cell.run(CheckId::RichardsonDensity, &Params::new(20, 42));
        assert_detects(&r);
        assert!(r.details["pass_rate"].as_f64().unwrap() < RICHARDSON_THRESHOLD);
    }

    #[test]
    fn construction_errors_become_failures() {
        let r = CheckResult::failed_with(CheckId::VxyInP, 3, None, 42, &Error::EmptySampleSpace);
        assert!(!r.passed());
        assert!(matches!(r.witnesses[0].evidence, Evidence::Error { .. }));
    }
}
