//! Bounded exhaustive enumeration and the desk-scale property suite.
//!
//! Every invariant of the library is checked over all bundles within an
//! [`EnumBounds`] box. A slope `r/s` is admitted when `|r| ≤ max_abs_degree`
//! and `s ≤ max_denominator`, so the bound applies to the degree of each
//! stable constituent `O(r/s)`; a bound on the total degree alone would admit
//! `O(n) ⊕ O(-n)` for every `n`.

// Properties are written as immediately invoked closures so `?` can be used.
#![allow(clippy::redundant_closure_call)]

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundle::Bundle;
use crate::classify::{
    is_globally_generated, is_quotient, is_quotient_polygonal, subbundle_necessary,
    subbundle_sufficient,
};
use crate::cli::parse_bundle;
use crate::dominance::{
    common_factor_decompose, dominates_via_ranks, equal_rank_duality_holds, slopewise_dominates,
};
use crate::error::{HnError, Result};
use crate::pairing::{deg_pair, deg_pair_nonneg, hom_is_zero};
use crate::reduction::{c_value_with, first_violated_hypothesis, max_slope_reduction, slope_reduction_sequence};
use crate::slope::Slope;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EnumBounds {
    pub max_rank: u64,
    pub max_abs_degree: u64,
    pub max_denominator: u64,
    pub include_zero: bool,
}

impl EnumBounds {
    pub const DEFAULT: EnumBounds =
        EnumBounds { max_rank: 4, max_abs_degree: 4, max_denominator: 2, include_zero: true };

    pub fn new(max_rank: u64, max_abs_degree: u64, max_denominator: u64) -> Result<Self> {
        let b = EnumBounds { max_rank, max_abs_degree, max_denominator, include_zero: true };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rank < 1 {
            return Err(HnError::InvalidArgument("max_rank must be at least 1".into()));
        }
        if self.max_denominator < 1 {
            return Err(HnError::InvalidArgument("max_denominator must be at least 1".into()));
        }
        if self.max_abs_degree >= i64::MAX as u64 || self.max_denominator >= i64::MAX as u64 {
            return Err(HnError::Overflow);
        }
        Ok(())
    }

    /// Whether `b` lies inside the box.
    pub fn contains(&self, b: &Bundle) -> bool {
        (self.include_zero || !b.is_zero())
            && b.rank() <= self.max_rank
            && b.slopes().all(|s| {
                s.num().unsigned_abs() <= self.max_abs_degree && s.den() as u64 <= self.max_denominator
            })
    }
}

impl Default for EnumBounds {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Admissible slopes in decreasing order. A slope of denominator `s` above
/// `max_rank` can never occur and is skipped.
pub fn candidate_slopes(bounds: &EnumBounds) -> Vec<Slope> {
    let d = bounds.max_abs_degree as i64;
    let max_den = bounds.max_denominator.min(bounds.max_rank) as i64;
    let mut out: Vec<Slope> = (1..=max_den)
        .flat_map(|s| (-d..=d).filter(move |r| r.gcd(&s) == 1).map(move |r| (r, s)))
        .map(|(r, s)| Slope::new(r, s).expect("bounded slope"))
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Every canonical bundle inside `bounds`, each exactly once, in a fixed
/// depth-first order (zero first, then by decreasing leading slope).
pub fn enumerate_bundles(bounds: &EnumBounds) -> Vec<Bundle> {
    enumerate_bundles_limited(bounds, usize::MAX).expect("unlimited enumeration")
}

/// [`enumerate_bundles`] that gives up with `None` past `limit` bundles.
pub fn enumerate_bundles_limited(bounds: &EnumBounds, limit: usize) -> Option<Vec<Bundle>> {
    let slopes = candidate_slopes(bounds);
    let mut out = Vec::new();
    if bounds.include_zero {
        out.push(Bundle::zero());
    }
    let mut prefix = Vec::new();
    if extend(&slopes, 0, bounds.max_rank, &mut prefix, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

fn extend(
    slopes: &[Slope],
    from: usize,
    rank_left: u64,
    prefix: &mut Vec<(Slope, u64)>,
    out: &mut Vec<Bundle>,
    limit: usize,
) -> bool {
    for (i, &s) in slopes.iter().enumerate().skip(from) {
        let block = s.den() as u64;
        let mut m = 1;
        while m * block <= rank_left {
            prefix.push((s, m));
            if out.len() >= limit {
                return false;
            }
            out.push(Bundle::from_unsigned(prefix.iter().copied()).expect("bounded bundle"));
            if !extend(slopes, i + 1, rank_left - m * block, prefix, out, limit) {
                return false;
            }
            prefix.pop();
            m += 1;
        }
    }
    true
}

/// `deg(V^∨ ⊗ W)^{≥0}` by expanding the tensor into stable summands and
/// summing the degrees of those with slope `≥ 0`.
pub fn oracle_deg_pair_nonneg(v: &Bundle, w: &Bundle) -> Result<i64> {
    Ok(v.dual().tensor(w)?.degree_nonneg())
}

/// At most this many counterexamples are stored per property.
/// Properties that encode the equality and strictness statements about `c`.
/// They have counterexamples once rank 2 and three integer slopes are in
/// range, e.g. `E = O(2) + O(1)`, `F = O(2)`, `Q = O(1)` gives `c = 0`.
pub const REFUTED_CLAIMS: [&str; 3] = [
    "reduction.key_inequality_equality",
    "reduction.max_reduction_strict",
    "reduction.sequence_strict_drop",
];

pub const MAX_STORED_FAILURES: usize = 32;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Failure {
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct PropertyResult {
    pub checked: u64,
    /// Total number of failing instances; only the first few are stored.
    pub failed: u64,
    pub failures: Vec<Failure>,
}

impl PropertyResult {
    fn merge(&mut self, other: PropertyResult) {
        self.checked += other.checked;
        self.failed += other.failed;
        let room = MAX_STORED_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct VerifyReport {
    pub properties: BTreeMap<String, PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.values().all(|p| p.failures.is_empty())
    }

    pub fn total_checked(&self) -> u64 {
        self.properties.values().map(|p| p.checked).sum()
    }

    pub fn failing_properties(&self) -> Vec<&str> {
        self.properties
            .iter()
            .filter(|(_, p)| !p.failures.is_empty())
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("invalid bounds: {0}")]
    InvalidBounds(HnError),
    #[error("resource limit: {0}")]
    ResourceExhausted(String),
}

pub type PairingFn = fn(&Bundle, &Bundle) -> Result<i64>;

/// Knobs for [`run_property_suite_with`]. `pairing` is the implementation
/// route compared against the oracle, replaceable for fault injection.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub jobs: usize,
    pub pairing: PairingFn,
    pub max_bundles: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { jobs: 1, pairing: deg_pair_nonneg, max_bundles: 20_000 }
    }
}

pub fn run_property_suite(bounds: &EnumBounds) -> std::result::Result<VerifyReport, VerifyError> {
    run_property_suite_with(bounds, &SuiteOptions::default())
}

/// Runs every property over the enumeration. Shards are split by the outer
/// index and merged in index order, so the report does not depend on `jobs`.
pub fn run_property_suite_with(
    bounds: &EnumBounds,
    opts: &SuiteOptions,
) -> std::result::Result<VerifyReport, VerifyError> {
    bounds.validate().map_err(VerifyError::InvalidBounds)?;
    let all = enumerate_bundles_limited(bounds, opts.max_bundles).ok_or_else(|| {
        VerifyError::ResourceExhausted(format!(
            "more than {} bundles within the requested bounds",
            opts.max_bundles
        ))
    })?;
    let domains = Domains::new(bounds, all);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| VerifyError::ResourceExhausted(format!("thread pool: {e}")))?;
    let ctx = Ctx { pairing: opts.pairing };

    let tally = pool.install(|| {
        let mut tally = Tally::default();
        tally.merge(enumeration_soundness(bounds, &domains.all));
        tally.merge(shard(&domains.all, |t, i| ctx.single(t, &domains.all[i])));
        tally.merge(shard(&domains.all, |t, i| {
            for w in &domains.all {
                ctx.pair(t, &domains.all[i], w);
            }
        }));
        tally.merge(shard(&domains.shear, |t, i| {
            for w in &domains.shear {
                ctx.shear_pair(t, &domains.shear[i], w);
            }
        }));
        tally.merge(shard(&domains.small, |t, i| {
            for v in &domains.small {
                for w in &domains.small {
                    ctx.triple(t, &domains.small[i], v, w);
                }
            }
        }));
        tally.merge(shard(&domains.key, |t, i| {
            for q in &domains.key {
                ctx.key_pair(t, &domains.key[i], q);
            }
        }));
        tally.merge(shard(&domains.key, |t, i| {
            for f in &domains.key {
                for q in &domains.key {
                    ctx.key_triple(t, &domains.key[i], f, q);
                }
            }
        }));
        tally
    });
    Ok(tally.into_report())
}

struct Domains {
    all: Vec<Bundle>,
    shear: Vec<Bundle>,
    small: Vec<Bundle>,
    key: Vec<Bundle>,
}

impl Domains {
    fn new(bounds: &EnumBounds, all: Vec<Bundle>) -> Self {
        let shear = all.iter().filter(|b| b.rank() <= 3).cloned().collect();
        let small_box = EnumBounds {
            max_rank: bounds.max_rank.min(3),
            max_abs_degree: bounds.max_abs_degree.min(2),
            max_denominator: bounds.max_denominator.min(2),
            include_zero: bounds.include_zero,
        };
        let small = all.iter().filter(|b| small_box.contains(b)).cloned().collect();
        // Zero stays in the key domain so hypothesis (iv) failures are exercised.
        let key_box = EnumBounds {
            max_rank: bounds.max_rank.min(4),
            max_abs_degree: bounds.max_abs_degree.min(2),
            max_denominator: 1,
            include_zero: true,
        };
        let key = enumerate_bundles(&key_box);
        Domains { all, shear, small, key }
    }
}

fn shard<F>(items: &[Bundle], body: F) -> Tally
where
    F: Fn(&mut Tally, usize) + Sync,
{
    let parts: Vec<Tally> = (0..items.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            body(&mut t, i);
            t
        })
        .collect();
    let mut out = Tally::default();
    for p in parts {
        out.merge(p);
    }
    out
}

struct Fail(String);

impl From<HnError> for Fail {
    fn from(e: HnError) -> Self {
        Fail(format!("error: {e}"))
    }
}

type Outcome = std::result::Result<(), Fail>;

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(Fail(detail()))
    }
}

#[derive(Default)]
struct Tally(BTreeMap<&'static str, PropertyResult>);

impl Tally {
    fn record(&mut self, name: &'static str, inputs: &[&Bundle], outcome: Outcome) {
        let entry = self.0.entry(name).or_default();
        entry.checked += 1;
        if let Err(Fail(detail)) = outcome {
            entry.failed += 1;
            if entry.failures.len() < MAX_STORED_FAILURES {
                let inputs = inputs.iter().map(|b| b.to_string()).collect();
                entry.failures.push(Failure { inputs, detail });
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        for (k, v) in other.0 {
            self.0.entry(k).or_default().merge(v);
        }
    }

    fn into_report(self) -> VerifyReport {
        VerifyReport { properties: self.0.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }
}

fn enumeration_soundness(bounds: &EnumBounds, all: &[Bundle]) -> Tally {
    let mut t = Tally::default();
    let mut seen = HashSet::new();
    for b in all {
        let fresh = seen.insert(b);
        let outcome = Bundle::from_unsigned(b.factors().iter().map(|f| (f.slope, f.mult)))
            .map_err(Fail::from)
            .and_then(|canon| {
                ensure(canon == *b, || "not canonical".into())?;
                ensure(bounds.contains(b), || "outside bounds".into())?;
                ensure(fresh, || "duplicate".into())
            });
        t.record("enumeration.soundness", &[b], outcome);
    }
    t
}

const SHEARS: [(i64, i64); 6] = [(-2, 1), (-1, 1), (0, 1), (1, 1), (1, 2), (2, 3)];
const STRETCHES: [u64; 3] = [1, 2, 3];

fn trivial(n: u64) -> Bundle {
    Bundle::trivial(n).expect("small trivial bundle")
}

fn rank_inequality_le(e: &Bundle, f: &Bundle) -> bool {
    // rk(E^{≤μ}) = rk((E^∨)^{≥-μ}), so condition (i) is dual dominance.
    dominates_via_ranks(&e.dual(), &f.dual())
}

struct Ctx {
    pairing: PairingFn,
}

impl Ctx {
    fn single(&self, t: &mut Tally, b: &Bundle) {
        t.record("cli.round_trip", &[b], (|| {
            let text = b.to_string();
            let parsed = parse_bundle(&text).map_err(|e| Fail(format!("parse: {e}")))?;
            ensure(parsed == *b, || format!("parsed back as {parsed}"))?;
            let json = serde_json::to_string(b).map_err(|e| Fail(e.to_string()))?;
            let back: Bundle = serde_json::from_str(&json).map_err(|e| Fail(e.to_string()))?;
            ensure(back == *b, || format!("JSON round trip gave {back}"))
        })());

        t.record("hn_core.dual_laws", &[b], (|| {
            let d = b.dual();
            ensure(d.dual() == *b, || "dual is not an involution".into())?;
            ensure(d.rank() == b.rank() && d.degree() == -b.degree(), || {
                format!("dual has rank {} degree {}", d.rank(), d.degree())
            })
        })());

        t.record("hn_core.stretch_laws", &[b], (|| {
            for c in STRETCHES {
                let s = b.stretch(c)?;
                ensure(s.rank() == b.rank(), || format!("stretch {c} changed rank"))?;
                ensure(s.degree() == b.degree() * c as i64, || format!("stretch {c} degree"))?;
            }
            ensure(b.stretch(1)? == *b, || "stretch 1 is not the identity".into())
        })());

        t.record("hn_core.hn_vector_sum", &[b], (|| {
            let (x, y) = b.hn_vectors().iter().fold((0i64, 0i64), |(x, y), v| (x + v.x, y + v.y));
            ensure(x as u64 == b.rank() && y == b.degree(), || format!("vector sum ({x}, {y})"))
        })());

        t.record("hn_core.interval_slopes_nonincreasing", &[b], (|| {
            let slopes: Vec<Slope> =
                (1..=b.rank()).map(|i| b.slope_on_interval(i)).collect::<Result<_>>()?;
            ensure(slopes.windows(2).all(|w| w[0] >= w[1]), || format!("{slopes:?}"))
        })());

        t.record("dominance.reflexive", &[b], ensure(slopewise_dominates(b, b), String::new));
        t.record("classify.quotient_reflexive", &[b], ensure(is_quotient(b, b).answer, String::new));

        t.record("pairing.self_pairing", &[b], (|| {
            ensure(deg_pair(b, b)? == 0, || "deg(V^∨⊗V) ≠ 0".into())?;
            let n = (self.pairing)(b, b)?;
            ensure(n >= 0, || format!("negative nonneg degree {n}"))?;
            ensure(!b.is_semistable() || n == 0, || format!("semistable self pairing {n}"))
        })());

        if b.slopes().all(|s| !s.is_negative()) {
            t.record("classify.globgen_consistency", &[b], (|| {
                for n in 1..=4 {
                    let direct = is_globally_generated(b, n)?;
                    let quotient = is_quotient(&trivial(n), b).answer;
                    ensure(direct == quotient, || format!("n = {n}: {direct} vs {quotient}"))?;
                }
                Ok(())
            })());
        }
    }

    fn pair(&self, t: &mut Tally, v: &Bundle, w: &Bundle) {
        let ins = [v, w];
        let nonneg = (self.pairing)(v, w);

        t.record("pairing.oracle_agreement", &ins, (|| {
            let a = nonneg.clone()?;
            let b = oracle_deg_pair_nonneg(v, w)?;
            ensure(a == b, || format!("{a} vs oracle {b}"))
        })());

        t.record("pairing.total_degree", &ins, (|| {
            let d = deg_pair(v, w)?;
            let expected = v.rank() as i64 * w.degree() - w.rank() as i64 * v.degree();
            ensure(d == expected, || format!("{d} vs rank formula {expected}"))?;
            let tensor = v.dual().tensor(w)?.degree();
            ensure(d == tensor, || format!("{d} vs tensor degree {tensor}"))?;
            ensure(deg_pair(w, v)? == -d, || "not antisymmetric".into())
        })());

        if !v.is_zero() && !w.is_zero() {
            t.record("pairing.zero_dimension", &ins, (|| {
                let n = nonneg.clone()?;
                let separated = v.mu_min()? >= w.mu_max()?;
                ensure((n == 0) == separated, || format!("dim {n}, separated = {separated}"))
            })());
        }

        if hom_is_zero(v, w) {
            t.record("pairing.hom_zero_implies_dim_zero", &ins, (|| {
                let n = nonneg.clone()?;
                ensure(n == 0, || format!("dim {n}"))
            })());
        }

        t.record("hn_core.tensor_rank_degree", &ins, (|| {
            let p = v.tensor(w)?;
            ensure(p.rank() == v.rank() * w.rank(), || format!("rank {}", p.rank()))?;
            let deg = v.rank() as i64 * w.degree() + w.rank() as i64 * v.degree();
            ensure(p.degree() == deg, || format!("degree {} vs {deg}", p.degree()))
        })());

        t.record("hn_core.tensor_commutative", &ins, (|| {
            ensure(v.tensor(w)? == w.tensor(v)?, String::new)
        })());

        t.record("hn_core.dual_of_tensor", &ins, (|| {
            ensure(v.tensor(w)?.dual() == v.dual().tensor(&w.dual())?, String::new)
        })());

        t.record("hn_core.direct_sum_laws", &ins, (|| {
            let s = v.direct_sum(w)?;
            ensure(s == w.direct_sum(v)?, || "not commutative".into())?;
            ensure(s.rank() == v.rank() + w.rank() && s.degree() == v.degree() + w.degree(), || {
                format!("rank {} degree {}", s.rank(), s.degree())
            })
        })());

        let dominant = slopewise_dominates(v, w);
        t.record("dominance.characterization", &ins, (|| {
            let via = dominates_via_ranks(v, w);
            ensure(dominant == via, || format!("slopewise {dominant}, ranks {via}"))
        })());

        t.record("dominance.decomposition", &ins, (|| {
            match common_factor_decompose(v, w) {
                Err(HnError::NotDominant) => ensure(!dominant, || "rejected a dominant pair".into()),
                Err(e) => Err(e.into()),
                Ok(d) => {
                    ensure(dominant, || "decomposed a non-dominant pair".into())?;
                    ensure(d.common.direct_sum(&d.v_rest)? == *v, || "U ⊕ V' ≠ V".into())?;
                    ensure(d.common.direct_sum(&d.w_rest)? == *w, || "U ⊕ W' ≠ W".into())?;
                    ensure(slopewise_dominates(&d.v_rest, &d.w_rest), || "V' ⋡ W'".into())?;
                    let maximal = d.w_rest.is_zero()
                        || d.v_rest.slope_on_interval(1)? != d.w_rest.slope_on_interval(1)?;
                    ensure(maximal, || format!("common part {} not maximal", d.common))
                }
            }
        })());

        if dominant {
            t.record("dominance.nonneg_degree_monotone", &ins, (|| {
                let (a, b) = (v.degree_nonneg(), w.degree_nonneg());
                ensure(a >= b, || format!("{a} < {b}"))
            })());
        }

        if v.rank() == w.rank() {
            t.record("dominance.equal_rank_duality", &ins, (|| {
                equal_rank_duality_holds(v, w)?;
                Ok(())
            })());
        }

        let quotient = is_quotient(v, w);
        t.record("classify.quotient_equivalence", &ins, (|| {
            let poly = is_quotient_polygonal(v, w);
            ensure(quotient.answer == poly.answer, || {
                format!("rank form {:?}, polygon form {:?}", quotient, poly)
            })
        })());

        t.record("classify.quotient_dual_dominance", &ins, (|| {
            let dual = slopewise_dominates(&v.dual(), &w.dual());
            ensure(dual == rank_inequality_le(v, w), || "dual dominance mismatch".into())?;
            ensure(!quotient.answer || dual, || "quotient without dual dominance".into())
        })());

        t.record("classify.subbundle_duality", &ins, (|| {
            let suff = subbundle_sufficient(v, w).answer;
            let dual = is_quotient(&v.dual(), &w.dual()).answer;
            ensure(suff == dual, || format!("sufficient {suff}, dual quotient {dual}"))?;
            let nec = subbundle_necessary(v, w);
            ensure(!suff || nec, || "sufficient but not necessary".into())
        })());
    }

    fn shear_pair(&self, t: &mut Tally, v: &Bundle, w: &Bundle) {
        let ins = [v, w];
        t.record("pairing.shear", &ins, (|| {
            let base = (self.pairing)(v, w)?;
            for (r, s) in SHEARS {
                let l = Slope::new(r, s)?;
                let sheared = (self.pairing)(&v.twist(l)?, &w.twist(l)?)?;
                ensure(sheared == s * s * base, || format!("λ = {l}: {sheared} vs {s}²·{base}"))?;
            }
            Ok(())
        })());
        t.record("pairing.stretch", &ins, (|| {
            let base = (self.pairing)(v, w)?;
            for c in STRETCHES {
                let stretched = (self.pairing)(&v.stretch(c)?, &w.stretch(c)?)?;
                ensure(stretched == c as i64 * base, || format!("C = {c}: {stretched} vs {base}"))?;
            }
            Ok(())
        })());
    }

    fn triple(&self, t: &mut Tally, u: &Bundle, v: &Bundle, w: &Bundle) {
        let ins = [u, v, w];
        t.record("hn_core.tensor_distributive", &ins, (|| {
            let lhs = u.tensor(&v.direct_sum(w)?)?;
            let rhs = u.tensor(v)?.direct_sum(&u.tensor(w)?)?;
            ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))?;
            ensure(u.tensor(v)?.tensor(w)? == u.tensor(&v.tensor(w)?)?, || "not associative".into())
        })());

        if slopewise_dominates(u, v) && slopewise_dominates(v, w) {
            t.record("dominance.transitive", &ins, ensure(slopewise_dominates(u, w), String::new));
        }
        if is_quotient(u, v).answer && is_quotient(v, w).answer {
            t.record("classify.quotient_transitive", &ins, ensure(is_quotient(u, w).answer, String::new));
        }

        let c = |e: &Bundle, f: &Bundle, q: &Bundle| c_value_with(e, f, q, self.pairing);
        t.record("reduction.shear_invariance", &ins, (|| {
            let base = c(u, v, w)?;
            for l in [-1, 1] {
                let l = Slope::integer(l);
                let sheared = c(&u.twist(l)?, &v.twist(l)?, &w.twist(l)?)?;
                ensure(sheared == base, || format!("λ = {l}: {sheared} vs {base}"))?;
            }
            Ok(())
        })());
        t.record("reduction.stretch_scaling", &ins, (|| {
            let base = c(u, v, w)?;
            for k in STRETCHES {
                let s = c(&u.stretch(k)?, &v.stretch(k)?, &w.stretch(k)?)?;
                ensure(s == k as i64 * base, || format!("C = {k}: {s} vs {base}"))?;
            }
            Ok(())
        })());
    }

    fn key_pair(&self, t: &mut Tally, f: &Bundle, q: &Bundle) {
        if f.is_zero() || q.is_zero() || !slopewise_dominates(f, q) {
            return;
        }
        t.record("reduction.max_reduction_properties", &[f, q], (|| {
            let r = max_slope_reduction(f, q)?;
            ensure(r.rank() == f.rank(), || format!("rank {}", r.rank()))?;
            ensure(r.mu_max()? == q.mu_max()?, || format!("μ_max({r}) ≠ μ_max(Q)"))?;
            ensure(slopewise_dominates(f, &r), || format!("F does not dominate {r}"))?;
            ensure(slopewise_dominates(&r, q), || format!("{r} does not dominate Q"))?;
            ensure(f.mu_max()? != q.mu_max()? || r == *f, || "changed F with equal μ_max".into())
        })());
    }

    fn key_triple(&self, t: &mut Tally, e: &Bundle, f: &Bundle, q: &Bundle) {
        let ins = [e, f, q];
        let c = |f: &Bundle| c_value_with(e, f, q, self.pairing);

        if first_violated_hypothesis(e, f, q).is_none() {
            let v = c(f);
            t.record("reduction.key_inequality", &ins, (|| {
                let v = v.clone()?;
                ensure(v >= 0, || format!("c = {v}"))
            })());
            // Stated as "equality iff Q = F"; fails when E has a slope equal
            // to a slope of F, since those pairings contribute zero.
            t.record("reduction.key_inequality_equality", &ins, (|| {
                let v = v.clone()?;
                ensure((v == 0) == (f == q), || format!("c = {v}, F = Q is {}", f == q))
            })());
        }

        // Hypotheses of the single-step propositions: (i) without its
        // equality clause, (ii), (iii), integer slopes, rk F = rk Q.
        let step_ok = !e.is_zero()
            && !f.is_zero()
            && !q.is_zero()
            && f.rank() == q.rank()
            && rank_inequality_le(e, f)
            && is_quotient(e, q).answer
            && slopewise_dominates(f, q);
        if !step_ok {
            return;
        }

        let bar = max_slope_reduction(f, q);
        let drop = bar.clone().and_then(|bar| Ok((c(f)?, c(&bar)?)));
        t.record("reduction.max_reduction_step", &ins, (|| {
            let (before, after) = drop.clone()?;
            ensure(before >= after, || format!("c rose from {before} to {after}"))
        })());
        if is_quotient(e, f).answer {
            t.record("reduction.max_reduction_strict", &ins, (|| {
                let (before, after) = drop.clone()?;
                let trivial = f.mu_max()? == q.mu_max()?;
                ensure(trivial || before > after, || format!("no strict drop at c = {before}"))
            })());
        }

        let trace = slope_reduction_sequence(e, f, q);
        t.record("reduction.sequence", &ins, (|| {
            let trace = trace.clone()?;
            let n = trace.steps.len() as u64;
            ensure(trace.terminated, || "did not terminate".into())?;
            ensure(n <= q.rank() + 1, || format!("{n} steps"))?;
            ensure(trace.last_f() == Some(q), || "does not end at Q".into())?;
            let ranks: Vec<u64> = trace.steps.iter().map(|s| s.u.rank()).collect();
            ensure(ranks.windows(2).all(|w| w[0] < w[1]), || format!("rk U_n = {ranks:?}"))?;
            let cs = trace.c_values();
            for (k, w) in cs.windows(2).enumerate() {
                ensure(w[0] >= w[1], || format!("c_n = {cs:?} rises at {k}"))?;
            }
            for s in &trace.steps {
                let f = &s.f;
                let kept = f.rank() == q.rank()
                    && f.has_integer_slopes()
                    && rank_inequality_le(e, f)
                    && slopewise_dominates(f, q);
                ensure(kept, || format!("hypotheses lost at F_n = {f}"))?;
            }
            Ok(())
        })());
        if is_quotient(e, f).answer {
            t.record("reduction.sequence_strict_drop", &ins, (|| {
                let cs = trace.clone()?.c_values();
                ensure(cs.len() < 2 || cs[0] > cs[1], || format!("c_n = {cs:?}"))
            })());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(max_rank: u64, d: u64, include_zero: bool) -> EnumBounds {
        EnumBounds { max_rank, max_abs_degree: d, max_denominator: 1, include_zero }
    }

    #[test]
    fn rank_one_integers() {
        let got: Vec<String> =
            enumerate_bundles(&ints(1, 1, false)).iter().map(|b| b.to_string()).collect();
        assert_eq!(got, vec!["O(1)", "O(0)", "O(-1)"]);
    }

    #[test]
    fn include_zero_adds_one() {
        let b = EnumBounds::DEFAULT;
        let with = enumerate_bundles(&b).len();
        let without = enumerate_bundles(&EnumBounds { include_zero: false, ..b }).len();
        assert_eq!(with, without + 1);
    }

    #[test]
    fn limit_is_reported() {
        assert!(enumerate_bundles_limited(&EnumBounds::DEFAULT, 10).is_none());
        let r = run_property_suite_with(
            &EnumBounds::DEFAULT,
            &SuiteOptions { max_bundles: 10, ..SuiteOptions::default() },
        );
        assert!(matches!(r, Err(VerifyError::ResourceExhausted(_))));
    }

    #[test]
    fn invalid_bounds() {
        let bad = EnumBounds { max_rank: 0, ..EnumBounds::DEFAULT };
        assert!(matches!(run_property_suite(&bad), Err(VerifyError::InvalidBounds(_))));
    }

    #[test]
    fn oracle_examples() {
        let p = |s: &str| parse_bundle(s).unwrap();
        assert_eq!(oracle_deg_pair_nonneg(&p("O(1) + O(-1)"), &p("O(1) + O(-1)")).unwrap(), 2);
        assert_eq!(oracle_deg_pair_nonneg(&p("O(1/2)^2"), &p("O(1/2)^2")).unwrap(), 0);
        assert_eq!(oracle_deg_pair_nonneg(&p("O(0)"), &p("O(1)")).unwrap(), 1);
    }

    #[test]
    fn rank_one_suite_passes() {
        let report = run_property_suite(&EnumBounds::new(1, 2, 1).unwrap()).unwrap();
        assert!(report.passed(), "{:?}", report.failing_properties());
        assert!(report.total_checked() > 0);
    }

    #[test]
    fn small_suite_fails_only_on_refuted_claims() {
        let bounds = EnumBounds::new(3, 2, 2).unwrap();
        let one = run_property_suite(&bounds).unwrap();
        assert_eq!(one.failing_properties(), REFUTED_CLAIMS.to_vec());
        let four =
            run_property_suite_with(&bounds, &SuiteOptions { jobs: 4, ..SuiteOptions::default() })
                .unwrap();
        assert_eq!(one, four);
    }

    fn flipped_cross(v: &Bundle, w: &Bundle) -> Result<i64> {
        // Mutant: pairs counted when the cross product is negative.
        let mut sum = 0;
        for a in v.hn_vectors() {
            for b in w.hn_vectors() {
                let c = a.y * b.x - a.x * b.y;
                if c >= 0 {
                    sum += c;
                }
            }
        }
        Ok(sum)
    }

    #[test]
    fn fault_injection_is_caught() {
        let opts = SuiteOptions { pairing: flipped_cross, ..SuiteOptions::default() };
        let report = run_property_suite_with(&EnumBounds::new(2, 1, 1).unwrap(), &opts).unwrap();
        assert!(!report.passed());
        let oracle = &report.properties["pairing.oracle_agreement"];
        assert!(!oracle.failures.is_empty());
        assert!(oracle.failures.len() <= MAX_STORED_FAILURES);
    }
}
