//! The quantity `c_{E,F}(Q)`, maximal slope reduction, the slope-reduction
//! sequence `(F_n)` and a hypothesis-aware checker for the key inequality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, SliceMode};
use crate::classify::is_quotient;
use crate::dominance::{common_factor_decompose, dominates_via_ranks, slopewise_dominates};
use crate::error::{HnError, Result};
use crate::pairing::deg_pair_nonneg;

/// `deg(E^∨⊗F)^{≥0} + deg(Q^∨⊗Q)^{≥0} − deg(E^∨⊗Q)^{≥0} − deg(Q^∨⊗F)^{≥0}`.
pub fn c_value(e: &Bundle, f: &Bundle, q: &Bundle) -> Result<i64> {
    c_value_with(e, f, q, deg_pair_nonneg)
}

/// [`c_value`] with the pairing supplied by the caller.
pub fn c_value_with<P>(e: &Bundle, f: &Bundle, q: &Bundle, pair: P) -> Result<i64>
where
    P: Fn(&Bundle, &Bundle) -> Result<i64>,
{
    let terms = [pair(e, f)?, pair(q, q)?, pair(e, q)?, pair(q, f)?];
    let total = terms[0] as i128 + terms[1] as i128 - terms[2] as i128 - terms[3] as i128;
    i64::try_from(total).map_err(|_| HnError::Overflow)
}

fn require_integer_slopes(bundles: &[(&str, &Bundle)]) -> Result<()> {
    match bundles.iter().find(|(_, b)| !b.has_integer_slopes()) {
        Some((name, b)) => Err(HnError::NonIntegerSlope(format!("{name} = {b}"))),
        None => Ok(()),
    }
}

/// `O(μ_max W)^{rk V^{>μ_max W}} ⊕ V^{≤μ_max W}`.
pub fn max_slope_reduction(v: &Bundle, w: &Bundle) -> Result<Bundle> {
    if v.is_zero() {
        return Err(HnError::ZeroBundle("V"));
    }
    if w.is_zero() {
        return Err(HnError::ZeroBundle("W"));
    }
    require_integer_slopes(&[("V", v), ("W", w)])?;
    if !slopewise_dominates(v, w) {
        return Err(HnError::NotDominant);
    }
    let top = w.mu_max()?;
    let lowered = Bundle::stable_pow(top, v.rank_slice(top, SliceMode::Gt))?;
    lowered.direct_sum(&v.slice(top, SliceMode::Le))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReductionStep {
    pub f: Bundle,
    pub u: Bundle,
    pub c: i64,
}

/// The sequence `(F_n, U_n, c_{E,F_n}(Q))` of the cutting-down procedure.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub terminated: bool,
}

impl ReductionTrace {
    pub fn c_values(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.c).collect()
    }

    pub fn last_f(&self) -> Option<&Bundle> {
        self.steps.last().map(|s| &s.f)
    }
}

/// Runs `F_{n+1} = U_n ⊕ \bar{F'_n}` until `F_n = Q`.
///
/// The rank of `U_n` strictly grows, so more than `rank(Q) + 1` steps means
/// a broken invariant and is reported as an error rather than looping.
pub fn slope_reduction_sequence(e: &Bundle, f: &Bundle, q: &Bundle) -> Result<ReductionTrace> {
    if f.is_zero() {
        return Err(HnError::ZeroBundle("F"));
    }
    if q.is_zero() {
        return Err(HnError::ZeroBundle("Q"));
    }
    if f.rank() != q.rank() {
        return Err(HnError::RankMismatch { left: f.rank(), right: q.rank() });
    }
    require_integer_slopes(&[("E", e), ("F", f), ("Q", q)])?;
    if !slopewise_dominates(f, q) {
        return Err(HnError::NotDominant);
    }

    let limit = q.rank() + 1;
    let mut steps = Vec::new();
    let mut current = f.clone();
    loop {
        let split = common_factor_decompose(&current, q)?;
        let c = c_value(e, &current, q)?;
        let done = split.w_rest.is_zero();
        steps.push(ReductionStep { f: current.clone(), u: split.common.clone(), c });
        if done {
            return Ok(ReductionTrace { steps, terminated: true });
        }
        if steps.len() as u64 >= limit {
            return Err(HnError::InvariantViolated(format!(
                "reduction of {f} towards {q} exceeded {limit} steps"
            )));
        }
        let reduced = max_slope_reduction(&split.v_rest, &split.w_rest)?;
        current = split.common.direct_sum(&reduced)?;
    }
}

/// Hypotheses of the key inequality, in the paper's numbering.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    I,
    Ii,
    Iii,
    Iv,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::I => "i",
            Hypothesis::Ii => "ii",
            Hypothesis::Iii => "iii",
            Hypothesis::Iv => "iv",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KeyInequalityReport {
    pub c: i64,
    pub hypotheses_ok: bool,
    /// First failing hypothesis in the order (i) to (iv).
    pub violated_hypothesis: Option<Hypothesis>,
    /// `(c = 0) ⟺ (F = Q)` on this instance.
    pub equality_consistent: bool,
    /// `c ≥ 0` together with `equality_consistent`.
    pub conclusion_holds: bool,
}

/// First hypothesis of the key inequality violated by `(E, F, Q)`, if any.
/// Zero `E` or `F` has no minimal slope and so fails (iv).
pub fn first_violated_hypothesis(e: &Bundle, f: &Bundle, q: &Bundle) -> Option<Hypothesis> {
    if !is_quotient(e, f).answer {
        return Some(Hypothesis::I);
    }
    if !is_quotient(e, q).answer {
        return Some(Hypothesis::Ii);
    }
    if !dominates_via_ranks(f, q) {
        return Some(Hypothesis::Iii);
    }
    match (e.mu_min(), f.mu_min()) {
        (Ok(a), Ok(b)) if a < b => None,
        _ => Some(Hypothesis::Iv),
    }
}

/// Reports the hypotheses and the conclusion of the key inequality on one
/// instance. Never rejects; the only error is arithmetic overflow.
pub fn key_inequality_check(e: &Bundle, f: &Bundle, q: &Bundle) -> Result<KeyInequalityReport> {
    let c = c_value(e, f, q)?;
    let violated = first_violated_hypothesis(e, f, q);
    let equality_consistent = (c == 0) == (f == q);
    Ok(KeyInequalityReport {
        c,
        hypotheses_ok: violated.is_none(),
        violated_hypothesis: violated,
        equality_consistent,
        conclusion_holds: c >= 0 && equality_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::Slope;

    fn b(pairs: &[(i64, i64)]) -> Bundle {
        Bundle::from_factors(pairs.iter().map(|&(n, m)| (Slope::integer(n), m))).unwrap()
    }

    #[test]
    fn c_value_examples() {
        assert_eq!(c_value(&b(&[(0, 3)]), &b(&[(0, 2)]), &b(&[(0, 1)])).unwrap(), 0);
        let e = b(&[(1, 2), (-1, 2)]);
        let f = b(&[(1, 2)]);
        let q = b(&[(1, 1), (0, 1)]);
        assert_eq!(c_value(&e, &f, &q).unwrap(), 1);
        assert_eq!(c_value(&e, &f, &f).unwrap(), 0);
        assert_eq!(c_value(&Bundle::zero(), &Bundle::zero(), &Bundle::zero()).unwrap(), 0);
    }

    #[test]
    fn max_reduction_examples() {
        assert_eq!(
            max_slope_reduction(&b(&[(3, 1), (1, 1)]), &b(&[(1, 1), (0, 1)])).unwrap(),
            b(&[(1, 2)])
        );
        assert_eq!(max_slope_reduction(&b(&[(2, 2)]), &b(&[(0, 2)])).unwrap(), b(&[(0, 2)]));
        let v = b(&[(1, 1), (-1, 1)]);
        assert_eq!(max_slope_reduction(&v, &b(&[(1, 1)])).unwrap(), v);
        let half = Bundle::stable(Slope::new(1, 2).unwrap());
        assert!(matches!(
            max_slope_reduction(&b(&[(1, 3)]), &half),
            Err(HnError::NonIntegerSlope(_))
        ));
        assert_eq!(max_slope_reduction(&b(&[(0, 1)]), &b(&[(1, 1)])), Err(HnError::NotDominant));
        assert!(max_slope_reduction(&Bundle::zero(), &b(&[(0, 1)])).is_err());
    }

    #[test]
    fn sequence_examples() {
        let e = b(&[(1, 2), (-1, 2)]);
        let f = b(&[(1, 2)]);
        let q = b(&[(1, 1), (0, 1)]);
        let t = slope_reduction_sequence(&e, &f, &q).unwrap();
        assert!(t.terminated);
        assert_eq!(t.c_values(), vec![1, 0]);
        assert_eq!(t.steps[0].u, b(&[(1, 1)]));
        assert_eq!(t.last_f(), Some(&q));

        let t = slope_reduction_sequence(&e, &q, &q).unwrap();
        assert_eq!(t.c_values(), vec![0]);

        let q = b(&[(0, 2)]);
        let t = slope_reduction_sequence(&b(&[(0, 2), (-1, 1)]), &b(&[(2, 1), (0, 1)]), &q).unwrap();
        assert!(t.steps.len() <= 3);
        assert_eq!(t.last_f(), Some(&q));
    }

    #[test]
    fn sequence_rejects_bad_input() {
        let q = b(&[(0, 2)]);
        assert!(slope_reduction_sequence(&q, &b(&[(0, 1)]), &q).is_err());
        assert!(slope_reduction_sequence(&q, &Bundle::zero(), &q).is_err());
        assert_eq!(slope_reduction_sequence(&q, &b(&[(-1, 2)]), &q), Err(HnError::NotDominant));
        let half = Bundle::stable_pow(Slope::new(1, 2).unwrap(), 1).unwrap();
        assert!(slope_reduction_sequence(&q, &half, &q).is_err());
    }

    #[test]
    fn key_inequality_examples() {
        let e = b(&[(1, 2), (-1, 2)]);
        let f = b(&[(1, 2)]);
        let q = b(&[(1, 1), (0, 1)]);
        let r = key_inequality_check(&e, &f, &q).unwrap();
        assert!(r.hypotheses_ok && r.equality_consistent && r.conclusion_holds);
        assert_eq!(r.c, 1);

        let r = key_inequality_check(&b(&[(0, 3)]), &b(&[(0, 2)]), &b(&[(0, 1)])).unwrap();
        assert_eq!(r.c, 0);
        assert!(!r.hypotheses_ok);
        assert_eq!(r.violated_hypothesis, Some(Hypothesis::Iv));
        assert!(!r.equality_consistent);

        let r = key_inequality_check(&e, &f, &f).unwrap();
        assert_eq!(r.c, 0);
        assert!(r.equality_consistent);
    }
}
