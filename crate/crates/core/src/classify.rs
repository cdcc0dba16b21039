//! Decision procedures for quotient bundles, subbundles and global generation.
//!
//! Every quantifier over `μ ∈ ℚ` is reduced to the finite set of HN slopes of
//! the inputs plus one sentinel outside their range: the rank of a slice is a
//! step function of μ that only jumps at HN slopes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, SliceMode};
use crate::dominance::slopewise_dominates;
use crate::error::{HnError, Result};
use crate::slope::Slope;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailedCondition {
    RankInequality,
    EqualityCase,
    PolygonSlope,
    PolygonVertex,
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailedCondition::RankInequality => "rank-inequality",
            FailedCondition::EqualityCase => "equality-case",
            FailedCondition::PolygonSlope => "polygon-slope",
            FailedCondition::PolygonVertex => "polygon-vertex",
        })
    }
}

/// A yes/no answer with an explanation attached to every "no".
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub answer: bool,
    pub witness_mu: Option<Slope>,
    pub failed_condition: Option<FailedCondition>,
}

impl ClassificationVerdict {
    pub const YES: ClassificationVerdict =
        ClassificationVerdict { answer: true, witness_mu: None, failed_condition: None };

    pub fn no(mu: Slope, condition: FailedCondition) -> Self {
        ClassificationVerdict { answer: false, witness_mu: Some(mu), failed_condition: Some(condition) }
    }
}

fn test_slopes(a: &Bundle, b: &Bundle, sentinel_below: bool) -> BTreeSet<Slope> {
    let mut slopes: BTreeSet<Slope> = a.slopes().chain(b.slopes()).collect();
    let sentinel = if sentinel_below {
        slopes.first().map(|&lo| lo.checked_sub(Slope::integer(1)))
    } else {
        slopes.last().map(|&hi| hi.checked_add(Slope::integer(1)))
    };
    // Inputs with no slopes, or with a slope at the edge of i64 where the
    // sentinel is unrepresentable, get none; both slices are zero there anyway.
    if let Some(Ok(s)) = sentinel {
        slopes.insert(s);
    }
    slopes
}

/// Rank inequalities `rk(big^{mode μ}) ≥ rk(small^{mode μ})` with equality
/// only when the slices coincide, scanned over `mus` in order.
fn rank_conditions<'a>(
    big: &Bundle,
    small: &Bundle,
    mode: SliceMode,
    mus: impl Iterator<Item = &'a Slope>,
) -> ClassificationVerdict {
    for &mu in mus {
        let rb = big.rank_slice(mu, mode);
        let rs = small.rank_slice(mu, mode);
        if rb < rs {
            return ClassificationVerdict::no(mu, FailedCondition::RankInequality);
        }
        if rb == rs && big.slice(mu, mode) != small.slice(mu, mode) {
            return ClassificationVerdict::no(mu, FailedCondition::EqualityCase);
        }
    }
    ClassificationVerdict::YES
}

/// `F` is a quotient of `E` iff `rk(E^{≤μ}) ≥ rk(F^{≤μ})` for every μ, with
/// `E^{≤μ} ≅ F^{≤μ}` whenever the ranks agree.
pub fn is_quotient(e: &Bundle, f: &Bundle) -> ClassificationVerdict {
    if f.is_zero() {
        return ClassificationVerdict::YES;
    }
    let mus = test_slopes(e, f, true);
    rank_conditions(e, f, SliceMode::Le, mus.iter())
}

/// Same classification read off the polygons aligned at their right endpoints.
///
/// Slope of `HN(B)` on `[-i, -i+1]` is the negated slope of `HN(B^∨)` on
/// `[i-1, i]`. A segment of `HN(E)` left of its polygon acts as slope `+∞`,
/// so at `j = rank(E)` the vertex clause demands full agreement.
pub fn is_quotient_polygonal(e: &Bundle, f: &Bundle) -> ClassificationVerdict {
    if f.is_zero() {
        return ClassificationVerdict::YES;
    }
    let (ed, fd) = (e.dual(), f.dual());
    let right_slope = |dual: &Bundle, i: u64| -> Option<Slope> {
        dual.slope_on_interval(i).ok().map(|s| -s)
    };
    for i in 1..=f.rank() {
        let sf = right_slope(&fd, i).expect("i within rank(F)");
        match right_slope(&ed, i) {
            Some(se) if sf >= se => {}
            _ => return ClassificationVerdict::no(sf, FailedCondition::PolygonSlope),
        }
    }
    // Right-aligned vertex at -j corresponds to the dual's vertex at j.
    let common: BTreeSet<u64> =
        ed.vertex_set().intersection(&fd.vertex_set()).copied().collect();
    for j in common {
        if j == 0 {
            continue;
        }
        let sf = right_slope(&fd, j).expect("j within rank(F)");
        let clause_ok = match right_slope(&ed, j + 1) {
            Some(se) => sf >= se,
            None => false,
        };
        if clause_ok {
            continue;
        }
        let agree = (1..=j).all(|i| right_slope(&fd, i) == right_slope(&ed, i));
        if !agree {
            return ClassificationVerdict::no(sf, FailedCondition::PolygonVertex);
        }
    }
    ClassificationVerdict::YES
}

/// Sufficient condition for `D` to embed in `E`: `rk(E^{≥μ}) ≥ rk(D^{≥μ})`
/// with equality only when `E^{≥μ} ≅ D^{≥μ}`. A "no" is inconclusive.
pub fn subbundle_sufficient(e: &Bundle, d: &Bundle) -> ClassificationVerdict {
    if d.is_zero() {
        return ClassificationVerdict::YES;
    }
    let mus = test_slopes(e, d, false);
    rank_conditions(e, d, SliceMode::Ge, mus.iter().rev())
}

/// Necessary condition for `D` to be a subbundle of `E`, namely
/// `rk(E^{≥μ}) ≥ rk(D^{≥μ})` for every μ. Conjecturally also sufficient;
/// a `true` here is not a proof of embeddability.
pub fn subbundle_necessary(e: &Bundle, d: &Bundle) -> bool {
    slopewise_dominates(e, d)
}

/// `F` is generated by `n` global sections iff all its slopes are
/// nonnegative and `rank F ≤ n`, with equality only for `F ≅ O^n`.
pub fn is_globally_generated(f: &Bundle, n: u64) -> Result<bool> {
    if n < 1 {
        return Err(HnError::InvalidArgument("number of sections must be at least 1".into()));
    }
    if f.is_zero() {
        return Ok(true);
    }
    if f.mu_min()?.is_negative() || f.rank() > n {
        return Ok(false);
    }
    Ok(f.rank() < n || f.factors().len() == 1 && f.factors()[0].slope == Slope::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(i64, i64, i64)]) -> Bundle {
        Bundle::from_factors(pairs.iter().map(|&(n, d, m)| (Slope::new(n, d).unwrap(), m)))
            .unwrap()
    }

    fn both(e: &Bundle, f: &Bundle) -> bool {
        let a = is_quotient(e, f).answer;
        assert_eq!(a, is_quotient_polygonal(e, f).answer, "{e} ->> {f}");
        a
    }

    #[test]
    fn quotient_examples() {
        let o2 = b(&[(0, 1, 2)]);
        assert!(both(&o2, &b(&[(1, 1, 1)])));

        let e = b(&[(1, 1, 1), (-1, 1, 1)]);
        let v = is_quotient(&e, &b(&[(0, 1, 1)]));
        assert_eq!(v, ClassificationVerdict::no(Slope::ZERO, FailedCondition::EqualityCase));
        assert!(!both(&e, &b(&[(0, 1, 1)])));

        assert!(both(&e, &e));
        assert!(both(&e, &b(&[(1, 1, 1)])));

        let v = is_quotient(&o2, &b(&[(1, 1, 2)]));
        assert_eq!(v, ClassificationVerdict::no(Slope::integer(1), FailedCondition::EqualityCase));
        let p = is_quotient_polygonal(&o2, &b(&[(1, 1, 2)]));
        assert_eq!(p.failed_condition, Some(FailedCondition::PolygonVertex));
        assert!(!both(&o2, &b(&[(1, 1, 2)])));
    }

    #[test]
    fn zero_conventions() {
        let e = b(&[(1, 2, 1)]);
        assert!(both(&e, &Bundle::zero()));
        assert!(both(&Bundle::zero(), &Bundle::zero()));
        assert!(!both(&Bundle::zero(), &e));
        let v = is_quotient_polygonal(&Bundle::zero(), &e);
        assert_eq!(v.failed_condition, Some(FailedCondition::PolygonSlope));
    }

    #[test]
    fn subbundle_examples() {
        let e = b(&[(1, 1, 1), (0, 1, 1)]);
        assert!(subbundle_sufficient(&e, &b(&[(0, 1, 1)])).answer);
        let v = subbundle_sufficient(&b(&[(0, 1, 2)]), &b(&[(1, 1, 1)]));
        assert_eq!(v, ClassificationVerdict::no(Slope::integer(1), FailedCondition::RankInequality));
        assert!(subbundle_sufficient(&e, &Bundle::zero()).answer);

        let e = b(&[(1, 1, 4), (-1, 1, 4)]);
        let d = b(&[(1, 3, 1)]);
        assert!(subbundle_necessary(&e, &d));
        assert!(subbundle_sufficient(&e, &d).answer);
        assert!(!subbundle_necessary(&b(&[(0, 1, 1)]), &b(&[(1, 1, 1)])));
        assert!(subbundle_necessary(&e, &Bundle::zero()));
    }

    #[test]
    fn global_generation() {
        assert!(is_globally_generated(&b(&[(1, 1, 1)]), 2).unwrap());
        assert!(!is_globally_generated(&b(&[(1, 1, 2)]), 2).unwrap());
        for n in 1..5 {
            assert!(is_globally_generated(&Bundle::trivial(n).unwrap(), n).unwrap());
        }
        assert!(!is_globally_generated(&b(&[(1, 1, 1), (-1, 1, 1)]), 5).unwrap());
        assert!(is_globally_generated(&Bundle::zero(), 1).unwrap());
        assert!(is_globally_generated(&b(&[(0, 1, 1)]), 0).is_err());
    }
}
