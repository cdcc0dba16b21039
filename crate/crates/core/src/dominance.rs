//! Slopewise dominance of left-aligned HN polygons.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bundle::{zip_segments, Bundle, SliceMode};
use crate::error::{HnError, Result};
use crate::slope::Slope;

/// `V` slopewise dominates `W` when `rank V ≥ rank W` and on every
/// `[i-1, i]` with `i ≤ rank W` the slope of `HN(W)` is at most that of `HN(V)`.
pub fn slopewise_dominates(v: &Bundle, w: &Bundle) -> bool {
    v.rank() >= w.rank() && zip_segments(v, w).iter().all(|&(_, _, sv, sw)| sw <= sv)
}

fn slope_union(v: &Bundle, w: &Bundle) -> BTreeSet<Slope> {
    v.slopes().chain(w.slopes()).collect()
}

/// Dominance through `rk(V^{≥μ}) ≥ rk(W^{≥μ})`; both sides are step functions
/// of μ that only jump at HN slopes, so those are the only μ checked.
pub fn dominates_via_ranks(v: &Bundle, w: &Bundle) -> bool {
    slope_union(v, w)
        .into_iter()
        .all(|mu| v.rank_slice(mu, SliceMode::Ge) >= w.rank_slice(mu, SliceMode::Ge))
}

/// `V ≅ U ⊕ V'` and `W ≅ U ⊕ W'` where `U` is the maximal common initial
/// part of the two polygons.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CommonFactorDecomposition {
    pub common: Bundle,
    pub v_rest: Bundle,
    pub w_rest: Bundle,
}

pub fn common_factor_decompose(v: &Bundle, w: &Bundle) -> Result<CommonFactorDecomposition> {
    if !slopewise_dominates(v, w) {
        return Err(HnError::NotDominant);
    }
    // Largest r with zero vertical gap: the polygons agree exactly up to the
    // first unit interval where the slopes differ.
    let agree = zip_segments(v, w)
        .into_iter()
        .take_while(|&(_, _, sv, sw)| sv == sw)
        .last()
        .map_or(0, |(_, end, _, _)| end);
    let (common, w_rest) = w.split_at_rank(agree)?;
    let (v_common, v_rest) = v.split_at_rank(agree)?;
    if v_common != common {
        return Err(HnError::InvariantViolated(format!(
            "common parts differ: {v_common} vs {common}"
        )));
    }
    Ok(CommonFactorDecomposition { common, v_rest, w_rest })
}

/// For equal ranks, `V` dominates `W` iff `W^∨` dominates `V^∨`. Returns the
/// shared answer, or an error if the two sides ever disagree.
pub fn equal_rank_duality_holds(v: &Bundle, w: &Bundle) -> Result<bool> {
    if v.rank() != w.rank() {
        return Err(HnError::RankMismatch { left: v.rank(), right: w.rank() });
    }
    let direct = slopewise_dominates(v, w);
    let dual = slopewise_dominates(&w.dual(), &v.dual());
    if direct != dual {
        return Err(HnError::InvariantViolated(format!(
            "equal-rank duality fails for {v} and {w}"
        )));
    }
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(i64, i64, i64)]) -> Bundle {
        Bundle::from_factors(pairs.iter().map(|&(n, d, m)| (Slope::new(n, d).unwrap(), m)))
            .unwrap()
    }

    #[test]
    fn dominance_examples() {
        let cases = [
            (b(&[(1, 1, 1), (0, 1, 1)]), b(&[(0, 1, 1), (-1, 1, 1)]), true),
            (b(&[(1, 1, 2)]), b(&[(2, 1, 1)]), false),
            (b(&[(1, 1, 2)]), Bundle::zero(), true),
            (Bundle::zero(), Bundle::zero(), true),
            (Bundle::zero(), b(&[(0, 1, 1)]), false),
        ];
        for (v, w, expected) in cases {
            assert_eq!(slopewise_dominates(&v, &w), expected, "{v} vs {w}");
            assert_eq!(dominates_via_ranks(&v, &w), expected, "{v} vs {w}");
        }
        let v = b(&[(1, 1, 2)]);
        assert_eq!(v.rank_slice(Slope::integer(2), SliceMode::Ge), 0);
        assert!(slopewise_dominates(&v, &v));
    }

    #[test]
    fn decomposition_examples() {
        let d = common_factor_decompose(&b(&[(2, 1, 1), (1, 1, 1)]), &b(&[(2, 1, 1), (-1, 1, 1)]))
            .unwrap();
        assert_eq!(d.common, b(&[(2, 1, 1)]));
        assert_eq!(d.v_rest, b(&[(1, 1, 1)]));
        assert_eq!(d.w_rest, b(&[(-1, 1, 1)]));

        let v = b(&[(1, 1, 1)]);
        let w = b(&[(0, 1, 1)]);
        let d = common_factor_decompose(&v, &w).unwrap();
        assert_eq!((d.common, d.v_rest, d.w_rest), (Bundle::zero(), v.clone(), w.clone()));

        let d = common_factor_decompose(&v, &v).unwrap();
        assert_eq!((d.common, d.v_rest, d.w_rest), (v.clone(), Bundle::zero(), Bundle::zero()));

        assert_eq!(common_factor_decompose(&w, &v), Err(HnError::NotDominant));
    }

    #[test]
    fn decomposition_through_fractional_block() {
        // O(1/2)^2 and O(1/2) + O(-1) share the first half of the block.
        let v = b(&[(1, 2, 2)]);
        let w = b(&[(1, 2, 1), (-1, 1, 1)]);
        let d = common_factor_decompose(&v, &w).unwrap();
        assert_eq!(d.common, b(&[(1, 2, 1)]));
        assert_eq!(d.v_rest, b(&[(1, 2, 1)]));
        assert_eq!(d.w_rest, b(&[(-1, 1, 1)]));
    }

    #[test]
    fn duality_examples() {
        let v = b(&[(1, 1, 1), (0, 1, 1)]);
        let w = b(&[(0, 1, 1), (-1, 1, 1)]);
        assert!(equal_rank_duality_holds(&v, &w).unwrap());
        assert!(equal_rank_duality_holds(&v, &v).unwrap());
        assert!(matches!(
            equal_rank_duality_holds(&b(&[(2, 1, 1)]), &w),
            Err(HnError::RankMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn total_degree_not_monotone() {
        let v = b(&[(1, 1, 4), (-1, 1, 4)]);
        let w = b(&[(1, 3, 1)]);
        assert!(slopewise_dominates(&v, &w));
        assert!(v.degree() < w.degree());
        assert!(v.degree_nonneg() >= w.degree_nonneg());
    }
}
