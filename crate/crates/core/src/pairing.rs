//! Degree pairings `deg(V^∨ ⊗ W)` computed from HN vectors, plus the
//! Hom/cohomology vanishing predicates built on them.

use serde::{Deserialize, Serialize};

use crate::bundle::{Bundle, HnVector};
use crate::error::{HnError, Result};
use crate::slope::Slope;

/// `v × w = v_x w_y − v_y w_x`. Exact for all `i64` inputs.
pub fn cross(v: HnVector, w: HnVector) -> i128 {
    v.x as i128 * w.y as i128 - v.y as i128 * w.x as i128
}

/// `μ(v) ≤ μ(w)`, compared without division.
pub fn preceq(v: HnVector, w: HnVector) -> Result<bool> {
    if v.x == 0 || w.x == 0 {
        return Err(HnError::ZeroXComponent);
    }
    let lhs = v.y as i128 * w.x as i128;
    let rhs = w.y as i128 * v.x as i128;
    let flip = (v.x < 0) != (w.x < 0);
    Ok(if flip { lhs >= rhs } else { lhs <= rhs })
}

fn narrow(total: i128) -> Result<i64> {
    i64::try_from(total).map_err(|_| HnError::Overflow)
}

/// The total and nonnegative-part degrees of `V^∨ ⊗ W`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PairingValue {
    pub total_degree: i64,
    pub nonneg_degree: i64,
}

/// Both pairings in one pass over the HN-vector pairs.
pub fn pairing(v: &Bundle, w: &Bundle) -> Result<PairingValue> {
    let vs = v.hn_vectors();
    let ws = w.hn_vectors();
    let mut total: i128 = 0;
    let mut nonneg: i128 = 0;
    for &a in &vs {
        for &b in &ws {
            let c = cross(a, b);
            total = total.checked_add(c).ok_or(HnError::Overflow)?;
            if c >= 0 {
                nonneg = nonneg.checked_add(c).ok_or(HnError::Overflow)?;
            }
        }
    }
    Ok(PairingValue { total_degree: narrow(total)?, nonneg_degree: narrow(nonneg)? })
}

/// `deg(V^∨ ⊗ W) = Σ_{i,j} v_i × w_j`.
pub fn deg_pair(v: &Bundle, w: &Bundle) -> Result<i64> {
    pairing(v, w).map(|p| p.total_degree)
}

/// `deg(V^∨ ⊗ W)^{≥0} = Σ_{v_i ⪯ w_j} v_i × w_j`.
///
/// For HN vectors `v_i ⪯ w_j` holds exactly when `v_i × w_j ≥ 0`, since
/// both x-components are positive.
pub fn deg_pair_nonneg(v: &Bundle, w: &Bundle) -> Result<i64> {
    let mut sum: i128 = 0;
    for a in v.hn_vectors() {
        for b in w.hn_vectors() {
            if preceq(a, b)? {
                sum = sum.checked_add(cross(a, b)).ok_or(HnError::Overflow)?;
            }
        }
    }
    narrow(sum)
}

/// `Hom(V, W) = 0` when `μ_min(V) > μ_max(W)`; trivially so if either is zero.
pub fn hom_is_zero(v: &Bundle, w: &Bundle) -> bool {
    match (v.mu_min(), w.mu_max()) {
        (Ok(lo), Ok(hi)) => lo > hi,
        _ => true,
    }
}

/// Dimension of the moduli of bundle maps `V → W`, i.e. `deg(V^∨ ⊗ W)^{≥0}`.
pub fn hom_moduli_dim(v: &Bundle, w: &Bundle) -> Result<i64> {
    deg_pair_nonneg(v, w)
}

/// Vanishing of `H^0` and `H^1` of the stable bundle `O(λ)`.
///
/// `h1_is_zero == false` means "not guaranteed", not a claim of nonvanishing.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CohomologyVanishing {
    pub h0_is_zero: bool,
    pub h1_is_zero: bool,
}

pub fn cohomology_vanishing(lambda: Slope) -> CohomologyVanishing {
    CohomologyVanishing { h0_is_zero: lambda.is_negative(), h1_is_zero: !lambda.is_negative() }
}

/// Sufficient criterion for `Ext^1(V, W) = H^1(V^∨ ⊗ W) = 0`: every slope of
/// `V^∨ ⊗ W` is nonnegative, i.e. `μ_min(W) ≥ μ_max(V)`.
pub fn ext1_vanishes_sufficient(v: &Bundle, w: &Bundle) -> Result<bool> {
    Ok(w.mu_min()? >= v.mu_max()?)
}
