//! Canonical HN decompositions and the single-bundle operations on them.
//!
//! A vector bundle on the curve is determined by its HN polygon, so a
//! [`Bundle`] is just the list of its stable constituents `O(λ)^m` with
//! strictly decreasing slopes.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{HnError, Result};
use crate::slope::Slope;

/// One HN block `O(slope)^mult`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct HnFactor {
    pub slope: Slope,
    pub mult: u64,
}

impl HnFactor {
    pub fn rank(&self) -> u64 {
        self.mult * self.slope.den() as u64
    }

    pub fn degree(&self) -> i64 {
        self.mult as i64 * self.slope.num()
    }

    pub fn hn_vector(&self) -> HnVector {
        HnVector { x: self.rank() as i64, y: self.degree() }
    }
}

/// The edge vector `(m·s, m·r)` of an HN block of slope `r/s`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct HnVector {
    pub x: i64,
    pub y: i64,
}

impl HnVector {
    pub fn new(x: i64, y: i64) -> Self {
        HnVector { x, y }
    }

    pub fn slope(&self) -> Result<Slope> {
        if self.x == 0 {
            return Err(HnError::ZeroXComponent);
        }
        Slope::new(self.y, self.x)
    }
}

/// Which HN factors a [`Bundle::slice`] keeps, relative to a threshold slope.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SliceMode {
    Le,
    Lt,
    Ge,
    Gt,
}

impl SliceMode {
    pub fn keeps(self, slope: Slope, mu: Slope) -> bool {
        match self {
            SliceMode::Le => slope <= mu,
            SliceMode::Lt => slope < mu,
            SliceMode::Ge => slope >= mu,
            SliceMode::Gt => slope > mu,
        }
    }
}

impl std::str::FromStr for SliceMode {
    type Err = HnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "le" | "<=" => Ok(SliceMode::Le),
            "lt" | "<" => Ok(SliceMode::Lt),
            "ge" | ">=" => Ok(SliceMode::Ge),
            "gt" | ">" => Ok(SliceMode::Gt),
            _ => Err(HnError::InvalidArgument(format!(
                "slice mode must be one of le, lt, ge, gt (got {s:?})"
            ))),
        }
    }
}

/// A vector bundle, stored as its canonical HN decomposition.
///
/// Invariants: slopes strictly decrease along `factors`, every multiplicity is
/// positive, and the rank, degree and absolute degree `Σ m|r|` all fit in an
/// `i64`. The empty list is the zero bundle.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BundleRepr", into = "BundleRepr")]
pub struct Bundle {
    factors: Vec<HnFactor>,
    rank: u64,
    degree: i64,
}

#[derive(Serialize, Deserialize)]
struct BundleRepr {
    factors: Vec<HnFactor>,
}

impl TryFrom<BundleRepr> for Bundle {
    type Error = HnError;

    fn try_from(repr: BundleRepr) -> Result<Self> {
        Bundle::from_unsigned(repr.factors.into_iter().map(|f| (f.slope, f.mult)))
    }
}

impl From<Bundle> for BundleRepr {
    fn from(b: Bundle) -> Self {
        BundleRepr { factors: b.factors }
    }
}

fn overflow<T>(v: Option<T>) -> Result<T> {
    v.ok_or(HnError::Overflow)
}

impl Bundle {
    pub fn zero() -> Self {
        Bundle { factors: Vec::new(), rank: 0, degree: 0 }
    }

    /// `O(slope)`.
    pub fn stable(slope: Slope) -> Self {
        Self::stable_pow(slope, 1).expect("a single stable bundle always fits")
    }

    /// `O(slope)^mult`.
    pub fn stable_pow(slope: Slope, mult: u64) -> Result<Self> {
        Self::from_unsigned([(slope, mult)])
    }

    /// `O^n`.
    pub fn trivial(n: u64) -> Result<Self> {
        Self::stable_pow(Slope::ZERO, n)
    }

    /// Canonicalizes an arbitrary list of `(slope, multiplicity)` pairs: equal
    /// slopes merge, zero multiplicities vanish, slopes sort decreasingly.
    pub fn from_factors<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Slope, i64)>,
    {
        let mut unsigned = Vec::new();
        for (slope, m) in pairs {
            if m < 0 {
                return Err(HnError::NegativeMultiplicity(m));
            }
            unsigned.push((slope, m as u64));
        }
        Self::from_unsigned(unsigned)
    }

    pub(crate) fn from_unsigned<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Slope, u64)>,
    {
        let mut raw: Vec<(Slope, u64)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        raw.sort_by_key(|&(s, _)| std::cmp::Reverse(s));
        let mut factors: Vec<HnFactor> = Vec::with_capacity(raw.len());
        for (slope, mult) in raw {
            match factors.last_mut() {
                Some(last) if last.slope == slope => {
                    last.mult = overflow(last.mult.checked_add(mult))?;
                }
                _ => factors.push(HnFactor { slope, mult }),
            }
        }
        let mut rank: i64 = 0;
        let mut degree: i64 = 0;
        let mut abs_degree: i64 = 0;
        for f in &factors {
            let m = overflow(i64::try_from(f.mult).ok())?;
            let r = overflow(m.checked_mul(f.slope.den()))?;
            let d = overflow(m.checked_mul(f.slope.num()))?;
            rank = overflow(rank.checked_add(r))?;
            degree = overflow(degree.checked_add(d))?;
            abs_degree = overflow(abs_degree.checked_add(d.abs()))?;
        }
        Ok(Bundle { factors, rank: rank as u64, degree })
    }

    pub fn factors(&self) -> &[HnFactor] {
        &self.factors
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Total slope `degree/rank`.
    pub fn mu(&self) -> Result<Slope> {
        if self.is_zero() {
            return Err(HnError::ZeroBundle("mu"));
        }
        Slope::new(self.degree, self.rank as i64)
    }

    pub fn mu_max(&self) -> Result<Slope> {
        self.factors.first().map(|f| f.slope).ok_or(HnError::ZeroBundle("mu_max"))
    }

    pub fn mu_min(&self) -> Result<Slope> {
        self.factors.last().map(|f| f.slope).ok_or(HnError::ZeroBundle("mu_min"))
    }

    pub fn slopes(&self) -> impl Iterator<Item = Slope> + '_ {
        self.factors.iter().map(|f| f.slope)
    }

    pub fn has_integer_slopes(&self) -> bool {
        self.factors.iter().all(|f| f.slope.is_integer())
    }

    pub fn is_semistable(&self) -> bool {
        self.factors.len() <= 1
    }

    /// Degree of the part with nonnegative slopes, `deg(B^{≥0})`.
    pub fn degree_nonneg(&self) -> i64 {
        self.factors.iter().filter(|f| !f.slope.is_negative()).map(HnFactor::degree).sum()
    }

    pub fn hn_vectors(&self) -> Vec<HnVector> {
        self.factors.iter().map(HnFactor::hn_vector).collect()
    }

    /// `{0, rank} ∪` the cumulative block ranks.
    pub fn vertex_set(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::from([0]);
        let mut x = 0;
        for f in &self.factors {
            x += f.rank();
            out.insert(x);
        }
        out
    }

    /// The edges of the left-aligned polygon as `(start, end, slope)`.
    pub fn segments(&self) -> impl Iterator<Item = (u64, u64, Slope)> + '_ {
        self.factors.iter().scan(0u64, |x, f| {
            let start = *x;
            *x += f.rank();
            Some((start, *x, f.slope))
        })
    }

    /// Slope of the left-aligned polygon on `[i-1, i]`.
    pub fn slope_on_interval(&self, i: u64) -> Result<Slope> {
        if i == 0 || i > self.rank {
            return Err(HnError::IntervalOutOfRange { index: i, rank: self.rank });
        }
        self.segments()
            .find(|&(_, end, _)| i <= end)
            .map(|(_, _, s)| s)
            .ok_or_else(|| HnError::InvariantViolated("segments do not cover rank".into()))
    }

    pub fn rank_slice(&self, mu: Slope, mode: SliceMode) -> u64 {
        self.factors.iter().filter(|f| mode.keeps(f.slope, mu)).map(HnFactor::rank).sum()
    }

    pub fn slice(&self, mu: Slope, mode: SliceMode) -> Bundle {
        let factors: Vec<HnFactor> =
            self.factors.iter().copied().filter(|f| mode.keeps(f.slope, mu)).collect();
        let rank = factors.iter().map(HnFactor::rank).sum();
        let degree = factors.iter().map(HnFactor::degree).sum();
        Bundle { factors, rank, degree }
    }

    /// Negates every slope. Rank is preserved and degree negated.
    pub fn dual(&self) -> Bundle {
        let factors = self
            .factors
            .iter()
            .rev()
            .map(|f| HnFactor { slope: -f.slope, mult: f.mult })
            .collect();
        Bundle { factors, rank: self.rank, degree: -self.degree }
    }

    pub fn direct_sum(&self, other: &Bundle) -> Result<Bundle> {
        Self::from_unsigned(
            self.factors.iter().chain(other.factors.iter()).map(|f| (f.slope, f.mult)),
        )
    }

    /// Tensor product, extended bilinearly from
    /// `O(r/s) ⊗ O(r'/s') = O((rs'+r's)/ss')^{gcd(ss', rs'+r's)}`.
    pub fn tensor(&self, other: &Bundle) -> Result<Bundle> {
        let mut pairs = Vec::with_capacity(self.factors.len() * other.factors.len());
        for a in &self.factors {
            for b in &other.factors {
                let (r, s) = (a.slope.num() as i128, a.slope.den() as i128);
                let (r2, s2) = (b.slope.num() as i128, b.slope.den() as i128);
                let rank = s * s2;
                let degree = r * s2 + r2 * s;
                let g = rank.gcd(&degree);
                let slope = Slope::from_i128(degree, rank)?;
                let mult = (a.mult as i128)
                    .checked_mul(b.mult as i128)
                    .and_then(|m| m.checked_mul(g))
                    .and_then(|m| u64::try_from(m).ok());
                pairs.push((slope, overflow(mult)?));
            }
        }
        Self::from_unsigned(pairs)
    }

    /// `B(λ) = B ⊗ O(λ)`.
    pub fn twist(&self, lambda: Slope) -> Result<Bundle> {
        self.tensor(&Bundle::stable(lambda))
    }

    /// Stretches the polygon vertically by `c`: every HN vector `(x, y)` becomes
    /// `(x, c·y)`, then each edge is re-expressed as a canonical block.
    pub fn stretch(&self, c: u64) -> Result<Bundle> {
        if c == 0 {
            return Err(HnError::InvalidArgument("stretch factor must be positive".into()));
        }
        let c = overflow(i64::try_from(c).ok())?;
        let mut pairs = Vec::with_capacity(self.factors.len());
        for v in self.hn_vectors() {
            let y = overflow(v.y.checked_mul(c))?;
            let slope = Slope::new(y, v.x)?;
            pairs.push((slope, (v.x / slope.den()) as u64));
        }
        Self::from_unsigned(pairs)
    }

    /// Splits the left-aligned polygon at `x = at` into the bundles whose
    /// polygons are the pieces over `[0, at]` and `[at, rank]`.
    pub fn split_at_rank(&self, at: u64) -> Result<(Bundle, Bundle)> {
        if at > self.rank {
            return Err(HnError::IntervalOutOfRange { index: at, rank: self.rank });
        }
        let mut head = Vec::new();
        let mut tail = Vec::new();
        for (start, end, slope) in self.segments() {
            let den = slope.den() as u64;
            if end <= at {
                head.push((slope, (end - start) / den));
            } else if start >= at {
                tail.push((slope, (end - start) / den));
            } else {
                let left = at - start;
                if !left.is_multiple_of(den) {
                    return Err(HnError::NonLatticeCut(at));
                }
                head.push((slope, left / den));
                tail.push((slope, (end - at) / den));
            }
        }
        Ok((Self::from_unsigned(head)?, Self::from_unsigned(tail)?))
    }
}

/// Pairs up the unit-interval slopes of two left-aligned polygons over
/// `[0, min(rank a, rank b)]`, yielding maximal runs `(start, end, slope_a, slope_b)`.
pub(crate) fn zip_segments(a: &Bundle, b: &Bundle) -> Vec<(u64, u64, Slope, Slope)> {
    let sa: Vec<_> = a.segments().collect();
    let sb: Vec<_> = b.segments().collect();
    let (mut i, mut j) = (0, 0);
    let mut x = 0;
    let mut out = Vec::with_capacity(sa.len() + sb.len());
    while i < sa.len() && j < sb.len() {
        let end = sa[i].1.min(sb[j].1);
        out.push((x, end, sa[i].2, sb[j].2));
        x = end;
        if sa[i].1 == end {
            i += 1;
        }
        if sb[j].1 == end {
            j += 1;
        }
    }
    out
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "O({})", factor.slope)?;
            if factor.mult > 1 {
                write!(f, "^{}", factor.mult)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bundle({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Slope {
        Slope::new(n, d).unwrap()
    }

    fn b(pairs: &[(i64, i64, i64)]) -> Bundle {
        Bundle::from_factors(pairs.iter().map(|&(n, d, m)| (s(n, d), m))).unwrap()
    }

    #[test]
    fn canonicalization() {
        let x = b(&[(1, 2, 1), (1, 2, 2), (-1, 1, 1)]);
        assert_eq!(x.to_string(), "O(1/2)^3 + O(-1)");
        assert_eq!(Bundle::from_factors([]).unwrap(), Bundle::zero());
        assert_eq!(b(&[(0, 1, 1), (1, 1, 1)]).to_string(), "O(1) + O(0)");
        assert_eq!(b(&[(3, 1, 0)]), Bundle::zero());
        assert_eq!(
            Bundle::from_factors([(Slope::ZERO, -1)]),
            Err(HnError::NegativeMultiplicity(-1))
        );
    }

    #[test]
    fn rank_degree_mu() {
        let x = b(&[(1, 2, 3), (-1, 1, 1)]);
        assert_eq!((x.rank(), x.degree()), (7, 2));
        assert_eq!((Bundle::zero().rank(), Bundle::zero().degree()), (0, 0));
        assert_eq!(b(&[(5, 6, 1)]).mu().unwrap(), s(5, 6));
        assert_eq!(Bundle::zero().mu(), Err(HnError::ZeroBundle("mu")));
    }

    #[test]
    fn dual_examples() {
        let x = b(&[(1, 2, 3), (-1, 1, 1)]);
        assert_eq!(x.dual(), b(&[(1, 1, 1), (-1, 2, 3)]));
        assert_eq!(Bundle::zero().dual(), Bundle::zero());
        let y = b(&[(2, 1, 1), (0, 1, 1)]);
        assert_eq!(y.dual().dual(), y);
    }

    #[test]
    fn direct_sum_examples() {
        let o1 = b(&[(1, 1, 1)]);
        assert_eq!(o1.direct_sum(&o1).unwrap(), b(&[(1, 1, 2)]));
        assert_eq!(o1.direct_sum(&Bundle::zero()).unwrap(), o1);
        let x = b(&[(1, 1, 1), (-1, 1, 1)]);
        assert_eq!(
            x.direct_sum(&b(&[(0, 1, 1)])).unwrap(),
            b(&[(1, 1, 1), (0, 1, 1), (-1, 1, 1)])
        );
    }

    #[test]
    fn tensor_examples() {
        let t = b(&[(1, 2, 1)]).tensor(&b(&[(1, 3, 1)])).unwrap();
        assert_eq!(t, b(&[(5, 6, 1)]));
        assert_eq!((t.rank(), t.degree()), (6, 5));
        let h = b(&[(1, 2, 1)]);
        let t = h.tensor(&h).unwrap();
        assert_eq!(t, b(&[(1, 1, 4)]));
        assert_eq!((t.rank(), t.degree()), (4, 4));
        let x = b(&[(2, 1, 1), (-1, 1, 1)]);
        assert_eq!(x.tensor(&Bundle::trivial(1).unwrap()).unwrap(), x);
        assert_eq!(x.tensor(&Bundle::zero()).unwrap(), Bundle::zero());
    }

    #[test]
    fn twist_examples() {
        let x = b(&[(1, 1, 1), (-1, 1, 1)]);
        assert_eq!(x.twist(s(-1, 1)).unwrap(), b(&[(0, 1, 1), (-2, 1, 1)]));
        assert_eq!(x.twist(Slope::ZERO).unwrap(), x);
        // Rank ss' = 4, as in the tensor example.
        assert_eq!(b(&[(1, 2, 1)]).twist(s(1, 2)).unwrap(), b(&[(1, 1, 4)]));
    }

    #[test]
    fn stretch_examples() {
        let x = b(&[(1, 2, 1), (-1, 1, 1)]);
        assert_eq!(x.stretch(2).unwrap(), b(&[(1, 1, 2), (-2, 1, 1)]));
        assert_eq!(x.stretch(1).unwrap(), x);
        assert_eq!(b(&[(1, 3, 1)]).stretch(3).unwrap(), b(&[(1, 1, 3)]));
        assert!(x.stretch(0).is_err());
    }

    #[test]
    fn slice_examples() {
        let x = b(&[(2, 1, 1), (1, 2, 2), (-1, 1, 1)]);
        assert_eq!(x.slice(s(1, 2), SliceMode::Ge), b(&[(2, 1, 1), (1, 2, 2)]));
        let y = b(&[(1, 1, 1), (-1, 1, 1)]);
        let parts = y
            .slice(Slope::ZERO, SliceMode::Ge)
            .direct_sum(&y.slice(Slope::ZERO, SliceMode::Lt))
            .unwrap();
        assert_eq!(parts, y);
        assert_eq!(Bundle::zero().slice(Slope::ZERO, SliceMode::Le), Bundle::zero());
        assert_eq!(x.rank_slice(s(1, 2), SliceMode::Gt), 1);
    }

    #[test]
    fn extreme_slopes() {
        let x = b(&[(2, 1, 1), (-1, 1, 1)]);
        assert_eq!((x.mu_max().unwrap(), x.mu_min().unwrap()), (s(2, 1), s(-1, 1)));
        let h = b(&[(1, 2, 1)]);
        assert_eq!(h.mu_min().unwrap(), h.mu_max().unwrap());
        assert_eq!(b(&[(3, 1, 1), (0, 1, 1), (-5, 1, 1)]).mu_min().unwrap(), s(-5, 1));
        assert!(Bundle::zero().mu_max().is_err());
        assert!(Bundle::zero().mu_min().is_err());
    }

    #[test]
    fn hn_vector_examples() {
        let x = b(&[(1, 2, 3), (-1, 1, 1)]);
        assert_eq!(x.hn_vectors(), vec![HnVector::new(6, 3), HnVector::new(1, -1)]);
        assert!(Bundle::zero().hn_vectors().is_empty());
        assert_eq!(b(&[(1, 1, 2)]).hn_vectors(), vec![HnVector::new(2, 2)]);
    }

    #[test]
    fn interval_slopes() {
        let x = b(&[(1, 1, 1), (-1, 2, 1)]);
        assert_eq!(x.slope_on_interval(1).unwrap(), s(1, 1));
        assert_eq!(x.slope_on_interval(2).unwrap(), s(-1, 2));
        assert_eq!(x.slope_on_interval(3).unwrap(), s(-1, 2));
        assert!(x.slope_on_interval(0).is_err());
        assert!(x.slope_on_interval(4).is_err());
        let t = b(&[(1, 3, 1)]);
        for i in 1..=3 {
            assert_eq!(t.slope_on_interval(i).unwrap(), s(1, 3));
        }
        assert_eq!(b(&[(2, 1, 2)]).slope_on_interval(2).unwrap(), s(2, 1));
    }

    #[test]
    fn semistability_and_vertices() {
        assert!(b(&[(1, 2, 5)]).is_semistable());
        assert!(!b(&[(1, 1, 1), (0, 1, 1)]).is_semistable());
        assert_eq!(b(&[(1, 1, 2), (-1, 1, 1)]).vertex_set(), BTreeSet::from([0, 2, 3]));
        assert_eq!(Bundle::zero().vertex_set(), BTreeSet::from([0]));
    }

    #[test]
    fn split_at_lattice_points() {
        let x = b(&[(2, 1, 1), (1, 2, 2), (-1, 1, 1)]);
        let (h, t) = x.split_at_rank(3).unwrap();
        assert_eq!(h, b(&[(2, 1, 1), (1, 2, 1)]));
        assert_eq!(t, b(&[(1, 2, 1), (-1, 1, 1)]));
        assert_eq!(x.split_at_rank(2), Err(HnError::NonLatticeCut(2)));
        assert_eq!(x.split_at_rank(0).unwrap(), (Bundle::zero(), x.clone()));
    }

    #[test]
    fn overflow_is_reported() {
        let big = Slope::integer(i64::MAX);
        assert_eq!(Bundle::from_factors([(big, 2)]), Err(HnError::Overflow));
        let x = Bundle::stable(big);
        assert_eq!(x.stretch(2), Err(HnError::Overflow));
        assert_eq!(x.direct_sum(&x), Err(HnError::Overflow));
    }

    #[test]
    fn json_shape() {
        let x = b(&[(1, 2, 3), (-1, 1, 1)]);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"{"factors":[{"slope":{"num":1,"den":2},"mult":3},{"slope":{"num":-1,"den":1},"mult":1}]}"#
        );
        let back: Bundle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        let bad = r#"{"factors":[{"slope":{"num":1,"den":0},"mult":1}]}"#;
        assert!(serde_json::from_str::<Bundle>(bad).is_err());
    }
}
