//! Exact rational slopes in lowest terms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{HnError, Result};

/// A rational number `num/den` with `gcd(|num|, den) = 1` and `den >= 1`.
///
/// `num` never equals `i64::MIN`, so negation is always exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSlope")]
pub struct Slope {
    num: i64,
    den: i64,
}

#[derive(Deserialize)]
struct RawSlope {
    num: i64,
    den: i64,
}

impl TryFrom<RawSlope> for Slope {
    type Error = HnError;

    fn try_from(raw: RawSlope) -> Result<Self> {
        Slope::new(raw.num, raw.den)
    }
}

impl Slope {
    pub const ZERO: Slope = Slope { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::from_i128(num as i128, den as i128)
    }

    pub(crate) fn from_i128(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(HnError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let num = i64::try_from(num).map_err(|_| HnError::Overflow)?;
        let den = i64::try_from(den).map_err(|_| HnError::Overflow)?;
        if num == i64::MIN {
            return Err(HnError::Overflow);
        }
        Ok(Slope { num, den })
    }

    /// The integer slope `n`. Panics on `i64::MIN`.
    pub fn integer(n: i64) -> Self {
        assert!(n != i64::MIN, "slope numerator out of range");
        Slope { num: n, den: 1 }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn checked_add(self, other: Slope) -> Result<Slope> {
        let num = self.num as i128 * other.den as i128 + other.num as i128 * self.den as i128;
        let den = self.den as i128 * other.den as i128;
        Self::from_i128(num, den)
    }

    pub fn checked_sub(self, other: Slope) -> Result<Slope> {
        self.checked_add(-other)
    }

    pub fn checked_mul_int(self, c: i64) -> Result<Slope> {
        Self::from_i128(self.num as i128 * c as i128, self.den as i128)
    }
}

impl std::ops::Neg for Slope {
    type Output = Slope;

    fn neg(self) -> Slope {
        Slope { num: -self.num, den: self.den }
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i32> for Slope {
    fn from(n: i32) -> Self {
        Slope::integer(n as i64)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Slope {
    type Err = HnError;

    /// Accepts `a` or `a/b` with optional surrounding whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || HnError::InvalidArgument(format!("malformed slope {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Slope::new(n, d)
            }
            None => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Slope::new(n, 1)
            }
        }
    }
}
