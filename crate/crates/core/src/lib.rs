//! Harder-Narasimhan polygon calculus for vector bundles on the
//! Fargues-Fontaine curve, in exact integer arithmetic.
//!
//! A bundle is identified with its HN polygon ([`Bundle`]). On top of that
//! sit degree pairings, slopewise dominance, the classification of quotient
//! bundles and subbundles, and the slope-reduction machinery of the key
//! inequality `c_{E,F}(Q) ≥ 0`.

pub mod bundle;
pub mod classify;
pub mod cli;
pub mod dominance;
pub mod error;
pub mod pairing;
pub mod reduction;
pub mod slope;
pub mod verify;

pub use bundle::{Bundle, HnFactor, HnVector, SliceMode};
pub use classify::{ClassificationVerdict, FailedCondition};
pub use dominance::CommonFactorDecomposition;
pub use error::{HnError, Result};
pub use reduction::{Hypothesis, KeyInequalityReport, ReductionStep, ReductionTrace};
pub use slope::Slope;
pub use verify::{EnumBounds, VerifyReport};
