//! Effective point-count bounds for elliptic curves over Q with a rational
//! prime-order torsion point, together with the exact machinery needed to
//! verify every constant and inequality empirically: exact Weierstrass
//! models, Tate reduction data, canonical heights with certified error,
//! division polynomials and torsion, class-group rank bounds, the full
//! constant ledger, and brute-force bounded-height enumeration.

pub mod arithmetic;
pub mod curve;
pub mod enumerate;
pub mod error;
pub mod heights;
pub mod ledger_real;
pub mod local;
pub mod pipeline;
pub mod rank;
pub mod selftest;
pub mod torsion;

pub use curve::{CurvePoint, ModelTransform, WeierstrassCurve};
pub use error::{Error, Result};
pub use heights::{HeightValue, HeightsConfig};
pub use local::{GlobalInvariants, LocalReductionData};
pub use pipeline::{BoundReport, ConstantLedger};
pub use rank::{FieldParams, RankBoundBreakdown};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision signed integer used everywhere.
pub type Int = BigInt;
/// Exact rational, always lowest terms with positive denominator.
pub type Rat = BigRational;
