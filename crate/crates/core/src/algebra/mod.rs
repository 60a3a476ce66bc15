//! Exact arithmetic: rationals, sparse bivariate polynomials, truncated
//! ħ-series and functions localized at a fixed polynomial.

mod localized;
mod poly;
mod rational;
mod series;

pub use localized::LocalizedFn;
pub use poly::{MultiIndex, Poly2};
pub use rational::{binomial, falling_factorial, parse_rational, rat, Rational};
pub use series::{HSeries, Ring};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("polynomial {dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("leading coefficient of the series is not a unit: {0}")]
    NonUnitLeadingTerm(String),
    #[error("affine map is degenerate (a = {a}, c = {c})")]
    DegenerateMap { a: String, c: String },
    #[error("localization requires a nonzero polynomial")]
    ZeroLocalization,
}
