//! Logarithmic coefficients of univalent functions and their inverses.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: truncated univariate and bivariate power series;
//! - [`invert`]: reversion and the logarithmic coefficients `gamma_n`, `Gamma_n`;
//! - [`grunsky`]: Grunsky tables, the Grunsky inequality, structural identities;
//! - [`families`]: Koebe, half-plane, `f_lambda`, Schwarz-driven samples;
//! - [`bounds`]: sharp-bound checkers and the `Phi(mu, nu)` estimate;
//! - [`extremal`]: grid-and-refine parameter search;
//! - [`suite`]: the seeded verification battery behind `schlicht suite`.

pub mod bounds;
pub mod error;
pub mod extremal;
pub mod families;
pub mod grunsky;
pub mod invert;
pub mod scalar;
pub mod series;
pub mod suite;

pub use error::{Error, Result};
pub use scalar::{CRat, Scalar, ScalarMode, C64, DEFAULT_TOLERANCE};
pub use series::{BiSeries, Series};
