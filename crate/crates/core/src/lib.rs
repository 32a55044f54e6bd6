//! Exact verification engine for nonarchimedean Godement–Jacquet zeta integrals.
//!
//! Everything is computed over `Q(ζ_M)(√q)` with Laurent polynomials in the Satake
//! parameters, so integral identities are checked as equalities of truncated power
//! series in `X = q^{-s}`, coefficient by coefficient.
//!
//! Module map:
//! - [`exactnum`]: cyclotomic coefficients, Laurent polynomials, rational functions, series.
//! - [`padic`]: finite-precision `Q_p` scalars and matrices, Iwasawa/Hermite forms,
//!   flag varieties, congruence-subgroup volumes.
//! - [`chars`]: multiplicative and additive characters.
//! - [`reps`]: principal-series data and their L-factors.
//! - [`models`]: induced-model vectors, the newform projection and matrix coefficients.
//! - [`whittaker`]: spherical Whittaker functions (Casselman–Shalika and a GL(2) Jacquet integral).
//! - [`zeta`]: zeta integrals, Rankin–Selberg integrals and identity checks.

#![allow(clippy::manual_is_multiple_of)]

pub mod chars;
pub mod error;
pub mod exactnum;
pub mod models;
pub mod padic;
pub mod reps;
pub mod session;
pub mod whittaker;
pub mod zeta;

pub use chars::{AddChar, MultChar, Uniformizer};
pub use error::{Error, Result};
pub use exactnum::{CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat, TruncSeries, VarId};
pub use models::{FlagFunction, Newform};
pub use padic::{FlagSpace, PadicMatrix, PadicScalar};
pub use reps::LanglandsDatum;
pub use session::Session;
pub use zeta::{CheckReport, SBFunction, ZetaReport};
