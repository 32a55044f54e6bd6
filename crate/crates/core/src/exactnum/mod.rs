//! Exact arithmetic: `Q(ζ_M)(√q)` coefficients, Laurent polynomials in Satake
//! parameters, rational functions and truncated power series.

mod coeff;
mod cyclotomic;
mod laurent;
mod satake;
mod series;

pub use coeff::{parse_rational, rational_string, CoeffValue};
pub use cyclotomic::CoeffField;
pub use laurent::{LaurentPoly, Monomial, VarId, MAX_VARS};
pub use satake::SatakeRat;
pub use series::TruncSeries;
