//! Zeta integrals, Rankin–Selberg integrals and the identity checks built on them.

mod checks;
mod gj;
mod propagation;
mod rs;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat, TruncSeries};
use crate::models::InducedData;
use crate::padic::{k0_index, PadicMatrix};

pub use checks::{
    conductor_check, equivariance_check, iwasawa_shell_volume, measure_anchor_check, phi_invariance_check,
    projection_identity_check, whittaker_oracle_check, CheckReport,
};
pub use gj::{gj_spherical, gj_zeta, main_theorem, strategy_equivalence, GjOutcome, Strategy};
pub use propagation::{propagation_check, PropagationReport, PropagationStatus};
pub use rs::{rs_integral_nn1_spherical, rs_integral_nn_spherical};

/// The Schwartz–Bruhat functions used by the integrals.
#[derive(Clone, Debug)]
pub enum SBFunction {
    /// `ω^{-1}(x_nn)/vol(K_0(p^c))` on integral `x` with `x_{n,j} ∈ p^c` (`j < n`) and `x_nn` a unit.
    Main {
        data: Arc<InducedData>,
        conductor: u32,
    },
    /// The same condition on `1×n` rows; for `c = 0` the indicator of `O^n`.
    Row {
        data: Arc<InducedData>,
        conductor: u32,
    },
    /// The indicator of `Mat_{(n-1)×n}(O)`.
    Block {
        n: usize,
    },
    /// The indicator of `Mat_n(O)`.
    Indicator {
        n: usize,
    },
    Zero {
        n: usize,
    },
    /// `x ↦ row(e_n x)·block(top n-1 rows of x)`.
    Product {
        row: Box<SBFunction>,
        block: Box<SBFunction>,
    },
    /// Test hook: doubles the value wherever `x_nn ≡ 1 mod p`.
    Corrupted(Box<SBFunction>),
}

impl SBFunction {
    pub fn main(data: &Arc<InducedData>, conductor: u32) -> Self {
        SBFunction::Main { data: data.clone(), conductor }
    }

    pub fn row(data: &Arc<InducedData>, conductor: u32) -> Self {
        SBFunction::Row { data: data.clone(), conductor }
    }

    /// `Row·Block`, which agrees with `Main` for `c > 0`.
    pub fn factored(data: &Arc<InducedData>, conductor: u32) -> Self {
        SBFunction::Product {
            row: Box::new(Self::row(data, conductor)),
            block: Box::new(SBFunction::Block { n: data.n() }),
        }
    }

    pub fn corrupted(self) -> Self {
        SBFunction::Corrupted(Box::new(self))
    }

    /// `(rows, cols)` of the argument.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            SBFunction::Main { data, .. } => (data.n(), data.n()),
            SBFunction::Row { data, .. } => (1, data.n()),
            SBFunction::Block { n } => (n - 1, *n),
            SBFunction::Indicator { n } | SBFunction::Zero { n } => (*n, *n),
            SBFunction::Product { block, .. } => (block.shape().1, block.shape().1),
            SBFunction::Corrupted(inner) => inner.shape(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SBFunction::Main { conductor, .. } => format!("main(c={conductor})"),
            SBFunction::Row { conductor, .. } => format!("row(c={conductor})"),
            SBFunction::Block { .. } => "block".into(),
            SBFunction::Indicator { .. } => "indicator".into(),
            SBFunction::Zero { .. } => "zero".into(),
            SBFunction::Product { row, block } => format!("{}*{}", row.label(), block.label()),
            SBFunction::Corrupted(inner) => format!("corrupted({})", inner.label()),
        }
    }

    /// Level `L` such that, on integral arguments, the value depends only on residues mod `p^L`.
    pub fn level(&self) -> u32 {
        match self {
            SBFunction::Main { conductor, .. } | SBFunction::Row { conductor, .. } => *conductor,
            SBFunction::Product { row, .. } => row.level(),
            SBFunction::Corrupted(inner) => inner.level().max(1),
            _ => 0,
        }
    }

    fn prime(&self) -> Option<u64> {
        match self {
            SBFunction::Main { data, .. } | SBFunction::Row { data, .. } => Some(data.p()),
            SBFunction::Product { row, .. } => row.prime(),
            SBFunction::Corrupted(inner) => inner.prime(),
            _ => None,
        }
    }

    /// Value on an integral square matrix whose last row is `row` (residues mod `p^level`).
    ///
    /// Every shape here depends on an integral argument only through its last row.
    pub fn row_value(&self, field: &Arc<CoeffField>, p: u64, row: &[u64]) -> CoeffValue {
        match self {
            SBFunction::Main { data, conductor } | SBFunction::Row { data, conductor } => {
                let n = row.len();
                let c = *conductor;
                if c == 0 && matches!(self, SBFunction::Row { .. }) {
                    return CoeffValue::one(field);
                }
                let pc = crate::padic::modular::pow(p, c);
                if row[..n - 1].iter().any(|x| x % pc != 0) || row[n - 1] % p == 0 {
                    return CoeffValue::zero(field);
                }
                let e = (data.order() - data.omega_exp(row[n - 1])) % data.order();
                data.zeta(e).scale_int(k0_index(p, n, c) as i64)
            }
            SBFunction::Block { .. } | SBFunction::Indicator { .. } => CoeffValue::one(field),
            SBFunction::Zero { .. } => CoeffValue::zero(field),
            SBFunction::Product { row: r, block } => &r.row_value(field, p, row) * &block.row_value(field, p, row),
            SBFunction::Corrupted(inner) => {
                let v = inner.row_value(field, p, row);
                if row[row.len() - 1] % p == 1 {
                    v.scale_int(2)
                } else {
                    v
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SBFunction::Zero { .. } => true,
            SBFunction::Product { row, block } => row.is_zero() || block.is_zero(),
            SBFunction::Corrupted(inner) => inner.is_zero(),
            _ => false,
        }
    }
}

/// `Φ(x)` for a matrix of the function's shape.
pub fn sb_eval(phi: &SBFunction, field: &Arc<CoeffField>, x: &PadicMatrix) -> Result<SatakeRat> {
    if (x.rows(), x.cols()) != phi.shape() {
        return Err(Error::Validation(format!(
            "argument is {}x{}, function expects {:?}",
            x.rows(),
            x.cols(),
            phi.shape()
        )));
    }
    if let Some(p) = phi.prime() {
        if p != x.prime() {
            return Err(Error::Validation("argument and function live over different primes".into()));
        }
    }
    if x.min_valuation()? < 0 {
        return Ok(SatakeRat::zero(field));
    }
    let level = phi.level().max(1);
    let res = x.integral_residues(0, level)?;
    let cols = x.cols();
    let last = &res[(x.rows() - 1) * cols..];
    let v = match phi {
        // the block indicator has no distinguished row
        SBFunction::Block { .. } => CoeffValue::one(field),
        _ => phi.row_value(field, x.prime(), last),
    };
    Ok(SatakeRat::constant(v))
}

/// Accumulates `Σ c·m` by monomial.
#[derive(Default)]
pub(crate) struct MonoSum {
    terms: HashMap<Monomial, CoeffValue>,
}

impl MonoSum {
    pub(crate) fn add(&mut self, m: Monomial, c: &CoeffValue) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => *v += c,
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub(crate) fn finish(self, field: &Arc<CoeffField>, scale: &CoeffValue) -> SatakeRat {
        let mut poly = LaurentPoly::zero(field);
        let mut terms: Vec<_> = self.terms.into_iter().collect();
        terms.sort_by_key(|a| a.0);
        for (m, c) in terms {
            poly.add_term(m, &(&c * scale));
        }
        SatakeRat::from_poly(poly)
    }
}

pub(crate) fn recip(n: impl Into<BigInt>) -> BigRational {
    BigRational::new(BigInt::from(1), n.into())
}

/// Comparison of a computed series against a reference.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    pub datum: String,
    pub datum_json: Value,
    pub phi: String,
    pub truncation: usize,
    pub strategy: String,
    /// Deepest flag or residue level touched.
    pub level: u32,
    pub lhs: Vec<Value>,
    pub rhs: Vec<Value>,
    pub lhs_text: Vec<String>,
    pub rhs_text: Vec<String>,
    pub equal: bool,
    /// Indices of mismatching coefficients.
    pub diff: Vec<usize>,
    pub runtime_ms: Option<u64>,
}

impl ZetaReport {
    #[allow(clippy::too_many_arguments)]
    pub fn compare(
        datum: String,
        datum_json: Value,
        phi: String,
        strategy: &str,
        level: u32,
        lhs: &TruncSeries,
        rhs: &TruncSeries,
    ) -> Result<Self> {
        let diff = lhs.diff_indices(rhs)?;
        let enc = |s: &TruncSeries| s.coeffs().iter().map(SatakeRat::to_json).collect();
        let txt = |s: &TruncSeries| s.coeffs().iter().map(|c| c.to_string()).collect();
        Ok(ZetaReport {
            datum,
            datum_json,
            phi,
            truncation: lhs.truncation(),
            strategy: strategy.to_string(),
            level,
            lhs: enc(lhs),
            rhs: enc(rhs),
            lhs_text: txt(lhs),
            rhs_text: txt(rhs),
            equal: diff.is_empty(),
            diff,
            runtime_ms: None,
        })
    }

    pub fn first_mismatch(&self) -> Option<usize> {
        self.diff.first().copied()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

impl fmt::Display for ZetaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}  Φ={}  strategy={}  T={}", self.datum, self.phi, self.strategy, self.truncation)?;
        let w = self.lhs_text.iter().map(|s| s.chars().count()).max().unwrap_or(3).max(3);
        writeln!(f, "{:>3}  {:<w$}  {:<w$}  ok", "k", "lhs", "rhs")?;
        for (k, (l, r)) in self.lhs_text.iter().zip(&self.rhs_text).enumerate() {
            let ok = if self.diff.contains(&k) { "MISMATCH" } else { "yes" };
            writeln!(f, "{k:>3}  {l:<w$}  {r:<w$}  {ok}")?;
        }
        write!(f, "equal: {}", self.equal)?;
        if let Some(k) = self.first_mismatch() {
            write!(f, "  (first mismatch at X^{k})")?;
        }
        Ok(())
    }
}
