//! Induced-model vectors as tables on finite flag varieties, the newform projection,
//! the `K`-pairing and matrix coefficients.

mod flagfn;
mod newform;
mod projection;

use std::sync::Arc;

use crate::chars::Uniformizer;
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, Monomial};
use crate::padic::modular::pow;
use crate::padic::{modulus_sqrt, MAX_N};
use crate::reps::{CentralChar, LanglandsDatum};

pub use flagfn::FlagFunction;
pub use newform::{conductor_search, Newform, SearchStep};
pub use projection::Projector;

/// Tabulated character data of `Ind(χ_1 ⊗ … ⊗ χ_n)` for fast evaluation.
///
/// Unit-part values are exponents in `Z/D`, `D` the lcm of the character orders.
#[derive(Debug)]
pub struct InducedData {
    datum: LanglandsDatum,
    field: Arc<CoeffField>,
    p: u64,
    n: usize,
    order: u64,
    tables: Vec<Vec<u64>>,
    moduli: Vec<u64>,
    omega: CentralChar,
    omega_table: Vec<u64>,
    omega_modulus: u64,
    zetas: Vec<CoeffValue>,
}

impl InducedData {
    pub fn new(datum: &LanglandsDatum, field: &Arc<CoeffField>) -> Result<Arc<Self>> {
        let order = datum.unit_order();
        if field.order() as u64 % order != 0 {
            return Err(Error::Validation(format!(
                "coefficient field Q(ζ_{}) lacks the {order}-th roots of unity",
                field.order()
            )));
        }
        let p = datum.prime();
        let mut tables = Vec::new();
        let mut moduli = Vec::new();
        for c in datum.chars() {
            let pc = pow(p, c.declared_conductor());
            let scale = order / c.order();
            tables.push((0..pc).map(|u| c.unit_exponent(u) * scale % order).collect());
            moduli.push(pc);
        }
        let omega = datum.central_character()?;
        let w = omega.unit_part();
        let omega_modulus = pow(p, w.declared_conductor());
        let omega_table = (0..omega_modulus).map(|u| w.unit_exponent(u) * (order / w.order()) % order).collect();
        let step = field.order() as u64 / order;
        let zetas = (0..order).map(|e| CoeffValue::zeta(field, (e * step) as i64)).collect();
        Ok(Arc::new(InducedData {
            datum: datum.clone(),
            field: field.clone(),
            p,
            n: datum.n(),
            order,
            tables,
            moduli,
            omega,
            omega_table,
            omega_modulus,
            zetas,
        }))
    }

    /// Data of `Ind(χ^{-1})` in the same order, the model paired with this one.
    pub fn dual(&self) -> Result<Arc<Self>> {
        Self::new(&self.datum.inverse_characters()?, &self.field)
    }

    pub fn datum(&self) -> &LanglandsDatum {
        &self.datum
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Order `D` of the unit-part values.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn central(&self) -> &CentralChar {
        &self.omega
    }

    /// Smallest level at which the characters are defined on `B(O/p^m)`.
    pub fn min_level(&self) -> u32 {
        self.datum.max_char_conductor().max(1)
    }

    /// Exponent of `∏ χ_i(d_i)` for unit residues `d_i`.
    #[inline]
    pub fn diag_exp(&self, diag: &[u64]) -> u64 {
        let e: u64 = (0..self.n).map(|i| self.tables[i][(diag[i] % self.moduli[i]) as usize]).sum();
        e % self.order
    }

    /// Exponent of `ω_π(u)` for a unit residue `u`.
    #[inline]
    pub fn omega_exp(&self, u: u64) -> u64 {
        self.omega_table[(u % self.omega_modulus) as usize]
    }

    /// `exp(2πi e/D)`.
    #[inline]
    pub fn zeta(&self, e: u64) -> &CoeffValue {
        &self.zetas[(e % self.order) as usize]
    }

    /// `δ^{1/2}(ϖ^a) ∏ α_i^{a_i}` as monomial and scalar.
    pub fn torus(&self, a: &[i32]) -> (Monomial, CoeffValue) {
        let mut mono = Monomial::one();
        let mut c = modulus_sqrt(&self.field, &a[..self.n]);
        for (ch, &ai) in self.datum.chars().iter().zip(a) {
            if ai == 0 {
                continue;
            }
            let (m, v) = ch.uniformizer().power(&self.field, ai);
            mono = mono.mul(&m);
            if !matches!(ch.uniformizer(), Uniformizer::Symbolic { .. }) {
                c = &c * &v;
            }
        }
        (mono, c)
    }
}

/// Diagonal exponent vector as a fixed array.
pub(crate) fn exps(a: &[u32; MAX_N], shift: i32, n: usize) -> [i32; MAX_N] {
    let mut out = [0i32; MAX_N];
    for i in 0..n {
        out[i] = a[i] as i32 + shift;
    }
    out
}
