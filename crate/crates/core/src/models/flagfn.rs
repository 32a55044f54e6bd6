use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::{exps, InducedData};
use crate::error::{Error, Result};
use crate::exactnum::{CoeffValue, LaurentPoly, SatakeRat};
use crate::padic::modular::{det_mod, iwasawa_mod, mat_mul_into, pow, val_capped};
use crate::padic::{FlagSpace, PadicMatrix};

/// A vector of `Ind(χ)` that is right `K(p^m)`-invariant, stored by its values on the
/// canonical points of `B(O/p^m)\GL_n(O/p^m)` times an overall scalar.
///
/// The value at `x ∈ K` is `χ(b)·values[rep]` where `x ≡ b·rep mod p^m`.
#[derive(Clone, Debug)]
pub struct FlagFunction {
    data: Arc<InducedData>,
    space: Arc<FlagSpace>,
    values: Vec<CoeffValue>,
    scale: SatakeRat,
}

impl FlagFunction {
    pub fn zero(data: &Arc<InducedData>, level: u32) -> Result<Self> {
        let space = Self::space_for(data, level)?;
        let values = vec![CoeffValue::zero(data.field()); space.len()];
        Ok(FlagFunction { data: data.clone(), space, values, scale: SatakeRat::one(data.field()) })
    }

    fn space_for(data: &Arc<InducedData>, level: u32) -> Result<Arc<FlagSpace>> {
        if level < data.min_level() {
            return Err(Error::Level(format!(
                "level {level} is below the character conductors (need ≥ {})",
                data.min_level()
            )));
        }
        FlagSpace::cached(data.p(), data.n(), level)
    }

    pub fn from_values(data: &Arc<InducedData>, level: u32, values: Vec<CoeffValue>) -> Result<Self> {
        let space = Self::space_for(data, level)?;
        if values.len() != space.len() {
            return Err(Error::Validation(format!(
                "table has {} values, flag variety has {} points",
                values.len(),
                space.len()
            )));
        }
        Ok(FlagFunction { data: data.clone(), space, values, scale: SatakeRat::one(data.field()) })
    }

    /// The equivariant extension of the indicator of the point `index`.
    pub fn indicator(data: &Arc<InducedData>, level: u32, index: usize) -> Result<Self> {
        let mut f = Self::zero(data, level)?;
        if index >= f.values.len() {
            return Err(Error::Validation(format!("flag point {index} out of range")));
        }
        f.values[index] = CoeffValue::one(data.field());
        Ok(f)
    }

    /// The generic seed: the indicator of the identity coset.
    pub fn seed(data: &Arc<InducedData>, level: u32) -> Result<Self> {
        let space = Self::space_for(data, level)?;
        let n = data.n();
        let mut id = vec![0u64; n * n];
        for i in 0..n {
            id[i * n + i] = 1;
        }
        let c = space.canonicalize(&id)?;
        Self::indicator(data, level, c.index as usize)
    }

    /// The normalized spherical vector: constant on `K` with
    /// `f°(1) = ∏_{i<j} (1 - q^{-1} α_i α_j^{-1})^{-1}`.
    pub fn spherical(data: &Arc<InducedData>) -> Result<Self> {
        if !data.datum().is_spherical() {
            return Err(Error::Validation("spherical vector of a ramified datum".into()));
        }
        let field = data.field();
        let mut f = Self::zero(data, 1)?;
        for v in f.values.iter_mut() {
            *v = CoeffValue::one(field);
        }
        let alphas = data.datum().satake(field);
        let qinv = CoeffValue::q_pow(field, -1);
        let mut den = SatakeRat::one(field);
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let ratio = alphas[i].div(&alphas[j])?.scale(&qinv);
                den = &den * &(&SatakeRat::one(field) - &ratio);
            }
        }
        f.scale = den.inv()?;
        Ok(f)
    }

    pub fn data(&self) -> &Arc<InducedData> {
        &self.data
    }

    pub fn space(&self) -> &Arc<FlagSpace> {
        &self.space
    }

    pub fn level(&self) -> u32 {
        self.space.level()
    }

    pub fn values(&self) -> &[CoeffValue] {
        &self.values
    }

    pub fn scale(&self) -> &SatakeRat {
        &self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero() || self.values.iter().all(CoeffValue::is_zero)
    }

    pub fn scaled(&self, c: &CoeffValue) -> Self {
        FlagFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    pub fn with_scale(&self, s: SatakeRat) -> Self {
        FlagFunction { scale: s, ..self.clone() }
    }

    /// Folds the scalar into the table when it is a constant.
    pub fn normalized(&self) -> Result<Self> {
        let c = self.scale.as_constant().ok_or_else(|| Error::Unsupported("table scale is not a constant".into()))?;
        Ok(self.scaled(&c).with_scale(SatakeRat::one(self.data.field())))
    }

    /// Unscaled value at `x ∈ GL_n(Z/p^m)`.
    pub fn table_value(&self, x: &[u64]) -> Result<CoeffValue> {
        let c = self.space.canonicalize(x)?;
        Ok(self.data.zeta(self.data.diag_exp(&c.diag)) * &self.values[c.index as usize])
    }

    /// `f(g) = δ^{1/2}(a)χ(a)·f(k)` for `g = u·a·k`.
    pub fn evaluate(&self, g: &PadicMatrix) -> Result<SatakeRat> {
        let n = self.data.n();
        if g.rows() != n || g.cols() != n {
            return Err(Error::Validation("matrix size does not match the datum".into()));
        }
        let (e, avail, y) = g.integral_form()?;
        let iw = iwasawa_mod(&y, n, self.data.p(), avail)?;
        if iw.prec < self.level() {
            return Err(Error::Precision(format!("k known mod p^{}, table level is {}", iw.prec, self.level())));
        }
        let (mono, c) = self.data.torus(&exps(&iw.a, e, n));
        let v = self.table_value(&iw.k)?;
        Ok(&SatakeRat::from_poly(LaurentPoly::term(mono, &c * &v)) * &self.scale)
    }

    /// `π(k)f`, i.e. `x ↦ f(xk)`, for `k ∈ GL_n(Z/p^m)`.
    pub fn right_translate(&self, k: &[u64]) -> Result<Self> {
        let n = self.data.n();
        let pm = self.space.modulus();
        let mut z = vec![0u64; n * n];
        let mut values = Vec::with_capacity(self.values.len());
        for x in self.space.points() {
            mat_mul_into(x, k, n, pm, &mut z);
            values.push(self.table_value(&z)?);
        }
        Ok(FlagFunction { values, ..self.clone() })
    }

    /// The same vector tabulated at a finer level.
    pub fn raise(&self, level: u32) -> Result<Self> {
        if level < self.level() {
            return Err(Error::Level("cannot raise to a coarser level".into()));
        }
        if level == self.level() {
            return Ok(self.clone());
        }
        let space = FlagSpace::cached(self.data.p(), self.data.n(), level)?;
        let values = space.points().map(|z| self.table_value(z)).collect::<Result<Vec<_>>>()?;
        Ok(FlagFunction { data: self.data.clone(), space, values, scale: self.scale.clone() })
    }

    /// The average of `π(k)f` over `k ∈ K(p^level)`, a vector of the coarser level.
    pub fn average_down(&self, level: u32) -> Result<Self> {
        if level > self.level() {
            return Err(Error::Level("average_down needs a coarser level".into()));
        }
        if level == self.level() {
            return Ok(self.clone());
        }
        let coarse = Self::space_for(&self.data, level)?;
        let field = self.data.field();
        let order = self.data.order();
        // fibers are equal in size; accumulate χ(b)^{-1} f(z) for z ≡ b·x
        let mut sums: Vec<HashMap<u64, CoeffValue>> = vec![HashMap::new(); coarse.len()];
        for (z, v) in self.space.points().zip(&self.values) {
            if v.is_zero() {
                continue;
            }
            let c = coarse.canonicalize(z)?;
            let e = (order - self.data.diag_exp(&c.diag)) % order;
            *sums[c.index as usize].entry(e).or_insert_with(|| CoeffValue::zero(field)) += v;
        }
        let fiber = (self.space.len() / coarse.len()) as i64;
        let inv = CoeffValue::from_frac(field, 1, fiber);
        let values = sums
            .into_iter()
            .map(|m| {
                let mut acc = CoeffValue::zero(field);
                let mut keys: Vec<_> = m.into_iter().collect();
                keys.sort_by_key(|(e, _)| *e);
                for (e, v) in keys {
                    acc += &(self.data.zeta(e) * &v);
                }
                &acc * &inv
            })
            .collect();
        Ok(FlagFunction { data: self.data.clone(), space: coarse, values, scale: self.scale.clone() })
    }

    /// `⟨f, f̃⟩ = ∫_K f(k) f̃(k) dk`.
    pub fn pairing(&self, dual: &FlagFunction) -> Result<SatakeRat> {
        let inv = self.data.datum().inverse_characters()?;
        if dual.data.datum().chars() != inv.chars() {
            return Err(Error::Validation("pairing needs the inverse-character model".into()));
        }
        let level = self.level().max(dual.level());
        let a = self.raise(level)?;
        let b = dual.raise(level)?;
        let field = self.data.field();
        let mut acc = CoeffValue::zero(field);
        for (x, y) in a.values.iter().zip(&b.values) {
            if !x.is_zero() && !y.is_zero() {
                acc += &(x * y);
            }
        }
        let avg = acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(a.values.len())));
        Ok(&SatakeRat::constant(avg) * &(&self.scale * &dual.scale))
    }

    /// `Some(c)` with `other = c·self` (tables only), `None` if not proportional.
    pub fn proportionality(&self, other: &FlagFunction) -> Result<Option<CoeffValue>> {
        if self.level() != other.level() {
            return Err(Error::Level("proportionality test needs equal levels".into()));
        }
        let Some(i) = self.values.iter().position(|v| !v.is_zero()) else {
            return Ok(other.values.iter().all(CoeffValue::is_zero).then(|| CoeffValue::zero(self.data.field())));
        };
        let c = &other.values[i] * &self.values[i].inv()?;
        let ok = self.values.iter().zip(&other.values).all(|(a, b)| &(a * &c) == b);
        Ok(ok.then_some(c))
    }

    pub fn table_eq(&self, other: &FlagFunction) -> bool {
        self.level() == other.level() && self.values == other.values && self.scale == other.scale
    }

    pub fn to_json(&self) -> Value {
        let pts: Vec<Value> =
            self.space.points().zip(&self.values).map(|(x, v)| json!({ "point": x, "value": v.to_json() })).collect();
        json!({
            "level": self.level(),
            "n": self.data.n(),
            "p": self.data.p(),
            "scale": self.scale.to_json(),
            "table": pts,
        })
    }

    pub fn from_json(data: &Arc<InducedData>, v: &Value) -> Result<Self> {
        let level =
            v.get("level").and_then(Value::as_u64).ok_or_else(|| Error::Validation("missing level".into()))? as u32;
        let table =
            v.get("table").and_then(Value::as_array).ok_or_else(|| Error::Validation("missing table".into()))?;
        let values = table
            .iter()
            .map(|e| CoeffValue::from_json(data.field(), e.get("value").unwrap_or(&Value::Null)))
            .collect::<Result<Vec<_>>>()?;
        let mut f = Self::from_values(data, level, values)?;
        if let Some(s) = v.get("scale") {
            f.scale = SatakeRat::from_json(data.field(), s)?;
        }
        Ok(f)
    }
}

/// `v(det y)` for an integral matrix known mod `p^avail`.
pub(crate) fn det_valuation(y: &[u64], n: usize, p: u64, avail: u32) -> Result<u32> {
    let d = det_mod(y, n, pow(p, avail));
    if d == 0 {
        return Err(Error::Precision(format!("determinant vanishes mod p^{avail}")));
    }
    Ok(val_capped(d, p, avail))
}
