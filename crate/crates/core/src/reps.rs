//! Principal-series data `χ_1 ⊞ … ⊞ χ_n` and their L-factors.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::chars::{MultChar, Uniformizer};
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat, TruncSeries, VarId};
use crate::padic::{PadicScalar, MAX_N};

/// Which alphabet of Satake variables a datum uses by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alphabet {
    Main,
    Partner,
}

impl Alphabet {
    pub fn var(self, i: usize) -> VarId {
        match self {
            Alphabet::Main => VarId::alpha(i),
            Alphabet::Partner => VarId::alpha_prime(i),
        }
    }
}

/// An induced representation `Ind(χ_1 ⊗ … ⊗ χ_n)`; each `χ_i` carries its Satake parameter
/// `α_i = χ_i(ϖ)q^{-t_i}` as its uniformizer value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanglandsDatum {
    p: u64,
    chars: Vec<MultChar>,
    /// Caller's assertion that the data are in Langlands order, for symbolic parameters.
    ordered: bool,
}

/// The central character `ω_π = ∏ χ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralChar {
    unit: MultChar,
    uniformizers: Vec<Uniformizer>,
}

impl CentralChar {
    /// Unit part, with uniformizer value 1.
    pub fn unit_part(&self) -> &MultChar {
        &self.unit
    }

    pub fn conductor(&self) -> u32 {
        self.unit.declared_conductor()
    }

    /// `ω(ϖ) = ∏ α_i`.
    pub fn at_uniformizer(&self, field: &Arc<CoeffField>) -> SatakeRat {
        self.uniformizer_power(field, 1)
    }

    pub fn uniformizer_power(&self, field: &Arc<CoeffField>, e: i32) -> SatakeRat {
        let mut mono = Monomial::one();
        let mut c = CoeffValue::one(field);
        for u in &self.uniformizers {
            let (m, v) = u.power(field, e);
            mono = mono.mul(&m);
            c = &c * &v;
        }
        SatakeRat::from_poly(LaurentPoly::term(mono, c))
    }

    pub fn eval(&self, field: &Arc<CoeffField>, x: &PadicScalar) -> Result<SatakeRat> {
        let v = x.valuation()?.ok_or_else(|| Error::Domain("character evaluated at 0".into()))?;
        let unit = self.unit.eval(field, &x.mul(&PadicScalar::uniformizer_pow(x.prime(), -v, 64)))?;
        Ok(&unit * &self.uniformizer_power(field, v))
    }
}

impl LanglandsDatum {
    pub fn new(chars: Vec<MultChar>) -> Result<Self> {
        let first = chars.first().ok_or_else(|| Error::Validation("empty inducing data".into()))?;
        let p = first.prime();
        if chars.len() > MAX_N {
            return Err(Error::Unsupported(format!("n ≤ {MAX_N} only")));
        }
        if chars.iter().any(|c| c.prime() != p) {
            return Err(Error::Validation("characters over different primes".into()));
        }
        let d = LanglandsDatum { p, chars, ordered: true };
        d.check_order()?;
        Ok(d)
    }

    /// Builds a datum from short names: `quad`, `triv`/`unram`, each optionally followed by
    /// `:<uniformizer>` (a variable name or a rational).
    pub fn from_names(p: u64, names: &[&str], alphabet: Alphabet) -> Result<Self> {
        let mut chars = Vec::new();
        for (i, raw) in names.iter().enumerate() {
            if i >= MAX_N {
                return Err(Error::Unsupported(format!("n ≤ {MAX_N} only")));
            }
            let (name, unif) = match raw.split_once(':') {
                Some((n, u)) => (n.trim(), Uniformizer::parse(u)?),
                None => (raw.trim(), Uniformizer::var(alphabet.var(i))),
            };
            let ch = match name {
                "triv" | "unram" | "1" => MultChar::unramified(p, unif),
                "quad" => MultChar::quadratic(p, unif),
                other => return Err(Error::Validation(format!("unknown character name `{other}`"))),
            };
            chars.push(ch);
        }
        Self::new(chars)
    }

    pub fn from_json(p: u64, v: &Value, alphabet: Alphabet) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Validation("datum must be an array".into()))?;
        let chars = arr
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                Value::String(s) => Ok(Self::from_names(p, &[s.as_str()], alphabet)?.chars.remove(0).with_uniformizer(
                    match s.split_once(':') {
                        Some((_, u)) => Uniformizer::parse(u)?,
                        None => Uniformizer::var(alphabet.var(i)),
                    },
                )),
                other => MultChar::from_spec_json(p, other, alphabet.var(i)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chars)
    }

    pub fn to_json(&self) -> Value {
        json!(self.chars.iter().map(MultChar::spec_json).collect::<Vec<_>>())
    }

    /// Marks symbolic data as (not) asserted to be in Langlands order.
    pub fn with_ordering(mut self, ordered: bool) -> Self {
        self.ordered = ordered;
        self
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// With every `α_i` a rational, Langlands order means `|α_1| ≤ … ≤ |α_n|`.
    fn check_order(&self) -> Result<()> {
        let vals: Option<Vec<BigRational>> = self
            .chars
            .iter()
            .map(|c| match c.uniformizer() {
                Uniformizer::Value(r) => Some(r.abs()),
                _ => None,
            })
            .collect();
        if let Some(vals) = vals {
            if vals.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Validation(
                    "Satake parameters are not in Langlands order (|α_1| ≤ … ≤ |α_n|)".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.chars.len()
    }

    pub fn chars(&self) -> &[MultChar] {
        &self.chars
    }

    /// `Σ c(χ_i)`: the conductor exponent predicted by additivity.
    pub fn predicted_conductor(&self) -> u32 {
        self.chars.iter().map(MultChar::conductor).sum()
    }

    pub fn max_char_conductor(&self) -> u32 {
        self.chars.iter().map(MultChar::conductor).max().unwrap_or(0)
    }

    pub fn is_spherical(&self) -> bool {
        self.chars.iter().all(MultChar::is_unramified)
    }

    /// lcm of the orders of the unit-part values.
    pub fn unit_order(&self) -> u64 {
        self.chars.iter().fold(1u64, |acc, c| acc.lcm(&c.order()))
    }

    pub fn central_character(&self) -> Result<CentralChar> {
        Ok(CentralChar {
            unit: MultChar::unit_product(self.p, &self.chars)?,
            uniformizers: self.chars.iter().map(|c| c.uniformizer().clone()).collect(),
        })
    }

    pub fn satake(&self, field: &Arc<CoeffField>) -> Vec<SatakeRat> {
        self.chars.iter().map(|c| c.uniformizer().to_satake(field)).collect()
    }

    /// `L(s,π) = ∏_{c(χ_i)=0} (1 - α_i X)^{-1}` modulo `X^T`.
    pub fn l_factor(&self, field: &Arc<CoeffField>, t: usize) -> Result<TruncSeries> {
        let mut acc = TruncSeries::one(field, t);
        for c in self.chars.iter().filter(|c| c.is_unramified()) {
            acc = acc.mul(&TruncSeries::geometric(&c.uniformizer().to_satake(field), t))?;
        }
        Ok(acc)
    }

    /// `L(s, π × π') = ∏_j ∏_{c(χ_i)=0} (1 - α_i α'_j X)^{-1}` for spherical `π'`.
    pub fn rs_l_factor(&self, other: &LanglandsDatum, field: &Arc<CoeffField>, t: usize) -> Result<TruncSeries> {
        if !other.is_spherical() {
            return Err(Error::Unsupported("Rankin–Selberg partner must be spherical".into()));
        }
        let mut acc = TruncSeries::one(field, t);
        for b in other.satake(field) {
            for c in self.chars.iter().filter(|c| c.is_unramified()) {
                let a = &c.uniformizer().to_satake(field) * &b;
                acc = acc.mul(&TruncSeries::geometric(&a, t))?;
            }
        }
        Ok(acc)
    }

    /// `π̃`: inverted characters in reversed order, which keeps Langlands order.
    pub fn contragredient(&self) -> Result<Self> {
        let chars = self.chars.iter().rev().map(MultChar::inverse).collect::<Result<Vec<_>>>()?;
        Ok(LanglandsDatum { p: self.p, chars, ordered: self.ordered })
    }

    /// `Ind(χ_1^{-1} ⊗ … ⊗ χ_n^{-1})` without reordering: the model of `π̃` that pairs with
    /// the induced model of `π` by integration over `K`.
    pub fn inverse_characters(&self) -> Result<Self> {
        let chars = self.chars.iter().map(MultChar::inverse).collect::<Result<Vec<_>>>()?;
        Ok(LanglandsDatum { p: self.p, chars, ordered: self.ordered })
    }
}

impl fmt::Display for LanglandsDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chars.iter().map(MultChar::label).collect();
        write!(f, "p={} [{}]", self.p, parts.join(" ⊞ "))
    }
}

/// The named verification battery for a prime.
pub fn battery(p: u64) -> Result<Vec<(&'static str, LanglandsDatum)>> {
    let mut out = vec![("spherical", LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Main)?)];
    out.push(("quad+unram", LanglandsDatum::from_names(p, &["quad", "unram"], Alphabet::Main)?));
    if p != 2 {
        out.push(("quad+quad", LanglandsDatum::from_names(p, &["quad", "quad"], Alphabet::Main)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> Arc<CoeffField> {
        CoeffField::new(2, 3).unwrap()
    }

    #[test]
    fn conductors_and_sphericity() {
        let d = LanglandsDatum::from_names(3, &["quad", "triv"], Alphabet::Main).unwrap();
        assert_eq!(d.predicted_conductor(), 1);
        assert!(!d.is_spherical());
        let s = LanglandsDatum::from_names(3, &["triv", "triv", "triv"], Alphabet::Main).unwrap();
        assert_eq!(s.predicted_conductor(), 0);
        assert!(s.is_spherical());
        let qq = LanglandsDatum::from_names(3, &["quad", "quad"], Alphabet::Main).unwrap();
        assert_eq!(qq.central_character().unwrap().conductor(), 0);
    }

    #[test]
    fn l_factors() {
        let f = field();
        let d = LanglandsDatum::from_names(3, &["quad", "triv"], Alphabet::Main).unwrap();
        let a2 = SatakeRat::var(&f, VarId::alpha(1));
        assert_eq!(d.l_factor(&f, 4).unwrap(), TruncSeries::geometric(&a2, 4));
        let r = LanglandsDatum::from_names(3, &["quad", "quad"], Alphabet::Main).unwrap();
        assert_eq!(r.l_factor(&f, 3).unwrap(), TruncSeries::one(&f, 3));
        let s = LanglandsDatum::from_names(3, &["triv", "triv"], Alphabet::Main).unwrap();
        let l = s.l_factor(&f, 3).unwrap();
        let a1 = SatakeRat::var(&f, VarId::alpha(0));
        assert_eq!(l.coeff(1), &(&a1 + &a2));
        let back = l.mul(&TruncSeries::one_minus(&a1, 3)).unwrap().mul(&TruncSeries::one_minus(&a2, 3)).unwrap();
        assert_eq!(back, TruncSeries::one(&f, 3));
    }

    #[test]
    fn rs_degenerates_to_standard() {
        let f = field();
        let s = LanglandsDatum::from_names(3, &["triv", "triv"], Alphabet::Main).unwrap();
        let one = LanglandsDatum::from_names(3, &["triv:1"], Alphabet::Partner).unwrap();
        assert_eq!(s.rs_l_factor(&one, &f, 4).unwrap(), s.l_factor(&f, 4).unwrap());
        let q = LanglandsDatum::from_names(3, &["quad"], Alphabet::Partner).unwrap();
        assert!(s.rs_l_factor(&q, &f, 2).is_err());
    }

    #[test]
    fn contragredient_is_an_involution() {
        let d = LanglandsDatum::from_names(3, &["quad", "triv"], Alphabet::Main).unwrap();
        let c = d.contragredient().unwrap();
        assert_eq!(c.chars()[1].uniformizer(), &Uniformizer::Symbolic { var: VarId::alpha(0), power: -1 });
        assert_eq!(c.contragredient().unwrap(), d);
    }

    #[test]
    fn langlands_order_is_checked_for_values() {
        assert!(LanglandsDatum::from_names(3, &["triv:1/2", "triv:1/3"], Alphabet::Main).is_err());
        assert!(LanglandsDatum::from_names(3, &["triv:1/3", "triv:1/2"], Alphabet::Main).is_ok());
    }
}
