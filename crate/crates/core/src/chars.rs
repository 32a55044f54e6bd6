//! Multiplicative characters of `Q_p^×` and the standard additive character of `Q_p`.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{
    parse_rational, rational_string, CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat, VarId,
};
use crate::padic::modular::{inv_mod, mulmod, pow};
use crate::padic::PadicScalar;

/// The value of a character at the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Uniformizer {
    /// `var^power`, kept symbolic.
    Symbolic {
        var: VarId,
        power: i16,
    },
    Value(BigRational),
}

impl Uniformizer {
    pub fn var(v: VarId) -> Self {
        Uniformizer::Symbolic { var: v, power: 1 }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            Uniformizer::Symbolic { var, power } => Uniformizer::Symbolic { var: *var, power: -power },
            Uniformizer::Value(r) => {
                if r.is_zero() {
                    return Err(Error::Domain("uniformizer value must be nonzero".into()));
                }
                Uniformizer::Value(r.recip())
            }
        })
    }

    /// `value^e` split into a monomial and a scalar.
    pub fn power(&self, field: &Arc<CoeffField>, e: i32) -> (Monomial, CoeffValue) {
        match self {
            Uniformizer::Symbolic { var, power } => (Monomial::var(*var, power * e as i16), CoeffValue::one(field)),
            Uniformizer::Value(r) => {
                let v = CoeffValue::from_rational(field, r.clone());
                (Monomial::one(), v.pow(e as i64).expect("nonzero uniformizer value"))
            }
        }
    }

    pub fn to_satake(&self, field: &Arc<CoeffField>) -> SatakeRat {
        let (m, c) = self.power(field, 1);
        SatakeRat::from_poly(LaurentPoly::term(m, c))
    }

    pub fn parse(s: &str) -> Result<Self> {
        if let Ok(v) = VarId::parse(s) {
            return Ok(Uniformizer::var(v));
        }
        let r = parse_rational(s)?;
        if r.is_zero() {
            return Err(Error::Validation("uniformizer value must be nonzero".into()));
        }
        Ok(Uniformizer::Value(r))
    }

    pub fn label(&self) -> String {
        match self {
            Uniformizer::Symbolic { var, power: 1 } => var.name(),
            Uniformizer::Symbolic { var, power } => format!("{}^{power}", var.name()),
            Uniformizer::Value(r) => rational_string(r),
        }
    }
}

/// A character of `Q_p^×`: a table of its unit part on `(Z/p^c)^×` with values in `μ_D`,
/// plus its value at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultChar {
    p: u64,
    declared: u32,
    order: u64,
    /// `table[u mod p^c]` is the exponent `e` with `χ(u) = exp(2πi e / order)`; non-units hold 0.
    table: Vec<u64>,
    uniformizer: Uniformizer,
    /// Generator images as fractions of a turn, kept for serialization.
    images: Vec<BigRational>,
}

/// Generators of `(Z/p^c)^×`: a primitive root mod `p^2` for odd `p`; `-1` and `5` for `p = 2`.
pub fn unit_generators(p: u64, c: u32) -> Vec<u64> {
    if c == 0 {
        return Vec::new();
    }
    if p == 2 {
        return match c {
            1 => Vec::new(),
            2 => vec![3],
            _ => vec![pow(2, c) - 1, 5],
        };
    }
    let phi = p - 1;
    let factors = prime_factors(phi);
    let mut g = 2;
    loop {
        if factors.iter().all(|&f| pow_mod(g, phi / f, p) != 1) {
            break;
        }
        g += 1;
    }
    if pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    vec![g % pow(p, c).max(p)]
}

/// Multiplicative orders of the generators returned by [`unit_generators`].
fn generator_orders(p: u64, c: u32) -> Vec<u64> {
    if c == 0 {
        return Vec::new();
    }
    if p == 2 {
        return match c {
            1 => Vec::new(),
            2 => vec![2],
            _ => vec![2, pow(2, c - 2)],
        };
    }
    vec![(p - 1) * pow(p, c - 1)]
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

impl MultChar {
    pub fn unramified(p: u64, uniformizer: Uniformizer) -> Self {
        MultChar { p, declared: 0, order: 1, table: vec![0], uniformizer, images: Vec::new() }
    }

    /// The character sending the `i`-th generator of `(Z/p^c)^×` to `exp(2πi·images[i])`.
    pub fn from_images(p: u64, conductor: u32, images: &[BigRational], uniformizer: Uniformizer) -> Result<Self> {
        let gens = unit_generators(p, conductor);
        let orders = generator_orders(p, conductor);
        if images.len() != gens.len() {
            return Err(Error::Validation(format!(
                "(Z/{p}^{conductor})^× has {} generator(s), got {} image(s)",
                gens.len(),
                images.len()
            )));
        }
        let mut images: Vec<BigRational> = images.iter().map(|r| r - r.floor()).collect();
        let mut order = 1u64;
        for (img, &ord) in images.iter_mut().zip(&orders) {
            // the image must be an ord-th root of unity
            if !(img.clone() * BigRational::from_integer(ord.into())).is_integer() {
                return Err(Error::Validation(format!(
                    "generator of order {ord} cannot map to the turn {}",
                    rational_string(img)
                )));
            }
            let d: u64 = img.denom().try_into().map_err(|_| Error::Validation("image denominator too large".into()))?;
            order = order.lcm(&d);
        }
        let pc = pow(p, conductor);
        let mut table = vec![0u64; pc as usize];
        let exps: Vec<u64> = images
            .iter()
            .map(|img| {
                let scaled = img.clone() * BigRational::from_integer(order.into());
                u64::try_from(scaled.to_integer()).expect("exponent fits")
            })
            .collect();
        // walk the group as products of generator powers
        let mut idx = vec![0u64; gens.len()];
        loop {
            let mut u = 1 % pc;
            let mut e = 0u64;
            for (i, &k) in idx.iter().enumerate() {
                u = mulmod(u, pow_mod(gens[i], k, pc), pc);
                e = (e + k * exps[i]) % order;
            }
            table[u as usize] = e;
            let mut i = gens.len();
            let mut done = true;
            while i > 0 {
                i -= 1;
                idx[i] += 1;
                if idx[i] < orders[i] {
                    done = false;
                    break;
                }
                idx[i] = 0;
            }
            if done {
                break;
            }
        }
        let ch = MultChar { p, declared: conductor, order, table, uniformizer, images };
        if ch.conductor() != conductor {
            return Err(Error::Validation(format!(
                "declared conductor {conductor} but the unit part has conductor {}",
                ch.conductor()
            )));
        }
        Ok(ch)
    }

    /// The quadratic character of smallest conductor: the Legendre symbol for odd `p`,
    /// `u ↦ (-1)^{(u-1)/2}` (conductor 2) for `p = 2`.
    pub fn quadratic(p: u64, uniformizer: Uniformizer) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        let c = if p == 2 { 2 } else { 1 };
        Self::from_images(p, c, &[half], uniformizer).expect("quadratic character")
    }

    /// Builds a character from an explicit exponent table, validating the homomorphism property.
    pub fn from_table(p: u64, conductor: u32, order: u64, table: Vec<u64>, uniformizer: Uniformizer) -> Result<Self> {
        let pc = pow(p, conductor);
        if table.len() as u64 != pc || order == 0 {
            return Err(Error::Validation("character table has the wrong size".into()));
        }
        let units: Vec<u64> = (0..pc).filter(|u| pc == 1 || u % p != 0).collect();
        for &u in &units {
            for &v in &units {
                let uv = mulmod(u, v, pc);
                if table[uv as usize] % order != (table[u as usize] + table[v as usize]) % order {
                    return Err(Error::Validation(format!("table is not multiplicative at {u}·{v} mod {pc}")));
                }
            }
        }
        let gens = unit_generators(p, conductor);
        let images = gens.iter().map(|&g| BigRational::new((table[g as usize] % order).into(), order.into())).collect();
        let ch = MultChar { p, declared: conductor, order, table, uniformizer, images };
        if ch.conductor() != conductor {
            return Err(Error::Validation(format!(
                "declared conductor {conductor} but the table has conductor {}",
                ch.conductor()
            )));
        }
        Ok(ch)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Order `D` of the unit-part values (all values lie in `μ_D`).
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn uniformizer(&self) -> &Uniformizer {
        &self.uniformizer
    }

    pub fn with_uniformizer(&self, u: Uniformizer) -> Self {
        MultChar { uniformizer: u, ..self.clone() }
    }

    pub fn declared_conductor(&self) -> u32 {
        self.declared
    }

    /// Minimal `c` with the unit part trivial on `1 + p^c`, recomputed from the table.
    pub fn conductor(&self) -> u32 {
        let pc = pow(self.p, self.declared);
        for c in 0..self.declared {
            let step = pow(self.p, c);
            // units ≡ 1 mod p^c (for c = 0: all units)
            let trivial = (0..pc)
                .filter(|u| u % self.p != 0 && (c == 0 || (u + pc - 1) % step == 0))
                .all(|u| self.table[u as usize] == 0);
            if trivial {
                return c;
            }
        }
        self.declared
    }

    pub fn is_unramified(&self) -> bool {
        self.declared == 0
    }

    /// Exponent `e` in `Z/D` of `χ(u)` for a unit residue `u` (any modulus that is a multiple of `p^c`).
    #[inline]
    pub fn unit_exponent(&self, u: u64) -> u64 {
        self.table[(u % self.table.len() as u64) as usize]
    }

    /// Exponent table rescaled to `Z/M` for a session field of order `M`.
    pub fn session_table(&self, m: u64) -> Result<Vec<u64>> {
        if m % self.order != 0 {
            return Err(Error::Validation(format!(
                "session root-of-unity order {m} is not a multiple of the character order {}",
                self.order
            )));
        }
        let scale = m / self.order;
        Ok(self.table.iter().map(|e| e * scale % m).collect())
    }

    pub fn inverse(&self) -> Result<Self> {
        let table = self.table.iter().map(|e| (self.order - e % self.order) % self.order).collect();
        let images = self.images.iter().map(|r| {
            let neg = -r.clone();
            &neg - neg.floor()
        });
        Ok(MultChar {
            p: self.p,
            declared: self.declared,
            order: self.order,
            table,
            uniformizer: self.uniformizer.inverse()?,
            images: images.collect(),
        })
    }

    /// The unit part of `∏ χ_i`, with uniformizer value 1, at its minimal conductor.
    pub fn unit_product(p: u64, chars: &[MultChar]) -> Result<Self> {
        let top = chars.iter().map(|c| c.declared).max().unwrap_or(0);
        let order = chars.iter().fold(1u64, |acc, c| acc.lcm(&c.order));
        let pc = pow(p, top);
        let full: Vec<u64> = (0..pc)
            .map(|u| {
                if pc > 1 && u % p == 0 {
                    return 0;
                }
                chars.iter().map(|c| c.unit_exponent(u) * (order / c.order)).sum::<u64>() % order
            })
            .collect();
        let one = Uniformizer::Value(BigRational::from_integer(1.into()));
        let probe =
            MultChar { p, declared: top, order, table: full.clone(), uniformizer: one.clone(), images: Vec::new() };
        let c = probe.conductor();
        if c == 0 {
            return Ok(MultChar::unramified(p, one));
        }
        let pc = pow(p, c);
        MultChar::from_table(p, c, order, full[..pc as usize].to_vec(), one)
    }

    /// `χ(x)` as an exact function of the Satake variables.
    pub fn eval(&self, field: &Arc<CoeffField>, x: &PadicScalar) -> Result<SatakeRat> {
        let v = x.valuation()?.ok_or_else(|| Error::Domain("character evaluated at 0".into()))?;
        let u = if self.declared == 0 { 1 } else { x.unit_mod(self.declared)? };
        let (mono, c) = self.uniformizer.power(field, v);
        let z = zeta_of(field, self.unit_exponent(u), self.order)?;
        Ok(SatakeRat::from_poly(LaurentPoly::term(mono, &c * &z)))
    }

    pub fn spec_json(&self) -> Value {
        json!({
            "conductor": self.declared,
            "unit_images": self.images.iter().map(rational_string).collect::<Vec<_>>(),
            "uniformizer": match &self.uniformizer {
                Uniformizer::Value(r) => rational_string(r),
                Uniformizer::Symbolic { var, power: 1 } => var.name(),
                other => other.label(),
            },
        })
    }

    pub fn from_spec_json(p: u64, v: &Value, default_var: VarId) -> Result<Self> {
        let conductor = v.get("conductor").and_then(Value::as_u64).unwrap_or(0) as u32;
        let images: Vec<BigRational> = match v.get("unit_images") {
            Some(Value::Array(arr)) => arr
                .iter()
                .map(|x| match x {
                    Value::String(s) => parse_rational(s),
                    Value::Number(n) => parse_rational(&n.to_string()),
                    _ => Err(Error::Validation("unit image must be a fraction of a turn".into())),
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
            _ => return Err(Error::Validation("unit_images must be an array".into())),
        };
        let uniformizer = match v.get("uniformizer").and_then(Value::as_str) {
            Some(s) => Uniformizer::parse(s)?,
            None => Uniformizer::var(default_var),
        };
        if conductor == 0 {
            if !images.is_empty() {
                return Err(Error::Validation("an unramified character has no unit images".into()));
            }
            return Ok(MultChar::unramified(p, uniformizer));
        }
        MultChar::from_images(p, conductor, &images, uniformizer)
    }

    /// Short label used in reports: `triv`, `quad`, or `c=<c>`.
    pub fn label(&self) -> String {
        let kind = if self.declared == 0 {
            "unram".to_string()
        } else if self.order == 2 && self.declared == if self.p == 2 { 2 } else { 1 } {
            "quad".to_string()
        } else {
            format!("c{}", self.declared)
        };
        format!("{kind}({})", self.uniformizer.label())
    }
}

/// `exp(2πi e/d)` inside the session field.
pub fn zeta_of(field: &Arc<CoeffField>, e: u64, d: u64) -> Result<CoeffValue> {
    let m = field.order() as u64;
    if m % d != 0 {
        return Err(Error::Validation(format!("μ_{d} is not contained in Q(ζ_{m})")));
    }
    Ok(CoeffValue::zeta(field, (e % d * (m / d)) as i64))
}

/// The standard unramified additive character `ψ(x) = exp(2πi {x}_p)` of `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddChar {
    p: u64,
    depth: u32,
    conjugate: bool,
}

impl AddChar {
    /// `depth` is the largest `k` for which `ψ` may be evaluated on `p^{-k}O`.
    pub fn new(p: u64, depth: u32) -> Self {
        AddChar { p, depth, conjugate: false }
    }

    pub fn conjugate(&self) -> Self {
        AddChar { conjugate: !self.conjugate, ..self.clone() }
    }

    pub fn is_conjugate(&self) -> bool {
        self.conjugate
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `ψ(j / p^k)` for an integer residue `j`.
    pub fn eval_fraction(&self, field: &Arc<CoeffField>, j: u64, k: u32) -> Result<CoeffValue> {
        if k == 0 {
            return Ok(CoeffValue::one(field));
        }
        if k > self.depth {
            return Err(Error::Depth { needed: k, available: self.depth });
        }
        let pk = pow(self.p, k);
        let j = j % pk;
        let e = if self.conjugate { (pk - j) % pk } else { j };
        zeta_of(field, e, pk)
    }

    pub fn eval(&self, field: &Arc<CoeffField>, x: &PadicScalar) -> Result<CoeffValue> {
        if x.is_zero() {
            return Ok(CoeffValue::one(field));
        }
        match x.valuation() {
            Ok(Some(v)) if v >= 0 => Ok(CoeffValue::one(field)),
            Ok(Some(v)) => {
                let k = (-v) as u32;
                let u = x.unit_mod(k)?;
                self.eval_fraction(field, u, k)
            }
            Ok(None) => Ok(CoeffValue::one(field)),
            Err(e) => {
                if x.valuation_lower_bound() >= 0 {
                    Ok(CoeffValue::one(field))
                } else {
                    Err(e)
                }
            }
        }
    }
}

/// Residue of `u^{-1}` for a unit, used when inverting character arguments.
pub fn unit_inverse(u: u64, modulus: u64) -> u64 {
    inv_mod(u, modulus).expect("unit residue")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(m: u32, q: u64) -> Arc<CoeffField> {
        CoeffField::new(m, q).unwrap()
    }

    #[test]
    fn legendre_symbol() {
        let chi = MultChar::quadratic(3, Uniformizer::var(VarId::alpha(0)));
        assert_eq!(chi.conductor(), 1);
        let f = field(2, 3);
        let two = PadicScalar::from_int(3, 2, 10);
        assert_eq!(chi.eval(&f, &two).unwrap(), SatakeRat::constant(CoeffValue::from_int(&f, -1)));
        let chi5 = MultChar::quadratic(5, Uniformizer::var(VarId::alpha(0)));
        assert_eq!(chi5.conductor(), 1);
        // squares mod 5 are 1 and 4
        assert_eq!(chi5.unit_exponent(4), 0);
        assert_eq!(chi5.unit_exponent(2), 1);
    }

    #[test]
    fn conductor_two_character() {
        // trivial on 1 + 9Z_3 but not on 1 + 3Z_3
        let third = BigRational::new(1.into(), 3.into());
        let chi = MultChar::from_images(3, 2, &[third], Uniformizer::var(VarId::alpha(0))).unwrap();
        assert_eq!(chi.conductor(), 2);
        let chi_minus = MultChar::quadratic(2, Uniformizer::var(VarId::alpha(0)));
        assert_eq!(chi_minus.conductor(), 2);
        assert_eq!(chi_minus.unit_exponent(3), 1);
        assert_eq!(chi_minus.unit_exponent(5), 0);
    }

    #[test]
    fn declared_conductor_must_be_minimal() {
        let half = BigRational::new(1.into(), 2.into());
        // the quadratic character mod 3 lifted to level 2 has conductor 1
        assert!(MultChar::from_images(3, 2, &[half], Uniformizer::var(VarId::alpha(0))).is_err());
    }

    #[test]
    fn additive_character() {
        let f = field(3, 3);
        let psi = AddChar::new(3, 1);
        let x = PadicScalar::from_ratio(3, 1, 3, 10).unwrap();
        assert_eq!(psi.eval(&f, &x).unwrap(), CoeffValue::zeta(&f, 1));
        assert_eq!(psi.eval(&f, &PadicScalar::from_int(3, 7, 10)).unwrap(), CoeffValue::one(&f));
        let deep = PadicScalar::from_ratio(3, 1, 9, 10).unwrap();
        assert_eq!(psi.eval(&f, &deep), Err(Error::Depth { needed: 2, available: 1 }));
        let three_x = x.mul(&PadicScalar::from_int(3, 3, 10));
        assert_eq!(psi.eval(&f, &three_x).unwrap(), CoeffValue::one(&f));
    }

    #[test]
    fn inverse_character() {
        let third = BigRational::new(1.into(), 3.into());
        let chi = MultChar::from_images(7, 1, &[third], Uniformizer::var(VarId::alpha(1))).unwrap();
        let inv = chi.inverse().unwrap();
        for u in 1..7 {
            assert_eq!((chi.unit_exponent(u) + inv.unit_exponent(u)) % chi.order(), 0);
        }
        assert_eq!(inv.inverse().unwrap(), chi);
    }
}
