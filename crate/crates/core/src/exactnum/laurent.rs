use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::coeff::CoeffValue;
use super::cyclotomic::CoeffField;
use crate::error::{Error, Result};

pub const MAX_VARS: usize = 8;
const ALPHABET: usize = 4;

/// A Satake variable. Indices `0..4` are the alphabet `α_1..α_4` of the main datum,
/// `4..8` the second alphabet `α'_1..α'_4` of a Rankin–Selberg partner.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub u8);

impl VarId {
    pub fn alpha(i: usize) -> VarId {
        assert!(i < ALPHABET, "at most {ALPHABET} Satake variables per alphabet");
        VarId(i as u8)
    }

    pub fn alpha_prime(i: usize) -> VarId {
        assert!(i < ALPHABET, "at most {ALPHABET} Satake variables per alphabet");
        VarId((ALPHABET + i) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> String {
        let i = self.index();
        if i < ALPHABET {
            format!("a{}", i + 1)
        } else {
            format!("a'{}", i - ALPHABET + 1)
        }
    }

    /// Accepts `a1`, `alpha_1`, `alpha1`, and the primed forms `a'1`, `alpha'_1`, `alphap_1`.
    pub fn parse(s: &str) -> Result<VarId> {
        let bad = || Error::Validation(format!("unknown Satake variable `{s}`"));
        let t = s.trim();
        let (primed, rest) = if let Some(r) = t.strip_prefix("alpha'").or_else(|| t.strip_prefix("a'")) {
            (true, r)
        } else if let Some(r) = t.strip_prefix("alphap") {
            (true, r)
        } else if let Some(r) = t.strip_prefix("alpha").or_else(|| t.strip_prefix('a')) {
            (false, r)
        } else {
            return Err(bad());
        };
        let idx: usize = rest.trim_start_matches('_').parse().map_err(|_| bad())?;
        if idx == 0 || idx > ALPHABET {
            return Err(bad());
        }
        Ok(if primed { VarId::alpha_prime(idx - 1) } else { VarId::alpha(idx - 1) })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(pub [i16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(v: VarId, e: i16) -> Self {
        let mut m = Monomial::one();
        m.0[v.index()] = e;
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(o.0) {
            *a += b;
        }
        out
    }

    pub fn inv(&self) -> Monomial {
        let mut out = *self;
        for a in out.0.iter_mut() {
            *a = -*a;
        }
        out
    }

    pub fn exponent(&self, v: VarId) -> i16 {
        self.0[v.index()]
    }

    fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0).all(|(a, b)| *a <= b)
    }

    fn to_json(self) -> Value {
        let mut m = Map::new();
        for (i, e) in self.0.iter().enumerate() {
            if *e != 0 {
                m.insert(VarId(i as u8).name(), json!(e));
            }
        }
        Value::Object(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, e) in self.0.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = VarId(i as u8).name();
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// A Laurent polynomial in the Satake variables with [`CoeffValue`] coefficients.
#[derive(Clone)]
pub struct LaurentPoly {
    field: Arc<CoeffField>,
    terms: BTreeMap<Monomial, CoeffValue>,
}

impl LaurentPoly {
    pub fn zero(field: &Arc<CoeffField>) -> Self {
        LaurentPoly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(field: &Arc<CoeffField>) -> Self {
        Self::constant(CoeffValue::one(field))
    }

    pub fn constant(c: CoeffValue) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: CoeffValue) -> Self {
        let mut p = LaurentPoly::zero(c.field());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(field: &Arc<CoeffField>, v: VarId) -> Self {
        Self::term(Monomial::var(v, 1), CoeffValue::one(field))
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffValue)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> CoeffValue {
        self.terms.get(m).cloned().unwrap_or_else(|| CoeffValue::zero(&self.field))
    }

    pub fn as_constant(&self) -> Option<CoeffValue> {
        match self.terms.len() {
            0 => Some(CoeffValue::zero(&self.field)),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(Monomial, CoeffValue)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (*m, c.clone()))
        } else {
            None
        }
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: &CoeffValue) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &CoeffValue) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(&self.field);
        }
        LaurentPoly { field: self.field.clone(), terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.mul(mono), x.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = LaurentPoly::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Renames variables; `map[i]` is the new variable for old variable `i`.
    pub fn substitute_vars(&self, map: &[VarId; MAX_VARS]) -> Self {
        let mut out = LaurentPoly::zero(&self.field);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one();
            for (i, e) in m.0.iter().enumerate() {
                nm.0[map[i].index()] += e;
            }
            out.add_term(nm, c);
        }
        out
    }

    /// Substitutes concrete values for some variables; the others stay symbolic.
    pub fn specialize(&self, values: &BTreeMap<VarId, CoeffValue>) -> Result<Self> {
        let mut out = LaurentPoly::zero(&self.field);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = *m;
            for (v, val) in values {
                let e = m.exponent(*v);
                if e != 0 {
                    coeff = &coeff * &val.pow(e as i64)?;
                    rest.0[v.index()] = 0;
                }
            }
            out.add_term(rest, &coeff);
        }
        Ok(out)
    }

    /// Full evaluation; every variable that occurs must be assigned.
    pub fn eval(&self, values: &BTreeMap<VarId, CoeffValue>) -> Result<CoeffValue> {
        let s = self.specialize(values)?;
        s.as_constant().ok_or_else(|| Error::Validation("evaluation left unassigned Satake variables".into()))
    }

    fn min_exponents(&self) -> Monomial {
        let mut mins = [i16::MAX; MAX_VARS];
        for m in self.terms.keys() {
            for (a, b) in mins.iter_mut().zip(m.0) {
                *a = (*a).min(b);
            }
        }
        Monomial(mins)
    }

    /// Exact quotient `self / d` in the Laurent ring, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &LaurentPoly) -> Result<Option<LaurentPoly>> {
        if d.is_zero() {
            return Err(Error::Domain("division by the zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(Some(LaurentPoly::zero(&self.field)));
        }
        let dmin = d.min_exponents();
        let amin = self.min_exponents();
        let dp = d.mul_monomial(&dmin.inv());
        let mut r = self.mul_monomial(&amin.inv());
        let (lm, lc) = dp.terms.iter().next_back().map(|(m, c)| (*m, c.clone())).unwrap();
        let lc_inv = lc.inv()?;
        let mut quo = LaurentPoly::zero(&self.field);
        while let Some((rm, rc)) = r.terms.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            if !lm.divides(&rm) {
                return Ok(None);
            }
            let tm = rm.mul(&lm.inv());
            let tc = &rc * &lc_inv;
            quo.add_term(tm, &tc);
            r = &r - &dp.mul_monomial(&tm).scale(&tc);
        }
        Ok(Some(quo.mul_monomial(&amin.mul(&dmin.inv()))))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(m, c)| json!({ "mono": m.to_json(), "coeff": c.to_json() })).collect())
    }

    pub fn from_json(field: &Arc<CoeffField>, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Validation("polynomial must be an array".into()))?;
        let mut out = LaurentPoly::zero(field);
        for t in arr {
            let mut m = Monomial::one();
            if let Some(obj) = t.get("mono").and_then(Value::as_object) {
                for (k, e) in obj {
                    let v = VarId::parse(k)?;
                    let e = e.as_i64().ok_or_else(|| Error::Validation("exponent must be an integer".into()))?;
                    m.0[v.index()] = e as i16;
                }
            }
            let c = CoeffValue::from_json(field, t.get("coeff").unwrap_or(&Value::Null))?;
            out.add_term(m, &c);
        }
        Ok(out)
    }
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(&self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { field: self.field.clone(), terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest terms first reads more naturally
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') || rest.starts_with('(') => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let mag = if mag.contains(" + ") || mag.contains(" - ") {
                if mag.starts_with('(') {
                    mag
                } else {
                    format!("({mag})")
                }
            } else {
                mag
            };
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field() -> Arc<CoeffField> {
        CoeffField::new(1, 3).unwrap()
    }

    #[test]
    fn var_names_round_trip() {
        for s in ["a1", "alpha_2", "alpha3", "a'1", "alpha'_2", "alphap_4"] {
            let v = VarId::parse(s).unwrap();
            assert_eq!(VarId::parse(&v.name()).unwrap(), v);
        }
        assert!(VarId::parse("alpha_5").is_err());
        assert!(VarId::parse("beta").is_err());
    }

    #[test]
    fn exact_division() {
        let f = field();
        let x = LaurentPoly::var(&f, VarId::alpha(0));
        let y = LaurentPoly::var(&f, VarId::alpha(1));
        let one = LaurentPoly::one(&f);
        // (x^3 - y^3) / (x - y) = x^2 + xy + y^2
        let num = &x.pow(3) - &y.pow(3);
        let q = num.div_exact(&(&x - &y)).unwrap().unwrap();
        assert_eq!(q, &(&x.pow(2) + &(&x * &y)) + &y.pow(2));
        // Laurent shifts: (1 + x^-1) / (x + 1) = x^-1
        let xinv = LaurentPoly::term(Monomial::var(VarId::alpha(0), -1), CoeffValue::one(&f));
        let q = (&one + &xinv).div_exact(&(&x + &one)).unwrap().unwrap();
        assert_eq!(q, xinv);
        // not divisible
        assert!((&x + &one).div_exact(&(&x - &y)).unwrap().is_none());
    }

    #[test]
    fn display_reads_naturally() {
        let f = field();
        let x = LaurentPoly::var(&f, VarId::alpha(0));
        let y = LaurentPoly::var(&f, VarId::alpha(1));
        let p = &(&x.pow(2) + &(&x * &y).scale(&CoeffValue::from_int(&f, -2))) + &LaurentPoly::one(&f);
        assert_eq!(p.to_string(), "a1^2 - 2*a1*a2 + 1");
    }
}
