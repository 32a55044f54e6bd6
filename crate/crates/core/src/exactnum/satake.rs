use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde_json::{json, Value};

use super::coeff::CoeffValue;
use super::cyclotomic::CoeffField;
use super::laurent::{LaurentPoly, VarId};
use crate::error::{Error, Result};

/// A rational function `num / den` in the Satake variables.
///
/// Denominators are only simplified when they are a single term or divide the numerator
/// exactly; equality is decided by cross-multiplication, so no gcd is ever needed.
#[derive(Clone)]
pub struct SatakeRat {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl SatakeRat {
    pub fn zero(field: &Arc<CoeffField>) -> Self {
        Self::from_poly(LaurentPoly::zero(field))
    }

    pub fn one(field: &Arc<CoeffField>) -> Self {
        Self::from_poly(LaurentPoly::one(field))
    }

    pub fn constant(c: CoeffValue) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn var(field: &Arc<CoeffField>, v: VarId) -> Self {
        Self::from_poly(LaurentPoly::var(field, v))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let den = LaurentPoly::one(p.field());
        SatakeRat { num: p, den }
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("rational function with zero denominator".into()));
        }
        Ok(SatakeRat { num, den }.normalized())
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        self.num.field()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = LaurentPoly::one(self.num.field());
            return self;
        }
        if let Some((m, c)) = self.den.single_term() {
            let inv = c.inv().expect("nonzero term of a nonzero polynomial");
            self.num = self.num.mul_monomial(&m.inv()).scale(&inv);
            self.den = LaurentPoly::one(self.num.field());
            return self;
        }
        if let Ok(Some(q)) = self.num.div_exact(&self.den) {
            return SatakeRat::from_poly(q);
        }
        self
    }

    /// The underlying Laurent polynomial, when the denominator divides the numerator.
    pub fn to_poly(&self) -> Result<Option<LaurentPoly>> {
        self.num.div_exact(&self.den)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Domain("inverse of the zero rational function".into()));
        }
        Ok(SatakeRat { num: self.den.clone(), den: self.num.clone() }.normalized())
    }

    pub fn div(&self, other: &SatakeRat) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, c: &CoeffValue) -> Self {
        SatakeRat { num: self.num.scale(c), den: self.den.clone() }.normalized()
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = SatakeRat::one(self.field());
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn specialize(&self, values: &BTreeMap<VarId, CoeffValue>) -> Result<Self> {
        let den = self.den.specialize(values)?;
        if den.is_zero() {
            return Err(Error::Domain("specialization makes a denominator vanish".into()));
        }
        Ok(SatakeRat { num: self.num.specialize(values)?, den }.normalized())
    }

    /// Plain value when the function is constant.
    pub fn as_constant(&self) -> Option<CoeffValue> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(&n * &d.inv().ok()?)
    }

    /// Upper bound for `|self|` at a point where every variable has absolute value one,
    /// valid whenever the denominator is a nonzero constant.
    pub fn abs_upper_bound(&self) -> Option<num_rational::BigRational> {
        let d = self.den.as_constant()?;
        let dinv = d.inv().ok()?;
        let mut acc = num_rational::BigRational::from_integer(0.into());
        for (_, c) in self.num.terms() {
            acc += (c * &dinv).abs_upper_bound();
        }
        Some(acc)
    }

    pub fn to_json(&self) -> Value {
        if self.den == LaurentPoly::one(self.field()) {
            json!({ "num": self.num.to_json() })
        } else {
            json!({ "num": self.num.to_json(), "den": self.den.to_json() })
        }
    }

    pub fn from_json(field: &Arc<CoeffField>, v: &Value) -> Result<Self> {
        let num = LaurentPoly::from_json(field, v.get("num").unwrap_or(&Value::Array(vec![])))?;
        let den = match v.get("den") {
            Some(d) => LaurentPoly::from_json(field, d)?,
            None => LaurentPoly::one(field),
        };
        SatakeRat::new(num, den)
    }
}

impl PartialEq for SatakeRat {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for SatakeRat {}

impl<'a> Add<&'a SatakeRat> for &'a SatakeRat {
    type Output = SatakeRat;
    fn add(self, rhs: &SatakeRat) -> SatakeRat {
        if self.den == rhs.den {
            return SatakeRat { num: &self.num + &rhs.num, den: self.den.clone() }.normalized();
        }
        SatakeRat { num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den), den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Sub<&'a SatakeRat> for &'a SatakeRat {
    type Output = SatakeRat;
    fn sub(self, rhs: &SatakeRat) -> SatakeRat {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a SatakeRat> for &'a SatakeRat {
    type Output = SatakeRat;
    fn mul(self, rhs: &SatakeRat) -> SatakeRat {
        if self.is_zero() || rhs.is_zero() {
            return SatakeRat::zero(self.field());
        }
        SatakeRat { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalized()
    }
}

impl Neg for &SatakeRat {
    type Output = SatakeRat;
    fn neg(self) -> SatakeRat {
        SatakeRat { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for SatakeRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one(self.field()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for SatakeRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SatakeRat({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_multiplication_equality() {
        let f = CoeffField::new(1, 2).unwrap();
        let x = SatakeRat::var(&f, VarId::alpha(0));
        let y = SatakeRat::var(&f, VarId::alpha(1));
        let one = SatakeRat::one(&f);
        // 1/(1-x) + x/(1-x) ... stays a fraction, but (1+x)/(1-x^2) equals 1/(1-x)
        let a = (&one + &x).div(&(&one - &(&x * &x))).unwrap();
        let b = one.div(&(&one - &x)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, one.div(&(&one - &y)).unwrap());
    }

    #[test]
    fn exact_quotient_collapses() {
        let f = CoeffField::new(1, 2).unwrap();
        let x = SatakeRat::var(&f, VarId::alpha(0));
        let one = SatakeRat::one(&f);
        let r = (&(&x * &x) - &one).div(&(&x - &one)).unwrap();
        assert_eq!(r.denominator(), &LaurentPoly::one(&f));
        assert_eq!(r, &x + &one);
    }

    #[test]
    fn specialization() {
        let f = CoeffField::new(1, 3).unwrap();
        let x = SatakeRat::var(&f, VarId::alpha(0));
        let one = SatakeRat::one(&f);
        let r = one.div(&(&one - &x)).unwrap();
        let mut vals = BTreeMap::new();
        vals.insert(VarId::alpha(0), CoeffValue::from_frac(&f, 1, 3));
        assert_eq!(r.specialize(&vals).unwrap().as_constant().unwrap(), CoeffValue::from_frac(&f, 3, 2));
        vals.insert(VarId::alpha(0), CoeffValue::one(&f));
        assert!(r.specialize(&vals).is_err());
    }
}
