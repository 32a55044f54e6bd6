use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::cyclotomic::{cyc_abs_sum, CoeffField, Cyc};
use crate::error::{Error, Result};

/// An element `a + b·√q` of `Q(ζ_M)(√q)` with `a, b ∈ Q(ζ_M)`.
///
/// `√q` is adjoined formally: `(√q)^2` reduces to `q` and nothing is ever rounded.
#[derive(Clone)]
pub struct CoeffValue {
    field: Arc<CoeffField>,
    rat: Cyc,
    sqrtq: Cyc,
}

impl CoeffValue {
    pub fn zero(field: &Arc<CoeffField>) -> Self {
        CoeffValue { field: field.clone(), rat: field.cyc_zero(), sqrtq: field.cyc_zero() }
    }

    pub fn one(field: &Arc<CoeffField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_int(field: &Arc<CoeffField>, v: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(v.into()))
    }

    pub fn from_rational(field: &Arc<CoeffField>, r: BigRational) -> Self {
        CoeffValue { field: field.clone(), rat: field.cyc_from_rational(r), sqrtq: field.cyc_zero() }
    }

    pub fn from_frac(field: &Arc<CoeffField>, num: i64, den: i64) -> Self {
        Self::from_rational(field, BigRational::new(num.into(), den.into()))
    }

    /// `ζ_M^k`.
    pub fn zeta(field: &Arc<CoeffField>, k: i64) -> Self {
        CoeffValue { field: field.clone(), rat: field.cyc_zeta(k), sqrtq: field.cyc_zero() }
    }

    /// The bare adjoined square root `√q`.
    pub fn sqrtq(field: &Arc<CoeffField>) -> Self {
        CoeffValue { field: field.clone(), rat: field.cyc_zero(), sqrtq: field.cyc_from_rational(BigRational::one()) }
    }

    /// `(√q)^e` for any integer `e`.
    pub fn sqrtq_pow(field: &Arc<CoeffField>, e: i64) -> Self {
        let q = BigInt::from(field.q());
        let half = e.div_euclid(2);
        let odd = e.rem_euclid(2) == 1;
        let mag = q.pow(half.unsigned_abs() as u32);
        let r = if half >= 0 { BigRational::from_integer(mag) } else { BigRational::new(BigInt::one(), mag) };
        if odd {
            CoeffValue { field: field.clone(), rat: field.cyc_zero(), sqrtq: field.cyc_from_rational(r) }
        } else {
            Self::from_rational(field, r)
        }
    }

    /// `q^e`.
    pub fn q_pow(field: &Arc<CoeffField>, e: i64) -> Self {
        Self::sqrtq_pow(field, 2 * e)
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.rat.iter().all(Zero::is_zero) && self.sqrtq.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.sqrtq.iter().all(Zero::is_zero) && self.rat[0].is_one() && self.rat[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.sqrtq.iter().all(Zero::is_zero) && self.rat[1..].iter().all(Zero::is_zero) {
            Some(self.rat[0].clone())
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> &[BigRational] {
        &self.rat
    }

    pub fn sqrtq_part(&self) -> &[BigRational] {
        &self.sqrtq
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CoeffValue {
            field: self.field.clone(),
            rat: self.field.cyc_scale(&self.rat, s),
            sqrtq: self.field.cyc_scale(&self.sqrtq, s),
        }
    }

    pub fn scale_int(&self, s: i64) -> Self {
        self.scale(&BigRational::from_integer(s.into()))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero coefficient".into()));
        }
        let f = &self.field;
        if self.sqrtq.iter().all(Zero::is_zero) {
            return Ok(CoeffValue { field: f.clone(), rat: f.cyc_inv(&self.rat)?, sqrtq: f.cyc_zero() });
        }
        // (a + b√q)^{-1} = (a - b√q) / (a^2 - q b^2)
        let q = BigRational::from_integer(f.q().into());
        let a2 = f.cyc_mul(&self.rat, &self.rat);
        let b2 = f.cyc_mul(&self.sqrtq, &self.sqrtq);
        let norm: Cyc = a2.iter().zip(&b2).map(|(x, y)| x - &q * y).collect();
        if norm.iter().all(Zero::is_zero) {
            return Err(Error::Domain(format!(
                "√{} already lies in Q(ζ_{}); this element is a zero divisor",
                f.q(),
                f.order()
            )));
        }
        let ninv = f.cyc_inv(&norm)?;
        let rat = f.cyc_mul(&self.rat, &ninv);
        let sq = f.cyc_mul(&self.sqrtq, &ninv);
        Ok(CoeffValue { field: f.clone(), rat, sqrtq: sq.into_iter().map(|c| -c).collect() })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = CoeffValue::one(&self.field);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// A rational `B` with `|x| ≤ B` under every complex embedding.
    pub fn abs_upper_bound(&self) -> BigRational {
        cyc_abs_sum(&self.rat) + self.field.sqrtq_upper() * cyc_abs_sum(&self.sqrtq)
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &Cyc| -> Vec<String> { v.iter().map(rational_string).collect() };
        json!({ "rat": enc(&self.rat), "sqrtq": enc(&self.sqrtq) })
    }

    pub fn from_json(field: &Arc<CoeffField>, v: &Value) -> Result<Self> {
        let dec = |key: &str| -> Result<Cyc> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Validation(format!("coefficient missing `{key}` array")))?;
            if arr.len() != field.degree() {
                return Err(Error::Validation(format!(
                    "`{key}` has {} entries, field degree is {}",
                    arr.len(),
                    field.degree()
                )));
            }
            arr.iter()
                .map(|s| {
                    s.as_str()
                        .ok_or_else(|| Error::Validation("rational must be a string".into()))
                        .and_then(parse_rational)
                })
                .collect()
        };
        Ok(CoeffValue { field: field.clone(), rat: dec("rat")?, sqrtq: dec("sqrtq")? })
    }

    fn check(&self, other: &CoeffValue) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field.same(&other.field),
            "mixing coefficients from different fields"
        );
    }
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Validation(format!("cannot parse rational `{s}`"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl PartialEq for CoeffValue {
    fn eq(&self, other: &Self) -> bool {
        self.field.same(&other.field) && self.rat == other.rat && self.sqrtq == other.sqrtq
    }
}

impl Eq for CoeffValue {}

impl<'a> Add<&'a CoeffValue> for &'a CoeffValue {
    type Output = CoeffValue;
    fn add(self, rhs: &CoeffValue) -> CoeffValue {
        self.check(rhs);
        CoeffValue {
            field: self.field.clone(),
            rat: self.rat.iter().zip(&rhs.rat).map(|(a, b)| a + b).collect(),
            sqrtq: self.sqrtq.iter().zip(&rhs.sqrtq).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CoeffValue> for &'a CoeffValue {
    type Output = CoeffValue;
    fn sub(self, rhs: &CoeffValue) -> CoeffValue {
        self.check(rhs);
        CoeffValue {
            field: self.field.clone(),
            rat: self.rat.iter().zip(&rhs.rat).map(|(a, b)| a - b).collect(),
            sqrtq: self.sqrtq.iter().zip(&rhs.sqrtq).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a CoeffValue> for &'a CoeffValue {
    type Output = CoeffValue;
    fn mul(self, rhs: &CoeffValue) -> CoeffValue {
        self.check(rhs);
        let f = &self.field;
        let a_zero = self.sqrtq.iter().all(Zero::is_zero);
        let b_zero = rhs.sqrtq.iter().all(Zero::is_zero);
        let rat_rat = f.cyc_mul(&self.rat, &rhs.rat);
        if a_zero && b_zero {
            return CoeffValue { field: f.clone(), rat: rat_rat, sqrtq: f.cyc_zero() };
        }
        let q = BigRational::from_integer(f.q().into());
        let mut rat = rat_rat;
        if !a_zero && !b_zero {
            let ss = f.cyc_mul(&self.sqrtq, &rhs.sqrtq);
            for (r, s) in rat.iter_mut().zip(ss) {
                *r += &q * s;
            }
        }
        let mut sq = f.cyc_zero();
        if !b_zero {
            for (r, s) in sq.iter_mut().zip(f.cyc_mul(&self.rat, &rhs.sqrtq)) {
                *r += s;
            }
        }
        if !a_zero {
            for (r, s) in sq.iter_mut().zip(f.cyc_mul(&self.sqrtq, &rhs.rat)) {
                *r += s;
            }
        }
        CoeffValue { field: f.clone(), rat, sqrtq: sq }
    }
}

impl Neg for &CoeffValue {
    type Output = CoeffValue;
    fn neg(self) -> CoeffValue {
        CoeffValue {
            field: self.field.clone(),
            rat: self.rat.iter().map(|a| -a).collect(),
            sqrtq: self.sqrtq.iter().map(|a| -a).collect(),
        }
    }
}

impl Neg for CoeffValue {
    type Output = CoeffValue;
    fn neg(self) -> CoeffValue {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CoeffValue> for CoeffValue {
            type Output = CoeffValue;
            fn $m(self, rhs: CoeffValue) -> CoeffValue {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CoeffValue> for CoeffValue {
            type Output = CoeffValue;
            fn $m(self, rhs: &CoeffValue) -> CoeffValue {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&CoeffValue> for CoeffValue {
    fn add_assign(&mut self, rhs: &CoeffValue) {
        self.check(rhs);
        for (a, b) in self.rat.iter_mut().zip(&rhs.rat) {
            *a += b;
        }
        for (a, b) in self.sqrtq.iter_mut().zip(&rhs.sqrtq) {
            *a += b;
        }
    }
}

fn fmt_cyc(v: &Cyc, m: u32) -> Option<String> {
    let mut parts = Vec::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = rational_string(&c.abs());
        let sign = if c.is_negative() { "-" } else { "+" };
        let body = match i {
            0 => mag,
            _ => {
                let z = if i == 1 { format!("z{m}") } else { format!("z{m}^{i}") };
                if c.abs().is_one() {
                    z
                } else {
                    format!("{mag}*{z}")
                }
            }
        };
        parts.push((sign, body));
    }
    if parts.is_empty() {
        return None;
    }
    let mut s = String::new();
    for (k, (sign, body)) in parts.iter().enumerate() {
        if k == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(body);
    }
    Some(if parts.len() > 1 { format!("({s})") } else { s })
}

impl fmt::Display for CoeffValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.field.order();
        let a = fmt_cyc(&self.rat, m);
        let b = fmt_cyc(&self.sqrtq, m).map(|b| match b.as_str() {
            "1" => "sqrtq".to_string(),
            "-1" => "-sqrtq".to_string(),
            _ => format!("{b}*sqrtq"),
        });
        match (a, b) {
            (None, None) => write!(f, "0"),
            (Some(a), None) => write!(f, "{a}"),
            (None, Some(b)) => write!(f, "{b}"),
            (Some(a), Some(b)) => {
                if let Some(rest) = b.strip_prefix('-') {
                    write!(f, "{a} - {rest}")
                } else {
                    write!(f, "{a} + {b}")
                }
            }
        }
    }
}

impl fmt::Debug for CoeffValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffValue({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrtq_squares_to_q() {
        let f = CoeffField::new(1, 3).unwrap();
        let s = CoeffValue::sqrtq(&f);
        assert_eq!(&s * &s, CoeffValue::from_int(&f, 3));
        assert_eq!(CoeffValue::sqrtq_pow(&f, -3), (&s * &(&s * &s)).inv().unwrap());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let f = CoeffField::new(4, 5).unwrap();
        let i = CoeffValue::zeta(&f, 1);
        assert_eq!(&i * &i, CoeffValue::from_int(&f, -1));
    }

    #[test]
    fn rational_inverse() {
        let f = CoeffField::new(1, 2).unwrap();
        assert_eq!(CoeffValue::from_frac(&f, 1, 2).inv().unwrap(), CoeffValue::from_int(&f, 2));
        assert!(matches!(CoeffValue::zero(&f).inv(), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_inverse() {
        let f = CoeffField::new(3, 3).unwrap();
        let x = &CoeffValue::zeta(&f, 1) + &(&CoeffValue::sqrtq(&f) * &CoeffValue::from_frac(&f, 2, 7));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn zero_divisor_is_reported() {
        // √5 ∈ Q(ζ_5): 1 + 2ζ + 2ζ^4 squares to 5.
        let f = CoeffField::new(5, 5).unwrap();
        let r = &(&CoeffValue::one(&f) + &CoeffValue::zeta(&f, 1).scale_int(2)) + &CoeffValue::zeta(&f, 4).scale_int(2);
        assert_eq!(&r * &r, CoeffValue::from_int(&f, 5));
        let zd = &r - &CoeffValue::sqrtq(&f);
        assert!(matches!(zd.inv(), Err(Error::Domain(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = CoeffField::new(3, 3).unwrap();
        let x = &CoeffValue::zeta(&f, 2) + &CoeffValue::sqrtq_pow(&f, -1);
        let j = x.to_json();
        assert_eq!(j["sqrtq"][0], "1/3");
        assert_eq!(CoeffValue::from_json(&f, &j).unwrap(), x);
    }

    #[test]
    fn display() {
        let f = CoeffField::new(1, 3).unwrap();
        let x = &CoeffValue::from_frac(&f, 1, 2) - &CoeffValue::sqrtq(&f);
        assert_eq!(x.to_string(), "1/2 - sqrtq");
    }
}
