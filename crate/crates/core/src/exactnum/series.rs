use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use super::coeff::CoeffValue;
use super::cyclotomic::CoeffField;
use super::satake::SatakeRat;
use crate::error::{Error, Result};

/// A power series in `X = q^{-s}` modulo `X^T`, with [`SatakeRat`] coefficients `c_0..c_{T-1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<SatakeRat>,
}

impl TruncSeries {
    pub fn zero(field: &Arc<CoeffField>, t: usize) -> Self {
        assert!(t >= 1, "truncation order must be positive");
        TruncSeries { coeffs: vec![SatakeRat::zero(field); t] }
    }

    pub fn one(field: &Arc<CoeffField>, t: usize) -> Self {
        let mut s = Self::zero(field, t);
        s.coeffs[0] = SatakeRat::one(field);
        s
    }

    /// Builds a series from its first coefficients, padding with zeros to `t` terms.
    pub fn from_coeffs(field: &Arc<CoeffField>, mut coeffs: Vec<SatakeRat>, t: usize) -> Self {
        assert!(t >= 1, "truncation order must be positive");
        coeffs.truncate(t);
        coeffs.resize(t, SatakeRat::zero(field));
        TruncSeries { coeffs }
    }

    /// `1 - a·X`.
    pub fn one_minus(a: &SatakeRat, t: usize) -> Self {
        let mut s = Self::one(a.field(), t);
        if t >= 2 {
            s.coeffs[1] = -a;
        }
        s
    }

    /// `(1 - a·X)^{-1}` expanded as a geometric series.
    pub fn geometric(a: &SatakeRat, t: usize) -> Self {
        assert!(t >= 1, "truncation order must be positive");
        let mut coeffs = Vec::with_capacity(t);
        let mut cur = SatakeRat::one(a.field());
        for _ in 0..t {
            coeffs.push(cur.clone());
            cur = &cur * a;
        }
        TruncSeries { coeffs }
    }

    /// The truncation order `T`: coefficients of `X^0..X^{T-1}` are kept.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        self.coeffs[0].field()
    }

    pub fn coeff(&self, k: usize) -> &SatakeRat {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[SatakeRat] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, v: SatakeRat) {
        self.coeffs[k] = v;
    }

    pub fn truncate(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.truncation() {
            return Err(Error::TruncationMismatch { left: self.truncation(), right: t });
        }
        Ok(TruncSeries { coeffs: self.coeffs[..t].to_vec() })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch { left: self.truncation(), right: other.truncation() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(TruncSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let t = self.truncation();
        let mut coeffs = vec![SatakeRat::zero(self.field()); t];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..t - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(TruncSeries { coeffs })
    }

    pub fn scale(&self, c: &CoeffValue) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inv(&self) -> Result<Self> {
        let a0inv = self.coeffs[0].inv()?;
        let t = self.truncation();
        let mut out: Vec<SatakeRat> = Vec::with_capacity(t);
        out.push(a0inv.clone());
        for k in 1..t {
            let mut acc = SatakeRat::zero(self.field());
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(-&(&acc * &a0inv));
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// Indices where the two series differ.
    pub fn diff_indices(&self, other: &Self) -> Result<Vec<usize>> {
        self.check(other)?;
        Ok((0..self.coeffs.len()).filter(|&k| self.coeffs[k] != other.coeffs[k]).collect())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(SatakeRat::to_json).collect())
    }

    pub fn from_json(field: &Arc<CoeffField>, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Validation("series must be an array".into()))?;
        if arr.is_empty() {
            return Err(Error::Validation("series needs at least one coefficient".into()));
        }
        let coeffs = arr.iter().map(|c| SatakeRat::from_json(field, c)).collect::<Result<_>>()?;
        Ok(TruncSeries { coeffs })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*X")?,
                _ => write!(f, "({c})*X^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(X^{})", self.truncation())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::VarId;

    #[test]
    fn geometric_inverts_linear() {
        let f = CoeffField::new(1, 5).unwrap();
        let a = SatakeRat::var(&f, VarId::alpha(0));
        let g = TruncSeries::geometric(&a, 6);
        let l = TruncSeries::one_minus(&a, 6);
        assert_eq!(g.mul(&l).unwrap(), TruncSeries::one(&f, 6));
        assert_eq!(l.inv().unwrap(), g);
    }

    #[test]
    fn mismatched_truncation_is_an_error() {
        let f = CoeffField::new(1, 5).unwrap();
        let a = TruncSeries::one(&f, 3);
        let b = TruncSeries::one(&f, 4);
        assert_eq!(a.mul(&b), Err(Error::TruncationMismatch { left: 3, right: 4 }));
        assert!(a.add(&b.truncate(3).unwrap()).is_ok());
    }

    #[test]
    fn small_expansions() {
        let f = CoeffField::new(1, 2).unwrap();
        let a = SatakeRat::var(&f, VarId::alpha(0));
        let b = SatakeRat::var(&f, VarId::alpha(1));
        let inv = TruncSeries::one_minus(&a, 4).inv().unwrap();
        assert_eq!(inv.truncation(), 4);
        assert_eq!(inv.coeff(3), &(&(&a * &a) * &a));
        let prod = TruncSeries::one_minus(&a, 3).mul(&TruncSeries::one_minus(&b, 3)).unwrap();
        assert_eq!(prod.coeff(1), &-&(&a + &b));
        assert_eq!(prod.coeff(2), &(&a * &b));
        let one = SatakeRat::one(&f);
        let s = TruncSeries::from_coeffs(&f, vec![one.clone(); 4], 4);
        assert_eq!(s.truncate(2).unwrap(), TruncSeries::from_coeffs(&f, vec![one.clone(), one], 2));
    }
}
