use std::fmt;

use super::modular::{inv_mod, max_precision, mulmod, pow, val_capped};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Kind {
    /// Exactly zero.
    Zero,
    /// `p^val · unit`, with `unit` a unit known mod `p^prec`.
    Unit { val: i32, unit: u64, prec: u32 },
    /// Known only to lie in `p^abs · Z_p`.
    Small { abs: i32 },
}

/// An element of `Q_p` at finite relative precision.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u64,
    kind: Kind,
}

impl PadicScalar {
    pub fn zero(p: u64) -> Self {
        PadicScalar { p, kind: Kind::Zero }
    }

    /// `p^val · unit`; `unit` must be prime to `p`.
    pub fn from_parts(p: u64, val: i32, unit: u64, prec: u32) -> Result<Self> {
        let prec = prec.min(max_precision(p));
        if prec == 0 {
            return Err(Error::Validation("relative precision must be positive".into()));
        }
        let pm = pow(p, prec);
        let unit = unit % pm;
        if unit % p == 0 {
            return Err(Error::Validation(format!("{unit} is not a unit mod {p}")));
        }
        Ok(PadicScalar { p, kind: Kind::Unit { val, unit, prec } })
    }

    pub fn unknown(p: u64, abs: i32) -> Self {
        PadicScalar { p, kind: Kind::Small { abs } }
    }

    pub fn from_int(p: u64, x: i64, prec: u32) -> Self {
        Self::from_ratio(p, x, 1, prec).expect("integer input")
    }

    /// The rational `num/den` with relative precision `prec`.
    pub fn from_ratio(p: u64, num: i64, den: i64, prec: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        if num == 0 {
            return Ok(Self::zero(p));
        }
        let (mut n, mut d) = (num.unsigned_abs(), den.unsigned_abs());
        let mut val = 0i32;
        while n % p == 0 {
            n /= p;
            val += 1;
        }
        while d % p == 0 {
            d /= p;
            val -= 1;
        }
        let prec = prec.min(max_precision(p)).max(1);
        let pm = pow(p, prec);
        let mut u = mulmod(n % pm, inv_mod(d % pm, pm).expect("coprime denominator"), pm);
        if (num < 0) != (den < 0) {
            u = (pm - u) % pm;
        }
        Self::from_parts(p, val, u, prec)
    }

    /// `ϖ^e` (here `ϖ = p`).
    pub fn uniformizer_pow(p: u64, e: i32, prec: u32) -> Self {
        Self::from_parts(p, e, 1, prec).expect("1 is a unit")
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// Valuation; `None` for exact zero, an error when the value is only known to be small.
    pub fn valuation(&self) -> Result<Option<i32>> {
        match self.kind {
            Kind::Zero => Ok(None),
            Kind::Unit { val, .. } => Ok(Some(val)),
            Kind::Small { abs } => Err(Error::Precision(format!("valuation unresolved beyond O(p^{abs})"))),
        }
    }

    /// A lower bound for the valuation (`i64::MAX` for zero).
    pub fn valuation_lower_bound(&self) -> i64 {
        match self.kind {
            Kind::Zero => i64::MAX,
            Kind::Unit { val, .. } => val as i64,
            Kind::Small { abs } => abs as i64,
        }
    }

    /// Absolute precision: the value is known modulo `p^abs` (`None` for exact zero).
    pub fn absolute_precision(&self) -> Option<i32> {
        match self.kind {
            Kind::Zero => None,
            Kind::Unit { val, prec, .. } => Some(val + prec as i32),
            Kind::Small { abs } => Some(abs),
        }
    }

    pub fn relative_precision(&self) -> Option<u32> {
        match self.kind {
            Kind::Unit { prec, .. } => Some(prec),
            _ => None,
        }
    }

    /// Unit part mod `p^k`.
    pub fn unit_mod(&self, k: u32) -> Result<u64> {
        match self.kind {
            Kind::Unit { unit, prec, .. } if prec >= k => Ok(unit % pow(self.p, k)),
            Kind::Unit { prec, .. } => Err(Error::Precision(format!("unit part known mod p^{prec}, needed mod p^{k}"))),
            _ => Err(Error::Precision("unit part of a non-unit-resolved value".into())),
        }
    }

    /// `p^{-shift}·x` reduced to a residue mod `p^level`; errors unless that is an integral,
    /// fully known residue.
    pub fn residue(&self, shift: i32, level: u32) -> Result<u64> {
        let pl = pow(self.p, level);
        match self.kind {
            Kind::Zero => Ok(0),
            Kind::Small { abs } => {
                if abs - shift >= level as i32 {
                    Ok(0)
                } else {
                    Err(Error::Precision(format!("entry only known to O(p^{abs})")))
                }
            }
            Kind::Unit { val, unit, prec } => {
                let v = val - shift;
                if v < 0 {
                    return Err(Error::Domain("entry is not integral after scaling".into()));
                }
                if v >= level as i32 {
                    return Ok(0);
                }
                let known = v + prec as i32;
                if known < level as i32 {
                    return Err(Error::Precision(format!("entry known mod p^{known}, needed mod p^{level}")));
                }
                Ok(mulmod(pow(self.p, v as u32), unit, pl))
            }
        }
    }

    /// Builds `p^shift · r` from a residue `r` mod `p^level`, recording precision `level + shift`.
    pub fn from_residue(p: u64, r: u64, shift: i32, level: u32) -> Self {
        let pl = pow(p, level);
        let r = r % pl;
        if r == 0 {
            return Self::unknown(p, shift + level as i32);
        }
        let v = val_capped(r, p, level);
        let unit = r / pow(p, v);
        PadicScalar { p, kind: Kind::Unit { val: shift + v as i32, unit, prec: level - v } }
    }

    pub fn neg(&self) -> Self {
        match self.kind {
            Kind::Unit { val, unit, prec } => {
                let pm = pow(self.p, prec);
                PadicScalar { p: self.p, kind: Kind::Unit { val, unit: (pm - unit) % pm, prec } }
            }
            _ => *self,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        match (self.kind, other.kind) {
            (Kind::Zero, _) => *other,
            (_, Kind::Zero) => *self,
            (Kind::Small { abs: a }, Kind::Small { abs: b }) => Self::unknown(p, a.min(b)),
            (Kind::Small { abs }, Kind::Unit { val, unit, prec })
            | (Kind::Unit { val, unit, prec }, Kind::Small { abs }) => {
                let limit = abs.min(val + prec as i32);
                if val < limit {
                    let prec = (limit - val) as u32;
                    PadicScalar { p, kind: Kind::Unit { val, unit: unit % pow(p, prec), prec } }
                } else {
                    Self::unknown(p, limit)
                }
            }
            (Kind::Unit { val: v1, unit: u1, prec: n1 }, Kind::Unit { val: v2, unit: u2, prec: n2 }) => {
                let limit = (v1 + n1 as i32).min(v2 + n2 as i32);
                let vmin = v1.min(v2);
                if limit <= vmin {
                    return Self::unknown(p, limit);
                }
                let span = (limit - vmin) as u32;
                let m = pow(p, span);
                let t1 = if v1 - vmin >= span as i32 { 0 } else { mulmod(pow(p, (v1 - vmin) as u32), u1, m) };
                let t2 = if v2 - vmin >= span as i32 { 0 } else { mulmod(pow(p, (v2 - vmin) as u32), u2, m) };
                let s = ((t1 as u128 + t2 as u128) % m as u128) as u64;
                Self::from_residue(p, s, vmin, span)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let p = self.p;
        match (self.kind, other.kind) {
            (Kind::Zero, _) | (_, Kind::Zero) => Self::zero(p),
            (Kind::Small { abs: a }, Kind::Small { abs: b }) => Self::unknown(p, a + b),
            (Kind::Small { abs }, Kind::Unit { val, .. }) | (Kind::Unit { val, .. }, Kind::Small { abs }) => {
                Self::unknown(p, abs + val)
            }
            (Kind::Unit { val: v1, unit: u1, prec: n1 }, Kind::Unit { val: v2, unit: u2, prec: n2 }) => {
                let prec = n1.min(n2);
                let m = pow(p, prec);
                PadicScalar { p, kind: Kind::Unit { val: v1 + v2, unit: mulmod(u1 % m, u2 % m, m), prec } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self.kind {
            Kind::Zero => Err(Error::Domain("inverse of zero".into())),
            Kind::Small { abs } => Err(Error::Precision(format!("cannot invert a value only known to be O(p^{abs})"))),
            Kind::Unit { val, unit, prec } => {
                let m = pow(self.p, prec);
                Ok(PadicScalar {
                    p: self.p,
                    kind: Kind::Unit { val: -val, unit: inv_mod(unit, m).expect("unit"), prec },
                })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Equality up to the precision both sides carry.
    pub fn congruent(&self, other: &Self) -> bool {
        let d = self.sub(other);
        match d.kind {
            Kind::Zero | Kind::Small { .. } => true,
            Kind::Unit { .. } => false,
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Zero => write!(f, "0"),
            Kind::Small { abs } => write!(f, "O(p^{abs})"),
            Kind::Unit { val, unit, prec } => {
                // balanced representative of the unit part
                let pm = pow(self.p, prec);
                let u = if unit > pm / 2 { -((pm - unit) as i128) } else { unit as i128 };
                let scaled = (val >= 0)
                    .then(|| u.checked_mul((self.p as i128).checked_pow(val as u32)?))
                    .flatten()
                    .filter(|x| x.unsigned_abs() < 1 << 53);
                match scaled {
                    Some(x) => write!(f, "{x}"),
                    None => write!(f, "{u}*p^{val}"),
                }
            }
        }
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Unit { val, unit, prec } => write!(f, "p^{val}*{unit} mod p^{prec}"),
            _ => write!(f, "{self}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_round_trip() {
        let x = PadicScalar::from_ratio(3, 5, 9, 10).unwrap();
        assert_eq!(x.valuation().unwrap(), Some(-2));
        let y = x.mul(&PadicScalar::from_int(3, 9, 10));
        assert!(y.congruent(&PadicScalar::from_int(3, 5, 10)));
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = PadicScalar::from_int(3, 1, 4);
        let b = PadicScalar::from_int(3, 1 + 81 * 2, 6);
        let d = b.sub(&a);
        // 162 = 2·81 but a is only known mod 3^4
        assert!(d.valuation().is_err());
        assert_eq!(d.absolute_precision(), Some(4));
        let c = PadicScalar::from_int(3, 10, 5).sub(&PadicScalar::from_int(3, 1, 5));
        assert_eq!(c.valuation().unwrap(), Some(2));
        assert_eq!(c.relative_precision(), Some(3));
    }

    #[test]
    fn negative_and_inverse() {
        let x = PadicScalar::from_int(5, -7, 6);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).congruent(&PadicScalar::from_int(5, 1, 6)));
        assert!(PadicScalar::zero(5).inv().is_err());
    }
}
