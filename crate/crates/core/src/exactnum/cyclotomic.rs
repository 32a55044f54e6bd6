//! Arithmetic in `Q(ζ_M)` on the power basis `1, ζ, …, ζ^{φ(M)-1}`.
//!
//! Elements are plain coefficient vectors; the [`CoeffField`] owns the reduction data.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) type Cyc = Vec<BigRational>;

/// The coefficient field `Q(ζ_M)(√q)` shared by every [`CoeffValue`](super::CoeffValue) of a session.
#[derive(Debug)]
pub struct CoeffField {
    m: u32,
    q: u64,
    deg: usize,
    /// Φ_M, low degree first, monic.
    phi: Vec<BigInt>,
    /// `x^(deg + i) mod Φ_M` for `i < deg - 1`.
    high_powers: Vec<Vec<BigInt>>,
    sqrtq_upper: BigRational,
}

impl CoeffField {
    pub fn new(m: u32, q: u64) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::Validation("cyclotomic order must be positive".into()));
        }
        if q < 2 {
            return Err(Error::Validation(format!("residue field size {q} is not a prime power")));
        }
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        let mut high_powers = Vec::new();
        // x^deg = -(phi_0 + ... + phi_{deg-1} x^{deg-1})
        let mut cur: Vec<BigInt> = phi[..deg].iter().map(|c| -c).collect();
        for _ in 0..deg.saturating_sub(1) {
            high_powers.push(cur.clone());
            // multiply by x and reduce
            let top = cur[deg - 1].clone();
            let mut next = vec![BigInt::zero(); deg];
            for i in (1..deg).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..deg {
                next[i] -= &top * &phi[i];
            }
            cur = next;
        }
        Ok(Arc::new(CoeffField { m, q, deg, phi, high_powers, sqrtq_upper: sqrt_upper_bound(q) }))
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    /// A rational number `≥ √q`, used for certified absolute-value bounds.
    pub fn sqrtq_upper(&self) -> &BigRational {
        &self.sqrtq_upper
    }

    pub(crate) fn same(&self, other: &CoeffField) -> bool {
        self.m == other.m && self.q == other.q
    }

    pub(crate) fn cyc_zero(&self) -> Cyc {
        vec![BigRational::zero(); self.deg]
    }

    pub(crate) fn cyc_from_rational(&self, r: BigRational) -> Cyc {
        let mut v = self.cyc_zero();
        v[0] = r;
        v
    }

    /// `ζ_M^k` reduced to the power basis.
    pub(crate) fn cyc_zeta(&self, k: i64) -> Cyc {
        let e = k.rem_euclid(self.m as i64) as usize;
        let mut full = vec![BigRational::zero(); e.max(self.deg) + 1];
        full[e] = BigRational::one();
        self.reduce(full)
    }

    fn reduce(&self, mut full: Vec<BigRational>) -> Cyc {
        let deg = self.deg;
        if full.len() <= deg {
            full.resize(deg, BigRational::zero());
            return full;
        }
        // Powers beyond 2*deg-2 only occur for raw ζ^k inputs; fold them down first.
        while full.len() > 2 * deg - 1 {
            let top_idx = full.len() - 1;
            let top = full.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = top_idx - deg;
            for i in 0..deg {
                full[shift + i] -= &top * BigRational::from_integer(self.phi[i].clone());
            }
        }
        let mut out: Cyc = full[..deg].to_vec();
        for (i, c) in full.iter().enumerate().skip(deg) {
            if c.is_zero() {
                continue;
            }
            for (j, h) in self.high_powers[i - deg].iter().enumerate() {
                if !h.is_zero() {
                    out[j] += c * BigRational::from_integer(h.clone());
                }
            }
        }
        out
    }

    pub(crate) fn cyc_mul(&self, a: &Cyc, b: &Cyc) -> Cyc {
        if self.deg == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut full = vec![BigRational::zero(); 2 * self.deg - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    full[i + j] += x * y;
                }
            }
        }
        self.reduce(full)
    }

    pub(crate) fn cyc_scale(&self, a: &Cyc, s: &BigRational) -> Cyc {
        a.iter().map(|x| x * s).collect()
    }

    pub(crate) fn cyc_inv(&self, a: &Cyc) -> Result<Cyc> {
        if a.iter().all(Zero::is_zero) {
            return Err(Error::Domain("inverse of zero".into()));
        }
        if self.deg == 1 {
            return Ok(vec![a[0].recip()]);
        }
        let phi: Vec<BigRational> = self.phi.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        // a is nonzero of degree < deg and Φ_M is irreducible, so gcd(a, Φ_M) = 1.
        let (g, s) = ext_gcd_left(trim(a.clone()), trim(phi));
        debug_assert_eq!(g.len(), 1);
        let g0 = g[0].recip();
        let mut out: Cyc = s.into_iter().map(|c| c * &g0).collect();
        out.resize(self.deg.max(out.len()), BigRational::zero());
        Ok(self.reduce(out))
    }
}

fn sqrt_upper_bound(q: u64) -> BigRational {
    // ceil(sqrt(q) * 10^6) / 10^6
    let scale: u128 = 1_000_000;
    let target = (q as u128) * scale * scale;
    let mut r = (target as f64).sqrt() as u128;
    while r * r < target {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= target {
        r -= 1;
    }
    BigRational::new(BigInt::from(r), BigInt::from(scale))
}

/// Φ_M with integer coefficients, low degree first.
pub(crate) fn cyclotomic_poly(m: u32) -> Vec<BigInt> {
    // x^m - 1
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            num = int_poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let lead = &den[dl - 1];
    let mut quo = vec![BigInt::zero(); rem.len() - dl + 1];
    for i in (0..quo.len()).rev() {
        let c = &rem[i + dl - 1] / lead;
        for j in 0..dl {
            rem[i + j] -= &c * &den[j];
        }
        quo[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quo
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let bl = b.len();
    if rem.len() < bl {
        return (vec![BigRational::zero()], trim(rem));
    }
    let lead_inv = b[bl - 1].recip();
    let mut quo = vec![BigRational::zero(); rem.len() - bl + 1];
    for i in (0..quo.len()).rev() {
        let c = &rem[i + bl - 1] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for j in 0..bl {
            rem[i + j] -= &c * &b[j];
        }
        quo[i] = c;
    }
    (trim(quo), trim(rem))
}

fn is_zero_poly(p: &[BigRational]) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Returns `(g, s)` with `s·a ≡ g (mod b)`, `g = gcd(a, b)`.
fn ext_gcd_left(a: Vec<BigRational>, b: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while !is_zero_poly(&r1) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

pub(crate) fn cyc_abs_sum(a: &Cyc) -> BigRational {
    a.iter().fold(BigRational::zero(), |acc, c| acc + c.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn zeta_power_wraps() {
        let f = CoeffField::new(5, 5).unwrap();
        let z5 = f.cyc_zeta(5);
        assert_eq!(z5, f.cyc_from_rational(BigRational::one()));
        let z4 = f.cyc_zeta(4);
        // ζ^4 = -1 - ζ - ζ^2 - ζ^3
        assert!(z4.iter().all(|c| *c == -BigRational::one()));
        assert_eq!(f.cyc_zeta(-1), z4);
    }

    #[test]
    fn inverse_in_q_zeta9() {
        let f = CoeffField::new(9, 3).unwrap();
        let mut a = f.cyc_zero();
        a[0] = BigRational::from_integer(2.into());
        a[1] = BigRational::from_integer(1.into());
        a[4] = BigRational::new(1.into(), 3.into());
        let inv = f.cyc_inv(&a).unwrap();
        assert_eq!(f.cyc_mul(&a, &inv), f.cyc_from_rational(BigRational::one()));
    }

    #[test]
    fn sqrt_bound_is_upper() {
        for q in [2u64, 3, 5, 7, 49] {
            let b = sqrt_upper_bound(q);
            assert!(&b * &b >= BigRational::from_integer(q.into()));
            let eps = BigRational::new(3.into(), 1_000_000.into());
            let lower = &b - eps;
            assert!(&lower * &lower < BigRational::from_integer(q.into()));
        }
    }
}
