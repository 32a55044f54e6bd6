//! Haar volumes of congruence subgroups and the modulus character.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::matrix::PadicMatrix;
use super::modular::{inv_mod, mulmod, pow};
use crate::error::Result;
use crate::exactnum::{CoeffField, CoeffValue};

/// `|GL_n(Z/p^m)| = p^{n²(m-1)} ∏_{i<n} (p^n - p^i)`.
pub fn gl_order(p: u64, n: usize, m: u32) -> BigInt {
    let p = BigInt::from(p);
    let pn = p.pow(n as u32);
    let mut acc = p.pow((n * n) as u32 * (m - 1));
    for i in 0..n {
        acc *= &pn - p.pow(i as u32);
    }
    acc
}

/// `|B(Z/p^m)|` for the upper triangular Borel subgroup.
pub fn borel_order(p: u64, n: usize, m: u32) -> BigInt {
    let pb = BigInt::from(p);
    let units = pb.pow(m) - pb.pow(m - 1);
    units.pow(n as u32) * pb.pow(m * (n * (n - 1) / 2) as u32)
}

/// `κ_n = ∏_{i=1}^{n} (1 - p^{-i})`, the additive volume of `GL_n(O)` inside `Mat_n(O)`.
pub fn kappa(p: u64, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 1..=n {
        let pi = BigInt::from(p).pow(i as u32);
        acc *= BigRational::new(&pi - 1, pi);
    }
    acc
}

pub fn vol_k() -> BigRational {
    BigRational::one()
}

/// `vol(K(p^N)) = 1/|GL_n(O/p^N)|`.
pub fn vol_principal(p: u64, n: usize, level: u32) -> BigRational {
    BigRational::new(BigInt::one(), gl_order(p, n, level))
}

/// `[K : K_0(p^m)]`, counted as the `K`-orbit of the line through `e_n` in `P^{n-1}(O/p^m)`.
pub fn k0_index(p: u64, n: usize, m: u32) -> u64 {
    if m == 0 || n == 1 {
        return 1;
    }
    let pm = pow(p, m);
    let normalize = |x: &[u64]| -> Vec<u64> {
        let j = x.iter().position(|v| v % p != 0).expect("primitive row");
        let inv = inv_mod(x[j], pm).expect("unit");
        x.iter().map(|v| mulmod(*v, inv, pm)).collect()
    };
    let units: Vec<u64> = (1..pm).filter(|u| u % p != 0).collect();
    let mut start = vec![0u64; n];
    start[n - 1] = 1;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        let mut images = Vec::new();
        // right action of transvections 1 + e_{ij}: column j += column i
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut y = x.clone();
                    y[j] = (y[j] + y[i]) % pm;
                    images.push(y);
                }
            }
        }
        for &u in &units {
            let mut y = x.clone();
            y[0] = mulmod(y[0], u, pm);
            images.push(y);
        }
        for y in images {
            let y = normalize(&y);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64
}

/// `vol(K_0(p^m))` with `vol(K) = 1`.
pub fn vol_k0(p: u64, n: usize, m: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(k0_index(p, n, m)))
}

/// The exponent `e` with `δ_n(ϖ^a) = q^{-e}`, i.e. `e = Σ_i a_i (n - 2i + 1)` (1-indexed).
pub fn modulus_exponent(a: &[i32]) -> i64 {
    let n = a.len() as i64;
    a.iter().enumerate().map(|(i, &ai)| ai as i64 * (n - 2 * (i as i64 + 1) + 1)).sum()
}

/// `δ_n(ϖ^a)`.
pub fn modulus(field: &Arc<CoeffField>, a: &[i32]) -> CoeffValue {
    CoeffValue::q_pow(field, -modulus_exponent(a))
}

/// `δ_n^{1/2}(ϖ^a)`, using the formal square root of `q`.
pub fn modulus_sqrt(field: &Arc<CoeffField>, a: &[i32]) -> CoeffValue {
    CoeffValue::sqrtq_pow(field, -modulus_exponent(a))
}

/// `|det g|`.
pub fn abs_det(field: &Arc<CoeffField>, g: &PadicMatrix) -> Result<CoeffValue> {
    Ok(CoeffValue::q_pow(field, -(g.det_valuation()? as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(gl_order(2, 2, 1), BigInt::from(6));
        assert_eq!(gl_order(3, 2, 2), BigInt::from(3888));
        assert_eq!(borel_order(2, 2, 1), BigInt::from(2));
    }

    #[test]
    fn k0_indices() {
        assert_eq!(k0_index(3, 2, 1), 4);
        assert_eq!(k0_index(2, 2, 2), 6);
        // |P^2(Z/p^m)| = p^{2(m-1)} (p^3-1)/(p-1)
        assert_eq!(k0_index(2, 3, 2), 4 * 7);
        assert_eq!(k0_index(3, 3, 1), 13);
    }

    #[test]
    fn modulus_exponents() {
        assert_eq!(modulus_exponent(&[1, 0]), 1);
        assert_eq!(modulus_exponent(&[0, 0, 0]), 0);
        assert_eq!(modulus_exponent(&[1, 0, -1]), 4);
    }

    #[test]
    fn principal_volume_gl1() {
        assert_eq!(vol_principal(5, 1, 1), BigRational::new(1.into(), 4.into()));
    }
}
