//! Integer matrices modulo `p^L`, stored row-major as `u64` residues.
//!
//! These routines are the hot path of every coset enumeration, so they avoid
//! allocation where they can and fail with [`Error::Precision`] instead of guessing.

use crate::error::{Error, Result};

/// Matrices handled by the enumerators are at most this size.
pub const MAX_N: usize = 4;

/// Largest exponent `e` with `p^e < 2^62`, so that products fit comfortably in `u128`.
pub fn max_precision(p: u64) -> u32 {
    let mut e = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 62) {
        acc *= p as u128;
        e += 1;
    }
    e
}

pub fn pow(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("p-adic modulus overflows u64")
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// Valuation of `x` as a residue mod `p^e`, capped at `e` (so `0` maps to `e`).
#[inline]
pub fn val_capped(mut x: u64, p: u64, e: u32) -> u32 {
    if x == 0 {
        return e;
    }
    let mut v = 0;
    while v < e && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of a unit modulo `m`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// `a · b` for `n×n` matrices mod `m`.
pub fn mat_mul(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    mat_mul_into(a, b, n, m, &mut out);
    out
}

pub fn mat_mul_into(a: &[u64], b: &[u64], n: usize, m: u64, out: &mut [u64]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc += a[i * n + k] as u128 * b[k * n + j] as u128;
            }
            out[i * n + j] = (acc % m as u128) as u64;
        }
    }
}

/// Determinant mod `m` by Laplace expansion (n ≤ 4).
pub fn det_mod(a: &[u64], n: usize, m: u64) -> u64 {
    match n {
        0 => 1 % m,
        1 => a[0] % m,
        2 => submod(mulmod(a[0], a[3], m), mulmod(a[1], a[2], m), m),
        _ => {
            let mut acc = 0u64;
            let mut minor = vec![0u64; (n - 1) * (n - 1)];
            for c in 0..n {
                let mut idx = 0;
                for r in 1..n {
                    for cc in 0..n {
                        if cc != c {
                            minor[idx] = a[r * n + cc];
                            idx += 1;
                        }
                    }
                }
                let term = mulmod(a[c], det_mod(&minor, n - 1, m), m);
                acc = if c % 2 == 0 { addmod(acc, term, m) } else { submod(acc, term, m) };
            }
            acc
        }
    }
}

/// Adjugate mod `m` (so `a · adj(a) = det(a)·1`).
pub fn adjugate_mod(a: &[u64], n: usize, m: u64) -> Vec<u64> {
    if n == 1 {
        return vec![1 % m];
    }
    let mut out = vec![0u64; n * n];
    let mut minor = vec![0u64; (n - 1) * (n - 1)];
    for i in 0..n {
        for j in 0..n {
            let mut idx = 0;
            for r in 0..n {
                if r == i {
                    continue;
                }
                for c in 0..n {
                    if c != j {
                        minor[idx] = a[r * n + c];
                        idx += 1;
                    }
                }
            }
            let d = det_mod(&minor, n - 1, m);
            // adj(a)_{j,i} = (-1)^{i+j} det(minor_{i,j})
            out[j * n + i] = if (i + j) % 2 == 0 { d } else { submod(0, d, m) };
        }
    }
    out
}

/// Inverse of a matrix in `GL_n(Z/m)`.
pub fn inverse_mod(a: &[u64], n: usize, m: u64) -> Option<Vec<u64>> {
    let d = det_mod(a, n, m);
    let dinv = inv_mod(d, m)?;
    Some(adjugate_mod(a, n, m).into_iter().map(|x| mulmod(x, dinv, m)).collect())
}

/// Result of [`iwasawa_mod`]: `y = u · diag(p^a) · k` with `k ∈ GL_n(Z_p)` known mod `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwasawaMod {
    pub a: [u32; MAX_N],
    /// Upper triangular `u·diag(p^a)`, row-major, meaningful mod `p^prec`.
    pub upper: Vec<u64>,
    pub k: Vec<u64>,
    pub prec: u32,
}

/// Iwasawa decomposition of an integral matrix known modulo `p^level`.
///
/// Column operations clear the matrix from the bottom row up; each pivot of valuation
/// `a_i` costs `a_i` digits of precision, so `k` is known mod `p^{level - v(det)}`.
pub fn iwasawa_mod(y: &[u64], n: usize, p: u64, level: u32) -> Result<IwasawaMod> {
    let big = pow(p, level);
    let mut y: Vec<u64> = y.iter().map(|x| x % big).collect();
    let mut k = vec![0u64; n * n];
    for i in 0..n {
        k[i * n + i] = 1 % big;
    }
    let mut a = [0u32; MAX_N];
    let mut w = level;
    for i in (0..n).rev() {
        let pw = pow(p, w);
        let mut best = i;
        let mut best_v = val_capped(y[i * n + i] % pw, p, w);
        for j in 0..i {
            let v = val_capped(y[i * n + j] % pw, p, w);
            if v < best_v {
                best_v = v;
                best = j;
            }
        }
        if best_v >= w {
            return Err(Error::Precision(format!("row {} of the matrix vanishes mod p^{w}; raise the level", i + 1)));
        }
        if best != i {
            for r in 0..n {
                y.swap(r * n + best, r * n + i);
            }
            for c in 0..n {
                k.swap(best * n + c, i * n + c);
            }
        }
        let av = best_v;
        let pa = pow(p, av);
        let rest = w - av;
        let prest = pow(p, rest);
        let unit = (y[i * n + i] % pw) / pa % prest;
        let uinv = inv_mod(unit, prest).expect("pivot unit part is invertible");
        for j in 0..i {
            let yij = y[i * n + j] % pw;
            if yij == 0 {
                continue;
            }
            let t = mulmod(yij / pa % prest, uinv, prest);
            // col_j -= t·col_i
            for r in 0..n {
                y[r * n + j] = submod(y[r * n + j], mulmod(t, y[r * n + i], big), big);
            }
            // row_i(k) += t·row_j(k)
            for c in 0..n {
                k[i * n + c] = addmod(k[i * n + c], mulmod(t, k[j * n + c], big), big);
            }
        }
        // scale col_i by unit^{-1}; row_i(k) *= unit
        for r in 0..n {
            y[r * n + i] = mulmod(y[r * n + i], uinv, big);
        }
        for c in 0..n {
            k[i * n + c] = mulmod(k[i * n + c], unit, big);
        }
        a[i] = av;
        w = rest;
    }
    let pw = pow(p, w);
    for x in k.iter_mut() {
        *x %= pw;
    }
    Ok(IwasawaMod { a, upper: y, k, prec: w })
}

/// Elementary divisors (Smith form exponents, ascending) of an integral matrix known mod `p^level`.
pub fn elementary_divisors(y: &[u64], n: usize, p: u64, level: u32) -> Result<Vec<u32>> {
    let big = pow(p, level);
    let mut y: Vec<u64> = y.iter().map(|x| x % big).collect();
    let mut out = Vec::with_capacity(n);
    let mut w = level;
    for s in 0..n {
        let pw = pow(p, w);
        let mut best: Option<(u32, usize, usize)> = None;
        for r in s..n {
            for c in s..n {
                let v = val_capped(y[r * n + c] % pw, p, w);
                if v < w && best.is_none_or(|b| v < b.0) {
                    best = Some((v, r, c));
                }
            }
        }
        let (v, r, c) =
            best.ok_or_else(|| Error::Precision(format!("matrix is singular mod p^{w}; raise the level")))?;
        for cc in 0..n {
            y.swap(s * n + cc, r * n + cc);
        }
        for rr in 0..n {
            y.swap(rr * n + s, rr * n + c);
        }
        let pv = pow(p, v);
        let rest = w - v;
        let prest = pow(p, rest);
        let uinv = inv_mod((y[s * n + s] % pw) / pv % prest, prest).expect("unit pivot");
        for r2 in s + 1..n {
            let t = mulmod((y[r2 * n + s] % pw) / pv % prest, uinv, prest);
            for cc in 0..n {
                y[r2 * n + cc] = submod(y[r2 * n + cc], mulmod(t, y[s * n + cc], big), big);
            }
        }
        for c2 in s + 1..n {
            let t = mulmod((y[s * n + c2] % pw) / pv % prest, uinv, prest);
            for rr in 0..n {
                y[rr * n + c2] = submod(y[rr * n + c2], mulmod(t, y[rr * n + s], big), big);
            }
        }
        out.push(v);
        w = rest;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_and_determinants() {
        assert_eq!(inv_mod(2, 9), Some(5));
        assert_eq!(inv_mod(3, 9), None);
        let a = [1, 2, 3, 4, 0, 5, 6, 7, 1u64];
        let m = 27;
        let inv = inverse_mod(&a, 3, m).unwrap();
        let id = mat_mul(&a, &inv, 3, m);
        assert_eq!(id, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn iwasawa_reconstructs() {
        let p = 3;
        let level = 8;
        let m = pow(p, level);
        let y = [0u64, 1, 3, 0];
        let res = iwasawa_mod(&y, 2, p, level).unwrap();
        assert_eq!(&res.a[..2], &[0, 1]);
        assert_eq!(res.k, vec![0, 1, 1, 0]);
        let pm = pow(p, res.prec);
        let back = mat_mul(&res.upper, &res.k, 2, m);
        assert!(back.iter().zip(&y).all(|(b, y)| b % pm == y % pm));
    }

    #[test]
    fn smith_exponents() {
        // diag(1, 9) conjugated by unimodular matrices
        let y = [2u64, 9, 1, 9];
        assert_eq!(elementary_divisors(&y, 2, 3, 6).unwrap(), vec![0, 2]);
        assert!(elementary_divisors(&[3, 0, 0, 0], 2, 3, 4).is_err());
    }
}
