//! The finite flag variety `B(O/p^m)\GL_n(O/p^m)` and enumeration of `GL_n(O/p^L)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::modular::{inv_mod, mulmod, pow, submod, MAX_N};
use crate::error::{Error, Result};

/// Canonical representatives of `B(O/p^m)\GL_n(O/p^m)`.
///
/// A representative is reduced from the bottom row up: row `i` has a `1` in its pivot column
/// (the leftmost unit column not claimed by a lower row), zeros in the pivot columns of lower
/// rows, and non-units in the remaining columns left of its pivot.
#[derive(Debug)]
pub struct FlagSpace {
    p: u64,
    n: usize,
    m: u32,
    pm: u64,
    points: Vec<Vec<u64>>,
    index: HashMap<u128, u32>,
}

/// Result of canonicalizing `x = b · rep`: the representative's index and the diagonal of `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagCoord {
    pub index: u32,
    pub diag: [u64; MAX_N],
}

impl FlagSpace {
    pub fn new(p: u64, n: usize, m: u32) -> Result<Arc<Self>> {
        if n == 0 || n > MAX_N {
            return Err(Error::Unsupported(format!("flag varieties for 1 ≤ n ≤ {MAX_N} only")));
        }
        if m == 0 {
            return Err(Error::Level("flag level must be at least 1".into()));
        }
        let pm = pow(p, m);
        if (pm as f64).powi((n * n) as i32) > 2f64.powi(120) {
            return Err(Error::Budget(format!("flag variety of level {m} is too large to index")));
        }
        let mut points = Vec::new();
        let mut cur = vec![0u64; n * n];
        let mut used = [false; MAX_N];
        gen_rows(p, n, m, pm, n, &mut cur, &mut used, &mut points);
        points.sort_by_key(|x| encode(x, pm));
        let index = points.iter().enumerate().map(|(i, x)| (encode(x, pm), i as u32)).collect();
        Ok(Arc::new(FlagSpace { p, n, m, pm, points, index }))
    }

    /// Shared instance from a process-wide cache.
    pub fn cached(p: u64, n: usize, m: u32) -> Result<Arc<Self>> {
        type Key = (u64, usize, u32);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<FlagSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(fs) = cache.lock().expect("flag cache").get(&(p, n, m)) {
            return Ok(fs.clone());
        }
        let fs = Self::new(p, n, m)?;
        cache.lock().expect("flag cache").insert((p, n, m), fs.clone());
        Ok(fs)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.pm
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[u64] {
        &self.points[i]
    }

    pub fn points(&self) -> impl Iterator<Item = &[u64]> {
        self.points.iter().map(Vec::as_slice)
    }

    /// Writes `x` (entries taken mod `p^m`) as `b · rep` with `b ∈ B(O/p^m)`.
    pub fn canonicalize(&self, x: &[u64]) -> Result<FlagCoord> {
        let n = self.n;
        let (p, pm) = (self.p, self.pm);
        let mut r = [0u64; MAX_N * MAX_N];
        for (dst, src) in r.iter_mut().zip(x.iter().take(n * n)) {
            *dst = src % pm;
        }
        let mut piv = [0usize; MAX_N];
        let mut used = [false; MAX_N];
        let mut diag = [1u64; MAX_N];
        for i in (0..n).rev() {
            for k in (i + 1..n).rev() {
                let c = r[i * n + piv[k]];
                if c != 0 {
                    for col in 0..n {
                        r[i * n + col] = submod(r[i * n + col], mulmod(c, r[k * n + col], pm), pm);
                    }
                }
            }
            let j = (0..n)
                .find(|&j| !used[j] && r[i * n + j] % p != 0)
                .ok_or_else(|| Error::Domain("matrix is not invertible mod p".into()))?;
            let s = r[i * n + j];
            let sinv = inv_mod(s, pm).expect("unit pivot");
            for col in 0..n {
                r[i * n + col] = mulmod(r[i * n + col], sinv, pm);
            }
            diag[i] = s;
            piv[i] = j;
            used[j] = true;
        }
        let key = encode(&r[..n * n], pm);
        let index = *self.index.get(&key).expect("canonical form is enumerated");
        Ok(FlagCoord { index, diag })
    }

    /// For every point of `self`, its coordinates in the coarser space `coarse`.
    pub fn reduction_map(&self, coarse: &FlagSpace) -> Result<Vec<FlagCoord>> {
        if coarse.n != self.n || coarse.p != self.p || coarse.m > self.m {
            return Err(Error::Level("reduction needs a coarser flag variety".into()));
        }
        self.points.iter().map(|x| coarse.canonicalize(x)).collect()
    }
}

fn encode(x: &[u64], pm: u64) -> u128 {
    x.iter().fold(0u128, |acc, &v| acc * pm as u128 + v as u128)
}

#[allow(clippy::too_many_arguments)]
fn gen_rows(
    p: u64,
    n: usize,
    m: u32,
    pm: u64,
    row_plus_one: usize,
    cur: &mut Vec<u64>,
    used: &mut [bool; MAX_N],
    out: &mut Vec<Vec<u64>>,
) {
    if row_plus_one == 0 {
        out.push(cur.clone());
        return;
    }
    let i = row_plus_one - 1;
    for j in 0..n {
        if used[j] {
            continue;
        }
        // free columns with their radices and strides
        let free: Vec<(usize, u64, u64)> = (0..n)
            .filter(|&c| !used[c] && c != j)
            .map(|c| if c < j { (c, pow(p, m - 1), p) } else { (c, pm, 1) })
            .collect();
        for c in 0..n {
            cur[i * n + c] = 0;
        }
        cur[i * n + j] = 1;
        used[j] = true;
        let mut digits = vec![0u64; free.len()];
        loop {
            for (d, &(c, _, stride)) in digits.iter().zip(&free) {
                cur[i * n + c] = d * stride;
            }
            gen_rows(p, n, m, pm, i, cur, used, out);
            let mut idx = free.len();
            let mut carried = true;
            while idx > 0 {
                idx -= 1;
                digits[idx] += 1;
                if digits[idx] < free[idx].1 {
                    carried = false;
                    break;
                }
                digits[idx] = 0;
            }
            if carried {
                break;
            }
        }
        used[j] = false;
    }
    for c in 0..n {
        cur[i * n + c] = 0;
    }
}

/// Calls `f` on every element of `GL_n(Z/p^level)` in lexicographic order of the mod-`p`
/// reduction, then of the higher digits.
pub fn for_each_gl(p: u64, n: usize, level: u32, mut f: impl FnMut(&[u64])) {
    let nn = n * n;
    let big = pow(p, level);
    let base: Vec<Vec<u64>> = all_matrices(p, nn).filter(|x| det_unit(x, n, p)).collect();
    let lifts = pow(p, level - 1);
    let mut x = vec![0u64; nn];
    for g0 in &base {
        let mut digits = vec![0u64; nn];
        loop {
            for i in 0..nn {
                x[i] = (g0[i] + p * digits[i]) % big;
            }
            f(&x);
            let mut idx = nn;
            let mut done = true;
            while idx > 0 {
                idx -= 1;
                digits[idx] += 1;
                if digits[idx] < lifts {
                    done = false;
                    break;
                }
                digits[idx] = 0;
            }
            if done {
                break;
            }
        }
    }
}

fn det_unit(x: &[u64], n: usize, p: u64) -> bool {
    super::modular::det_mod(x, n, p) != 0
}

fn all_matrices(p: u64, nn: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = pow(p, nn as u32);
    (0..total).map(move |mut code| {
        let mut x = vec![0u64; nn];
        for i in (0..nn).rev() {
            x[i] = code % p;
            code /= p;
        }
        x
    })
}

/// `K_0(p^m)` reduced mod `p^level`: last row `≡ (0,…,0,*) mod p^m`.
pub fn in_k0(x: &[u64], n: usize, p: u64, m: u32) -> bool {
    let pm = pow(p, m);
    (0..n - 1).all(|j| x[(n - 1) * n + j] % pm == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts() {
        assert_eq!(FlagSpace::new(2, 2, 1).unwrap().len(), 3);
        assert_eq!(FlagSpace::new(2, 2, 2).unwrap().len(), 6);
        assert_eq!(FlagSpace::new(5, 1, 3).unwrap().len(), 1);
        assert_eq!(FlagSpace::new(2, 3, 1).unwrap().len(), 21);
        assert_eq!(FlagSpace::new(3, 2, 2).unwrap().len(), 12);
    }

    #[test]
    fn points_are_canonical() {
        let fs = FlagSpace::new(3, 3, 2).unwrap();
        for (i, x) in fs.points().enumerate() {
            let c = fs.canonicalize(x).unwrap();
            assert_eq!(c.index as usize, i);
            assert_eq!(&c.diag[..3], &[1, 1, 1]);
        }
    }

    #[test]
    fn gl_enumeration_size() {
        let mut count = 0;
        for_each_gl(3, 2, 2, |_| count += 1);
        assert_eq!(count, 3888);
    }
}
