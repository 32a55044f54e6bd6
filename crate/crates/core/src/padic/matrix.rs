use std::fmt;

use super::modular::{self, max_precision, MAX_N};
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

/// A rectangular matrix over `Q_p` with per-entry precision.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<PadicScalar>,
}

/// `g = u · diag(ϖ^{a_1},…,ϖ^{a_n}) · k` with `u` unipotent upper triangular and `k ∈ GL_n(O)`.
#[derive(Clone, Debug)]
pub struct Iwasawa {
    pub u: PadicMatrix,
    pub a: Vec<i32>,
    pub k: PadicMatrix,
    /// `k` is known modulo `p^k_precision`.
    pub k_precision: u32,
}

impl PadicMatrix {
    pub fn new(p: u64, rows: usize, cols: usize, entries: Vec<PadicScalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Validation(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(PadicMatrix { p, rows, cols, entries })
    }

    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        PadicMatrix { p, rows, cols, entries: vec![PadicScalar::zero(p); rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = PadicScalar::from_int(p, 1, max_precision(p));
        }
        m
    }

    /// Integer entries, taken at the maximal precision.
    pub fn from_ints(p: u64, rows: usize, cols: usize, vals: &[i64]) -> Result<Self> {
        let prec = max_precision(p);
        let entries = vals.iter().map(|&v| PadicScalar::from_int(p, v, prec)).collect();
        Self::new(p, rows, cols, entries)
    }

    /// A square matrix of residues mod `p^level`.
    pub fn from_residues(p: u64, n: usize, vals: &[u64], level: u32) -> Self {
        let entries = vals.iter().map(|&v| PadicScalar::from_residue(p, v, 0, level)).collect();
        PadicMatrix { p, rows: n, cols: n, entries }
    }

    pub fn diag_pows(p: u64, a: &[i32]) -> Self {
        let n = a.len();
        let mut m = Self::zeros(p, n, n);
        for (i, &e) in a.iter().enumerate() {
            m.entries[i * n + i] = PadicScalar::uniformizer_pow(p, e, max_precision(p));
        }
        m
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.entries
    }

    pub fn mul(&self, other: &PadicMatrix) -> Result<PadicMatrix> {
        if self.cols != other.rows {
            return Err(Error::Validation("matrix shapes do not compose".into()));
        }
        let mut out = Self::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = PadicScalar::zero(self.p);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &PadicScalar) -> PadicMatrix {
        PadicMatrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.mul(s)).collect(),
        }
    }

    pub fn transpose(&self) -> PadicMatrix {
        let mut out = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, *self.get(i, j));
            }
        }
        out
    }

    /// Sub-matrix of the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> PadicMatrix {
        let mut entries = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            entries.extend_from_slice(&self.entries[r * self.cols..(r + 1) * self.cols]);
        }
        PadicMatrix { p: self.p, rows: rows.len(), cols: self.cols, entries }
    }

    /// Minimal entry valuation; errors when an unresolved entry could be smaller.
    pub fn min_valuation(&self) -> Result<i32> {
        let mut best: Option<i32> = None;
        for e in &self.entries {
            if let Ok(Some(v)) = e.valuation() {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        let best = best.ok_or_else(|| Error::Precision("matrix has no resolved nonzero entry".into()))?;
        for e in &self.entries {
            if e.valuation().is_err() && e.valuation_lower_bound() < best as i64 {
                return Err(Error::Precision("an unresolved entry may have smaller valuation".into()));
            }
        }
        Ok(best)
    }

    /// Smallest absolute precision among entries (`None` when all entries are exact zeros).
    pub fn precision_floor(&self) -> Option<i32> {
        self.entries.iter().filter_map(PadicScalar::absolute_precision).min()
    }

    /// Residues of `p^{-shift}·self` mod `p^level`.
    pub fn integral_residues(&self, shift: i32, level: u32) -> Result<Vec<u64>> {
        self.entries.iter().map(|e| e.residue(shift, level)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn require_square(&self) -> Result<usize> {
        if !self.is_square() || self.rows == 0 || self.rows > MAX_N {
            return Err(Error::Unsupported(format!(
                "square matrices of size 1..={MAX_N} only (got {}x{})",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    /// Scaled integral form: `(e, level, y)` with `self = p^e · y`, `y` integral and primitive,
    /// known mod `p^level`.
    pub fn integral_form(&self) -> Result<(i32, u32, Vec<u64>)> {
        let e = self.min_valuation()?;
        let floor = self.precision_floor().unwrap_or(i32::MAX);
        let level = (floor.saturating_sub(e)).clamp(0, max_precision(self.p) as i32) as u32;
        if level == 0 {
            return Err(Error::Precision("no integral digits available".into()));
        }
        Ok((e, level, self.integral_residues(e, level)?))
    }

    pub fn det(&self) -> Result<PadicScalar> {
        let n = self.require_square()?;
        Ok(det_rec(&self.entries, n, self.p))
    }

    pub fn det_valuation(&self) -> Result<i32> {
        self.det()?.valuation()?.ok_or_else(|| Error::Domain("matrix is singular".into()))
    }

    pub fn inverse(&self) -> Result<PadicMatrix> {
        let n = self.require_square()?;
        let d = self.det()?;
        let dinv = d.inv()?;
        let mut out = Self::zeros(self.p, n, n);
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            for j in 0..n {
                minor.clear();
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        minor.push(self.entries[r * n + c]);
                    }
                }
                let mut cof = if n == 1 {
                    PadicScalar::from_int(self.p, 1, max_precision(self.p))
                } else {
                    det_rec(&minor, n - 1, self.p)
                };
                if (i + j) % 2 == 1 {
                    cof = cof.neg();
                }
                out.set(j, i, cof.mul(&dinv));
            }
        }
        Ok(out)
    }

    /// Canonical Iwasawa decomposition: all diagonal units are pushed into `k`.
    pub fn iwasawa_decompose(&self) -> Result<Iwasawa> {
        let n = self.require_square()?;
        let (e, level, y) = self.integral_form()?;
        let res = modular::iwasawa_mod(&y, n, self.p, level)?;
        let w = res.prec;
        if w == 0 {
            return Err(Error::Precision("Iwasawa decomposition consumed all precision".into()));
        }
        let mut u = Self::identity(self.p, n);
        for i in 0..n {
            for j in i + 1..n {
                let raw = PadicScalar::from_residue(self.p, res.upper[i * n + j], 0, w);
                let inv_pa = PadicScalar::uniformizer_pow(self.p, -(res.a[j] as i32), max_precision(self.p));
                u.set(i, j, raw.mul(&inv_pa));
            }
        }
        let a = (0..n).map(|i| res.a[i] as i32 + e).collect();
        let k = Self::from_residues(self.p, n, &res.k, w);
        Ok(Iwasawa { u, a, k, k_precision: w })
    }

    /// Smith exponents `d_1 ≤ … ≤ d_n` (so `g ∈ K diag(ϖ^d) K`).
    pub fn elementary_divisors(&self) -> Result<Vec<i32>> {
        let n = self.require_square()?;
        let (e, level, y) = self.integral_form()?;
        let d = modular::elementary_divisors(&y, n, self.p, level)?;
        Ok(d.into_iter().map(|x| x as i32 + e).collect())
    }

    /// Entrywise agreement to the precision both sides carry.
    pub fn congruent(&self, other: &PadicMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.congruent(b))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }
}

fn det_rec(entries: &[PadicScalar], n: usize, p: u64) -> PadicScalar {
    match n {
        1 => entries[0],
        2 => entries[0].mul(&entries[3]).sub(&entries[1].mul(&entries[2])),
        _ => {
            let mut acc = PadicScalar::zero(p);
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for c in 0..n {
                if entries[c].is_zero() {
                    continue;
                }
                minor.clear();
                for r in 1..n {
                    for cc in (0..n).filter(|&cc| cc != c) {
                        minor.push(entries[r * n + cc]);
                    }
                }
                let term = entries[c].mul(&det_rec(&minor, n - 1, p));
                acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

impl fmt::Display for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_strings().into_iter().map(|r| r.join(", ")).collect();
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

impl fmt::Debug for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antidiagonal_example() {
        let g = PadicMatrix::from_ints(3, 2, 2, &[0, 1, 3, 0]).unwrap();
        let iw = g.iwasawa_decompose().unwrap();
        assert_eq!(iw.a, vec![0, 1]);
        assert!(iw.u.congruent(&PadicMatrix::identity(3, 2)));
        assert!(iw.k.congruent(&PadicMatrix::from_ints(3, 2, 2, &[0, 1, 1, 0]).unwrap()));
    }

    #[test]
    fn inverse_of_rational_matrix() {
        let g = PadicMatrix::from_ints(2, 2, 2, &[4, 1, 6, 3]).unwrap();
        let gi = g.inverse().unwrap();
        let id = g.mul(&gi).unwrap();
        assert!(id.congruent(&PadicMatrix::identity(2, 2)));
        assert_eq!(g.det_valuation().unwrap(), 1);
    }

    #[test]
    fn smith_of_scaled_matrix() {
        let g = PadicMatrix::from_ints(3, 2, 2, &[3, 9, 6, 0]).unwrap();
        assert_eq!(g.elementary_divisors().unwrap(), vec![1, 2]);
    }
}
