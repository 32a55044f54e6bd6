//! Left `GL_n(O)`-coset representatives of integral matrices with a fixed determinant valuation.

use super::modular::pow;

/// An upper triangular integral matrix with diagonal `p^{a_i}` and entry `(i,j)` reduced mod `p^{a_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub a: Vec<u32>,
    /// Row-major exact nonnegative integer entries.
    pub mat: Vec<u64>,
}

impl HermiteForm {
    pub fn n(&self) -> usize {
        self.a.len()
    }
}

/// Streams the representatives of `{g ∈ Mat_n(O) : v(det g) = v} = ⊔ K·H` in lexicographic order.
pub fn hermite_forms(p: u64, n: usize, v: u32) -> HermiteIter {
    let mut comps = Vec::new();
    compositions(v, n, &mut Vec::new(), &mut comps);
    HermiteIter { p, n, comps, comp: 0, digits: Vec::new(), radices: Vec::new(), fresh: true }
}

/// Number of representatives, `Σ_a ∏_j p^{j·a_j}` (0-indexed `j`).
pub fn hermite_count(p: u64, n: usize, v: u32) -> u64 {
    let mut comps = Vec::new();
    compositions(v, n, &mut Vec::new(), &mut comps);
    comps.iter().map(|a| a.iter().enumerate().map(|(j, &aj)| pow(p, aj * j as u32)).product::<u64>()).sum()
}

fn compositions(rest: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        cur.push(rest);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in (0..=rest).rev() {
        cur.push(first);
        compositions(rest - first, parts - 1, cur, out);
        cur.pop();
    }
}

pub struct HermiteIter {
    p: u64,
    n: usize,
    comps: Vec<Vec<u32>>,
    comp: usize,
    digits: Vec<u64>,
    radices: Vec<u64>,
    fresh: bool,
}

impl HermiteIter {
    fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
    }

    fn build(&self) -> HermiteForm {
        let n = self.n;
        let a = self.comps[self.comp].clone();
        let mut mat = vec![0u64; n * n];
        for i in 0..n {
            mat[i * n + i] = pow(self.p, a[i]);
        }
        for ((i, j), d) in self.positions().zip(&self.digits) {
            mat[i * n + j] = *d;
        }
        HermiteForm { a, mat }
    }
}

impl Iterator for HermiteIter {
    type Item = HermiteForm;

    fn next(&mut self) -> Option<HermiteForm> {
        if self.comp >= self.comps.len() {
            return None;
        }
        if self.fresh {
            let a = &self.comps[self.comp];
            self.radices = self.positions().map(|(_, j)| pow(self.p, a[j])).collect();
            self.digits = vec![0; self.radices.len()];
            self.fresh = false;
            return Some(self.build());
        }
        // odometer, last position fastest
        for idx in (0..self.digits.len()).rev() {
            self.digits[idx] += 1;
            if self.digits[idx] < self.radices[idx] {
                return Some(self.build());
            }
            self.digits[idx] = 0;
        }
        self.comp += 1;
        self.fresh = true;
        self.next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(hermite_forms(3, 2, 0).count(), 1);
        let forms: Vec<_> = hermite_forms(3, 2, 1).collect();
        assert_eq!(forms.len(), 4);
        assert!(forms.contains(&HermiteForm { a: vec![1, 0], mat: vec![3, 0, 0, 1] }));
        for b in 0..3 {
            assert!(forms.contains(&HermiteForm { a: vec![0, 1], mat: vec![1, b, 0, 3] }));
        }
        assert_eq!(hermite_forms(2, 2, 2).count(), 7);
        for (p, n, v) in [(2, 3, 2), (3, 3, 1), (2, 2, 4)] {
            assert_eq!(hermite_forms(p, n, v).count() as u64, hermite_count(p, n, v));
        }
    }
}
