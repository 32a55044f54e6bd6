//! Spherical Whittaker functions: Casselman–Shalika on the torus for any `n`, and an exact
//! GL_2 Jacquet integral used as an independent check.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::chars::AddChar;
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat, VarId};
use crate::padic::{modulus_sqrt, PadicMatrix};
use crate::reps::LanglandsDatum;

/// A spherical datum together with the orientation of the additive character.
#[derive(Clone, Debug)]
pub struct WhittakerSpec {
    datum: LanglandsDatum,
    conjugate: bool,
}

impl WhittakerSpec {
    pub fn new(datum: &LanglandsDatum, conjugate: bool) -> Result<Self> {
        if !datum.is_spherical() {
            return Err(Error::Validation("Whittaker functions are implemented for spherical data only".into()));
        }
        Ok(WhittakerSpec { datum: datum.clone(), conjugate })
    }

    pub fn datum(&self) -> &LanglandsDatum {
        &self.datum
    }

    /// Whether the model is `W(π, ψ̄)` rather than `W(π, ψ)`.
    pub fn is_conjugate(&self) -> bool {
        self.conjugate
    }

    fn character(&self, psi: &AddChar) -> AddChar {
        if self.conjugate != psi.is_conjugate() {
            psi.conjugate()
        } else {
            psi.clone()
        }
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|s| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| s[i] > s[j]).count();
            (s, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

fn det(field: &Arc<CoeffField>, m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    let mut acc = LaurentPoly::zero(field);
    for (s, sign) in permutations(n) {
        let mut t = LaurentPoly::constant(CoeffValue::from_int(field, sign));
        for (i, &j) in s.iter().enumerate() {
            if m[i][j].is_zero() {
                t = LaurentPoly::zero(field);
                break;
            }
            t = &t * &m[i][j];
        }
        acc = &acc + &t;
    }
    acc
}

fn shift(lambda: &[i32]) -> Result<(i32, Vec<u32>)> {
    let last = *lambda.last().ok_or_else(|| Error::Validation("empty weight".into()))?;
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Validation(format!("{lambda:?} is not dominant")));
    }
    Ok((last, lambda.iter().map(|&l| (l - last) as u32).collect()))
}

fn det_power(field: &Arc<CoeffField>, n: usize, e: i32) -> LaurentPoly {
    let mut m = Monomial::one();
    for i in 0..n {
        m = m.mul(&Monomial::var(VarId::alpha(i), e as i16));
    }
    LaurentPoly::term(m, CoeffValue::one(field))
}

/// `s_λ(x_1,…,x_n)` in the variables `α_1..α_n` as `a_{λ+ρ} / a_ρ`.
pub fn schur_bialternant(field: &Arc<CoeffField>, lambda: &[i32]) -> Result<LaurentPoly> {
    let n = lambda.len();
    let (base, mu) = shift(lambda)?;
    let alt = |exps: &[u32]| -> LaurentPoly {
        let m: Vec<Vec<LaurentPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| LaurentPoly::term(Monomial::var(VarId::alpha(j), exps[i] as i16), CoeffValue::one(field)))
                    .collect()
            })
            .collect();
        det(field, &m)
    };
    let rho: Vec<u32> = (0..n).map(|i| (n - 1 - i) as u32).collect();
    let top: Vec<u32> = mu.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let s = alt(&top).div_exact(&alt(&rho))?.ok_or_else(|| Error::Domain("alternant quotient is not exact".into()))?;
    Ok(&s * &det_power(field, n, base))
}

fn complete(field: &Arc<CoeffField>, n: usize, k: i32) -> LaurentPoly {
    if k < 0 {
        return LaurentPoly::zero(field);
    }
    // h_k(x_1..x_n) = Σ_j x_n^j h_{k-j}(x_1..x_{n-1})
    let mut h: Vec<LaurentPoly> =
        (0..=k).map(|j| if j == 0 { LaurentPoly::one(field) } else { LaurentPoly::zero(field) }).collect();
    for v in 0..n {
        let x = LaurentPoly::var(field, VarId::alpha(v));
        let mut next = Vec::with_capacity(h.len());
        for d in 0..=k as usize {
            let mut acc = LaurentPoly::zero(field);
            let mut xp = LaurentPoly::one(field);
            for j in 0..=d {
                acc = &acc + &(&xp * &h[d - j]);
                xp = &xp * &x;
            }
            next.push(acc);
        }
        h = next;
    }
    h.pop().expect("k ≥ 0")
}

/// `s_λ = det(h_{λ_i - i + j})`.
pub fn schur_jacobi_trudi(field: &Arc<CoeffField>, lambda: &[i32]) -> Result<LaurentPoly> {
    let n = lambda.len();
    let (base, mu) = shift(lambda)?;
    let m: Vec<Vec<LaurentPoly>> =
        (0..n).map(|i| (0..n).map(|j| complete(field, n, mu[i] as i32 - i as i32 + j as i32)).collect()).collect();
    Ok(&det(field, &m) * &det_power(field, n, base))
}

type SchurKey = (u32, u64, Vec<i32>);

fn schur_cached(field: &Arc<CoeffField>, lambda: &[i32]) -> Result<LaurentPoly> {
    static CACHE: OnceLock<RwLock<HashMap<SchurKey, LaurentPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (field.order(), field.q(), lambda.to_vec());
    if let Some(s) = cache.read().expect("schur cache").get(&key) {
        return Ok(s.clone());
    }
    let s = schur_bialternant(field, lambda)?;
    cache.write().expect("schur cache").insert(key, s.clone());
    Ok(s)
}

/// Substitutes `α_i ↦ values[i]` into a polynomial in `α_1..α_n`.
pub fn substitute(poly: &LaurentPoly, values: &[SatakeRat]) -> Result<SatakeRat> {
    let field = poly.field();
    let mut acc = SatakeRat::zero(field);
    for (m, c) in poly.terms() {
        let mut t = SatakeRat::constant(c.clone());
        for (i, v) in values.iter().enumerate() {
            let e = m.exponent(VarId::alpha(i));
            if e != 0 {
                t = &t * &v.pow(e as i32)?;
            }
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

/// `W°(ϖ^λ) = δ^{1/2}(ϖ^λ) s_λ(α)` for dominant `λ`, and `0` otherwise.
pub fn spherical_whittaker_cs(spec: &WhittakerSpec, field: &Arc<CoeffField>, lambda: &[i32]) -> Result<SatakeRat> {
    let n = spec.datum.n();
    if lambda.len() != n {
        return Err(Error::Validation(format!("weight has {} entries, datum has rank {n}", lambda.len())));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Ok(SatakeRat::zero(field));
    }
    let s = schur_cached(field, lambda)?;
    Ok(substitute(&s, &spec.datum.satake(field))?.scale(&modulus_sqrt(field, lambda)))
}

/// `W°(g) = ∫_F f°(w n(u) g) ψ̄(u) du / W(1)` for GL_2, summed cell by cell.
///
/// `g = n(x)·diag(ϖ^{λ_1}, ϖ^{λ_2})·k` reduces to the torus value times `ψ(x)`.
/// Substituting `u = ϖ^{λ_1-λ_2} y`, the cell `y ∈ O` contributes `[λ_1 ≥ λ_2]`, and the cell
/// `v(y) = -r` contributes `f°(w n(y)) = q^{-r}(α_1/α_2)^r` against a Gauss-type average of `ψ`.
pub fn jacquet_integral_gl2(
    spec: &WhittakerSpec,
    field: &Arc<CoeffField>,
    psi: &AddChar,
    g: &PadicMatrix,
) -> Result<SatakeRat> {
    if spec.datum.n() != 2 || g.rows() != 2 || g.cols() != 2 {
        return Err(Error::Unsupported("the Jacquet integral oracle is implemented for GL_2".into()));
    }
    let iw = g.iwasawa_decompose()?;
    let phase = spec.character(psi).eval(field, iw.u.get(0, 1))?;
    Ok(jacquet_torus(spec, field, iw.a[0], iw.a[1])?.scale(&phase))
}

fn jacquet_torus(spec: &WhittakerSpec, field: &Arc<CoeffField>, l1: i32, l2: i32) -> Result<SatakeRat> {
    let a = spec.datum.satake(field);
    let x = a[0].div(&a[1])?;
    let qinv = CoeffValue::q_pow(field, -1);
    let d = l1 - l2;
    let mut cells = SatakeRat::zero(field);
    if d >= 0 {
        cells = SatakeRat::one(field);
    }
    // v(y) = -r: measure q^r(1 - 1/q) when ψ(ϖ^d y) is trivial, -q^{r-1} at the first nontrivial shell
    for r in 1..=d.max(0) + 1 {
        let mass = if d - r >= 0 {
            &CoeffValue::one(field) - &qinv
        } else if d - r == -1 {
            -&qinv
        } else {
            continue;
        };
        cells = &cells + &x.pow(r)?.scale(&mass);
    }
    // w n(u) t = t^w w n(ϖ^{-d} u) and du = q^{-d} dy
    let prefactor = &(&a[0].pow(l2)? * &a[1].pow(l1)?).scale(&CoeffValue::sqrtq_pow(field, -d as i64));
    let w1 = &SatakeRat::one(field) - &x.scale(&qinv);
    (prefactor * &cells).div(&w1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::Alphabet;

    fn spec(n: usize) -> (Arc<CoeffField>, WhittakerSpec) {
        let f = CoeffField::new(3, 3).unwrap();
        let names = vec!["unram"; n];
        let d = LanglandsDatum::from_names(3, &names, Alphabet::Main).unwrap();
        (f, WhittakerSpec::new(&d, false).unwrap())
    }

    #[test]
    fn schur_constructions_agree() {
        let (f, _) = spec(3);
        for l in [[0, 0, 0], [2, 1, 0], [3, 3, 1], [1, 0, -2], [4, 0, 0]] {
            assert_eq!(schur_bialternant(&f, &l).unwrap(), schur_jacobi_trudi(&f, &l).unwrap(), "{l:?}");
        }
        let s = schur_bialternant(&f, &[1, 1, 0]).unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn cs_small_values() {
        let (f, s) = spec(2);
        assert_eq!(spherical_whittaker_cs(&s, &f, &[0, 0]).unwrap(), SatakeRat::one(&f));
        assert!(spherical_whittaker_cs(&s, &f, &[0, 1]).unwrap().is_zero());
        let a = &SatakeRat::var(&f, VarId::alpha(0)) + &SatakeRat::var(&f, VarId::alpha(1));
        assert_eq!(spherical_whittaker_cs(&s, &f, &[1, 0]).unwrap(), a.scale(&CoeffValue::sqrtq_pow(&f, -1)));
    }

    #[test]
    fn jacquet_identity_and_nondominant() {
        let (f, s) = spec(2);
        let psi = AddChar::new(3, 2);
        let one = jacquet_integral_gl2(&s, &f, &psi, &PadicMatrix::identity(3, 2)).unwrap();
        assert_eq!(one, SatakeRat::one(&f));
        let nd = jacquet_integral_gl2(&s, &f, &psi, &PadicMatrix::diag_pows(3, &[0, 1])).unwrap();
        assert!(nd.is_zero());
    }
}
