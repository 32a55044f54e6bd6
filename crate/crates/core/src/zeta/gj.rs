use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use super::{recip, MonoSum, SBFunction, ZetaReport};
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, SatakeRat, TruncSeries};
use crate::models::{exps, Newform};
use crate::padic::modular::{det_mod, inverse_mod, iwasawa_mod, mat_mul_into, pow, val_capped, MAX_N};
use crate::padic::{for_each_gl, gl_order, hermite_forms, kappa, FlagSpace, HermiteForm};
use crate::reps::LanglandsDatum;
use crate::session::{par_map, Budget};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Sum over `K`-cosets `K·H` of the determinant shells, integrating over `K` on flag varieties.
    Hermite,
    /// Sum over all of `Mat_n(O/p^N)` with the additive measure.
    Brute,
}

impl Strategy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hermite" => Ok(Strategy::Hermite),
            "brute" => Ok(Strategy::Brute),
            _ => Err(Error::Validation(format!("unknown strategy `{s}` (hermite|brute)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Hermite => "hermite",
            Strategy::Brute => "brute",
        }
    }
}

/// A computed zeta series with its level bookkeeping.
#[derive(Clone, Debug)]
pub struct GjOutcome {
    pub series: TruncSeries,
    /// Deepest level used.
    pub level: u32,
    /// Per shell: whether the value was confirmed at one level higher.
    pub certified: Vec<bool>,
}

fn row_code(row: &[u64], pm: u64) -> u64 {
    row.iter().fold(0, |acc, &x| acc * pm + x)
}

fn row_decode(mut code: u64, n: usize, pm: u64) -> Vec<u64> {
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = code % pm;
        code /= pm;
    }
    out
}

fn row_times(row: &[u64], m: &[u64], n: usize, pm: u64) -> Vec<u64> {
    (0..n)
        .map(|j| (0..n).fold(0u64, |acc, i| (acc + (row[i] as u128 * m[i * n + j] as u128 % pm as u128) as u64) % pm))
        .collect()
}

/// `Z(s, β, Φ) mod X^T` for the newform matrix coefficient.
pub fn gj_zeta(nf: &Newform, phi: &SBFunction, t: usize, strategy: Strategy, budget: &Budget) -> Result<GjOutcome> {
    let n = nf.data().n();
    if t == 0 {
        return Err(Error::Validation("truncation must be at least 1".into()));
    }
    if phi.shape() != (n, n) {
        return Err(Error::Validation(format!("Φ must live on {n}x{n} matrices")));
    }
    if phi.level() > nf.level() {
        return Err(Error::Level(format!(
            "Φ is locally constant at level {}, above the newform level {}",
            phi.level(),
            nf.level()
        )));
    }
    let field = nf.field();
    if phi.is_zero() {
        return Ok(GjOutcome { series: TruncSeries::zero(field, t), level: 0, certified: vec![true; t] });
    }
    match strategy {
        Strategy::Hermite => hermite(nf, phi, t, budget),
        Strategy::Brute => brute(nf, phi, t, budget),
    }
}

/// `S[r][y] = Σ_{w ∈ GL_n(O/p^{c'}) : e_n w^{-1} ≡ r} ṽ°(y w)` over flag points `y`.
fn row_sums(nf: &Newform, budget: &Budget) -> Result<HashMap<u64, Vec<CoeffValue>>> {
    let (p, n, c) = (nf.data().p(), nf.data().n(), nf.level());
    let dual = nf.dual_data();
    let vt = nf.dual_vector();
    let space = vt.space();
    let pc = space.modulus();
    let group = gl_order(p, n, c);
    if &group * BigInt::from(space.len()) > BigInt::from(budget.max_cosets) {
        return Err(Error::Budget(format!("row sums over GL_{n}(Z/{pc}) exceed the coset budget")));
    }
    let d = dual.order();
    let mut counts: HashMap<(u64, u32, u64, u32), u64> = HashMap::new();
    let mut z = vec![0u64; n * n];
    let mut err = None;
    for_each_gl(p, n, c, |w| {
        if err.is_some() {
            return;
        }
        let winv = inverse_mod(w, n, pc).expect("unit determinant");
        let r = row_code(&winv[(n - 1) * n..], pc);
        for (yi, y) in space.points().enumerate() {
            mat_mul_into(y, w, n, pc, &mut z);
            match space.canonicalize(&z) {
                Ok(cd) => {
                    let e = dual.diag_exp(&cd.diag) % d;
                    *counts.entry((r, yi as u32, e, cd.index)).or_insert(0) += 1;
                }
                Err(e) => err = Some(e),
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let field = nf.field();
    let mut out: HashMap<u64, Vec<CoeffValue>> = HashMap::new();
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    for ((r, yi, e, idx), cnt) in keys {
        let val = &vt.values()[idx as usize];
        if val.is_zero() {
            continue;
        }
        let slot = out.entry(r).or_insert_with(|| vec![CoeffValue::zero(field); space.len()]);
        slot[yi as usize] += &(dual.zeta(e) * val).scale_int(cnt as i64);
    }
    Ok(out)
}

/// `G_H(y) = ∫_K ṽ°(y w) Φ(w^{-1} H) dw` on flag points of level `c'`.
fn g_table(nf: &Newform, phi: &SBFunction, sums: &HashMap<u64, Vec<CoeffValue>>, hmod: &[u64]) -> Vec<CoeffValue> {
    let (p, n) = (nf.data().p(), nf.data().n());
    let field = nf.field();
    let space = nf.dual_vector().space();
    let pc = space.modulus();
    let mut g = vec![CoeffValue::zero(field); space.len()];
    let mut rows: Vec<_> = sums.iter().collect();
    rows.sort_by_key(|(r, _)| **r);
    for (r, s) in rows {
        let row = row_decode(*r, n, pc);
        let image = row_times(&row, hmod, n, pc);
        let phi_val = phi.row_value(field, p, &image);
        if phi_val.is_zero() {
            continue;
        }
        for (gy, sy) in g.iter_mut().zip(s) {
            if !sy.is_zero() {
                *gy += &(sy * &phi_val);
            }
        }
    }
    let inv = recip(gl_order(p, n, nf.level()));
    g.iter().map(|x| x.scale(&inv)).collect()
}

type ShellKey = (u32, [u32; MAX_N], u64, u32, u32);

/// Counts `(G class, a, e, idx, idx')` over `x ∈ flag(level)` for the coset `K·H`.
fn shell_counts(nf: &Newform, h: &HermiteForm, gid: u32, level: u32) -> Result<HashMap<ShellKey, u64>> {
    let (p, n) = (nf.data().p(), nf.data().n());
    let space = FlagSpace::cached(p, n, level)?;
    let coarse = nf.dual_vector().space();
    let red = space.reduction_map(coarse)?;
    let d = nf.data().order();
    let mut counts = HashMap::new();
    let mut z = vec![0u64; n * n];
    let pl = space.modulus();
    let hm: Vec<u64> = h.mat.iter().map(|x| x % pl).collect();
    for (x, rx) in space.points().zip(&red) {
        mat_mul_into(x, &hm, n, pl, &mut z);
        let iw = iwasawa_mod(&z, n, p, level)?;
        let c = nf.vector().space().canonicalize(&iw.k)?;
        let e = (nf.data().diag_exp(&c.diag) + nf.dual_data().diag_exp(&rx.diag)) % d;
        *counts.entry((gid, iw.a, e, c.index, rx.index)).or_insert(0) += 1;
    }
    Ok(counts)
}

fn hermite(nf: &Newform, phi: &SBFunction, t: usize, budget: &Budget) -> Result<GjOutcome> {
    let (p, n, c) = (nf.data().p(), nf.data().n(), nf.level());
    let field = nf.field().clone();
    let sums = row_sums(nf, budget)?;
    let pc = pow(p, c);
    let mut gcache: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut gtables: Vec<Vec<CoeffValue>> = Vec::new();
    let mut coeffs = Vec::with_capacity(t);
    let mut certified = Vec::with_capacity(t);
    let mut deepest = c;
    for v in 0..t as u32 {
        let level = c + v;
        if level + 1 > budget.max_level + c {
            return Err(Error::Budget(format!("shell {v} needs flag level {}", level + 1)));
        }
        let forms: Vec<HermiteForm> = hermite_forms(p, n, v).collect();
        let mut jobs = Vec::with_capacity(forms.len());
        for h in &forms {
            let hmod: Vec<u64> = h.mat.iter().map(|x| x % pc).collect();
            let gid = match gcache.get(&hmod) {
                Some(&g) => g,
                None => {
                    let g = gtables.len() as u32;
                    gtables.push(g_table(nf, phi, &sums, &hmod));
                    gcache.insert(hmod, g);
                    g
                }
            };
            if gtables[gid as usize].iter().all(CoeffValue::is_zero) {
                continue;
            }
            jobs.push((h, gid));
        }
        let work = |lvl: u32| -> Result<SatakeRat> {
            let space = FlagSpace::cached(p, n, lvl)?;
            let est = jobs.len() as f64 * space.len() as f64;
            if est > budget.max_cosets as f64 {
                return Err(Error::Budget(format!("shell {v} at level {lvl} needs {est:.3e} cosets")));
            }
            let parts = par_map(&jobs, budget.threads, |(h, gid)| shell_counts(nf, h, *gid, lvl));
            let mut total: HashMap<ShellKey, u64> = HashMap::new();
            for part in parts {
                for (k, cnt) in part? {
                    *total.entry(k).or_insert(0) += cnt;
                }
            }
            let mut keys: Vec<_> = total.into_iter().collect();
            keys.sort();
            let mut acc = MonoSum::default();
            for ((gid, a, e, idx, idx2), cnt) in keys {
                let vi = &nf.vector().values()[idx as usize];
                let gi = &gtables[gid as usize][idx2 as usize];
                if vi.is_zero() || gi.is_zero() {
                    continue;
                }
                let (mono, tv) = nf.data().torus(&exps(&a, 0, n));
                acc.add(mono, &(&(&tv * nf.data().zeta(e)) * &(vi * gi)).scale_int(cnt as i64));
            }
            let scale = CoeffValue::sqrtq_pow(&field, -(v as i64) * (n as i64 - 1)).scale(&recip(space.len()));
            Ok(&acc.finish(&field, &scale) * &(nf.vector().scale() * nf.dual_vector().scale()))
        };
        let z0 = work(level)?;
        let z1 = work(level + 1)?;
        if z0 != z1 {
            return Err(Error::Stabilization(format!("shell {v}: flag levels {level} and {} disagree", level + 1)));
        }
        deepest = deepest.max(level + 1);
        coeffs.push(z0);
        certified.push(true);
    }
    Ok(GjOutcome { series: TruncSeries::from_coeffs(&field, coeffs, t), level: deepest, certified })
}

/// `Φ̃(x) = ∫_K ṽ°(k) Φ(k^{-1} x) dk` for `x` mod `p^{c'}`, grouped by the last row of `k^{-1}`.
fn brute_kernel(nf: &Newform) -> Result<HashMap<u64, CoeffValue>> {
    let (p, n, c) = (nf.data().p(), nf.data().n(), nf.level());
    let pc = pow(p, c);
    let field = nf.field();
    let mut out: HashMap<u64, CoeffValue> = HashMap::new();
    let mut err = None;
    for_each_gl(p, n, c, |k| {
        if err.is_some() {
            return;
        }
        let kinv = inverse_mod(k, n, pc).expect("unit determinant");
        let r = row_code(&kinv[(n - 1) * n..], pc);
        match nf.dual_vector().table_value(k) {
            Ok(v) if !v.is_zero() => {
                *out.entry(r).or_insert_with(|| CoeffValue::zero(field)) += &v;
            }
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn brute(nf: &Newform, phi: &SBFunction, t: usize, budget: &Budget) -> Result<GjOutcome> {
    let (p, n, c) = (nf.data().p(), nf.data().n(), nf.level());
    let field = nf.field().clone();
    let pc = pow(p, c);
    let kernel = brute_kernel(nf)?;
    let group_inv = recip(gl_order(p, n, c));
    let mut kernel_rows: Vec<_> = kernel.iter().map(|(r, v)| (row_decode(*r, n, pc), v.clone())).collect();
    kernel_rows.sort_by(|a, b| a.0.cmp(&b.0));
    let nn = n * n;
    let classes = pow(p, c * nn as u32) as usize;
    let mut phit: Vec<Option<CoeffValue>> = vec![None; classes];
    let mut phi_tilde = |xbar: &[u64], code: usize| -> CoeffValue {
        if let Some(v) = &phit[code] {
            return v.clone();
        }
        let mut acc = CoeffValue::zero(&field);
        for (r, kv) in &kernel_rows {
            let image = row_times(r, xbar, n, pc);
            let f = phi.row_value(&field, p, &image);
            if !f.is_zero() {
                acc += &(kv * &f);
            }
        }
        let v = acc.scale(&group_inv);
        phit[code] = Some(v.clone());
        v
    };
    let kinv = kappa(p, n).recip();
    let mut coeffs = Vec::with_capacity(t);
    let mut certified = Vec::with_capacity(t);
    let mut deepest = 0;
    for v in 0..t as u32 {
        let base = v + c;
        let budget_ok = |lvl: u32| (p as f64).powi((nn as u32 * lvl) as i32) <= budget.max_cosets as f64;
        if !budget_ok(base) {
            return Err(Error::Budget(format!("brute shell {v} needs {p}^{} residue classes", nn as u32 * base)));
        }
        let mut eval = |lvl: u32| -> Result<SatakeRat> {
            let comps = compositions(v, n);
            let counts = brute_counts(nf, v, lvl, &comps)?;
            let fl = nf.vector().space().len();
            let d = nf.data().order() as usize;
            let mut acc = MonoSum::default();
            for (i, &cnt) in counts.iter().enumerate() {
                if cnt == 0 {
                    continue;
                }
                let idx = i % fl;
                let e = (i / fl) % d;
                let ai = (i / (fl * d)) % comps.len();
                let code = i / (fl * d * comps.len());
                let vi = &nf.vector().values()[idx];
                if vi.is_zero() {
                    continue;
                }
                let xbar = decode_matrix(code as u64, nn, pc);
                let pt = phi_tilde(&xbar, code);
                if pt.is_zero() {
                    continue;
                }
                let (mono, tv) = nf.data().torus(&comps[ai]);
                acc.add(mono, &(&(&tv * nf.data().zeta(e as u64)) * &(vi * &pt)).scale_int(cnt as i64));
            }
            // dg = κ^{-1} |det x|^{-n} dx and each residue class has volume q^{-lvl·n²}
            let q = BigInt::from(p);
            let measure = &kinv * num_rational::BigRational::new(q.pow(v * n as u32), q.pow(lvl * nn as u32));
            let scale = CoeffValue::sqrtq_pow(&field, -(v as i64) * (n as i64 - 1)).scale(&measure);
            Ok(&acc.finish(&field, &scale) * &(nf.vector().scale() * nf.dual_vector().scale()))
        };
        let z0 = eval(base)?;
        let cert = budget_ok(base + 1) && (p as f64).powi((nn as u32 * (base + 1)) as i32) <= (1u64 << 27) as f64;
        if cert {
            let z1 = eval(base + 1)?;
            if z0 != z1 {
                return Err(Error::Stabilization(format!(
                    "brute shell {v}: residue levels {base} and {} disagree",
                    base + 1
                )));
            }
            deepest = deepest.max(base + 1);
        } else {
            deepest = deepest.max(base);
        }
        coeffs.push(z0);
        certified.push(cert);
    }
    Ok(GjOutcome { series: TruncSeries::from_coeffs(&field, coeffs, t), level: deepest, certified })
}

fn compositions(v: u32, n: usize) -> Vec<[i32; MAX_N]> {
    fn go(rest: u32, i: usize, n: usize, cur: &mut [i32; MAX_N], out: &mut Vec<[i32; MAX_N]>) {
        if i == n - 1 {
            cur[i] = rest as i32;
            out.push(*cur);
            return;
        }
        for a in 0..=rest {
            cur[i] = a as i32;
            go(rest - a, i + 1, n, cur, out);
        }
    }
    let mut out = Vec::new();
    go(v, 0, n, &mut [0; MAX_N], &mut out);
    out
}

fn decode_matrix(mut code: u64, nn: usize, pm: u64) -> Vec<u64> {
    let mut out = vec![0; nn];
    for i in (0..nn).rev() {
        out[i] = code % pm;
        code /= pm;
    }
    out
}

/// Dense counts indexed by `((x mod p^{c'}, a), e, idx)` over `x ∈ Mat_n(Z/p^lvl)` with `v(det x) = v`.
fn brute_counts(nf: &Newform, v: u32, lvl: u32, comps: &[[i32; MAX_N]]) -> Result<Vec<u32>> {
    let (p, n, c) = (nf.data().p(), nf.data().n(), nf.level());
    let nn = n * n;
    let pl = pow(p, lvl);
    let pc = pow(p, c);
    let fl = nf.vector().space().len();
    let d = nf.data().order() as usize;
    let classes = pow(p, c * nn as u32) as usize;
    let comp_index: HashMap<[u32; MAX_N], usize> = comps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut k = [0u32; MAX_N];
            for j in 0..n {
                k[j] = a[j] as u32;
            }
            (k, i)
        })
        .collect();
    let mut counts = vec![0u32; classes * comps.len() * d * fl];
    let mut x = vec![0u64; nn];
    loop {
        let det = det_mod(&x, n, pl);
        if det != 0 && val_capped(det, p, lvl) == v {
            let iw = iwasawa_mod(&x, n, p, lvl)?;
            let cd = nf.vector().space().canonicalize(&iw.k)?;
            let e = nf.data().diag_exp(&cd.diag) as usize;
            let code = x.iter().fold(0usize, |acc, &y| acc * pc as usize + (y % pc) as usize);
            let ai = comp_index[&iw.a];
            counts[((code * comps.len() + ai) * d + e) * fl + cd.index as usize] += 1;
        }
        let mut i = nn;
        loop {
            if i == 0 {
                return Ok(counts);
            }
            i -= 1;
            x[i] += 1;
            if x[i] < pl {
                break;
            }
            x[i] = 0;
        }
    }
}

/// `Z(s, β°, 1_{Mat_n(O)})` against `L(s, π)` for spherical `π`.
pub fn gj_spherical(
    datum: &LanglandsDatum,
    field: &Arc<CoeffField>,
    t: usize,
    strategy: Strategy,
    budget: &Budget,
    corrupt: bool,
) -> Result<ZetaReport> {
    if !datum.is_spherical() {
        return Err(Error::Validation("the spherical zeta integral needs an unramified datum".into()));
    }
    let nf = Newform::new(datum, field, *budget)?;
    let mut phi = SBFunction::Indicator { n: datum.n() };
    if corrupt {
        phi = phi.corrupted();
    }
    compare_with_l(&nf, &phi, t, strategy, budget)
}

/// `Z(s, β, Φ)` for the newform coefficient against `L(s, π)`; `Φ` is the main-theorem function
/// for ramified data and the indicator of `Mat_n(O)` for spherical ones.
pub fn main_theorem(
    datum: &LanglandsDatum,
    field: &Arc<CoeffField>,
    t: usize,
    strategy: Strategy,
    budget: &Budget,
    corrupt: bool,
) -> Result<ZetaReport> {
    let nf = Newform::new(datum, field, *budget)?;
    let mut phi = if nf.conductor() == 0 {
        SBFunction::Indicator { n: datum.n() }
    } else {
        SBFunction::main(nf.data(), nf.conductor())
    };
    if corrupt {
        phi = phi.corrupted();
    }
    compare_with_l(&nf, &phi, t, strategy, budget)
}

pub(crate) fn compare_with_l(
    nf: &Newform,
    phi: &SBFunction,
    t: usize,
    strategy: Strategy,
    budget: &Budget,
) -> Result<ZetaReport> {
    let datum = nf.data().datum();
    let out = gj_zeta(nf, phi, t, strategy, budget)?;
    let rhs = datum.l_factor(nf.field(), t)?;
    ZetaReport::compare(datum.to_string(), datum.to_json(), phi.label(), strategy.name(), out.level, &out.series, &rhs)
}

/// Hermite against brute strategy on the same `Φ`; `corrupt` corrupts the brute side only.
pub fn strategy_equivalence(
    datum: &LanglandsDatum,
    field: &Arc<CoeffField>,
    t: usize,
    budget: &Budget,
    corrupt: bool,
) -> Result<ZetaReport> {
    let nf = Newform::new(datum, field, *budget)?;
    let phi = if nf.conductor() == 0 {
        SBFunction::Indicator { n: datum.n() }
    } else {
        SBFunction::main(nf.data(), nf.conductor())
    };
    let lhs = gj_zeta(&nf, &phi, t, Strategy::Hermite, budget)?;
    let brute_phi = if corrupt { phi.clone().corrupted() } else { phi.clone() };
    let rhs = gj_zeta(&nf, &brute_phi, t, Strategy::Brute, budget)?;
    ZetaReport::compare(
        datum.to_string(),
        datum.to_json(),
        phi.label(),
        "hermite-vs-brute",
        lhs.level.max(rhs.level),
        &lhs.series,
        &rhs.series,
    )
}
