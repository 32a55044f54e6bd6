use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{recip, sb_eval, MonoSum, SBFunction};
use crate::chars::AddChar;
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, Monomial, SatakeRat};
use crate::models::{exps, FlagFunction, InducedData, Newform, Projector};
use crate::padic::modular::{det_mod, inverse_mod, iwasawa_mod, mat_mul, mat_mul_into, pow, val_capped};
use crate::padic::{borel_order, for_each_gl, gl_order, hermite_count, in_k0, kappa, FlagSpace, PadicMatrix};
use crate::reps::{Alphabet, LanglandsDatum};
use crate::session::Budget;
use crate::whittaker::{jacquet_integral_gl2, spherical_whittaker_cs, WhittakerSpec};

/// Outcome of a sampled or enumerated identity check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub passed: usize,
    pub failures: Vec<String>,
    pub ok: bool,
}

impl CheckReport {
    fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), samples: 0, passed: 0, failures: Vec::new(), ok: true }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.samples += 1;
        if ok {
            self.passed += 1;
        } else {
            self.ok = false;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }

    fn merge(&mut self, other: CheckReport) {
        self.samples += other.samples;
        self.passed += other.passed;
        self.ok &= other.ok;
        self.failures.extend(other.failures.into_iter().map(|f| format!("{}: {f}", other.name)));
    }
}

fn residues_string(x: &[u64]) -> String {
    format!("{x:?}")
}

/// A random integral `n×n` matrix mod `p^level` with `v(det) ≤ max_det`.
fn random_integral(rng: &mut ChaCha8Rng, p: u64, n: usize, level: u32, max_det: u32) -> Vec<u64> {
    let pl = pow(p, level);
    loop {
        let x: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..pl)).collect();
        let d = det_mod(&x, n, pl);
        if d != 0 && val_capped(d, p, level) <= max_det {
            return x;
        }
    }
}

/// `Φ(g) = ∫_K ξ(k) Φ(k^{-1} g) dk` with `ξ = Φ|_K` for the main function of conductor `c > 0`,
/// i.e. the average of `ω^{-1}(k_nn) Φ(k^{-1} g)` over `K_0(p^c)`, on seeded samples `g`.
///
/// Along the way, for `g` in the support, checks that `(k^{-1}g)_{n,j} ∈ p^c` for `j < n` and
/// `(k^{-1}g)_{nn} ≡ (k^{-1})_{nn} g_{nn} mod p^c`. With `corrupt` the average runs over all of
/// `GL_n(O/p^c)` instead of `K_0(p^c)`.
pub fn phi_invariance_check(
    data: &Arc<InducedData>,
    c: u32,
    samples: usize,
    seed: u64,
    corrupt: bool,
) -> Result<CheckReport> {
    if c == 0 {
        return Err(Error::Validation("the invariance identity needs a ramified conductor".into()));
    }
    let (p, n) = (data.p(), data.n());
    let field = data.field();
    let phi = SBFunction::main(data, c);
    let pc = pow(p, c);
    let mut k0 = Vec::new();
    for_each_gl(p, n, c, |k| {
        if corrupt || in_k0(k, n, p, c) {
            k0.push((k.to_vec(), inverse_mod(k, n, pc).expect("unit determinant")));
        }
    });
    let inv = recip(k0.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("phi_invariance");
    for s in 0..samples {
        let level = c + 1;
        let pl = pow(p, level);
        let mut g: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..pl)).collect();
        if s == 0 {
            g = (0..n * n).map(|i| u64::from(i % (n + 1) == 0)).collect();
        } else if s % 2 == 1 {
            // force the support condition on the last row
            for j in 0..n - 1 {
                g[(n - 1) * n + j] = (g[(n - 1) * n + j] * pc) % pl;
            }
            if g[n * n - 1] % p == 0 {
                g[n * n - 1] += 1;
            }
        }
        let gm = PadicMatrix::from_residues(p, n, &g, level);
        let lhs = sb_eval(&phi, field, &gm)?;
        let mut acc = SatakeRat::zero(field);
        let mut congruent = true;
        let in_support = !lhs.is_zero();
        for (k, kinv) in &k0 {
            let km = PadicMatrix::from_residues(p, n, kinv, c);
            let v = sb_eval(&phi, field, &km.mul(&gm)?)?;
            let w = (data.order() - data.omega_exp(k[n * n - 1])) % data.order();
            acc = &acc + &v.scale(data.zeta(w));
            if in_support {
                let gc: Vec<u64> = g.iter().map(|x| x % pc).collect();
                let kg = mat_mul(kinv, &gc, n, pc);
                let off = (0..n - 1).all(|j| kg[(n - 1) * n + j] == 0);
                let corner = kg[n * n - 1] == kinv[n * n - 1] * gc[n * n - 1] % pc;
                congruent &= off && corner;
            }
        }
        let rhs = acc.scale(&CoeffValue::from_rational(field, inv.clone()));
        report.record(lhs == rhs && congruent, || {
            format!("g={} lhs={lhs} rhs={rhs} congruences={congruent}", residues_string(&g))
        });
    }
    Ok(report)
}

/// `Π^{c}(π(g)v°) = β(g)·v°` as tables, on seeded integral samples `g` and `g = ϖ·1`.
/// With `corrupt` the projection is skipped (only the `K(p^{c'})` average is taken).
pub fn projection_identity_check(nf: &Newform, samples: usize, seed: u64, corrupt: bool) -> Result<CheckReport> {
    let (p, n) = (nf.data().p(), nf.data().n());
    let field = nf.field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("projection_identity");
    let level = nf.level();
    for s in 0..samples {
        let (g, e) = match s {
            0 => ((0..n * n).map(|i| u64::from(i % (n + 1) == 0)).collect(), 0),
            1 => ((0..n * n).map(|i| u64::from(i % (n + 1) == 0)).collect(), 1),
            _ => (random_integral(&mut rng, p, n, level + 3, 2), 0),
        };
        let d = val_capped(det_mod(&g, n, pow(p, level + 3)), p, level + 3);
        let big = level + d;
        let mut gm = PadicMatrix::from_residues(p, n, &g, level + 3);
        if e == 1 {
            gm = PadicMatrix::diag_pows(p, &vec![1; n]).mul(&gm)?;
        }
        let beta = nf.beta(&gm)?;
        let lhs = translate_and_project(nf, &g, big, corrupt)?;
        let omega = nf.data().central().uniformizer_power(field, e);
        let v = nf.vector();
        let mut ok = true;
        for (y, vy) in v.values().iter().enumerate() {
            let left = &lhs[y] * &omega;
            let right = (&beta * v.scale()).scale(vy);
            if left != right {
                ok = false;
                break;
            }
        }
        report.record(ok, || format!("g={} e={e}", residues_string(&g)));
    }
    Ok(report)
}

/// `Π(π(g)v°)` at the flag points of `v°`, for integral `g` known mod `p^{L+3}`; each entry
/// carries the full Satake dependence (torus part times table value times scale).
fn translate_and_project(nf: &Newform, g: &[u64], big: u32, skip: bool) -> Result<Vec<SatakeRat>> {
    let (p, n) = (nf.data().p(), nf.data().n());
    let field = nf.field();
    let data = nf.data();
    let space = FlagSpace::cached(p, n, big)?;
    let pl = space.modulus();
    let gl: Vec<u64> = g.iter().map(|x| x % pl).collect();
    let mut parts: BTreeMap<Monomial, Vec<CoeffValue>> = BTreeMap::new();
    let mut z = vec![0u64; n * n];
    for (yi, y) in space.points().enumerate() {
        mat_mul_into(y, &gl, n, pl, &mut z);
        let iw = iwasawa_mod(&z, n, p, big)?;
        let val = nf.vector().table_value(&iw.k)?;
        if val.is_zero() {
            continue;
        }
        let (mono, t) = data.torus(&exps(&iw.a, 0, n));
        let slot = parts.entry(mono).or_insert_with(|| vec![CoeffValue::zero(field); space.len()]);
        slot[yi] += &(&t * &val);
    }
    let proj = nf.projector();
    let mut out: Vec<MonoSum> = (0..proj.len()).map(|_| MonoSum::default()).collect();
    for (mono, values) in parts {
        let f = FlagFunction::from_values(data, big, values)?;
        let pf = if skip { f.average_down(proj.table_level())? } else { proj.apply(&f)? };
        for (slot, v) in out.iter_mut().zip(pf.values()) {
            slot.add(mono, v);
        }
    }
    let one = CoeffValue::one(field);
    Ok(out.into_iter().map(|m| &m.finish(field, &one) * nf.vector().scale()).collect())
}

/// `Π(v°) = v°` and `π(k)v° = ω(k_nn)v°` for every `k ∈ K_0(p^c)` mod `p^{c'}`.
pub fn equivariance_check(nf: &Newform) -> Result<CheckReport> {
    let (p, n) = (nf.data().p(), nf.data().n());
    let data = nf.data();
    let v = nf.vector();
    let mut report = CheckReport::new("newform_equivariance");
    let pv = nf.projector().apply(v)?;
    report.record(pv.table_eq(v), || "Π(v°) ≠ v°".into());
    let mut err = None;
    for_each_gl(p, n, nf.level(), |k| {
        if err.is_some() || !in_k0(k, n, p, nf.conductor()) {
            return;
        }
        match v.right_translate(k) {
            Ok(t) => {
                let w = if nf.conductor() == 0 { 0 } else { data.omega_exp(k[n * n - 1]) };
                let expect = v.scaled(data.zeta(w));
                report.record(t.table_eq(&expect), || format!("k={}", residues_string(k)));
            }
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// `Σ_{a ≥ 0, |a| = v} δ^{-1}(ϖ^a) ∏_{i<j} q^{a_j}`: the Iwasawa-measure volume of the
/// `v`-shell of `Mat_n(O)`, since `u·ϖ^a·k` is integral iff `u_ij ∈ p^{-a_j}`.
pub fn iwasawa_shell_volume(p: u64, n: usize, v: u32) -> BigRational {
    fn comps(rest: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=rest {
            cur.push(a);
            comps(rest - a, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    comps(v, n, &mut Vec::new(), &mut all);
    let q = BigRational::from_integer(BigInt::from(p));
    let mut total = BigRational::zero();
    for a in all {
        let mut e: i64 = 0;
        for (i, &ai) in a.iter().enumerate() {
            e += ai as i64 * (n as i64 - 2 * i as i64 - 1);
            // entries above the diagonal in column i
            e += ai as i64 * i as i64;
        }
        total += q.pow(e as i32);
    }
    total
}

/// `κ^{-1} q^{vn} q^{-N n²} #{x mod p^N : v(det x) = v}` at `N = v + 1`.
fn additive_shell_volume(p: u64, n: usize, v: u32) -> Result<BigRational> {
    let level = v + 1;
    let nn = n * n;
    let total = pow(p, level * nn as u32);
    if total > 1 << 24 {
        return Err(Error::Budget(format!("additive shell volume needs {total} residue classes")));
    }
    let pl = pow(p, level);
    let mut count: u64 = 0;
    let mut x = vec![0u64; nn];
    for mut code in 0..total {
        for slot in x.iter_mut().rev() {
            *slot = code % pl;
            code /= pl;
        }
        let d = det_mod(&x, n, pl);
        if d != 0 && val_capped(d, p, level) == v {
            count += 1;
        }
    }
    let q = BigInt::from(p);
    Ok(kappa(p, n).recip() * BigRational::new(BigInt::from(count) * q.pow(v * n as u32), q.pow(level * nn as u32)))
}

/// Haar-measure anchors: `vol(K) = 1` through the additive measure and through the flag
/// decomposition at finite level, and, for `v ≤ max_v`, the shell volumes by Hermite cosets,
/// by the Iwasawa parametrization and by additive counting.
pub fn measure_anchor_check(p: u64, n: usize, max_v: u32) -> Result<CheckReport> {
    let mut report = CheckReport::new("measure_anchors");
    let additive = additive_shell_volume(p, n, 0)?;
    report.record(additive.is_one(), || format!("additive vol(K) = {additive}"));
    for m in 1..=2u32 {
        let space = FlagSpace::cached(p, n, m)?;
        // K = ⊔_x B(O)·x·K(p^m), each piece of volume |B(Z/p^m)|/|GL_n(Z/p^m)|
        let vol = BigRational::new(BigInt::from(space.len()) * borel_order(p, n, m), gl_order(p, n, m));
        report.record(vol.is_one(), || format!("flag decomposition at level {m}: vol(K) = {vol}"));
    }
    for v in 0..=max_v {
        let hermite = BigRational::from_integer(BigInt::from(hermite_count(p, n, v)));
        let iwasawa = iwasawa_shell_volume(p, n, v);
        let additive = additive_shell_volume(p, n, v)?;
        report.record(hermite == iwasawa && iwasawa == additive, || {
            format!("shell {v}: hermite {hermite}, iwasawa {iwasawa}, additive {additive}")
        });
    }
    Ok(report)
}

/// Conductor discovery: the search stops at the predicted conductor, every lower level
/// projects to exactly zero, and projections of several seeded flag indicators are
/// proportional to the newform. With `corrupt` the seeded vectors are compared unprojected.
pub fn conductor_check(
    datum: &LanglandsDatum,
    field: &Arc<CoeffField>,
    budget: Budget,
    seeds: usize,
    seed: u64,
    corrupt: bool,
) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("conductor {datum}"));
    let nf = Newform::new(datum, field, budget)?;
    let c = nf.conductor();
    report.record(c == datum.predicted_conductor(), || format!("found {c}, predicted {}", datum.predicted_conductor()));
    for m in 0..c {
        let proj = Projector::new(nf.data(), m, budget.max_cosets)?;
        report.record(proj.is_zero(), || format!("projection at level {m} is nonzero"));
    }
    let proj = nf.projector();
    report.record(proj.is_rank_one(), || "projection has rank above one".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = nf.vector();
    let mut hits = 0;
    for _ in 0..seeds {
        // a random small-integer combination of flag indicators
        let values = (0..proj.len()).map(|_| CoeffValue::from_int(field, rng.gen_range(-3..=3))).collect();
        let f = FlagFunction::from_values(nf.data(), proj.table_level(), values)?;
        let pf = if corrupt { f } else { proj.apply(&f)? };
        if !pf.is_zero() {
            hits += 1;
        }
        let prop = v.proportionality(&pf)?;
        report.record(prop.is_some(), || "a seeded projection is not proportional to v°".into());
    }
    report.record(hits > 0 || seeds == 0, || "every seeded projection vanished".into());
    report.merge(equivariance_check(&nf)?);
    Ok(report)
}

/// Casselman–Shalika against the GL_2 Jacquet integral on `diag(ϖ^{λ_1}, ϖ^{λ_2})` for
/// `|λ_i| ≤ bound`, symbolically in `α_1, α_2`. With `corrupt` the weight is transposed on the
/// Jacquet side.
pub fn whittaker_oracle_check(p: u64, field: &Arc<CoeffField>, bound: i32, corrupt: bool) -> Result<CheckReport> {
    let datum = LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Main)?;
    let spec = WhittakerSpec::new(&datum, false)?;
    let psi = AddChar::new(p, 1);
    let mut report = CheckReport::new("whittaker_oracle");
    for l1 in -bound..=bound {
        for l2 in -bound..=bound {
            let cs = spherical_whittaker_cs(&spec, field, &[l1, l2])?;
            let g = if corrupt { [l2, l1] } else { [l1, l2] };
            let jq = jacquet_integral_gl2(&spec, field, &psi, &PadicMatrix::diag_pows(p, &g))?;
            report.record(cs == jq, || format!("λ=({l1},{l2}): CS {cs} vs Jacquet {jq}"));
        }
    }
    Ok(report)
}
