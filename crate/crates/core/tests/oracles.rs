//! Engine values against closed forms computed independently of the engine.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use gj_core::padic::{hermite_count, hermite_forms};
use gj_core::reps::Alphabet;
use gj_core::session::Budget;
use gj_core::whittaker::{jacquet_integral_gl2, schur_jacobi_trudi, spherical_whittaker_cs, substitute, WhittakerSpec};
use gj_core::zeta::{gj_zeta, iwasawa_shell_volume, SBFunction, Strategy};
use gj_core::{
    AddChar, CoeffField, CoeffValue, LanglandsDatum, Newform, PadicMatrix, SatakeRat, Session, TruncSeries, VarId,
};

fn datum(p: u64, names: &[&str]) -> LanglandsDatum {
    LanglandsDatum::from_names(p, names, Alphabet::Main).unwrap()
}

fn field_for(p: u64, d: &LanglandsDatum) -> Arc<CoeffField> {
    Session::new(p, &[d.unit_order()], 2).unwrap().field().clone()
}

fn alpha(field: &Arc<CoeffField>, i: usize) -> SatakeRat {
    SatakeRat::var(field, VarId::alpha(i))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// For c(π) = 1 with χ_2 unramified, the newform is a `U_p`-eigenvector with eigenvalue
/// `q^{1/2} α_2`, and `K_0 diag(ϖ^k,1) K_0` has `q^k` left cosets, so
/// `β(diag(ϖ^k, 1)) = q^{-k/2} α_2^k`.
#[test]
fn beta_on_torus_matches_hecke_eigenvalue() {
    for p in [3, 5] {
        let d = datum(p, &["quad", "unram"]);
        let f = field_for(p, &d);
        let nf = Newform::new(&d, &f, Budget::default()).unwrap();
        assert_eq!(nf.conductor(), 1);
        for k in 0..3 {
            let g = PadicMatrix::diag_pows(p, &[k, 0]);
            let want = alpha(&f, 1).pow(k).unwrap().scale(&CoeffValue::sqrtq_pow(&f, -(k as i64)));
            assert_eq!(nf.beta(&g).unwrap(), want, "p={p} k={k}");
        }
    }
}

/// Both characters ramified: `U_p` kills the newform.
#[test]
fn beta_vanishes_off_k0_for_quad_quad() {
    let d = datum(3, &["quad", "quad"]);
    let f = field_for(3, &d);
    let nf = Newform::new(&d, &f, Budget::default()).unwrap();
    assert_eq!(nf.conductor(), 2);
    assert!(nf.beta(&PadicMatrix::diag_pows(3, &[1, 0])).unwrap().is_zero());
    assert_eq!(nf.beta(&PadicMatrix::identity(3, 2)).unwrap(), SatakeRat::one(&f));
}

/// `β` does not depend on the flag level used for the pairing integral.
#[test]
fn beta_is_stable_at_raised_levels() {
    let d = datum(3, &["quad", "unram"]);
    let f = field_for(3, &d);
    let nf = Newform::new(&d, &f, Budget::default()).unwrap();
    let y = [3u64, 1, 0, 1];
    let base = nf.beta(&PadicMatrix::from_ints(3, 2, 2, &[3, 1, 0, 1]).unwrap()).unwrap();
    for level in 2..=4 {
        assert_eq!(nf.beta_integral(&y, level).unwrap(), base, "level {level}");
    }
}

/// Spherical Macdonald formula on GL_2:
/// `β°(diag(ϖ^k,1)) = q^{-k/2}/(1+q^{-1}) · (c(α)α_1^k + c(α')α_2^k)` with
/// `c(α) = (α_1 − q^{-1}α_2)/(α_1 − α_2)`.
#[test]
fn spherical_beta_matches_macdonald() {
    let p = 2;
    let d = datum(p, &["unram", "unram"]);
    let f = field_for(p, &d);
    let nf = Newform::new(&d, &f, Budget::default()).unwrap();
    let (a1, a2) = (alpha(&f, 0), alpha(&f, 1));
    let qinv = CoeffValue::from_rational(&f, rat(1, p as i64));
    let c1 = (&a1 - &a2.scale(&qinv)).div(&(&a1 - &a2)).unwrap();
    let c2 = (&a2 - &a1.scale(&qinv)).div(&(&a2 - &a1)).unwrap();
    let norm = CoeffValue::from_rational(&f, rat(p as i64, p as i64 + 1));
    for k in 0..4 {
        let sum = &(&c1 * &a1.pow(k).unwrap()) + &(&c2 * &a2.pow(k).unwrap());
        let want = sum.scale(&(&norm * &CoeffValue::sqrtq_pow(&f, -(k as i64))));
        assert_eq!(nf.beta(&PadicMatrix::diag_pows(p, &[k, 0])).unwrap(), want, "k={k}");
    }
}

/// `(1 − α_1 X)^{-1}(1 − α_2 X)^{-1}` built from geometric series, against both strategies.
#[test]
fn spherical_zeta_matches_geometric_product() {
    let p = 3;
    let d = datum(p, &["unram", "unram"]);
    let f = field_for(p, &d);
    let want = TruncSeries::geometric(&alpha(&f, 0), 4).mul(&TruncSeries::geometric(&alpha(&f, 1), 4)).unwrap();
    let nf = Newform::new(&d, &f, Budget::default()).unwrap();
    let phi = SBFunction::Indicator { n: 2 };
    for s in [Strategy::Hermite, Strategy::Brute] {
        let got = gj_zeta(&nf, &phi, 4, s, &Budget::default()).unwrap();
        assert_eq!(got.series, want, "{s:?}");
        if s == Strategy::Hermite {
            assert!(got.certified.iter().all(|&c| c));
        }
    }
}

/// Jacobi–Trudi and the bialternant are independent Schur evaluations; with `δ^{1/2}` they give
/// Casselman–Shalika, which on GL_2 must also match the Jacquet integral.
#[test]
fn casselman_shalika_three_ways() {
    let p = 3;
    let d = datum(p, &["unram", "unram"]);
    let f = field_for(p, &d);
    let spec = WhittakerSpec::new(&d, false).unwrap();
    let psi = AddChar::new(p, 1);
    let vars = [alpha(&f, 0), alpha(&f, 1)];
    for l1 in 0..4 {
        for l2 in -2..=l1 {
            let lam = [l1, l2];
            let cs = spherical_whittaker_cs(&spec, &f, &lam).unwrap();
            let jt = substitute(&schur_jacobi_trudi(&f, &lam).unwrap(), &vars).unwrap();
            // δ^{1/2}(diag(ϖ^{l1}, ϖ^{l2})) = q^{-(l1 - l2)/2}
            let want = jt.scale(&CoeffValue::sqrtq_pow(&f, -((l1 - l2) as i64)));
            assert_eq!(cs, want, "λ={lam:?}");
            let jq = jacquet_integral_gl2(&spec, &f, &psi, &PadicMatrix::diag_pows(p, &lam)).unwrap();
            assert_eq!(cs, jq, "λ={lam:?}");
        }
    }
}

/// Number of upper-triangular Hermite forms of determinant `ϖ^v` on GL_2:
/// `Σ_{d=0}^{v} q^d`.
#[test]
fn gl2_hermite_count_closed_form() {
    for p in [2u64, 3, 5] {
        for v in 0..5u32 {
            let want: u64 = (0..=v).map(|d| p.pow(d)).sum();
            assert_eq!(hermite_count(p, 2, v), want);
            assert_eq!(hermite_forms(p, 2, v).count() as u64, want);
            assert_eq!(iwasawa_shell_volume(p, 2, v), BigRational::from_integer(BigInt::from(want)));
        }
    }
}

/// `#GL_n(F_q) = Π (q^n − q^i)` against the library group order.
#[test]
fn finite_group_orders() {
    use gj_core::padic::gl_order;
    for p in [2u64, 3, 5] {
        for n in 1..=3usize {
            let want: u64 = (0..n as u32).map(|i| p.pow(n as u32) - p.pow(i)).product();
            assert_eq!(gl_order(p, n, 1), BigInt::from(want));
            // the kernel of reduction mod p has order q^{n²} per level
            assert_eq!(gl_order(p, n, 3), BigInt::from(want) * BigInt::from(p).pow(2 * (n * n) as u32));
        }
    }
}

/// `L(s, π × π')` for unramified data is `Π_{i,j} (1 − α_i α'_j X)^{-1}`.
#[test]
fn rankin_selberg_l_factor_is_a_product() {
    let p = 2;
    let pi = datum(p, &["unram", "unram"]);
    let pi2 = LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Partner).unwrap();
    let f = field_for(p, &pi);
    let mut want = TruncSeries::one(&f, 4);
    for i in 0..2 {
        for j in 0..2 {
            let ab = &alpha(&f, i) * &SatakeRat::var(&f, VarId::alpha_prime(j));
            want = want.mul(&TruncSeries::geometric(&ab, 4)).unwrap();
        }
    }
    assert_eq!(pi.rs_l_factor(&pi2, &f, 4).unwrap(), want);
}
