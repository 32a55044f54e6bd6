use num_bigint::BigInt;
use num_rational::BigRational;

use gj_core::reps::{battery, Alphabet};
use gj_core::session::Budget;
use gj_core::zeta::{
    conductor_check, gj_spherical, main_theorem, measure_anchor_check, phi_invariance_check, projection_identity_check,
    propagation_check, rs_integral_nn1_spherical, rs_integral_nn_spherical, strategy_equivalence,
    whittaker_oracle_check, PropagationStatus, Strategy,
};
use gj_core::{Error, LanglandsDatum, Newform, PadicMatrix, Session};

fn session(p: u64) -> Session {
    Session::new(p, &[2], 2).unwrap()
}

fn datum(p: u64, names: &[&str]) -> LanglandsDatum {
    LanglandsDatum::from_names(p, names, Alphabet::Main).unwrap()
}

#[test]
fn corruption_flips_every_zeta_check() {
    for p in [2, 3] {
        let s = session(p);
        let (f, b) = (s.field(), s.budget());
        let d = datum(p, &["quad", "unram"]);
        let sph = datum(p, &["unram", "unram"]);
        let one = LanglandsDatum::from_names(p, &["unram"], Alphabet::Partner).unwrap();
        let two = LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Partner).unwrap();
        for corrupt in [false, true] {
            let want = !corrupt;
            assert_eq!(main_theorem(&d, f, 3, Strategy::Hermite, &b, corrupt).unwrap().equal, want);
            assert_eq!(gj_spherical(&sph, f, 3, Strategy::Brute, &b, corrupt).unwrap().equal, want);
            assert_eq!(rs_integral_nn1_spherical(&sph, &one, f, 3, corrupt).unwrap().equal, want);
            assert_eq!(rs_integral_nn_spherical(&sph, &two, f, 3, corrupt).unwrap().equal, want);
            assert_eq!(strategy_equivalence(&d, f, 2, &b, corrupt).unwrap().equal, want);
        }
    }
}

#[test]
fn corruption_flips_every_sampled_check() {
    for p in [2, 3] {
        let s = session(p);
        let d = datum(p, &["quad", "unram"]);
        let nf = Newform::new(&d, s.field(), s.budget()).unwrap();
        for corrupt in [false, true] {
            let want = !corrupt;
            assert_eq!(phi_invariance_check(nf.data(), nf.conductor(), 20, 1, corrupt).unwrap().ok, want);
            assert_eq!(projection_identity_check(&nf, 10, 1, corrupt).unwrap().ok, want);
            assert_eq!(conductor_check(&d, s.field(), s.budget(), 4, 1, corrupt).unwrap().ok, want);
            assert_eq!(whittaker_oracle_check(p, s.field(), 2, corrupt).unwrap().ok, want);
        }
    }
}

#[test]
fn sampled_checks_are_seed_deterministic() {
    let s = session(3);
    let d = datum(3, &["quad", "unram"]);
    let nf = Newform::new(&d, s.field(), s.budget()).unwrap();
    let a = serde_json::to_string(&projection_identity_check(&nf, 8, 42, false).unwrap()).unwrap();
    let b = serde_json::to_string(&projection_identity_check(&nf, 8, 42, false).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn propagation_diagonal_sums_are_finite() {
    let s = session(3);
    let alpha = [BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into())];
    let bound = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    for g in [[1, 0, 0, 1], [3, 0, 0, 1], [9, 0, 0, 1], [1, 0, 0, 3]] {
        let gm = PadicMatrix::from_ints(3, 2, 2, &g).unwrap();
        let r = propagation_check(&alpha, &gm, &bound, &s.psi(), s.field(), 1000, false).unwrap();
        assert_eq!(r.status, PropagationStatus::Pass, "{g:?}");
        assert!(r.exact, "{g:?}");
        let bad = propagation_check(&alpha, &gm, &bound, &s.psi(), s.field(), 1000, true).unwrap();
        // diag(1, ϖ) has W'° = 0 on both sides, so the corrupted volume cannot show
        if g != [1, 0, 0, 3] {
            assert_eq!(bad.status, PropagationStatus::Fail, "{g:?}");
        }
    }
}

#[test]
fn propagation_geometric_tail_needs_terms() {
    let s = session(3);
    let alpha = [BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 3.into())];
    let bound = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let g = PadicMatrix::from_ints(3, 2, 2, &[1, -2, 3, 1]).unwrap();
    let r = propagation_check(&alpha, &g, &bound, &s.psi(), s.field(), 2, false).unwrap();
    assert_eq!(r.status, PropagationStatus::Inconclusive);
    let r = propagation_check(&alpha, &g, &bound, &s.psi(), s.field(), 1000, false).unwrap();
    assert_eq!(r.status, PropagationStatus::Pass);
    assert!(!r.exact);
    // |α'_2/α'_1| ≥ 1 diverges
    let swapped = [alpha[1].clone(), alpha[0].clone()];
    assert!(propagation_check(&swapped, &g, &bound, &s.psi(), s.field(), 1000, false).is_err());
}

#[test]
fn measure_anchors_hold() {
    for (p, n, v) in [(2, 2, 2), (3, 2, 2), (2, 3, 1)] {
        let r = measure_anchor_check(p, n, v).unwrap();
        assert!(r.ok, "{:?}", r.failures);
    }
    assert!(matches!(measure_anchor_check(3, 3, 2), Err(Error::Budget(_))));
}

#[test]
fn battery_conductors() {
    let s = session(3);
    let got: Vec<u32> =
        battery(3).unwrap().iter().map(|(_, d)| Newform::new(d, s.field(), s.budget()).unwrap().conductor()).collect();
    assert_eq!(got, [0, 1, 2]);
}

#[test]
fn tiny_budgets_fail_cleanly() {
    let s = session(3);
    let d = datum(3, &["quad", "quad"]);
    let tight = Budget { max_cosets: 50, ..Budget::default() };
    assert!(matches!(Newform::new(&d, s.field(), tight), Err(Error::Budget(_))));
    let shallow = Budget { max_level: 1, ..Budget::default() };
    assert!(Newform::new(&d, s.field(), shallow).is_err());
}
