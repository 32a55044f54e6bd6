use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use num_bigint::BigInt;
use num_rational::BigRational;

use gj_core::padic::hermite_count;
use gj_core::reps::Alphabet;
use gj_core::whittaker::{schur_bialternant, schur_jacobi_trudi, spherical_whittaker_cs, WhittakerSpec};
use gj_core::zeta::iwasawa_shell_volume;
use gj_core::{
    CoeffField, CoeffValue, LanglandsDatum, PadicMatrix, PadicScalar, SatakeRat, Session, TruncSeries, VarId,
};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn field() -> &'static Arc<CoeffField> {
    static F: OnceLock<Arc<CoeffField>> = OnceLock::new();
    F.get_or_init(|| Session::new(3, &[2], 2).unwrap().field().clone())
}

fn small_coeff() -> impl Strategy<Value = CoeffValue> {
    (-5i64..=5, 1i64..=4, -3i64..=3).prop_map(|(n, d, s)| {
        let f = field();
        &CoeffValue::from_frac(f, n, d) + &CoeffValue::sqrtq(f).scale_int(s)
    })
}

fn small_satake() -> impl Strategy<Value = SatakeRat> {
    (small_coeff(), 0i32..3, -1i32..3).prop_map(|(c, e1, e2)| {
        let f = field();
        let a = SatakeRat::var(f, VarId::alpha(0)).pow(e1).unwrap();
        let b = SatakeRat::var(f, VarId::alpha(1)).pow(e2).unwrap();
        &(&a * &b).scale(&c) + &SatakeRat::one(f)
    })
}

fn nonsingular(p: u64, n: usize) -> impl Strategy<Value = PadicMatrix> {
    proptest::collection::vec(-20i64..20, n * n)
        .prop_map(move |v| PadicMatrix::from_ints(p, n, n, &v).unwrap())
        .prop_filter("nonsingular", |g| g.det_valuation().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coeff_field_axioms(a in small_coeff(), b in small_coeff(), c in small_coeff()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn satake_division_roundtrip(a in small_satake(), b in small_satake()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(&a.div(&b).unwrap() * &b, a);
    }

    #[test]
    fn series_inverse(a in small_satake(), t in 1usize..6) {
        let f = field();
        let s = TruncSeries::one_minus(&a, t);
        prop_assert_eq!(s.mul(&s.inv().unwrap()).unwrap(), TruncSeries::one(f, t));
        prop_assert_eq!(s.inv().unwrap(), TruncSeries::geometric(&a, t));
    }

    #[test]
    fn series_json_roundtrip(a in small_satake(), b in small_satake()) {
        let f = field();
        let s = TruncSeries::geometric(&a, 3).mul(&TruncSeries::one_minus(&b, 3)).unwrap();
        prop_assert_eq!(TruncSeries::from_json(f, &s.to_json()).unwrap(), s);
    }

    #[test]
    fn padic_scalar_matches_integers(pi in 0usize..4, x in -10_000i64..10_000, y in -10_000i64..10_000) {
        let p = PRIMES[pi];
        let (a, b) = (PadicScalar::from_int(p, x, 20), PadicScalar::from_int(p, y, 20));
        prop_assert!(a.add(&b).congruent(&PadicScalar::from_int(p, x + y, 20)));
        prop_assert!(a.mul(&b).congruent(&PadicScalar::from_int(p, x * y, 20)));
        if x != 0 && y != 0 {
            let (vx, vy) = (a.valuation().unwrap().unwrap(), b.valuation().unwrap().unwrap());
            prop_assert_eq!(a.mul(&b).valuation().unwrap(), Some(vx + vy));
            prop_assert!(a.mul(&b).div(&b).unwrap().congruent(&a));
        }
    }

    #[test]
    fn matrix_inverse_and_divisors(g in (0usize..3).prop_flat_map(|i| nonsingular(PRIMES[i], 2))) {
        let p = g.prime();
        let id = PadicMatrix::identity(p, 2);
        prop_assert!(g.mul(&g.inverse().unwrap()).unwrap().congruent(&id));
        let divisors = g.elementary_divisors().unwrap();
        prop_assert_eq!(divisors.iter().sum::<i32>(), g.det_valuation().unwrap());
        prop_assert!(divisors.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn iwasawa_reconstructs(g in (0usize..3).prop_flat_map(|i| nonsingular(PRIMES[i], 3))) {
        let p = g.prime();
        let iw = g.iwasawa_decompose().unwrap();
        let back = iw.u.mul(&PadicMatrix::diag_pows(p, &iw.a)).unwrap().mul(&iw.k).unwrap();
        prop_assert!(back.congruent(&g));
        prop_assert_eq!(iw.a.iter().sum::<i32>(), g.det_valuation().unwrap());
        prop_assert_eq!(iw.k.det_valuation().unwrap(), 0);
    }

    #[test]
    fn shell_volumes_agree(pi in 0usize..3, n in 1usize..4, v in 0u32..4) {
        let p = PRIMES[pi];
        let count = BigRational::from_integer(BigInt::from(hermite_count(p, n, v)));
        prop_assert_eq!(iwasawa_shell_volume(p, n, v), count);
    }

    #[test]
    fn schur_two_ways(l in proptest::collection::vec(-2i32..4, 1..4)) {
        let mut lam = l.clone();
        lam.sort_unstable_by(|a, b| b.cmp(a));
        let f = field();
        prop_assert_eq!(schur_bialternant(f, &lam).unwrap(), schur_jacobi_trudi(f, &lam).unwrap());
    }

    #[test]
    fn whittaker_central_shift(l1 in -3i32..4, l2 in -3i32..4, m in -2i32..3) {
        let f = field();
        let d = LanglandsDatum::from_names(3, &["unram", "unram"], Alphabet::Main).unwrap();
        let spec = WhittakerSpec::new(&d, false).unwrap();
        let w = spherical_whittaker_cs(&spec, f, &[l1, l2]).unwrap();
        if l1 < l2 {
            prop_assert!(w.is_zero());
        }
        let shifted = spherical_whittaker_cs(&spec, f, &[l1 + m, l2 + m]).unwrap();
        let central = (&SatakeRat::var(f, VarId::alpha(0)) * &SatakeRat::var(f, VarId::alpha(1))).pow(m).unwrap();
        prop_assert_eq!(shifted, &central * &w);
    }
}
