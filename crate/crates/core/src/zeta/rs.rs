use std::sync::Arc;

use super::ZetaReport;
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, SatakeRat, TruncSeries};
use crate::padic::modulus_exponent;
use crate::reps::LanglandsDatum;
use crate::whittaker::{spherical_whittaker_cs, WhittakerSpec};

/// Dominant `λ ∈ Z^k` with `λ_k ≥ 0` and `|λ| = v`, i.e. partitions of `v` into at most `k` parts.
fn partitions(v: u32, k: usize) -> Vec<Vec<i32>> {
    fn go(rest: u32, max: u32, left: usize, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if left == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in (0..=rest.min(max)).rev() {
            cur.push(part as i32);
            go(rest - part, part, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(v, v, k, &mut Vec::new(), &mut out);
    out
}

fn check_pair(pi: &LanglandsDatum, pi2: &LanglandsDatum, n2: usize) -> Result<()> {
    if !pi.is_spherical() || !pi2.is_spherical() {
        return Err(Error::Unsupported("the Rankin–Selberg integrals here are spherical only".into()));
    }
    if pi2.n() != n2 {
        return Err(Error::Validation(format!("partner must be a GL_{n2} datum, got GL_{}", pi2.n())));
    }
    if pi.prime() != pi2.prime() {
        return Err(Error::Validation("the two data live over different primes".into()));
    }
    Ok(())
}

fn report(
    pi: &LanglandsDatum,
    pi2: &LanglandsDatum,
    field: &Arc<CoeffField>,
    label: &str,
    lhs: Vec<SatakeRat>,
) -> Result<ZetaReport> {
    let t = lhs.len();
    let lhs = TruncSeries::from_coeffs(field, lhs, t);
    let rhs = pi.rs_l_factor(pi2, field, t)?;
    ZetaReport::compare(
        format!("{pi} × {pi2}"),
        serde_json::json!({ "pi": pi.to_json(), "pi_prime": pi2.to_json() }),
        label.to_string(),
        "torus",
        0,
        &lhs,
        &rhs,
    )
}

/// `Ψ(s, W, W') = ∫_{N\GL_{n-1}} W(diag(h,1)) W'(h) |det h|^{s-1/2} dh` for spherical `W`, `W'`
/// (`W'` built on `ψ̄`), against `L(s, π × π')`.
///
/// `corrupt` is a test hook that drops the Iwasawa Jacobian.
pub fn rs_integral_nn1_spherical(
    pi: &LanglandsDatum,
    pi2: &LanglandsDatum,
    field: &Arc<CoeffField>,
    t: usize,
    corrupt: bool,
) -> Result<ZetaReport> {
    let n = pi.n();
    if n < 2 {
        return Err(Error::Validation("the (n, n-1) integral needs n ≥ 2".into()));
    }
    check_pair(pi, pi2, n - 1)?;
    let w = WhittakerSpec::new(pi, false)?;
    let w2 = WhittakerSpec::new(pi2, true)?;
    let mut coeffs = Vec::with_capacity(t);
    for v in 0..t as u32 {
        let mut acc = SatakeRat::zero(field);
        for lam in partitions(v, n - 1) {
            let mut full = lam.clone();
            full.push(0);
            let a = spherical_whittaker_cs(&w, field, &full)?;
            let b = spherical_whittaker_cs(&w2, field, &lam)?;
            // δ_{n-1}^{-1}(ϖ^λ) from the Iwasawa measure, q^{v/2} from |det h|^{-1/2}
            let jac = CoeffValue::sqrtq_pow(field, 2 * modulus_exponent(&lam) + v as i64);
            let ab = &a * &b;
            acc = &acc + &if corrupt { ab } else { ab.scale(&jac) };
        }
        coeffs.push(acc);
    }
    report(pi, pi2, field, "rs(n,n-1)", coeffs)
}

/// `Ψ(s, W, W', Φ°) = ∫_{N\GL_n} W(g) W'(g) Φ°(e_n g) |det g|^s dg` with `Φ° = 1_{O^n}`.
///
/// On `g = u·ϖ^λ·k` the row `e_n g = ϖ^{λ_n} e_n k` is `ϖ^{λ_n}` times a primitive vector, so
/// `Φ°` only sees `λ_n ≥ 0`.
pub fn rs_integral_nn_spherical(
    pi: &LanglandsDatum,
    pi2: &LanglandsDatum,
    field: &Arc<CoeffField>,
    t: usize,
    corrupt: bool,
) -> Result<ZetaReport> {
    let n = pi.n();
    check_pair(pi, pi2, n)?;
    let w = WhittakerSpec::new(pi, false)?;
    let w2 = WhittakerSpec::new(pi2, true)?;
    let mut coeffs = Vec::with_capacity(t);
    for v in 0..t as u32 {
        let mut acc = SatakeRat::zero(field);
        for lam in partitions(v, n) {
            let a = spherical_whittaker_cs(&w, field, &lam)?;
            let b = spherical_whittaker_cs(&w2, field, &lam)?;
            let jac = CoeffValue::sqrtq_pow(field, 2 * modulus_exponent(&lam));
            let ab = &a * &b;
            acc = &acc + &if corrupt { ab } else { ab.scale(&jac) };
        }
        coeffs.push(acc);
    }
    report(pi, pi2, field, "rs(n,n)", coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_four() {
        assert_eq!(partitions(4, 2), vec![vec![4, 0], vec![3, 1], vec![2, 2]]);
        assert_eq!(partitions(3, 3).len(), 3);
        assert_eq!(partitions(0, 2), vec![vec![0, 0]]);
    }
}
