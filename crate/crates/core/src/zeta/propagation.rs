use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::chars::AddChar;
use crate::error::{Error, Result};
use crate::exactnum::{rational_string, CoeffField, CoeffValue, SatakeRat};
use crate::padic::{modulus_sqrt, PadicMatrix, PadicScalar};
use crate::whittaker::{schur_bialternant, substitute};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationStatus {
    Pass,
    Fail,
    /// The tail majorant could not be pushed below the bound within the term budget.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub alpha: Vec<String>,
    pub g: Vec<Vec<String>>,
    pub lhs: String,
    pub rhs_partial: String,
    /// `h`-shells summed: `v(h) = k` for `k_min ≤ k ≤ k_max`.
    pub k_min: i32,
    pub k_max: i32,
    /// Whether the `h`-sum is finite and was summed completely.
    pub exact: bool,
    pub tail_majorant: String,
    pub tail_bound: String,
    /// Upper bound for `|LHS − RHS_partial|`.
    pub gap: String,
    pub status: PropagationStatus,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.status == PropagationStatus::Pass
    }
}

/// One column `j` of `(1 v)·g ∈ p^k`: `g_1j + v g_2j ∈ p^k`.
enum Column {
    /// `g_2j = 0`, so the condition is `k ≤ v(g_1j)`.
    Cap(i32),
    /// `v ∈ c + p^{k - s}`.
    Ball { center: PadicScalar, shift: i32 },
}

fn val(x: &PadicScalar) -> Result<Option<i32>> {
    x.valuation()
}

/// Checks the GL_2 propagation identity for `W'°` at `g` with specialized rational Satake
/// parameters `α' = (α'_1, α'_2)`.
///
/// With `h = ϖ^k·u` the `GL_1` integral becomes a sum over `k` of `(α'_2/α'_1 · q)^k` times
/// `∫ 1[(1 v)g ∈ p^k] ψ(v) dv`, an integral of `ψ` over a single ball (or empty). The sum is
/// finite when a column of `g` has vanishing second entry, and geometric otherwise.
///
/// `corrupt` is a test hook that shrinks every `v`-ball volume by `q^{-1}`.
#[allow(clippy::too_many_arguments)]
pub fn propagation_check(
    alpha: &[BigRational],
    g: &PadicMatrix,
    tail_bound: &BigRational,
    psi: &AddChar,
    field: &Arc<CoeffField>,
    max_terms: usize,
    corrupt: bool,
) -> Result<PropagationReport> {
    if alpha.len() != 2 || g.rows() != 2 || g.cols() != 2 {
        return Err(Error::Unsupported("the propagation check is implemented for GL_2".into()));
    }
    if alpha.iter().any(Zero::is_zero) {
        return Err(Error::Validation("Satake parameters must be nonzero".into()));
    }
    if !tail_bound.is_positive() {
        return Err(Error::Validation("tail bound must be positive".into()));
    }
    let p = g.prime();
    let q = BigRational::from_integer(BigInt::from(p));
    let rho = &alpha[1] / &alpha[0];

    // LHS: W'° ∈ W(π', ψ̄) through its Iwasawa torus part
    let iw = g.iwasawa_decompose()?;
    let lam = iw.a.clone();
    let lhs = if lam[0] < lam[1] {
        CoeffValue::zero(field)
    } else {
        let vals: Vec<SatakeRat> =
            alpha.iter().map(|a| SatakeRat::constant(CoeffValue::from_rational(field, a.clone()))).collect();
        let s = substitute(&schur_bialternant(field, &lam)?, &vals)?
            .as_constant()
            .ok_or_else(|| Error::Validation("specialized Whittaker value is not a constant".into()))?;
        let phase = psi.conjugate().eval(field, iw.u.get(0, 1))?;
        &(&s * &modulus_sqrt(field, &lam)) * &phase
    };

    // RHS
    let d = g.det_valuation()?;
    let mut cols = Vec::new();
    for j in 0..2 {
        let (top, bottom) = (g.get(0, j), g.get(1, j));
        match val(bottom)? {
            None => match val(top)? {
                Some(v) => cols.push(Column::Cap(v)),
                None => return Err(Error::Validation("g is singular".into())),
            },
            Some(s) => cols.push(Column::Ball { center: top.div(bottom)?.neg(), shift: s }),
        }
    }
    let cap = cols.iter().filter_map(|c| if let Column::Cap(v) = c { Some(*v) } else { None }).min();
    let k_min = cols
        .iter()
        .filter_map(|c| if let Column::Ball { shift, .. } = c { Some(*shift) } else { None })
        .min()
        .expect("a nonsingular g has a nonzero bottom entry");
    if cap.is_none() && rho.abs() >= BigRational::one() {
        return Err(Error::Validation(format!(
            "the h-sum diverges for |α'_2/α'_1| = {} ≥ 1",
            rational_string(&rho.abs())
        )));
    }

    let prefactor = CoeffValue::sqrtq_pow(field, -(d as i64)).scale(&alpha[0].pow(d));
    // |q^{-d/2}| ≤ q^{-⌊d/2⌋}
    let prefactor_abs = alpha[0].abs().pow(d) * q.pow(-d.div_euclid(2));
    // for an uncapped sum, |term_k| ≤ |ρ|^k q^{k_min}
    let majorant = |k_last: i32| -> BigRational {
        &prefactor_abs * q.pow(k_min) * rho.abs().pow(k_last + 1) / (BigRational::one() - rho.abs())
    };

    let mut k_max = k_min - 1;
    let mut terms = 0usize;
    let mut partial = CoeffValue::zero(field);
    let exhausted = |k: i32| cap.is_some_and(|c| k > c);
    while !exhausted(k_max + 1) && (cap.is_some() || majorant(k_max) > *tail_bound) {
        if terms == max_terms {
            break;
        }
        let k = k_max + 1;
        if let Some(ik) = ball_integral(&cols, k, &q, psi, field, corrupt)? {
            let w = rho.pow(k) * q.pow(k);
            partial += &ik.scale(&w);
        }
        k_max = k;
        terms += 1;
    }
    let rhs = &prefactor * &partial;
    let tail = if exhausted(k_max + 1) {
        Some(BigRational::zero())
    } else if cap.is_none() {
        Some(majorant(k_max))
    } else {
        None
    };
    let gap = (&lhs - &rhs).abs_upper_bound();
    let status = if tail.as_ref().is_none_or(|t| t > tail_bound) {
        PropagationStatus::Inconclusive
    } else if gap <= *tail_bound {
        PropagationStatus::Pass
    } else {
        PropagationStatus::Fail
    };
    Ok(PropagationReport {
        alpha: alpha.iter().map(rational_string).collect(),
        g: g.to_strings(),
        lhs: lhs.to_string(),
        rhs_partial: rhs.to_string(),
        k_min,
        k_max,
        exact: tail.as_ref().is_some_and(Zero::is_zero),
        tail_majorant: tail.as_ref().map_or_else(|| "unbounded".into(), rational_string),
        tail_bound: rational_string(tail_bound),
        gap: rational_string(&gap),
        status,
    })
}

/// `∫_{F} 1[(1 v)g ∈ p^k] ψ(v) dv`, or `None` when the set is empty or `ψ` integrates to zero.
fn ball_integral(
    cols: &[Column],
    k: i32,
    q: &BigRational,
    psi: &AddChar,
    field: &Arc<CoeffField>,
    corrupt: bool,
) -> Result<Option<CoeffValue>> {
    let mut ball: Option<(&PadicScalar, i32)> = None;
    for c in cols {
        match c {
            Column::Cap(v) if k > *v => return Ok(None),
            Column::Cap(_) => {}
            Column::Ball { center, shift } => {
                let r = k - shift;
                ball = match ball {
                    None => Some((center, r)),
                    Some((c0, r0)) => {
                        // two balls meet iff their centers are within the larger radius
                        let close = match val(&c0.sub(center))? {
                            None => true,
                            Some(v) => v >= r0.min(r),
                        };
                        if !close {
                            return Ok(None);
                        }
                        Some(if r > r0 { (center, r) } else { (c0, r0) })
                    }
                };
            }
        }
    }
    let Some((center, r)) = ball else {
        return Err(Error::Validation("no column constrains v".into()));
    };
    if r < 0 {
        // ψ is nontrivial on p^r
        return Ok(None);
    }
    let phase = psi.eval(field, center)?;
    let vol = if corrupt { q.pow(-r - 1) } else { q.pow(-r) };
    Ok(Some(phase.scale(&vol)))
}
