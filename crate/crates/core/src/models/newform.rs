use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::flagfn::det_valuation;
use super::{exps, FlagFunction, InducedData, Projector};
use crate::error::{Error, Result};
use crate::exactnum::{CoeffField, CoeffValue, LaurentPoly, Monomial, SatakeRat};
use crate::padic::modular::{iwasawa_mod, mat_mul_into, MAX_N};
use crate::padic::{FlagSpace, PadicMatrix};
use crate::reps::LanglandsDatum;
use crate::session::Budget;

/// One level of the conductor search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStep {
    pub level: u32,
    pub nonzero: bool,
    pub rank_one: bool,
}

/// Projects onto `K_0(p^m)`-fixed vectors for `m = 0, 1, …` until the image is nonzero.
pub fn conductor_search(data: &Arc<InducedData>, budget: Budget) -> Result<(Vec<SearchStep>, Projector)> {
    let mut steps = Vec::new();
    for m in 0..=budget.max_level {
        let proj = Projector::new(data, m, budget.max_cosets)?;
        let nonzero = !proj.is_zero();
        steps.push(SearchStep { level: m, nonzero, rank_one: proj.is_rank_one() });
        if nonzero {
            return Ok((steps, proj));
        }
    }
    Err(Error::Budget(format!("no K_0-fixed vector up to level {}", budget.max_level)))
}

/// The newform `v°` of `Ind(χ)` with its dual `ṽ°` in `Ind(χ^{-1})`, normalized so that
/// `⟨v°, ṽ°⟩ = 1`.
#[derive(Clone, Debug)]
pub struct Newform {
    data: Arc<InducedData>,
    dual: Arc<InducedData>,
    conductor: u32,
    steps: Vec<SearchStep>,
    projector: Projector,
    dual_projector: Projector,
    v: FlagFunction,
    vt: FlagFunction,
}

impl Newform {
    pub fn new(datum: &LanglandsDatum, field: &Arc<CoeffField>, budget: Budget) -> Result<Self> {
        let data = InducedData::new(datum, field)?;
        let dual = data.dual()?;
        let (steps, projector, dual_projector, conductor) = if datum.n() == 1 {
            // GL_1: every vector is K_0-fixed up to ω, the conductor is that of χ
            let c = datum.max_char_conductor();
            let pr = Projector::new(&data, c, budget.max_cosets)?;
            let dp = Projector::new(&dual, c, budget.max_cosets)?;
            (vec![SearchStep { level: c, nonzero: true, rank_one: true }], pr, dp, c)
        } else {
            let (steps, pr) = conductor_search(&data, budget)?;
            let c = pr.level();
            let dp = Projector::new(&dual, c, budget.max_cosets)?;
            (steps, pr, dp, c)
        };
        if conductor != datum.predicted_conductor() {
            return Err(Error::Validation(format!(
                "K_0 search found conductor {conductor}, the characters predict {}",
                datum.predicted_conductor()
            )));
        }
        if !projector.is_rank_one() || !dual_projector.is_rank_one() {
            return Err(Error::Validation(format!("K_0(p^{conductor})-fixed space is not one-dimensional")));
        }
        let v = projector.nonzero_column()?.ok_or_else(|| Error::Validation("newform projection vanishes".into()))?;
        let vt = dual_projector
            .nonzero_column()?
            .ok_or_else(|| Error::Validation("dual newform projection vanishes".into()))?;
        let pairing = v
            .pairing(&vt)?
            .as_constant()
            .ok_or_else(|| Error::Unsupported("newform pairing is not a constant".into()))?;
        if pairing.is_zero() {
            return Err(Error::Validation("newform pairs to zero with its dual".into()));
        }
        let v = v.scaled(&pairing.inv()?);
        Ok(Newform { data, dual, conductor, steps, projector, dual_projector, v, vt })
    }

    pub fn data(&self) -> &Arc<InducedData> {
        &self.data
    }

    pub fn dual_data(&self) -> &Arc<InducedData> {
        &self.dual
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        self.data.field()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Table level `c' = max(c, 1)` of `v°` and `ṽ°`.
    pub fn level(&self) -> u32 {
        self.v.level()
    }

    pub fn search_steps(&self) -> &[SearchStep] {
        &self.steps
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn dual_projector(&self) -> &Projector {
        &self.dual_projector
    }

    pub fn vector(&self) -> &FlagFunction {
        &self.v
    }

    pub fn dual_vector(&self) -> &FlagFunction {
        &self.vt
    }

    /// The matrix coefficient `β(g) = ⟨π(g)v°, ṽ°⟩`, certified by agreement at two levels.
    pub fn beta(&self, g: &PadicMatrix) -> Result<SatakeRat> {
        let n = self.data.n();
        if g.rows() != n || g.cols() != n {
            return Err(Error::Validation("matrix size does not match the datum".into()));
        }
        let (e, avail, y) = g.integral_form()?;
        let d = det_valuation(&y, n, self.data.p(), avail)?;
        let level = self.level() + d;
        if avail < level + 1 {
            return Err(Error::Precision(format!(
                "matrix coefficient needs g mod p^{} (scaled), have p^{avail}",
                level + 1
            )));
        }
        let b0 = self.beta_integral(&y, level)?;
        let b1 = self.beta_integral(&y, level + 1)?;
        if b0 != b1 {
            return Err(Error::Stabilization(format!("β differs at flag levels {level} and {}", level + 1)));
        }
        let omega = self.data.central().uniformizer_power(self.field(), e);
        Ok(&omega * &b0)
    }

    /// `avg_{x ∈ flag(L)} v°(x y) ṽ°(x)` for integral `y` with `L ≥ c' + v(det y)`.
    pub fn beta_integral(&self, y: &[u64], level: u32) -> Result<SatakeRat> {
        let (p, n) = (self.data.p(), self.data.n());
        let space = FlagSpace::cached(p, n, level)?;
        let coarse = self.vt.space();
        let red = space.reduction_map(coarse)?;
        let d = self.data.order();
        let mut counts: HashMap<([u32; MAX_N], u64, u32, u32), u64> = HashMap::new();
        let mut z = vec![0u64; n * n];
        for (x, rx) in space.points().zip(&red) {
            if self.vt.values()[rx.index as usize].is_zero() {
                continue;
            }
            mat_mul_into(x, y, n, space.modulus(), &mut z);
            let iw = iwasawa_mod(&z, n, p, level)?;
            if iw.prec < self.level() {
                return Err(Error::Precision(format!("flag level {level} too low for v(det) of the argument")));
            }
            let c = self.v.space().canonicalize(&iw.k)?;
            let ex = (self.data.diag_exp(&c.diag) + self.dual.diag_exp(&rx.diag)) % d;
            *counts.entry((iw.a, ex, c.index, rx.index)).or_insert(0) += 1;
        }
        let field = self.field();
        let mut by_mono: HashMap<Monomial, CoeffValue> = HashMap::new();
        let mut keys: Vec<_> = counts.into_iter().collect();
        keys.sort();
        for ((a, ex, i, j), cnt) in keys {
            let vi = &self.v.values()[i as usize];
            if vi.is_zero() {
                continue;
            }
            let (mono, t) = self.data.torus(&exps(&a, 0, n));
            let term = &(&(&t * self.data.zeta(ex)) * &(vi * &self.vt.values()[j as usize])).scale_int(cnt as i64);
            let slot = by_mono.entry(mono).or_insert_with(|| CoeffValue::zero(field));
            *slot += term;
        }
        let inv = BigRational::new(BigInt::from(1), BigInt::from(space.len()));
        let mut poly = LaurentPoly::zero(field);
        for (m, c) in by_mono {
            poly.add_term(m, &c.scale(&inv));
        }
        Ok(&SatakeRat::from_poly(poly) * &(self.v.scale() * self.vt.scale()))
    }

    /// `{"conductor", "level", "v", "v_dual"}` for inspection.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "datum": self.data.datum().to_json(),
            "conductor": self.conductor,
            "level": self.level(),
            "search": self.steps,
            "v": self.v.to_json(),
            "v_dual": self.vt.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::VarId;
    use crate::reps::{battery, Alphabet};

    fn field(p: u64) -> Arc<CoeffField> {
        CoeffField::new(4, p).unwrap()
    }

    #[test]
    fn battery_conductors_and_unit_value() {
        for p in [2, 3] {
            let f = field(p);
            for (name, d) in battery(p).unwrap() {
                let nf = Newform::new(&d, &f, Budget::default()).unwrap_or_else(|e| panic!("{name} at p={p}: {e}"));
                assert_eq!(nf.conductor(), d.predicted_conductor(), "{name} at p={p}");
                let one = nf.beta(&PadicMatrix::identity(p, 2)).unwrap();
                assert_eq!(one, SatakeRat::one(&f), "{name} at p={p}");
            }
        }
    }

    #[test]
    fn spherical_coefficient_matches_macdonald() {
        let p = 3;
        let f = field(p);
        let d = LanglandsDatum::from_names(p, &["unram", "unram"], Alphabet::Main).unwrap();
        let nf = Newform::new(&d, &f, Budget::default()).unwrap();
        let b = nf.beta(&PadicMatrix::diag_pows(p, &[1, 0])).unwrap();
        let a = &SatakeRat::var(&f, VarId::alpha(0)) + &SatakeRat::var(&f, VarId::alpha(1));
        let c = &CoeffValue::sqrtq_pow(&f, -1) * &CoeffValue::from_frac(&f, 3, 4);
        assert_eq!(b, a.scale(&c));
    }

    #[test]
    fn projection_is_idempotent() {
        let f = field(3);
        let d = LanglandsDatum::from_names(3, &["quad", "unram"], Alphabet::Main).unwrap();
        let nf = Newform::new(&d, &f, Budget::default()).unwrap();
        let v = nf.vector();
        let pv = nf.projector().apply(v).unwrap();
        assert!(v.table_eq(&pv));
    }

    #[test]
    fn gl1_conductor_is_character_conductor() {
        let f = field(3);
        let d = LanglandsDatum::from_names(3, &["quad"], Alphabet::Main).unwrap();
        let nf = Newform::new(&d, &f, Budget::default()).unwrap();
        assert_eq!(nf.conductor(), 1);
    }
}
