use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{FlagFunction, InducedData};
use crate::error::{Error, Result};
use crate::exactnum::CoeffValue;
use crate::padic::{for_each_gl, gl_order, in_k0, FlagSpace};

/// The operator `f ↦ ∫_{K_0(p^m)} ω^{-1}(k_nn) π(k)f dk` on vectors of table level `L`.
///
/// Stored as the matrix `P[y][x]` with `(Πf)(y) = Σ_x P[y][x] f(x)` over flag points.
#[derive(Clone, Debug)]
pub struct Projector {
    data: Arc<InducedData>,
    m: u32,
    space: Arc<FlagSpace>,
    entries: Vec<CoeffValue>,
}

impl Projector {
    pub fn new(data: &Arc<InducedData>, m: u32, max_cosets: u64) -> Result<Self> {
        let (p, n) = (data.p(), data.n());
        let level = m.max(data.min_level());
        let space = FlagSpace::cached(p, n, level)?;
        let len = space.len();
        let group = gl_order(p, n, level);
        let work = BigInt::from(len) * &group;
        if work > BigInt::from(max_cosets) {
            return Err(Error::Budget(format!(
                "projection at level {m} needs {work} group steps, budget is {max_cosets}"
            )));
        }
        let field = data.field();
        if m > 0 && m < data.central().conductor() {
            // k ↦ ω(k_nn) is not a character of K_0(p^m), so no vector transforms by it
            let entries = vec![CoeffValue::zero(field); len * len];
            return Ok(Projector { data: data.clone(), m, space, entries });
        }
        let d = data.order() as usize;
        let mut counts = vec![0u64; len * len * d];
        let mut k0 = 0u64;
        let pl = space.modulus();
        let mut z = vec![0u64; n * n];
        let mut err = None;
        for_each_gl(p, n, level, |k| {
            if err.is_some() || !in_k0(k, n, p, m) {
                return;
            }
            k0 += 1;
            let w = if m == 0 { 0 } else { (data.order() - data.omega_exp(k[n * n - 1])) % data.order() };
            for (yi, y) in space.points().enumerate() {
                crate::padic::modular::mat_mul_into(y, k, n, pl, &mut z);
                match space.canonicalize(&z) {
                    Ok(c) => {
                        let e = (w + data.diag_exp(&c.diag)) % data.order();
                        counts[(yi * len + c.index as usize) * d + e as usize] += 1;
                    }
                    Err(e) => err = Some(e),
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let inv = BigRational::new(BigInt::from(1), BigInt::from(k0));
        let entries = counts
            .chunks(d)
            .map(|cs| {
                let mut acc = CoeffValue::zero(field);
                for (e, &c) in cs.iter().enumerate() {
                    if c != 0 {
                        acc += &data.zeta(e as u64).scale_int(c as i64);
                    }
                }
                acc.scale(&inv)
            })
            .collect();
        Ok(Projector { data: data.clone(), m, space, entries })
    }

    /// The `K_0` level `m`.
    pub fn level(&self) -> u32 {
        self.m
    }

    /// Level of the flag tables the operator acts on.
    pub fn table_level(&self) -> u32 {
        self.space.level()
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn entry(&self, y: usize, x: usize) -> &CoeffValue {
        &self.entries[y * self.len() + x]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CoeffValue::is_zero)
    }

    fn pivot(&self) -> Option<(usize, usize)> {
        let i = self.entries.iter().position(|v| !v.is_zero())?;
        Some((i / self.len(), i % self.len()))
    }

    /// Whether the image is at most one-dimensional.
    pub fn is_rank_one(&self) -> bool {
        let Some((r0, c0)) = self.pivot() else {
            return true;
        };
        let len = self.len();
        let p00 = self.entry(r0, c0);
        (0..len).all(|y| {
            let pyc = self.entry(y, c0);
            (0..len).all(|x| self.entry(y, x) * p00 == pyc * self.entry(r0, x))
        })
    }

    /// `Π` applied to the indicator of flag point `x`.
    pub fn column(&self, x: usize) -> Result<FlagFunction> {
        let values = (0..self.len()).map(|y| self.entry(y, x).clone()).collect();
        FlagFunction::from_values(&self.data, self.table_level(), values)
    }

    /// A nonzero column, if the image is nonzero.
    pub fn nonzero_column(&self) -> Result<Option<FlagFunction>> {
        self.pivot().map(|(_, c)| self.column(c)).transpose()
    }

    pub fn apply(&self, f: &FlagFunction) -> Result<FlagFunction> {
        let l = self.table_level();
        let f = if f.level() >= l { f.average_down(l)? } else { f.raise(l)? };
        let field = self.data.field();
        let len = self.len();
        let mut values = Vec::with_capacity(len);
        for y in 0..len {
            let mut acc = CoeffValue::zero(field);
            for (x, fx) in f.values().iter().enumerate() {
                let pyx = self.entry(y, x);
                if !fx.is_zero() && !pyx.is_zero() {
                    acc += &(pyx * fx);
                }
            }
            values.push(acc);
        }
        Ok(FlagFunction::from_values(&self.data, l, values)?.with_scale(f.scale().clone()))
    }
}
