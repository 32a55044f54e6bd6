//! Per-run configuration: the prime, the coefficient field and computation budgets.

use std::sync::Arc;

use num_integer::Integer;

use crate::chars::AddChar;
use crate::error::{Error, Result};
use crate::exactnum::CoeffField;
use crate::padic::modular::pow;

/// Budgets that turn runaway enumerations into clean errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest flag/coset level any search may reach.
    pub max_level: u32,
    /// Largest number of group elements or residue classes a single sum may visit.
    pub max_cosets: u64,
    /// Worker threads for shell and coset sums.
    pub threads: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_level: 8, max_cosets: 50_000_000, threads: 1 }
    }
}

/// Fixes `p` and the field `Q(ζ_M)(√p)` used by every value of a run.
///
/// `M` is the lcm of the character orders and `p^B`, where `B` is the deepest
/// level at which the additive character is evaluated.
#[derive(Clone, Debug)]
pub struct Session {
    p: u64,
    depth: u32,
    field: Arc<CoeffField>,
    budget: Budget,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Session {
    pub fn new(p: u64, char_orders: &[u64], depth: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Validation(format!("{p} is not prime")));
        }
        let mut m = pow(p, depth);
        for &d in char_orders {
            if d == 0 {
                return Err(Error::Validation("character order must be positive".into()));
            }
            m = m.lcm(&d);
        }
        let m = u32::try_from(m).map_err(|_| Error::Budget(format!("root-of-unity order {m} is too large")))?;
        if m > 4096 {
            return Err(Error::Budget(format!("root-of-unity order {m} is too large")));
        }
        Ok(Session { p, depth, field: CoeffField::new(m, p)?, budget: Budget::default() })
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn field(&self) -> &Arc<CoeffField> {
        &self.field
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn psi(&self) -> AddChar {
        AddChar::new(self.p, self.depth)
    }

    /// Errors unless `count` fits the coset budget.
    pub fn check_cosets(&self, what: &str, count: f64) -> Result<()> {
        if count > self.budget.max_cosets as f64 {
            return Err(Error::Budget(format!(
                "{what} needs about {count:.3e} terms, budget is {}",
                self.budget.max_cosets
            )));
        }
        Ok(())
    }

    pub fn check_level(&self, what: &str, level: u32) -> Result<()> {
        if level > self.budget.max_level {
            return Err(Error::Budget(format!("{what} needs level {level}, budget is {}", self.budget.max_level)));
        }
        Ok(())
    }
}

/// Maps `f` over `items` on up to `threads` scoped workers, preserving order.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order_is_lcm() {
        let s = Session::new(3, &[2, 4], 1).unwrap();
        assert_eq!(s.field().order(), 12);
        assert!(Session::new(4, &[], 0).is_err());
        assert_eq!(Session::new(2, &[], 0).unwrap().field().order(), 1);
    }
}
