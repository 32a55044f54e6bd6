//! Shared fixtures for the benchmarks.

use gj_core::reps::Alphabet;
use gj_core::{LanglandsDatum, Newform, Session};

/// A session over `Q_p` wide enough for the quadratic battery.
pub fn session(p: u64) -> Session {
    Session::new(p, &[2], 2).expect("valid prime")
}

pub fn datum(p: u64, names: &[&str]) -> LanglandsDatum {
    LanglandsDatum::from_names(p, names, Alphabet::Main).expect("known character names")
}

pub fn newform(s: &Session, names: &[&str]) -> Newform {
    Newform::new(&datum(s.p(), names), s.field(), s.budget()).expect("newform within default budget")
}
