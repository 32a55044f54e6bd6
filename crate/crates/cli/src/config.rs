use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gj_core::exactnum::parse_rational;
use gj_core::reps::{Alphabet, LanglandsDatum};
use gj_core::session::{Budget, Session};
use gj_core::zeta::Strategy;
use gj_core::Error;

/// Everything that determines a run. Reports embed a hash of this.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub p: u64,
    pub n: Option<usize>,
    /// Character names (`quad`, `unram`, optionally `:<uniformizer>`); empty means the default for the target.
    pub chars: Vec<String>,
    /// Partner characters for Rankin–Selberg targets; default all unramified.
    pub partner: Vec<String>,
    #[serde(rename = "T")]
    pub truncation: usize,
    pub strategy: String,
    pub max_level: u32,
    pub max_cosets: u64,
    /// Additive-character depth of the coefficient field.
    pub depth: u32,
    pub tail_bound: String,
    pub max_terms: usize,
    pub seed: u64,
    pub samples: Option<usize>,
    /// Row-major integer matrices (`--g`), one per entry.
    pub g: Vec<Vec<i64>>,
    /// Rational Satake parameters for the propagation check.
    pub alpha: Vec<String>,
    /// Dominant weight for `compute whittaker`.
    pub lambda: Vec<i32>,
    pub corrupt: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        let budget = Budget::default();
        SessionConfig {
            p: 3,
            n: None,
            chars: Vec::new(),
            partner: Vec::new(),
            truncation: 4,
            strategy: "hermite".into(),
            max_level: budget.max_level,
            max_cosets: budget.max_cosets,
            depth: 2,
            tail_bound: "1/1000000".into(),
            max_terms: 10_000,
            seed: 0,
            samples: None,
            g: Vec::new(),
            alpha: Vec::new(),
            lambda: Vec::new(),
            corrupt: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl SessionConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !gj_core::session::is_prime(self.p) {
            return Err(ConfigError::Invalid(format!("p = {} is not prime", self.p)));
        }
        if let Some(n) = self.n {
            if n == 0 || n > gj_core::padic::MAX_N {
                return Err(ConfigError::Invalid(format!("n must be in 1..={}", gj_core::padic::MAX_N)));
            }
            if !self.chars.is_empty() && self.chars.len() != n {
                return Err(ConfigError::Invalid(format!("--n {n} but {} characters given", self.chars.len())));
            }
        }
        if self.truncation == 0 {
            return Err(ConfigError::Invalid("T must be at least 1".into()));
        }
        Strategy::parse(&self.strategy)?;
        let bound = parse_rational(&self.tail_bound)?;
        if bound <= num_rational::BigRational::from_integer(0.into()) {
            return Err(ConfigError::Invalid("tail bound must be positive".into()));
        }
        for a in &self.alpha {
            parse_rational(a)?;
        }
        for g in &self.g {
            let n = (g.len() as f64).sqrt() as usize;
            if n * n != g.len() || n == 0 {
                return Err(ConfigError::Invalid(format!("matrix {g:?} is not square")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn budget(&self, threads: usize) -> Budget {
        Budget { max_level: self.max_level, max_cosets: self.max_cosets, threads }
    }

    pub fn strategy(&self) -> Result<Strategy, ConfigError> {
        Ok(Strategy::parse(&self.strategy)?)
    }

    /// `n` from the flag, else from the characters, else `default`.
    pub fn rank(&self, default: usize) -> usize {
        self.n.unwrap_or(if self.chars.is_empty() { default } else { self.chars.len() })
    }

    pub fn datum(&self, default: &[&str]) -> Result<LanglandsDatum, ConfigError> {
        let names: Vec<&str> = if self.chars.is_empty() {
            let n = self.rank(default.len());
            (0..n).map(|i| default.get(i).copied().unwrap_or("unram")).collect()
        } else {
            self.chars.iter().map(String::as_str).collect()
        };
        Ok(LanglandsDatum::from_names(self.p, &names, Alphabet::Main)?)
    }

    pub fn partner_datum(&self, n: usize) -> Result<LanglandsDatum, ConfigError> {
        let names: Vec<&str> =
            if self.partner.is_empty() { vec!["unram"; n] } else { self.partner.iter().map(String::as_str).collect() };
        Ok(LanglandsDatum::from_names(self.p, &names, Alphabet::Partner)?)
    }

    /// A session whose field holds every character value and `ψ` up to the configured depth.
    pub fn session(&self, data: &[&LanglandsDatum], threads: usize) -> Result<Session, ConfigError> {
        let orders: Vec<u64> = data.iter().map(|d| d.unit_order()).collect();
        Ok(Session::new(self.p, &orders, self.depth)?.with_budget(self.budget(threads)))
    }
}
