use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use gj_core::exactnum::{parse_rational, SatakeRat};
use gj_core::reps::{battery, LanglandsDatum};
use gj_core::whittaker::{spherical_whittaker_cs, WhittakerSpec};
use gj_core::zeta::{
    conductor_check, gj_spherical, gj_zeta, main_theorem, phi_invariance_check, projection_identity_check,
    propagation_check, rs_integral_nn1_spherical, rs_integral_nn_spherical, strategy_equivalence,
    whittaker_oracle_check, CheckReport, PropagationReport, PropagationStatus, SBFunction, ZetaReport,
};
use gj_core::{Error, Newform, PadicMatrix};

use crate::config::{ConfigError, SessionConfig};
use crate::render;
use crate::{Format, Object, Target};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;

#[derive(Clone, Copy, Debug)]
pub enum Job {
    Verify(Target),
    Compute(Object),
}

pub struct Output {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub timing: bool,
    pub dump_newform: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
    /// `compute` jobs make no claim.
    Computed,
}

/// One piece of a run's output.
pub enum Item {
    Zeta(ZetaReport),
    Check(CheckReport),
    Propagation(PropagationReport),
    Series { label: String, coeffs: Vec<SatakeRat> },
    Value { label: String, value: Value, text: String },
}

impl Item {
    fn status(&self) -> Status {
        match self {
            Item::Zeta(r) if r.equal => Status::Pass,
            Item::Check(r) if r.ok => Status::Pass,
            Item::Zeta(_) | Item::Check(_) => Status::Fail,
            Item::Propagation(r) => match r.status {
                PropagationStatus::Pass => Status::Pass,
                PropagationStatus::Fail => Status::Fail,
                PropagationStatus::Inconclusive => Status::Inconclusive,
            },
            Item::Series { .. } | Item::Value { .. } => Status::Computed,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Item::Zeta(r) => r.to_json(),
            Item::Check(r) => serde_json::to_value(r).unwrap_or(Value::Null),
            Item::Propagation(r) => serde_json::to_value(r).unwrap_or(Value::Null),
            Item::Series { label, coeffs } => json!({
                "label": label,
                "coeffs": coeffs.iter().map(SatakeRat::to_json).collect::<Vec<_>>(),
                "text": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
            Item::Value { label, value, .. } => json!({ "label": label, "value": value }),
        }
    }
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub command: String,
    pub config: &'a SessionConfig,
    pub config_hash: String,
    pub status: Status,
    pub runtime_ms: Option<u64>,
    pub reports: Vec<Value>,
}

#[derive(Debug, thiserror::Error)]
enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(ConfigError::Core(e)) | RunError::Core(e) => match e {
                Error::Precision(_) | Error::Depth { .. } | Error::Budget(_) | Error::Level(_) => EXIT_BUDGET,
                Error::Unsupported(_) => EXIT_CONFIG,
                _ => EXIT_FAIL,
            },
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Write { .. } => EXIT_FAIL,
        }
    }
}

pub fn execute(job: Job, cfg: &SessionConfig, out: &Output) -> u8 {
    match execute_inner(job, cfg, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gjzeta: {e}");
            e.exit_code()
        }
    }
}

fn execute_inner(job: Job, cfg: &SessionConfig, out: &Output) -> Result<u8, RunError> {
    let start = Instant::now();
    let mut items = match job {
        Job::Verify(t) => verify(t, cfg, out)?,
        Job::Compute(o) => compute(o, cfg, out)?,
    };
    let elapsed = out.timing.then(|| start.elapsed().as_millis() as u64);
    for item in &mut items {
        if let Item::Zeta(r) = item {
            r.runtime_ms = elapsed;
        }
    }
    let status = items.iter().map(Item::status).max().unwrap_or(Status::Pass);
    let command = match job {
        Job::Verify(t) => format!("verify {}", name_of(t)),
        Job::Compute(o) => format!("compute {}", name_of(o)),
    };
    let env = Envelope {
        command,
        config: cfg,
        config_hash: cfg.hash(),
        status,
        runtime_ms: elapsed,
        reports: items.iter().map(Item::to_json).collect(),
    };
    let text = render::render(out.format, &env, &items);
    print!("{text}");
    if let Some(path) = &out.out {
        std::fs::write(path, &text).map_err(|source| RunError::Write { path: path.clone(), source })?;
    }
    Ok(match status {
        Status::Pass | Status::Computed => EXIT_PASS,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
        Status::Fail => EXIT_FAIL,
    })
}

fn name_of(v: impl clap::ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn battery_or_datum(cfg: &SessionConfig) -> Result<Vec<(String, LanglandsDatum)>, RunError> {
    if cfg.chars.is_empty() {
        let n = cfg.rank(2);
        if n != 2 {
            return Err(ConfigError::Invalid("the default battery is GL_2; pass --chars for other ranks".into()).into());
        }
        Ok(battery(cfg.p)?.into_iter().map(|(name, d)| (name.to_string(), d)).collect())
    } else {
        let d = cfg.datum(&[])?;
        Ok(vec![(d.to_string(), d)])
    }
}

fn matrices(cfg: &SessionConfig, default: Vec<Vec<i64>>) -> Result<Vec<PadicMatrix>, RunError> {
    let gs = if cfg.g.is_empty() { default } else { cfg.g.clone() };
    gs.iter()
        .map(|g| {
            let n = (g.len() as f64).sqrt() as usize;
            Ok(PadicMatrix::from_ints(cfg.p, n, n, g)?)
        })
        .collect()
}

fn verify(target: Target, cfg: &SessionConfig, out: &Output) -> Result<Vec<Item>, RunError> {
    let t = cfg.truncation;
    let corrupt = cfg.corrupt;
    let items = match target {
        Target::MainTheorem => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            vec![Item::Zeta(main_theorem(&d, s.field(), t, cfg.strategy()?, &s.budget(), corrupt)?)]
        }
        Target::GjSpherical => {
            let d = cfg.datum(&["unram", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            vec![Item::Zeta(gj_spherical(&d, s.field(), t, cfg.strategy()?, &s.budget(), corrupt)?)]
        }
        Target::RsNn1 | Target::RsNn => {
            let d = cfg.datum(&["unram", "unram"])?;
            let n = d.n();
            let partner = cfg.partner_datum(if target == Target::RsNn { n } else { n.saturating_sub(1) })?;
            let s = cfg.session(&[&d, &partner], out.threads)?;
            let r = if target == Target::RsNn {
                rs_integral_nn_spherical(&d, &partner, s.field(), t, corrupt)?
            } else {
                rs_integral_nn1_spherical(&d, &partner, s.field(), t, corrupt)?
            };
            vec![Item::Zeta(r)]
        }
        Target::Propagation => {
            let s = cfg.session(&[], out.threads)?;
            let alpha_src = if cfg.alpha.is_empty() { vec!["1/2".into(), "1/3".into()] } else { cfg.alpha.clone() };
            let alpha = alpha_src.iter().map(|a| parse_rational(a)).collect::<Result<Vec<_>, _>>()?;
            let bound = parse_rational(&cfg.tail_bound)?;
            let p = cfg.p as i64;
            let defaults = vec![vec![1, 0, 0, 1], vec![p, 0, 0, 1], vec![p * p, 0, 0, 1], vec![1, 0, 0, p]];
            let mut items = Vec::new();
            for g in matrices(cfg, defaults)? {
                let r = propagation_check(&alpha, &g, &bound, &s.psi(), s.field(), cfg.max_terms, corrupt)?;
                items.push(Item::Propagation(r));
            }
            items
        }
        Target::PhiInvariance => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let nf = Newform::new(&d, s.field(), s.budget())?;
            let samples = cfg.samples.unwrap_or(100);
            vec![Item::Check(phi_invariance_check(nf.data(), nf.conductor(), samples, cfg.seed, corrupt)?)]
        }
        Target::Projection => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let nf = Newform::new(&d, s.field(), s.budget())?;
            let samples = cfg.samples.unwrap_or(50);
            vec![Item::Check(projection_identity_check(&nf, samples, cfg.seed, corrupt)?)]
        }
        Target::Conductor => {
            let data = battery_or_datum(cfg)?;
            let refs: Vec<&LanglandsDatum> = data.iter().map(|(_, d)| d).collect();
            let s = cfg.session(&refs, out.threads)?;
            let seeds = cfg.samples.unwrap_or(8);
            data.iter()
                .map(|(_, d)| Ok(Item::Check(conductor_check(d, s.field(), s.budget(), seeds, cfg.seed, corrupt)?)))
                .collect::<Result<_, RunError>>()?
        }
        Target::OracleEquivalence => {
            let data = battery_or_datum(cfg)?;
            let refs: Vec<&LanglandsDatum> = data.iter().map(|(_, d)| d).collect();
            let s = cfg.session(&refs, out.threads)?;
            let mut items = Vec::new();
            for (_, d) in &data {
                items.push(Item::Zeta(strategy_equivalence(d, s.field(), t, &s.budget(), corrupt)?));
            }
            if data.iter().all(|(_, d)| d.n() == 2) {
                items.push(Item::Check(whittaker_oracle_check(cfg.p, s.field(), 4, corrupt)?));
            }
            items
        }
    };
    Ok(items)
}

fn compute(object: Object, cfg: &SessionConfig, out: &Output) -> Result<Vec<Item>, RunError> {
    let t = cfg.truncation;
    let items = match object {
        Object::LFactor => {
            let d = cfg.datum(&["unram", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let l = d.l_factor(s.field(), t)?;
            vec![Item::Series { label: format!("L(s, {d})"), coeffs: l.coeffs().to_vec() }]
        }
        Object::Zeta => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let nf = Newform::new(&d, s.field(), s.budget())?;
            let mut phi = if nf.conductor() == 0 {
                SBFunction::Indicator { n: d.n() }
            } else {
                SBFunction::main(nf.data(), nf.conductor())
            };
            if cfg.corrupt {
                phi = phi.corrupted();
            }
            let z = gj_zeta(&nf, &phi, t, cfg.strategy()?, &s.budget())?;
            vec![Item::Series {
                label: format!("Z(s, β, {}) for {d}", phi.label()),
                coeffs: z.series.coeffs().to_vec(),
            }]
        }
        Object::Whittaker => {
            let d = cfg.datum(&["unram", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let lambda = if cfg.lambda.is_empty() { vec![0; d.n()] } else { cfg.lambda.clone() };
            let w = spherical_whittaker_cs(&WhittakerSpec::new(&d, false)?, s.field(), &lambda)?;
            vec![Item::Value { label: format!("W°(ϖ^{lambda:?}) for {d}"), value: w.to_json(), text: w.to_string() }]
        }
        Object::Newform => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let nf = Newform::new(&d, s.field(), s.budget())?;
            let value = if out.dump_newform {
                nf.to_json()
            } else {
                json!({ "conductor": nf.conductor(), "level": nf.level(), "search": nf.search_steps() })
            };
            let text = format!("conductor {} (flag level {})", nf.conductor(), nf.level());
            vec![Item::Value { label: format!("newform of {d}"), value, text }]
        }
        Object::Beta => {
            let d = cfg.datum(&["quad", "unram"])?;
            let s = cfg.session(&[&d], out.threads)?;
            let nf = Newform::new(&d, s.field(), s.budget())?;
            let n = d.n() as i64;
            let id: Vec<i64> = (0..n * n).map(|i| i64::from(i % (n + 1) == 0)).collect();
            let mut items = Vec::new();
            for g in matrices(cfg, vec![id])? {
                let b = nf.beta(&g)?;
                let label = format!("β([{}])", render::matrix(&g.to_strings()));
                items.push(Item::Value { label, value: b.to_json(), text: b.to_string() });
            }
            items
        }
    };
    Ok(items)
}
