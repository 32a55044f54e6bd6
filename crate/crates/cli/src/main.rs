//! `gjzeta`: batch verification and computation front end.

mod config;
mod render;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ConfigError, SessionConfig};

#[derive(Parser, Debug)]
#[command(name = "gjzeta", version, about = "Exact checks of p-adic zeta integral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an identity check; the exit code reports the outcome.
    Verify {
        target: Target,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print an exact object without comparison.
    Compute {
        object: Object,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    MainTheorem,
    GjSpherical,
    RsNn1,
    RsNn,
    Propagation,
    PhiInvariance,
    Projection,
    Conductor,
    OracleEquivalence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Object {
    LFactor,
    Zeta,
    Whittaker,
    Newform,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Opts {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated characters, e.g. `quad,unram` or `unram:1/2,unram:b`.
    #[arg(long)]
    chars: Option<String>,
    /// Partner characters for the Rankin–Selberg targets.
    #[arg(long)]
    partner: Option<String>,
    /// Number of series coefficients.
    #[arg(long = "T", value_name = "T")]
    truncation: Option<usize>,
    #[arg(long, value_parser = ["hermite", "brute"])]
    strategy: Option<String>,
    /// JSON file with defaults for every option below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long)]
    max_cosets: Option<u64>,
    #[arg(long, env = "GJZETA_THREADS", default_value_t = 1)]
    threads: usize,
    /// Record wall-clock runtimes (reports are then no longer byte-reproducible).
    #[arg(long)]
    timing: bool,
    /// Negative-control hook: corrupt the checked object so the target must fail.
    #[arg(long, alias = "corrupt-phi")]
    corrupt: bool,
    /// With `compute newform`: include the full flag tables.
    #[arg(long)]
    dump_newform: bool,
    #[arg(long)]
    tail_bound: Option<String>,
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long)]
    depth: Option<u32>,
    /// Row-major integer matrix, repeatable: `--g 3,0,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    g: Vec<String>,
    /// Rational Satake parameters, e.g. `1/2,1/3`.
    #[arg(long)]
    alpha: Option<String>,
    /// Weight for `compute whittaker`, e.g. `2,0`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

fn split(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn parse_ints<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, ConfigError> {
    split(s).iter().map(|x| x.parse().map_err(|_| ConfigError::Invalid(format!("`{x}` is not an integer")))).collect()
}

impl Opts {
    fn config(&self) -> Result<SessionConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => SessionConfig::load(path)?,
            None => SessionConfig::default(),
        };
        if let Some(p) = self.p {
            cfg.p = p;
        }
        if self.n.is_some() {
            cfg.n = self.n;
        }
        if let Some(c) = &self.chars {
            cfg.chars = split(c);
        }
        if let Some(c) = &self.partner {
            cfg.partner = split(c);
        }
        if let Some(t) = self.truncation {
            cfg.truncation = t;
        }
        if let Some(s) = &self.strategy {
            cfg.strategy = s.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.samples.is_some() {
            cfg.samples = self.samples;
        }
        if let Some(l) = self.max_level {
            cfg.max_level = l;
        }
        if let Some(c) = self.max_cosets {
            cfg.max_cosets = c;
        }
        if let Some(b) = &self.tail_bound {
            cfg.tail_bound = b.clone();
        }
        if let Some(m) = self.max_terms {
            cfg.max_terms = m;
        }
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if !self.g.is_empty() {
            cfg.g = self.g.iter().map(|g| parse_ints(g)).collect::<Result<_, _>>()?;
        }
        if let Some(a) = &self.alpha {
            cfg.alpha = split(a);
        }
        if let Some(l) = &self.lambda {
            cfg.lambda = parse_ints(l)?;
        }
        cfg.corrupt |= self.corrupt;
        cfg.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> run::Output {
        run::Output {
            format: self.format,
            out: self.out.clone(),
            threads: self.threads.max(1),
            timing: self.timing,
            dump_newform: self.dump_newform,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { run::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (opts, job) = match &cli.command {
        Command::Verify { target, opts } => (opts, run::Job::Verify(*target)),
        Command::Compute { object, opts } => (opts, run::Job::Compute(*object)),
    };
    let cfg = match opts.config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("gjzeta: {e}");
            return ExitCode::from(run::EXIT_CONFIG);
        }
    };
    ExitCode::from(run::execute(job, &cfg, &opts.output()))
}
