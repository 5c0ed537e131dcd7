//! `cosmoweyl`: tables, diagrams, audits and verification suites for
//! expanding (Schwarzschild-)de Sitter cosmologies.

mod commands;
mod config;
mod output;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use config::{thread_cap, Config, ConfigError};
use output::{Outcome, Summary, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PASS, EXIT_RUNTIME};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "cosmoweyl", version, about = "Geometry and curvature checks for expanding de Sitter-type cosmologies")]
struct Cli {
    /// Key-value config file (`key = value`, `#` comments). Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override any config key, e.g. `--set tol_weyl=1e-6`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Cosmological constant.
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Mass parameter.
    #[arg(long, global = true)]
    m: Option<String>,
    /// Area radius of the sphere used by `table1`.
    #[arg(long, global = true)]
    r: Option<String>,
    #[arg(long, global = true)]
    r0: Option<String>,
    #[arg(long, global = true)]
    r1: Option<String>,
    #[arg(long = "n-r", global = true)]
    n_r: Option<String>,
    /// Outgoing optical coordinate u* of sampled spheres.
    #[arg(long, global = true)]
    ustar: Option<String>,
    /// ef, kruskal or initial-data.
    #[arg(long, global = true)]
    gauge: Option<String>,
    #[arg(long = "n-theta", global = true)]
    n_theta: Option<String>,
    #[arg(long = "n-phi", global = true)]
    n_phi: Option<String>,
    /// sds or ellipsoid.
    #[arg(long, global = true)]
    foliation: Option<String>,
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    phi: Option<String>,
    #[arg(long, global = true)]
    eps0: Option<String>,
    #[arg(long, global = true)]
    c0: Option<String>,
    /// desitter or sds (for `verify weyl`).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Output directory; `summary.json` is always written here.
    #[arg(long = "out", global = true, value_name = "DIR")]
    out_dir: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymptotic coefficients towards null infinity in three gauges.
    Table1,
    /// Penrose-diagram polylines of r-level sets and horizons (CSV and SVG).
    Penrose,
    /// Bootstrap-assumption audit of a foliation.
    Audit,
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Export closed-form data along the radial window.
    Dump {
        #[arg(value_enum)]
        what: DumpKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Energy,
    Decay,
    Sobolev,
    Hodge,
    Weyl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DumpKind {
    Coeffs,
    Weyl,
    Flux,
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Table1 => "table1".into(),
            Command::Penrose => "penrose".into(),
            Command::Audit => "audit".into(),
            Command::Verify { suite } => format!("verify {}", suite.to_possible_value().expect("named").get_name()),
            Command::Dump { what } => format!("dump {}", what.to_possible_value().expect("named").get_name()),
        }
    }
}

impl Cli {
    fn config(&self) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        if let Some(p) = &self.config {
            cfg.apply_file(p)?;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k, v)?;
        }
        let flags = [
            ("lambda", &self.lambda),
            ("m", &self.m),
            ("r", &self.r),
            ("r0", &self.r0),
            ("r1", &self.r1),
            ("n_r", &self.n_r),
            ("ustar", &self.ustar),
            ("gauge", &self.gauge),
            ("n_theta", &self.n_theta),
            ("n_phi", &self.n_phi),
            ("foliation", &self.foliation),
            ("eps", &self.eps),
            ("phi", &self.phi),
            ("eps0", &self.eps0),
            ("c0", &self.c0),
            ("model", &self.model),
            ("out_dir", &self.out_dir),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cmd: &Command, cfg: &Config) -> anyhow::Result<Outcome> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    match cmd {
        Command::Table1 => commands::table1(cfg),
        Command::Penrose => commands::penrose(cfg),
        Command::Audit => commands::audit(cfg),
        Command::Verify { suite } => match suite {
            Suite::Energy => verify::energy(cfg),
            Suite::Decay => verify::decay(cfg),
            Suite::Sobolev => verify::sobolev(cfg),
            Suite::Hodge => verify::hodge(cfg),
            Suite::Weyl => verify::weyl(cfg),
        },
        Command::Dump { what } => match what {
            DumpKind::Coeffs => commands::dump_coeffs(cfg),
            DumpKind::Weyl => commands::dump_weyl(cfg),
            DumpKind::Flux => commands::dump_flux(cfg),
        },
    }
}

fn setup_threads() -> Result<(), ConfigError> {
    let var = std::env::var("COSMOWEYL_THREADS").ok();
    if let Some(n) = thread_cap(var.as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn finish(summary: Summary<'_>, dir: &std::path::Path) -> ExitCode {
    if let Err(e) = summary.write(dir) {
        eprintln!("cannot write summary: {e:#}");
    }
    ExitCode::from(summary.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let summary = Summary { command: "", config: None, outcome: None, error: Some(e.to_string()), exit_code: EXIT_CONFIG };
            return finish(summary, &Config::default().out_dir);
        }
    };
    let name = cli.command.name();
    let cfg = match setup_threads().and_then(|_| cli.config()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            let dir = cli.out_dir.as_deref().map(PathBuf::from).unwrap_or_else(|| Config::default().out_dir);
            let summary = Summary { command: &name, config: None, outcome: None, error: Some(e.to_string()), exit_code: EXIT_CONFIG };
            return finish(summary, &dir);
        }
    };
    match run(&cli.command, &cfg) {
        Ok(outcome) => {
            for c in outcome.checks.iter().filter(|c| !c.pass) {
                println!("FAIL {}: {:e} (threshold {:e})", c.name, c.value, c.threshold);
            }
            let passed = outcome.checks.iter().filter(|c| c.pass).count();
            println!("{name}: {passed}/{} checks passed", outcome.checks.len());
            for p in &outcome.outputs {
                println!("wrote {}", p.display());
            }
            let code = if outcome.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED };
            finish(Summary { command: &name, config: Some(cfg.to_json()), outcome: Some(&outcome), error: None, exit_code: code }, &cfg.out_dir)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let summary = Summary { command: &name, config: Some(cfg.to_json()), outcome: None, error: Some(format!("{e:#}")), exit_code: EXIT_RUNTIME };
            finish(summary, &cfg.out_dir)
        }
    }
}
