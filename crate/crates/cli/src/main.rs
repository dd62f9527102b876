//! `chemotaxis` command-line driver: single runs, parameter sweeps and the
//! verification suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chemotaxis::config::{parse_entries, Entry, Mode, RunConfig};
use chemotaxis::diagnostics::{simulate, SimulateOptions};
use chemotaxis::io::{write_report_files, SnapshotWriter};
use chemotaxis::scenarios;
use chemotaxis::stepper::Observer;
use chemotaxis::sweep::{self, Ranges};
use chemotaxis::verify::{self, SpatialOps, Standard, VerifyOptions};
use chemotaxis::{Error, Field, ImaginaryState};
use clap::{Args, Parser, Subcommand};

/// Writes a line to stdout; a closed pipe (e.g. `| head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Exit status for invalid configuration or arguments.
const EXIT_CONFIG: u8 = 2;
/// Exit status for I/O failures and failed verification.
const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "chemotaxis", version, about = "Attraction-repulsion chemotaxis simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its series, snapshots and report.
    Run(RunArgs),
    /// Run a grid of parameter combinations and write a phase table.
    Sweep(SweepArgs),
    /// Check the discrete operators and convergence orders.
    Verify(VerifyArgs),
    /// List the built-in scenarios.
    Scenarios,
}

/// Settings shared by `run` and `sweep`; each overrides the config file.
#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog scenario, e.g. `ex4_1_mu1` or `ex4_1`.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// CFL safety factor in (0, 1].
    #[arg(long)]
    safety: Option<f64>,
    #[arg(long)]
    dt_max: Option<f64>,
    /// Clip negative values of u before fractional powers.
    #[arg(long)]
    clip_negative: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Extra `key=value` config entries.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Logistic rate; with a bare scenario id it selects the variant.
    #[arg(long)]
    mu: Option<f64>,
    /// Number of evenly spaced snapshots over [0, t_end], endpoints included.
    #[arg(long)]
    snapshots: Option<usize>,
    /// Comma-separated Lp exponents recorded in the series.
    #[arg(long)]
    p_norms: Option<String>,
    /// Series cadence in steps (0 = automatic).
    #[arg(long)]
    series_every: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated values; an empty string gives no combinations.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Peak of u0; v0 and w0 scale with it.
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Operator oracles only.
    #[arg(long)]
    quick: bool,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Swap in a deliberately broken operator (self-test of the suite).
    #[arg(long, hide = true, value_parser = ["laplacian", "chemo_divergence", "integrate"])]
    inject_fault: Option<String>,
}

/// Failure of a subcommand, mapped to an exit status.
enum Failure {
    Config(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Other(format!("i/o error: {e}")),
            e => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Scenarios => {
            for s in scenarios::catalog() {
                let p = &s.params;
                let expected = s.expected.map_or("-", |e| e.as_str());
                say!("{}\tk={} l={} m={} mu={}\tt_end={}\texpected={}", s.name, p.k_exp, p.l_exp, p.m_exp, p.mu, s.t_end, expected);
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

/// Config file entries plus the command-line entries that override them.
fn entries(common: &Common, mode: Mode, extra: Vec<Entry>) -> Result<(Vec<Entry>, Vec<Entry>), Failure> {
    let file = match &common.config {
        None => Vec::new(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", path.display())))?;
            parse_entries(&text)?
        }
    };
    let mut flags = vec![Entry::flag("mode", mode.as_str())];
    let mut opt = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.push(Entry::flag(key, v));
        }
    };
    opt("scenario", common.scenario.clone());
    opt("t_end", common.t_end.map(|v| format!("{v:?}")));
    opt("nx", common.nx.map(|v| v.to_string()));
    opt("ny", common.ny.map(|v| v.to_string()));
    opt("safety", common.safety.map(|v| format!("{v:?}")));
    opt("dt_max", common.dt_max.map(|v| format!("{v:?}")));
    opt("out", common.out.clone());
    if common.clip_negative {
        flags.push(Entry::flag("clip_negative", "true"));
    }
    flags.extend(extra);
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        flags.push(Entry::flag(k.trim(), v.trim()));
    }
    Ok((file, flags))
}

fn create_out(dir: &str) -> Result<&Path, Failure> {
    let path = Path::new(dir);
    fs::create_dir_all(path).map_err(|e| Failure::Other(format!("cannot create {}: {e}", path.display())))?;
    Ok(path)
}

fn run(a: RunArgs) -> Result<u8, Failure> {
    let mut extra = Vec::new();
    if let Some(mu) = a.mu {
        extra.push(Entry::flag("mu", format!("{mu:?}")));
    }
    if let Some(n) = a.snapshots {
        extra.push(Entry::flag("snapshots", n.to_string()));
    }
    if let Some(p) = a.p_norms {
        extra.push(Entry::flag("p_norms", p));
    }
    if let Some(n) = a.series_every {
        extra.push(Entry::flag("series_every", n.to_string()));
    }
    let (file, flags) = entries(&a.common, Mode::Run, extra)?;
    let cfg = RunConfig::resolve(&file, &flags)?;
    let out = create_out(&cfg.out)?;
    let grid = cfg.grid()?;
    let state = scenarios::build(&cfg.scenario, grid);
    let marks = cfg.snapshot_times();
    let mut writer = SnapshotWriter::new(out, !marks.is_empty());
    let opts = SimulateOptions {
        p_norms: &cfg.p_norms,
        marks: &marks,
        series_every: cfg.series_every,
        config_echo: cfg.to_config_string(),
    };
    let (report, _) = {
        let mut extra: [&mut dyn Observer; 1] = [&mut writer];
        simulate(state, &cfg.scenario.params, &cfg.policy, cfg.scenario.t_end, opts, &mut extra)
    };
    writer.into_result()?;
    write_report_files(out, &report)?;
    let ev = &report.event;
    say!("{}: {} at t = {:e} (step {})", cfg.scenario.name, ev.kind, ev.t_event, ev.step);
    if let Some(exp) = cfg.scenario.expected {
        let verdict = if exp.matches(ev.kind) { "as expected" } else { "UNEXPECTED" };
        say!("expected {}: {verdict}", exp.as_str());
    }
    say!("output written to {}", out.display());
    Ok(report.exit_code() as u8)
}

/// A comma-separated list; the empty string is the empty list.
fn parse_list(flag: &str, s: Option<String>) -> Result<Option<Vec<f64>>, Failure> {
    let Some(s) = s else { return Ok(None) };
    if s.trim().is_empty() {
        return Ok(Some(Vec::new()));
    }
    s.split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Failure::Config(format!("--{flag}: `{v}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn sweep_cmd(a: SweepArgs) -> Result<u8, Failure> {
    let ranges = Ranges {
        k: parse_list("k", a.k)?,
        l: parse_list("l", a.l)?,
        m: parse_list("m", a.m)?,
        mu: parse_list("mu", a.mu)?,
        amplitude: parse_list("amplitude", a.amplitude)?,
    };
    let workers = sweep::workers_from_env().map_err(Failure::Config)?;
    let (file, flags) = entries(&a.common, Mode::Sweep, Vec::new())?;
    let cfg = RunConfig::resolve(&file, &flags)?;
    let out = create_out(&cfg.out)?;
    let rows = sweep::run_sweep(&cfg.scenario, cfg.grid()?, &cfg.policy, &ranges, workers);
    let csv = sweep::phase_csv(&rows);
    let path = out.join(sweep::PHASE_FILE);
    fs::write(&path, &csv).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))?;
    say!("{}", csv.trim_end());
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows could not run; see the error column", rows.len());
    }
    say!("phase table written to {}", path.display());
    Ok(0)
}

/// The standard operators with one of them perturbed.
struct Faulty(String);

impl SpatialOps for Faulty {
    fn laplacian(&self, f: &Field) -> Field {
        let mut out = Standard.laplacian(f);
        if self.0 == "laplacian" {
            perturb(&mut out);
        }
        out
    }
    fn chemo_divergence(&self, u: &Field, s: &Field, k: f64) -> Result<Field, ImaginaryState> {
        let mut out = Standard.chemo_divergence(u, s, k)?;
        if self.0 == "chemo_divergence" {
            perturb(&mut out);
        }
        Ok(out)
    }
    fn integrate(&self, f: &Field) -> f64 {
        let v = Standard.integrate(f);
        if self.0 == "integrate" {
            v + 1e-6 * (1.0 + v.abs())
        } else {
            v
        }
    }
}

fn perturb(f: &mut Field) {
    let bump = 1e-6 * (1.0 + f.max().abs());
    f.values_mut()[0] += bump;
}

fn verify_cmd(a: VerifyArgs) -> Result<u8, Failure> {
    let opts = VerifyOptions { quick: a.quick, ..VerifyOptions::default() };
    let report = match a.inject_fault {
        None => verify::run_verification(&Standard, &opts),
        Some(which) => verify::run_verification(&Faulty(which), &opts),
    };
    let text = report.to_string();
    say!("{}", text.trim_end());
    if let Some(path) = a.report {
        fs::write(&path, &text).map_err(|e| Failure::Other(format!("cannot write {}: {e}", path.display())))?;
    }
    match report.first_failure() {
        None => Ok(0),
        Some(c) => {
            eprintln!("verification failed: {}", c.name);
            Ok(EXIT_FAILURE)
        }
    }
}
