//! Flat `key = value` configuration.
//!
//! A configuration names a base scenario from the catalog and overrides any
//! of its fields, the grid, the step policy and the output settings. Values
//! given on the command line take precedence over a config file, which takes
//! precedence over the defaults. The resolved configuration prints back in the
//! same format with every key present, and parsing that text reproduces it
//! exactly.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::ModelParams;
use crate::scenarios::{self, Expected, Gaussian, Scenario};
use crate::stepper::StepPolicy;

/// Catalog entry used when no `scenario` key is given.
pub const DEFAULT_SCENARIO: &str = "ex4_1_mu0";
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Sweep,
    Verify,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Run => "run",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "run" => Some(Mode::Run),
            "sweep" => Some(Mode::Sweep),
            "verify" => Some(Mode::Verify),
            _ => None,
        }
    }
}

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// `line N` or `command line`.
    pub origin: String,
}

impl Entry {
    /// An assignment made on the command line.
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Entry { key: key.to_string(), value: value.into(), origin: "command line".into() }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Config { origin: self.origin.clone(), field: self.key.clone(), message: message.into() }
    }

    fn f64(&self) -> Result<f64> {
        self.value.parse().map_err(|_| self.error(format!("expected a number, got `{}`", self.value)))
    }

    fn usize(&self) -> Result<usize> {
        self.value.parse().map_err(|_| self.error(format!("expected a nonnegative integer, got `{}`", self.value)))
    }

    fn bool(&self) -> Result<bool> {
        match self.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(self.error(format!("expected true or false, got `{v}`"))),
        }
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub scenario: Scenario,
    pub nx: usize,
    pub ny: usize,
    pub policy: StepPolicy,
    pub out: String,
    /// Evenly spaced snapshots over `[0, t_end]`, endpoints included; 0 disables.
    pub snapshots: usize,
    /// Series cadence in steps; 0 picks one aiming at about 2000 samples.
    pub series_every: u64,
    pub p_norms: Vec<f64>,
}

const SCENARIO_KEYS: &[&str] = &[
    "name",
    "d1",
    "d2",
    "d3",
    "chi",
    "xi",
    "alpha",
    "beta",
    "mu",
    "K",
    "l",
    "k",
    "m",
    "u0_amplitude",
    "u0_width",
    "v0_amplitude",
    "v0_width",
    "w0_amplitude",
    "w0_width",
    "t_end",
    "expected",
];

const RUN_KEYS: &[&str] = &[
    "mode",
    "nx",
    "ny",
    "safety",
    "dt_max",
    "blowup_threshold",
    "steady_tol",
    "steady_patience",
    "clip_negative",
    "out",
    "snapshots",
    "series_every",
    "p_norms",
];

/// Splits config text into assignments. `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = format!("line {}", n + 1);
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config { origin, field: line.to_string(), message: "expected `key = value`".into() });
        };
        out.push(Entry { key: key.trim().to_string(), value: value.trim().to_string(), origin });
    }
    Ok(out)
}

fn check_keys(entries: &[Entry]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for e in entries {
        let known = e.key == "scenario" || SCENARIO_KEYS.contains(&e.key.as_str()) || RUN_KEYS.contains(&e.key.as_str());
        if !known {
            return Err(e.error("unknown key"));
        }
        if !seen.insert(e.key.as_str()) {
            return Err(e.error("given more than once"));
        }
    }
    Ok(())
}

fn base_scenario(file: &[Entry], flags: &[Entry]) -> Result<Scenario> {
    let find = |key: &str| flags.iter().chain(file).find(|e| e.key == key);
    let Some(entry) = find("scenario") else {
        return scenarios::lookup(DEFAULT_SCENARIO);
    };
    // a bare id together with `mu` selects that source variant when cataloged
    if let Some(mu) = find("mu").and_then(|e| e.value.parse::<f64>().ok()) {
        if let Ok(s) = scenarios::lookup(&format!("{}_mu{mu}", entry.value)) {
            return Ok(s);
        }
    }
    scenarios::lookup(&entry.value).map_err(|e| entry.error(e.to_string()))
}

fn apply_scenario_key(s: &mut Scenario, e: &Entry) -> Result<()> {
    let p = &mut s.params;
    let gauss = |g: &mut Gaussian, amplitude: bool| -> Result<()> {
        let v = e.f64()?;
        if amplitude {
            g.amplitude = v;
        } else {
            g.width = v;
        }
        Ok(())
    };
    match e.key.as_str() {
        "name" => s.name = e.value.clone(),
        "d1" => p.d1 = e.f64()?,
        "d2" => p.d2 = e.f64()?,
        "d3" => p.d3 = e.f64()?,
        "chi" => p.chi = e.f64()?,
        "xi" => p.xi = e.f64()?,
        "alpha" => p.alpha = e.f64()?,
        "beta" => p.beta = e.f64()?,
        "mu" => p.mu = e.f64()?,
        "K" => p.k_coef = e.f64()?,
        "l" => p.l_exp = e.f64()?,
        "k" => p.k_exp = e.f64()?,
        "m" => p.m_exp = e.f64()?,
        "u0_amplitude" => gauss(&mut s.u0, true)?,
        "u0_width" => gauss(&mut s.u0, false)?,
        "v0_amplitude" => gauss(&mut s.v0, true)?,
        "v0_width" => gauss(&mut s.v0, false)?,
        "w0_amplitude" => gauss(&mut s.w0, true)?,
        "w0_width" => gauss(&mut s.w0, false)?,
        "t_end" => s.t_end = e.f64()?,
        "expected" => {
            s.expected = match e.value.as_str() {
                "none" => None,
                v => Some(Expected::parse(v).ok_or_else(|| {
                    e.error(format!("expected Convergent, Blowup, ImaginaryState or none, got `{v}`"))
                })?),
            }
        }
        _ => unreachable!("checked by check_keys"),
    }
    Ok(())
}

fn parse_p_norms(e: &Entry) -> Result<Vec<f64>> {
    if e.value.trim().is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|t| {
            let p: f64 = t.trim().parse().map_err(|_| e.error(format!("expected a number, got `{}`", t.trim())))?;
            if p >= 1.0 && p.is_finite() {
                Ok(p)
            } else {
                Err(e.error(format!("p must be >= 1, got {p}")))
            }
        })
        .collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        let scenario = scenarios::lookup(DEFAULT_SCENARIO).expect("default scenario is cataloged");
        let g = Grid::reference();
        RunConfig {
            mode: Mode::Run,
            scenario,
            nx: g.nx(),
            ny: g.ny(),
            policy: StepPolicy::default(),
            out: DEFAULT_OUT.into(),
            snapshots: 0,
            series_every: 0,
            p_norms: crate::diagnostics::DEFAULT_P_NORMS.to_vec(),
        }
    }
}

impl RunConfig {
    /// Resolves config-file entries and command-line entries over the defaults.
    pub fn resolve(file: &[Entry], flags: &[Entry]) -> Result<Self> {
        check_keys(file)?;
        check_keys(flags)?;
        let mut cfg = RunConfig { scenario: base_scenario(file, flags)?, ..RunConfig::default() };
        let flag_keys: BTreeSet<&str> = flags.iter().map(|e| e.key.as_str()).collect();
        let effective: Vec<&Entry> =
            file.iter().filter(|e| !flag_keys.contains(e.key.as_str())).chain(flags.iter()).collect();

        let mut expected_given = false;
        let base = cfg.scenario.clone();
        for e in &effective {
            let key = e.key.as_str();
            if key == "scenario" {
                continue;
            }
            if SCENARIO_KEYS.contains(&key) {
                apply_scenario_key(&mut cfg.scenario, e)?;
                expected_given |= key == "expected";
                continue;
            }
            let pol = &mut cfg.policy;
            match key {
                "mode" => cfg.mode = Mode::parse(&e.value).ok_or_else(|| e.error("expected run, sweep or verify"))?,
                "nx" => cfg.nx = e.usize()?,
                "ny" => cfg.ny = e.usize()?,
                "safety" => pol.safety = e.f64()?,
                "dt_max" => pol.dt_max = e.f64()?,
                "blowup_threshold" => pol.blowup_threshold = e.f64()?,
                "steady_tol" => pol.steady_tol = e.f64()?,
                "steady_patience" => pol.steady_patience = e.usize()?,
                "clip_negative" => pol.clip_negative = e.bool()?,
                "out" => cfg.out = e.value.clone(),
                "snapshots" => cfg.snapshots = e.usize()?,
                "series_every" => cfg.series_every = e.usize()? as u64,
                "p_norms" => cfg.p_norms = parse_p_norms(e)?,
                _ => unreachable!("checked by check_keys"),
            }
        }
        let model_changed = cfg.scenario.params != base.params
            || cfg.scenario.u0 != base.u0
            || cfg.scenario.v0 != base.v0
            || cfg.scenario.w0 != base.w0;
        if model_changed && !expected_given {
            cfg.scenario.expected = None;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses config text alone (no command-line entries).
    pub fn from_config_str(text: &str) -> Result<Self> {
        Self::resolve(&parse_entries(text)?, &[])
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.policy.validate()?;
        self.grid()?;
        Ok(())
    }

    /// The square `[-1/2, 1/2]²` at the configured resolution.
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, -0.5, 0.5, -0.5, 0.5)
    }

    /// Every key, in a fixed order; parses back to an identical config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode = {}", self.mode.as_str());
        out.push_str(&scenario_to_config_string(&self.scenario));
        let p = &self.policy;
        let _ = writeln!(out, "nx = {}", self.nx);
        let _ = writeln!(out, "ny = {}", self.ny);
        let _ = writeln!(out, "safety = {:?}", p.safety);
        let _ = writeln!(out, "dt_max = {:?}", p.dt_max);
        let _ = writeln!(out, "blowup_threshold = {:?}", p.blowup_threshold);
        let _ = writeln!(out, "steady_tol = {:?}", p.steady_tol);
        let _ = writeln!(out, "steady_patience = {}", p.steady_patience);
        let _ = writeln!(out, "clip_negative = {}", p.clip_negative);
        let _ = writeln!(out, "out = {}", self.out);
        let _ = writeln!(out, "snapshots = {}", self.snapshots);
        let _ = writeln!(out, "series_every = {}", self.series_every);
        let norms: Vec<String> = self.p_norms.iter().map(|p| format!("{p:?}")).collect();
        let _ = writeln!(out, "p_norms = {}", norms.join(","));
        out
    }

    /// Times of the snapshots: `snapshots` points evenly spread over
    /// `[0, t_end]`, or just `t_end` when one is requested.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let t_end = self.scenario.t_end;
        match self.snapshots {
            0 => Vec::new(),
            1 => vec![t_end],
            n => (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// The scenario as config lines; all fields are spelled out so the text does
/// not depend on the catalog.
pub fn scenario_to_config_string(s: &Scenario) -> String {
    let p: &ModelParams = &s.params;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("name", s.name.clone());
    for (k, v) in [
        ("d1", p.d1),
        ("d2", p.d2),
        ("d3", p.d3),
        ("chi", p.chi),
        ("xi", p.xi),
        ("alpha", p.alpha),
        ("beta", p.beta),
        ("mu", p.mu),
        ("K", p.k_coef),
        ("l", p.l_exp),
        ("k", p.k_exp),
        ("m", p.m_exp),
        ("u0_amplitude", s.u0.amplitude),
        ("u0_width", s.u0.width),
        ("v0_amplitude", s.v0.amplitude),
        ("v0_width", s.v0.width),
        ("w0_amplitude", s.w0.amplitude),
        ("w0_width", s.w0.width),
        ("t_end", s.t_end),
    ] {
        put(k, format!("{v:?}"));
    }
    put("expected", s.expected.map_or("none", |e| e.as_str()).to_string());
    out
}

/// Reads a scenario written by [`scenario_to_config_string`]; keys not
/// present keep the values of the default catalog entry.
pub fn scenario_from_config_str(text: &str) -> Result<Scenario> {
    let entries = parse_entries(text)?;
    for e in &entries {
        if !SCENARIO_KEYS.contains(&e.key.as_str()) && e.key != "scenario" {
            return Err(e.error("not a scenario key"));
        }
    }
    Ok(RunConfig::resolve(&entries, &[])?.scenario)
}
