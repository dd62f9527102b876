//! The reference experiments: radially symmetric Gaussian initial data on the
//! centered unit square, each run with and without the nonlocal source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::model::ModelParams;
use crate::stepper::{EventKind, SimState};

/// `amplitude * exp(-width * (x^2 + y^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub amplitude: f64,
    pub width: f64,
}

impl Gaussian {
    pub const fn new(amplitude: f64, width: f64) -> Self {
        Self { amplitude, width }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.amplitude * (-self.width * (x * x + y * y)).exp()
    }

    pub fn sample(&self, grid: Grid) -> Field {
        Field::from_fn(grid, |x, y| self.eval(x, y))
    }
}

/// Outcome class an experiment is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    /// Decays or settles: `Converged` or `TimeLimit`.
    Convergent,
    Blowup,
    ImaginaryState,
}

impl Expected {
    pub fn matches(&self, kind: EventKind) -> bool {
        match self {
            Expected::Convergent => kind.is_regular(),
            Expected::Blowup => kind == EventKind::Blowup,
            Expected::ImaginaryState => kind == EventKind::ImaginaryState,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Expected::Convergent => "Convergent",
            Expected::Blowup => "Blowup",
            Expected::ImaginaryState => "ImaginaryState",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Convergent" => Some(Expected::Convergent),
            "Blowup" => Some(Expected::Blowup),
            "ImaginaryState" => Some(Expected::ImaginaryState),
            _ => None,
        }
    }

    /// Horizon long enough to show the outcome.
    pub fn default_t_end(&self) -> f64 {
        match self {
            Expected::Convergent => 10.0,
            Expected::Blowup => 1e-4,
            Expected::ImaginaryState => 5e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub u0: Gaussian,
    pub v0: Gaussian,
    pub w0: Gaussian,
    pub t_end: f64,
    pub expected: Option<Expected>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        for (name, g) in [("u0", self.u0), ("v0", self.v0), ("w0", self.w0)] {
            if !(g.amplitude >= 0.0 && g.amplitude.is_finite()) || !(g.width > 0.0 && g.width.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name}: amplitude must be >= 0 and width > 0, got {} / {}",
                    g.amplitude, g.width
                )));
            }
        }
        if self.t_end.is_nan() || self.t_end <= 0.0 {
            return Err(Error::InvalidParams(format!("t_end must be positive, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Multiplies all three amplitudes so that `u0` peaks at `amplitude`.
    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        let s = amplitude / self.u0.amplitude;
        self.u0.amplitude = amplitude;
        self.v0.amplitude *= s;
        self.w0.amplitude *= s;
        self
    }
}

/// Samples the initial data at cell centers.
pub fn build(spec: &Scenario, grid: Grid) -> SimState {
    SimState::new(spec.u0.sample(grid), spec.v0.sample(grid), spec.w0.sample(grid))
}

struct Entry {
    id: &'static str,
    exps: (f64, f64, f64),
    u0: Gaussian,
    v0: Gaussian,
    w0: Gaussian,
    mus: &'static [f64],
    expected: Expected,
}

const LINEAR: (f64, f64, f64) = (1.0, 1.0, 1.0);
const SUBLINEAR: (f64, f64, f64) = (1.0, 0.5, 1.8);
const STEEP_TAXIS: (f64, f64, f64) = (1.5, 0.4, 1.8);

const LARGE_U: Gaussian = Gaussian::new(1000.0, 100.0);
const CHEM_A: Gaussian = Gaussian::new(500.0, 50.0);
const CHEM_B: Gaussian = Gaussian::new(250.0, 25.0);

const BOTH: &[f64] = &[0.0, 1.0];

// (k, l, m) triples and data of every reference experiment
const ENTRIES: &[Entry] = &[
    Entry { id: "ex4_1", exps: LINEAR, u0: LARGE_U, v0: CHEM_A, w0: CHEM_A, mus: BOTH, expected: Expected::Convergent },
    Entry { id: "ex4_2", exps: LINEAR, u0: LARGE_U, v0: CHEM_A, w0: CHEM_B, mus: BOTH, expected: Expected::Convergent },
    Entry { id: "ex4_3", exps: LINEAR, u0: LARGE_U, v0: CHEM_B, w0: CHEM_A, mus: BOTH, expected: Expected::Blowup },
    Entry {
        id: "ex4_4",
        exps: LINEAR,
        u0: Gaussian::new(100.0, 10.0),
        v0: Gaussian::new(25.0, 2.5),
        w0: Gaussian::new(50.0, 5.0),
        mus: BOTH,
        expected: Expected::Convergent,
    },
    Entry { id: "ex4_5", exps: SUBLINEAR, u0: LARGE_U, v0: CHEM_A, w0: CHEM_A, mus: BOTH, expected: Expected::Convergent },
    Entry { id: "ex4_6", exps: SUBLINEAR, u0: LARGE_U, v0: CHEM_A, w0: CHEM_B, mus: &[1.0], expected: Expected::Convergent },
    Entry { id: "ex4_7", exps: SUBLINEAR, u0: LARGE_U, v0: CHEM_B, w0: CHEM_A, mus: BOTH, expected: Expected::Blowup },
    Entry {
        id: "ex4_8",
        exps: SUBLINEAR,
        u0: Gaussian::new(100.0, 10.0),
        v0: Gaussian::new(25.0, 2.5),
        w0: Gaussian::new(50.0, 5.0),
        mus: BOTH,
        expected: Expected::Convergent,
    },
    Entry { id: "ex4_9", exps: STEEP_TAXIS, u0: LARGE_U, v0: CHEM_A, w0: CHEM_B, mus: BOTH, expected: Expected::ImaginaryState },
    Entry { id: "ex4_10", exps: STEEP_TAXIS, u0: LARGE_U, v0: CHEM_B, w0: CHEM_A, mus: BOTH, expected: Expected::ImaginaryState },
    Entry {
        id: "ex4_11",
        exps: STEEP_TAXIS,
        u0: Gaussian::new(10.0, 10.0),
        v0: Gaussian::new(5.0, 5.0),
        w0: Gaussian::new(2.5, 2.5),
        mus: BOTH,
        expected: Expected::Convergent,
    },
];

fn variant_name(id: &str, mu: f64) -> String {
    format!("{id}_mu{mu}")
}

/// Every reference experiment in each source variant it was run with.
pub fn catalog() -> Vec<Scenario> {
    ENTRIES
        .iter()
        .flat_map(|e| {
            e.mus.iter().map(move |&mu| {
                let (k, l, m) = e.exps;
                Scenario {
                    name: variant_name(e.id, mu),
                    params: ModelParams::with_exponents(k, l, m, mu),
                    u0: e.u0,
                    v0: e.v0,
                    w0: e.w0,
                    t_end: e.expected.default_t_end(),
                    expected: Some(e.expected),
                }
            })
        })
        .collect()
}

/// Looks up `ex4_N_mu0` / `ex4_N_mu1`, or the bare `ex4_N` (its first variant).
pub fn lookup(name: &str) -> Result<Scenario> {
    let all = catalog();
    if let Some(s) = all.iter().find(|s| s.name == name) {
        return Ok(s.clone());
    }
    let prefix = format!("{name}_mu");
    all.into_iter()
        .find(|s| s.name.starts_with(&prefix))
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Bare experiment identifiers, in catalog order.
pub fn experiment_ids() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.id).collect()
}
