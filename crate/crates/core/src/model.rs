//! Coefficients of the attraction-repulsion system, its kinetics, and the
//! analytical facts the simulator checks against: the boundedness region for
//! the exponents `(k, l, m)` and the mass bounds of the nonlocal source.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ImaginaryState, Result};
use crate::grid::{integrate, Field};
use crate::power::Power;

/// ```text
/// u_t = d1 Δu − χ ∇·(u^k ∇v) + ξ ∇·(u^k ∇w) + μ u^m (1 − ∫u)
/// v_t = d2 Δv − α v + K u^l
/// w_t = d3 Δw − β w + K u^l
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub chi: f64,
    pub xi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub k_coef: f64,
    pub l_exp: f64,
    pub k_exp: f64,
    pub m_exp: f64,
}

impl Default for ModelParams {
    /// Unit coefficients, linear kinetics, no source.
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            d3: 1.0,
            chi: 1.0,
            xi: 1.0,
            alpha: 1.0,
            beta: 1.0,
            mu: 0.0,
            k_coef: 1.0,
            l_exp: 1.0,
            k_exp: 1.0,
            m_exp: 1.0,
        }
    }
}

impl ModelParams {
    /// Unit coefficients with the given exponents and logistic rate.
    pub fn with_exponents(k_exp: f64, l_exp: f64, m_exp: f64, mu: f64) -> Self {
        Self { k_exp, l_exp, m_exp, mu, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
            ("chi", self.chi),
            ("xi", self.xi),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("K", self.k_coef),
            ("l", self.l_exp),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParams(format!("mu must be nonnegative, got {}", self.mu)));
        }
        if !(self.k_exp >= 1.0 && self.k_exp.is_finite()) {
            return Err(Error::InvalidParams(format!("k must be >= 1, got {}", self.k_exp)));
        }
        if !(self.m_exp >= 1.0 && self.m_exp.is_finite()) {
            return Err(Error::InvalidParams(format!("m must be >= 1, got {}", self.m_exp)));
        }
        Ok(())
    }

    pub fn taxis_power(&self) -> Power {
        Power::new(self.k_exp)
    }
    pub fn production_power(&self) -> Power {
        Power::new(self.l_exp)
    }
    pub fn source_power(&self) -> Power {
        Power::new(self.m_exp)
    }
}

/// Signal production `f(u) = K u^l`.
///
/// Negative `u` with a fractional `l` yields NaN here; the stepper screens for
/// that case before calling.
#[inline]
pub fn production(u_val: f64, params: &ModelParams) -> f64 {
    params.k_coef * params.production_power().apply(u_val)
}

/// `μ u^m (1 − ∫u)`, with the mass computed once.
pub fn nonlocal_source(u: &Field, params: &ModelParams) -> Result<Field, ImaginaryState> {
    let mut out = Field::zeros(*u.grid());
    if params.mu == 0.0 {
        return Ok(out);
    }
    let factor = params.mu * (1.0 - integrate(u));
    let m = params.source_power();
    for (idx, (o, &x)) in out.values_mut().iter_mut().zip(u.values()).enumerate() {
        let p = m.checked(x).ok_or_else(|| {
            let (i, j) = u.grid().cell(idx);
            ImaginaryState { i, j, value: x, quantity: "u^m" }
        })?;
        *o = factor * p;
    }
    Ok(out)
}

/// One inequality of the boundedness condition, with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub label: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Verdict {
    pub dimension: u32,
    /// All exponent clauses hold.
    pub bounded: bool,
    pub clauses: Vec<Clause>,
    /// μ > 0 is part of the standing hypotheses but not of the exponent region.
    pub mu_positive: bool,
    pub notes: Vec<String>,
}

impl fmt::Display for Theorem1Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}: {}", self.dimension, if self.bounded { "bounded regime" } else { "outside bounded regime" })?;
        for c in &self.clauses {
            writeln!(f, "  [{}] {}", if c.holds { "x" } else { " " }, c.label)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Exponent conditions for uniform boundedness in dimension `n`:
/// `k >= 1`, `l + k < 1 + 2/n` and `1 < m < 1 + 2/n`.
pub fn theorem1_predicate(n: u32, params: &ModelParams) -> Theorem1Verdict {
    assert!(n >= 1, "spatial dimension must be at least 1");
    let (k, l, m) = (params.k_exp, params.l_exp, params.m_exp);
    let cap = 1.0 + 2.0 / n as f64;
    let clauses = vec![
        Clause { label: format!("k = {k} >= 1"), holds: k >= 1.0 },
        Clause { label: format!("l + k = {} < 1 + 2/n = {cap}", l + k), holds: l + k < cap },
        Clause { label: format!("1 < m = {m}"), holds: m > 1.0 },
        Clause { label: format!("m = {m} < 1 + 2/n = {cap}"), holds: m < cap },
    ];
    let bounded = clauses.iter().all(|c| c.holds);
    let mu_positive = params.mu > 0.0;
    let mut notes = Vec::new();
    if n == 1 {
        notes.push("n = 1: global existence holds without restrictions on k, l, m".to_string());
    }
    if !mu_positive {
        notes.push("mu = 0 lies outside the standing hypothesis mu > 0".to_string());
    }
    Theorem1Verdict { dimension: n, bounded, clauses, mu_positive, notes }
}

/// Bounds on the total mass `M(t)` implied by the nonlocal source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEnvelope {
    pub m0: f64,
    pub m_exp: f64,
}

impl MassEnvelope {
    pub fn new(m0: f64, m_exp: f64) -> Self {
        Self { m0, m_exp }
    }

    pub fn lower(&self) -> f64 {
        self.m0.min(1.0)
    }

    pub fn upper(&self) -> f64 {
        self.m0.max(1.0)
    }

    pub fn decay_rate(&self) -> f64 {
        self.m0.powf(self.m_exp).min(1.0)
    }

    /// `|1 − M0| exp(−min{1, M0^m} t)`.
    pub fn envelope(&self, t: f64) -> f64 {
        (1.0 - self.m0).abs() * (-self.decay_rate() * t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ViolationKind {
    BelowLower,
    AboveUpper,
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub t: f64,
    pub mass: f64,
    pub kind: ViolationKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub passed: bool,
    pub m0: f64,
    pub tol: f64,
    pub samples: usize,
    pub worst: f64,
    pub violations: Vec<Violation>,
}

/// Default per-sample tolerance for discrete trajectories: `10 dt (1 + M0)`.
pub fn default_mass_tol(dt: f64, m0: f64) -> f64 {
    10.0 * dt * (1.0 + m0)
}

/// Checks `min{1,M0} ≤ M(t) ≤ max{1,M0}` and the exponential approach of
/// `M(t)` to 1 on a sampled series.
pub fn mass_envelope_check(series: &[(f64, f64)], m0: f64, m_exp: f64, tol: f64) -> Result<EnvelopeReport> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let env = MassEnvelope::new(m0, m_exp);
    let mut violations = Vec::new();
    for (index, &(t, mass)) in series.iter().enumerate() {
        let mut flag = |kind, magnitude: f64| {
            violations.push(Violation { index, t, mass, kind, magnitude });
        };
        if mass < env.lower() - tol {
            flag(ViolationKind::BelowLower, env.lower() - mass);
        }
        if mass > env.upper() + tol {
            flag(ViolationKind::AboveUpper, mass - env.upper());
        }
        let bound = env.envelope(t) * (1.0 + tol);
        let gap = (1.0 - mass).abs();
        if gap > bound {
            flag(ViolationKind::Decay, gap - bound);
        }
    }
    let worst = violations.iter().map(|v| v.magnitude).fold(0.0, f64::max);
    Ok(EnvelopeReport {
        passed: violations.is_empty(),
        m0,
        tol,
        samples: series.len(),
        worst,
        violations,
    })
}
