//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Pass criterion numbers as arguments to run a subset.

mod common;

use std::time::Instant;

use chemotaxis::diagnostics::{convergence_order, simulate, RunReport, SimulateOptions};
use chemotaxis::io::{series_csv, snapshot_csv};
use chemotaxis::scenarios::{self, Scenario};
use chemotaxis::stepper::{EventKind, Stepper};
use chemotaxis::verify;
use chemotaxis::{
    chemo_divergence, integrate, laplacian, theorem1_predicate, Field, Grid, SimState, StepPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// criterion 1
const ORACLE_RTOL: f64 = 1e-13;
const CONSERVATION_RTOL: f64 = 1e-12;
// criterion 2
const SPATIAL_ORDER: (f64, f64) = (1.8, 2.2);
const TEMPORAL_ORDER: (f64, f64) = (0.8, 1.2);
const MMS_GRIDS: [usize; 3] = [32, 64, 128];
const MMS_TEMPORAL_GRID: usize = 64;
// criterion 3
const MASS_RTOL: f64 = 1e-11;
const MASS_STEPS: u64 = 10_000;
/// Roundoff allowance of the per-step mass identity, relative to the terms involved.
const MASS_ODE_RTOL: f64 = 1e-12;
// criteria 4 and 7
const REDUCED_GRID: usize = 101;
const REDUCED_T_END: f64 = 2.0;
const DECAY_LIMIT: f64 = 0.05 * 1000.0;
const MONOTONE_AFTER: f64 = 0.01;
// criteria 5 and 6
const REFERENCE_GRID: usize = 201;
const BLOWUP_BY: f64 = 1e-4;
const IMAGINARY_BY: f64 = 2e-6;
// criterion 9
const SYMMETRY_RTOL: f64 = 1e-10;
const SYMMETRY_STEPS: u64 = 1000;
const SYMMETRY_GRID: usize = 51;

type Verdict = (bool, String);
type Criterion = (u32, &'static str, fn() -> Verdict);

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [Criterion; 9] = [
        (1, "operator oracles", operators),
        (2, "manufactured-solution orders", mms_orders),
        (3, "mass laws", mass_laws),
        (4, "ex4_1 decay", ex4_1_decay),
        (5, "ex4_3 blowup", ex4_3_blowup),
        (6, "ex4_9/ex4_10 imaginary state", imaginary_state),
        (7, "small-data rescue", small_data),
        (8, "boundedness predicate table", predicate_table),
        (9, "symmetry and determinism", symmetry_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = check();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {id} ({name}): {detail} [{secs:.1} s]", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

fn random_field(g: Grid, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Field {
    Field::from_values(g, (0..g.len()).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

fn imbalance(f: &Field) -> f64 {
    let scale = f.values().iter().fold(0.0f64, |m, x| m.max(x.abs())) * f.grid().area();
    integrate(f).abs() / scale.max(f64::MIN_POSITIVE)
}

fn operators() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut dev, mut cons) = (0.0f64, 0.0f64);
    for n in [8, 32] {
        let g = Grid::unit_square(n).unwrap();
        for _ in 0..10 {
            let f = random_field(g, &mut rng, -1.0, 1.0);
            let lap = laplacian(&f);
            dev = dev.max(common::rel_dev(&lap, &common::laplacian(&f)));
            cons = cons.max(imbalance(&lap));
            for k in [1.0, 1.5, 2.0] {
                let u = random_field(g, &mut rng, 0.0, 2.0);
                let div = chemo_divergence(&u, &f, k).unwrap();
                dev = dev.max(common::rel_dev(&div, &common::chemo_divergence(&u, &f, k)));
                cons = cons.max(imbalance(&div));
            }
        }
    }
    let ok = dev <= ORACLE_RTOL && cons <= CONSERVATION_RTOL;
    (ok, format!("max oracle deviation {dev:.2e} (tol {ORACLE_RTOL:e}), max |integral|/scale {cons:.2e} (tol {CONSERVATION_RTOL:e})"))
}

fn order_in(samples: &[(f64, f64)], (lo, hi): (f64, f64)) -> (bool, String) {
    match convergence_order(samples) {
        Ok(q) => ((lo..=hi).contains(&q), format!("{q:.4} in [{lo}, {hi}]")),
        Err(e) => (false, e.to_string()),
    }
}

fn mms_orders() -> Verdict {
    let (s_ok, s) = order_in(&verify::spatial_study(&MMS_GRIDS), SPATIAL_ORDER);
    let (t_ok, t) = order_in(&verify::temporal_study(MMS_TEMPORAL_GRID), TEMPORAL_ORDER);
    (s_ok && t_ok, format!("spatial order {s} over {MMS_GRIDS:?}; temporal order {t} at {MMS_TEMPORAL_GRID}^2"))
}

fn reduced_state(s: &Scenario, n: usize) -> SimState {
    scenarios::build(s, Grid::unit_square(n).unwrap())
}

fn mass_laws() -> Verdict {
    // μ = 0: total drift over many steps
    let s0 = scenarios::lookup("ex4_1_mu0").unwrap();
    let mut state = reduced_state(&s0, 41);
    let m0 = state.mass();
    let mut st = Stepper::new(s0.params, StepPolicy::default());
    let mut early = None;
    while state.step < MASS_STEPS {
        if let Some(ev) = st.step(&mut state) {
            early = Some(ev);
            break;
        }
    }
    let drift = (state.mass() - m0).abs() / m0;
    let conserve_ok = early.is_none() && drift <= MASS_RTOL;

    // μ = 1: per-step identity, then the envelope of the recorded series
    let s1 = scenarios::lookup("ex4_1_mu1").unwrap();
    let p = s1.params;
    let mut state = reduced_state(&s1, 41);
    let mut st = Stepper::new(p, StepPolicy::default());
    let mut worst: f64 = 0.0;
    for _ in 0..MASS_STEPS {
        let m = state.mass();
        let um = Field::from_values(*state.grid(), state.u.values().iter().map(|x| x.powf(p.m_exp)).collect()).unwrap();
        let src = common::quadrature(&um);
        if st.step(&mut state).is_some() {
            break;
        }
        let predicted = state.last_dt * p.mu * src * (1.0 - m);
        let scale = m.abs() + (state.last_dt * p.mu * src * (1.0 + m)).abs();
        worst = worst.max((state.mass() - m - predicted).abs() / scale);
    }
    let ode_ok = worst <= MASS_ODE_RTOL;

    let (report, _) =
        simulate(reduced_state(&s1, 51), &p, &StepPolicy::default(), REDUCED_T_END, SimulateOptions::default(), &mut []);
    let env = &report.envelope_check.report;
    let env_ok = report.envelope_check.ok() && report.event.kind.is_regular();

    (
        conserve_ok && ode_ok && env_ok,
        format!(
            "mu=0 drift {drift:.2e} over {} steps (tol {MASS_RTOL:e}); mu=1 per-step identity residual {worst:.2e} (tol {MASS_ODE_RTOL:e}); envelope {} with tol {:.2e}, {} violations",
            state_steps(early.as_ref().map(|e| e.step)),
            if env_ok { "pass" } else { "FAIL" },
            env.tol,
            env.violations.len()
        ),
    )
}

fn state_steps(early: Option<u64>) -> String {
    match early {
        None => MASS_STEPS.to_string(),
        Some(n) => format!("only {n} (terminal event)"),
    }
}

fn run_reduced(name: &str, n: usize, t_end: f64) -> RunReport {
    let s = scenarios::lookup(name).unwrap();
    simulate(reduced_state(&s, n), &s.params, &StepPolicy::default(), t_end, SimulateOptions::default(), &mut []).0
}

fn decays(name: &str) -> (bool, String) {
    let r = run_reduced(name, REDUCED_GRID, REDUCED_T_END);
    let last = r.series.last().unwrap();
    let tail: Vec<f64> = r.series.iter().filter(|x| x.t >= MONOTONE_AFTER).map(|x| x.max_u).collect();
    let rises = tail.windows(2).filter(|w| w[1] > w[0]).count();
    // a Converged run has reached its steady state, which then holds at t_end
    let reached = match r.event.kind {
        EventKind::Converged => true,
        EventKind::TimeLimit => last.t >= REDUCED_T_END * (1.0 - 1e-12),
        _ => false,
    };
    let ok = reached && last.max_u < DECAY_LIMIT && rises == 0;
    (ok, format!("{name}: {} at t={:.3e}, max u {:.3} (< {DECAY_LIMIT}), {rises} rises after t={MONOTONE_AFTER}", r.event.kind, r.event.t_event, last.max_u))
}

fn ex4_1_decay() -> Verdict {
    let results: Vec<_> = ["ex4_1_mu0", "ex4_1_mu1"].into_iter().map(decays).collect();
    (results.iter().all(|r| r.0), results.iter().map(|r| r.1.as_str()).collect::<Vec<_>>().join("; "))
}

fn ex4_3_blowup() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["ex4_3_mu0", "ex4_3_mu1"] {
        let r = run_reduced(name, REFERENCE_GRID, BLOWUP_BY);
        let peak = r.series.iter().map(|x| (x.max_u, x.t)).fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
        let hit = r.event.kind == EventKind::Blowup && r.event.t_event < BLOWUP_BY;
        ok &= hit;
        parts.push(format!(
            "{name}: {} at t={:.3e} (want Blowup before {BLOWUP_BY:e}); peak max u {:.1} at t={:.2e}, final {:.1}",
            r.event.kind,
            r.event.t_event,
            peak.0,
            peak.1,
            r.series.last().unwrap().max_u
        ));
    }
    (ok, parts.join("; "))
}

fn imaginary_state() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for ex in ["ex4_9", "ex4_10"] {
        // horizon well past the bound so the ordering is measured even when the bound is missed
        let times: Vec<(f64, EventKind)> = ["mu0", "mu1"]
            .iter()
            .map(|v| {
                let r = run_reduced(&format!("{ex}_{v}"), REFERENCE_GRID, 10.0 * IMAGINARY_BY);
                (r.event.t_event, r.event.kind)
            })
            .collect();
        let early = times.iter().all(|&(t, k)| k == EventKind::ImaginaryState && t < IMAGINARY_BY);
        let ordered = times[0].0 <= times[1].0;
        ok &= early && ordered;
        parts.push(format!(
            "{ex}: mu0 {} at {:.4e}, mu1 {} at {:.4e} (want ImaginaryState before {IMAGINARY_BY:e}: {}; mu0 <= mu1: {})",
            times[0].1,
            times[0].0,
            times[1].1,
            times[1].0,
            if early { "yes" } else { "NO" },
            if ordered { "yes" } else { "NO" }
        ));
    }
    (ok, parts.join("; "))
}

fn small_data() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["ex4_4_mu0", "ex4_4_mu1", "ex4_8_mu0", "ex4_8_mu1", "ex4_11_mu0", "ex4_11_mu1"] {
        let r = run_reduced(name, REDUCED_GRID, REDUCED_T_END);
        let good = r.event.kind.is_regular();
        ok &= good;
        parts.push(format!("{name} {}", r.event.kind));
    }
    (ok, parts.join(", "))
}

fn predicate_table() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, want) in [("ex4_1_mu1", false), ("ex4_5_mu1", true), ("ex4_9_mu1", true)] {
        let p = scenarios::lookup(name).unwrap().params;
        let (k, l, m) = (p.k_exp, p.l_exp, p.m_exp);
        let hand = k >= 1.0 && l + k < 2.0 && 1.0 < m && m < 2.0;
        let got = theorem1_predicate(2, &p).bounded;
        ok &= got == want && got == hand;
        parts.push(format!("{name} (k={k}, l={l}, m={m}) -> {got}"));
    }
    let note = "ex4_9 lies inside the region yet its large-data runs end in ImaginaryState (criterion 6)";
    (ok, format!("{}; {note}", parts.join(", ")))
}

fn asymmetry(f: &Field) -> f64 {
    let scale = f.values().iter().fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
    let anti = f.transpose().reflect_x().reflect_y();
    [f.reflect_x(), f.reflect_y(), f.transpose(), anti].iter().map(|g| f.max_abs_diff(g)).fold(0.0, f64::max) / scale
}

/// Steps taken (up to the target) and the worst asymmetry seen on the way.
fn symmetric_run(s: &Scenario, g: Grid, policy: StepPolicy) -> (u64, f64) {
    let mut state = scenarios::build(s, g);
    let mut st = Stepper::new(s.params, policy);
    let mut worst: f64 = 0.0;
    while state.step < SYMMETRY_STEPS {
        let ev = st.step(&mut state);
        if !state.is_finite() {
            break;
        }
        worst = worst.max(asymmetry(&state.u).max(asymmetry(&state.v)).max(asymmetry(&state.w)));
        if ev.is_some() {
            break;
        }
    }
    (state.step, worst)
}

fn symmetry_determinism() -> Verdict {
    let g = Grid::unit_square(SYMMETRY_GRID).unwrap();
    let mut worst: f64 = 0.0;
    let mut clipped = Vec::new();
    for s in scenarios::catalog() {
        let (steps, asym) = symmetric_run(&s, g, StepPolicy::default());
        worst = worst.max(asym);
        if steps < SYMMETRY_STEPS {
            // the run ended in a terminal event; keep exercising the stepper
            // past it with clipping so the full step count is observed
            let policy = StepPolicy { clip_negative: true, blowup_threshold: f64::MAX, ..StepPolicy::default() };
            let (steps, asym) = symmetric_run(&s, g, policy);
            worst = worst.max(asym);
            clipped.push(format!("{}({steps})", s.name));
            if steps < SYMMETRY_STEPS {
                worst = f64::INFINITY;
            }
        }
    }
    let sym_ok = worst <= SYMMETRY_RTOL;

    let outputs = || {
        let s = scenarios::lookup("ex4_5_mu1").unwrap();
        let (r, last) =
            simulate(reduced_state(&s, 41), &s.params, &StepPolicy::default(), 0.05, SimulateOptions::default(), &mut []);
        let mut bytes = series_csv(&r.series, &r.p_norms).into_bytes();
        bytes.extend(snapshot_csv(&last.u, "u", last.t, last.step).into_bytes());
        bytes.extend(chemotaxis::io::report_json(&r).into_bytes());
        bytes
    };
    let identical = outputs() == outputs();
    let detail = format!(
        "max asymmetry {worst:.2e} (tol {SYMMETRY_RTOL:e}) over {} scenarios, {} steps each{}; repeated run outputs {}",
        scenarios::catalog().len(),
        SYMMETRY_STEPS,
        if clipped.is_empty() {
            String::new()
        } else {
            format!(" (ended early by a terminal event, continued with clipping: {})", clipped.join(", "))
        },
        if identical { "byte-identical" } else { "DIFFER" }
    );
    (sym_ok && identical, detail)
}
