//! Invariants of the discrete model over randomly generated inputs.

mod common;

use chemotaxis::config::RunConfig;
use chemotaxis::diagnostics::{convergence_order, norms};
use chemotaxis::scenarios::{self, Gaussian};
use chemotaxis::stepper::{self, Stepper};
use chemotaxis::{
    chemo_divergence, integrate, laplacian, mass_envelope_check, nonlocal_source, production, theorem1_predicate, Field,
    Grid, ModelParams, SimState, StepPolicy,
};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Grid> {
    (2usize..14, 2usize..14).prop_map(|(nx, ny)| Grid::new(nx, ny, -0.5, 0.5, -0.5, 0.5).unwrap())
}

fn field(g: Grid, lo: f64, hi: f64) -> impl Strategy<Value = Field> {
    prop::collection::vec(lo..hi, g.len()).prop_map(move |v| Field::from_values(g, v).unwrap())
}

fn grid_and_fields(lo: f64, hi: f64) -> impl Strategy<Value = (Field, Field, Field)> {
    grid_strategy().prop_flat_map(move |g| (field(g, lo, hi), field(g, lo, hi), field(g, lo, hi)))
}

fn scale(f: &Field) -> f64 {
    f.values().iter().fold(0.0f64, |m, x| m.max(x.abs())) * f.grid().area()
}

fn exponents() -> impl Strategy<Value = ModelParams> {
    (
        prop::sample::select(vec![1.0, 1.5, 2.0, 1.3]),
        prop::sample::select(vec![0.4, 0.5, 1.0, 0.7]),
        prop::sample::select(vec![1.0, 1.8, 2.0]),
        prop::sample::select(vec![0.0, 1.0, 0.5]),
    )
        .prop_map(|(k, l, m, mu)| ModelParams::with_exponents(k, l, m, mu))
}

/// Radial data stays invariant under the dihedral group of the square.
fn assert_symmetric(f: &Field, tol: f64) -> Result<(), TestCaseError> {
    let s = f.values().iter().fold(1e-300f64, |m, x| m.max(x.abs()));
    for (name, g) in [("x", f.reflect_x()), ("y", f.reflect_y()), ("diag", f.transpose())] {
        prop_assert!(f.max_abs_diff(&g) <= tol * s, "{} reflection off by {:e}", name, f.max_abs_diff(&g) / s);
    }
    let anti = f.transpose().reflect_x().reflect_y();
    prop_assert!(f.max_abs_diff(&anti) <= tol * s);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operators_match_oracles_and_conserve((u, s, _) in grid_and_fields(0.0, 2.0), k in 1.0f64..3.0) {
        let lap = laplacian(&s);
        prop_assert!(common::rel_dev(&lap, &common::laplacian(&s)) <= 1e-13);
        prop_assert!(integrate(&lap).abs() <= 1e-12 * scale(&lap).max(1e-300));
        let div = chemo_divergence(&u, &s, k).unwrap();
        prop_assert!(common::rel_dev(&div, &common::chemo_divergence(&u, &s, k)) <= 1e-13);
        prop_assert!(integrate(&div).abs() <= 1e-12 * scale(&div).max(1e-300));
    }

    #[test]
    fn mass_is_conserved_without_source((u, v, w) in grid_and_fields(0.0, 5.0), p in exponents()) {
        let p = ModelParams { mu: 0.0, ..p };
        let mut s = SimState::new(u, v, w);
        let mut st = Stepper::new(p, StepPolicy::default());
        for _ in 0..20 {
            let before = s.mass();
            if st.step(&mut s).is_some() {
                break;
            }
            prop_assert!((s.mass() - before).abs() <= 1e-11 * before.abs().max(1e-300));
        }
    }

    #[test]
    fn mass_follows_its_ode_per_step((u, v, w) in grid_and_fields(0.0, 3.0), p in exponents(), mu in 0.1f64..2.0) {
        let p = ModelParams { mu, ..p };
        let mut s = SimState::new(u, v, w);
        let mut st = Stepper::new(p, StepPolicy::default());
        for _ in 0..10 {
            let m = s.mass();
            let source: f64 = integrate(&Field::from_values(*s.u.grid(), s.u.values().iter().map(|x| x.powf(p.m_exp)).collect()).unwrap());
            if st.step(&mut s).is_some() {
                break;
            }
            let predicted = s.last_dt * mu * source * (1.0 - m);
            let roundoff = 1e-12 * (m.abs() + (s.last_dt * mu * source * (1.0 + m)).abs());
            prop_assert!((s.mass() - m - predicted).abs() <= roundoff, "{} vs {}", s.mass() - m, predicted);
        }
    }

    #[test]
    fn radial_data_keeps_square_symmetries(
        n in 5usize..24,
        a in (1.0f64..100.0, 1.0f64..60.0),
        b in (1.0f64..100.0, 1.0f64..60.0),
        c in (1.0f64..100.0, 1.0f64..60.0),
        p in exponents(),
    ) {
        let g = Grid::unit_square(n).unwrap();
        let mut s = SimState::new(
            Gaussian::new(a.0, a.1).sample(g),
            Gaussian::new(b.0, b.1).sample(g),
            Gaussian::new(c.0, c.1).sample(g),
        );
        let mut st = Stepper::new(p, StepPolicy::default());
        for _ in 0..40 {
            if st.step(&mut s).is_some() {
                break;
            }
        }
        for f in [&s.u, &s.v, &s.w] {
            assert_symmetric(f, 1e-10)?;
        }
    }

    #[test]
    fn production_is_homogeneous(u in 0.0f64..1e3, lambda in 0.01f64..100.0, l in 0.1f64..3.0, kc in 0.1f64..10.0) {
        let p = ModelParams { k_coef: kc, ..ModelParams::with_exponents(1.0, l, 1.0, 0.0) };
        let lhs = production(lambda * u, &p);
        let rhs = lambda.powf(l) * production(u, &p);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn source_sign_follows_total_mass((u, _, _) in grid_and_fields(0.0, 3.0), m in 1.0f64..3.0, mu in 0.1f64..3.0) {
        let p = ModelParams::with_exponents(1.0, 1.0, m, mu);
        let src = nonlocal_source(&u, &p).unwrap();
        let sign = 1.0 - integrate(&u);
        for (&x, &ui) in src.values().iter().zip(u.values()) {
            prop_assert!(x * sign >= 0.0);
            prop_assert!(ui > 0.0 || x == 0.0);
        }
    }

    #[test]
    fn theorem1_matches_inequalities_and_is_monotone(k in 1.0f64..2.0, l in 0.05f64..1.5, m in 1.0f64..2.5, dl in 0.0f64..0.5) {
        let p = ModelParams::with_exponents(k, l, m, 1.0);
        let v = theorem1_predicate(2, &p);
        prop_assert_eq!(v.bounded, k >= 1.0 && l + k < 2.0 && 1.0 < m && m < 2.0);
        // lowering l cannot leave the bounded region
        if v.bounded && l > dl {
            let lower = ModelParams { l_exp: l - dl, ..p };
            prop_assert!(theorem1_predicate(2, &lower).bounded);
        }
        // higher dimension only shrinks the region
        if theorem1_predicate(3, &p).bounded {
            prop_assert!(v.bounded);
        }
    }

    #[test]
    fn unit_area_norms_are_ordered((u, _, _) in grid_and_fields(-4.0, 4.0)) {
        let n = norms(&u, &[1.0, 2.0, 4.0]);
        prop_assert!(n.lp[0] <= n.lp[1] * (1.0 + 1e-12));
        prop_assert!(n.lp[1] <= n.lp[2] * (1.0 + 1e-12));
        prop_assert!(n.lp[2] <= n.max.abs().max(n.min.abs()) * (1.0 + 1e-12));
    }

    #[test]
    fn logistic_mass_passes_envelope(m0 in 0.05f64..40.0) {
        // the exact mass law for m = 1, from either side of 1
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let series: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 1.0 / (1.0 - (1.0 - 1.0 / m0) * (-t).exp()))).collect();
        let r = mass_envelope_check(&series, m0, 1.0, 1e-12).unwrap();
        prop_assert!(r.passed, "{:?}", r.violations);
    }

    #[test]
    fn convergence_order_recovers_power_laws(order in 0.5f64..4.0, c in 1e-6f64..1e3, h0 in 0.01f64..1.0) {
        let samples: Vec<(f64, f64)> = (0..4).map(|i| {
            let h = h0 / 2f64.powi(i);
            (h, c * h.powf(order))
        }).collect();
        prop_assert!((convergence_order(&samples).unwrap() - order).abs() < 1e-9);
    }

    #[test]
    fn config_text_round_trips(
        idx in 0usize..21,
        nx in 3usize..400,
        ny in 3usize..400,
        safety in 0.01f64..1.0,
        dt_max in 1e-9f64..1.0,
        t_end in 1e-6f64..20.0,
        snapshots in 0usize..10,
        chi in 0.1f64..5.0,
    ) {
        let name = scenarios::catalog()[idx].name.clone();
        let text = format!("scenario = {name}\nnx = {nx}\nny = {ny}\nsafety = {safety:?}\ndt_max = {dt_max:?}\nt_end = {t_end:?}\nsnapshots = {snapshots}\nchi = {chi:?}\n");
        let cfg = RunConfig::from_config_str(&text).unwrap();
        let again = RunConfig::from_config_str(&cfg.to_config_string()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.to_config_string(), again.to_config_string());
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let s = scenarios::lookup("ex4_9_mu1").unwrap();
    let g = Grid::unit_square(33).unwrap();
    let run = || {
        let mut state = scenarios::build(&s, g);
        let ev = stepper::run(&mut state, &s.params, &StepPolicy::default(), 1e-4, &mut []);
        (ev, state)
    };
    let (a, b) = (run(), run());
    assert_eq!(a.0, b.0);
    let bits = |f: &Field| f.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    for (x, y) in [(&a.1.u, &b.1.u), (&a.1.v, &b.1.v), (&a.1.w, &b.1.w)] {
        assert_eq!(bits(x), bits(y));
    }
}
