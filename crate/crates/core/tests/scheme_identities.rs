use proptest::prelude::*;

use tumorsim_core::config::{BoundarySpec, Bump, Profile, RunConfig};
use tumorsim_core::diagnostics::entropy_n2;
use tumorsim_core::preset::{necrotic_core, with_mesh_width, Preset};
use tumorsim_core::run::Simulation;
use tumorsim_core::BoundaryKind;

fn coarse(cfg: RunConfig, h: f64) -> RunConfig {
    let mut cfg = with_mesh_width(cfg, h).unwrap();
    cfg.t_end = 1e6;
    cfg.snapshot_every = None;
    cfg
}

// Summation by parts makes the discrete n^2 balance exact:
// E1 - E0 = source - dissipation_space + dissipation_time.
fn check_entropy_balance(cfg: RunConfig, steps: usize) {
    let mut sim = Simulation::new(cfg).unwrap();
    for _ in 0..steps {
        let e0 = entropy_n2(&sim.state().n);
        let r = sim.step(None).unwrap();
        let e1 = entropy_n2(&sim.state().n);
        let inc = r.entropy;
        let predicted = inc.source - inc.dissipation_space + inc.dissipation_time;
        let scale = e0.abs() + inc.source.abs() + inc.dissipation_space + inc.dissipation_time;
        assert!(((e1 - e0) - predicted).abs() <= 1e-12 * scale, "step {}: {} vs {predicted}", r.step, e1 - e0);
        assert!(e1 - e0 <= inc.source + inc.dissipation_time + 1e-10 * scale);
        assert!(inc.dissipation_space >= 0.0 && inc.dissipation_time >= 0.0);
    }
}

#[test]
fn entropy_balance_is_exact_with_neumann_walls() {
    check_entropy_balance(coarse(necrotic_core(), 0.25), 40);
}

#[test]
fn entropy_balance_is_exact_on_a_periodic_grid() {
    let mut cfg = coarse(Preset::ShapeIrregular.config(), 0.25);
    cfg.grid.bc = BoundaryKind::Periodic;
    cfg.boundary_c = BoundarySpec::Neumann;
    check_entropy_balance(cfg, 40);
}

#[test]
fn mass_is_conserved_without_growth() {
    let mut cfg = coarse(necrotic_core(), 0.25);
    cfg.model.k1 = 0.0;
    cfg.model.k2 = 0.0;
    cfg.model.k3 = 0.0;
    let mut sim = Simulation::new(cfg).unwrap();
    let m0 = sim.state().n.integral();
    for _ in 0..100 {
        let r = sim.step(None).unwrap();
        assert!(r.mass_residual <= 1e-12);
    }
    let m1 = sim.state().n.integral();
    assert!((m1 - m0).abs() <= 1e-12 * m0, "{m0} -> {m1}");
}

#[test]
fn inert_nutrient_is_left_bitwise_unchanged() {
    let mut cfg = coarse(necrotic_core(), 0.25);
    cfg.model.nu_c = 0.0;
    cfg.model.r_c = 0.0;
    cfg.model.lambda_c = 0.0;
    let mut sim = Simulation::new(cfg).unwrap();
    let c0: Vec<u64> = sim.state().c.interior_values().iter().map(|v| v.to_bits()).collect();
    for _ in 0..10 {
        sim.step(None).unwrap();
    }
    let c1: Vec<u64> = sim.state().c.interior_values().iter().map(|v| v.to_bits()).collect();
    assert_eq!(c0, c1);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let trace = || {
        let mut sim = Simulation::new(coarse(Preset::Drug.config(), 0.25)).unwrap();
        let mut dts = Vec::new();
        for _ in 0..10 {
            dts.push(sim.step(None).unwrap().sizes.dt.to_bits());
        }
        let s = sim.state();
        let bits = |f: &tumorsim_core::Field| f.interior_values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        (dts, bits(&s.n), bits(&s.w), bits(&s.c), bits(s.q.as_ref().unwrap()))
    };
    assert_eq!(trace(), trace());
}

#[test]
fn drug_run_stays_in_range() {
    let mut sim = Simulation::new(coarse(Preset::Drug.config(), 0.25)).unwrap();
    let n_bar = sim.bounds().n_bar;
    for _ in 0..30 {
        let r = sim.step(None).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.n_min >= -1e-12 && r.n_max <= n_bar + 1e-12);
        let (lo, hi) = (r.q_min.unwrap(), r.q_max.unwrap());
        assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
    }
}

#[test]
fn strict_mode_aborts_on_an_oversized_step() {
    let mut cfg = coarse(necrotic_core(), 0.25);
    cfg.kappa = 1.5;
    cfg.strict = true;
    let mut sim = Simulation::new(cfg).unwrap();
    let err = (0..200).find_map(|_| sim.step(None).err()).expect("a violation");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn lenient_mode_reports_the_same_violation() {
    let mut cfg = coarse(necrotic_core(), 0.25);
    cfg.kappa = 1.5;
    cfg.strict = false;
    let mut sim = Simulation::new(cfg).unwrap();
    let found = (0..200).any(|_| !sim.step(None).unwrap().violations.is_empty());
    assert!(found);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_colonies_respect_the_density_bounds(
        bumps in prop::collection::vec((0.05f64..1.0, -2.0f64..2.0, -2.0f64..2.0, 0.5f64..20.0), 1..4),
        c0 in 0.0f64..1.0,
    ) {
        let mut cfg = coarse(necrotic_core(), 0.375);
        let bumps: Vec<Bump> = bumps.into_iter().map(|(a, x, y, w)| Bump { amplitude: a, center: vec![x, y], width: w }).collect();
        cfg.initial_n = Profile::Gaussians(bumps);
        cfg.initial_c = Profile::Constant(c0);
        // overlapping bumps can exceed the admissible pressure and are rejected up front
        let sim = Simulation::new(cfg.clone());
        prop_assume!(sim.is_ok());
        let mut sim = sim.unwrap();
        let n_bar = sim.bounds().n_bar;
        for _ in 0..15 {
            let r = sim.step(None).unwrap();
            prop_assert!(r.violations.is_empty(), "{:?}", r.violations);
            prop_assert!(r.n_min >= -1e-12 && r.n_max <= n_bar + 1e-12);
            prop_assert!(r.c_min >= -1e-12 && r.c_max <= cfg.model.c_inf + 1e-12);
            prop_assert!(r.min_self_weight >= -1e-12);
        }
    }
}
