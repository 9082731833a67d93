//! Self-checks run against a configuration: invariant sweeps over perturbed
//! initial data, self-convergence under refinement, and an elliptic
//! round trip on manufactured potentials.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::RunConfig;
use crate::elliptic::HelmholtzProblem;
use crate::error::{Error, Result};
use crate::grid::{make_grid, BoundaryKind, Field, FieldName, Grid};
use crate::preset::with_mesh_width;
use crate::run::{initial_fields, Simulation};

/// Perturbed initial densities tried in addition to the configured one.
pub const PERTURBED_RUNS: usize = 3;
pub const PERTURBATION_SEED: u64 = 20_240_601;
pub const ROUND_TRIP_SAMPLES: usize = 50;
pub const ROUND_TRIP_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Invariants,
    Convergence,
    Manufactured,
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invariants" => Ok(VerifyMode::Invariants),
            "convergence" => Ok(VerifyMode::Convergence),
            "manufactured" => Ok(VerifyMode::Manufactured),
            _ => Err(Error::config(format!("unknown verify mode `{s}` (expected invariants, convergence or manufactured)"))),
        }
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Invariants => "invariants",
            VerifyMode::Convergence => "convergence",
            VerifyMode::Manufactured => "manufactured",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub passed: bool,
    pub failures: Vec<String>,
    pub details: serde_json::Value,
}

pub fn verify(cfg: &RunConfig, mode: VerifyMode) -> Result<VerifyReport> {
    match mode {
        VerifyMode::Invariants => verify_invariants(cfg, PERTURBED_RUNS, PERTURBATION_SEED),
        VerifyMode::Convergence => verify_convergence(cfg),
        VerifyMode::Manufactured => verify_manufactured(cfg),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantRun {
    pub run: usize,
    pub steps: usize,
    pub t: f64,
    pub violations: usize,
    pub entropy_inequality: bool,
    pub error: Option<String>,
}

/// Scales each cell of `n` by a factor in `[0.8, 1.2]` and clips to the
/// admissible range `[0, n_inf]`.
pub fn perturb_density(n: &Field, n_inf: f64, rng: &mut StdRng) -> Field {
    let mut out = n.clone();
    for m in n.grid().interior_indices() {
        let v = n.get(m) * rng.gen_range(0.8..1.2);
        out.set(m, v.clamp(0.0, n_inf));
    }
    out
}

/// Runs the configuration and `perturbed` randomised variants with every
/// invariant check collected rather than aborting.
pub fn verify_invariants(cfg: &RunConfig, perturbed: usize, seed: u64) -> Result<VerifyReport> {
    let mut cfg = cfg.clone();
    cfg.strict = false;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut runs = Vec::new();
    let (n0, c0, q0) = initial_fields(&cfg)?;
    for k in 0..=perturbed {
        let n = if k == 0 { n0.clone() } else { perturb_density(&n0, cfg.model.n_inf(), &mut rng) };
        let mut sim = Simulation::from_fields(cfg.clone(), n, c0.clone(), q0.clone())?;
        let mut count = 0;
        let outcome = sim.run(|_, report, _| {
            if let Some(r) = report {
                for v in &r.violations {
                    count += 1;
                    if failures.len() < 100 {
                        failures.push(format!("run {k}, step {}: {v}", r.step));
                    }
                }
            }
            Ok(())
        });
        let error = outcome.err().map(|e| e.to_string());
        if let Some(e) = &error {
            failures.push(format!("run {k}: {e}"));
        }
        let e1 = crate::diagnostics::entropy_n2(&sim.state().n);
        let entropy_inequality = sim.totals().inequality_holds(sim.initial_entropy(), e1);
        if !entropy_inequality {
            failures.push(format!("run {k}: integrated entropy inequality fails"));
        }
        runs.push(InvariantRun { run: k, steps: sim.state().step, t: sim.state().t, violations: count, entropy_inequality, error });
    }
    Ok(VerifyReport { mode: VerifyMode::Invariants, passed: failures.is_empty(), failures, details: serde_json::json!({ "runs": runs }) })
}

/// Cell averages of `fine` on a grid with half as many cells per axis.
pub fn coarsen(fine: &Field, coarse: &Grid) -> Result<Field> {
    let fg = fine.grid();
    let d = fg.dim();
    if coarse.dim() != d || (0..d).any(|a| fg.n_cells()[a] != 2 * coarse.n_cells()[a]) {
        return Err(Error::config("coarsening needs exactly twice the cells per axis"));
    }
    let mut out = Field::zeros(coarse, fine.name());
    let children = 1usize << d;
    for m in coarse.interior_indices() {
        let mut sum = 0.0;
        for k in 0..children {
            let mut fm = [0usize; 3];
            for a in 0..d {
                fm[a] = 2 * m[a] - 1 + ((k >> a) & 1);
            }
            sum += fine.get(fm);
        }
        out.set(m, sum / children as f64);
    }
    Ok(out)
}

pub fn l1_distance(a: &Field, b: &Field) -> f64 {
    let g = a.grid();
    let (av, bv) = (a.values(), b.values());
    let mut s = 0.0;
    g.for_each_cell(|i| s += (av[i] - bv[i]).abs());
    s * g.cell_volume()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub mesh_widths: Vec<f64>,
    /// `L¹(n_h - C n_{h/2})` for consecutive pairs.
    pub differences: Vec<f64>,
    pub orders: Vec<f64>,
}

/// Final densities at `h`, `h/2`, `h/4` compared after coarsening.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<ConvergenceStudy> {
    let mut finals = Vec::new();
    let mut mesh_widths = Vec::new();
    for l in 0..levels {
        let h = cfg.grid.h / (1usize << l) as f64;
        let mut c = with_mesh_width(cfg.clone(), h)?;
        c.snapshot_every = None;
        let mut sim = Simulation::new(c)?;
        sim.run(|_, _, _| Ok(()))?;
        finals.push(sim.state().n.clone());
        mesh_widths.push(h);
    }
    let mut differences = Vec::new();
    for l in 0..levels.saturating_sub(1) {
        let coarse = &finals[l];
        differences.push(l1_distance(coarse, &coarsen(&finals[l + 1], coarse.grid())?));
    }
    let orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceStudy { mesh_widths, differences, orders })
}

pub fn verify_convergence(cfg: &RunConfig) -> Result<VerifyReport> {
    let study = convergence_study(cfg, 3)?;
    let mut failures = Vec::new();
    if !study.differences.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("L1 differences do not decrease: {:?}", study.differences));
    }
    for o in &study.orders {
        if !(*o >= 0.5) {
            failures.push(format!("empirical order {o} below 0.5"));
        }
    }
    Ok(VerifyReport { mode: VerifyMode::Convergence, passed: failures.is_empty(), failures, details: serde_json::to_value(&study).unwrap_or_default() })
}

/// A random smooth potential built from low modes compatible with `bc`.
fn smooth_potential(g: &Grid, rng: &mut StdRng) -> Field {
    let d = g.dim();
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..6)
        .map(|_| ((0..d).map(|_| rng.gen_range(0..=3) as f64).collect(), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let offset = rng.gen_range(-1.0..1.0);
    let periodic = g.bc() == BoundaryKind::Periodic;
    let origin: Vec<f64> = g.origin().to_vec();
    let extent: Vec<f64> = (0..d).map(|a| g.extent(a)).collect();
    Field::from_fn(g, FieldName::W, |x| {
        let mut v = offset;
        for (k, amp, phase) in &modes {
            let mut term = *amp;
            for a in 0..d {
                let xi = (x[a] - origin[a]) / extent[a];
                term *= if periodic { (2.0 * PI * k[a] * xi + phase).cos() } else { (PI * k[a] * xi).cos() };
            }
            v += term;
        }
        v
    })
}

/// Relative L² errors of `solve(A W0)` against `W0` for random smooth `W0`.
pub fn elliptic_round_trip(grid: &Grid, mu: f64, tol: f64, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut prob = HelmholtzProblem::new(grid, mu, tol, None)?;
    let mut errs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut exact = smooth_potential(grid, &mut rng);
        let p = prob.apply_operator(&mut exact);
        let mut w = Field::zeros(grid, FieldName::W);
        prob.solve(&p, &mut w)?;
        let (wv, ev) = (w.values(), exact.values());
        let (mut num, mut den) = (0.0, 0.0);
        grid.for_each_cell(|i| {
            num += (wv[i] - ev[i]).powi(2);
            den += ev[i] * ev[i];
        });
        errs.push((num / den).sqrt());
    }
    Ok(errs)
}

/// Square (or cubic) grid with [`ROUND_TRIP_CELLS`] cells per axis over the
/// configured domain.
pub fn round_trip_grid(cfg: &RunConfig, bc: BoundaryKind) -> Result<Grid> {
    let d = cfg.grid.dim;
    let extent = cfg.grid.n_cells[0] as f64 * cfg.grid.h;
    make_grid(d, &vec![ROUND_TRIP_CELLS; d], extent / ROUND_TRIP_CELLS as f64, &cfg.grid.origin, bc)
}

pub fn verify_manufactured(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let mut details = serde_json::Map::new();
    for (k, bc) in [BoundaryKind::Periodic, BoundaryKind::Neumann].into_iter().enumerate() {
        let g = round_trip_grid(cfg, bc)?;
        let errs = elliptic_round_trip(&g, cfg.model.mu, cfg.solver_tol, ROUND_TRIP_SAMPLES, 7 + k as u64)?;
        let worst = errs.iter().copied().fold(0.0, f64::max);
        if !(worst <= 10.0 * cfg.solver_tol) {
            failures.push(format!("{} round trip error {worst:e} exceeds {:e}", bc.as_str(), 10.0 * cfg.solver_tol));
        }
        details.insert(bc.as_str().to_string(), serde_json::json!({ "max_relative_l2": worst, "samples": errs.len() }));
    }
    Ok(VerifyReport { mode: VerifyMode::Manufactured, passed: failures.is_empty(), failures, details: serde_json::Value::Object(details) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::necrotic_core;

    #[test]
    fn coarsening_averages_children() {
        let fine = make_grid(2, &[4, 4], 0.5, &[0.0, 0.0], BoundaryKind::Neumann).unwrap();
        let coarse = make_grid(2, &[2, 2], 1.0, &[0.0, 0.0], BoundaryKind::Neumann).unwrap();
        let vals: Vec<f64> = (1..=16).map(f64::from).collect();
        let f = Field::from_interior(&fine, FieldName::N, &vals).unwrap();
        let c = coarsen(&f, &coarse).unwrap();
        assert_eq!(c.interior_values(), vec![(1.0 + 2.0 + 5.0 + 6.0) / 4.0, (3.0 + 4.0 + 7.0 + 8.0) / 4.0, (9.0 + 10.0 + 13.0 + 14.0) / 4.0, (11.0 + 12.0 + 15.0 + 16.0) / 4.0]);
        assert!((c.integral() - f.integral()).abs() < 1e-14);
        assert!(coarsen(&f, &fine).is_err());
    }

    #[test]
    fn perturbation_stays_admissible() {
        let cfg = with_mesh_width(necrotic_core(), 0.25).unwrap();
        let (n, _, _) = initial_fields(&cfg).unwrap();
        let mut rng = StdRng::seed_from_u64(1);
        let p = perturb_density(&n, 1.0, &mut rng);
        assert_ne!(p, n);
        assert!(p.interior_values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn round_trip_on_small_grids() {
        for bc in [BoundaryKind::Periodic, BoundaryKind::Neumann] {
            let g = make_grid(2, &[16, 16], 6.0 / 16.0, &[-3.0, -3.0], bc).unwrap();
            let errs = elliptic_round_trip(&g, 1.0, 1e-10, 5, 3).unwrap();
            assert!(errs.iter().all(|&e| e <= 1e-9), "{errs:?}");
        }
    }

    #[test]
    fn mode_names() {
        for m in [VerifyMode::Invariants, VerifyMode::Convergence, VerifyMode::Manufactured] {
            assert_eq!(m.to_string().parse::<VerifyMode>().unwrap(), m);
        }
        assert!("fast".parse::<VerifyMode>().is_err());
    }
}
