//! Setting up a simulation from a configuration and driving it to `t_end`,
//! optionally writing snapshots, a diagnostics table and a run manifest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::config::{BoundarySpec, Profile, RunConfig};
use crate::diagnostics::{core_metrics, entropy_n2, DiagnosticsRecord, EntropyTotals, CSV_HEADER};
use crate::error::{Error, Result, Violation};
use crate::grid::{Field, FieldName, Grid, MAX_DIM};
use crate::snapshot::write_snapshot;
use crate::stepper::{RunBounds, ScalarBoundary, SimState, StepReport, Stepper, StepperSettings};

/// Per-axis Gauss-Legendre nodes on `[-1/2, 1/2]` and weights summing to 1.
const GAUSS_NODES: [f64; 3] = [-0.387_298_334_620_741_7, 0.0, 0.387_298_334_620_741_7];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Cell averages of `profile` by tensor-product 3-point Gauss quadrature.
pub fn cell_average(grid: &Grid, name: FieldName, profile: &Profile) -> Field {
    if let Profile::Constant(v) = profile {
        return Field::constant(grid, name, *v);
    }
    let d = grid.dim();
    let h = grid.h();
    let mut out = Field::zeros(grid, name);
    let mut x = [0.0; MAX_DIM];
    for m in grid.interior_indices() {
        let c = grid.center(m);
        let mut sum = 0.0;
        for k in 0..3usize.pow(d as u32) {
            let mut weight = 1.0;
            let mut kk = k;
            for a in 0..d {
                let j = kk % 3;
                kk /= 3;
                x[a] = c[a] + GAUSS_NODES[j] * h;
                weight *= GAUSS_WEIGHTS[j];
            }
            sum += weight * profile.eval(&x[..d]);
        }
        out.set(m, sum);
    }
    out
}

fn check_range(f: &Field, lo: f64, hi: f64, what: &str) -> Result<()> {
    for m in f.grid().interior_indices() {
        let v = f.get(m);
        if !(v >= lo && v <= hi) {
            return Err(Error::config(format!("initial {what} is {v} in cell {m:?}, outside [{lo}, {hi}]")));
        }
    }
    Ok(())
}

fn scalar_boundary(spec: &BoundarySpec, profile: &Profile, k_inf: f64, what: &str) -> Result<ScalarBoundary> {
    Ok(match spec {
        BoundarySpec::Constant(v) => {
            if !(*v >= 0.0 && *v <= k_inf) {
                return Err(Error::config(format!("boundary {what} value {v} outside [0, {k_inf}]")));
            }
            let v = *v;
            ScalarBoundary::Dirichlet(Arc::new(move |_t: f64, _x: &[f64]| v))
        }
        BoundarySpec::Trace => {
            let p = profile.clone();
            ScalarBoundary::Dirichlet(Arc::new(move |_t: f64, x: &[f64]| p.eval(x)))
        }
        BoundarySpec::Neumann => ScalarBoundary::ZeroFlux,
    })
}

/// Cell-averaged initial `(n, c, q)`.
pub fn initial_fields(cfg: &RunConfig) -> Result<(Field, Field, Option<Field>)> {
    let grid = cfg.grid.build()?;
    let n = cell_average(&grid, FieldName::N, &cfg.initial_n);
    let c = cell_average(&grid, FieldName::C, &cfg.initial_c);
    let q = match (&cfg.initial_q, cfg.drug_enabled) {
        (Some(p), true) => Some(cell_average(&grid, FieldName::Q, p)),
        _ => None,
    };
    Ok((n, c, q))
}

/// Per-step record kept in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct StepLog {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub dt_c: f64,
    pub n_sub_c: usize,
    pub dt_q: f64,
    pub n_sub_q: usize,
    pub solver_iterations: usize,
    pub solver_residual: f64,
}

impl From<&StepReport> for StepLog {
    fn from(r: &StepReport) -> Self {
        StepLog {
            step: r.step,
            t: r.t,
            dt: r.sizes.dt,
            dt_c: r.sizes.dt_c,
            n_sub_c: r.sizes.n_sub_c,
            dt_q: r.sizes.dt_q,
            n_sub_q: r.sizes.n_sub_q,
            solver_iterations: r.solver_iterations,
            solver_residual: r.solver_residual,
        }
    }
}

pub struct Simulation {
    config: RunConfig,
    stepper: Stepper,
    state: SimState,
    totals: EntropyTotals,
    initial_entropy: f64,
    initial_solver_iterations: usize,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        let (n, c, q) = initial_fields(&config)?;
        Simulation::from_fields(config, n, c, q)
    }

    /// Starts from given cell values instead of the configured profiles.
    /// Boundary traces still come from the configured profiles.
    pub fn from_fields(config: RunConfig, n: Field, c: Field, q: Option<Field>) -> Result<Self> {
        let grid = config.grid.build()?;
        let m = config.model;
        if n.grid() != &grid || c.grid() != &grid || q.as_ref().is_some_and(|q| q.grid() != &grid) {
            return Err(Error::config("initial fields do not match the configured grid"));
        }
        if config.drug_enabled && q.is_none() {
            return Err(Error::config("drug enabled without an initial drug field"));
        }
        // admissible initial density: 0 <= n and p(n) <= P_M
        let p_m = m.homeostatic_pressure();
        for mi in grid.interior_indices() {
            let v = n.get(mi);
            if !(v >= 0.0 && m.pressure(v) <= p_m) {
                return Err(Error::config(format!("initial density {v} in cell {mi:?} violates 0 <= n, n^gamma <= {p_m}")));
            }
        }
        check_range(&c, 0.0, m.c_inf, "nutrient")?;
        if let Some(q) = &q {
            check_range(q, 0.0, m.q_inf, "drug")?;
        }
        let c_boundary = scalar_boundary(&config.boundary_c, &config.initial_c, m.c_inf, "nutrient")?;
        let q_boundary = match (&config.boundary_q, &config.initial_q, config.drug_enabled) {
            (Some(spec), Some(profile), true) => scalar_boundary(spec, profile, m.q_inf, "drug")?,
            (Some(spec @ (BoundarySpec::Constant(_) | BoundarySpec::Neumann)), None, true) => scalar_boundary(spec, &Profile::Constant(0.0), m.q_inf, "drug")?,
            (None, _, true) => return Err(Error::config("drug enabled without boundary.q")),
            _ => ScalarBoundary::ZeroFlux,
        };
        let settings = StepperSettings {
            kappa: config.kappa,
            strict: config.strict,
            drug_enabled: config.drug_enabled,
            solver_tol: config.solver_tol,
            solver_max_iter: config.solver_max_iter,
        };
        let mut stepper = Stepper::new(&grid, m, settings, c_boundary, q_boundary)?;
        if let Some(center) = &config.probe_center {
            core_metrics(&n, &c, center, config.probe_radius, m.c_crit)?;
        }
        let mut state = SimState { w: Field::zeros(&grid, FieldName::W), n, c, q, t: 0.0, step: 0 };
        state.n.fill_ghosts(grid.bc(), None, 0.0)?;
        let (stats, wb, _) = stepper.solve_potential(&mut state)?;
        if !wb.passed && config.strict {
            return Err(Error::Invariant {
                step: 0,
                violation: Violation {
                    kind: crate::error::ViolationKind::PotentialRange,
                    value: if wb.w_min < -wb.slack { wb.w_min } else { wb.w_max },
                    limit: wb.p_max,
                    cell: None,
                    detail: "initial potential outside [0, max p]".into(),
                },
            });
        }
        let initial_entropy = entropy_n2(&state.n);
        Ok(Simulation { config, stepper, state, totals: EntropyTotals::default(), initial_entropy, initial_solver_iterations: stats.iterations })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    pub fn bounds(&self) -> &RunBounds {
        self.stepper.bounds()
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn totals(&self) -> &EntropyTotals {
        &self.totals
    }

    pub fn initial_entropy(&self) -> f64 {
        self.initial_entropy
    }

    pub fn initial_solver_iterations(&self) -> usize {
        self.initial_solver_iterations
    }

    pub fn step(&mut self, until: Option<f64>) -> Result<StepReport> {
        let report = self.stepper.macro_step(&mut self.state, until)?;
        self.totals.add(&report.entropy);
        Ok(report)
    }

    /// Diagnostics row for the current state. `mass_residual` comes from the
    /// step that produced it (0 for the initial state).
    pub fn record(&self, mass_residual: f64) -> Result<DiagnosticsRecord> {
        let s = &self.state;
        let (n_min, n_max) = s.n.min_max();
        let (c_min, c_max) = s.c.min_max();
        let q = s.q.as_ref().map(|q| q.min_max());
        let (w_min, w_max) = s.w.min_max();
        let (core_min_n, core_area_c) = match &self.config.probe_center {
            Some(center) => {
                let cm = core_metrics(&s.n, &s.c, center, self.config.probe_radius, self.config.model.c_crit)?;
                (Some(cm.core_min_n), cm.core_area_c)
            }
            None => {
                let mut below = 0usize;
                let v = s.c.values();
                s.c.grid().for_each_cell(|i| below += (v[i] < self.config.model.c_crit) as usize);
                (None, below as f64 * s.c.grid().cell_volume())
            }
        };
        Ok(DiagnosticsRecord {
            t: s.t,
            step: s.step,
            n_min,
            n_max,
            c_min,
            c_max,
            q_min: q.map(|r| r.0),
            q_max: q.map(|r| r.1),
            w_min,
            w_max,
            mass_n: s.n.integral(),
            mass_residual,
            entropy_n2: entropy_n2(&s.n),
            dissipation_space: self.totals.dissipation_space,
            dissipation_time: self.totals.dissipation_time,
            core_min_n,
            core_area_c,
        })
    }

    /// Next output time after the current one.
    pub fn next_stop(&self) -> f64 {
        let t = self.state.t;
        let t_end = self.config.t_end;
        match self.config.snapshot_every {
            Some(every) => {
                let k = (t / every * (1.0 + 1e-12)).floor() + 1.0;
                (k * every).min(t_end)
            }
            None => t_end,
        }
    }

    pub fn finished(&self) -> bool {
        self.state.t >= self.config.t_end
    }

    /// Runs to `t_end`, calling `observe` on the initial state and after every
    /// step. The flag is true when the state sits on an output time.
    pub fn run(&mut self, mut observe: impl FnMut(&Simulation, Option<&StepReport>, bool) -> Result<()>) -> Result<()> {
        observe(self, None, true)?;
        while !self.finished() {
            let stop = self.next_stop();
            let report = self.step(Some(stop))?;
            let landed = self.state.t == stop;
            observe(self, Some(&report), landed)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub format_version: u32,
    pub status: &'static str,
    pub error: Option<String>,
    pub exit_code: i32,
    pub config: String,
    pub bounds: Option<RunBounds>,
    pub initial_solver_iterations: usize,
    pub steps: Vec<StepLog>,
    pub total_time: f64,
    pub snapshots: Vec<String>,
    pub violations: Vec<Violation>,
    pub entropy: EntropyTotals,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
}

/// Runs `cfg` and writes `snapshots/`, `diagnostics.csv` and `manifest.json`
/// under `out_dir`. On failure the partial outputs and a manifest carrying
/// the error are still written before the error is returned.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    let started = Instant::now();
    fs::create_dir_all(out_dir.join("snapshots"))?;
    let mut manifest = Manifest {
        format_version: cfg.format_version,
        status: "running",
        error: None,
        exit_code: 0,
        config: cfg.to_string(),
        bounds: None,
        initial_solver_iterations: 0,
        steps: Vec::new(),
        total_time: 0.0,
        snapshots: Vec::new(),
        violations: Vec::new(),
        entropy: EntropyTotals::default(),
        wall_time_seconds: 0.0,
    };
    let mut csv = BufWriter::new(fs::File::create(out_dir.join("diagnostics.csv"))?);
    writeln!(csv, "{CSV_HEADER}")?;

    let result = (|| -> Result<()> {
        let mut sim = Simulation::new(cfg.clone())?;
        manifest.bounds = Some(*sim.bounds());
        manifest.initial_solver_iterations = sim.initial_solver_iterations();
        let outcome = sim.run(|sim, report, landed| {
            let residual = report.map_or(0.0, |r| r.mass_residual);
            writeln!(csv, "{}", sim.record(residual)?.csv_row())?;
            if let Some(r) = report {
                manifest.steps.push(StepLog::from(r));
                manifest.total_time += r.sizes.dt;
                manifest.violations.extend(r.violations.iter().cloned());
            }
            if landed {
                let s = sim.state();
                let mut fields: Vec<&Field> = vec![&s.n, &s.w, &s.c];
                fields.extend(s.q.as_ref());
                for f in fields {
                    let name = format!("{}_{:07}.snap", f.name().as_str(), s.step);
                    write_snapshot(&out_dir.join("snapshots").join(&name), f, s.t, s.step)?;
                    manifest.snapshots.push(name);
                }
            }
            Ok(())
        });
        manifest.entropy = *sim.totals();
        outcome
    })();

    csv.flush()?;
    drop(csv);
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    match &result {
        Ok(()) => manifest.status = "completed",
        Err(e) => {
            manifest.status = "failed";
            manifest.error = Some(e.to_string());
            manifest.exit_code = e.exit_code();
        }
    }
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    fs::write(out_dir.join("manifest.json"), json)?;
    result.map(|()| RunOutcome { manifest, out_dir: out_dir.to_path_buf() })
}
