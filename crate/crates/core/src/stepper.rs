//! One macro time step of the explicit scheme.
//!
//! Per step, with `W` already solved for the current density:
//!
//! 1. choose `dt` from the transport restriction and the pressure restriction;
//! 2. advance `n` with the upwinded central flux and the reaction term `n Phi`;
//! 3. advance `c` (then `q`) with `N_k` explicit reaction-diffusion substeps of
//!    size `dt / N_k`, holding `n` at its start-of-step value;
//! 4. re-solve `W` for the new density.
//!
//! Every step is checked against the discrete maximum principles, the step
//! size restrictions, positivity of the convex-combination weights, and the
//! discrete mass budget. Non-finite values always abort; other breaches abort
//! in strict mode and are reported otherwise.

use std::sync::Arc;

use serde::Serialize;

use crate::constitutive::ModelParams;
use crate::diagnostics::{entropy_increments, entropy_source, mass_budget, EntropyIncrement};
use crate::elliptic::{w_bounds_check, HelmholtzProblem, SolveStats, WBounds};
use crate::error::{Error, Result, Violation, ViolationKind};
use crate::grid::{laplace_at, BoundaryKind, BoundaryValue, Field, FieldName, Grid, MAX_DIM};

/// Absolute slack on the maximum-principle ranges.
pub const RANGE_TOL: f64 = 1e-12;
/// Relative slack when comparing a chosen step with its restriction.
pub const CFL_REL_TOL: f64 = 1e-12;
/// Per-step mass budget residual limit.
pub const MASS_TOL: f64 = 1e-12;

/// Boundary treatment of the nutrient or drug.
#[derive(Clone)]
pub enum ScalarBoundary {
    Dirichlet(Arc<dyn BoundaryValue>),
    /// Zero normal flux (ghost = adjacent interior value).
    ZeroFlux,
}

impl std::fmt::Debug for ScalarBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarBoundary::Dirichlet(_) => write!(f, "Dirichlet(..)"),
            ScalarBoundary::ZeroFlux => write!(f, "ZeroFlux"),
        }
    }
}

impl ScalarBoundary {
    fn fill(&self, field: &mut Field, t: f64) -> Result<()> {
        match self {
            ScalarBoundary::Dirichlet(g) => field.fill_ghosts(BoundaryKind::Dirichlet, Some(g.as_ref()), t),
            ScalarBoundary::ZeroFlux => field.fill_ghosts(BoundaryKind::Neumann, None, t),
        }
    }

    fn is_dirichlet(&self) -> bool {
        matches!(self, ScalarBoundary::Dirichlet(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub n: Field,
    pub w: Field,
    pub c: Field,
    pub q: Option<Field>,
    pub t: f64,
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSizes {
    pub dt: f64,
    pub dt_c: f64,
    pub dt_q: f64,
    pub n_sub_c: usize,
    pub n_sub_q: usize,
    pub kappa: f64,
}

/// Step-independent constants of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunBounds {
    pub phi_sup: f64,
    pub growth_sup: f64,
    pub n_inf: f64,
    /// Largest macro step ever taken; `n_bar` is evaluated here.
    pub dt_cap: f64,
    /// Uniform upper bound on the density, `n̄_inf(dt_cap)`.
    pub n_bar: f64,
    pub psi_c_sup: f64,
    pub psi_q_sup: f64,
}

/// `h / (4 d max|D⁺W| + h Phi_inf)`; infinite when the denominator vanishes.
pub fn transport_bound(h: f64, dim: usize, max_grad_w: f64, phi_sup: f64) -> f64 {
    let den = 4.0 * dim as f64 * max_grad_w + h * phi_sup.max(0.0);
    if den > 0.0 {
        h / den
    } else {
        f64::INFINITY
    }
}

/// `mu / (4 gamma n̄^gamma)`.
pub fn pressure_bound(mu: f64, gamma: f64, n_bar: f64) -> f64 {
    mu / (4.0 * gamma * n_bar.powf(gamma))
}

/// Substep restriction `min{ h dt / nu, h² / (2^d nu + h² r + h² Psi_inf) }`.
pub fn substep_bound(h: f64, dim: usize, dt: f64, nu: f64, r: f64, psi_sup: f64) -> f64 {
    let first = if nu > 0.0 { h * dt / nu } else { f64::INFINITY };
    let den = 2f64.powi(dim as i32) * nu + h * h * r + h * h * psi_sup;
    let second = if den > 0.0 { h * h / den } else { f64::INFINITY };
    first.min(second)
}

/// Largest admissible macro step for a run.
///
/// `n̄_inf` grows with `dt` and the pressure restriction shrinks with `n̄_inf`,
/// so the self-consistent cap is the root of
/// `dt = kappa mu / (4 gamma n̄_inf(dt)^gamma)`, clipped at `kappa h`. Every
/// step of the run stays below it, so `n̄_inf(dt_cap)` bounds the density for
/// the whole run.
pub fn run_bounds(params: &ModelParams, h: f64, kappa: f64) -> RunBounds {
    let s = params.growth_sup();
    let n_inf = params.n_inf();
    let n_bar = |dt: f64| n_inf + 4.0 * dt * s;
    let excess = |dt: f64| dt - kappa * pressure_bound(params.mu, params.gamma, n_bar(dt));
    let hard = kappa * h;
    let dt_cap = if excess(hard) <= 0.0 {
        hard
    } else {
        let (mut lo, mut hi) = (0.0, hard);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        lo
    };
    let nb = n_bar(dt_cap);
    RunBounds {
        phi_sup: params.phi_sup(),
        growth_sup: s,
        n_inf,
        dt_cap,
        n_bar: nb,
        psi_c_sup: params.psi_c_sup(nb),
        psi_q_sup: params.psi_q_sup(nb),
    }
}

/// `max_{i,j} |D_j⁺ W_i|` over interior cells (boundary faces included).
pub fn max_forward_gradient(w: &Field) -> f64 {
    let g = w.grid();
    let v = w.values();
    let h = g.h();
    let mut m = 0f64;
    for a in 0..g.dim() {
        let s = g.stride(a);
        g.for_each_cell(|i| m = m.max(((v[i + s] - v[i]) / h).abs()));
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroCfl {
    pub dt: f64,
    pub max_grad_w: f64,
    /// Unscaled transport restriction.
    pub transport: f64,
    /// Unscaled pressure restriction.
    pub pressure: f64,
}

/// Macro step size: `kappa` times the tighter restriction, never above `dt_cap`.
pub fn cfl_macro(w: &Field, params: &ModelParams, bounds: &RunBounds, kappa: f64) -> MacroCfl {
    let g = w.grid();
    let max_grad_w = max_forward_gradient(w);
    let transport = transport_bound(g.h(), g.dim(), max_grad_w, bounds.phi_sup);
    let pressure = pressure_bound(params.mu, params.gamma, bounds.n_bar);
    let dt = (kappa * transport.min(pressure)).min(bounds.dt_cap);
    MacroCfl { dt, max_grad_w, transport, pressure }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubSteps {
    pub dt_k: f64,
    pub n_sub: usize,
    /// Unscaled restriction.
    pub bound: f64,
}

/// Substep size and count so that `n_sub * dt_k = dt` and `dt_k <= kappa * bound`.
pub fn cfl_sub(h: f64, dim: usize, dt: f64, nu: f64, r: f64, psi_sup: f64, kappa: f64) -> SubSteps {
    let bound = substep_bound(h, dim, dt, nu, r, psi_sup);
    let target = kappa * bound;
    let mut n_sub = if target.is_finite() { ((dt / target).ceil() as usize).max(1) } else { 1 };
    while dt / n_sub as f64 > target {
        n_sub += 1;
    }
    SubSteps { dt_k: dt / n_sub as f64, n_sub, bound }
}

/// Face flux between a left and right cell: central transport plus
/// `|D⁺W|`-scaled artificial diffusion.
#[inline(always)]
fn face_flux(grad_w: f64, n_l: f64, n_r: f64) -> f64 {
    -0.5 * (grad_w * (n_l + n_r) + grad_w.abs() * (n_r - n_l))
}

/// Face fluxes `F^{(j)}_i` at `i + e_j/2` along `axis`, stored at cell `i`.
/// Interior cells hold their right face; the ghost slot at index 0 of `axis`
/// holds the left boundary face. Ghosts of `w` and `n` must be filled.
pub fn numerical_flux(w: &Field, n: &Field, axis: usize) -> Field {
    let g = *n.grid();
    let s = g.stride(axis);
    let h = g.h();
    let (wv, nv) = (w.values(), n.values());
    let mut out = Field::zeros(&g, FieldName::Other);
    let flux_at = |i: usize| face_flux((wv[i + s] - wv[i]) / h, nv[i], nv[i + s]);
    g.for_each_cell(|i| out.values_mut()[i] = flux_at(i));
    for m in g.interior_indices() {
        if m[axis] == 1 {
            let i = g.index(m) - s;
            out.values_mut()[i] = flux_at(i);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta_plus: [f64; MAX_DIM],
    pub beta_minus: [f64; MAX_DIM],
}

/// Weights of the density update written as
/// `n⁺ = (a1 + a2) n_i + Σ_j (b⁺_j n_{i+e_j} + b⁻_j n_{i-e_j})`.
pub fn convex_coefficients(w: &Field, phi: f64, dt: f64, m: [usize; MAX_DIM]) -> ConvexCoefficients {
    let g = w.grid();
    let h = g.h();
    let v = w.values();
    let i = g.index(m);
    let mut lap = 0.0;
    let mut abs_sum = 0.0;
    let mut beta_plus = [0.0; MAX_DIM];
    let mut beta_minus = [0.0; MAX_DIM];
    for a in 0..g.dim() {
        let s = g.stride(a);
        let dp = (v[i + s] - v[i]) / h;
        let dm = (v[i] - v[i - s]) / h;
        lap += (dp - dm) / h;
        abs_sum += dp.abs() + dm.abs();
        beta_plus[a] = dt / (2.0 * h) * (dp.abs() + dp);
        beta_minus[a] = dt / (2.0 * h) * (dm.abs() - dm);
    }
    ConvexCoefficients {
        alpha1: 1.0 - 0.5 * dt * lap - dt / (2.0 * h) * abs_sum,
        alpha2: dt * phi + dt * lap,
        beta_plus,
        beta_minus,
    }
}

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub n: Field,
    /// `Phi(p_i, c_i, q_i)` at the start-of-step values.
    pub phi: Field,
    /// Smallest `alpha1 + alpha2` over the grid.
    pub min_self_weight: f64,
}

/// `n⁺_i = n_i - dt div_h⁻ F_i + dt n_i Phi(p_i, c_i, q_i)`.
/// Ghosts of `w` and `n` must be filled.
pub fn transport_step(params: &ModelParams, w: &Field, n: &Field, c: &Field, q: Option<&Field>, dt: f64) -> TransportOutcome {
    let g = *n.grid();
    let h = g.h();
    let dim = g.dim();
    let strides = [g.stride(0), g.stride(1), g.stride(2)];
    let (wv, nv, cv) = (w.values(), n.values(), c.values());
    let qv = q.map(|q| q.values());
    let mut n_new = Field::zeros(&g, FieldName::N);
    let mut phi = Field::zeros(&g, FieldName::Other);
    let mut min_self_weight = f64::INFINITY;
    {
        let out = n_new.values_mut();
        let ph_out = phi.values_mut();
        g.for_each_cell(|i| {
            let ni = nv[i];
            let ph = params.phi(params.pressure(ni), cv[i], qv.map_or(0.0, |q| q[i]));
            let mut div = 0.0;
            let mut lap = 0.0;
            let mut abs_sum = 0.0;
            for &s in &strides[..dim] {
                let dp = (wv[i + s] - wv[i]) / h;
                let dm = (wv[i] - wv[i - s]) / h;
                let f_r = face_flux(dp, ni, nv[i + s]);
                let f_l = face_flux(dm, nv[i - s], ni);
                div += (f_r - f_l) / h;
                lap += (dp - dm) / h;
                abs_sum += dp.abs() + dm.abs();
            }
            out[i] = ni - dt * div + dt * ni * ph;
            ph_out[i] = ph;
            let weight = 1.0 + 0.5 * dt * lap - dt / (2.0 * h) * abs_sum + dt * ph;
            min_self_weight = min_self_weight.min(weight);
        });
    }
    TransportOutcome { n: n_new, phi, min_self_weight }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Species {
    Nutrient,
    Drug,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ReactionCoeffs {
    nu: f64,
    r: f64,
    supp: f64,
    lambda: f64,
    k_inf: f64,
}

impl Species {
    fn coeffs(self, p: &ModelParams) -> ReactionCoeffs {
        match self {
            Species::Nutrient => ReactionCoeffs { nu: p.nu_c, r: p.r_c, supp: p.c_supp, lambda: p.lambda_c, k_inf: p.c_inf },
            Species::Drug => ReactionCoeffs { nu: p.nu_q, r: p.r_q, supp: p.q_supp, lambda: p.lambda_q, k_inf: p.q_inf },
        }
    }
}

/// One explicit substep
/// `k⁺ = k + dt_k (nu Δ_h k + k Psi(n, k) + r (k_supp - k))`.
/// Ghosts of `k` must hold the boundary values for the substep time.
pub fn reaction_diffusion_substep(species: Species, params: &ModelParams, k: &Field, n: &Field, dt_k: f64) -> Field {
    let rc = species.coeffs(params);
    let g = *k.grid();
    let strides = [g.stride(0), g.stride(1), g.stride(2)];
    let strides = &strides[..g.dim()];
    let inv_h2 = 1.0 / (g.h() * g.h());
    let (kv, nv) = (k.values(), n.values());
    let mut out = Field::zeros(&g, k.name());
    {
        let o = out.values_mut();
        g.for_each_cell(|i| {
            let ki = kv[i];
            let psi = -rc.lambda * nv[i] * ki;
            o[i] = ki + dt_k * (rc.nu * laplace_at(kv, i, strides, inv_h2) + ki * psi + rc.r * (rc.supp - ki));
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperSettings {
    pub kappa: f64,
    pub strict: bool,
    pub drug_enabled: bool,
    pub solver_tol: f64,
    pub solver_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    /// Index of the state produced by this step.
    pub step: usize,
    pub t: f64,
    pub sizes: StepSizes,
    pub cfl: MacroCfl,
    pub nutrient_bound: f64,
    pub drug_bound: Option<f64>,
    pub solver_iterations: usize,
    pub solver_residual: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub p_max: f64,
    pub mass_before: f64,
    pub mass_after: f64,
    pub mass_residual: f64,
    pub entropy: EntropyIncrement,
    pub n_min: f64,
    pub n_max: f64,
    /// Extrema over every nutrient substep of the step.
    pub c_min: f64,
    pub c_max: f64,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub min_self_weight: f64,
    pub violations: Vec<Violation>,
}

pub struct Stepper {
    grid: Grid,
    params: ModelParams,
    settings: StepperSettings,
    c_boundary: ScalarBoundary,
    q_boundary: ScalarBoundary,
    bounds: RunBounds,
    helmholtz: HelmholtzProblem,
}

struct Checks<'a> {
    step: usize,
    strict: bool,
    found: &'a mut Vec<Violation>,
}

impl Checks<'_> {
    fn report(&mut self, v: Violation) -> Result<()> {
        if self.strict || v.kind == ViolationKind::NonFinite {
            return Err(Error::Invariant { step: self.step, violation: v });
        }
        self.found.push(v);
        Ok(())
    }

    fn upper(&mut self, kind: ViolationKind, value: f64, limit: f64, detail: &str) -> Result<()> {
        if value > limit || value.is_nan() {
            self.report(Violation { kind, value, limit, cell: None, detail: detail.to_string() })?;
        }
        Ok(())
    }

    fn lower(&mut self, kind: ViolationKind, value: f64, limit: f64, detail: &str) -> Result<()> {
        if value < limit || value.is_nan() {
            self.report(Violation { kind, value, limit, cell: None, detail: detail.to_string() })?;
        }
        Ok(())
    }

    fn finite(&mut self, f: &Field, what: &str) -> Result<()> {
        if let Some(cell) = f.first_non_finite() {
            let value = f.get(cell);
            self.report(Violation { kind: ViolationKind::NonFinite, value, limit: f64::MAX, cell: Some(cell), detail: format!("{what} is not finite") })?;
        }
        Ok(())
    }

    fn range(&mut self, kind: ViolationKind, f: &Field, lo: f64, hi: f64, what: &str) -> Result<()> {
        let g = f.grid();
        let v = f.values();
        let mut worst: Option<(usize, f64, f64)> = None;
        g.for_each_cell(|i| {
            if worst.is_none() {
                if v[i] < lo {
                    worst = Some((i, v[i], lo));
                } else if v[i] > hi {
                    worst = Some((i, v[i], hi));
                }
            }
        });
        if let Some((i, value, limit)) = worst {
            self.report(Violation { kind, value, limit, cell: Some(g.multi_index(i)), detail: format!("{what} left its admissible range") })?;
        }
        Ok(())
    }
}

impl Stepper {
    pub fn new(grid: &Grid, params: ModelParams, settings: StepperSettings, c_boundary: ScalarBoundary, q_boundary: ScalarBoundary) -> Result<Self> {
        params.validate()?;
        if !(settings.kappa > 0.0 && settings.kappa.is_finite()) {
            return Err(Error::config(format!("cfl.kappa must be positive, got {}", settings.kappa)));
        }
        let helmholtz = HelmholtzProblem::new(grid, params.mu, settings.solver_tol, settings.solver_max_iter)?;
        let bounds = run_bounds(&params, grid.h(), settings.kappa);
        Ok(Stepper { grid: *grid, params, settings, c_boundary, q_boundary, bounds, helmholtz })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn settings(&self) -> &StepperSettings {
        &self.settings
    }

    pub fn bounds(&self) -> &RunBounds {
        &self.bounds
    }

    pub fn helmholtz(&self) -> &HelmholtzProblem {
        &self.helmholtz
    }

    /// Solves `W` for `p = |n|^gamma` in place (warm start from `state.w`).
    pub fn solve_potential(&mut self, state: &mut SimState) -> Result<(SolveStats, WBounds, Field)> {
        let g = self.grid;
        let mut p = Field::zeros(&g, FieldName::P);
        {
            let (nv, pv) = (state.n.values(), p.values_mut());
            g.for_each_cell(|i| pv[i] = self.params.pressure(nv[i]));
        }
        let stats = self.helmholtz.solve(&p, &mut state.w)?;
        let wb = w_bounds_check(&state.w, &p);
        Ok((stats, wb, p))
    }

    /// Step sizes that the next macro step would use.
    pub fn step_sizes(&self, state: &SimState) -> (MacroCfl, SubSteps, Option<SubSteps>) {
        let cfl = cfl_macro(&state.w, &self.params, &self.bounds, self.settings.kappa);
        self.sub_sizes(cfl, cfl.dt)
    }

    fn sub_sizes(&self, cfl: MacroCfl, dt: f64) -> (MacroCfl, SubSteps, Option<SubSteps>) {
        let (h, d, k) = (self.grid.h(), self.grid.dim(), self.settings.kappa);
        let p = &self.params;
        let sc = cfl_sub(h, d, dt, p.nu_c, p.r_c, self.bounds.psi_c_sup, k);
        let sq = self.settings.drug_enabled.then(|| cfl_sub(h, d, dt, p.nu_q, p.r_q, self.bounds.psi_q_sup, k));
        (MacroCfl { dt, ..cfl }, sc, sq)
    }

    /// Advances `state` by one macro step. With `until = Some(t)`, the step is
    /// shortened so it does not pass `t`, landing on it exactly.
    pub fn macro_step(&mut self, state: &mut SimState, until: Option<f64>) -> Result<StepReport> {
        let g = self.grid;
        let params = self.params;
        let new_step = state.step + 1;
        let mut violations = Vec::new();
        let mut checks = Checks { step: new_step, strict: self.settings.strict, found: &mut violations };

        state.n.fill_ghosts(g.bc(), None, state.t)?;
        state.w.fill_ghosts(g.bc(), None, state.t)?;
        let cfl = cfl_macro(&state.w, &params, &self.bounds, self.settings.kappa);
        let mut dt = cfl.dt;
        let mut t_new = state.t + dt;
        if let Some(target) = until {
            let remaining = target - state.t;
            if dt >= remaining * (1.0 - 1e-12) {
                dt = remaining;
                t_new = target;
            }
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Invariant {
                step: new_step,
                violation: Violation { kind: ViolationKind::NonFinite, value: dt, limit: 0.0, cell: None, detail: "macro step size is not a positive number".into() },
            });
        }
        checks.upper(ViolationKind::TransportCfl, dt, cfl.transport * (1.0 + CFL_REL_TOL), "macro step exceeds the transport restriction")?;
        checks.upper(ViolationKind::TransportCfl, dt, cfl.pressure * (1.0 + CFL_REL_TOL), "macro step exceeds the pressure restriction")?;

        // transport
        let tr = transport_step(&params, &state.w, &state.n, &state.c, state.q.as_ref(), dt);
        checks.finite(&tr.n, "density")?;
        checks.range(ViolationKind::DensityRange, &tr.n, -RANGE_TOL, self.bounds.n_bar + RANGE_TOL, "density")?;
        checks.lower(ViolationKind::Positivity, tr.min_self_weight, -RANGE_TOL, "negative self weight in the density update")?;
        let budget = mass_budget(&state.n, &tr.n, &tr.phi, dt);
        checks.upper(ViolationKind::MassBudget, budget.residual, MASS_TOL, "mass budget residual")?;
        let mut entropy = entropy_increments(&state.n, &tr.n, &state.w, dt);
        entropy.source = entropy_source(&state.n, &state.w, &tr.phi, dt);

        // nutrient and drug substeps, density frozen at its start-of-step value
        let (_, sc, sq) = self.sub_sizes(cfl, dt);
        checks.upper(ViolationKind::NutrientCfl, sc.dt_k, sc.bound * (1.0 + CFL_REL_TOL), "nutrient substep exceeds its restriction")?;
        let (c_new, c_min, c_max) = self.substeps(Species::Nutrient, &state.c, &state.n, state.t, sc, &mut checks)?;
        let (q_new, q_range) = match (&state.q, sq) {
            (Some(q), Some(sq)) => {
                checks.upper(ViolationKind::DrugCfl, sq.dt_k, sq.bound * (1.0 + CFL_REL_TOL), "drug substep exceeds its restriction")?;
                let (qn, lo, hi) = self.substeps(Species::Drug, q, &state.n, state.t, sq, &mut checks)?;
                (Some(qn), Some((lo, hi)))
            }
            _ => (None, None),
        };

        let (n_min, n_max) = tr.n.min_max();
        state.n = tr.n;
        state.c = c_new;
        if self.settings.drug_enabled {
            state.q = q_new;
        }
        state.t = t_new;
        state.step = new_step;

        let (stats, wb, _) = self.solve_potential(state)?;
        checks.finite(&state.w, "potential")?;
        checks.lower(ViolationKind::PotentialRange, wb.w_min, -wb.slack, "potential below zero")?;
        checks.upper(ViolationKind::PotentialRange, wb.w_max, wb.p_max + wb.slack, "potential above the pressure maximum")?;

        let sizes = StepSizes {
            dt,
            dt_c: sc.dt_k,
            dt_q: sq.map_or(0.0, |s| s.dt_k),
            n_sub_c: sc.n_sub,
            n_sub_q: sq.map_or(0, |s| s.n_sub),
            kappa: self.settings.kappa,
        };
        Ok(StepReport {
            step: new_step,
            t: t_new,
            sizes,
            cfl,
            nutrient_bound: sc.bound,
            drug_bound: sq.map(|s| s.bound),
            solver_iterations: stats.iterations,
            solver_residual: stats.residual,
            w_min: wb.w_min,
            w_max: wb.w_max,
            p_max: wb.p_max,
            mass_before: budget.mass_before,
            mass_after: budget.mass_after,
            mass_residual: budget.residual,
            entropy,
            n_min,
            n_max,
            c_min,
            c_max,
            q_min: q_range.map(|r| r.0),
            q_max: q_range.map(|r| r.1),
            min_self_weight: tr.min_self_weight,
            violations,
        })
    }

    fn substeps(&self, species: Species, k0: &Field, n: &Field, t0: f64, sub: SubSteps, checks: &mut Checks) -> Result<(Field, f64, f64)> {
        let (boundary, kind, range_kind, what) = match species {
            Species::Nutrient => (&self.c_boundary, ViolationKind::NutrientCfl, ViolationKind::NutrientRange, "nutrient"),
            Species::Drug => (&self.q_boundary, ViolationKind::DrugCfl, ViolationKind::DrugRange, "drug"),
        };
        let _ = kind;
        let k_inf = species.coeffs(&self.params).k_inf;
        let mut k = k0.clone();
        let (mut lo, mut hi) = k.min_max();
        for s in 0..sub.n_sub {
            let ts = t0 + s as f64 * sub.dt_k;
            boundary.fill(&mut k, ts)?;
            if boundary.is_dirichlet() {
                let (blo, bhi) = k.ghost_min_max();
                checks.lower(ViolationKind::BoundaryData, blo, 0.0, &format!("{what} boundary data below zero"))?;
                checks.upper(ViolationKind::BoundaryData, bhi, k_inf, &format!("{what} boundary data above its bound"))?;
            }
            k = reaction_diffusion_substep(species, &self.params, &k, n, sub.dt_k);
            checks.finite(&k, what)?;
            checks.range(range_kind, &k, -RANGE_TOL, k_inf + RANGE_TOL, what)?;
            let (a, b) = k.min_max();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        Ok((k, lo, hi))
    }
}
