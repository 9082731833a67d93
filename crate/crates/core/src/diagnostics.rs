//! Scalar observables of a run: extrema, mass budget, entropy accumulators for
//! `f(n) = n²`, and necrotic-core probes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Field;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassBudget {
    pub mass_before: f64,
    pub mass_after: f64,
    /// `dt h^d Σ n_old Phi`
    pub source: f64,
    pub residual: f64,
}

/// Discrete mass balance of one transport step. The flux divergence
/// telescopes, so the residual is round-off only. It is accumulated per cell
/// so that the large common part of the two masses cancels before summation.
pub fn mass_budget(n_old: &Field, n_new: &Field, phi: &Field, dt: f64) -> MassBudget {
    let g = n_old.grid();
    let vol = g.cell_volume();
    let (a, b, ph) = (n_old.values(), n_new.values(), phi.values());
    let mut defect = 0.0;
    let mut source = 0.0;
    g.for_each_cell(|i| {
        let s = dt * a[i] * ph[i];
        defect += (b[i] - a[i]) - s;
        source += s;
    });
    let mass_before = n_old.integral();
    MassBudget {
        mass_before,
        mass_after: n_new.integral(),
        source: source * vol,
        residual: (defect * vol).abs() / (1.0 + mass_before.abs()),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EntropyIncrement {
    /// `h^{d+1} dt Σ_{i,j} |D_j⁺W_i| |D_j⁺n_i|²`
    pub dissipation_space: f64,
    /// `h^d dt² Σ_i |D_t n_i|²`
    pub dissipation_time: f64,
    /// `dt h^d Σ_i (n² Δ_h W + 2 n² Phi)`, the right-hand side of the entropy
    /// inequality; filled in by [`entropy_source`].
    pub source: f64,
}

/// Dissipation increments of one step for `f(n) = n²` (so `f'' = 2`).
/// Ghosts of `n_old` and `w` must be filled.
pub fn entropy_increments(n_old: &Field, n_new: &Field, w: &Field, dt: f64) -> EntropyIncrement {
    let g = n_old.grid();
    let h = g.h();
    let vol = g.cell_volume();
    let (a, b, wv) = (n_old.values(), n_new.values(), w.values());
    let mut space = 0.0;
    let mut time = 0.0;
    g.for_each_cell(|i| {
        for ax in 0..g.dim() {
            let s = g.stride(ax);
            let dw = (wv[i + s] - wv[i]) / h;
            let dn = (a[i + s] - a[i]) / h;
            space += dw.abs() * dn * dn;
        }
        let dtn = (b[i] - a[i]) / dt;
        time += dtn * dtn;
    });
    EntropyIncrement { dissipation_space: vol * h * dt * space, dissipation_time: vol * dt * dt * time, source: 0.0 }
}

/// `dt h^d Σ_i (n_i² Δ_h W_i + 2 n_i² Phi_i)` at the start-of-step state.
pub fn entropy_source(n: &Field, w: &Field, phi: &Field, dt: f64) -> f64 {
    let g = n.grid();
    let inv_h2 = 1.0 / (g.h() * g.h());
    let (nv, wv, pv) = (n.values(), w.values(), phi.values());
    let mut sum = 0.0;
    g.for_each_cell(|i| {
        let mut lap = 0.0;
        for ax in 0..g.dim() {
            let s = g.stride(ax);
            lap += wv[i + s] - 2.0 * wv[i] + wv[i - s];
        }
        let n2 = nv[i] * nv[i];
        sum += n2 * lap * inv_h2 + 2.0 * n2 * pv[i];
    });
    dt * g.cell_volume() * sum
}

/// `Σ n² h^d`
pub fn entropy_n2(n: &Field) -> f64 {
    let g = n.grid();
    let v = n.values();
    let mut s = 0.0;
    g.for_each_cell(|i| s += v[i] * v[i]);
    s * g.cell_volume()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoreMetrics {
    pub core_min_n: f64,
    pub core_area_c: f64,
}

/// Minimum density over the cells whose centres lie within `radius` of
/// `center`, and the measure of `{c < c_crit}`.
pub fn core_metrics(n: &Field, c: &Field, center: &[f64], radius: f64, c_crit: f64) -> Result<CoreMetrics> {
    let g = n.grid();
    if center.len() != g.dim() {
        return Err(Error::config(format!("probe centre has {} coordinates for a {}-d grid", center.len(), g.dim())));
    }
    let mut core_min_n = f64::INFINITY;
    let mut below = 0usize;
    for m in g.interior_indices() {
        let x = g.center(m);
        let r2: f64 = (0..g.dim()).map(|a| (x[a] - center[a]).powi(2)).sum();
        if r2 <= radius * radius {
            core_min_n = core_min_n.min(n.get(m));
        }
        if c.get(m) < c_crit {
            below += 1;
        }
    }
    if core_min_n == f64::INFINITY {
        return Err(Error::config(format!("probe ball at {center:?} with radius {radius} contains no cell centre")));
    }
    Ok(CoreMetrics { core_min_n, core_area_c: below as f64 * g.cell_volume() })
}

/// One row of the diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: usize,
    pub n_min: f64,
    pub n_max: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub w_min: f64,
    pub w_max: f64,
    pub mass_n: f64,
    pub mass_residual: f64,
    pub entropy_n2: f64,
    pub dissipation_space: f64,
    pub dissipation_time: f64,
    /// Absent when no probe region is configured.
    pub core_min_n: Option<f64>,
    pub core_area_c: f64,
}

pub const CSV_HEADER: &str = "t,step,n_min,n_max,c_min,c_max,q_min,q_max,w_min,w_max,mass_n,mass_residual,entropy_n2,dissipation_space,dissipation_time,core_min_n,core_area_c";

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{:e},{},{:e},{:e},{:e},{:e},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e}",
            self.t,
            self.step,
            self.n_min,
            self.n_max,
            self.c_min,
            self.c_max,
            opt(self.q_min),
            opt(self.q_max),
            self.w_min,
            self.w_max,
            self.mass_n,
            self.mass_residual,
            self.entropy_n2,
            self.dissipation_space,
            self.dissipation_time,
            opt(self.core_min_n),
            self.core_area_c
        )
    }
}

/// Running totals carried across steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EntropyTotals {
    pub dissipation_space: f64,
    pub dissipation_time: f64,
    pub source: f64,
}

impl EntropyTotals {
    pub fn add(&mut self, inc: &EntropyIncrement) {
        self.dissipation_space += inc.dissipation_space;
        self.dissipation_time += inc.dissipation_time;
        self.source += inc.source;
    }

    /// Integrated entropy inequality: growth of `Σ n² h^d` is bounded by the
    /// accumulated source plus the time-discretisation term.
    pub fn inequality_holds(&self, e0: f64, e1: f64) -> bool {
        let scale = 1.0 + e0.abs() + e1.abs() + self.source.abs();
        e1 - e0 <= self.source + self.dissipation_time + 1e-10 * scale
    }
}
