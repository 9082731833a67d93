//! Matrix-free conjugate-gradient solver for the discrete Brinkman equation
//! `W - mu Δ_h W = p` under Neumann or periodic boundary conditions.
//!
//! The operator `I - mu Δ_h` is symmetric positive definite with smallest
//! eigenvalue 1, so plain CG converges without a preconditioner. Inner products
//! run over interior cells in storage order, which keeps iteration counts and
//! results reproducible bit for bit.

use crate::error::{Error, Result};
use crate::grid::{laplace_at, BoundaryKind, Field, FieldName, Grid};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Default iteration cap: `10 sqrt(cells) + 100`.
pub fn default_max_iter(grid: &Grid) -> usize {
    10 * (grid.cell_count() as f64).sqrt().ceil() as usize + 100
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final `‖p - A W‖₂ / ‖p‖₂` (true residual, not the recursive one).
    pub residual: f64,
}

/// The discrete Brinkman problem on a fixed grid, with CG scratch space.
#[derive(Debug, Clone)]
pub struct HelmholtzProblem {
    grid: Grid,
    mu: f64,
    tol: f64,
    max_iter: usize,
    r: Field,
    d: Field,
    ad: Field,
}

impl HelmholtzProblem {
    pub fn new(grid: &Grid, mu: f64, tol: f64, max_iter: Option<usize>) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::config(format!("Brinkman viscosity must be positive, got {mu}")));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::config(format!("solver.tol must lie in (0, 1), got {tol}")));
        }
        let max_iter = max_iter.unwrap_or_else(|| default_max_iter(grid));
        if max_iter == 0 {
            return Err(Error::config("solver.max_iter must be positive"));
        }
        Ok(HelmholtzProblem {
            grid: *grid,
            mu,
            tol,
            max_iter,
            r: Field::zeros(grid, FieldName::Other),
            d: Field::zeros(grid, FieldName::Other),
            ad: Field::zeros(grid, FieldName::Other),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    fn bc(&self) -> BoundaryKind {
        self.grid.bc()
    }

    /// `out = W - mu Δ_h W` on interior cells; `w` must have its ghosts filled.
    pub fn apply_into(&self, w: &Field, out: &mut Field) {
        apply_raw(&self.grid, self.mu, w.values(), out.values_mut());
    }

    /// Fills the ghosts of `w` (grid boundary kind) and returns `A W`.
    pub fn apply_operator(&self, w: &mut Field) -> Field {
        w.fill_ghosts(self.bc(), None, 0.0).expect("neumann/periodic fill is infallible");
        let mut out = Field::zeros(&self.grid, FieldName::Other);
        self.apply_into(w, &mut out);
        out
    }

    /// Solves `A W = rhs`, using the incoming `w` as initial guess. On return
    /// `w` satisfies `‖rhs - A W‖₂ <= tol ‖rhs‖₂` and has its ghosts filled.
    pub fn solve(&mut self, rhs: &Field, w: &mut Field) -> Result<SolveStats> {
        let g = self.grid;
        let bc = self.bc();
        let norm_b = dot(&g, rhs.values(), rhs.values()).sqrt();
        if norm_b == 0.0 {
            w.values_mut().iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats { iterations: 0, residual: 0.0 });
        }
        let target = self.tol * norm_b;
        let mut iterations = 0;

        loop {
            // (re)start from the true residual
            w.fill_ghosts(bc, None, 0.0)?;
            apply_raw(&g, self.mu, w.values(), self.ad.values_mut());
            {
                let (b, ad, r) = (rhs.values(), self.ad.values(), self.r.values_mut());
                g.for_each_cell(|i| r[i] = b[i] - ad[i]);
            }
            let mut rr = dot(&g, self.r.values(), self.r.values());
            if rr.sqrt() <= target {
                return Ok(SolveStats { iterations, residual: rr.sqrt() / norm_b });
            }
            if iterations >= self.max_iter {
                return Err(Error::SolverDivergence { iterations, residual: rr.sqrt() / norm_b });
            }
            self.d.values_mut().copy_from_slice(self.r.values());

            while iterations < self.max_iter {
                iterations += 1;
                self.d.fill_ghosts(bc, None, 0.0)?;
                apply_raw(&g, self.mu, self.d.values(), self.ad.values_mut());
                let dad = dot(&g, self.d.values(), self.ad.values());
                let alpha = rr / dad;
                {
                    let (x, d) = (w.values_mut(), self.d.values());
                    g.for_each_cell(|i| x[i] += alpha * d[i]);
                    let (r, ad) = (self.r.values_mut(), self.ad.values());
                    g.for_each_cell(|i| r[i] -= alpha * ad[i]);
                }
                let rr_new = dot(&g, self.r.values(), self.r.values());
                if rr_new.sqrt() <= target {
                    break;
                }
                let beta = rr_new / rr;
                rr = rr_new;
                let (d, r) = (self.d.values_mut(), self.r.values());
                g.for_each_cell(|i| d[i] = r[i] + beta * d[i]);
            }
        }
    }
}

fn apply_raw(g: &Grid, mu: f64, w: &[f64], out: &mut [f64]) {
    let strides = [g.stride(0), g.stride(1), g.stride(2)];
    let strides = &strides[..g.dim()];
    let inv_h2 = 1.0 / (g.h() * g.h());
    g.for_each_cell(|i| out[i] = w[i] - mu * laplace_at(w, i, strides, inv_h2));
}

fn dot(g: &Grid, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    g.for_each_cell(|i| s += a[i] * b[i]);
    s
}

/// Extrema of a solved potential together with the discrete maximum principle
/// verdict `0 <= W <= max p` (with slack `1e-8 (1 + max p)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WBounds {
    pub w_min: f64,
    pub w_max: f64,
    pub p_max: f64,
    pub slack: f64,
    pub passed: bool,
}

pub fn w_bounds_check(w: &Field, p: &Field) -> WBounds {
    let (w_min, w_max) = w.min_max();
    let (_, p_max) = p.min_max();
    let slack = 1e-8 * (1.0 + p_max);
    let passed = w_min >= -slack && w_max <= p_max + slack;
    WBounds { w_min, w_max, p_max, slack, passed }
}
