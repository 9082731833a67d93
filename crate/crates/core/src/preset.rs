//! The four reference experiments as ready-made configurations.
//!
//! Mesh widths are physical (`h = 1/64` on `[-3, 3]²` is 384 cells per
//! axis); [`with_mesh_width`] rescales a preset for cheaper runs.

use std::fmt;
use std::str::FromStr;

use crate::config::{BoundarySpec, Bump, GridConfig, Profile, RunConfig, DEFAULT_KAPPA, DEFAULT_PROBE_RADIUS, FORMAT_VERSION};
use crate::constitutive::ModelParams;
use crate::elliptic::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::grid::BoundaryKind;

pub const DEFAULT_MESH_WIDTH: f64 = 1.0 / 64.0;
pub const DEFAULT_T_END: f64 = 5.0;
pub const DEFAULT_SNAPSHOT_EVERY: f64 = 0.5;

/// Nutrient diffusivity and supply rate for the two-colony experiments, which
/// do not state them. Shared by the drug.
pub const COLONY_NU: f64 = 1.0;
pub const COLONY_R: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    NecroticCore,
    Drug,
    ShapeIrregular,
    InhomBoundary,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::NecroticCore, Preset::Drug, Preset::ShapeIrregular, Preset::InhomBoundary];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::NecroticCore => "necrotic_core",
            Preset::Drug => "drug",
            Preset::ShapeIrregular => "shape_irregular",
            Preset::InhomBoundary => "inhom_boundary",
        }
    }

    pub fn config(self) -> RunConfig {
        match self {
            Preset::NecroticCore => necrotic_core(),
            Preset::Drug => drug(),
            Preset::ShapeIrregular => shape_irregular(),
            Preset::InhomBoundary => inhom_boundary(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown preset `{s}` (expected necrotic_core, drug, shape_irregular or inhom_boundary)")))
    }
}

pub fn preset(name: &str) -> Result<RunConfig> {
    Ok(name.parse::<Preset>()?.config())
}

fn square(half: f64, h: f64) -> GridConfig {
    let n = (2.0 * half / h).round() as usize;
    GridConfig { dim: 2, n_cells: vec![n, n], h, origin: vec![-half, -half], bc: BoundaryKind::Neumann }
}

fn base(grid: GridConfig, model: ModelParams, initial_n: Profile, probe: Vec<f64>) -> RunConfig {
    RunConfig {
        grid,
        model,
        drug_enabled: false,
        initial_n,
        initial_c: Profile::Constant(1.0),
        initial_q: None,
        boundary_c: BoundarySpec::Constant(1.0),
        boundary_q: None,
        t_end: DEFAULT_T_END,
        snapshot_every: Some(DEFAULT_SNAPSHOT_EVERY),
        kappa: DEFAULT_KAPPA,
        solver_tol: DEFAULT_TOL,
        solver_max_iter: None,
        strict: true,
        output_directory: None,
        format_version: FORMAT_VERSION,
        probe_center: Some(probe),
        probe_radius: DEFAULT_PROBE_RADIUS,
    }
}

/// Two colonies on `[-3, 3]²`, `p = n^10`, `G = 1 - p`, nutrient-driven
/// growth and starvation below `c = 0.25`.
pub fn necrotic_core() -> RunConfig {
    let model = ModelParams {
        gamma: 10.0,
        mu: 1.0,
        nu_c: COLONY_NU,
        nu_q: 0.0,
        r_c: COLONY_R,
        r_q: 0.0,
        c_supp: 1.0,
        q_supp: 0.0,
        alpha: 1.0,
        beta: 1.0,
        theta: 1.0,
        k1: 8.0,
        k2: 8.0,
        k3: 0.0,
        c_crit: 0.25,
        q_crit: 0.0,
        lambda_c: 20.0,
        lambda_q: 0.0,
        c_inf: 1.0,
        q_inf: 1.0,
    };
    let n0 = Profile::Gaussians(vec![
        Bump { amplitude: 0.5, center: vec![0.7, 0.0], width: 10.0 },
        Bump { amplitude: 0.5, center: vec![-0.6, 0.2], width: 20.0 },
    ]);
    base(square(3.0, DEFAULT_MESH_WIDTH), model, n0, vec![0.7, 0.0])
}

/// The two-colony experiment with a drug held at 1 initially and on the
/// boundary. The initial nutrient is 1, as without the drug.
pub fn drug() -> RunConfig {
    let mut cfg = necrotic_core();
    cfg.drug_enabled = true;
    cfg.model.nu_q = COLONY_NU;
    cfg.model.r_q = COLONY_R;
    cfg.model.q_supp = 1.0;
    cfg.model.lambda_q = 15.0;
    cfg.model.k3 = 4.0;
    cfg.model.q_crit = 0.0;
    cfg.initial_q = Some(Profile::Constant(1.0));
    cfg.boundary_q = Some(BoundarySpec::Constant(1.0));
    cfg
}

/// One colony at the origin of `[-5, 5]²` with a stiff pressure law and
/// nutrient supplied almost only through the boundary.
pub fn shape_irregular() -> RunConfig {
    let model = ModelParams {
        gamma: 30.0,
        mu: 0.1,
        nu_c: 5.0,
        nu_q: 0.0,
        r_c: 0.0001,
        r_q: 0.0,
        c_supp: 1.0,
        q_supp: 0.0,
        alpha: 1.0,
        beta: 1.0,
        theta: 1.0,
        k1: 200.0,
        k2: 200.0,
        k3: 0.0,
        c_crit: 0.5,
        q_crit: 0.0,
        lambda_c: 20.0,
        lambda_q: 0.0,
        c_inf: 1.0,
        q_inf: 1.0,
    };
    let n0 = Profile::Gaussians(vec![Bump { amplitude: 0.5, center: vec![0.0, 0.0], width: 10.0 }]);
    base(square(5.0, DEFAULT_MESH_WIDTH), model, n0, vec![0.0, 0.0])
}

/// [`shape_irregular`] with nutrient `0.8 + 0.5 sin(0.2 pi y)` initially and
/// on the boundary. The profile peaks at 1.3, which becomes the nutrient bound.
pub fn inhom_boundary() -> RunConfig {
    let mut cfg = shape_irregular();
    cfg.initial_c = Profile::SineY { offset: 0.8, amplitude: 0.5, frequency: 0.2 };
    cfg.boundary_c = BoundarySpec::Trace;
    cfg.model.c_inf = 1.3;
    cfg
}

/// Rescales the grid to mesh width `h`, keeping the domain.
pub fn with_mesh_width(mut cfg: RunConfig, h: f64) -> Result<RunConfig> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::config(format!("mesh width must be positive, got {h}")));
    }
    let mut n_cells = Vec::with_capacity(cfg.grid.dim);
    for &n in &cfg.grid.n_cells {
        let extent = n as f64 * cfg.grid.h;
        let m = extent / h;
        if (m - m.round()).abs() > 1e-9 * m || m.round() < 2.0 {
            return Err(Error::config(format!("mesh width {h} does not divide the domain extent {extent}")));
        }
        n_cells.push(m.round() as usize);
    }
    cfg.grid.n_cells = n_cells;
    cfg.grid.h = h;
    Ok(cfg)
}
