//! Run configuration in a flat `section.key = value` text format.
//!
//! ```text
//! # comment
//! grid.dim = 2
//! grid.n_cells = 96, 96
//! grid.h = 0.0625
//! grid.origin = -3, -3
//! grid.bc = neumann
//! model.gamma = 10
//! ...
//! initial.n = gaussians(0.5, 0.7, 0, 10; 0.5, -0.6, 0.2, 20)
//! initial.c = constant(1)
//! boundary.c = constant(1)
//! time.t_end = 5
//! ```
//!
//! Unknown and duplicate keys are rejected. Numbers are written with Rust's
//! shortest round-trip formatting, so `parse(cfg.to_string()) == cfg`.

use std::collections::BTreeMap;
use std::fmt;

use crate::constitutive::ModelParams;
use crate::error::{Error, Result};
use crate::grid::{make_grid, BoundaryKind, Grid};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_KAPPA: f64 = 0.9;
pub const DEFAULT_PROBE_RADIUS: f64 = 0.5;

/// One Gaussian bump `amplitude * exp(-width |x - center|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

/// Analytic initial profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    Gaussians(Vec<Bump>),
    /// `offset + amplitude * sin(frequency * pi * y)`
    SineY { offset: f64, amplitude: f64, frequency: f64 },
}

impl Profile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Gaussians(bumps) => bumps
                .iter()
                .map(|b| {
                    let r2: f64 = x.iter().zip(&b.center).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
                    b.amplitude * (-b.width * r2).exp()
                })
                .sum(),
            Profile::SineY { offset, amplitude, frequency } => offset + amplitude * (frequency * std::f64::consts::PI * x[1]).sin(),
        }
    }

    fn parse(s: &str, dim: usize) -> std::result::Result<Self, String> {
        let (name, args) = call_syntax(s)?;
        match name {
            "constant" => {
                let v = numbers(args)?;
                if v.len() != 1 {
                    return Err(format!("constant(...) takes one number, got {}", v.len()));
                }
                Ok(Profile::Constant(v[0]))
            }
            "gaussians" => {
                let mut bumps = Vec::new();
                for part in args.split(';') {
                    let v = numbers(part)?;
                    if v.len() != dim + 2 {
                        return Err(format!("each bump needs amplitude, {dim} centre coordinates and width; got {} numbers", v.len()));
                    }
                    if v[dim + 1] < 0.0 {
                        return Err(format!("bump width must be >= 0, got {}", v[dim + 1]));
                    }
                    bumps.push(Bump { amplitude: v[0], center: v[1..=dim].to_vec(), width: v[dim + 1] });
                }
                Ok(Profile::Gaussians(bumps))
            }
            "sine_y" => {
                if dim < 2 {
                    return Err("sine_y needs at least two dimensions".into());
                }
                let v = numbers(args)?;
                if v.len() != 3 {
                    return Err(format!("sine_y(offset, amplitude, frequency) takes three numbers, got {}", v.len()));
                }
                Ok(Profile::SineY { offset: v[0], amplitude: v[1], frequency: v[2] })
            }
            other => Err(format!("unknown profile `{other}` (expected constant, gaussians or sine_y)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(v) => write!(f, "constant({v})"),
            Profile::Gaussians(bumps) => {
                write!(f, "gaussians(")?;
                for (k, b) in bumps.iter().enumerate() {
                    if k > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{}", b.amplitude)?;
                    for c in &b.center {
                        write!(f, ", {c}")?;
                    }
                    write!(f, ", {}", b.width)?;
                }
                write!(f, ")")
            }
            Profile::SineY { offset, amplitude, frequency } => write!(f, "sine_y({offset}, {amplitude}, {frequency})"),
        }
    }
}

/// Boundary data for the nutrient or drug.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Constant(f64),
    /// The initial profile evaluated on the boundary (ghost centres).
    Trace,
    /// Zero normal flux instead of Dirichlet data.
    Neumann,
}

impl BoundarySpec {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "trace" => Ok(BoundarySpec::Trace),
            "neumann" => Ok(BoundarySpec::Neumann),
            other => {
                let (name, args) = call_syntax(other)?;
                let v = numbers(args)?;
                if name != "constant" || v.len() != 1 {
                    return Err(format!("expected constant(v), trace or neumann, got `{other}`"));
                }
                Ok(BoundarySpec::Constant(v[0]))
            }
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySpec::Constant(v) => write!(f, "constant({v})"),
            BoundarySpec::Trace => write!(f, "trace"),
            BoundarySpec::Neumann => write!(f, "neumann"),
        }
    }
}

fn call_syntax(s: &str) -> std::result::Result<(&str, &str), String> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| format!("expected name(args), got `{s}`"))?;
    if !s.ends_with(')') {
        return Err(format!("missing closing parenthesis in `{s}`"));
    }
    Ok((s[..open].trim(), &s[open + 1..s.len() - 1]))
}

fn numbers(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim()))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub dim: usize,
    pub n_cells: Vec<usize>,
    pub h: f64,
    pub origin: Vec<f64>,
    pub bc: BoundaryKind,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        make_grid(self.dim, &self.n_cells, self.h, &self.origin, self.bc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub model: ModelParams,
    pub drug_enabled: bool,
    pub initial_n: Profile,
    pub initial_c: Profile,
    pub initial_q: Option<Profile>,
    pub boundary_c: BoundarySpec,
    pub boundary_q: Option<BoundarySpec>,
    pub t_end: f64,
    pub snapshot_every: Option<f64>,
    pub kappa: f64,
    pub solver_tol: f64,
    pub solver_max_iter: Option<usize>,
    pub strict: bool,
    pub output_directory: Option<String>,
    pub format_version: u32,
    pub probe_center: Option<Vec<f64>>,
    pub probe_radius: f64,
}

const MODEL_KEYS: [&str; 20] = [
    "gamma", "mu", "nu_c", "nu_q", "r_c", "r_q", "c_supp", "q_supp", "alpha", "beta", "theta", "k1", "k2", "k3", "c_crit", "q_crit", "lambda_c", "lambda_q", "c_inf", "q_inf",
];

const OTHER_KEYS: [&str; 21] = [
    "grid.dim",
    "grid.n_cells",
    "grid.h",
    "grid.origin",
    "grid.bc",
    "model.drug_enabled",
    "initial.n",
    "initial.c",
    "initial.q",
    "boundary.c",
    "boundary.q",
    "time.t_end",
    "time.snapshot_every",
    "time.kappa",
    "solver.tol",
    "solver.max_iter",
    "invariants.strict",
    "output.directory",
    "output.format_version",
    "diagnostics.probe_center",
    "diagnostics.probe_radius",
];

fn is_known(key: &str) -> bool {
    OTHER_KEYS.contains(&key) || key.strip_prefix("model.").is_some_and(|k| MODEL_KEYS.contains(&k))
}

struct Entries<'a> {
    map: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Entries<'a> {
    fn scan(text: &'a str) -> Result<Self> {
        let mut map: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::at_line(line, format!("expected `section.key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !is_known(key) {
                return Err(Error::at_line(line, format!("unknown key `{key}`")));
            }
            if let Some((first, _)) = map.get(key) {
                return Err(Error::at_line(line, format!("duplicate key `{key}` (lines {first} and {line})")));
            }
            map.insert(key, (line, value));
        }
        Ok(Entries { map })
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|e| e.0)
    }

    fn raw(&self, key: &str) -> Option<(usize, &'a str)> {
        self.map.get(key).copied()
    }

    fn required(&self, key: &str) -> Result<(usize, &'a str)> {
        self.raw(key).ok_or_else(|| Error::config(format!("missing required key `{key}`")))
    }

    fn parse_with<T>(&self, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => f(v).map(Some).map_err(|m| Error::at_line(line, format!("{key}: {m}"))),
        }
    }

    fn require_with<T>(&self, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        self.required(key)?;
        Ok(self.parse_with(key, f)?.expect("present"))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, parse_f64)
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{s}` is not true or false")),
    }
}

fn parse_list<T>(s: &str, f: fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|t| f(t.trim())).collect()
}

fn parse_bc(s: &str) -> std::result::Result<BoundaryKind, String> {
    match s {
        "neumann" => Ok(BoundaryKind::Neumann),
        "periodic" => Ok(BoundaryKind::Periodic),
        _ => Err(format!("`{s}` is not a density boundary kind (neumann or periodic)")),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let e = Entries::scan(text)?;

    let dim = e.require_with("grid.dim", parse_usize)?;
    let grid = GridConfig {
        dim,
        n_cells: e.require_with("grid.n_cells", |s| parse_list(s, parse_usize))?,
        h: e.require_with("grid.h", parse_f64)?,
        origin: e.require_with("grid.origin", |s| parse_list(s, parse_f64))?,
        bc: e.require_with("grid.bc", parse_bc)?,
    };
    grid.build().map_err(|err| attach_line(err, e.line("grid.dim")))?;

    let mut model = ModelParams {
        gamma: 0.0,
        mu: 0.0,
        nu_c: 0.0,
        nu_q: 0.0,
        r_c: 0.0,
        r_q: 0.0,
        c_supp: 0.0,
        q_supp: 0.0,
        alpha: 0.0,
        beta: 0.0,
        theta: 0.0,
        k1: 0.0,
        k2: 0.0,
        k3: 0.0,
        c_crit: 0.0,
        q_crit: 0.0,
        lambda_c: 0.0,
        lambda_q: 0.0,
        c_inf: 0.0,
        q_inf: 0.0,
    };
    for name in MODEL_KEYS {
        let key = format!("model.{name}");
        *model.field_mut(name).expect("model key") = e.require_with(&key, parse_f64)?;
    }
    if let Err(err) = model.validate() {
        let msg = err.to_string();
        let line = MODEL_KEYS.iter().find(|k| msg.contains(&format!("model.{k}"))).and_then(|k| e.line(&format!("model.{k}")));
        return Err(attach_line(err, line));
    }
    let drug_enabled = e.parse_with("model.drug_enabled", parse_bool)?.unwrap_or(false);

    let initial_n = e.require_with("initial.n", |s| Profile::parse(s, dim))?;
    let initial_c = e.require_with("initial.c", |s| Profile::parse(s, dim))?;
    let initial_q = e.parse_with("initial.q", |s| Profile::parse(s, dim))?;
    let boundary_c = e.require_with("boundary.c", BoundarySpec::parse)?;
    let boundary_q = e.parse_with("boundary.q", BoundarySpec::parse)?;
    if drug_enabled {
        e.required("initial.q")?;
        e.required("boundary.q")?;
    }

    let t_end = e.require_with("time.t_end", parse_f64)?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::at_line(e.line("time.t_end").unwrap_or(0), format!("time.t_end must be finite and >= 0, got {t_end}")));
    }
    let snapshot_every = e.f64("time.snapshot_every")?;
    if let Some(s) = snapshot_every {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::at_line(e.line("time.snapshot_every").unwrap_or(0), format!("time.snapshot_every must be positive, got {s}")));
        }
    }
    let kappa = e.f64("time.kappa")?.unwrap_or(DEFAULT_KAPPA);
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::at_line(e.line("time.kappa").unwrap_or(0), format!("time.kappa must be positive, got {kappa}")));
    }
    let solver_tol = e.f64("solver.tol")?.unwrap_or(crate::elliptic::DEFAULT_TOL);
    if !(solver_tol > 0.0 && solver_tol < 1.0) {
        return Err(Error::at_line(e.line("solver.tol").unwrap_or(0), format!("solver.tol must lie in (0, 1), got {solver_tol}")));
    }
    let solver_max_iter = e.parse_with("solver.max_iter", parse_usize)?;
    if solver_max_iter == Some(0) {
        return Err(Error::at_line(e.line("solver.max_iter").unwrap_or(0), "solver.max_iter must be positive"));
    }
    let strict = e.parse_with("invariants.strict", parse_bool)?.unwrap_or(true);
    let output_directory = e.raw("output.directory").map(|(_, v)| v.to_string());
    let format_version = e.parse_with("output.format_version", |s| s.parse::<u32>().map_err(|_| format!("`{s}` is not a version number")))?.unwrap_or(FORMAT_VERSION);
    if format_version != FORMAT_VERSION {
        return Err(Error::at_line(e.line("output.format_version").unwrap_or(0), format!("unsupported output.format_version {format_version}")));
    }
    let probe_center = e.parse_with("diagnostics.probe_center", |s| parse_list(s, parse_f64))?;
    if let Some(c) = &probe_center {
        if c.len() != dim {
            return Err(Error::at_line(e.line("diagnostics.probe_center").unwrap_or(0), format!("probe centre needs {dim} coordinates")));
        }
    }
    let probe_radius = e.f64("diagnostics.probe_radius")?.unwrap_or(DEFAULT_PROBE_RADIUS);

    Ok(RunConfig {
        grid,
        model,
        drug_enabled,
        initial_n,
        initial_c,
        initial_q,
        boundary_c,
        boundary_q,
        t_end,
        snapshot_every,
        kappa,
        solver_tol,
        solver_max_iter,
        strict,
        output_directory,
        format_version,
        probe_center,
        probe_radius,
    })
}

fn attach_line(err: Error, line: Option<usize>) -> Error {
    match (err, line) {
        (Error::Config(msg), Some(line)) => Error::at_line(line, msg),
        (err, _) => err,
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.grid;
        writeln!(f, "grid.dim = {}", g.dim)?;
        writeln!(f, "grid.n_cells = {}", join(&g.n_cells))?;
        writeln!(f, "grid.h = {}", g.h)?;
        writeln!(f, "grid.origin = {}", join(&g.origin))?;
        writeln!(f, "grid.bc = {}", g.bc.as_str())?;
        writeln!(f)?;
        for (name, v) in self.model.entries() {
            writeln!(f, "model.{name} = {v}")?;
        }
        writeln!(f, "model.drug_enabled = {}", self.drug_enabled)?;
        writeln!(f)?;
        writeln!(f, "initial.n = {}", self.initial_n)?;
        writeln!(f, "initial.c = {}", self.initial_c)?;
        if let Some(q) = &self.initial_q {
            writeln!(f, "initial.q = {q}")?;
        }
        writeln!(f, "boundary.c = {}", self.boundary_c)?;
        if let Some(q) = &self.boundary_q {
            writeln!(f, "boundary.q = {q}")?;
        }
        writeln!(f)?;
        writeln!(f, "time.t_end = {}", self.t_end)?;
        if let Some(s) = self.snapshot_every {
            writeln!(f, "time.snapshot_every = {s}")?;
        }
        writeln!(f, "time.kappa = {}", self.kappa)?;
        writeln!(f, "solver.tol = {}", self.solver_tol)?;
        if let Some(m) = self.solver_max_iter {
            writeln!(f, "solver.max_iter = {m}")?;
        }
        writeln!(f, "invariants.strict = {}", self.strict)?;
        if let Some(d) = &self.output_directory {
            writeln!(f, "output.directory = {d}")?;
        }
        writeln!(f, "output.format_version = {}", self.format_version)?;
        if let Some(c) = &self.probe_center {
            writeln!(f, "diagnostics.probe_center = {}", join(c))?;
        }
        writeln!(f, "diagnostics.probe_radius = {}", self.probe_radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = "\
grid.dim = 2
grid.n_cells = 8, 8
grid.h = 0.75
grid.origin = -3, -3
grid.bc = neumann
model.gamma = 10
model.mu = 1
model.nu_c = 1
model.nu_q = 1
model.r_c = 1
model.r_q = 1
model.c_supp = 1
model.q_supp = 1
model.alpha = 1
model.beta = 1
model.theta = 1
model.k1 = 8
model.k2 = 8
model.k3 = 0
model.c_crit = 0.25
model.q_crit = 0
model.lambda_c = 20
model.lambda_q = 0
model.c_inf = 1
model.q_inf = 1
initial.n = gaussians(0.5, 0.7, 0, 10; 0.5, -0.6, 0.2, 20)  # two colonies
initial.c = constant(1)
boundary.c = constant(1)
time.t_end = 5
";

    #[test]
    fn minimal_text_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.grid.n_cells, vec![8, 8]);
        assert_eq!(cfg.model.c_crit, 0.25);
        assert!(!cfg.drug_enabled);
        assert_eq!(cfg.kappa, DEFAULT_KAPPA);
        assert_eq!(cfg.solver_tol, 1e-10);
        assert!(cfg.strict);
        match &cfg.initial_n {
            Profile::Gaussians(b) => {
                assert_eq!(b.len(), 2);
                assert_eq!(b[1], Bump { amplitude: 0.5, center: vec![-0.6, 0.2], width: 20.0 });
            }
            other => panic!("{other:?}"),
        }
    }

    fn line_of(err: Error) -> usize {
        match err {
            Error::ConfigLine { line, .. } => line,
            other => panic!("expected a line-tagged error, got {other}"),
        }
    }

    #[test]
    fn negative_gamma_is_rejected_at_its_line() {
        let text = MINIMAL.replace("model.gamma = 10", "model.gamma = -1");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("gamma"));
        assert_eq!(line_of(err), 6);
        assert_eq!(parse_config(&text).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let text = format!("{MINIMAL}grid.h = 0.5\n");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lines 3 and 30"), "{msg}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{MINIMAL}model.gama = 3\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("model.gama"));
        assert_eq!(line_of(err), 30);
    }

    #[test]
    fn type_mismatch_and_missing_key() {
        let text = MINIMAL.replace("grid.dim = 2", "grid.dim = two");
        assert_eq!(line_of(parse_config(&text).unwrap_err()), 1);
        let text = MINIMAL.replace("time.t_end = 5\n", "");
        assert!(parse_config(&text).unwrap_err().to_string().contains("time.t_end"));
        let text = format!("{MINIMAL}model.drug_enabled = true\n");
        assert!(parse_config(&text).unwrap_err().to_string().contains("initial.q"));
    }

    #[test]
    fn profiles_parse_and_evaluate() {
        let p = Profile::parse("sine_y(0.8, 0.5, 0.2)", 2).unwrap();
        assert!((p.eval(&[3.0, 2.5]) - 1.3).abs() < 1e-15);
        assert!(Profile::parse("sine_y(0.8, 0.5, 0.2)", 1).is_err());
        assert!(Profile::parse("gaussians(1, 0, 10)", 2).is_err());
        assert!(Profile::parse("gauss(1)", 2).is_err());
        let g = Profile::parse("gaussians(0.5, 0, 0, 10)", 2).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0]), 0.5);
        assert_eq!(BoundarySpec::parse("trace").unwrap(), BoundarySpec::Trace);
        assert_eq!(BoundarySpec::parse(" constant(0.3) ").unwrap(), BoundarySpec::Constant(0.3));
        assert!(BoundarySpec::parse("dirichlet").is_err());
    }

    #[test]
    fn display_round_trips() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&cfg.to_string()).unwrap(), cfg);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn finite() -> impl Strategy<Value = f64> {
            prop_oneof![-1e3..1e3f64, (-300i32..300).prop_map(|e| 1.2345678901234567 * 10f64.powi(e))]
        }

        proptest! {
            #[test]
            fn round_trip_preserves_every_number(
                gamma in 2.0..40.0f64,
                mu in 1e-6..10.0f64,
                h in 1e-4..1.0f64,
                ox in finite(), oy in finite(),
                amp in finite(), cx in finite(), cy in finite(), w in 0.0..100.0f64,
                t_end in 0.0..10.0f64,
                kappa in 0.01..2.0f64,
                every in proptest::option::of(1e-3..5.0f64),
                strict in any::<bool>(),
                bc_q in prop_oneof![Just(BoundarySpec::Trace), Just(BoundarySpec::Neumann), (0.0..1.0f64).prop_map(BoundarySpec::Constant)],
            ) {
                let mut cfg = parse_config(super::MINIMAL).unwrap();
                cfg.model.gamma = gamma;
                cfg.model.mu = mu;
                cfg.grid.h = h;
                cfg.grid.origin = vec![ox, oy];
                cfg.initial_n = Profile::Gaussians(vec![Bump { amplitude: amp, center: vec![cx, cy], width: w }]);
                cfg.initial_q = Some(Profile::SineY { offset: amp, amplitude: cx, frequency: cy });
                cfg.boundary_q = Some(bc_q);
                cfg.drug_enabled = true;
                cfg.t_end = t_end;
                cfg.kappa = kappa;
                cfg.snapshot_every = every;
                cfg.strict = strict;
                cfg.solver_max_iter = Some(77);
                cfg.probe_center = Some(vec![cx, cy]);
                cfg.output_directory = Some("runs/a b".into());
                let back = parse_config(&cfg.to_string()).unwrap();
                prop_assert_eq!(back, cfg);
            }
        }
    }
}
