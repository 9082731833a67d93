//! Plain-text field snapshots.
//!
//! ```text
//! tumorsim-snapshot 1
//! field n
//! time 0.5
//! step 41
//! dim 2
//! n_cells 96 96
//! h 0.0625
//! origin -3 -3
//! bc neumann
//! data
//! 0.00012
//! ...
//! ```
//!
//! Interior values follow in storage order (first axis fastest), one per line,
//! in shortest round-trip form, so reading back is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::config::FORMAT_VERSION;
use crate::error::{Error, Result};
use crate::grid::{make_grid, BoundaryKind, Field, FieldName};

const MAGIC: &str = "tumorsim-snapshot";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: Field,
    pub t: f64,
    pub step: usize,
}

pub fn format_snapshot(field: &Field, t: f64, step: usize) -> String {
    let g = field.grid();
    let join = |v: &[String]| v.join(" ");
    let mut s = String::with_capacity(24 * g.cell_count() + 256);
    let _ = writeln!(s, "{MAGIC} {FORMAT_VERSION}");
    let _ = writeln!(s, "field {}", field.name().as_str());
    let _ = writeln!(s, "time {t}");
    let _ = writeln!(s, "step {step}");
    let _ = writeln!(s, "dim {}", g.dim());
    let _ = writeln!(s, "n_cells {}", join(&g.n_cells().iter().map(|n| n.to_string()).collect::<Vec<_>>()));
    let _ = writeln!(s, "h {}", g.h());
    let _ = writeln!(s, "origin {}", join(&g.origin().iter().map(|o| o.to_string()).collect::<Vec<_>>()));
    let _ = writeln!(s, "bc {}", g.bc().as_str());
    s.push_str("data\n");
    let v = field.values();
    g.for_each_cell(|i| {
        let _ = writeln!(s, "{}", v[i]);
    });
    s
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

fn header<'a>(lines: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<&'a str> {
    let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' ').or(if rest.is_empty() { Some("") } else { None }))
        .ok_or_else(|| bad(format!("expected `{key}`, got `{line}`")))
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("bad {what} `{s}`")))
}

pub fn parse_snapshot(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines();
    let version: u32 = num(header(&mut lines, MAGIC)?, "format version")?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let name = header(&mut lines, "field")?;
    let name = FieldName::parse(name).ok_or_else(|| bad(format!("unknown field `{name}`")))?;
    let t: f64 = num(header(&mut lines, "time")?, "time")?;
    let step: usize = num(header(&mut lines, "step")?, "step")?;
    let dim: usize = num(header(&mut lines, "dim")?, "dim")?;
    let n_cells = header(&mut lines, "n_cells")?.split_whitespace().map(|s| num::<usize>(s, "cell count")).collect::<Result<Vec<_>>>()?;
    let h: f64 = num(header(&mut lines, "h")?, "mesh width")?;
    let origin = header(&mut lines, "origin")?.split_whitespace().map(|s| num::<f64>(s, "origin")).collect::<Result<Vec<_>>>()?;
    let bc = match header(&mut lines, "bc")? {
        "neumann" => BoundaryKind::Neumann,
        "periodic" => BoundaryKind::Periodic,
        other => return Err(bad(format!("unknown boundary kind `{other}`"))),
    };
    header(&mut lines, "data")?;
    let grid = make_grid(dim, &n_cells, h, &origin, bc).map_err(|e| bad(e.to_string()))?;
    let values = lines.filter(|l| !l.trim().is_empty()).map(|l| num::<f64>(l, "value")).collect::<Result<Vec<_>>>()?;
    if values.len() != grid.cell_count() {
        return Err(bad(format!("expected {} values, found {}", grid.cell_count(), values.len())));
    }
    let field = Field::from_interior(&grid, name, &values).map_err(|e| bad(e.to_string()))?;
    Ok(Snapshot { field, t, step })
}

/// Writes and flushes one snapshot file.
pub fn write_snapshot(path: &Path, field: &Field, t: f64, step: usize) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_snapshot(field, t, step).as_bytes())?;
    f.sync_all()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    parse_snapshot(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn round_trip_is_bit_exact() {
        let g = make_grid(2, &[7, 5], 0.3, &[-1.0, 2.5], BoundaryKind::Periodic).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        let mut vals: Vec<f64> = (0..35).map(|_| rng.gen::<f64>() * 10f64.powi(rng.gen_range(-300..300))).collect();
        vals[0] = -0.0;
        vals[1] = f64::MIN_POSITIVE / 3.0;
        vals[2] = 1.0 / 3.0;
        let f = Field::from_interior(&g, FieldName::C, &vals).unwrap();
        let back = parse_snapshot(&format_snapshot(&f, 0.1 + 0.2, 17)).unwrap();
        assert_eq!(back.t, 0.1 + 0.2);
        assert_eq!(back.step, 17);
        assert_eq!(back.field.name(), FieldName::C);
        assert_eq!(back.field.grid(), f.grid());
        let a: Vec<u64> = back.field.interior_values().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = vals.iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid(1, &[4], 0.5, &[0.0], BoundaryKind::Neumann).unwrap();
        let f = Field::from_interior(&g, FieldName::N, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let p = dir.path().join("n.snap");
        write_snapshot(&p, &f, 2.0, 3).unwrap();
        assert_eq!(read_snapshot(&p).unwrap().field.interior_values(), f.interior_values());
    }

    #[test]
    fn malformed_input_is_rejected() {
        let g = make_grid(1, &[4], 0.5, &[0.0], BoundaryKind::Neumann).unwrap();
        let f = Field::from_interior(&g, FieldName::N, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let text = format_snapshot(&f, 0.0, 0);
        assert!(matches!(parse_snapshot(&text.replace("0.4\n", "")), Err(Error::Snapshot(_))));
        assert!(parse_snapshot(&text.replace("field n", "field z")).is_err());
        assert!(parse_snapshot(&text.replace("tumorsim-snapshot 1", "tumorsim-snapshot 2")).is_err());
        assert!(parse_snapshot(&text.replace("0.3", "abc")).is_err());
        assert_eq!(parse_snapshot("").unwrap_err().exit_code(), 3);
    }
}
