//! Uniform cell-centred grids with one ghost layer, scalar fields living on
//! them, the forward/backward difference operators and ghost filling.
//!
//! Multi-indices are 1-based on active axes: interior cells run `1..=N`, the
//! ghost layer sits at `0` and `N + 1`. Inactive axes (beyond `dim`) have a
//! single slot at index `0`. Storage is row-major with axis 1 fastest.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Neumann,
    Periodic,
    Dirichlet,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Neumann => "neumann",
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Dirichlet => "dirichlet",
        }
    }
}

/// Boundary values `g(t, x)` for Dirichlet ghosts.
pub trait BoundaryValue: Send + Sync {
    fn value(&self, t: f64, x: &[f64]) -> f64;
}

impl<F> BoundaryValue for F
where
    F: Fn(f64, &[f64]) -> f64 + Send + Sync,
{
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self(t, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n_cells: [usize; MAX_DIM],
    h: f64,
    origin: [f64; MAX_DIM],
    bc: BoundaryKind,
    padded: [usize; MAX_DIM],
    strides: [usize; MAX_DIM],
}

/// Builds a grid. `bc` is the boundary kind of the density and the potential
/// (Neumann or periodic); nutrient and drug boundaries are handled by the stepper.
pub fn make_grid(dim: usize, n_cells: &[usize], h: f64, origin: &[f64], bc: BoundaryKind) -> Result<Grid> {
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::config(format!("grid dimension must be 1, 2 or 3, got {dim}")));
    }
    if n_cells.len() != dim || origin.len() != dim {
        return Err(Error::config(format!(
            "grid needs {dim} cell counts and {dim} origin coordinates, got {} and {}",
            n_cells.len(),
            origin.len()
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::config(format!("mesh width must be positive, got {h}")));
    }
    if let Some(n) = n_cells.iter().find(|&&n| n < 2) {
        return Err(Error::config(format!("every axis needs at least 2 cells, got {n}")));
    }
    if origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::config("grid origin must be finite"));
    }
    if bc == BoundaryKind::Dirichlet {
        return Err(Error::config("density/potential boundary must be neumann or periodic"));
    }
    let mut nc = [1; MAX_DIM];
    let mut org = [0.0; MAX_DIM];
    let mut padded = [1; MAX_DIM];
    for a in 0..dim {
        nc[a] = n_cells[a];
        org[a] = origin[a];
        padded[a] = n_cells[a] + 2;
    }
    let strides = [1, padded[0], padded[0] * padded[1]];
    Ok(Grid { dim, n_cells: nc, h, origin: org, bc, padded, strides })
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cells(&self) -> &[usize] {
        &self.n_cells[..self.dim]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn with_bc(mut self, bc: BoundaryKind) -> Self {
        self.bc = bc;
        self
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.n_cells[axis] as f64 * self.h
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Number of interior cells.
    pub fn cell_count(&self) -> usize {
        self.n_cells[..self.dim].iter().product()
    }

    /// Number of stored values, ghosts included.
    pub fn padded_len(&self) -> usize {
        self.padded.iter().product()
    }

    pub fn ghost_count(&self) -> usize {
        self.padded_len() - self.cell_count()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn index(&self, m: [usize; MAX_DIM]) -> usize {
        m[0] * self.strides[0] + m[1] * self.strides[1] + m[2] * self.strides[2]
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut m = [0; MAX_DIM];
        for a in (0..MAX_DIM).rev() {
            m[a] = idx / self.strides[a];
            idx %= self.strides[a];
        }
        m
    }

    /// Centre of the cell with (padded) multi-index `m`: `origin + (i - 1/2) h`.
    /// Ghost indices give the ghost-cell centres.
    pub fn center(&self, m: [usize; MAX_DIM]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.origin[a] + (m[a] as f64 - 0.5) * self.h;
        }
        x
    }

    fn interior_range(&self, axis: usize) -> std::ops::RangeInclusive<usize> {
        if axis < self.dim {
            1..=self.n_cells[axis]
        } else {
            0..=0
        }
    }

    /// Calls `f` with the linear index of the first cell (axis-1 index 1) of
    /// every interior row, in storage order. Rows have `n_cells()[0]` cells.
    #[inline]
    pub fn for_each_row(&self, mut f: impl FnMut(usize)) {
        for k in self.interior_range(2) {
            for j in self.interior_range(1) {
                f(self.index([1, j, k]));
            }
        }
    }

    /// Calls `f` with every interior linear index in storage order.
    #[inline]
    pub fn for_each_cell(&self, mut f: impl FnMut(usize)) {
        let n0 = self.n_cells[0];
        self.for_each_row(|base| {
            for idx in base..base + n0 {
                f(idx);
            }
        });
    }

    /// Interior multi-indices in storage order.
    pub fn interior_indices(&self) -> Vec<[usize; MAX_DIM]> {
        let mut out = Vec::with_capacity(self.cell_count());
        for k in self.interior_range(2) {
            for j in self.interior_range(1) {
                for i in self.interior_range(0) {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    /// Visits the boundary slab of `axis`: for every padded position on the
    /// other axes, `f` receives the multi-index with `m[axis] = 0`.
    fn for_each_slab(&self, axis: usize, mut f: impl FnMut([usize; MAX_DIM])) {
        let (b, c) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for mc in 0..self.padded[c] {
            for mb in 0..self.padded[b] {
                let mut m = [0; MAX_DIM];
                m[b] = mb;
                m[c] = mc;
                f(m);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldName {
    N,
    W,
    P,
    C,
    Q,
    Other,
}

impl FieldName {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldName::N => "n",
            FieldName::W => "W",
            FieldName::P => "p",
            FieldName::C => "c",
            FieldName::Q => "q",
            FieldName::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "n" => FieldName::N,
            "W" => FieldName::W,
            "p" => FieldName::P,
            "c" => FieldName::C,
            "q" => FieldName::Q,
            "other" => FieldName::Other,
            _ => return None,
        })
    }
}

/// A scalar sampled at cell centres, including one ghost layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    name: FieldName,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid, name: FieldName) -> Self {
        Field { grid: *grid, name, values: vec![0.0; grid.padded_len()] }
    }

    pub fn constant(grid: &Grid, name: FieldName, v: f64) -> Self {
        let mut f = Field::zeros(grid, name);
        grid.for_each_cell(|i| f.values[i] = v);
        f
    }

    /// Samples `f(x)` at interior cell centres; ghosts are left at zero.
    pub fn from_fn(grid: &Grid, name: FieldName, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = Field::zeros(grid, name);
        for m in grid.interior_indices() {
            let x = grid.center(m);
            out.values[grid.index(m)] = f(&x[..grid.dim]);
        }
        out
    }

    /// Builds a field from interior values given in storage order.
    pub fn from_interior(grid: &Grid, name: FieldName, interior: &[f64]) -> Result<Self> {
        if interior.len() != grid.cell_count() {
            return Err(Error::config(format!(
                "expected {} interior values, got {}",
                grid.cell_count(),
                interior.len()
            )));
        }
        let mut out = Field::zeros(grid, name);
        let mut it = interior.iter();
        grid.for_each_cell(|i| out.values[i] = *it.next().unwrap());
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn name(&self) -> FieldName {
        self.name
    }

    pub fn with_name(mut self, name: FieldName) -> Self {
        self.name = name;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, m: [usize; MAX_DIM]) -> f64 {
        self.values[self.grid.index(m)]
    }

    pub fn set(&mut self, m: [usize; MAX_DIM], v: f64) {
        let i = self.grid.index(m);
        self.values[i] = v;
    }

    pub fn interior_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.cell_count());
        self.grid.for_each_cell(|i| out.push(self.values[i]));
        out
    }

    /// `(min, max)` over interior cells.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        self.grid.for_each_cell(|i| {
            let v = self.values[i];
            lo = lo.min(v);
            hi = hi.max(v);
        });
        (lo, hi)
    }

    /// Interior sum in storage order (fixed, reproducible).
    pub fn sum(&self) -> f64 {
        let mut s = 0.0;
        self.grid.for_each_cell(|i| s += self.values[i]);
        s
    }

    /// `Σ f h^d` over interior cells.
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_volume()
    }

    /// First interior cell holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<[usize; MAX_DIM]> {
        let mut found = None;
        self.grid.for_each_cell(|i| {
            if found.is_none() && !self.values[i].is_finite() {
                found = Some(i);
            }
        });
        found.map(|i| self.grid.multi_index(i))
    }

    /// Fills the ghost layer.
    ///
    /// * `Neumann`: ghost = adjacent interior value (zero normal difference).
    /// * `Periodic`: ghost = interior value on the opposite face.
    /// * `Dirichlet`: ghost = `data(t, x_ghost)` at the ghost-cell centre.
    ///
    /// Axes are processed in order over their full padded slabs, so corner
    /// ghosts are filled too (no stencil reads them).
    pub fn fill_ghosts(&mut self, kind: BoundaryKind, data: Option<&dyn BoundaryValue>, t: f64) -> Result<()> {
        let g = self.grid;
        match kind {
            BoundaryKind::Neumann | BoundaryKind::Periodic => {
                for a in 0..g.dim {
                    let s = g.strides[a];
                    let n = g.n_cells[a];
                    g.for_each_slab(a, |m| {
                        let base = g.index(m);
                        let (lo_src, hi_src) = if kind == BoundaryKind::Neumann { (1, n) } else { (n, 1) };
                        self.values[base] = self.values[base + lo_src * s];
                        self.values[base + (n + 1) * s] = self.values[base + hi_src * s];
                    });
                }
            }
            BoundaryKind::Dirichlet => {
                let data = data.ok_or_else(|| Error::config("dirichlet ghost fill requested without boundary data"))?;
                for a in 0..g.dim {
                    let n = g.n_cells[a];
                    g.for_each_slab(a, |mut m| {
                        for ghost in [0, n + 1] {
                            m[a] = ghost;
                            let x = g.center(m);
                            let i = g.index(m);
                            self.values[i] = data.value(t, &x[..g.dim]);
                        }
                    });
                }
            }
        }
        Ok(())
    }

    /// `(min, max)` over the face-adjacent ghost cells (corners excluded).
    pub fn ghost_min_max(&self) -> (f64, f64) {
        let g = &self.grid;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in 0..g.dim {
            let n = g.n_cells[a];
            g.for_each_slab(a, |mut m| {
                let inside = (0..g.dim).filter(|&b| b != a).all(|b| (1..=g.n_cells[b]).contains(&m[b]));
                if inside {
                    for ghost in [0, n + 1] {
                        m[a] = ghost;
                        let v = self.values[g.index(m)];
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            });
        }
        (lo, hi)
    }
}

/// `D_j⁺ f_i = (f_{i+e_j} - f_i) / h` on interior cells. Ghosts of `f` must be filled.
pub fn diff_forward(f: &Field, axis: usize) -> Field {
    let g = f.grid;
    assert!(axis < g.dim, "axis {axis} out of range for a {}-d grid", g.dim);
    let s = g.strides[axis];
    let mut out = Field::zeros(&g, FieldName::Other);
    g.for_each_cell(|i| out.values[i] = (f.values[i + s] - f.values[i]) / g.h);
    out
}

/// `D_j⁻ f_i = D_j⁺ f_{i-e_j}` on interior cells. Ghosts of `f` must be filled.
pub fn diff_backward(f: &Field, axis: usize) -> Field {
    let g = f.grid;
    assert!(axis < g.dim, "axis {axis} out of range for a {}-d grid", g.dim);
    let s = g.strides[axis];
    let mut out = Field::zeros(&g, FieldName::Other);
    g.for_each_cell(|i| out.values[i] = (f.values[i] - f.values[i - s]) / g.h);
    out
}

/// Laplacian stencil value at linear index `i`.
#[inline(always)]
pub(crate) fn laplace_at(values: &[f64], i: usize, strides: &[usize], inv_h2: f64) -> f64 {
    let c = values[i];
    let mut acc = 0.0;
    for &s in strides {
        acc += values[i + s] - 2.0 * c + values[i - s];
    }
    acc * inv_h2
}

/// `Δ_h f = (1/h²) Σ_j (f_{i+e_j} - 2 f_i + f_{i-e_j})` on interior cells.
pub fn laplace_h(f: &Field) -> Field {
    let g = f.grid;
    let strides = &g.strides[..g.dim];
    let inv_h2 = 1.0 / (g.h * g.h);
    let mut out = Field::zeros(&g, FieldName::Other);
    g.for_each_cell(|i| out.values[i] = laplace_at(&f.values, i, strides, inv_h2));
    out
}

/// `div_h⁻ v = Σ_j D_j⁻ v^{(j)}`, where `v^{(j)}` holds face values at `i + e_j/2`
/// for interior cells and for the ghost slot at index 0 of axis `j`.
pub fn divergence_backward(components: &[Field]) -> Field {
    let g = components[0].grid;
    assert_eq!(components.len(), g.dim);
    let mut out = Field::zeros(&g, FieldName::Other);
    g.for_each_cell(|i| {
        let mut acc = 0.0;
        for (a, v) in components.iter().enumerate() {
            acc += (v.values[i] - v.values[i - g.strides[a]]) / g.h;
        }
        out.values[i] = acc;
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, h: f64, bc: BoundaryKind) -> Grid {
        make_grid(1, &[n], h, &[0.0], bc).unwrap()
    }

    #[test]
    fn centers_follow_half_offset() {
        let g = grid1(4, 0.25, BoundaryKind::Neumann);
        let xs: Vec<f64> = g.interior_indices().into_iter().map(|m| g.center(m)[0]).collect();
        assert_eq!(xs, vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn six_unit_domain_at_fine_mesh() {
        let g = make_grid(2, &[384, 384], 1.0 / 64.0, &[-3.0, -3.0], BoundaryKind::Neumann).unwrap();
        for a in 0..2 {
            assert_eq!(g.origin()[a], -3.0);
            assert_eq!(g.origin()[a] + g.extent(a), 3.0);
        }
        assert_eq!(g.cell_count(), 384 * 384);
    }

    #[test]
    fn ghost_ring_of_two_by_two() {
        let g = make_grid(2, &[2, 2], 0.5, &[0.0, 0.0], BoundaryKind::Neumann).unwrap();
        // enumeration oracle: every padded index with some axis index outside 1..=2
        let mut ghosts = 0;
        for j in 0..4 {
            for i in 0..4 {
                if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
                    ghosts += 1;
                }
            }
        }
        assert_eq!(g.cell_count(), 4);
        assert_eq!(g.ghost_count(), ghosts);
        assert_eq!(ghosts, 12);
    }

    #[test]
    fn rejects_malformed_grids() {
        assert!(make_grid(1, &[4], 0.0, &[0.0], BoundaryKind::Neumann).is_err());
        assert!(make_grid(1, &[4], -1.0, &[0.0], BoundaryKind::Neumann).is_err());
        assert!(make_grid(2, &[4, 1], 0.1, &[0.0, 0.0], BoundaryKind::Neumann).is_err());
        assert!(make_grid(4, &[4, 4, 4, 4], 0.1, &[0.0; 4], BoundaryKind::Neumann).is_err());
        assert!(make_grid(2, &[4], 0.1, &[0.0, 0.0], BoundaryKind::Neumann).is_err());
        assert!(make_grid(1, &[4], 0.1, &[0.0], BoundaryKind::Dirichlet).is_err());
    }

    #[test]
    fn forward_difference_by_hand() {
        let g = grid1(3, 0.5, BoundaryKind::Neumann);
        let mut f = Field::from_interior(&g, FieldName::Other, &[1.0, 2.0, 4.0]).unwrap();
        f.fill_ghosts(BoundaryKind::Neumann, None, 0.0).unwrap();
        let d = diff_forward(&f, 0);
        assert_eq!(d.get([1, 0, 0]), 2.0);
        assert_eq!(d.get([2, 0, 0]), 4.0);
        // Neumann mirror: zero difference across the boundary face
        assert_eq!(d.get([3, 0, 0]), 0.0);
    }

    #[test]
    fn differences_of_constants_vanish() {
        let g = make_grid(2, &[5, 4], 0.3, &[0.0, 0.0], BoundaryKind::Periodic).unwrap();
        let mut f = Field::constant(&g, FieldName::Other, 2.7);
        f.fill_ghosts(BoundaryKind::Periodic, None, 0.0).unwrap();
        for a in 0..2 {
            assert!(diff_forward(&f, a).interior_values().iter().all(|&v| v == 0.0));
            assert!(diff_backward(&f, a).interior_values().iter().all(|&v| v == 0.0));
        }
        assert!(laplace_h(&f).interior_values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplace_of_hat() {
        let g = grid1(3, 1.0, BoundaryKind::Neumann);
        let mut f = Field::from_interior(&g, FieldName::Other, &[0.0, 1.0, 0.0]).unwrap();
        f.fill_ghosts(BoundaryKind::Neumann, None, 0.0).unwrap();
        assert_eq!(laplace_h(&f).get([2, 0, 0]), -2.0);
    }

    #[test]
    fn laplace_of_linear_profile_under_neumann() {
        let g = grid1(6, 0.5, BoundaryKind::Neumann);
        let mut f = Field::from_fn(&g, FieldName::Other, |x| 3.0 * x[0] + 1.0);
        f.fill_ghosts(BoundaryKind::Neumann, None, 0.0).unwrap();
        let lap = laplace_h(&f).interior_values();
        // direct stencil oracle with mirrored ghosts
        let v = f.interior_values();
        let mut ext = vec![v[0]];
        ext.extend_from_slice(&v);
        ext.push(v[5]);
        for i in 0..6 {
            let expect = (ext[i + 2] - 2.0 * ext[i + 1] + ext[i]) / 0.25;
            assert!((lap[i] - expect).abs() < 1e-12);
        }
        assert!(lap[0].abs() > 1.0 && lap[5].abs() > 1.0);
        assert!(lap[1..5].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn laplace_of_quadratic_is_two() {
        let g = make_grid(2, &[10, 12], 0.1, &[-0.5, 0.3], BoundaryKind::Neumann).unwrap();
        let mut f = Field::from_fn(&g, FieldName::Other, |x| x[0] * x[0]);
        f.fill_ghosts(BoundaryKind::Neumann, None, 0.0).unwrap();
        let lap = laplace_h(&f);
        for m in g.interior_indices() {
            if (2..=9).contains(&m[0]) {
                assert!((lap.get(m) - 2.0).abs() < 1e-11, "{m:?}: {}", lap.get(m));
            }
        }
    }

    #[test]
    fn ghost_fill_kinds() {
        let g = grid1(3, 1.0, BoundaryKind::Periodic);
        let mut f = Field::from_interior(&g, FieldName::Other, &[1.0, 2.0, 3.0]).unwrap();
        f.fill_ghosts(BoundaryKind::Periodic, None, 0.0).unwrap();
        assert_eq!(f.get([0, 0, 0]), 3.0);
        assert_eq!(f.get([4, 0, 0]), 1.0);

        let mut f = Field::from_interior(&g, FieldName::Other, &[3.7, 2.0, 1.5]).unwrap();
        f.fill_ghosts(BoundaryKind::Neumann, None, 0.0).unwrap();
        assert_eq!(f.get([0, 0, 0]), 3.7);
        assert_eq!(f.get([4, 0, 0]), 1.5);

        let g2 = make_grid(2, &[3, 4], 0.5, &[0.0, 0.0], BoundaryKind::Neumann).unwrap();
        let mut c = Field::constant(&g2, FieldName::C, 0.2);
        let one = |_t: f64, _x: &[f64]| 1.0;
        c.fill_ghosts(BoundaryKind::Dirichlet, Some(&one), 0.0).unwrap();
        assert_eq!(c.ghost_min_max(), (1.0, 1.0));
        assert!(c.fill_ghosts(BoundaryKind::Dirichlet, None, 0.0).is_err());
    }

    #[test]
    fn dirichlet_samples_ghost_centres_at_given_time() {
        let g = grid1(4, 0.25, BoundaryKind::Neumann);
        let mut c = Field::zeros(&g, FieldName::C);
        let f = |t: f64, x: &[f64]| t + x[0];
        c.fill_ghosts(BoundaryKind::Dirichlet, Some(&f), 2.0).unwrap();
        assert_eq!(c.get([0, 0, 0]), 2.0 - 0.125);
        assert_eq!(c.get([5, 0, 0]), 2.0 + 1.125);
    }

    #[test]
    fn three_d_periodic_wraps_each_axis() {
        let g = make_grid(3, &[3, 4, 2], 1.0, &[0.0; 3], BoundaryKind::Periodic).unwrap();
        let mut f = Field::from_fn(&g, FieldName::Other, |x| x[0] + 10.0 * x[1] + 100.0 * x[2]);
        f.fill_ghosts(BoundaryKind::Periodic, None, 0.0).unwrap();
        assert_eq!(f.get([0, 2, 1]), f.get([3, 2, 1]));
        assert_eq!(f.get([2, 5, 1]), f.get([2, 1, 1]));
        assert_eq!(f.get([2, 3, 0]), f.get([2, 3, 2]));
    }
}
