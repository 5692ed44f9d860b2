//! Cell-centered uniform grids over a box, sampled weights/functions, and
//! the cube families driving every supremum search.

use num::ToPrimitive;

use crate::error::{Error, Result};
use crate::power_weights::PowerWeight;

pub const MAX_DIM: usize = 2;

/// A cell-centered uniform grid on `[−L, L]^n`, `n ∈ {1, 2}`, with a
/// power-of-two number of cells per axis. No sample point sits at the
/// origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    cells_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, cells_per_axis: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Unsupported(format!("grid dimension {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Domain("half width must be positive".into()));
        }
        if cells_per_axis < 2 || !cells_per_axis.is_power_of_two() {
            return Err(Error::Domain(format!(
                "cells per axis {cells_per_axis} must be a power of two ≥ 2"
            )));
        }
        Ok(Grid { dim, half_width, cells_per_axis })
    }

    pub fn line(half_width: f64, cells: usize) -> Result<Self> {
        Grid::new(1, half_width, cells)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.cells_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    pub fn num_cells(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    /// Coordinate of the cell center along one axis.
    pub fn axis_center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.cell_width()
    }

    /// Center of the cell with linear index `idx` (row-major).
    pub fn center(&self, idx: usize) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        match self.dim {
            1 => out[0] = self.axis_center(idx),
            2 => {
                out[0] = self.axis_center(idx / self.cells_per_axis);
                out[1] = self.axis_center(idx % self.cells_per_axis);
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn same_mesh(&self, other: &Grid) -> bool {
        self == other
    }
}

fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Strictly positive samples of a weight at the cell centers.
#[derive(Clone, Debug)]
pub struct SampledWeight {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledWeight {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::Dimension(format!(
                "{} samples for {} cells",
                values.len(),
                grid.num_cells()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("weight samples must be finite and positive".into()));
        }
        Ok(SampledWeight { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.num_cells())
            .map(|i| {
                let c = grid.center(i);
                f(&c[..grid.dim()])
            })
            .collect();
        SampledWeight::new(grid, values)
    }

    pub fn from_power(grid: Grid, w: &PowerWeight) -> Result<Self> {
        if w.dim() as usize != grid.dim() {
            return Err(Error::Dimension("weight dimension differs from grid".into()));
        }
        SampledWeight::from_fn(grid, |x| w.eval(x))
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        let n = grid.num_cells();
        SampledWeight::new(grid, vec![c; n])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self, c: f64) -> Result<SampledWeight> {
        SampledWeight::new(self.grid.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise power `w^e`.
    pub fn pow(&self, e: f64) -> Result<SampledWeight> {
        SampledWeight::new(self.grid.clone(), self.values.iter().map(|v| v.powf(e)).collect())
    }
}

/// Real-valued samples of a function at the cell centers.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::Dimension(format!(
                "{} samples for {} cells",
                values.len(),
                grid.num_cells()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("function samples must be finite".into()));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.num_cells())
            .map(|i| {
                let c = grid.center(i);
                f(&c[..grid.dim()])
            })
            .collect();
        SampledFunction::new(grid, values)
    }

    pub fn zero(grid: Grid) -> Self {
        let n = grid.num_cells();
        SampledFunction { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scale(&self, c: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul_pointwise(&self, other: &SampledFunction) -> Result<SampledFunction> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Translate by whole cells along each axis: `(τ_s f)(x) = f(x + s·h)`,
    /// zero outside the box.
    pub fn translate_cells(&self, shift: &[isize]) -> Result<SampledFunction> {
        if shift.len() != self.grid.dim() {
            return Err(Error::Dimension("shift arity differs from grid dimension".into()));
        }
        let n = self.grid.cells_per_axis as isize;
        let mut values = vec![0.0; self.values.len()];
        match self.grid.dim {
            1 => {
                for i in 0..n {
                    let j = i + shift[0];
                    if (0..n).contains(&j) {
                        values[i as usize] = self.values[j as usize];
                    }
                }
            }
            2 => {
                for i0 in 0..n {
                    for i1 in 0..n {
                        let j0 = i0 + shift[0];
                        let j1 = i1 + shift[1];
                        if (0..n).contains(&j0) && (0..n).contains(&j1) {
                            values[(i0 * n + i1) as usize] = self.values[(j0 * n + j1) as usize];
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(SampledFunction { grid: self.grid.clone(), values })
    }

    /// Weighted Lebesgue quasi-norm `‖f‖_{L^p(w)}` by the midpoint rule,
    /// `p ∈ (0, ∞)`. A missing weight means `w ≡ 1`.
    pub fn lp_norm(&self, p: f64, weight: Option<&SampledWeight>) -> Result<f64> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Domain(format!("norm exponent {p} out of range")));
        }
        if let Some(w) = weight {
            check_same_grid(&self.grid, &w.grid)?;
        }
        let vol = self.grid.cell_volume();
        let mut acc = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = weight.map_or(1.0, |w| w.values[i]);
            acc += v.abs().powf(p) * w;
        }
        Ok((acc * vol).powf(1.0 / p))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// One axis-aligned cube of the family: `side` cells starting at `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cube {
    pub depth: u32,
    pub side: usize,
    pub offset: [usize; MAX_DIM],
}

/// How cube positions are enumerated at each depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyMode {
    /// The dyadic partition plus two copies shifted by one third and two
    /// thirds of the cube side (rounded to whole cells).
    ThreeShift,
    /// Every whole-cell position at each dyadic side; supersets the
    /// three-shift family and closes most of its gap to the true supremum.
    Sliding,
}

/// Dyadic cube family over a grid: depths `0..=max_depth`, cube side
/// `cells_per_axis / 2^depth`, positions per [`FamilyMode`]. Cubes are
/// unions of whole cells with side at least two cells, fully inside the box.
#[derive(Clone, Debug)]
pub struct CubeFamily {
    dim: usize,
    cells_per_axis: usize,
    max_depth: u32,
    mode: FamilyMode,
    cubes: Vec<Cube>,
}

impl CubeFamily {
    pub fn new(grid: &Grid, max_depth: u32, mode: FamilyMode) -> Result<Self> {
        let n = grid.cells_per_axis();
        let mut cubes = Vec::new();
        for depth in 0..=max_depth {
            let side = n >> depth;
            if side < 2 {
                break;
            }
            let offsets_1d: Vec<usize> = match mode {
                FamilyMode::ThreeShift => {
                    let mut offs: Vec<usize> = Vec::new();
                    for shift in [0, side / 3, 2 * side / 3] {
                        let mut o = shift;
                        while o + side <= n {
                            offs.push(o);
                            o += side;
                        }
                    }
                    offs.sort_unstable();
                    offs.dedup();
                    offs
                }
                FamilyMode::Sliding => (0..=n - side).collect(),
            };
            match grid.dim() {
                1 => {
                    for &o in &offsets_1d {
                        cubes.push(Cube { depth, side, offset: [o, 0] });
                    }
                }
                2 => {
                    for &o0 in &offsets_1d {
                        for &o1 in &offsets_1d {
                            cubes.push(Cube { depth, side, offset: [o0, o1] });
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        if cubes.is_empty() {
            return Err(Error::Domain("cube family is empty".into()));
        }
        Ok(CubeFamily { dim: grid.dim(), cells_per_axis: n, max_depth, mode, cubes })
    }

    pub fn three_shift(grid: &Grid, max_depth: u32) -> Result<Self> {
        CubeFamily::new(grid, max_depth, FamilyMode::ThreeShift)
    }

    pub fn sliding(grid: &Grid, max_depth: u32) -> Result<Self> {
        CubeFamily::new(grid, max_depth, FamilyMode::Sliding)
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn matches_grid(&self, grid: &Grid) -> bool {
        self.dim == grid.dim() && self.cells_per_axis == grid.cells_per_axis()
    }
}

/// Prefix sums over grid samples giving O(1) window sums (summed-area table
/// in two dimensions).
pub struct PrefixField {
    dim: usize,
    n: usize,
    cum: Vec<f64>,
}

impl PrefixField {
    pub fn new(grid: &Grid, values: &[f64]) -> Self {
        let n = grid.cells_per_axis();
        match grid.dim() {
            1 => {
                let mut cum = Vec::with_capacity(n + 1);
                cum.push(0.0);
                let mut acc = 0.0;
                for v in values {
                    acc += v;
                    cum.push(acc);
                }
                PrefixField { dim: 1, n, cum }
            }
            2 => {
                let mut cum = vec![0.0; (n + 1) * (n + 1)];
                for i in 0..n {
                    for j in 0..n {
                        cum[(i + 1) * (n + 1) + (j + 1)] = values[i * n + j]
                            + cum[i * (n + 1) + (j + 1)]
                            + cum[(i + 1) * (n + 1) + j]
                            - cum[i * (n + 1) + j];
                    }
                }
                PrefixField { dim: 2, n, cum }
            }
            _ => unreachable!(),
        }
    }

    /// Sum of the samples inside a cube.
    pub fn cube_sum(&self, c: &Cube) -> f64 {
        match self.dim {
            1 => self.cum[c.offset[0] + c.side] - self.cum[c.offset[0]],
            2 => {
                let n1 = self.n + 1;
                let (a, b) = (c.offset[0], c.offset[1]);
                let (a2, b2) = (a + c.side, b + c.side);
                self.cum[a2 * n1 + b2] - self.cum[a * n1 + b2] - self.cum[a2 * n1 + b]
                    + self.cum[a * n1 + b]
            }
            _ => unreachable!(),
        }
    }

    pub fn cube_mean(&self, c: &Cube) -> f64 {
        let cells = match self.dim {
            1 => c.side,
            _ => c.side * c.side,
        };
        self.cube_sum(c) / cells as f64
    }
}

/// Iterates the linear indices of the cells inside a cube.
pub fn cube_cells<'a>(grid: &'a Grid, c: &'a Cube) -> Box<dyn Iterator<Item = usize> + 'a> {
    let n = grid.cells_per_axis();
    match grid.dim() {
        1 => Box::new(c.offset[0]..c.offset[0] + c.side),
        2 => {
            let (a, b, s) = (c.offset[0], c.offset[1], c.side);
            Box::new((a..a + s).flat_map(move |i| (b..b + s).map(move |j| i * n + j)))
        }
        _ => unreachable!(),
    }
}

/// Exact rational to float, for sampling and report output.
pub fn rat_to_f64(r: &num::BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_centers_avoid_origin() {
        let g = Grid::line(1.0, 64).unwrap();
        for i in 0..64 {
            assert!(g.axis_center(i).abs() > 1e-12);
        }
        assert_eq!(g.cell_width(), 2.0 / 64.0);
    }

    #[test]
    fn prefix_sums_match_naive() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        let vals: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let pf = PrefixField::new(&g, &vals);
        let c = Cube { depth: 1, side: 4, offset: [2, 3] };
        let naive: f64 = cube_cells(&g, &c).map(|i| vals[i]).sum();
        assert!((pf.cube_sum(&c) - naive).abs() < 1e-12);
    }

    #[test]
    fn three_shift_family_is_subset_of_sliding() {
        let g = Grid::line(1.0, 64).unwrap();
        let ts = CubeFamily::three_shift(&g, 4).unwrap();
        let sl = CubeFamily::sliding(&g, 4).unwrap();
        for c in ts.cubes() {
            assert!(sl.cubes().contains(c));
        }
        assert!(ts.cubes().iter().all(|c| c.side >= 2));
    }

    #[test]
    fn translation_by_cells() {
        let g = Grid::line(1.0, 8).unwrap();
        let f = SampledFunction::new(g.clone(), (0..8).map(|i| i as f64).collect()).unwrap();
        let t = f.translate_cells(&[2]).unwrap();
        assert_eq!(t.values()[0], 2.0);
        assert_eq!(t.values()[5], 7.0);
        assert_eq!(t.values()[6], 0.0);
    }

    #[test]
    fn lp_norm_midpoint() {
        let g = Grid::line(1.0, 128).unwrap();
        let f = SampledFunction::from_fn(g.clone(), |x| x[0]).unwrap();
        // ∫_{-1}^{1} |x|^2 dx = 2/3
        let n2 = f.lp_norm(2.0, None).unwrap();
        assert!((n2 - (2.0f64 / 3.0).sqrt()).abs() < 1e-4);
    }
}
