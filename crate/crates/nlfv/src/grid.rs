//! Uniform cell geometry and piecewise-constant cell-average fields.

use crate::error::{Error, Result};

/// How the solution is extended beyond the computational domain.
///
/// `ZeroExtension` treats the outside as vacuum for the convolution (state 0,
/// so β is evaluated at 0 there) and the domain edges as impermeable walls
/// for the update fluxes, so total mass is conserved exactly. The domain must
/// still be wide enough that the solution never meaningfully reaches the
/// walls before `t_end`, or the walls distort the dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    ZeroExtension,
    Periodic,
}

#[derive(Clone, Copy, Debug)]
pub struct Grid1d {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

impl Grid1d {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize, boundary: Boundary) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::Config(format!(
                "grid requires x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_cells == 0 {
            return Err(Error::Config("grid requires n_cells > 0".into()));
        }
        Ok(Grid1d {
            x_min,
            x_max,
            n_cells,
            boundary,
        })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    /// Center of cell `i`.
    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    /// Position of interface `k` (between cells `k-1` and `k`), `k = 0..=n`.
    #[inline]
    pub fn interface(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }
}

/// Cell averages at one time level.
#[derive(Clone, Debug)]
pub struct Field {
    pub grid: Grid1d,
    pub values: Vec<f64>,
    pub time: f64,
    pub step_index: u64,
}

impl Field {
    pub fn new(grid: Grid1d, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::Precondition(format!(
                "field length {} does not match grid with {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: 0, cell: i });
        }
        Ok(Field {
            grid,
            values,
            time: 0.0,
            step_index: 0,
        })
    }

    pub fn constant(grid: Grid1d, value: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.n_cells],
            time: 0.0,
            step_index: 0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Grid2d {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub boundary: Boundary,
}

impl Grid2d {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) || nx == 0 || ny == 0 {
            return Err(Error::Config(
                "2d grid requires x_min < x_max, y_min < y_max and nx, ny > 0".into(),
            ));
        }
        Ok(Grid2d {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            boundary,
        })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx(),
            self.y_min + (j as f64 + 0.5) * self.dy(),
        )
    }
}

/// Cell averages u_{ij}, stored row-major in `j` (index `j*nx + i`).
#[derive(Clone, Debug)]
pub struct Field2d {
    pub grid: Grid2d,
    pub values: Vec<f64>,
    pub time: f64,
    pub step_index: u64,
}

impl Field2d {
    pub fn new(grid: Grid2d, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx * grid.ny {
            return Err(Error::Precondition(format!(
                "field length {} does not match {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: 0, cell: i });
        }
        Ok(Field2d {
            grid,
            values,
            time: 0.0,
            step_index: 0,
        })
    }

    pub fn constant(grid: Grid2d, value: f64) -> Self {
        Field2d {
            grid,
            values: vec![value; grid.nx * grid.ny],
            time: 0.0,
            step_index: 0,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.grid.nx + i
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid1d::new(-1.5, 1.5, 1920, Boundary::ZeroExtension).unwrap();
        assert!((g.dx() - 0.0015625).abs() < 1e-18);
        assert!((g.cell_center(0) - (-1.5 + 0.5 * 0.0015625)).abs() < 1e-15);
        assert_eq!(g.interface(0), -1.5);
        assert_eq!(g.interface(1920), 1.5);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(Grid1d::new(1.0, 1.0, 10, Boundary::ZeroExtension).is_err());
        assert!(Grid1d::new(0.0, 1.0, 0, Boundary::ZeroExtension).is_err());
        assert!(Grid2d::new(0.0, 1.0, 1.0, 0.0, 4, 4, Boundary::Periodic).is_err());
    }
}
