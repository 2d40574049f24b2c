//! Mesh-refinement rate studies, the local Godunov reference solver, and the
//! kernel-radius sweep toward the local limit.

use crate::diagnostics::l1_diff;
use crate::error::{Error, Result};
use crate::flux::godunov_local;
use crate::grid::{Boundary, Field, Field2d, Grid1d};
use crate::kernel::KernelSpec;
use crate::model::{FluxShape, Model};
use crate::solver1d::{initial_field, run_1d, step_count, Initial1d, RunConfig1d};
use crate::solver2d::{run_2d, RunConfig2d};
use std::fmt;

/// One refinement level: mesh width, L¹ distance to the next-finer solution,
/// and the rate α = log₂(d_j / d_{j+1}) (absent on the last row).
#[derive(Clone, Copy, Debug)]
pub struct RateRow {
    pub dx: f64,
    pub l1_distance: f64,
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<RateRow>,
}

impl ConvergenceTable {
    fn from_distances(dxs: &[f64], dists: &[f64]) -> Self {
        let rows = dists
            .iter()
            .enumerate()
            .map(|(j, d)| RateRow {
                dx: dxs[j],
                l1_distance: *d,
                alpha: dists.get(j + 1).map(|d_next| (d / d_next).log2()),
            })
            .collect();
        ConvergenceTable { rows }
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.alpha).collect()
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>12}  {:>14}  {:>8}", "dx", "l1_distance", "alpha")?;
        for r in &self.rows {
            match r.alpha {
                Some(a) => writeln!(f, "{:>12.8}  {:>14.6e}  {:>8.4}", r.dx, r.l1_distance, a)?,
                None => writeln!(f, "{:>12.8}  {:>14.6e}  {:>8}", r.dx, r.l1_distance, "")?,
            }
        }
        Ok(())
    }
}

/// Exact L¹ distance of two piecewise-constant fields where the fine grid is
/// the 2-refinement of the coarse grid.
pub fn l1_distance_nested(coarse: &Field, fine: &Field) -> Result<f64> {
    let (gc, gf) = (coarse.grid, fine.grid);
    let extent_ok = (gc.x_min - gf.x_min).abs() < 1e-12 && (gc.x_max - gf.x_max).abs() < 1e-12;
    if !extent_ok || gf.n_cells != 2 * gc.n_cells {
        return Err(Error::Precondition(
            "l1_distance_nested requires the fine grid to be the exact 2-refinement".into(),
        ));
    }
    let dxf = gf.dx();
    let mut acc = 0.0;
    for (j, v) in fine.values.iter().enumerate() {
        acc += (v - coarse.values[j / 2]).abs();
    }
    acc *= dxf;
    Ok(acc)
}

/// 2D analogue: each coarse cell pairs with its 4 children.
pub fn l1_distance_nested_2d(coarse: &Field2d, fine: &Field2d) -> Result<f64> {
    let (gc, gf) = (coarse.grid, fine.grid);
    let extent_ok = (gc.x_min - gf.x_min).abs() < 1e-12
        && (gc.x_max - gf.x_max).abs() < 1e-12
        && (gc.y_min - gf.y_min).abs() < 1e-12
        && (gc.y_max - gf.y_max).abs() < 1e-12;
    if !extent_ok || gf.nx != 2 * gc.nx || gf.ny != 2 * gc.ny {
        return Err(Error::Precondition(
            "l1_distance_nested_2d requires the fine grid to be the exact 2-refinement".into(),
        ));
    }
    let cell = gf.dx() * gf.dy();
    let mut acc = 0.0;
    for j in 0..gf.ny {
        let jc = j / 2;
        for i in 0..gf.nx {
            acc += (fine.at(i, j) - coarse.at(i / 2, jc)).abs();
        }
    }
    Ok(cell * acc)
}

/// Runs `levels + 1` simulations at Δx, Δx/2, …, re-projecting the initial
/// datum per level, and tabulates nested L¹ distances and rates. λ is held
/// fixed, so Δt halves with Δx.
pub fn convergence_study_1d(base: &RunConfig1d, levels: usize) -> Result<ConvergenceTable> {
    if levels < 1 {
        return Err(Error::Precondition("convergence study needs levels >= 1".into()));
    }
    let mut finals: Vec<Field> = Vec::with_capacity(levels + 1);
    let mut dxs = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let mut cfg = base.clone();
        cfg.grid.n_cells = base.grid.n_cells << level;
        cfg.snapshot_times = vec![];
        cfg.diagnostics = crate::diagnostics::DiagLevel::Off;
        dxs.push(cfg.grid.dx());
        finals.push(run_1d(&cfg)?.final_field);
    }
    let dists: Vec<f64> = (0..levels)
        .map(|j| l1_distance_nested(&finals[j], &finals[j + 1]))
        .collect::<Result<_>>()?;
    Ok(ConvergenceTable::from_distances(&dxs, &dists))
}

pub fn convergence_study_2d(base: &RunConfig2d, levels: usize) -> Result<ConvergenceTable> {
    if levels < 1 {
        return Err(Error::Precondition("convergence study needs levels >= 1".into()));
    }
    let mut finals: Vec<Field2d> = Vec::with_capacity(levels + 1);
    let mut dxs = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let mut cfg = base.clone();
        cfg.grid.nx = base.grid.nx << level;
        cfg.grid.ny = base.grid.ny << level;
        cfg.snapshot_times = vec![];
        cfg.diagnostics = crate::diagnostics::DiagLevel::Off;
        dxs.push(cfg.grid.dx());
        finals.push(run_2d(&cfg)?.final_field);
    }
    let dists: Vec<f64> = (0..levels)
        .map(|j| l1_distance_nested_2d(&finals[j], &finals[j + 1]))
        .collect::<Result<_>>()?;
    Ok(ConvergenceTable::from_distances(&dxs, &dists))
}

fn lwr_local_flux(u: f64) -> f64 {
    u * (1.0 - u)
}
fn one(_: f64) -> f64 {
    1.0
}
fn zero(_: f64) -> f64 {
    0.0
}

/// The local flux u·ν(u) = u(1−u) of the LWR model, as a model usable with
/// the Godunov flux machinery.
pub fn local_lwr_model() -> Model {
    Model::new(
        "local-lwr",
        lwr_local_flux,
        one,
        zero,
        1.0,
        1.0,
        FluxShape::Concave { crest: 0.5 },
    )
    .expect("static model")
}

/// Standard (local) Godunov solve of u_t + g(u)_x = 0 on the same grid and
/// mesh ratio as the nonlocal runs. Domain walls are impermeable, matching
/// the nonlocal solver.
pub fn local_godunov_run(
    model: &Model,
    grid: Grid1d,
    initial: &Initial1d,
    lambda: f64,
    t_end: f64,
) -> Result<Field> {
    if !(t_end > 0.0 && lambda > 0.0) {
        return Err(Error::Config("t_end and lambda must be positive".into()));
    }
    let n_steps = step_count(t_end, lambda * grid.dx());
    let dt = t_end / n_steps as f64;
    let lambda_eff = dt / grid.dx();
    let mut field = initial_field(grid, initial)?;
    let n = grid.n_cells;
    let mut flux = vec![0.0; n + 1];
    for _ in 0..n_steps {
        let u = &field.values;
        match grid.boundary {
            Boundary::ZeroExtension => {
                flux[0] = 0.0;
                flux[n] = 0.0;
                for k in 1..n {
                    flux[k] = godunov_local(model, u[k - 1], u[k]);
                }
            }
            Boundary::Periodic => {
                for k in 0..n {
                    flux[k] = godunov_local(model, u[(k + n - 1) % n], u[k]);
                }
                flux[n] = flux[0];
            }
        }
        let values: Vec<f64> = (0..n)
            .map(|i| u[i] - lambda_eff * (flux[i + 1] - flux[i]))
            .collect();
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: field.step_index + 1,
                cell,
            });
        }
        field = Field {
            grid,
            values,
            time: field.time + dt,
            step_index: field.step_index + 1,
        };
    }
    Ok(field)
}

/// Local LWR reference used against the nonlocal solutions.
pub fn local_reference_1d(
    grid: Grid1d,
    initial: &Initial1d,
    lambda: f64,
    t_end: f64,
) -> Result<Field> {
    local_godunov_run(&local_lwr_model(), grid, initial, lambda, t_end)
}

#[derive(Clone, Copy, Debug)]
pub struct EtaRow {
    pub eta: f64,
    pub l1_distance_to_local: f64,
}

/// Runs the nonlocal solver for each kernel radius η and measures the L¹
/// distance of the final state to the local Godunov reference on the same
/// grid. Each η must be resolvable: η ≥ 2·Δx.
pub fn eta_sweep(base: &RunConfig1d, etas: &[f64]) -> Result<Vec<EtaRow>> {
    let dx = base.grid.dx();
    for eta in etas {
        if *eta < 2.0 * dx {
            return Err(Error::Config(format!(
                "eta = {eta} is not resolvable on dx = {dx} (need eta >= 2*dx)"
            )));
        }
    }
    let reference = local_reference_1d(base.grid, &base.initial, base.scheme.lambda, base.t_end)?;
    let mut rows = Vec::with_capacity(etas.len());
    for eta in etas {
        let mut cfg = base.clone();
        cfg.kernel = KernelSpec::lwr(*eta)?;
        cfg.snapshot_times = vec![];
        cfg.diagnostics = crate::diagnostics::DiagLevel::Off;
        let out = run_1d(&cfg)?;
        rows.push(EtaRow {
            eta: *eta,
            l1_distance_to_local: l1_diff(&out.final_field, &reference)?,
        });
    }
    Ok(rows)
}
