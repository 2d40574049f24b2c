//! 2D solver: dimensional splitting. Each step sweeps x with fluxes built
//! from c^x, then y on the intermediate state with c^y; both convolutions
//! are taken from the state at the start of the step (a config switch
//! recomputes c^y from the intermediate state instead).

use crate::conv::{ConvMode, Convolver2d};
use crate::diagnostics::{
    self, default_k_set, residual_max_line, DiagLevel, DiagnosticsReport, EntropyLoc, StepRecord,
};
use crate::error::{Error, Result};
use crate::flux::{max_mesh_ratio, numerical_flux, CflMode, Dim, FluxFamily, InterfaceRule, SchemeConfig2d};
use crate::grid::{Boundary, Field2d, Grid2d};
use crate::kernel::{sample_kernel_2d, Axis, KernelSpec};
use crate::model::Model;
use crate::solver1d::{snapshot_steps, step_count};
use rayon::prelude::*;

/// Per-axis model triples; the crowd model uses the same triple on both axes.
#[derive(Clone, Copy, Debug)]
pub struct Model2d {
    pub x: Model,
    pub y: Model,
}

impl Model2d {
    pub fn isotropic(m: Model) -> Self {
        Model2d { x: m, y: m }
    }
}

#[derive(Clone, Debug)]
pub enum Initial2d {
    /// χ on the annulus 4 ≤ x²+y² ≤ 9.
    Annular,
    /// χ on the disk x²+y² ≤ 4.
    Circular,
    Samples(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct RunConfig2d {
    pub grid: Grid2d,
    pub model: Model2d,
    pub kernel_x: KernelSpec,
    pub kernel_y: KernelSpec,
    pub scheme: SchemeConfig2d,
    pub conv_mode: ConvMode,
    pub t_end: f64,
    pub initial: Initial2d,
    pub snapshot_times: Vec<f64>,
    pub diagnostics: DiagLevel,
    /// Recompute c^y from the post-x-sweep state (sensitivity studies).
    pub reconvolve_y: bool,
}

/// Area of {u ≥ 0, v ≥ 0, u ≤ x, v ≤ y, u²+v² ≤ r²} for x, y ≥ 0.
fn quarter_disk_rect_area(x: f64, y: f64, r: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    let x = x.min(r);
    let y = y.min(r);
    if x * x + y * y <= r * r {
        return x * y;
    }
    let xs = (r * r - y * y).max(0.0).sqrt();
    let anti = |u: f64| 0.5 * (u * (r * r - u * u).max(0.0).sqrt() + r * r * (u / r).asin());
    xs * y + anti(x) - anti(xs)
}

fn signed_corner(x: f64, y: f64, r: f64) -> f64 {
    let s = if (x < 0.0) ^ (y < 0.0) { -1.0 } else { 1.0 };
    s * quarter_disk_rect_area(x.abs(), y.abs(), r)
}

/// Exact area of the intersection of the disk u²+v² ≤ r² with the rectangle
/// [x1, x2] × [y1, y2].
pub fn disk_cell_overlap(r: f64, x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    (signed_corner(x2, y2, r) - signed_corner(x1, y2, r) - signed_corner(x2, y1, r)
        + signed_corner(x1, y1, r))
    .max(0.0)
}

/// Cell averages of `u0` by a 16×16 tensor Gauss-Legendre rule per cell.
pub fn project_initial_data_2d(grid: Grid2d, u0: impl Fn(f64, f64) -> f64 + Sync) -> Field2d {
    const GL_X: [f64; 8] = [
        0.0950125098376374,
        0.2816035507792589,
        0.4580167776572274,
        0.6178762444026438,
        0.7554044083550030,
        0.8656312023878318,
        0.9445750230732326,
        0.9894009349916499,
    ];
    const GL_W: [f64; 8] = [
        0.1894506104550685,
        0.1826034150449236,
        0.1691565193950025,
        0.1495959888165767,
        0.1246289712555339,
        0.0951585116824928,
        0.0622535239386479,
        0.0271524594117541,
    ];
    let (hx, hy) = (0.5 * grid.dx(), 0.5 * grid.dy());
    let mut values = vec![0.0; grid.nx * grid.ny];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                let (xc, yc) = grid.cell_center(i, j);
                let mut acc = 0.0;
                for (sx, wx) in GL_X.iter().zip(&GL_W) {
                    for (sy, wy) in GL_X.iter().zip(&GL_W) {
                        let w = wx * wy;
                        acc += w
                            * (u0(xc - hx * sx, yc - hy * sy)
                                + u0(xc - hx * sx, yc + hy * sy)
                                + u0(xc + hx * sx, yc - hy * sy)
                                + u0(xc + hx * sx, yc + hy * sy));
                    }
                }
                *v = 0.25 * acc;
            }
        });
    Field2d {
        grid,
        values,
        time: 0.0,
        step_index: 0,
    }
}

pub fn initial_field_2d(grid: Grid2d, initial: &Initial2d) -> Result<Field2d> {
    let cell_area = grid.dx() * grid.dy();
    let overlap_field = |r_outer: f64, r_inner: Option<f64>| -> Field2d {
        let mut values = vec![0.0; grid.nx * grid.ny];
        values
            .par_chunks_mut(grid.nx)
            .enumerate()
            .for_each(|(j, row)| {
                let y1 = grid.y_min + j as f64 * grid.dy();
                let y2 = y1 + grid.dy();
                for (i, v) in row.iter_mut().enumerate() {
                    let x1 = grid.x_min + i as f64 * grid.dx();
                    let x2 = x1 + grid.dx();
                    let mut a = disk_cell_overlap(r_outer, x1, x2, y1, y2);
                    if let Some(ri) = r_inner {
                        a -= disk_cell_overlap(ri, x1, x2, y1, y2);
                    }
                    *v = (a / cell_area).clamp(0.0, 1.0);
                }
            });
        Field2d {
            grid,
            values,
            time: 0.0,
            step_index: 0,
        }
    };
    match initial {
        Initial2d::Annular => Ok(overlap_field(3.0, Some(2.0))),
        Initial2d::Circular => Ok(overlap_field(2.0, None)),
        Initial2d::Samples(vals) => Field2d::new(grid, vals.clone()),
    }
}

pub(crate) struct Stepper2d {
    model: Model2d,
    family: FluxFamily,
    recon: InterfaceRule,
    lambda_x: f64,
    lambda_y: f64,
    dt: f64,
    boundary: Boundary,
    nx: usize,
    ny: usize,
    conv_x: Convolver2d,
    conv_y: Convolver2d,
    reconvolve_y: bool,
    under_resolved: bool,
}

pub(crate) struct StepEntropy {
    pub max: f64,
    pub cell: usize,
    pub k: f64,
}

impl Stepper2d {
    pub fn new(cfg: &RunConfig2d, dt: f64) -> Result<Self> {
        let grid = cfg.grid;
        let kx = sample_kernel_2d(&cfg.kernel_x, grid.dx(), grid.dy(), Axis::X)?;
        let ky = sample_kernel_2d(&cfg.kernel_y, grid.dx(), grid.dy(), Axis::Y)?;
        let under_resolved = kx.under_resolved() || ky.under_resolved();
        Ok(Stepper2d {
            model: cfg.model,
            family: cfg.scheme.family,
            recon: cfg.scheme.recon,
            lambda_x: dt / grid.dx(),
            lambda_y: dt / grid.dy(),
            dt,
            boundary: grid.boundary,
            nx: grid.nx,
            ny: grid.ny,
            conv_x: Convolver2d::new(grid.nx, grid.ny, grid.boundary, kx, Axis::X, cfg.conv_mode),
            conv_y: Convolver2d::new(grid.nx, grid.ny, grid.boundary, ky, Axis::Y, cfg.conv_mode),
            reconvolve_y: cfg.reconvolve_y,
            under_resolved,
        })
    }

    pub fn under_resolved(&self) -> bool {
        self.under_resolved
    }

    /// One split step; optionally also the max entropy residual over both
    /// sweeps and all k in `k_set`.
    pub fn step(
        &mut self,
        field: &Field2d,
        k_set: Option<&[f64]>,
    ) -> Result<(Field2d, Option<StepEntropy>)> {
        let (nx, ny) = (self.nx, self.ny);
        let periodic = self.boundary == Boundary::Periodic;
        let mx = self.model.x;
        let my = self.model.y;
        let (family, lx, ly) = (self.family, self.lambda_x, self.lambda_y);
        let u = &field.values;

        // x sweep
        let cx = self.conv_x.interfaces(u, &mx, self.recon);
        let nu_x: Vec<f64> = cx.iter().map(|c| mx.nu(*c)).collect();
        let mut half = vec![0.0; nx * ny];
        half.par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
            let row = &u[j * nx..(j + 1) * nx];
            let nu_row = &nu_x[j * (nx + 1)..(j + 1) * (nx + 1)];
            let mut fl = vec![0.0; nx + 1];
            for k in 0..=nx {
                fl[k] = if periodic {
                    if k == nx {
                        fl[0]
                    } else {
                        numerical_flux(
                            &mx,
                            family,
                            lx,
                            nu_row[k],
                            row[(k + nx - 1) % nx],
                            row[k],
                        )
                    }
                } else if k == 0 || k == nx {
                    0.0
                } else {
                    numerical_flux(&mx, family, lx, nu_row[k], row[k - 1], row[k])
                };
            }
            for i in 0..nx {
                out[i] = row[i] - lx * (fl[i + 1] - fl[i]);
            }
        });

        // x-sweep entropy, per row
        let mut entropy: Option<StepEntropy> = None;
        if let Some(ks) = k_set {
            let mut best = StepEntropy {
                max: f64::NEG_INFINITY,
                cell: 0,
                k: 0.0,
            };
            for j in 0..ny {
                let (r, cell, k) = residual_max_line(
                    &u[j * nx..(j + 1) * nx],
                    &half[j * nx..(j + 1) * nx],
                    &nu_x[j * (nx + 1)..(j + 1) * (nx + 1)],
                    family,
                    lx,
                    &mx,
                    ks,
                    periodic,
                );
                if r > best.max {
                    best = StepEntropy {
                        max: r,
                        cell: j * nx + cell,
                        k,
                    };
                }
            }
            entropy = Some(best);
        }

        // y sweep; c^y from the start-of-step state unless reconvolve_y
        let cy_source = if self.reconvolve_y { &half } else { u };
        let cy = self.conv_y.interfaces(cy_source, &my, self.recon);
        let nu_y: Vec<f64> = cy.iter().map(|c| my.nu(*c)).collect();
        let mut flux_y = vec![0.0; nx * (ny + 1)];
        flux_y
            .par_chunks_mut(nx)
            .enumerate()
            .for_each(|(k, frow)| {
                for i in 0..nx {
                    frow[i] = if periodic {
                        let jl = (k + ny - 1) % ny;
                        let jr = k % ny;
                        numerical_flux(
                            &my,
                            family,
                            ly,
                            nu_y[k * nx + i],
                            half[jl * nx + i],
                            half[jr * nx + i],
                        )
                    } else if k == 0 || k == ny {
                        0.0
                    } else {
                        numerical_flux(
                            &my,
                            family,
                            ly,
                            nu_y[k * nx + i],
                            half[(k - 1) * nx + i],
                            half[k * nx + i],
                        )
                    };
                }
            });
        let mut values = vec![0.0; nx * ny];
        values.par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
            for i in 0..nx {
                out[i] =
                    half[j * nx + i] - ly * (flux_y[(j + 1) * nx + i] - flux_y[j * nx + i]);
            }
        });

        // y-sweep entropy, per column
        if let (Some(ks), Some(best)) = (k_set, entropy.as_mut()) {
            let mut prev_col = vec![0.0; ny];
            let mut next_col = vec![0.0; ny];
            let mut nu_col = vec![0.0; ny + 1];
            for i in 0..nx {
                for j in 0..ny {
                    prev_col[j] = half[j * nx + i];
                    next_col[j] = values[j * nx + i];
                }
                for k in 0..=ny {
                    nu_col[k] = nu_y[k * nx + i];
                }
                let (r, cell, k) = residual_max_line(
                    &prev_col, &next_col, &nu_col, family, ly, &my, ks, periodic,
                );
                if r > best.max {
                    *best = StepEntropy {
                        max: r,
                        cell: cell * nx + i,
                        k,
                    };
                }
            }
        }

        let step = field.step_index + 1;
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step, cell });
        }
        Ok((
            Field2d {
                grid: field.grid,
                values,
                time: field.time + self.dt,
                step_index: step,
            },
            entropy,
        ))
    }
}

/// One split step with Δt = λ_x·Δx taken from the configuration.
pub fn split_step_2d(state: &Field2d, cfg: &RunConfig2d) -> Result<Field2d> {
    cfg.scheme.validate()?;
    let dt = cfg.scheme.lambda_x * state.grid.dx();
    let mut stepper = Stepper2d::new(cfg, dt)?;
    stepper.step(state, None).map(|(f, _)| f)
}

pub struct Run2d {
    pub final_field: Field2d,
    pub snapshots: Vec<Field2d>,
    pub report: DiagnosticsReport,
}

pub fn run_2d(cfg: &RunConfig2d) -> Result<Run2d> {
    cfg.scheme.validate()?;
    if !(cfg.t_end > 0.0) {
        return Err(Error::Config(format!("t_end must be > 0, got {}", cfg.t_end)));
    }
    let grid = cfg.grid;
    let (dx, dy) = (grid.dx(), grid.dy());
    let dt_x = cfg.scheme.lambda_x * dx;
    let dt_y = cfg.scheme.lambda_y * dy;
    if (dt_x - dt_y).abs() > 1e-12 * dt_x.max(dt_y) {
        return Err(Error::Config(format!(
            "lambda_x*dx = {dt_x} and lambda_y*dy = {dt_y} must agree (single time step)"
        )));
    }
    let bound_x = max_mesh_ratio(cfg.scheme.family, &cfg.model.x, Dim::Two);
    let bound_y = max_mesh_ratio(cfg.scheme.family, &cfg.model.y, Dim::Two);
    let mut warnings = Vec::new();
    for (axis, lam, bound) in [("x", cfg.scheme.lambda_x, bound_x), ("y", cfg.scheme.lambda_y, bound_y)] {
        if lam > bound + 1e-12 {
            let msg = format!("configured lambda_{axis} {lam} exceeds the CFL bound {bound:.6}");
            match cfg.scheme.cfl {
                CflMode::Strict => return Err(Error::Config(msg)),
                CflMode::Warn => warnings.push(msg),
            }
        }
    }
    let n_steps = step_count(cfg.t_end, dt_x);
    let dt = cfg.t_end / n_steps as f64;
    let mut stepper = Stepper2d::new(cfg, dt)?;
    if stepper.under_resolved() {
        warnings.push(format!(
            "kernel resolved by fewer than 2 samples at dx = {dx}, dy = {dy}"
        ));
    }
    let mut field = initial_field_2d(grid, &cfg.initial)?;
    let mut report =
        DiagnosticsReport::new(cfg.diagnostics, cfg.scheme.lambda_x, dt / dx, bound_x);
    report.warnings = warnings;
    if cfg.diagnostics == DiagLevel::Full {
        let min0 = field.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max0 = diagnostics::linf_norm_2d(&field);
        report.k_set = default_k_set(min0.min(0.0), max0);
    }
    let record = |report: &mut DiagnosticsReport,
                  f: &Field2d,
                  l1_rate: Option<f64>,
                  entropy: Option<&StepEntropy>| {
        if report.level == DiagLevel::Off {
            return;
        }
        let min = f.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = f.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        report.push(
            StepRecord {
                step: f.step_index,
                time: f.time,
                mass: diagnostics::l1_norm_2d(f),
                min,
                max,
                tv: diagnostics::total_variation_2d(f),
                l1_rate,
                entropy_residual: entropy.map(|e| e.max),
            },
            entropy.map(|e| EntropyLoc {
                step: f.step_index,
                cell: e.cell,
                k: e.k,
            }),
        );
    };
    record(&mut report, &field, None, None);
    let snap_steps = snapshot_steps(&cfg.snapshot_times, dt, n_steps);
    let mut snapshots: Vec<Field2d> = Vec::new();
    let collect = |snapshots: &mut Vec<Field2d>, f: &Field2d| {
        for s in &snap_steps {
            if *s == f.step_index {
                snapshots.push(f.clone());
            }
        }
    };
    collect(&mut snapshots, &field);
    let k_set = report.k_set.clone();
    for _ in 0..n_steps {
        let ks = if cfg.diagnostics == DiagLevel::Full {
            Some(k_set.as_slice())
        } else {
            None
        };
        let (next, entropy) = stepper.step(&field, ks)?;
        let l1_rate = if report.level == DiagLevel::Off {
            None
        } else {
            let mut acc = 0.0;
            for (a, b) in field.values.iter().zip(&next.values) {
                acc += (a - b).abs();
            }
            Some(dx * dy * acc / dt)
        };
        record(&mut report, &next, l1_rate, entropy.as_ref());
        collect(&mut snapshots, &next);
        field = next;
    }
    Ok(Run2d {
        final_field: field,
        snapshots,
        report,
    })
}
