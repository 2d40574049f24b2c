//! 1D solver: initial-data projection, the conservative marching step
//!
//!   u⁺_i = u_i − λ[𝓕(ν(c_{i+1/2}), u_i, u_{i+1}) − 𝓕(ν(c_{i−1/2}), u_{i−1}, u_i)],
//!
//! and the time loop with snapshotting and invariant diagnostics.

use crate::conv::{ConvMode, Convolver1d};
use crate::diagnostics::{
    self, default_k_set, l1_norm, residual_max_line, total_variation, DiagLevel,
    DiagnosticsReport, EntropyLoc, StepRecord,
};
use crate::error::{Error, Result};
use crate::flux::{max_mesh_ratio, numerical_flux, CflMode, Dim, FluxFamily, InterfaceRule, SchemeConfig};
use crate::grid::{Boundary, Field, Grid1d};
use crate::kernel::{sample_kernel_1d, Kernel1d, KernelSpec};
use crate::model::Model;
use rayon::prelude::*;

const PAR_MIN_CELLS: usize = 1 << 14;

/// Built-in initial data, or raw cell averages.
#[derive(Clone, Debug)]
pub enum Initial1d {
    /// 0.25·1_(−0.9,0.3) + 0.5·1_(0.1,0.3)
    RiemannEx1,
    Riemann { left: f64, right: f64, x0: f64 },
    Samples(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct RunConfig1d {
    pub grid: Grid1d,
    pub model: Model,
    pub kernel: KernelSpec,
    pub scheme: SchemeConfig,
    pub conv_mode: ConvMode,
    pub t_end: f64,
    pub initial: Initial1d,
    pub snapshot_times: Vec<f64>,
    pub diagnostics: DiagLevel,
}

// 16-point Gauss-Legendre rule on [-1, 1] (positive nodes; mirror for the rest).
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Cell averages of `u0` by 16-point Gauss-Legendre quadrature per cell.
pub fn project_initial_data(grid: Grid1d, u0: impl Fn(f64) -> f64) -> Field {
    let dx = grid.dx();
    let values = (0..grid.n_cells)
        .map(|i| {
            let xc = grid.cell_center(i);
            let h = 0.5 * dx;
            let mut acc = 0.0;
            for (x, w) in GL16_X.iter().zip(&GL16_W) {
                acc += w * (u0(xc - h * x) + u0(xc + h * x));
            }
            0.5 * acc
        })
        .collect();
    Field {
        grid,
        values,
        time: 0.0,
        step_index: 0,
    }
}

/// Exact cell averages of a sum of interval indicators height·1_(a,b).
/// Cells fully inside an interval contribute exactly `height` (no rounding
/// from the interface arithmetic).
pub fn project_indicators(grid: Grid1d, parts: &[(f64, f64, f64)]) -> Field {
    let dx = grid.dx();
    let values = (0..grid.n_cells)
        .map(|i| {
            let lo = grid.interface(i);
            let hi = grid.interface(i + 1);
            let mut acc = 0.0;
            for (a, b, height) in parts {
                if *a <= lo && hi <= *b {
                    acc += height;
                } else {
                    let overlap = (hi.min(*b) - lo.max(*a)).max(0.0);
                    acc += height * overlap / dx;
                }
            }
            acc
        })
        .collect();
    Field {
        grid,
        values,
        time: 0.0,
        step_index: 0,
    }
}

pub fn initial_field(grid: Grid1d, initial: &Initial1d) -> Result<Field> {
    match initial {
        Initial1d::RiemannEx1 => Ok(project_indicators(
            grid,
            &[(-0.9, 0.3, 0.25), (0.1, 0.3, 0.5)],
        )),
        Initial1d::Riemann { left, right, x0 } => Ok(project_indicators(
            grid,
            &[
                (grid.x_min - 1.0, *x0, *left),
                (*x0, grid.x_max + 1.0, *right),
            ],
        )),
        Initial1d::Samples(vals) => Field::new(grid, vals.clone()),
    }
}

/// One-step driver reused by the time loop; owns the convolution context.
pub(crate) struct Stepper1d {
    pub model: Model,
    pub family: FluxFamily,
    pub recon: InterfaceRule,
    /// Effective mesh ratio Δt/Δx used in both the fluxes and the update.
    pub lambda: f64,
    pub dt: f64,
    boundary: Boundary,
    conv: Convolver1d,
}

impl Stepper1d {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid1d,
        model: Model,
        family: FluxFamily,
        recon: InterfaceRule,
        lambda: f64,
        dt: f64,
        kernel: Kernel1d,
        mode: ConvMode,
    ) -> Self {
        Stepper1d {
            model,
            family,
            recon,
            lambda,
            dt,
            boundary: grid.boundary,
            conv: Convolver1d::new(grid.n_cells, grid.boundary, kernel, mode),
        }
    }

    /// Advance one step; returns the new field and the c-values used.
    pub fn step(&mut self, field: &Field) -> Result<(Field, Vec<f64>)> {
        let n = field.values.len();
        let c = self.conv.interfaces(&field.values, &self.model, self.recon);
        let u = &field.values;
        let m = &self.model;
        let (family, lambda) = (self.family, self.lambda);
        let mut flux = vec![0.0; n + 1];
        match self.boundary {
            Boundary::ZeroExtension => {
                // walls: no mass crosses the domain boundary
                let inner = &mut flux[1..n];
                let work = |k1: usize, f: &mut f64| {
                    let k = k1 + 1;
                    *f = numerical_flux(m, family, lambda, m.nu(c[k]), u[k - 1], u[k]);
                };
                if n >= PAR_MIN_CELLS {
                    inner
                        .par_iter_mut()
                        .enumerate()
                        .for_each(|(k1, f)| work(k1, f));
                } else {
                    for (k1, f) in inner.iter_mut().enumerate() {
                        work(k1, f);
                    }
                }
            }
            Boundary::Periodic => {
                for k in 0..n {
                    let ul = u[(k + n - 1) % n];
                    flux[k] = numerical_flux(m, family, lambda, m.nu(c[k]), ul, u[k]);
                }
                flux[n] = flux[0];
            }
        }
        let mut values = vec![0.0; n];
        let update = |i: usize, v: &mut f64| {
            *v = u[i] - lambda * (flux[i + 1] - flux[i]);
        };
        if n >= PAR_MIN_CELLS {
            values
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, v)| update(i, v));
        } else {
            for (i, v) in values.iter_mut().enumerate() {
                update(i, v);
            }
        }
        let step = field.step_index + 1;
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step, cell });
        }
        Ok((
            Field {
                grid: field.grid,
                values,
                time: field.time + self.dt,
                step_index: step,
            },
            c,
        ))
    }
}

/// One marching step with Δt = λ·Δx taken from the configuration.
pub fn step_1d(state: &Field, cfg: &RunConfig1d, kernel: &Kernel1d) -> Result<Field> {
    cfg.scheme.validate()?;
    let lambda = cfg.scheme.lambda;
    let dt = lambda * state.grid.dx();
    let mut stepper = Stepper1d::new(
        state.grid,
        cfg.model,
        cfg.scheme.family,
        cfg.scheme.recon,
        lambda,
        dt,
        kernel.clone(),
        cfg.conv_mode,
    );
    stepper.step(state).map(|(f, _)| f)
}

pub struct Run1d {
    pub final_field: Field,
    pub snapshots: Vec<Field>,
    pub report: DiagnosticsReport,
}

/// Number of steps so that N·Δt = t_end exactly, with Δt ≤ λ·Δx.
pub(crate) fn step_count(t_end: f64, dt_max: f64) -> u64 {
    let ratio = t_end / dt_max;
    let snapped = ratio.round();
    if (ratio - snapped).abs() < 1e-9 && snapped >= 1.0 {
        snapped as u64
    } else {
        ratio.ceil().max(1.0) as u64
    }
}

pub(crate) fn snapshot_steps(times: &[f64], dt: f64, n_steps: u64) -> Vec<u64> {
    times
        .iter()
        .map(|t| ((t / dt).round().max(0.0) as u64).min(n_steps))
        .collect()
}

pub fn run_1d(cfg: &RunConfig1d) -> Result<Run1d> {
    cfg.scheme.validate()?;
    if !(cfg.t_end > 0.0) {
        return Err(Error::Config(format!("t_end must be > 0, got {}", cfg.t_end)));
    }
    let grid = cfg.grid;
    let dx = grid.dx();
    let kernel = sample_kernel_1d(&cfg.kernel, dx)?;
    let bound = max_mesh_ratio(cfg.scheme.family, &cfg.model, Dim::One);
    let lambda_cfg = cfg.scheme.lambda;
    let mut warnings = Vec::new();
    if lambda_cfg > bound + 1e-12 {
        let msg = format!(
            "configured lambda {lambda_cfg} exceeds the CFL bound {bound:.6}"
        );
        match cfg.scheme.cfl {
            CflMode::Strict => return Err(Error::Config(msg)),
            CflMode::Warn => warnings.push(msg),
        }
    }
    if kernel.under_resolved() {
        warnings.push(format!(
            "kernel resolved by fewer than 2 samples at dx = {dx}"
        ));
    }
    let n_steps = step_count(cfg.t_end, lambda_cfg * dx);
    let dt = cfg.t_end / n_steps as f64;
    let lambda_eff = dt / dx;
    let mut stepper = Stepper1d::new(
        grid,
        cfg.model,
        cfg.scheme.family,
        cfg.scheme.recon,
        lambda_eff,
        dt,
        kernel,
        cfg.conv_mode,
    );
    let mut field = initial_field(grid, &cfg.initial)?;
    let mut report = DiagnosticsReport::new(cfg.diagnostics, lambda_cfg, lambda_eff, bound);
    report.warnings = warnings;
    if cfg.diagnostics == DiagLevel::Full {
        let min0 = field.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max0 = diagnostics::linf_norm(&field);
        report.k_set = default_k_set(min0.min(0.0), max0);
    }
    let record = |report: &mut DiagnosticsReport,
                  f: &Field,
                  l1_rate: Option<f64>,
                  entropy: Option<(f64, usize, f64)>| {
        if report.level == DiagLevel::Off {
            return;
        }
        let min = f.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = f.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let loc = entropy.map(|(_, cell, k)| EntropyLoc {
            step: f.step_index,
            cell,
            k,
        });
        report.push(
            StepRecord {
                step: f.step_index,
                time: f.time,
                mass: l1_norm(f),
                min,
                max,
                tv: total_variation(f),
                l1_rate,
                entropy_residual: entropy.map(|(r, _, _)| r),
            },
            loc,
        );
    };
    record(&mut report, &field, None, None);
    let snap_steps = snapshot_steps(&cfg.snapshot_times, dt, n_steps);
    let mut snapshots: Vec<Field> = Vec::with_capacity(snap_steps.len());
    let collect = |snapshots: &mut Vec<Field>, f: &Field| {
        for s in &snap_steps {
            if *s == f.step_index {
                snapshots.push(f.clone());
            }
        }
    };
    collect(&mut snapshots, &field);
    for _ in 0..n_steps {
        let (next, c) = stepper.step(&field)?;
        let entropy = if cfg.diagnostics == DiagLevel::Full {
            let nu: Vec<f64> = c.iter().map(|ci| cfg.model.nu(*ci)).collect();
            Some(residual_max_line(
                &field.values,
                &next.values,
                &nu,
                cfg.scheme.family,
                lambda_eff,
                &cfg.model,
                &report.k_set,
                grid.boundary == Boundary::Periodic,
            ))
        } else {
            None
        };
        let l1_rate = if report.level == DiagLevel::Off {
            None
        } else {
            Some(diagnostics::l1_diff(&field, &next)? / dt)
        };
        record(&mut report, &next, l1_rate, entropy);
        collect(&mut snapshots, &next);
        field = next;
    }
    Ok(Run1d {
        final_field: field,
        snapshots,
        report,
    })
}
