//! Runtime measurement of the discrete quantities a monotone scheme must
//! preserve: mass, bounds, total variation, time continuity, and the
//! cell-by-cell discrete entropy inequality
//!
//!   |u⁺_i − k| − |u_i − k| + λ(𝓖_{i+1/2} − 𝓖_{i−1/2})
//!     + λ·sgn(u⁺_i − k)(𝓕_{i+1/2}(k,k) − 𝓕_{i−1/2}(k,k)) ≤ 0,
//!
//! where 𝓕_{i+1/2}(k,k) = ν(c_{i+1/2})·f(k) at interior interfaces, so the
//! sign term is the usual f(k)(ν(c_{i+1/2}) − ν(c_{i−1/2})); writing it per
//! interface keeps the identity exact at impermeable walls, whose flux is
//! identically zero.

use crate::error::{Error, Result};
use crate::flux::{entropy_flux, numerical_flux, FluxFamily};
use crate::grid::{Boundary, Field, Field2d};
use crate::model::Model;
use crate::parallel::pairwise_map_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagLevel {
    Off,
    /// Norms, bounds, TV and time continuity each step.
    Basic,
    /// Basic plus the entropy residual over the k-set each step.
    Full,
}

/// Δx·Σ|u_i| (Δx·Δy·Σ|u_ij| in 2D).
pub fn l1_norm(field: &Field) -> f64 {
    field.grid.dx() * pairwise_map_sum(&field.values, |x| x.abs())
}

pub fn linf_norm(field: &Field) -> f64 {
    field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn l1_norm_2d(field: &Field2d) -> f64 {
    field.grid.dx() * field.grid.dy() * pairwise_map_sum(&field.values, |x| x.abs())
}

pub fn linf_norm_2d(field: &Field2d) -> f64 {
    field.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// L¹ distance of two fields on the same grid.
pub fn l1_diff(a: &Field, b: &Field) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::Precondition(
            "l1_diff requires fields on the same grid".into(),
        ));
    }
    let mut acc = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        acc += (x - y).abs();
    }
    Ok(a.grid.dx() * acc)
}

/// Σ_i |u_{i+1} − u_i| over interior interfaces, plus the wraparound jump on
/// periodic grids.
pub fn total_variation(field: &Field) -> f64 {
    let v = &field.values;
    let mut tv = 0.0;
    for w in v.windows(2) {
        tv += (w[1] - w[0]).abs();
    }
    if field.grid.boundary == Boundary::Periodic && v.len() > 1 {
        tv += (v[0] - v[v.len() - 1]).abs();
    }
    tv
}

/// Sum of axis-wise variations: TV along every row plus TV along every
/// column (with wraparound terms on periodic grids).
pub fn total_variation_2d(field: &Field2d) -> f64 {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let periodic = field.grid.boundary == Boundary::Periodic;
    let mut tv = 0.0;
    for j in 0..ny {
        let row = &field.values[j * nx..(j + 1) * nx];
        for w in row.windows(2) {
            tv += (w[1] - w[0]).abs();
        }
        if periodic && nx > 1 {
            tv += (row[0] - row[nx - 1]).abs();
        }
    }
    for i in 0..nx {
        for j in 0..ny - 1 {
            tv += (field.at(i, j + 1) - field.at(i, j)).abs();
        }
        if periodic && ny > 1 {
            tv += (field.at(i, 0) - field.at(i, ny - 1)).abs();
        }
    }
    tv
}

/// Default k-set: 21 equispaced values spanning [min−0.1, max+0.1], plus
/// exactly 0.
pub fn default_k_set(min: f64, max: f64) -> Vec<f64> {
    let lo = min - 0.1;
    let hi = max + 0.1;
    let mut ks: Vec<f64> = (0..21)
        .map(|i| lo + (hi - lo) * i as f64 / 20.0)
        .collect();
    if !ks.contains(&0.0) {
        ks.push(0.0);
    }
    ks
}

#[inline]
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Max discrete-entropy residual over all cells of one 1D line and all k in
/// `k_set`. `nu` holds ν(c) at the line's n+1 interfaces, exactly as used by
/// the step that produced `next` from `prev`. Returns (max, cell, k).
#[allow(clippy::too_many_arguments)]
pub(crate) fn residual_max_line(
    prev: &[f64],
    next: &[f64],
    nu: &[f64],
    family: FluxFamily,
    lambda: f64,
    m: &Model,
    k_set: &[f64],
    periodic: bool,
) -> (f64, usize, f64) {
    let n = prev.len();
    debug_assert_eq!(nu.len(), n + 1);
    let mut best = f64::NEG_INFINITY;
    let mut best_cell = 0;
    let mut best_k = 0.0;
    let mut g_iface = vec![0.0; n + 1];
    let mut fkk_iface = vec![0.0; n + 1];
    for &k in k_set {
        for kk in 0..=n {
            let (ul, ur) = if periodic {
                (
                    prev[(kk + n - 1) % n],
                    prev[kk % n],
                )
            } else {
                // interfaces 0 and n are impermeable walls: flux ≡ 0
                if kk == 0 || kk == n {
                    g_iface[kk] = 0.0;
                    fkk_iface[kk] = 0.0;
                    continue;
                }
                (prev[kk - 1], prev[kk])
            };
            g_iface[kk] = entropy_flux(m, family, lambda, nu[kk], ul, ur, k);
            fkk_iface[kk] = numerical_flux(m, family, lambda, nu[kk], k, k);
        }
        for i in 0..n {
            let r = (next[i] - k).abs() - (prev[i] - k).abs()
                + lambda * (g_iface[i + 1] - g_iface[i])
                + lambda * sgn(next[i] - k) * (fkk_iface[i + 1] - fkk_iface[i]);
            if r > best {
                best = r;
                best_cell = i;
                best_k = k;
            }
        }
    }
    (best, best_cell, best_k)
}

/// Max entropy residual for a completed 1D step. `c_values` must be the
/// convolution values the step itself used (one per interface).
pub fn entropy_residual(
    prev: &Field,
    next: &Field,
    c_values: &[f64],
    family: FluxFamily,
    lambda: f64,
    m: &Model,
    k_set: &[f64],
) -> Result<(f64, usize, f64)> {
    let n = prev.grid.n_cells;
    if next.grid.n_cells != n || c_values.len() != n + 1 {
        return Err(Error::Precondition(
            "entropy_residual requires matching fields and n+1 c-values".into(),
        ));
    }
    let nu: Vec<f64> = c_values.iter().map(|c| m.nu(*c)).collect();
    Ok(residual_max_line(
        &prev.values,
        &next.values,
        &nu,
        family,
        lambda,
        m,
        k_set,
        prev.grid.boundary == Boundary::Periodic,
    ))
}

/// Cross-check the model's declared bounds by dense sampling on [lo, hi]:
/// |f(a)−f(b)| ≤ f_lip·|a−b| on adjacent samples and |ν| ≤ ‖ν‖_∞. Returns a
/// description of the first violation, if any. Declared bounds are trusted
/// at run time; `check` mode calls this.
pub fn check_model_bounds(m: &Model, lo: f64, hi: f64, samples: usize) -> Option<String> {
    let h = (hi - lo) / samples as f64;
    for i in 0..samples {
        let a = lo + i as f64 * h;
        let b = a + h;
        let df = (m.f(b) - m.f(a)).abs();
        if df > m.f_lip * h * (1.0 + 1e-9) {
            return Some(format!(
                "|f({b:.6}) - f({a:.6})| = {df:.3e} exceeds f_lip * {h:.3e}"
            ));
        }
        if m.nu(a).abs() > m.nu_sup * (1.0 + 1e-12) + 1e-300 {
            return Some(format!(
                "|nu({a:.6})| = {:.6} exceeds declared bound {}",
                m.nu(a).abs(),
                m.nu_sup
            ));
        }
    }
    None
}

/// Empirical Lipschitz-in-time constant: max over adjacent snapshots of
/// ‖u(t₂) − u(t₁)‖_L¹ / (t₂ − t₁).
pub fn time_modulus(trajectory: &[Field]) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::Precondition(
            "time_modulus requires at least two fields".into(),
        ));
    }
    let mut worst = 0.0f64;
    for w in trajectory.windows(2) {
        let dt = w[1].time - w[0].time;
        if dt <= 0.0 {
            return Err(Error::Precondition(
                "time_modulus requires strictly increasing times".into(),
            ));
        }
        worst = worst.max(l1_diff(&w[0], &w[1])? / dt);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug)]
pub struct StepRecord {
    pub step: u64,
    pub time: f64,
    pub mass: f64,
    pub min: f64,
    pub max: f64,
    pub tv: f64,
    /// ‖u^n − u^{n−1}‖_L¹ / Δt; absent on the initial record.
    pub l1_rate: Option<f64>,
    /// Max entropy residual of the step that produced this state.
    pub entropy_residual: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct EntropyLoc {
    pub step: u64,
    pub cell: usize,
    pub k: f64,
}

/// Per-run invariant audit: per-step series plus running extremes.
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub level: DiagLevel,
    pub records: Vec<StepRecord>,
    pub k_set: Vec<f64>,
    pub lambda_configured: f64,
    pub lambda_effective: f64,
    pub lambda_bound: f64,
    pub warnings: Vec<String>,
    pub initial_mass: f64,
    pub initial_max: f64,
    pub initial_min: f64,
    pub tv_initial: f64,
    pub mass_drift_rel_max: f64,
    pub min_overall: f64,
    pub max_overall: f64,
    pub tv_max: f64,
    pub entropy_max: f64,
    pub entropy_argmax: Option<EntropyLoc>,
    pub time_modulus: f64,
}

impl DiagnosticsReport {
    pub fn new(level: DiagLevel, lambda_configured: f64, lambda_effective: f64, lambda_bound: f64) -> Self {
        DiagnosticsReport {
            level,
            records: Vec::new(),
            k_set: Vec::new(),
            lambda_configured,
            lambda_effective,
            lambda_bound,
            warnings: Vec::new(),
            initial_mass: 0.0,
            initial_max: 0.0,
            initial_min: 0.0,
            tv_initial: 0.0,
            mass_drift_rel_max: 0.0,
            min_overall: f64::INFINITY,
            max_overall: f64::NEG_INFINITY,
            tv_max: 0.0,
            entropy_max: f64::NEG_INFINITY,
            entropy_argmax: None,
            time_modulus: 0.0,
        }
    }

    pub fn push(&mut self, rec: StepRecord, entropy_loc: Option<EntropyLoc>) {
        if rec.step == 0 {
            self.initial_mass = rec.mass;
            self.initial_max = rec.max;
            self.initial_min = rec.min;
            self.tv_initial = rec.tv;
        } else if let Some(prev) = self.records.last() {
            let denom = if self.initial_mass > 0.0 {
                self.initial_mass
            } else {
                1.0
            };
            let drift = (rec.mass - prev.mass).abs() / denom;
            self.mass_drift_rel_max = self.mass_drift_rel_max.max(drift);
        }
        self.min_overall = self.min_overall.min(rec.min);
        self.max_overall = self.max_overall.max(rec.max);
        self.tv_max = self.tv_max.max(rec.tv);
        if let Some(rate) = rec.l1_rate {
            self.time_modulus = self.time_modulus.max(rate);
        }
        if let Some(r) = rec.entropy_residual {
            if r > self.entropy_max {
                self.entropy_max = r;
                self.entropy_argmax = entropy_loc;
            }
        }
        self.records.push(rec);
    }

    pub fn cfl_satisfied(&self) -> bool {
        self.lambda_configured <= self.lambda_bound + 1e-12
    }

    /// Hard invariant checks at the audit thresholds.
    pub fn verdicts(&self) -> Verdicts {
        let mass_ok = self.mass_drift_rel_max <= MASS_DRIFT_REL_MAX;
        let positivity_applicable = self.initial_min >= 0.0;
        let positivity_ok = !positivity_applicable || self.min_overall >= MIN_FLOOR;
        let ceil = self.initial_max.max(1.0) + MAX_EXCESS;
        let max_ok = self.max_overall <= ceil;
        let entropy_ok = self.level != DiagLevel::Full || self.entropy_max <= ENTROPY_RESIDUAL_MAX;
        Verdicts {
            mass_ok,
            positivity_ok,
            max_ok,
            entropy_ok,
            entropy_checked: self.level == DiagLevel::Full,
        }
    }
}

pub const MASS_DRIFT_REL_MAX: f64 = 1e-12;
pub const MIN_FLOOR: f64 = -1e-14;
pub const MAX_EXCESS: f64 = 1e-12;
pub const ENTROPY_RESIDUAL_MAX: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct Verdicts {
    pub mass_ok: bool,
    pub positivity_ok: bool,
    pub max_ok: bool,
    pub entropy_ok: bool,
    pub entropy_checked: bool,
}

impl Verdicts {
    pub fn all_ok(&self) -> bool {
        self.mass_ok && self.positivity_ok && self.max_ok && self.entropy_ok
    }
}
