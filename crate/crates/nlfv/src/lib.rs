//! Finite-volume solvers for nonlocal scalar conservation laws
//!
//!   ∂ₜu + ∂ₓ( f(u) · ν(μ∗β(u)) ) = 0
//!
//! in one and two space dimensions, with monotone Lax–Friedrichs and Godunov
//! type fluxes, FFT-accelerated convolution of the nonlocal term, runtime
//! invariant audits (mass, bounds, total variation, discrete entropy
//! inequality), and a mesh-refinement harness for convergence-rate studies.
//!
//! Built-in models: `nonlocal-lwr-1d` (traffic flow, f(u) = u, ν(r) = 1−r,
//! β = id) and `crowd-2d` (pedestrian flow, f(u) = u(1−u), speed factor
//! 1 − u∗μ, solved by dimensional splitting).
//!
//! ## Where to start
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example lwr_profiles      # 1D density profiles vs the local reference
//! cargo run --release --example rate_study_1d     # 1D mesh-refinement rates
//! cargo run --release --example rate_study_2d     # 2D crowd-model rates
//! cargo run --release --example eta_limit         # kernel radius -> 0 limit
//! cargo run --release --example crowd_room        # 2D run with PGM heatmaps
//! cargo run --release --example invariant_audit   # per-step invariant report
//! cargo run --release --example riemann_local     # local Godunov sanity runs
//! cargo run --release --example custom_model      # supplying your own model
//! ```
//!
//! The `nlfv` binary drives the same machinery from INI-style config files
//! (`run1d`, `run2d`, `converge`, `eta-sweep`, `check`).

pub mod config;
pub mod conv;
pub mod diagnostics;
pub mod error;
mod fft;
pub mod flux;
pub mod grid;
pub mod harness;
pub mod kernel;
pub mod model;
pub mod output;
pub mod parallel;
pub mod solver1d;
pub mod solver2d;

pub use conv::{convolve_1d, convolve_2d, ConvMode, Convolver1d, Convolver2d};
pub use diagnostics::{
    default_k_set, entropy_residual, l1_diff, l1_norm, l1_norm_2d, linf_norm, linf_norm_2d,
    time_modulus, total_variation, total_variation_2d, DiagLevel, DiagnosticsReport,
};
pub use error::{Error, Result};
pub use flux::{
    entropy_flux, godunov_local, lax_friedrichs, max_mesh_ratio, numerical_flux, CflMode, Dim,
    FluxFamily, InterfaceRule, SchemeConfig, SchemeConfig2d,
};
pub use grid::{Boundary, Field, Field2d, Grid1d, Grid2d};
pub use harness::{
    convergence_study_1d, convergence_study_2d, eta_sweep, l1_distance_nested,
    l1_distance_nested_2d, local_lwr_model, local_reference_1d, ConvergenceTable, EtaRow, RateRow,
};
pub use kernel::{sample_kernel_1d, sample_kernel_2d, Axis, Kernel1d, Kernel2d, KernelSpec};
pub use model::{FluxShape, Func, Model};
pub use solver1d::{
    initial_field, project_indicators, project_initial_data, run_1d, step_1d, Initial1d, Run1d,
    RunConfig1d,
};
pub use solver2d::{
    disk_cell_overlap, initial_field_2d, project_initial_data_2d, run_2d, split_step_2d,
    Initial2d, Model2d, Run2d, RunConfig2d,
};
