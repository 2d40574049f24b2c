//! Supplying a custom model triple (f, ν, β). The functions are plain `fn`
//! items; the Lipschitz/sup bounds must hold on the value range the run
//! reaches, and the flux shape drives the Godunov solver (use
//! `FluxShape::General` to fall back to a numerical search).
//!
//!     cargo run --release --example custom_model

use nlfv::*;

// cubic flux: slower near both the empty and the jammed state
fn f(u: f64) -> f64 {
    u * u * (1.0 - u)
}
// speed factor drops with the convolved density, floor at 0.2
fn nu(r: f64) -> f64 {
    (1.0 - 0.8 * r).max(0.2)
}
fn beta(u: f64) -> f64 {
    u
}

fn main() -> Result<()> {
    // |f'| = |2u - 3u^2| <= 1 on [0, 1]; |nu| <= 1 for convolved values in [0, 1]
    let model = Model::new("cubic-traffic", f, nu, beta, 1.0, 1.0, FluxShape::General)?;
    let grid = Grid1d::new(-1.5, 1.5, 960, Boundary::ZeroExtension)?;
    let cfg = RunConfig1d {
        grid,
        model,
        kernel: KernelSpec::lwr(0.0625)?,
        scheme: SchemeConfig {
            family: FluxFamily::Godunov,
            lambda: 0.12,
            recon: InterfaceRule::Mean,
            cfl: CflMode::Strict,
        },
        conv_mode: ConvMode::Auto,
        t_end: 0.4,
        initial: Initial1d::RiemannEx1,
        snapshot_times: vec![],
        diagnostics: DiagLevel::Full,
    };
    println!(
        "godunov admissible mesh ratio for this model: {:.4} (using {})",
        max_mesh_ratio(FluxFamily::Godunov, &model, Dim::One),
        cfg.scheme.lambda
    );
    let out = run_1d(&cfg)?;
    let r = &out.report;
    println!(
        "steps = {}, mass drift = {:.2e}, min = {:.2e}, max = {:.6}, entropy residual = {:.2e}",
        out.final_field.step_index, r.mass_drift_rel_max, r.min_overall, r.max_overall, r.entropy_max
    );
    println!(
        "invariant audit: {}",
        if r.verdicts().all_ok() { "PASSED" } else { "FAILED" }
    );
    Ok(())
}
