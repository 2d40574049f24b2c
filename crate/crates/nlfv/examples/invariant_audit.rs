//! Per-step invariant audit of a 1D run in direct-summation mode: mass
//! conservation, positivity, the max principle, total variation, time
//! continuity, and the discrete entropy inequality over the default k-set.
//!
//!     cargo run --release --example invariant_audit [n_cells]

use nlfv::output::diagnostics_summary_json;
use nlfv::*;

fn main() -> Result<()> {
    let n_cells: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1920);
    let cfg = RunConfig1d {
        grid: Grid1d::new(-1.5, 1.5, n_cells, Boundary::ZeroExtension)?,
        model: Model::builtin("nonlocal-lwr-1d")?,
        kernel: KernelSpec::lwr(0.0625)?,
        scheme: SchemeConfig {
            family: FluxFamily::LaxFriedrichs { theta: 0.3333 },
            lambda: 0.1286,
            recon: InterfaceRule::Mean,
            cfl: CflMode::Strict,
        },
        conv_mode: ConvMode::Direct,
        t_end: 0.5,
        initial: Initial1d::RiemannEx1,
        snapshot_times: vec![],
        diagnostics: DiagLevel::Full,
    };
    let t = std::time::Instant::now();
    let out = run_1d(&cfg)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&diagnostics_summary_json(&out.report)).unwrap()
    );
    if let Some(loc) = &out.report.entropy_argmax {
        println!(
            "worst entropy residual {:.3e} at step {}, cell {}, k = {:.4}",
            out.report.entropy_max, loc.step, loc.cell, loc.k
        );
    }
    let v = out.report.verdicts();
    println!(
        "audit {} in {:.1}s",
        if v.all_ok() { "PASSED" } else { "FAILED" },
        t.elapsed().as_secs_f64()
    );
    std::process::exit(if v.all_ok() { 0 } else { 1 });
}
