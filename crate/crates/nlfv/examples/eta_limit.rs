//! Kernel radius → 0: the nonlocal solutions approach the entropy solution
//! of the local conservation law. Prints the measured L¹ distances and
//! writes the final profiles for each radius.
//!
//!     cargo run --release --example eta_limit

use nlfv::output::{write_eta_csv, write_snapshot_csv_1d};
use nlfv::*;
use std::path::Path;

fn main() -> Result<()> {
    let grid = Grid1d::new(-1.5, 1.5, 1920, Boundary::ZeroExtension)?;
    let base = RunConfig1d {
        grid,
        model: Model::builtin("nonlocal-lwr-1d")?,
        kernel: KernelSpec::lwr(0.0625)?,
        scheme: SchemeConfig {
            family: FluxFamily::LaxFriedrichs { theta: 0.3333 },
            lambda: 0.1286,
            recon: InterfaceRule::Mean,
            cfl: CflMode::Strict,
        },
        conv_mode: ConvMode::Auto,
        t_end: 0.5,
        initial: Initial1d::RiemannEx1,
        snapshot_times: vec![],
        diagnostics: DiagLevel::Off,
    };
    let etas = [0.0625, 0.03125, 0.015625];
    let rows = eta_sweep(&base, &etas)?;
    let dir = Path::new("out/eta_limit");
    std::fs::create_dir_all(dir)?;
    println!("{:>10}  {:>22}", "eta", "l1_distance_to_local");
    for r in &rows {
        println!("{:>10.6}  {:>22.12e}", r.eta, r.l1_distance_to_local);
    }
    write_eta_csv(&dir.join("eta_sweep.csv"), &rows)?;
    for eta in etas {
        let mut cfg = base.clone();
        cfg.kernel = KernelSpec::lwr(eta)?;
        let out = run_1d(&cfg)?;
        write_snapshot_csv_1d(&dir.join(format!("nonlocal_eta{eta}.csv")), &out.final_field)?;
    }
    let local = local_reference_1d(grid, &base.initial, base.scheme.lambda, base.t_end)?;
    write_snapshot_csv_1d(&dir.join("local.csv"), &local)?;
    println!("wrote {}", dir.display());
    Ok(())
}
