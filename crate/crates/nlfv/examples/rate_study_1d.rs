//! 1D mesh-refinement rate study: runs at dx, dx/2, ... with λ fixed and
//! tabulates the nested L¹ distances and observed orders.
//!
//!     cargo run --release --example rate_study_1d [levels]

use nlfv::output::write_rate_csv;
use nlfv::*;

fn main() -> Result<()> {
    let levels: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let base = RunConfig1d {
        grid: Grid1d::new(-1.5, 1.5, 480, Boundary::ZeroExtension)?, // dx = 0.00625
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
    let t = std::time::Instant::now();
    let table = convergence_study_1d(&base, levels)?;
    print!("{table}");
    println!("({} simulations, {:.1}s)", levels + 1, t.elapsed().as_secs_f64());
    std::fs::create_dir_all("out")?;
    write_rate_csv(std::path::Path::new("out/rates_1d.csv"), &table)?;
    Ok(())
}
