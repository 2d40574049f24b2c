//! The local Godunov reference solver on two Riemann problems: a
//! rarefaction compared against the exact self-similar profile, and a
//! stationary shock.
//!
//!     cargo run --release --example riemann_local

use nlfv::*;

fn main() -> Result<()> {
    let grid = Grid1d::new(-1.5, 1.5, 1920, Boundary::ZeroExtension)?;
    let (dx, t_end, lambda) = (grid.dx(), 0.5, 0.1286);

    // 1 -> 0: rarefaction fan u = (1 - x/t)/2 on |x| <= t
    let rare = local_reference_1d(
        grid,
        &Initial1d::Riemann {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
        },
        lambda,
        t_end,
    )?;
    let exact = |x: f64| -> f64 {
        if x <= -t_end {
            1.0
        } else if x >= t_end {
            0.0
        } else {
            (1.0 - x / t_end) / 2.0
        }
    };
    let mut l1 = 0.0;
    for i in 0..grid.n_cells {
        l1 += dx * (rare.values[i] - exact(grid.cell_center(i))).abs();
    }
    println!("rarefaction: L1 error vs exact fan = {l1:.4e} ({:.2} dx)", l1 / dx);

    // 0.25 -> 0.75: shock speed (f(0.75) - f(0.25))/(0.75 - 0.25) = 0
    let shock = local_reference_1d(
        grid,
        &Initial1d::Riemann {
            left: 0.25,
            right: 0.75,
            x0: 0.0,
        },
        lambda,
        t_end,
    )?;
    let jump = (0..grid.n_cells - 1)
        .max_by(|a, b| {
            let da = (shock.values[a + 1] - shock.values[*a]).abs();
            let db = (shock.values[b + 1] - shock.values[*b]).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    println!(
        "stationary shock: largest jump at interface x = {:+.6} (one cell = {dx:.6})",
        grid.interface(jump + 1)
    );
    Ok(())
}
