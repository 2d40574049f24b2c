//! Worker-pool setup and deterministic reductions.
//!
//! Reductions over cell arrays use a fixed-shape pairwise tree, so results do
//! not depend on how many workers the element-wise loops used.

use std::sync::OnceLock;

/// Initialize the global worker pool from `NLFV_THREADS` (0 or unset: auto).
/// Returns the effective worker count. Safe to call more than once.
pub fn init_threads() -> usize {
    static INIT: OnceLock<usize> = OnceLock::new();
    *INIT.get_or_init(|| {
        let requested = std::env::var("NLFV_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        if requested > 0 {
            // Ignore the error if a pool already exists; the count below
            // reports whatever pool is actually in place.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(requested)
                .build_global();
        }
        rayon::current_num_threads()
    })
}

/// Pairwise (fixed-shape tree) summation; deterministic and more accurate
/// than a running sum.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_map_sum(xs, |x| x)
}

/// Pairwise summation of `f` applied to each element.
pub fn pairwise_map_sum(xs: &[f64], f: impl Fn(f64) -> f64 + Copy) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for x in xs {
            acc += f(*x);
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_map_sum(&xs[..mid], f) + pairwise_map_sum(&xs[mid..], f)
    }
}
