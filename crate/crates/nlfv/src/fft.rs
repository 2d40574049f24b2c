//! Thin wrappers around rustfft for the convolution paths: cached plans,
//! scratch reuse, and a rows-then-columns 2D transform.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) type C64 = Complex<f64>;

/// Smallest 5-smooth length >= n; mixed-radix FFTs are fast at these sizes.
pub(crate) fn next_fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut k = m;
        for f in [2usize, 3, 5] {
            while k % f == 0 {
                k /= f;
            }
        }
        if k == 1 {
            return m;
        }
        m += 1;
    }
}

const PAR_MIN_ELEMS: usize = 1 << 16;

fn run_rows(fft: &Arc<dyn Fft<f64>>, data: &mut [C64], row_len: usize) {
    debug_assert_eq!(data.len() % row_len, 0);
    if data.len() >= PAR_MIN_ELEMS {
        data.par_chunks_exact_mut(row_len).for_each_init(
            || vec![C64::default(); fft.get_inplace_scratch_len()],
            |scratch, row| fft.process_with_scratch(row, scratch),
        );
    } else {
        let mut scratch = vec![C64::default(); fft.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(row_len) {
            fft.process_with_scratch(row, scratch.as_mut_slice());
        }
    }
}

fn transpose(src: &[C64], dst: &mut [C64], rows: usize, cols: usize) {
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    if src.len() >= PAR_MIN_ELEMS {
        dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
            for (r, o) in out.iter_mut().enumerate() {
                *o = src[r * cols + c];
            }
        });
    } else {
        for c in 0..cols {
            for r in 0..rows {
                dst[c * rows + r] = src[r * cols + c];
            }
        }
    }
}

pub(crate) struct Fft1dPlan {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    pub buf: Vec<C64>,
}

impl Fft1dPlan {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Fft1dPlan {
            fwd,
            inv,
            scratch: vec![C64::default(); scratch_len],
            buf: vec![C64::default(); len],
        }
    }

    pub fn forward(&mut self) {
        self.fwd
            .process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    pub fn inverse(&mut self) {
        self.inv
            .process_with_scratch(&mut self.buf, &mut self.scratch);
    }
}

/// 2D transform of an l1 x l2 row-major buffer. The forward pass leaves the
/// spectrum transposed (l2 x l1) in `tmp`; pointwise work happens there and
/// the inverse pass brings it back. No normalization is applied; fold the
/// 1/(l1·l2) factor into cached kernel spectra.
pub(crate) struct Fft2dPlan {
    pub l1: usize,
    pub l2: usize,
    f1: Arc<dyn Fft<f64>>,
    f2: Arc<dyn Fft<f64>>,
    i1: Arc<dyn Fft<f64>>,
    i2: Arc<dyn Fft<f64>>,
    pub buf: Vec<C64>,
    pub tmp: Vec<C64>,
}

impl Fft2dPlan {
    pub fn new(l1: usize, l2: usize) -> Self {
        let mut planner = FftPlanner::new();
        let f1 = planner.plan_fft_forward(l1);
        let f2 = planner.plan_fft_forward(l2);
        let i1 = planner.plan_fft_inverse(l1);
        let i2 = planner.plan_fft_inverse(l2);
        Fft2dPlan {
            l1,
            l2,
            f1,
            f2,
            i1,
            i2,
            buf: vec![C64::default(); l1 * l2],
            tmp: vec![C64::default(); l1 * l2],
        }
    }

    /// buf (l1 x l2) -> transposed spectrum in tmp (l2 x l1).
    pub fn forward_into_transposed(&mut self) {
        run_rows(&self.f2, &mut self.buf, self.l2);
        transpose(&self.buf, &mut self.tmp, self.l1, self.l2);
        run_rows(&self.f1, &mut self.tmp, self.l1);
    }

    /// transposed spectrum in tmp (l2 x l1) -> buf (l1 x l2).
    pub fn inverse_from_transposed(&mut self) {
        run_rows(&self.i1, &mut self.tmp, self.l1);
        transpose(&self.tmp, &mut self.buf, self.l2, self.l1);
        run_rows(&self.i2, &mut self.buf, self.l2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_lengths_are_5_smooth() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(1409), 1440);
        assert_eq!(next_fast_len(7937), 8000);
        for n in [17, 97, 1000, 4097] {
            let m = next_fast_len(n);
            assert!(m >= n);
            let mut k = m;
            for f in [2, 3, 5] {
                while k % f == 0 {
                    k /= f;
                }
            }
            assert_eq!(k, 1);
        }
    }

    #[test]
    fn round_trip_1d() {
        let mut plan = Fft1dPlan::new(24);
        for i in 0..24 {
            plan.buf[i] = C64::new(i as f64, 0.0);
        }
        let orig = plan.buf.clone();
        plan.forward();
        plan.inverse();
        for (a, b) in plan.buf.iter().zip(&orig) {
            assert!((a.re / 24.0 - b.re).abs() < 1e-12);
            assert!((a.im / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_2d() {
        let (l1, l2) = (6, 10);
        let mut plan = Fft2dPlan::new(l1, l2);
        for i in 0..l1 * l2 {
            plan.buf[i] = C64::new((i % 7) as f64 - 3.0, 0.0);
        }
        let orig = plan.buf.clone();
        plan.forward_into_transposed();
        plan.inverse_from_transposed();
        let scale = (l1 * l2) as f64;
        for (a, b) in plan.buf.iter().zip(&orig) {
            assert!((a.re / scale - b.re).abs() < 1e-12);
        }
    }
}
