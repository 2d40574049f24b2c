//! The discrete convolution c: kernel weights against β of interface
//! reconstructions, returning one value per cell interface. Direct summation
//! (fixed ascending-offset order, bit-reproducible) and an FFT path
//! (zero-padded linear convolution, or cyclic on periodic grids) are
//! interchangeable to ~1e-14; the contract guarantees 1e-10 relative.
//!
//! Orientation: the kernel argument is the cell position minus the interface
//! position, c_{i+1/2} = Δx Σ_p μ(x_p − x_{i+1/2}) β(u_{p+1/2}), so a kernel
//! supported on (0, η] weights the cells *ahead* of the interface. For the
//! traffic model this is the stable convention (speed responds to downstream
//! density); the mirrored pairing is linearly unstable and blows up.
//! Symmetric kernels are unaffected.

use crate::error::{Error, Result};
use crate::fft::{next_fast_len, Fft1dPlan, Fft2dPlan, C64};
use crate::flux::InterfaceRule;
use crate::grid::{Boundary, Field, Field2d};
use crate::kernel::{Axis, Kernel1d, Kernel2d};
use crate::model::Model;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMode {
    Direct,
    Fft,
    Auto,
}

/// `Auto` switches to the FFT path when the kernel has more than this many
/// taps (total offsets; per-axis product in 2D).
pub const AUTO_FFT_MIN_TAPS: usize = 32;

impl ConvMode {
    fn use_fft(self, taps: usize) -> bool {
        match self {
            ConvMode::Direct => false,
            ConvMode::Fft => true,
            ConvMode::Auto => taps > AUTO_FFT_MIN_TAPS,
        }
    }
}

const PAR_MIN_WORK: usize = 1 << 18;

fn check_mesh(a: f64, b: f64, what: &str) -> Result<()> {
    if (a - b).abs() > 1e-12 * b.abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "mesh mismatch: field {what}={a} but kernel was sampled at {b}"
        )));
    }
    Ok(())
}

struct Fft1dState {
    plan: Fft1dPlan,
    kspec: Vec<C64>,
}

/// Reusable 1D convolution context for a fixed (grid size, boundary, kernel,
/// mode). `interfaces` may be called repeatedly with new cell values.
///
/// With weights w[q] = Δx·μ((1/2 − q)·Δx), the interface values are
/// c[k] = Σ_q w[q]·g[k − q], g[m] = β(recon(u_m, u_{m+1})).
pub struct Convolver1d {
    n: usize,
    boundary: Boundary,
    kernel: Kernel1d,
    /// stored weights reversed; with the window origin at −q_max the direct
    /// sum becomes the contiguous dot product c[k] = Σ_s w_rev[s]·g[k+s]
    w_rev: Vec<f64>,
    use_fft: bool,
    fft: Option<Fft1dState>,
    g: Vec<f64>,
}

impl Convolver1d {
    pub fn new(n: usize, boundary: Boundary, kernel: Kernel1d, mode: ConvMode) -> Self {
        let taps = kernel.len();
        let use_fft = mode.use_fft(taps);
        let g_len = match boundary {
            Boundary::ZeroExtension => n + taps,
            Boundary::Periodic => n,
        };
        let w_rev: Vec<f64> = kernel.weights().iter().rev().cloned().collect();
        let fft = if use_fft {
            Some(match boundary {
                Boundary::ZeroExtension => {
                    // c[k] = (w ∗ g)[k + taps − 1] with the stored (ascending
                    // offset) weight array
                    let len = next_fast_len(g_len + taps - 1);
                    let mut plan = Fft1dPlan::new(len);
                    plan.buf.fill(C64::default());
                    for (s, w) in kernel.weights().iter().enumerate() {
                        plan.buf[s] = C64::new(*w, 0.0);
                    }
                    plan.forward();
                    let scale = 1.0 / len as f64;
                    let kspec = plan.buf.iter().map(|z| z * scale).collect();
                    Fft1dState { plan, kspec }
                }
                Boundary::Periodic => {
                    // cyclic cross-correlation against the ring scatter of
                    // the weights at slots (−q) mod n
                    let mut plan = Fft1dPlan::new(n);
                    plan.buf.fill(C64::default());
                    for (s, w) in kernel.weights().iter().enumerate() {
                        let q = kernel.offset_min() + s as i64;
                        let slot = (-q).rem_euclid(n as i64) as usize;
                        plan.buf[slot] += C64::new(*w, 0.0);
                    }
                    plan.forward();
                    let scale = 1.0 / n as f64;
                    let kspec = plan.buf.iter().map(|z| z.conj() * scale).collect();
                    Fft1dState { plan, kspec }
                }
            })
        } else {
            None
        };
        Convolver1d {
            n,
            boundary,
            kernel,
            w_rev,
            use_fft,
            fft,
            g: vec![0.0; g_len],
        }
    }

    pub fn kernel(&self) -> &Kernel1d {
        &self.kernel
    }

    fn fill_g(&mut self, values: &[f64], m: &Model, recon: InterfaceRule) {
        let n = self.n as i64;
        match self.boundary {
            Boundary::ZeroExtension => {
                // window origin: m = −q_max + t, covering every index k − q
                let origin = -*self.kernel.offsets().end();
                let cell = |idx: i64| -> f64 {
                    if idx >= 0 && idx < n {
                        values[idx as usize]
                    } else {
                        0.0
                    }
                };
                for (t, g) in self.g.iter_mut().enumerate() {
                    let mi = origin + t as i64;
                    *g = m.beta(recon.combine(cell(mi), cell(mi + 1)));
                }
            }
            Boundary::Periodic => {
                for (t, g) in self.g.iter_mut().enumerate() {
                    let left = values[t];
                    let right = values[(t + 1) % self.n];
                    *g = m.beta(recon.combine(left, right));
                }
            }
        }
    }

    /// c values at interfaces k = 0..=n. On periodic grids c[n] == c[0].
    pub fn interfaces(&mut self, values: &[f64], m: &Model, recon: InterfaceRule) -> Vec<f64> {
        assert_eq!(values.len(), self.n);
        self.fill_g(values, m, recon);
        let mut out = vec![0.0; self.n + 1];
        if self.use_fft {
            self.run_fft(&mut out);
        } else {
            self.run_direct(&mut out);
        }
        out
    }

    fn run_direct(&self, out: &mut [f64]) {
        let g = &self.g;
        match self.boundary {
            Boundary::ZeroExtension => {
                // c[k] = Σ_s w_rev[s]·g[k+s]: with the window origin −q_max,
                // index k−q lands at t = k − q − origin = k + (q_max − q)
                let w = &self.w_rev;
                let dot = |k: usize| -> f64 {
                    let mut acc = 0.0;
                    for (s, ws) in w.iter().enumerate() {
                        acc += ws * g[k + s];
                    }
                    acc
                };
                if out.len() * w.len() >= PAR_MIN_WORK {
                    out.par_iter_mut()
                        .enumerate()
                        .for_each(|(k, o)| *o = dot(k));
                } else {
                    for (k, o) in out.iter_mut().enumerate() {
                        *o = dot(k);
                    }
                }
            }
            Boundary::Periodic => {
                let n = self.n as i64;
                let w = self.kernel.weights();
                let q0 = self.kernel.offset_min();
                for k in 0..self.n {
                    let mut acc = 0.0;
                    for (s, ws) in w.iter().enumerate() {
                        let t = (k as i64 - (q0 + s as i64)).rem_euclid(n) as usize;
                        acc += ws * g[t];
                    }
                    out[k] = acc;
                }
                out[self.n] = out[0];
            }
        }
    }

    fn run_fft(&mut self, out: &mut [f64]) {
        let state = self.fft.as_mut().expect("fft state");
        let plan = &mut state.plan;
        plan.buf.fill(C64::default());
        for (t, g) in self.g.iter().enumerate() {
            plan.buf[t] = C64::new(*g, 0.0);
        }
        plan.forward();
        for (z, k) in plan.buf.iter_mut().zip(&state.kspec) {
            *z *= k;
        }
        plan.inverse();
        match self.boundary {
            Boundary::ZeroExtension => {
                let taps = self.kernel.len();
                for (k, o) in out.iter_mut().enumerate() {
                    *o = plan.buf[k + taps - 1].re;
                }
            }
            Boundary::Periodic => {
                for k in 0..self.n {
                    out[k] = plan.buf[k].re;
                }
                out[self.n] = out[0];
            }
        }
    }
}

/// c_{i+1/2} for every interface of `field`, per the quadrature
/// c_{i+1/2} = Σ_p w[p−i]·β(u_{p+1/2}) with u_{p+1/2} = recon(u_p, u_{p+1}).
pub fn convolve_1d(
    field: &Field,
    kernel: &Kernel1d,
    m: &Model,
    recon: InterfaceRule,
    mode: ConvMode,
) -> Result<Vec<f64>> {
    check_mesh(field.grid.dx(), kernel.dx(), "dx")?;
    let mut conv = Convolver1d::new(field.grid.n_cells, field.grid.boundary, kernel.clone(), mode);
    Ok(conv.interfaces(&field.values, m, recon))
}

struct Fft2dState {
    plan: Fft2dPlan,
    kspec: Vec<C64>,
}

/// Reusable 2D convolution context for one axis.
///
/// Axis X output: c at x-interfaces, laid out `out[j*(nx+1) + k]`, k = 0..=nx:
/// c^x[k][j] = Σ_{q1,q2} w[q1][q2]·G(k−q1, j−q2) with G the β-reconstruction
/// along x. Axis Y: c at y-interfaces, `out[k*nx + i]`, k = 0..=ny.
pub struct Convolver2d {
    nx: usize,
    ny: usize,
    boundary: Boundary,
    axis: Axis,
    kernel: Kernel2d,
    /// kernel reversed in both axes: w_rev[e1*t2 + e2] = w at offsets
    /// (q1_max − e1, q2_max − e2); direct mode sums over (e2, e1) ascending.
    w_rev: Vec<f64>,
    use_fft: bool,
    fft: Option<Fft2dState>,
    /// Window of β(reconstruction) values, row-major by the y-like index:
    /// `g[t2*d1 + t1]`, window origin (o1, o2) = (−q1_max, −q2_max).
    g: Vec<f64>,
    d1: usize,
    o1: i64,
    o2: i64,
}

impl Convolver2d {
    pub fn new(
        nx: usize,
        ny: usize,
        boundary: Boundary,
        kernel: Kernel2d,
        axis: Axis,
        mode: ConvMode,
    ) -> Self {
        let (t1, t2) = kernel.dims();
        let use_fft = mode.use_fft(t1 * t2);
        // window extents: the interface axis has one extra index (nx+1
        // interfaces), the other axis spans the plain offset range
        let (d1, d2) = match (boundary, axis) {
            (Boundary::ZeroExtension, Axis::X) => (nx + t1, ny + t2 - 1),
            (Boundary::ZeroExtension, Axis::Y) => (nx + t1 - 1, ny + t2),
            (Boundary::Periodic, _) => (nx, ny),
        };
        let (o1, o2) = match boundary {
            Boundary::ZeroExtension => (
                -(*kernel.offsets_1().end()),
                -(*kernel.offsets_2().end()),
            ),
            Boundary::Periodic => (0, 0),
        };
        let mut w_rev = vec![0.0; t1 * t2];
        for e1 in 0..t1 {
            for e2 in 0..t2 {
                w_rev[e1 * t2 + e2] = kernel.weights()[(t1 - 1 - e1) * t2 + (t2 - 1 - e2)];
            }
        }
        let fft = if use_fft {
            Some(match boundary {
                Boundary::ZeroExtension => {
                    let l_cols = next_fast_len(d1 + t1 - 1);
                    let l_rows = next_fast_len(d2 + t2 - 1);
                    let mut plan = Fft2dPlan::new(l_rows, l_cols);
                    plan.buf.fill(C64::default());
                    for s1 in 0..t1 {
                        for s2 in 0..t2 {
                            let w = kernel.weights()[s1 * t2 + s2];
                            plan.buf[s2 * l_cols + s1] = C64::new(w, 0.0);
                        }
                    }
                    plan.forward_into_transposed();
                    let scale = 1.0 / (l_rows * l_cols) as f64;
                    let kspec = plan.tmp.iter().map(|z| z * scale).collect();
                    Fft2dState { plan, kspec }
                }
                Boundary::Periodic => {
                    let mut plan = Fft2dPlan::new(ny, nx);
                    plan.buf.fill(C64::default());
                    for s1 in 0..t1 {
                        for s2 in 0..t2 {
                            let q1 = kernel.q1_min() + s1 as i64;
                            let q2 = kernel.q2_min() + s2 as i64;
                            let m1 = (-q1).rem_euclid(nx as i64) as usize;
                            let m2 = (-q2).rem_euclid(ny as i64) as usize;
                            plan.buf[m2 * nx + m1] +=
                                C64::new(kernel.weights()[s1 * t2 + s2], 0.0);
                        }
                    }
                    plan.forward_into_transposed();
                    let scale = 1.0 / (nx * ny) as f64;
                    let kspec = plan.tmp.iter().map(|z| z.conj() * scale).collect();
                    Fft2dState { plan, kspec }
                }
            })
        } else {
            None
        };
        Convolver2d {
            nx,
            ny,
            boundary,
            axis,
            kernel,
            w_rev,
            use_fft,
            fft,
            g: vec![0.0; d1 * d2],
            d1,
            o1,
            o2,
        }
    }

    pub fn out_len(&self) -> usize {
        match self.axis {
            Axis::X => (self.nx + 1) * self.ny,
            Axis::Y => self.nx * (self.ny + 1),
        }
    }

    fn fill_g(&mut self, values: &[f64], m: &Model, recon: InterfaceRule) {
        let nx = self.nx as i64;
        let ny = self.ny as i64;
        let (d1, o1, o2) = (self.d1, self.o1, self.o2);
        let axis = self.axis;
        let boundary = self.boundary;
        let fill_row = |t2: usize, row: &mut [f64]| {
            let m2 = o2 + t2 as i64;
            for (t1, gv) in row.iter_mut().enumerate() {
                let m1 = o1 + t1 as i64;
                let (la, lb) = match axis {
                    Axis::X => ((m1, m2), (m1 + 1, m2)),
                    Axis::Y => ((m1, m2), (m1, m2 + 1)),
                };
                let cell = |(i, j): (i64, i64)| -> f64 {
                    match boundary {
                        Boundary::ZeroExtension => {
                            if i >= 0 && i < nx && j >= 0 && j < ny {
                                values[(j * nx + i) as usize]
                            } else {
                                0.0
                            }
                        }
                        Boundary::Periodic => {
                            values[(j.rem_euclid(ny) * nx + i.rem_euclid(nx)) as usize]
                        }
                    }
                };
                *gv = m.beta(recon.combine(cell(la), cell(lb)));
            }
        };
        if self.g.len() >= PAR_MIN_WORK {
            self.g
                .par_chunks_mut(d1)
                .enumerate()
                .for_each(|(t2, row)| fill_row(t2, row));
        } else {
            for (t2, row) in self.g.chunks_mut(d1).enumerate() {
                fill_row(t2, row);
            }
        }
    }

    pub fn interfaces(&mut self, values: &[f64], m: &Model, recon: InterfaceRule) -> Vec<f64> {
        assert_eq!(values.len(), self.nx * self.ny);
        self.fill_g(values, m, recon);
        let mut out = vec![0.0; self.out_len()];
        if self.use_fft {
            self.run_fft(&mut out);
        } else {
            self.run_direct(&mut out);
        }
        out
    }

    fn run_direct(&self, out: &mut [f64]) {
        let (t1, t2) = self.kernel.dims();
        let g = &self.g;
        let d1 = self.d1;
        match self.boundary {
            Boundary::ZeroExtension => {
                // out rows: for X the row index is j (length nx+1), for Y it
                // is the interface index k (length nx); either way row r,
                // col c maps to window anchor (c, r).
                let w = &self.w_rev;
                let row_len = match self.axis {
                    Axis::X => self.nx + 1,
                    Axis::Y => self.nx,
                };
                let dot = |c: usize, r: usize| -> f64 {
                    let mut acc = 0.0;
                    for e2 in 0..t2 {
                        let grow = (r + e2) * d1 + c;
                        for e1 in 0..t1 {
                            acc += w[e1 * t2 + e2] * g[grow + e1];
                        }
                    }
                    acc
                };
                if out.len() * t1 * t2 >= PAR_MIN_WORK {
                    out.par_chunks_mut(row_len).enumerate().for_each(|(r, o)| {
                        for (c, v) in o.iter_mut().enumerate() {
                            *v = dot(c, r);
                        }
                    });
                } else {
                    for (r, o) in out.chunks_mut(row_len).enumerate() {
                        for (c, v) in o.iter_mut().enumerate() {
                            *v = dot(c, r);
                        }
                    }
                }
            }
            Boundary::Periodic => {
                let w = self.kernel.weights();
                let nx = self.nx as i64;
                let ny = self.ny as i64;
                let (q10, q20) = (self.kernel.q1_min(), self.kernel.q2_min());
                match self.axis {
                    Axis::X => {
                        for j in 0..self.ny {
                            for k in 0..=self.nx {
                                let mut acc = 0.0;
                                for s1 in 0..t1 {
                                    let m1 = (k as i64 - (q10 + s1 as i64)).rem_euclid(nx);
                                    for s2 in 0..t2 {
                                        let m2 = (j as i64 - (q20 + s2 as i64)).rem_euclid(ny);
                                        acc += w[s1 * t2 + s2] * g[(m2 * nx + m1) as usize];
                                    }
                                }
                                out[j * (self.nx + 1) + k] = acc;
                            }
                        }
                    }
                    Axis::Y => {
                        for k in 0..=self.ny {
                            for i in 0..self.nx {
                                let mut acc = 0.0;
                                for s1 in 0..t1 {
                                    let m1 = (i as i64 - (q10 + s1 as i64)).rem_euclid(nx);
                                    for s2 in 0..t2 {
                                        let m2 = (k as i64 - (q20 + s2 as i64)).rem_euclid(ny);
                                        acc += w[s1 * t2 + s2] * g[(m2 * nx + m1) as usize];
                                    }
                                }
                                out[k * self.nx + i] = acc;
                            }
                        }
                    }
                }
            }
        }
    }

    fn run_fft(&mut self, out: &mut [f64]) {
        let (t1, t2) = self.kernel.dims();
        let state = self.fft.as_mut().expect("fft state");
        let plan = &mut state.plan;
        let l_cols = plan.l2;
        plan.buf.fill(C64::default());
        for (t2i, row) in self.g.chunks(self.d1).enumerate() {
            let dst = &mut plan.buf[t2i * l_cols..t2i * l_cols + self.d1];
            for (d, s) in dst.iter_mut().zip(row) {
                *d = C64::new(*s, 0.0);
            }
        }
        plan.forward_into_transposed();
        plan.tmp
            .iter_mut()
            .zip(&state.kspec)
            .for_each(|(z, k)| *z *= k);
        plan.inverse_from_transposed();
        match self.boundary {
            Boundary::ZeroExtension => {
                let row_len = match self.axis {
                    Axis::X => self.nx + 1,
                    Axis::Y => self.nx,
                };
                for (r, orow) in out.chunks_mut(row_len).enumerate() {
                    let src = (r + t2 - 1) * l_cols + t1 - 1;
                    for (c, v) in orow.iter_mut().enumerate() {
                        *v = plan.buf[src + c].re;
                    }
                }
            }
            Boundary::Periodic => {
                match self.axis {
                    Axis::X => {
                        for j in 0..self.ny {
                            for k in 0..=self.nx {
                                out[j * (self.nx + 1) + k] =
                                    plan.buf[j * l_cols + (k % self.nx)].re;
                            }
                        }
                    }
                    Axis::Y => {
                        for k in 0..=self.ny {
                            for i in 0..self.nx {
                                out[k * self.nx + i] = plan.buf[(k % self.ny) * l_cols + i].re;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// c at every x- or y-interface of `field` (see [`Convolver2d`] for layout).
pub fn convolve_2d(
    field: &Field2d,
    kernel: &Kernel2d,
    m: &Model,
    which: Axis,
    recon: InterfaceRule,
    mode: ConvMode,
) -> Result<Vec<f64>> {
    check_mesh(field.grid.dx(), kernel.dx(), "dx")?;
    check_mesh(field.grid.dy(), kernel.dy(), "dy")?;
    let mut conv = Convolver2d::new(
        field.grid.nx,
        field.grid.ny,
        field.grid.boundary,
        kernel.clone(),
        which,
        mode,
    );
    Ok(conv.interfaces(&field.values, m, recon))
}
