//! Convolution kernels μ and their interface-aligned grid sampling.
//!
//! A 1D kernel is sampled as `w[p] = Δx·μ((1/2 − p)·Δx)`, the weight that
//! multiplies the reconstructed interface value p cells away when forming
//! c_{i+1/2} = Δx Σ_p μ(x_{i+1/2} − x_p) β(u_{p+1/2}). In 2D each axis gets
//! its own sampling, aligned to that axis's interfaces.

use crate::error::{Error, Result};

const MESH_MATCH_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum KernelSpec {
    /// μ(x) = (3/η³)(η−x)² on (0, η), zero elsewhere. Unit mass.
    LwrQuadratic1d { eta: f64 },
    /// μ(x,y) ∝ (R²−x²−y²)³ on the disk x²+y² ≤ R², normalized to unit mass.
    CrowdBump2d { radius: f64 },
    /// Raw μ samples taken at interface-aligned offsets with spacing `dx`.
    CustomSampled1d {
        mu_samples: Vec<f64>,
        first_offset: i64,
        dx: f64,
    },
}

impl KernelSpec {
    pub fn lwr(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Config(format!("kernel radius eta must be > 0, got {eta}")));
        }
        Ok(KernelSpec::LwrQuadratic1d { eta })
    }

    pub fn crowd_bump(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!(
                "kernel radius must be > 0, got {radius}"
            )));
        }
        Ok(KernelSpec::CrowdBump2d { radius })
    }

    pub fn is_2d(&self) -> bool {
        matches!(self, KernelSpec::CrowdBump2d { .. })
    }

    /// Pointwise kernel value, 1D kinds only.
    pub fn mu_1d(&self, x: f64) -> f64 {
        match self {
            KernelSpec::LwrQuadratic1d { eta } => {
                if x > 0.0 && x <= *eta {
                    let d = eta - x;
                    3.0 / (eta * eta * eta) * d * d
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Pointwise kernel value, 2D kinds only.
    pub fn mu_2d(&self, x: f64, y: f64) -> f64 {
        match self {
            KernelSpec::CrowdBump2d { radius } => {
                let s = radius * radius - x * x - y * y;
                if s >= 0.0 {
                    let r8 = radius.powi(8);
                    let norm = std::f64::consts::PI * r8 / 4.0;
                    s * s * s / norm
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }
}

/// Interface-aligned 1D kernel samples. `weight(p)` is zero outside
/// `offsets()`, and the stored range covers exactly the sampled support.
#[derive(Clone, Debug)]
pub struct Kernel1d {
    weights: Vec<f64>,
    offset_min: i64,
    dx: f64,
    under_resolved: bool,
}

impl Kernel1d {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offsets(&self) -> std::ops::RangeInclusive<i64> {
        self.offset_min..=self.offset_min + self.weights.len() as i64 - 1
    }

    pub fn offset_min(&self) -> i64 {
        self.offset_min
    }

    pub fn weight(&self, p: i64) -> f64 {
        let idx = p - self.offset_min;
        if idx < 0 || idx >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[idx as usize]
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// True when the mesh resolves the kernel by fewer than 2 samples.
    pub fn under_resolved(&self) -> bool {
        self.under_resolved
    }

    /// Σ of all weights; a Riemann sum of the kernel mass.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Sample a 1D kernel at mesh width `dx`: `w[p] = dx·μ((1/2 − p)·dx)`.
pub fn sample_kernel_1d(spec: &KernelSpec, dx: f64) -> Result<Kernel1d> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::Precondition(format!("dx must be > 0, got {dx}")));
    }
    match spec {
        KernelSpec::LwrQuadratic1d { eta } => {
            // (1/2 − p)·dx ∈ [0, η]  ⇒  p ∈ [⌈1/2 − η/dx⌉, 0]
            let p_min = (0.5 - eta / dx).ceil() as i64;
            let p_max = 0i64;
            let mut weights = Vec::new();
            for p in p_min..=p_max {
                weights.push(dx * spec.mu_1d((0.5 - p as f64) * dx));
            }
            let nonzero = weights.iter().filter(|w| **w != 0.0).count();
            if weights.is_empty() {
                weights.push(0.0);
            }
            Ok(Kernel1d {
                weights,
                offset_min: p_min.min(0),
                dx,
                under_resolved: nonzero < 2,
            })
        }
        KernelSpec::CustomSampled1d {
            mu_samples,
            first_offset,
            dx: spec_dx,
        } => {
            if (dx - spec_dx).abs() > MESH_MATCH_TOL * spec_dx.max(1.0) {
                return Err(Error::Precondition(format!(
                    "custom-sampled kernel was taken at dx={spec_dx}, requested dx={dx}"
                )));
            }
            let weights: Vec<f64> = mu_samples.iter().map(|m| dx * m).collect();
            if weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::Precondition("kernel samples must be finite".into()));
            }
            let nonzero = weights.iter().filter(|w| **w != 0.0).count();
            Ok(Kernel1d {
                weights,
                offset_min: *first_offset,
                dx,
                under_resolved: nonzero < 2,
            })
        }
        KernelSpec::CrowdBump2d { .. } => Err(Error::Precondition(
            "crowd-bump-2d is a 2D kernel; use sample_kernel_2d".into(),
        )),
    }
}

/// Which axis's interfaces a 2D sampling is aligned to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Interface-aligned 2D kernel samples on a rectangle of integer offsets.
#[derive(Clone, Debug)]
pub struct Kernel2d {
    /// Row-major over (q1, q2): `weights[(q1 − q1_min)·n2 + (q2 − q2_min)]`.
    weights: Vec<f64>,
    q1_min: i64,
    q2_min: i64,
    n1: usize,
    n2: usize,
    dx: f64,
    dy: f64,
    under_resolved: bool,
}

impl Kernel2d {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offsets_1(&self) -> std::ops::RangeInclusive<i64> {
        self.q1_min..=self.q1_min + self.n1 as i64 - 1
    }

    pub fn offsets_2(&self) -> std::ops::RangeInclusive<i64> {
        self.q2_min..=self.q2_min + self.n2 as i64 - 1
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn q1_min(&self) -> i64 {
        self.q1_min
    }

    pub fn q2_min(&self) -> i64 {
        self.q2_min
    }

    pub fn weight(&self, q1: i64, q2: i64) -> f64 {
        let i1 = q1 - self.q1_min;
        let i2 = q2 - self.q2_min;
        if i1 < 0 || i2 < 0 || i1 >= self.n1 as i64 || i2 >= self.n2 as i64 {
            0.0
        } else {
            self.weights[i1 as usize * self.n2 + i2 as usize]
        }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn under_resolved(&self) -> bool {
        self.under_resolved
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Sample a 2D kernel aligned to `axis` interfaces:
/// X: `w[q1][q2] = ΔxΔy·μ((1/2 − q1)Δx, −q2·Δy)`,
/// Y: `w[q1][q2] = ΔxΔy·μ(−q1·Δx, (1/2 − q2)Δy)`.
pub fn sample_kernel_2d(spec: &KernelSpec, dx: f64, dy: f64, axis: Axis) -> Result<Kernel2d> {
    if !(dx > 0.0 && dy > 0.0) {
        return Err(Error::Precondition(format!(
            "dx and dy must be > 0, got {dx}, {dy}"
        )));
    }
    let radius = match spec {
        KernelSpec::CrowdBump2d { radius } => *radius,
        _ => {
            return Err(Error::Precondition(
                "sample_kernel_2d requires a 2D kernel spec".into(),
            ))
        }
    };
    let (q1_min, q1_max, q2_min, q2_max) = match axis {
        Axis::X => (
            (0.5 - radius / dx).ceil() as i64,
            (0.5 + radius / dx).floor() as i64,
            (-radius / dy).ceil() as i64,
            (radius / dy).floor() as i64,
        ),
        Axis::Y => (
            (-radius / dx).ceil() as i64,
            (radius / dx).floor() as i64,
            (0.5 - radius / dy).ceil() as i64,
            (0.5 + radius / dy).floor() as i64,
        ),
    };
    let n1 = (q1_max - q1_min + 1).max(1) as usize;
    let n2 = (q2_max - q2_min + 1).max(1) as usize;
    let mut weights = vec![0.0; n1 * n2];
    let cell = dx * dy;
    for (i1, q1) in (q1_min..=q1_max).enumerate() {
        for (i2, q2) in (q2_min..=q2_max).enumerate() {
            let (x, y) = match axis {
                Axis::X => ((0.5 - q1 as f64) * dx, -(q2 as f64) * dy),
                Axis::Y => (-(q1 as f64) * dx, (0.5 - q2 as f64) * dy),
            };
            weights[i1 * n2 + i2] = cell * spec.mu_2d(x, y);
        }
    }
    let nonzero = weights.iter().filter(|w| **w != 0.0).count();
    Ok(Kernel2d {
        weights,
        q1_min,
        q2_min,
        n1,
        n2,
        dx,
        dy,
        under_resolved: nonzero < 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lwr_offsets_at_quarter_eta() {
        // η = 0.0625, dx = η/4: arguments (1/2 − p)·dx land in (0, η) exactly
        // for p ∈ {−3, −2, −1, 0}.
        let spec = KernelSpec::lwr(0.0625).unwrap();
        let k = sample_kernel_1d(&spec, 0.015625).unwrap();
        assert_eq!(k.offsets(), -3..=0);
        assert!(k.weights().iter().all(|w| *w > 0.0));
        assert!(!k.under_resolved());
    }

    #[test]
    fn lwr_mass_near_one() {
        let eta = 0.0625;
        let spec = KernelSpec::lwr(eta).unwrap();
        let k = sample_kernel_1d(&spec, eta / 40.0).unwrap();
        assert!((k.mass() - 1.0).abs() < 0.05);
        // midpoint rule on a C² integrand: much tighter in practice
        assert!((k.mass() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn custom_sampled_passthrough() {
        let dx = 0.01;
        let spec = KernelSpec::CustomSampled1d {
            mu_samples: vec![1.0, 2.0, 3.0],
            first_offset: -1,
            dx,
        };
        let k = sample_kernel_1d(&spec, dx).unwrap();
        assert_eq!(k.weights(), &[0.01, 0.02, 0.03]);
        assert_eq!(k.offsets(), -1..=1);
        assert!(sample_kernel_1d(&spec, 0.02).is_err());
    }

    #[test]
    fn custom_all_zero_kernel_has_zero_mass() {
        let spec = KernelSpec::CustomSampled1d {
            mu_samples: vec![0.0; 5],
            first_offset: -2,
            dx: 0.1,
        };
        let k = sample_kernel_1d(&spec, 0.1).unwrap();
        assert_eq!(k.mass(), 0.0);
        assert!(k.under_resolved());
    }

    #[test]
    fn under_resolved_warning() {
        let spec = KernelSpec::lwr(0.01).unwrap();
        let k = sample_kernel_1d(&spec, 0.02).unwrap();
        assert!(k.under_resolved());
    }

    #[test]
    fn crowd_bump_offsets_and_support() {
        let spec = KernelSpec::crowd_bump(0.4).unwrap();
        let k = sample_kernel_2d(&spec, 0.05, 0.05, Axis::X).unwrap();
        let max_off = (0.4f64 / 0.05).ceil() as i64 + 1;
        assert!(*k.offsets_1().start() >= -max_off && *k.offsets_1().end() <= max_off);
        assert!(*k.offsets_2().start() >= -max_off && *k.offsets_2().end() <= max_off);
        // samples outside the disk are exactly zero
        for q1 in k.offsets_1() {
            for q2 in k.offsets_2() {
                let (x, y) = ((0.5 - q1 as f64) * 0.05, -(q2 as f64) * 0.05);
                if x * x + y * y > 0.16 {
                    assert_eq!(k.weight(q1, q2), 0.0);
                }
            }
        }
    }

    #[test]
    fn crowd_bump_mass_near_one() {
        let spec = KernelSpec::crowd_bump(0.4).unwrap();
        let k = sample_kernel_2d(&spec, 0.0125, 0.0125, Axis::X).unwrap();
        assert!((k.mass() - 1.0).abs() < 0.01);
        let ky = sample_kernel_2d(&spec, 0.0125, 0.0125, Axis::Y).unwrap();
        assert!((ky.mass() - 1.0).abs() < 0.01);
    }

    #[test]
    fn mass_refines_toward_one() {
        let spec = KernelSpec::lwr(0.0625).unwrap();
        let coarse = sample_kernel_1d(&spec, 0.0625 / 5.0).unwrap();
        let fine = sample_kernel_1d(&spec, 0.0625 / 80.0).unwrap();
        assert!((fine.mass() - 1.0).abs() < (coarse.mass() - 1.0).abs());
    }
}
