//! Numerical fluxes for the marching formula, the numerical entropy flux,
//! and CFL mesh-ratio bounds.

use crate::error::{Error, Result};
use crate::model::{FluxShape, Model};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FluxFamily {
    /// Central flux plus θ-scaled grid diffusion, θ ∈ (0, 2/3).
    LaxFriedrichs { theta: f64 },
    /// Nonlocal extension of the Godunov flux: a·F_Godunov(b, c).
    Godunov,
}

impl FluxFamily {
    pub fn validate(&self) -> Result<()> {
        if let FluxFamily::LaxFriedrichs { theta } = self {
            if !(*theta > 0.0 && *theta < 2.0 / 3.0) {
                return Err(Error::Config(format!(
                    "lax-friedrichs theta must lie in (0, 2/3), got {theta}"
                )));
            }
        }
        Ok(())
    }
}

/// Convex combination rule for the interface value u_{p+1/2} used inside the
/// convolution quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterfaceRule {
    Left,
    Mean,
    Right,
}

impl InterfaceRule {
    #[inline]
    pub fn combine(&self, left: f64, right: f64) -> f64 {
        match self {
            InterfaceRule::Left => left,
            InterfaceRule::Mean => 0.5 * (left + right),
            InterfaceRule::Right => right,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CflMode {
    /// Abort at run start when the configured λ exceeds the bound.
    Strict,
    /// Record the violation and proceed.
    Warn,
}

/// 1D scheme parameters: flux family, fixed mesh ratio λ = Δt/Δx,
/// reconstruction rule, and CFL enforcement.
#[derive(Clone, Copy, Debug)]
pub struct SchemeConfig {
    pub family: FluxFamily,
    pub lambda: f64,
    pub recon: InterfaceRule,
    pub cfl: CflMode,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "mesh ratio lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// 2D scheme parameters with per-axis mesh ratios.
#[derive(Clone, Copy, Debug)]
pub struct SchemeConfig2d {
    pub family: FluxFamily,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub recon: InterfaceRule,
    pub cfl: CflMode,
}

impl SchemeConfig2d {
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.lambda_x > 0.0 && self.lambda_y > 0.0) {
            return Err(Error::Config(
                "mesh ratios lambda_x, lambda_y must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Lax–Friedrichs type flux: (a/2)(f(b) + f(c)) − θ(c − b)/(2λ), where `a`
/// is the already-evaluated speed factor ν(c_{i+1/2}).
#[inline]
pub fn lax_friedrichs(m: &Model, a: f64, b: f64, c: f64, theta: f64, lambda: f64) -> f64 {
    (a / 2.0) * (m.f(b) + m.f(c)) - theta * (c - b) / (2.0 * lambda)
}

/// Godunov flux of the local law u_t + f(u)_x = 0: min of f on [a, b] when
/// a ≤ b, max of f on [b, a] otherwise.
pub fn godunov_local(m: &Model, a: f64, b: f64) -> f64 {
    if a == b {
        return m.f(a);
    }
    match m.shape {
        FluxShape::Monotone => m.f(a),
        FluxShape::Concave { crest } => {
            if a <= b {
                m.f(a).min(m.f(b))
            } else if b <= crest && crest <= a {
                m.f(crest)
            } else {
                m.f(a).max(m.f(b))
            }
        }
        FluxShape::General => {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            if a <= b {
                scan_extremum(|u| m.f(u), lo, hi, false)
            } else {
                scan_extremum(|u| m.f(u), lo, hi, true)
            }
        }
    }
}

/// Coarse scan plus golden-section refinement of an extremum of f on [lo, hi].
fn scan_extremum(f: impl Fn(f64) -> f64, lo: f64, hi: f64, maximize: bool) -> f64 {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |u: f64| sign * f(u);
    const SCAN: usize = 64;
    let h = (hi - lo) / SCAN as f64;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=SCAN {
        let v = g(lo + i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + h * best_i.saturating_sub(1) as f64;
    let mut b = (lo + h * (best_i + 1) as f64).min(hi);
    // golden-section on the bracketing interval
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..120 {
        if b - a < 1e-14 * (hi - lo).max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    let mid = 0.5 * (a + b);
    let v = g(mid).min(best).min(g(lo)).min(g(hi));
    sign * v
}

/// The interface flux 𝓕(ν(c), b, c) of the marching formula.
#[inline]
pub fn numerical_flux(m: &Model, family: FluxFamily, lambda: f64, nu_c: f64, b: f64, c: f64) -> f64 {
    match family {
        FluxFamily::LaxFriedrichs { theta } => lax_friedrichs(m, nu_c, b, c, theta, lambda),
        FluxFamily::Godunov => nu_c * godunov_local(m, b, c),
    }
}

/// Numerical entropy flux 𝓖(a, b, k) = 𝓕(a∨k, b∨k) − 𝓕(a∧k, b∧k).
#[inline]
pub fn entropy_flux(
    m: &Model,
    family: FluxFamily,
    lambda: f64,
    nu_c: f64,
    a: f64,
    b: f64,
    k: f64,
) -> f64 {
    numerical_flux(m, family, lambda, nu_c, a.max(k), b.max(k))
        - numerical_flux(m, family, lambda, nu_c, a.min(k), b.min(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

/// Largest admissible mesh ratio λ for monotonicity of the update.
///
/// Lax–Friedrichs: min(1, 4−6θ, 6θ)/(1 + 6·|f|_Lip·‖ν‖_∞) in both 1D and 2D
/// (per axis). Godunov: 1/(6·|f|_Lip·‖ν‖_∞) in 1D, 1/(2·…) per axis in 2D.
/// Returns +∞ when |f|_Lip·‖ν‖_∞ = 0 (the ratio is unconstrained).
pub fn max_mesh_ratio(family: FluxFamily, m: &Model, dim: Dim) -> f64 {
    let l = m.f_lip * m.nu_sup;
    if l == 0.0 {
        return f64::INFINITY;
    }
    match family {
        FluxFamily::LaxFriedrichs { theta } => {
            1f64.min(4.0 - 6.0 * theta).min(6.0 * theta) / (1.0 + 6.0 * l)
        }
        FluxFamily::Godunov => match dim {
            Dim::One => 1.0 / (6.0 * l),
            Dim::Two => 1.0 / (2.0 * l),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;

    fn lwr() -> Model {
        Model::builtin("nonlocal-lwr-1d").unwrap()
    }

    fn crowd() -> Model {
        Model::builtin("crowd-2d").unwrap()
    }

    #[test]
    fn lf_diffusion_vanishes_when_arguments_equal() {
        let m = lwr();
        for a in [0.0, 0.3, 1.0] {
            let v = lax_friedrichs(&m, a, 0.5, 0.5, 0.2, 0.1);
            assert!((v - a * m.f(0.5)).abs() < 1e-16);
        }
    }

    #[test]
    fn lf_matches_formula() {
        let m = lwr();
        let (a, b, c, theta, lambda) = (1.0, 0.2, 0.4, 1.0 / 3.0, 0.1286);
        let expect = (a / 2.0) * (b + c) - theta * (c - b) / (2.0 * lambda);
        assert_eq!(lax_friedrichs(&m, a, b, c, theta, lambda), expect);
        assert!((expect - (0.3 - 0.2 / (3.0 * 0.2572))).abs() < 1e-15);
        assert_eq!(lax_friedrichs(&m, 0.0, 0.0, 0.0, theta, lambda), 0.0);
    }

    #[test]
    fn godunov_monotone_flux_upwinds_left() {
        let m = lwr();
        for (a, b) in [(0.1, 0.9), (0.9, 0.1), (0.5, 0.5), (0.0, 1.0)] {
            assert_eq!(godunov_local(&m, a, b), a);
        }
    }

    #[test]
    fn godunov_concave_examples() {
        let m = crowd();
        assert!((godunov_local(&m, 0.8, 0.2) - 0.25).abs() < 1e-15);
        assert!((godunov_local(&m, 0.2, 0.9) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn godunov_general_matches_concave_closed_form() {
        // same f as the crowd model but with no shape hint
        fn f(u: f64) -> f64 {
            u * (1.0 - u)
        }
        fn one(_: f64) -> f64 {
            1.0
        }
        let gen =
            Model::new("gen", f, one, one, 1.0, 1.0, crate::model::FluxShape::General).unwrap();
        let exact = crowd();
        for (a, b) in [(0.8, 0.2), (0.2, 0.9), (0.45, 0.55), (0.7, 0.1), (0.0, 1.0)] {
            assert!(
                (godunov_local(&gen, a, b) - godunov_local(&exact, a, b)).abs() < 1e-9,
                "mismatch at ({a},{b})"
            );
        }
    }

    #[test]
    fn numerical_flux_families() {
        let m = lwr();
        let v = numerical_flux(&m, FluxFamily::Godunov, 0.1, 0.7, 0.3, 0.9);
        assert!((v - 0.21).abs() < 1e-15);
        let fam = FluxFamily::LaxFriedrichs { theta: 0.25 };
        let a = numerical_flux(&m, fam, 0.1, 0.4, 0.2, 0.8);
        let b = lax_friedrichs(&m, 0.4, 0.2, 0.8, 0.25, 0.1);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(numerical_flux(&m, fam, 0.1, 0.5, 0.0, 0.0), 0.0);
    }

    #[test]
    fn flux_consistency() {
        for m in [lwr(), crowd()] {
            for fam in [FluxFamily::LaxFriedrichs { theta: 1.0 / 3.0 }, FluxFamily::Godunov] {
                for u in [0.0, 0.25, 0.5, 0.9] {
                    for nu in [0.0, 0.3, 1.0] {
                        let v = numerical_flux(&m, fam, 0.1286, nu, u, u);
                        assert!((v - nu * m.f(u)).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn entropy_flux_lattice_identities() {
        let m = lwr();
        let fam = FluxFamily::LaxFriedrichs { theta: 1.0 / 3.0 };
        let lam = 0.1286;
        let (nu, a, b) = (0.8, 0.3, 0.6);
        // k below both arguments
        let g = entropy_flux(&m, fam, lam, nu, a, b, 0.1);
        let expect = numerical_flux(&m, fam, lam, nu, a, b) - numerical_flux(&m, fam, lam, nu, 0.1, 0.1);
        assert!((g - expect).abs() < 1e-15);
        // k above both arguments
        let g = entropy_flux(&m, fam, lam, nu, a, b, 0.9);
        let expect = numerical_flux(&m, fam, lam, nu, 0.9, 0.9) - numerical_flux(&m, fam, lam, nu, a, b);
        assert!((g - expect).abs() < 1e-15);
        // a = b = k
        assert_eq!(entropy_flux(&m, fam, lam, nu, 0.4, 0.4, 0.4), 0.0);
        // consistency at a = b = u
        let u = 0.35;
        let k = 0.2;
        let g = entropy_flux(&m, fam, lam, nu, u, u, k);
        assert!((g - nu * (m.f(u.max(k)) - m.f(u.min(k)))).abs() < 1e-14);
    }

    #[test]
    fn mesh_ratio_bounds() {
        let m = lwr();
        let lf = FluxFamily::LaxFriedrichs { theta: 1.0 / 3.0 };
        let b = max_mesh_ratio(lf, &m, Dim::One);
        assert!((b - 1.0 / 7.0).abs() < 1e-12);
        assert!(0.1286 < b);
        assert!((max_mesh_ratio(FluxFamily::Godunov, &m, Dim::One) - 1.0 / 6.0).abs() < 1e-15);
        assert!((max_mesh_ratio(FluxFamily::Godunov, &m, Dim::Two) - 0.5).abs() < 1e-15);
        fn zero(_: f64) -> f64 {
            0.0
        }
        let degenerate =
            Model::new("deg", zero, zero, zero, 0.0, 1.0, crate::model::FluxShape::General)
                .unwrap();
        assert!(max_mesh_ratio(lf, &degenerate, Dim::One).is_infinite());
    }

    #[test]
    fn theta_range_enforced() {
        assert!(FluxFamily::LaxFriedrichs { theta: 0.7 }.validate().is_err());
        assert!(FluxFamily::LaxFriedrichs { theta: 0.0 }.validate().is_err());
        assert!(FluxFamily::LaxFriedrichs { theta: 0.3333 }.validate().is_ok());
    }
}
