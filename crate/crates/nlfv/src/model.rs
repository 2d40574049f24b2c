//! Scalar model triples (f, ν, β) and the bounds the CFL formulas need.
//!
//! The flux of the conservation law is f(u)·ν(μ∗β(u)): `f` is the local flux
//! factor, `beta` transforms the density inside the convolution, and `nu`
//! maps the convolved value to a speed factor.

use crate::error::{Error, Result};

/// Selector for [`Model::eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    F,
    Nu,
    Beta,
}

/// Shape information about `f`, used to evaluate the Godunov flux in closed
/// form where possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FluxShape {
    /// f nondecreasing on the value range; Godunov reduces to upwind.
    Monotone,
    /// f concave with a single crest at `crest`.
    Concave { crest: f64 },
    /// No structure assumed; extrema are located numerically.
    General,
}

/// The triple (f, ν, β) plus the Lipschitz/sup bounds valid on the value
/// range the run actually reaches. Immutable and `Copy`; safe to share
/// across workers.
#[derive(Clone, Copy, Debug)]
pub struct Model {
    pub name: &'static str,
    f: fn(f64) -> f64,
    nu: fn(f64) -> f64,
    beta: fn(f64) -> f64,
    /// Lipschitz bound |f|_Lip on the reachable value range.
    pub f_lip: f64,
    /// Bound ‖ν‖_∞ on the reachable convolution range.
    pub nu_sup: f64,
    pub shape: FluxShape,
}

pub const BUILTIN_MODEL_NAMES: [&str; 2] = ["nonlocal-lwr-1d", "crowd-2d"];

fn lwr_f(u: f64) -> f64 {
    u
}
fn lwr_nu(r: f64) -> f64 {
    1.0 - r
}
fn id(r: f64) -> f64 {
    r
}
fn crowd_f(u: f64) -> f64 {
    u * (1.0 - u)
}
fn crowd_beta(u: f64) -> f64 {
    1.0 - u
}

impl Model {
    /// Construct a custom model. `f(0) = 0` is required; the bounds are
    /// trusted but cross-checked by dense sampling in `check` mode.
    pub fn new(
        name: &'static str,
        f: fn(f64) -> f64,
        nu: fn(f64) -> f64,
        beta: fn(f64) -> f64,
        f_lip: f64,
        nu_sup: f64,
        shape: FluxShape,
    ) -> Result<Self> {
        if f(0.0) != 0.0 {
            return Err(Error::Config(format!(
                "model {name}: f(0) must be 0, got {}",
                f(0.0)
            )));
        }
        if !(f_lip.is_finite() && f_lip >= 0.0 && nu_sup.is_finite() && nu_sup >= 0.0) {
            return Err(Error::Config(format!(
                "model {name}: f_lip and nu_sup must be finite and nonnegative"
            )));
        }
        Ok(Model {
            name,
            f,
            nu,
            beta,
            f_lip,
            nu_sup,
            shape,
        })
    }

    /// Look up one of the built-in models.
    ///
    /// `nonlocal-lwr-1d`: f(u) = u, ν(r) = 1 − r, β(r) = r.
    /// `crowd-2d`: f(u) = u(1 − u), ν(r) = r, β(u) = 1 − u, so that
    /// ν(μ∗β(u)) = 1 − μ∗u for a unit-mass kernel.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "nonlocal-lwr-1d" => Model::new(
                "nonlocal-lwr-1d",
                lwr_f,
                lwr_nu,
                id,
                1.0,
                1.0,
                FluxShape::Monotone,
            ),
            "crowd-2d" => Model::new(
                "crowd-2d",
                crowd_f,
                id,
                crowd_beta,
                1.0,
                1.0,
                FluxShape::Concave { crest: 0.5 },
            ),
            other => Err(Error::Config(format!(
                "unknown model '{other}'; valid choices: {}",
                BUILTIN_MODEL_NAMES.join(", ")
            ))),
        }
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    #[inline]
    pub fn nu(&self, r: f64) -> f64 {
        (self.nu)(r)
    }

    #[inline]
    pub fn beta(&self, u: f64) -> f64 {
        (self.beta)(u)
    }

    pub fn eval(&self, which: Func, u: f64) -> f64 {
        match which {
            Func::F => self.f(u),
            Func::Nu => self.nu(u),
            Func::Beta => self.beta(u),
        }
    }
}
