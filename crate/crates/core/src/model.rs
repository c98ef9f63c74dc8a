//! The map, its Jacobian and the fixed-point curve Ψₕ.
//!
//! Every formula used downstream is defined once here.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent of the toxin-release response `uʰ / (1 + cuʰ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Holling {
    /// h = 1, saturating response `u / (1 + cu)`.
    TypeII,
    /// h = 2, sigmoid response `u² / (1 + cu²)`.
    TypeIII,
}

impl Holling {
    pub fn exponent(self) -> u32 {
        match self {
            Holling::TypeII => 1,
            Holling::TypeIII => 2,
        }
    }
}

impl TryFrom<u32> for Holling {
    type Error = Error;

    fn try_from(h: u32) -> Result<Self> {
        match h {
            1 => Ok(Holling::TypeII),
            2 => Ok(Holling::TypeIII),
            other => Err(Error::InvalidHolling(other)),
        }
    }
}

impl From<Holling> for u32 {
    fn from(h: Holling) -> u32 {
        h.exponent()
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}

/// The parameters of the map without the toxin liberation rate θ.
///
/// θ is the bifurcation parameter, so the curve Ψₕ, the Neimark–Sacker
/// solver and θ-sweeps all work from this reduced tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBase", into = "RawBase")]
pub struct BaseParams {
    beta: f64,
    r: f64,
    c: f64,
    holling: Holling,
}

#[derive(Serialize, Deserialize)]
struct RawBase {
    beta: f64,
    r: f64,
    c: f64,
    h: u32,
}

impl TryFrom<RawBase> for BaseParams {
    type Error = Error;
    fn try_from(raw: RawBase) -> Result<Self> {
        BaseParams::new(raw.beta, raw.r, raw.c, raw.h)
    }
}

impl From<BaseParams> for RawBase {
    fn from(p: BaseParams) -> Self {
        RawBase {
            beta: p.beta,
            r: p.r,
            c: p.c,
            h: p.holling.exponent(),
        }
    }
}

impl BaseParams {
    pub fn new(beta: f64, r: f64, c: f64, h: u32) -> Result<Self> {
        require_positive("beta", beta)?;
        require_positive("r", r)?;
        require_positive("c", c)?;
        let holling = Holling::try_from(h)?;
        Ok(Self {
            beta,
            r,
            c,
            holling,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn holling(&self) -> Holling {
        self.holling
    }

    pub fn h(&self) -> u32 {
        self.holling.exponent()
    }

    pub fn with_theta(self, theta: f64) -> Result<ModelParams> {
        require_positive("theta", theta)?;
        Ok(ModelParams { base: self, theta })
    }

    /// Whether interior fixed points are possible at all (β > r).
    pub fn admits_interior(&self) -> bool {
        self.beta > self.r
    }

    /// `Ψₕ(1) = (1 + c)(β − r)`, the value of θ at which an interior branch
    /// meets the boundary point (1, 0).
    pub fn psi_at_one(&self) -> f64 {
        (1.0 + self.c) * (self.beta - self.r)
    }

    /// `Ψₕ(u) = (βu − r)(1 + cuʰ) / uʰ` for `u ∈ (0, 1)`.
    pub fn psi(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::OutOfDomain {
                what: "u",
                value: u,
                domain: "(0, 1)",
            });
        }
        Ok(self.psi_unchecked(u))
    }

    /// Ψₕ without the domain check; used by scans that stay inside (0, 1]
    /// by construction.
    pub(crate) fn psi_unchecked(&self, u: f64) -> f64 {
        let uh = u.powi(self.h() as i32);
        (self.beta * u - self.r) * (1.0 + self.c * uh) / uh
    }

    /// `Ψₕ'(u)`; for h = 2 its numerator is the cubic `f(u) = βcu³ − βu + 2r`.
    pub fn psi_derivative(&self, u: f64) -> f64 {
        match self.holling {
            Holling::TypeII => (self.beta * self.c * u * u + self.r) / (u * u),
            Holling::TypeIII => self.critical_cubic(u) / u.powi(3),
        }
    }

    /// `f(u) = βcu³ − βu + 2r`, whose positive roots are the critical points of Ψ₂.
    pub fn critical_cubic(&self, u: f64) -> f64 {
        self.beta * self.c * u.powi(3) - self.beta * u + 2.0 * self.r
    }
}

/// The full parameter tuple (β, r, θ, c, h).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    base: BaseParams,
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    beta: f64,
    r: f64,
    theta: f64,
    c: f64,
    h: u32,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.beta, raw.r, raw.theta, raw.c, raw.h)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            beta: p.beta(),
            r: p.r(),
            theta: p.theta,
            c: p.c(),
            h: p.h(),
        }
    }
}

impl ModelParams {
    pub fn new(beta: f64, r: f64, theta: f64, c: f64, h: u32) -> Result<Self> {
        BaseParams::new(beta, r, c, h)?.with_theta(theta)
    }

    pub fn base(&self) -> BaseParams {
        self.base
    }

    pub fn beta(&self) -> f64 {
        self.base.beta
    }

    pub fn r(&self) -> f64 {
        self.base.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c(&self) -> f64 {
        self.base.c
    }

    pub fn holling(&self) -> Holling {
        self.base.holling
    }

    pub fn h(&self) -> u32 {
        self.base.h()
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        self.base.with_theta(theta)
    }

    /// Toxin-release response `g(u) = uʰ / (1 + cuʰ)`.
    pub fn response(&self, u: f64) -> f64 {
        let uh = u.powi(self.h() as i32);
        uh / (1.0 + self.c() * uh)
    }

    /// `g'(u) = h uʰ⁻¹ / (1 + cuʰ)²`.
    pub fn response_derivative(&self, u: f64) -> f64 {
        let h = self.h() as i32;
        let uh = u.powi(h);
        let denom = 1.0 + self.c() * uh;
        h as f64 * u.powi(h - 1) / (denom * denom)
    }

    /// Per-capita zooplankton growth factor `v'/v = βu + 1 − r − θ g(u)`.
    pub fn zooplankton_factor(&self, u: f64) -> f64 {
        self.beta() * u + 1.0 - self.r() - self.theta * self.response(u)
    }
}

/// A point (u, v) in population space.
///
/// Fields are public because map images may leave the nonnegative quadrant;
/// use [`PlanktonState::new`] when the input must be a valid population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanktonState {
    pub u: f64,
    pub v: f64,
}

impl PlanktonState {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if u >= 0.0 && v >= 0.0 {
            Ok(Self { u, v })
        } else {
            Err(Error::NegativeState { u, v })
        }
    }

    pub const ORIGIN: PlanktonState = PlanktonState { u: 0.0, v: 0.0 };
    pub const BOUNDARY_U1: PlanktonState = PlanktonState { u: 1.0, v: 0.0 };

    pub fn is_nonnegative(&self) -> bool {
        self.u >= 0.0 && self.v >= 0.0
    }

    pub fn max_abs_diff(&self, other: &PlanktonState) -> f64 {
        (self.u - other.u).abs().max((self.v - other.v).abs())
    }

    pub fn distance(&self, other: &PlanktonState) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

/// One application of the map. Negative images are returned unchanged.
pub fn evaluate_map(params: &ModelParams, s: PlanktonState) -> PlanktonState {
    let PlanktonState { u, v } = s;
    let uh = u.powi(params.h() as i32);
    PlanktonState {
        u: u * (2.0 - u) - u * v,
        v: params.beta() * u * v + (1.0 - params.r()) * v
            - params.theta() * uh * v / (1.0 + params.c() * uh),
    }
}

/// Jacobian of the map at `s`.
pub fn jacobian(params: &ModelParams, s: PlanktonState) -> Matrix2<f64> {
    let PlanktonState { u, v } = s;
    Matrix2::new(
        2.0 - 2.0 * u - v,
        -u,
        params.beta() * v - params.theta() * params.response_derivative(u) * v,
        params.zooplankton_factor(u),
    )
}

/// `Ψₕ(u)` for the parameters in `base`; see [`BaseParams::psi`].
pub fn psi(base: &BaseParams, u: f64) -> Result<f64> {
    base.psi(u)
}
