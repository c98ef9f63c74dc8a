//! Analysis and simulation of the discrete phytoplankton–zooplankton map
//!
//! ```text
//! u' = u(2 − u) − uv
//! v' = βuv + (1 − r)v − θuʰv / (1 + cuʰ),   h ∈ {1, 2}
//! ```
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] holds the map, its Jacobian and the fixed-point curve Ψₕ.
//! * [`fixed_points`] locates boundary and interior fixed points.
//! * [`stability`] classifies them through the quadratic root-location lemma.
//! * [`regions`] checks nonnegativity, the trapping set M and global convergence.
//! * [`bifurcation`] detects Neimark–Sacker points and computes the normal form
//!   up to the discriminating quantity 𝓛.
//! * [`dynamics`] iterates orbits, sweeps θ and estimates Lyapunov exponents.

pub mod bifurcation;
pub mod complex_repr;
pub mod dynamics;
pub mod error;
pub mod fixed_points;
pub mod model;
pub mod regions;
pub mod roots;
pub mod stability;

pub use bifurcation::{
    analyze_ns, CoefficientConvention, CurveStability, LyapunovCoefficients, NormalFormCoeffs,
    NsPoint, NsReport, TaylorCoeffs,
};
pub use dynamics::{Orbit, OrbitSpec, SweepResult};
pub use error::{Error, Result};
pub use fixed_points::{Branch, CubicRoots, FixedPointKind, FixedPointRecord, TheoremCase};
pub use model::{BaseParams, Holling, ModelParams, PlanktonState};
pub use regions::{BernsteinCoeffs, GlobalAttractor, RegionM, VUpdateCondition};
pub use stability::{RootCase, RootLocation, StabilityLabel};

/// Absolute band used when comparing against analytic equality thresholds.
pub const THRESHOLD_TOL: f64 = 1e-9;
