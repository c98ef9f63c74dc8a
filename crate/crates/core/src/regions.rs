//! Nonnegativity of the zooplankton update, the trapping set
//! `M = {0 ≤ u ≤ 1, 0 ≤ v ≤ 2 − u}` and global convergence to the boundary.
//!
//! All checks here are sufficient conditions. A failed check means
//! "not certified", never "violated".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_points::{find_positive_fixed_points, psi2_critical_points};
use crate::model::{BaseParams, Holling, ModelParams, PlanktonState};

/// Membership predicate for M.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegionM;

impl RegionM {
    pub fn contains(&self, s: PlanktonState) -> bool {
        (0.0..=1.0).contains(&s.u) && s.v >= 0.0 && s.v <= 2.0 - s.u
    }
}

/// Which of the three h = 1 nonnegativity conditions matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VUpdateCondition {
    A,
    B,
    C,
}

/// First matching condition under which `v' ≥ 0` for all `u ∈ [0, 1]`,
/// `v ≥ 0` (h = 1 only).
///
/// * (a) `0 < r ≤ 1`, `θ ≤ 1 + β − r`
/// * (b) `0 < r < 1`, `1 + β − r < θ ≤ (1 + β − r)²/β`, `c ≥ θ/(1 + β − r) − 1`
/// * (c) `0 < r < 1`, `θ > (1 + β − r)²/β`, `c ≥ (√β − √θ)²/(1 − r)`
pub fn vupdate_nonneg_h1(params: &ModelParams) -> Result<Option<VUpdateCondition>> {
    if params.holling() != Holling::TypeII {
        return Err(Error::WrongHolling { expected: 1 });
    }
    let (b, r, t, c) = (params.beta(), params.r(), params.theta(), params.c());
    let k = 1.0 + b - r;

    if r <= 1.0 && t <= k {
        return Ok(Some(VUpdateCondition::A));
    }
    if r < 1.0 && k < t && t <= k * k / b && c >= t / k - 1.0 {
        return Ok(Some(VUpdateCondition::B));
    }
    if r < 1.0 && t > k * k / b && c >= (b.sqrt() - t.sqrt()).powi(2) / (1.0 - r) {
        return Ok(Some(VUpdateCondition::C));
    }
    Ok(None)
}

/// Bernstein coefficients of `ψ(u) = βcu³ − (rc − c + θ)u² + βu + 1 − r`,
/// which equals `(1 + cu²) v'/v` for h = 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCoeffs {
    pub omega: [f64; 4],
}

impl BernsteinCoeffs {
    pub fn new(params: &ModelParams) -> Self {
        let (b, r, t, c) = (params.beta(), params.r(), params.theta(), params.c());
        BernsteinCoeffs {
            omega: [
                1.0 - r,
                b / 3.0 + 1.0 - r,
                (2.0 * b - r * c + c - t) / 3.0 + 1.0 - r,
                (c + 1.0) * (1.0 - r + b) - t,
            ],
        }
    }

    /// Nonnegative coefficients certify `ψ ≥ 0` on [0, 1].
    pub fn all_nonnegative(&self) -> bool {
        self.omega.iter().all(|&w| w >= 0.0)
    }

    /// `Σ ωᵢ C(3,i) uⁱ (1 − u)³⁻ⁱ`.
    pub fn eval(&self, u: f64) -> f64 {
        const BINOM: [f64; 4] = [1.0, 3.0, 3.0, 1.0];
        let w = 1.0 - u;
        (0..4)
            .map(|i| self.omega[i] * BINOM[i] * u.powi(i as i32) * w.powi(3 - i as i32))
            .sum()
    }
}

/// `ψ(u)` in the monomial basis.
pub fn cubic_v_polynomial(params: &ModelParams, u: f64) -> f64 {
    let (b, r, t, c) = (params.beta(), params.r(), params.theta(), params.c());
    b * c * u.powi(3) - (r * c - c + t) * u * u + b * u + 1.0 - r
}

/// Bernstein coefficients for h = 2 and whether they certify nonnegativity.
pub fn bernstein_coeffs_h2(params: &ModelParams) -> Result<(BernsteinCoeffs, bool)> {
    if params.holling() != Holling::TypeIII {
        return Err(Error::WrongHolling { expected: 2 });
    }
    let coeffs = BernsteinCoeffs::new(params);
    let holds = coeffs.all_nonnegative();
    Ok((coeffs, holds))
}

/// Outcome of the applicable nonnegativity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum NonnegativityVerdict {
    /// h = 1 with the matching condition.
    Certified { condition: Option<VUpdateCondition> },
    /// No sufficient condition holds; nonnegativity is neither shown nor refuted.
    Inconclusive,
}

impl NonnegativityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, NonnegativityVerdict::Certified { .. })
    }
}

pub fn v_update_nonnegativity(params: &ModelParams) -> NonnegativityVerdict {
    let certified = match params.holling() {
        Holling::TypeII => vupdate_nonneg_h1(params).ok().flatten().map(Some),
        Holling::TypeIII => BernsteinCoeffs::new(params)
            .all_nonnegative()
            .then_some(None),
    };
    match certified {
        Some(condition) => NonnegativityVerdict::Certified { condition },
        None => NonnegativityVerdict::Inconclusive,
    }
}

/// Supremum of Ψₕ over `(r/β, 1]`, the smallest θ at which `v' ≤ v` on M.
///
/// For h = 1 it is Ψ₁(1). For h = 2 the interior maximum Ψ₂(û₁) can exceed
/// Ψ₂(1), in which case it is the binding value.
pub fn psi_supremum(base: &BaseParams) -> f64 {
    let at_one = base.psi_at_one();
    if base.holling() == Holling::TypeII || !base.admits_interior() {
        return at_one;
    }
    psi2_critical_points(base)
        .ok()
        .and_then(|roots| roots.u_hat_1)
        .map_or(at_one, |u1| at_one.max(base.psi_unchecked(u1)))
}

/// Whether `v' ≤ v` holds on all of M: β ≤ r, or θ ≥ sup Ψₕ.
pub fn v_decreasing_condition(params: &ModelParams) -> bool {
    let base = params.base();
    !base.admits_interior() || params.theta() >= psi_supremum(&base)
}

/// Sufficient conditions for M to be invariant under the map.
pub fn m_invariance_conditions(params: &ModelParams) -> bool {
    v_update_nonnegativity(params).holds() && v_decreasing_condition(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalAttractor {
    Origin,
    BoundaryU1,
    NotApplicable,
}

/// Limit of the orbit from `s0` when the invariance conditions certify it.
///
/// An interior fixed point inside M rules the prediction out, since that
/// point is itself a non-converging orbit.
pub fn global_attractor_prediction(params: &ModelParams, s0: PlanktonState) -> GlobalAttractor {
    if !m_invariance_conditions(params) || !RegionM.contains(s0) {
        return GlobalAttractor::NotApplicable;
    }
    if !find_positive_fixed_points(params).map_or(true, |pts| pts.is_empty()) {
        return GlobalAttractor::NotApplicable;
    }
    if s0.u == 0.0 {
        GlobalAttractor::Origin
    } else {
        GlobalAttractor::BoundaryU1
    }
}

/// Everything the region checks say about one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub params: ModelParams,
    pub nonnegativity: NonnegativityVerdict,
    pub bernstein: Option<BernsteinCoeffs>,
    pub v_decreasing: bool,
    pub m_invariant: bool,
    pub attractor_from_interior_start: GlobalAttractor,
}

pub fn region_report(params: &ModelParams) -> RegionReport {
    RegionReport {
        params: *params,
        nonnegativity: v_update_nonnegativity(params),
        bernstein: (params.holling() == Holling::TypeIII).then(|| BernsteinCoeffs::new(params)),
        v_decreasing: v_decreasing_condition(params),
        m_invariant: m_invariance_conditions(params),
        attractor_from_interior_start: global_attractor_prediction(
            params,
            PlanktonState { u: 0.5, v: 0.5 },
        ),
    }
}
