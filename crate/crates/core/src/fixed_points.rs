//! Existence, counting and location of fixed points.
//!
//! The boundary points (0, 0) and (1, 0) always exist. Interior points are
//! the solutions of `θ = Ψₕ(u)` with `u ∈ (0, 1)` and `v = 1 − u`. For h = 1
//! Ψ₁ is increasing and the solution is closed-form. For h = 2, Ψ₂ has up to
//! two critical points (roots of `f(u) = βcu³ − βu + 2r`) that split (0, 1)
//! into monotone segments, each bisected separately.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BaseParams, Holling, ModelParams, PlanktonState};
use crate::roots::{bisect, BISECTION_MAX_ITER, BISECTION_TOL};
use crate::stability::{self, StabilityLabel};
use crate::THRESHOLD_TOL;

/// Offset added to r/β for the left end of the Ψ₂ scan.
pub const SCAN_LEFT_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    Origin,
    BoundaryU1,
    Interior,
}

/// Position of an interior point relative to the critical points û₁ < û₂ of Ψ₂.
///
/// `Minus` lies left of û₁ (or is the only point when Ψ is monotone, which
/// covers h = 1), `Zero` between û₁ and û₂, `Plus` right of û₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "E-")]
    Minus,
    #[serde(rename = "E0")]
    Zero,
    #[serde(rename = "E+")]
    Plus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Minus => "E-",
            Branch::Zero => "E0",
            Branch::Plus => "E+",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub point: PlanktonState,
    pub kind: FixedPointKind,
    pub branch: Option<Branch>,
    /// Set when θ touches a local extremum of Ψ₂ (double root).
    pub tangent: bool,
    /// Trace of the Jacobian; equals `2 − ũ` at interior points.
    pub char_p: f64,
    /// Determinant of the Jacobian.
    pub char_q: f64,
    pub label: Option<StabilityLabel>,
}

impl FixedPointRecord {
    fn boundary(params: &ModelParams, kind: FixedPointKind) -> Self {
        let point = match kind {
            FixedPointKind::Origin => PlanktonState::ORIGIN,
            _ => PlanktonState::BOUNDARY_U1,
        };
        let j = crate::model::jacobian(params, point);
        FixedPointRecord {
            point,
            kind,
            branch: None,
            tangent: false,
            char_p: j.trace(),
            char_q: j.determinant(),
            label: None,
        }
    }

    fn interior(params: &ModelParams, u: f64, branch: Branch, tangent: bool) -> Self {
        let (p, q) = stability::characteristic_pq(params, u);
        FixedPointRecord {
            point: PlanktonState { u, v: 1.0 - u },
            kind: FixedPointKind::Interior,
            branch: Some(branch),
            tangent,
            char_p: p,
            char_q: q,
            label: None,
        }
    }
}

/// Records for (0, 0) and (1, 0), in that order.
pub fn boundary_fixed_points(params: &ModelParams) -> [FixedPointRecord; 2] {
    [
        FixedPointRecord::boundary(params, FixedPointKind::Origin),
        FixedPointRecord::boundary(params, FixedPointKind::BoundaryU1),
    ]
}

/// Closed-form unique positive fixed point for h = 1, present iff β > r and
/// θ < (β − r)(1 + c).
pub fn interior_fixed_point_h1(params: &ModelParams) -> Result<Option<FixedPointRecord>> {
    if params.holling() != Holling::TypeII {
        return Err(Error::WrongHolling { expected: 1 });
    }
    let (b, r, t, c) = (params.beta(), params.r(), params.theta(), params.c());
    if b <= r || t >= params.base().psi_at_one() {
        return Ok(None);
    }
    let disc = (b - r * c - t).powi(2) + 4.0 * r * c * b;
    let u = (r * c + t - b + disc.sqrt()) / (2.0 * c * b);
    if !(u > 0.0 && u < 1.0) {
        return Ok(None);
    }
    Ok(Some(FixedPointRecord::interior(
        params,
        u,
        Branch::Minus,
        false,
    )))
}

/// Critical points û₁ < û₂ of Ψ₂ inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CubicRoots {
    pub u_hat_1: Option<f64>,
    pub u_hat_2: Option<f64>,
}

impl CubicRoots {
    pub fn iter(&self) -> impl Iterator<Item = f64> {
        self.u_hat_1.into_iter().chain(self.u_hat_2)
    }

    pub fn count(&self) -> usize {
        self.iter().count()
    }

    fn branch_of(&self, u: f64) -> Branch {
        match (self.u_hat_1, self.u_hat_2) {
            (Some(u1), _) if u < u1 => Branch::Minus,
            (Some(_), Some(u2)) if u > u2 => Branch::Plus,
            (Some(_), _) => Branch::Zero,
            (None, _) => Branch::Minus,
        }
    }
}

fn require_h2_and_regime(base: &BaseParams) -> Result<()> {
    if base.holling() != Holling::TypeIII {
        return Err(Error::WrongHolling { expected: 2 });
    }
    if !base.admits_interior() {
        return Err(Error::NoPositiveRegime {
            beta: base.beta(),
            r: base.r(),
        });
    }
    Ok(())
}

/// Roots of `f(u) = βcu³ − βu + 2r` in (0, 1).
///
/// f(0) = 2r > 0 and f has a single positive local minimum at 1/√(3c), so
/// evaluating f at 0, at the minimum (when inside (0, 1)) and at 1 is enough
/// to bracket every root.
pub fn psi2_critical_points(base: &BaseParams) -> Result<CubicRoots> {
    require_h2_and_regime(base)?;
    let f = |u: f64| base.critical_cubic(u);
    let u_min = 1.0 / (3.0 * base.c()).sqrt();
    let mut roots = CubicRoots::default();

    if u_min < 1.0 {
        if f(u_min) < 0.0 {
            roots.u_hat_1 = Some(bisect(f, 0.0, u_min, BISECTION_TOL, BISECTION_MAX_ITER)?);
            if f(1.0) > 0.0 {
                roots.u_hat_2 = Some(bisect(f, u_min, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)?);
            }
        }
    } else if f(1.0) < 0.0 {
        roots.u_hat_1 = Some(bisect(f, 0.0, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)?);
    }
    Ok(roots)
}

/// Subcases of the h = 2 existence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremCase {
    NoPositiveFixedPoint,
    #[serde(rename = "i.1")]
    I1,
    #[serde(rename = "i.2")]
    I2,
    #[serde(rename = "i.3")]
    I3,
    #[serde(rename = "ii.1")]
    II1,
    #[serde(rename = "ii.2")]
    II2,
    #[serde(rename = "ii.3")]
    II3,
    #[serde(rename = "ii.4")]
    II4,
    #[serde(rename = "ii.5")]
    II5,
    /// The parameters fall in a gap of the theorem's partition.
    NoMatchingSubcase,
}

impl TheoremCase {
    /// The number of positive fixed points the theorem states for this subcase.
    pub fn stated_count(self) -> Option<usize> {
        use TheoremCase::*;
        match self {
            NoPositiveFixedPoint => Some(0),
            I1 | I2 | II1 | II2 | II4 => Some(1),
            I3 | II3 => Some(2),
            II5 => Some(3),
            NoMatchingSubcase => None,
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TheoremCase::*;
        f.write_str(match self {
            NoPositiveFixedPoint => "no-positive-fixed-point",
            I1 => "i.1",
            I2 => "i.2",
            I3 => "i.3",
            II1 => "ii.1",
            II2 => "ii.2",
            II3 => "ii.3",
            II4 => "ii.4",
            II5 => "ii.5",
            NoMatchingSubcase => "no-matching-subcase",
        })
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < THRESHOLD_TOL
}

/// Evaluates the theorem's inequalities literally.
pub fn classify_theorem_case(params: &ModelParams) -> Result<TheoremCase> {
    if params.holling() != Holling::TypeIII {
        return Err(Error::WrongHolling { expected: 2 });
    }
    let base = params.base();
    if !base.admits_interior() {
        return Ok(TheoremCase::NoPositiveFixedPoint);
    }
    let (b, r, c, t) = (params.beta(), params.r(), params.c(), params.theta());
    let crit = psi2_critical_points(&base)?;
    let psi1 = crit.u_hat_1.map(|u| base.psi_unchecked(u));
    let psi2 = crit.u_hat_2.map(|u| base.psi_unchecked(u));
    let at_one = base.psi_at_one();
    let slope_threshold = (b - 2.0 * r) / b;
    let min_threshold = b * b / (27.0 * r * r);

    let eq1 = psi1.is_some_and(|p| near(t, p));
    let eq2 = psi2.is_some_and(|p| near(t, p));
    let between_one_and_max = psi1.is_some_and(|p| at_one < t && t < p && !near(t, p));

    let case = if c <= 1.0 / 3.0 {
        if c >= slope_threshold && t < at_one {
            TheoremCase::I1
        } else if c < slope_threshold && eq1 {
            TheoremCase::I2
        } else if c < slope_threshold && between_one_and_max {
            TheoremCase::I3
        } else {
            TheoremCase::NoMatchingSubcase
        }
    } else if c >= min_threshold && t < at_one {
        TheoremCase::II1
    } else if c <= slope_threshold && eq1 {
        TheoremCase::II2
    } else if c < slope_threshold && between_one_and_max {
        TheoremCase::II3
    } else if slope_threshold < c && c < min_threshold && (eq1 || eq2) {
        TheoremCase::II4
    } else if slope_threshold < c
        && c < min_threshold
        && psi1
            .zip(psi2)
            .is_some_and(|(p1, p2)| p2 < t && t < p1 && !eq1 && !eq2)
    {
        TheoremCase::II5
    } else {
        TheoremCase::NoMatchingSubcase
    };
    Ok(case)
}

/// Interior fixed points for h = 2, ascending in u.
fn interior_fixed_points_h2(params: &ModelParams) -> Result<Vec<FixedPointRecord>> {
    let base = params.base();
    let theta = params.theta();
    let crit = psi2_critical_points(&base)?;
    let lo = base.r() / base.beta() + SCAN_LEFT_OFFSET;
    let g = |u: f64| base.psi_unchecked(u) - theta;

    // Segment nodes: left scan end, critical points right of it, and u = 1.
    let mut nodes: Vec<(f64, bool)> = vec![(lo, false)];
    for u in crit.iter().filter(|&u| u > lo) {
        nodes.push((u, near(base.psi_unchecked(u), theta)));
    }
    nodes.push((1.0, false));

    let mut out = Vec::new();
    for pair in nodes.windows(2) {
        let (a, a_tangent) = pair[0];
        let (b, b_tangent) = pair[1];
        if a_tangent {
            out.push(FixedPointRecord::interior(
                params,
                a,
                crit.branch_of(a),
                true,
            ));
        }
        // Ψ₂ is monotone on [a, b]: a tangent endpoint is the segment's only root.
        if a_tangent || b_tangent {
            continue;
        }
        if g(a) * g(b) < 0.0 {
            // Run to machine precision: Ψ₂ is steep near r/β, and a 1e-12 width
            // there still leaves a visible residual.
            let u = bisect(g, a, b, 0.0, BISECTION_MAX_ITER)?;
            out.push(FixedPointRecord::interior(
                params,
                u,
                crit.branch_of(u),
                false,
            ));
        }
    }
    Ok(out)
}

/// All interior fixed points, ascending in u. Empty when β ≤ r.
pub fn find_positive_fixed_points(params: &ModelParams) -> Result<Vec<FixedPointRecord>> {
    if !params.base().admits_interior() {
        return Ok(Vec::new());
    }
    match params.holling() {
        Holling::TypeII => Ok(interior_fixed_point_h1(params)?.into_iter().collect()),
        Holling::TypeIII => interior_fixed_points_h2(params),
    }
}

/// Number of positive fixed points for h = 2 together with the theorem subcase.
///
/// The count comes from the monotone-segment analysis, so it stays correct
/// where the theorem's partition has gaps.
pub fn count_positive_fixed_points(params: &ModelParams) -> Result<(usize, TheoremCase)> {
    let case = classify_theorem_case(params)?;
    if case == TheoremCase::NoPositiveFixedPoint {
        return Ok((0, case));
    }
    Ok((interior_fixed_points_h2(params)?.len(), case))
}

/// Boundary and interior records with stability labels filled in.
pub fn all_fixed_points(params: &ModelParams) -> Result<Vec<FixedPointRecord>> {
    let (origin_label, u1_label) = stability::classify_boundary(params);
    let [mut origin, mut u1] = boundary_fixed_points(params);
    origin.label = Some(origin_label);
    u1.label = Some(u1_label);
    let mut out = vec![origin, u1];
    for mut rec in find_positive_fixed_points(params)? {
        rec.label = Some(stability::classify_interior(params, &rec)?);
        out.push(rec);
    }
    Ok(out)
}
