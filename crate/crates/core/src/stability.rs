//! Fixed-point classification through root location of the characteristic
//! quadratic `F(λ) = λ² + Bλ + C`.
//!
//! Interior points are classified from `(p, q)` with `F(λ) = λ² − pλ + q`,
//! using only the signs of `F(1)`, `F(−1)` and `C`. Eigenvalues are never
//! computed on this route.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_points::{FixedPointKind, FixedPointRecord};
use crate::model::ModelParams;
use crate::THRESHOLD_TOL;

/// Characteristic-data validation band on `|Ψₕ(u) − θ|`.
pub const FIXED_POINT_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityLabel {
    Attractive,
    Repelling,
    Saddle,
    Nonhyperbolic,
}

impl fmt::Display for StabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityLabel::Attractive => "attractive",
            StabilityLabel::Repelling => "repelling",
            StabilityLabel::Saddle => "saddle",
            StabilityLabel::Nonhyperbolic => "nonhyperbolic",
        })
    }
}

/// Where the second root sits when the first is pinned at 1 or above 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OtherRoot {
    Inside,
    OnCircle,
    Outside,
}

/// Outcomes of the root-location lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCase {
    /// F(1) > 0, F(−1) > 0, C < 1: |λ₁|, |λ₂| < 1.
    BothInside,
    /// F(1) > 0, F(−1) = 0, B ≠ 2: λ₁ = −1, λ₂ ≠ −1.
    OneRootMinusOne,
    /// F(1) > 0, F(−1) < 0: one root inside, one outside.
    InsideOutside,
    /// F(1) > 0, F(−1) > 0, C > 1: both outside.
    BothOutside,
    /// −2 < B < 2, C = 1: conjugate pair on the unit circle.
    ConjugateUnit,
    /// F(−1) = 0, B = 2: λ₁ = λ₂ = −1.
    DoubleMinusOne,
    /// F(1) = 0; the other root equals C.
    RootAtOne { other: OtherRoot },
    /// F(1) < 0: one root in (1, ∞); the other is placed by the sign of F(−1).
    RootAboveOne { other: OtherRoot },
}

impl RootCase {
    /// Fixed-point type implied by the eigenvalue moduli of this case.
    pub fn stability_label(self) -> StabilityLabel {
        use RootCase::*;
        match self {
            BothInside => StabilityLabel::Attractive,
            BothOutside => StabilityLabel::Repelling,
            InsideOutside => StabilityLabel::Saddle,
            RootAboveOne {
                other: OtherRoot::Inside,
            } => StabilityLabel::Saddle,
            RootAboveOne {
                other: OtherRoot::Outside,
            } => StabilityLabel::Repelling,
            RootAboveOne {
                other: OtherRoot::OnCircle,
            }
            | OneRootMinusOne
            | ConjugateUnit
            | DoubleMinusOne
            | RootAtOne { .. } => StabilityLabel::Nonhyperbolic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootLocation {
    pub case: RootCase,
    /// Roots of F, the one with nonpositive imaginary part (or smaller real
    /// part) first.
    #[serde(with = "crate::complex_repr::pair")]
    pub roots: [Complex64; 2],
}

impl RootLocation {
    pub fn stability_label(&self) -> StabilityLabel {
        self.case.stability_label()
    }
}

fn is_zero(x: f64) -> bool {
    x.abs() < THRESHOLD_TOL
}

fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new((-b - s) / 2.0, 0.0),
            Complex64::new((-b + s) / 2.0, 0.0),
        ]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(-b / 2.0, -s / 2.0),
            Complex64::new(-b / 2.0, s / 2.0),
        ]
    }
}

/// Locates the roots of `λ² + Bλ + C` relative to the unit circle.
///
/// Equalities are decided within [`THRESHOLD_TOL`].
pub fn quadratic_root_location(b: f64, c: f64) -> RootLocation {
    let f_one = 1.0 + b + c;
    let f_minus_one = 1.0 - b + c;

    let case = if is_zero(f_one) {
        let other = if is_zero(c.abs() - 1.0) {
            OtherRoot::OnCircle
        } else if c.abs() < 1.0 {
            OtherRoot::Inside
        } else {
            OtherRoot::Outside
        };
        RootCase::RootAtOne { other }
    } else if f_one > 0.0 {
        if is_zero(f_minus_one) {
            if is_zero(b - 2.0) {
                RootCase::DoubleMinusOne
            } else {
                RootCase::OneRootMinusOne
            }
        } else if f_minus_one < 0.0 {
            RootCase::InsideOutside
        } else if is_zero(c - 1.0) {
            RootCase::ConjugateUnit
        } else if c < 1.0 {
            RootCase::BothInside
        } else {
            RootCase::BothOutside
        }
    } else {
        let other = if is_zero(f_minus_one) {
            OtherRoot::OnCircle
        } else if f_minus_one < 0.0 {
            OtherRoot::Outside
        } else {
            OtherRoot::Inside
        };
        RootCase::RootAboveOne { other }
    };

    RootLocation {
        case,
        roots: quadratic_roots(b, c),
    }
}

/// `(p, q)` at an interior point without validating that it is fixed.
pub(crate) fn characteristic_pq(params: &ModelParams, u: f64) -> (f64, f64) {
    let p = 2.0 - u;
    let q =
        1.0 - u + u * (1.0 - u) * (params.beta() - params.theta() * params.response_derivative(u));
    (p, q)
}

/// `p = 2 − ũ` and `q = 1 − ũ + ũ(1 − ũ)(β − θhũʰ⁻¹/(1 + cũʰ)²)` at an
/// interior fixed point ũ. The characteristic polynomial there is `λ² − pλ + q`.
pub fn characteristic_data(params: &ModelParams, u_star: f64) -> Result<(f64, f64)> {
    let psi = params.base().psi(u_star)?;
    let residual = (psi - params.theta()).abs();
    if residual >= FIXED_POINT_RESIDUAL_TOL {
        return Err(Error::NotAFixedPoint {
            u: u_star,
            residual,
        });
    }
    Ok(characteristic_pq(params, u_star))
}

/// Labels of (0, 0) and (1, 0).
pub fn classify_boundary(params: &ModelParams) -> (StabilityLabel, StabilityLabel) {
    let r = params.r();
    let origin = if is_zero(r - 2.0) {
        StabilityLabel::Nonhyperbolic
    } else if r < 2.0 {
        StabilityLabel::Saddle
    } else {
        StabilityLabel::Repelling
    };

    let lower = (params.beta() - r) * (1.0 + params.c());
    let upper = (2.0 + params.beta() - r) * (1.0 + params.c());
    let theta = params.theta();
    let u1 = if is_zero(theta - lower) || is_zero(theta - upper) {
        StabilityLabel::Nonhyperbolic
    } else if lower < theta && theta < upper {
        StabilityLabel::Attractive
    } else {
        StabilityLabel::Saddle
    };
    (origin, u1)
}

/// Root location of `λ² − pλ + q` at an interior fixed point.
pub fn interior_root_location(params: &ModelParams, u_star: f64) -> Result<RootLocation> {
    let (p, q) = characteristic_data(params, u_star)?;
    Ok(quadratic_root_location(-p, q))
}

pub fn classify_interior(
    params: &ModelParams,
    record: &FixedPointRecord,
) -> Result<StabilityLabel> {
    if record.kind != FixedPointKind::Interior {
        return Err(Error::InvalidSpec(format!(
            "classify_interior needs an interior record, got {:?}",
            record.kind
        )));
    }
    Ok(interior_root_location(params, record.point.u)?.stability_label())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_points::find_positive_fixed_points;
    use crate::model::{jacobian, PlanktonState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lemma_agrees_with_root_moduli() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut checked = 0;
        while checked < 1000 {
            let b: f64 = rng.gen_range(-4.0..4.0);
            let c: f64 = rng.gen_range(-3.0..3.0);
            let sq = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
            let moduli = [((-b + sq) / 2.0).norm(), ((-b - sq) / 2.0).norm()];
            if moduli.iter().any(|m| (m - 1.0).abs() < 1e-6) {
                continue;
            }
            checked += 1;
            let inside = moduli.iter().filter(|&&m| m < 1.0).count();
            let expected = match inside {
                2 => StabilityLabel::Attractive,
                0 => StabilityLabel::Repelling,
                _ => StabilityLabel::Saddle,
            };
            assert_eq!(
                quadratic_root_location(b, c).stability_label(),
                expected,
                "B={b} C={c}"
            );
        }
    }

    #[test]
    fn zero_polynomial_roots_inside() {
        let loc = quadratic_root_location(0.0, 0.0);
        assert_eq!(loc.case, RootCase::BothInside);
        assert_eq!(loc.roots[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_pair_on_unit_circle() {
        let loc = quadratic_root_location(-1.6204, 1.0);
        assert_eq!(loc.case, RootCase::ConjugateUnit);
        for z in loc.roots {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(loc.stability_label(), StabilityLabel::Nonhyperbolic);
    }

    #[test]
    fn root_above_one_other_inside() {
        let loc = quadratic_root_location(-3.0, 1.0);
        assert_eq!(
            loc.case,
            RootCase::RootAboveOne {
                other: OtherRoot::Inside
            }
        );
        let (lo, hi) = ((3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0);
        assert!((loc.roots[0].re - lo).abs() < 1e-12);
        assert!((loc.roots[1].re - hi).abs() < 1e-12);
        assert_eq!(loc.stability_label(), StabilityLabel::Saddle);
    }

    #[test]
    fn equality_branches() {
        // (λ + 1)²
        assert_eq!(
            quadratic_root_location(2.0, 1.0).case,
            RootCase::DoubleMinusOne
        );
        // (λ + 1)(λ − 0.5)
        assert_eq!(
            quadratic_root_location(0.5, -0.5).case,
            RootCase::OneRootMinusOne
        );
        // (λ − 1)(λ − 0.5)
        assert_eq!(
            quadratic_root_location(-1.5, 0.5).case,
            RootCase::RootAtOne {
                other: OtherRoot::Inside
            }
        );
        // (λ − 1)(λ + 1)
        assert_eq!(
            quadratic_root_location(0.0, -1.0).case,
            RootCase::RootAtOne {
                other: OtherRoot::OnCircle
            }
        );
        // (λ − 2)(λ + 1)
        assert_eq!(
            quadratic_root_location(-1.0, -2.0).case,
            RootCase::RootAboveOne {
                other: OtherRoot::OnCircle
            }
        );
        // (λ − 2)(λ + 3)
        assert_eq!(
            quadratic_root_location(1.0, -6.0).case,
            RootCase::RootAboveOne {
                other: OtherRoot::Outside
            }
        );
        // (λ − 0.5)(λ + 2)
        assert_eq!(
            quadratic_root_location(1.5, -1.0).case,
            RootCase::InsideOutside
        );
        // (λ − 2)(λ − 3)
        assert_eq!(
            quadratic_root_location(-5.0, 6.0).case,
            RootCase::BothOutside
        );
    }

    #[test]
    fn boundary_labels() {
        let p = ModelParams::new(2.0, 0.5, 1.2012, 2.0, 1).unwrap();
        assert_eq!(
            classify_boundary(&p),
            (StabilityLabel::Saddle, StabilityLabel::Saddle)
        );
        let p = ModelParams::new(2.0, 0.5, 5.0, 2.0, 1).unwrap();
        assert_eq!(classify_boundary(&p).1, StabilityLabel::Attractive);
        let p = ModelParams::new(2.0, 0.5, 4.5, 2.0, 1).unwrap();
        assert_eq!(classify_boundary(&p).1, StabilityLabel::Nonhyperbolic);
        let p = ModelParams::new(2.0, 0.5, 10.5, 2.0, 1).unwrap();
        assert_eq!(classify_boundary(&p).1, StabilityLabel::Nonhyperbolic);
        let p = ModelParams::new(2.0, 2.0, 1.0, 2.0, 1).unwrap();
        assert_eq!(classify_boundary(&p).0, StabilityLabel::Nonhyperbolic);
        let p = ModelParams::new(3.0, 2.5, 1.0, 2.0, 1).unwrap();
        assert_eq!(classify_boundary(&p).0, StabilityLabel::Repelling);
    }

    fn interior(params: &ModelParams) -> Vec<FixedPointRecord> {
        find_positive_fixed_points(params).unwrap()
    }

    #[test]
    fn h1_interior_labels_from_captions() {
        let p = ModelParams::new(2.0, 0.5, 1.205, 2.0, 1).unwrap();
        let rec = interior(&p)[0];
        assert!((rec.char_q - 0.9995).abs() < 1e-4);
        assert_eq!(
            classify_interior(&p, &rec).unwrap(),
            StabilityLabel::Attractive
        );

        let p = ModelParams::new(2.0, 0.5, 1.12, 2.0, 1).unwrap();
        let rec = interior(&p)[0];
        assert!((rec.char_q - 1.01039).abs() < 1e-5);
        assert_eq!(
            classify_interior(&p, &rec).unwrap(),
            StabilityLabel::Repelling
        );
    }

    #[test]
    fn three_point_configuration_labels() {
        let p = ModelParams::new(3.0, 0.5, 4.95, 1.0, 2).unwrap();
        let recs = interior(&p);
        assert_eq!(recs.len(), 3);
        assert_eq!(
            classify_interior(&p, &recs[1]).unwrap(),
            StabilityLabel::Saddle
        );
        assert_eq!(
            classify_interior(&p, &recs[2]).unwrap(),
            StabilityLabel::Attractive
        );
    }

    #[test]
    fn pq_are_trace_and_determinant() {
        for (params, u) in [
            (ModelParams::new(2.0, 0.5, 1.2012, 2.0, 1).unwrap(), None),
            (ModelParams::new(2.0, 0.5, 1.03, 0.25, 2).unwrap(), None),
            (ModelParams::new(3.0, 0.5, 4.95, 1.0, 2).unwrap(), Some(1)),
        ] {
            let rec = interior(&params)[u.unwrap_or(0)];
            let (p, q) = characteristic_data(&params, rec.point.u).unwrap();
            let j = jacobian(&params, rec.point);
            assert!((p - j.trace()).abs() < 1e-10);
            assert!((q - j.determinant()).abs() < 1e-10);
        }
    }

    #[test]
    fn characteristic_data_rejects_non_fixed_point() {
        let p = ModelParams::new(2.0, 0.5, 1.2012, 2.0, 1).unwrap();
        assert!(matches!(
            characteristic_data(&p, 0.5),
            Err(Error::NotAFixedPoint { .. })
        ));
        assert!(characteristic_data(&p, 1.0).is_err());
    }

    #[test]
    fn classify_interior_rejects_boundary_record() {
        let p = ModelParams::new(2.0, 0.5, 1.2012, 2.0, 1).unwrap();
        let [origin, _] = crate::fixed_points::boundary_fixed_points(&p);
        assert!(classify_interior(&p, &origin).is_err());
        assert_eq!(origin.point, PlanktonState::ORIGIN);
    }
}
