//! Neimark–Sacker points along the interior fixed-point curve and the
//! normal-form computation down to the discriminating quantity 𝓛.
//!
//! θ is the only bifurcation parameter. At a Neimark–Sacker point the
//! Jacobian at the interior fixed point has determinant one, so both
//! multipliers lie on the unit circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BaseParams;
use crate::roots::{bisect, scan_brackets, BISECTION_MAX_ITER, BISECTION_TOL};

/// Grid cells used to bracket roots of the Neimark–Sacker residual.
pub const NS_SCAN_CELLS: usize = 10_000;
/// Offset from the ends of the admissible u interval.
pub const NS_SCAN_MARGIN: f64 = 1e-9;
/// Margin for the strong-resonance check λᵐ ≠ 1.
pub const RESONANCE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsPoint {
    pub theta0: f64,
    pub u_tilde: f64,
    pub v_tilde: f64,
}

/// θ for which `q(u) = 1`, i.e. `(β − 1/(1 − u))(1 + cuʰ)²/(huʰ⁻¹)`.
fn theta_unit_determinant(base: &BaseParams, u: f64) -> f64 {
    let h = base.h() as i32;
    let d = 1.0 + base.c() * u.powi(h);
    (base.beta() - 1.0 / (1.0 - u)) * d * d / (h as f64 * u.powi(h - 1))
}

/// All Neimark–Sacker points, ascending in ũ.
///
/// Both θ = Ψₕ(u) > 0 and θ = θ_q(u) > 0 are needed, which confines u to
/// `(r/β, 1 − 1/β)`. The residual `Ψₕ − θ_q` is bracketed on a uniform grid
/// and each sign change is bisected.
pub fn solve_ns_points(base: &BaseParams) -> Result<Vec<NsPoint>> {
    if !base.admits_interior() {
        return Err(Error::NoPositiveRegime {
            beta: base.beta(),
            r: base.r(),
        });
    }
    let lo = base.r() / base.beta() + NS_SCAN_MARGIN;
    let hi = 1.0 - 1.0 / base.beta() - NS_SCAN_MARGIN;
    if lo >= hi {
        return Ok(Vec::new());
    }

    let residual = |u: f64| base.psi_unchecked(u) - theta_unit_determinant(base, u);
    let mut points = Vec::new();
    for (a, b) in scan_brackets(residual, lo, hi, NS_SCAN_CELLS) {
        let u = if a == b {
            a
        } else {
            bisect(residual, a, b, BISECTION_TOL, BISECTION_MAX_ITER)?
        };
        let theta0 = base.psi_unchecked(u);
        if theta0 > 0.0 {
            points.push(NsPoint {
                theta0,
                u_tilde: u,
                v_tilde: 1.0 - u,
            });
        }
    }
    Ok(points)
}

/// The Neimark–Sacker point with the smallest ũ, if any.
pub fn solve_ns_point(base: &BaseParams) -> Result<Option<NsPoint>> {
    Ok(solve_ns_points(base)?.into_iter().next())
}

/// Trace and determinant of the perturbed Jacobian at `θ = θ₀ + θ*`.
fn perturbed_trace_det(ns: &NsPoint, base: &BaseParams, theta_star: f64) -> (f64, f64) {
    let u = ns.u_tilde;
    let h = base.h() as f64;
    let w = base.c() * u.powi(base.h() as i32);
    let d = 1.0 + w;
    let a = 2.0 - u - theta_star * u.powi(base.h() as i32) / d;
    let b = 1.0 - theta_star * u.powi(base.h() as i32) * (1.0 - u) * (1.0 + h + w) / (d * d);
    (a, b)
}

/// Multipliers `[a ∓ i√(4b − a²)]/2` at `θ = θ₀ + θ*`. The first entry has
/// negative imaginary part.
pub fn perturbed_eigenvalues(
    ns: &NsPoint,
    base: &BaseParams,
    theta_star: f64,
) -> Result<[Complex64; 2]> {
    let (a, b) = perturbed_trace_det(ns, base, theta_star);
    let disc = 4.0 * b - a * a;
    if disc <= 0.0 {
        return Err(Error::RealEigenvalues { discriminant: disc });
    }
    let im = 0.5 * disc.sqrt();
    Ok([Complex64::new(0.5 * a, -im), Complex64::new(0.5 * a, im)])
}

/// `d|λ|/dθ*` at θ* = 0: `−ũʰ(1 − ũ)(1 + h + cũʰ)/(2(1 + cũʰ)²)`.
pub fn transversality(ns: &NsPoint, base: &BaseParams) -> f64 {
    let u = ns.u_tilde;
    let uh = u.powi(base.h() as i32);
    let w = base.c() * uh;
    let d = 1.0 + w;
    -uh * (1.0 - u) * (1.0 + base.h() as f64 + w) / (2.0 * d * d)
}

/// Taylor coefficients of the map shifted to the Neimark–Sacker point,
/// `x = u − ũ`, `y = v − ṽ`, at θ = θ₀.
///
/// The x-equation is `a10 x + a01 y + a20 x² + a11 xy` exactly. The
/// y-equation is `b10 x + b01 y + b20 x² + b11 xy + b21 x²y + b30 x³` up to
/// third order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub a10: f64,
    pub a01: f64,
    pub a20: f64,
    pub a11: f64,
    pub b10: f64,
    pub b01: f64,
    pub b20: f64,
    pub b11: f64,
    pub b21: f64,
    pub b30: f64,
}

pub fn taylor_coefficients(ns: &NsPoint, base: &BaseParams) -> TaylorCoeffs {
    let u = ns.u_tilde;
    let t = ns.theta0;
    let hi = base.h() as i32;
    let h = hi as f64;
    let w = base.c() * u.powi(hi);
    let d = 1.0 + w;
    let k = 1.0 + w + h * (w - 1.0);

    let b21 = h * t * u.powi(hi - 2) * k / (2.0 * d.powi(3));
    let b30_bracket = 2.0 * d * d + 3.0 * h * (w * w - 1.0) + h * h * (1.0 - 4.0 * w + w * w);
    TaylorCoeffs {
        a10: 1.0 - u,
        a01: -u,
        a20: -1.0,
        a11: -1.0,
        b10: 1.0,
        b01: 1.0,
        b20: (1.0 - u) * b21,
        b11: base.beta() - h * t * u.powi(hi - 1) / (d * d),
        b21,
        b30: -h * t * (1.0 - u) * u.powi(hi - 3) * b30_bracket / (6.0 * d.powi(4)),
    }
}

/// Which closed form to use for the `Y²` coefficient of the first normal-form
/// component.
///
/// `Published` uses `(2ũ(2 − ũ) + ũ²(b20ũ − 2b21))/(4s)`, which reproduces the
/// h = 1 reference values. `Projected` uses the algebraically exact
/// `(2ũ(2 − ũ) + ũ²(b20ũ − 2b11))/(4s)`, obtained from `T⁻¹ h(T X)`.
/// All other coefficients agree between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientConvention {
    #[default]
    Published,
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCoeffs {
    pub s: f64,
    pub c20: f64,
    pub c11: f64,
    pub c02: f64,
    pub c30: f64,
    pub c21: f64,
    pub c12: f64,
    pub c03: f64,
    pub d20: f64,
    pub d11: f64,
    pub d02: f64,
    pub d30: f64,
    pub d21: f64,
    pub d12: f64,
    pub d03: f64,
}

impl NormalFormCoeffs {
    /// `(F, G)` at `(X, Y)`, quadratic and cubic terms only.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let f = self.c20 * x * x
            + self.c11 * x * y
            + self.c02 * y * y
            + self.c30 * x.powi(3)
            + self.c21 * x * x * y
            + self.c12 * x * y * y
            + self.c03 * y.powi(3);
        let g = self.d20 * x * x
            + self.d11 * x * y
            + self.d02 * y * y
            + self.d30 * x.powi(3)
            + self.d21 * x * x * y
            + self.d12 * x * y * y
            + self.d03 * y.powi(3);
        (f, g)
    }
}

/// `s = √(4ũ − ũ²)`.
pub fn normal_form_scale(u_tilde: f64) -> f64 {
    (4.0 * u_tilde - u_tilde * u_tilde).sqrt()
}

/// Transformation `(x, y) = T (X, Y)` with `T = [[s/2, −ũ/2], [0, 1]]`.
pub fn transform(u_tilde: f64) -> [[f64; 2]; 2] {
    let s = normal_form_scale(u_tilde);
    [[0.5 * s, -0.5 * u_tilde], [0.0, 1.0]]
}

pub fn transform_inverse(u_tilde: f64) -> [[f64; 2]; 2] {
    let s = normal_form_scale(u_tilde);
    [[2.0 / s, u_tilde / s], [0.0, 1.0]]
}

pub fn normal_form(
    ns: &NsPoint,
    tc: &TaylorCoeffs,
    convention: CoefficientConvention,
) -> NormalFormCoeffs {
    let u = ns.u_tilde;
    let s = normal_form_scale(u);
    let TaylorCoeffs {
        b20, b11, b21, b30, ..
    } = *tc;
    let c02_cross = match convention {
        CoefficientConvention::Published => b21,
        CoefficientConvention::Projected => b11,
    };
    NormalFormCoeffs {
        s,
        c20: s * (b20 * u - 2.0) / 4.0,
        c11: (2.0 * u - 2.0 + u * (b11 - b20 * u)) / 2.0,
        c02: (2.0 * u * (2.0 - u) + u * u * (b20 * u - 2.0 * c02_cross)) / (4.0 * s),
        c30: s * s * b30 * u / 8.0,
        c21: s * u * (2.0 * b21 - 3.0 * b30 * u) / 8.0,
        c12: u * u * (3.0 * b30 * u - 4.0 * b21) / 8.0,
        c03: u.powi(3) * (2.0 * b21 - b30 * u) / (8.0 * s),
        d20: b20 * s * s / 4.0,
        d11: s * (b11 - b20 * u) / 2.0,
        d02: u * (b20 * u - 2.0 * b11) / 4.0,
        d30: b30 * s.powi(3) / 8.0,
        d21: s * s * (2.0 * b21 - 3.0 * b30 * u) / 8.0,
        d12: s * u * (3.0 * b30 * u - 4.0 * b21) / 8.0,
        d03: u * u * (2.0 * b21 - b30 * u) / 8.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovCoefficients {
    #[serde(with = "crate::complex_repr")]
    pub l20: Complex64,
    #[serde(with = "crate::complex_repr")]
    pub l11: Complex64,
    #[serde(with = "crate::complex_repr")]
    pub l02: Complex64,
    #[serde(with = "crate::complex_repr")]
    pub l21: Complex64,
}

impl LyapunovCoefficients {
    pub fn from_normal_form(nf: &NormalFormCoeffs) -> Self {
        let (fxx, fxy, fyy) = (2.0 * nf.c20, nf.c11, 2.0 * nf.c02);
        let (fxxx, fxxy, fxyy, fyyy) = (6.0 * nf.c30, 2.0 * nf.c21, 2.0 * nf.c12, 6.0 * nf.c03);
        let (gxx, gxy, gyy) = (2.0 * nf.d20, nf.d11, 2.0 * nf.d02);
        let (gxxx, gxxy, gxyy, gyyy) = (6.0 * nf.d30, 2.0 * nf.d21, 2.0 * nf.d12, 6.0 * nf.d03);

        LyapunovCoefficients {
            l20: Complex64::new(fxx - fyy + 2.0 * gxy, gxx - gyy - 2.0 * fxy) / 8.0,
            l11: Complex64::new(fxx + fyy, gxx + gyy) / 4.0,
            l02: Complex64::new(fxx - fyy - 2.0 * gxy, gxx - gyy + 2.0 * fxy) / 8.0,
            l21: Complex64::new(fxxx + fxyy + gxxy + gyyy, gxxx + gxyy - fxxy - fyyy) / 16.0,
        }
    }
}

/// `𝓛 = −Re[(1 − 2λ)λ̄²/(1 − λ) · L11 L20] − ½|L11|² − |L02|² + Re(λ̄ L21)`.
///
/// `lambda` must be the multiplier of the rotation `[[α, −ω], [ω, α]]` the
/// normal form is written in, i.e. `α + iω` with ω > 0.
pub fn discriminating_quantity(lambda: Complex64, l: &LyapunovCoefficients) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let conj = lambda.conj();
    -((one - 2.0 * lambda) * conj * conj / (one - lambda) * l.l11 * l.l20).re
        - 0.5 * l.l11.norm_sqr()
        - l.l02.norm_sqr()
        + (conj * l.l21).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveStability {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsReport {
    pub params: BaseParams,
    pub ns_point: NsPoint,
    #[serde(with = "crate::complex_repr::pair")]
    pub eigenvalues: [Complex64; 2],
    pub d_modulus_dtheta: f64,
    pub taylor: TaylorCoeffs,
    pub normal_form: NormalFormCoeffs,
    pub lyapunov: LyapunovCoefficients,
    pub l_quantity: f64,
    pub curve_stability: CurveStability,
    pub convention: CoefficientConvention,
    /// `1 < a(0) < 2` and `λᵐ ≠ 1` for m = 1..4.
    pub nondegenerate: bool,
}

fn is_nondegenerate(lambda: Complex64) -> bool {
    let a = 2.0 * lambda.re;
    let not_resonant = (1..=4).all(|m| (lambda.powi(m) - 1.0).norm() > RESONANCE_MARGIN);
    a > 1.0 && a < 2.0 && not_resonant
}

pub fn lyapunov_quantity(
    base: &BaseParams,
    ns: &NsPoint,
    taylor: &TaylorCoeffs,
    nf: &NormalFormCoeffs,
    convention: CoefficientConvention,
) -> Result<NsReport> {
    let eigenvalues = perturbed_eigenvalues(ns, base, 0.0)?;
    let lyapunov = LyapunovCoefficients::from_normal_form(nf);
    let l_quantity = discriminating_quantity(eigenvalues[1], &lyapunov);
    Ok(NsReport {
        params: *base,
        ns_point: *ns,
        eigenvalues,
        d_modulus_dtheta: transversality(ns, base),
        taylor: *taylor,
        normal_form: *nf,
        lyapunov,
        l_quantity,
        curve_stability: if l_quantity < 0.0 {
            CurveStability::Attracting
        } else {
            CurveStability::Repelling
        },
        convention,
        nondegenerate: is_nondegenerate(eigenvalues[1]),
    })
}

/// Full report for the `index`-th Neimark–Sacker point (ascending ũ).
pub fn analyze_ns(
    base: &BaseParams,
    index: usize,
    convention: CoefficientConvention,
) -> Result<NsReport> {
    let points = solve_ns_points(base)?;
    let ns = points.get(index).copied().ok_or_else(|| {
        Error::InvalidSpec(format!(
            "Neimark-Sacker point {index} requested, {} found",
            points.len()
        ))
    })?;
    let taylor = taylor_coefficients(&ns, base);
    let nf = normal_form(&ns, &taylor, convention);
    lyapunov_quantity(base, &ns, &taylor, &nf, convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_map, jacobian, ModelParams, PlanktonState};
    use crate::stability::characteristic_pq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base41() -> BaseParams {
        BaseParams::new(2.0, 0.5, 2.0, 1).unwrap()
    }

    fn base42() -> BaseParams {
        BaseParams::new(2.0, 0.5, 0.25, 2).unwrap()
    }

    fn random_ns(rng: &mut ChaCha8Rng) -> (BaseParams, NsPoint) {
        loop {
            let base = BaseParams::new(
                rng.gen_range(1.2..4.0),
                rng.gen_range(0.05..0.9),
                rng.gen_range(0.05..4.0),
                rng.gen_range(1..=2),
            )
            .unwrap();
            if let Some(ns) = solve_ns_point(&base).unwrap() {
                if ns.u_tilde > 0.02 {
                    return (base, ns);
                }
            }
        }
    }

    #[test]
    fn ns_point_h1() {
        let ns = solve_ns_point(&base41()).unwrap().unwrap();
        assert!((ns.theta0 - 1.2012).abs() < 1e-3);
        assert!((ns.u_tilde - 0.3796).abs() < 1e-3);
        assert_eq!(ns.v_tilde, 1.0 - ns.u_tilde);
    }

    #[test]
    fn ns_point_h2() {
        let ns = solve_ns_point(&base42()).unwrap().unwrap();
        assert!(ns.theta0 > 1.035 && ns.theta0 < 1.038, "{}", ns.theta0);
        assert!(ns.u_tilde > 0.2934 && ns.u_tilde < 0.294, "{}", ns.u_tilde);
    }

    #[test]
    fn ns_point_absent_or_rejected() {
        let base = BaseParams::new(0.6, 0.5, 0.1, 1).unwrap();
        assert!(solve_ns_points(&base).unwrap().is_empty());
        let base = BaseParams::new(0.5, 0.5, 0.1, 1).unwrap();
        assert!(matches!(
            solve_ns_points(&base),
            Err(Error::NoPositiveRegime { .. })
        ));
    }

    #[test]
    fn ns_point_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let (base, ns) = random_ns(&mut rng);
            assert!((base.psi_unchecked(ns.u_tilde) - ns.theta0).abs() < 1e-10);
            let params = base.with_theta(ns.theta0).unwrap();
            let (p, q) = characteristic_pq(&params, ns.u_tilde);
            assert!((q - 1.0).abs() < 1e-10, "q = {q}");
            assert!(p > 1.0 && p < 2.0);
        }
    }

    #[test]
    fn eigenvalues_on_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (base, ns) = random_ns(&mut rng);
            let [l1, l2] = perturbed_eigenvalues(&ns, &base, 0.0).unwrap();
            assert!((l1.norm() - 1.0).abs() < 1e-10);
            assert_eq!(l2, l1.conj());
            assert!(l1.im < 0.0);
            assert!(is_nondegenerate(l2));
        }
    }

    #[test]
    fn eigenvalues_reference_values() {
        let ns = solve_ns_point(&base41()).unwrap().unwrap();
        let [l1, l2] = perturbed_eigenvalues(&ns, &base41(), 0.0).unwrap();
        assert!((l1.re - 0.81).abs() < 1e-3 && (l1.im + 0.5864).abs() < 1e-3);
        assert!((l2.im - 0.5864).abs() < 1e-3);

        let ns = solve_ns_point(&base42()).unwrap().unwrap();
        let [l1, _] = perturbed_eigenvalues(&ns, &base42(), 0.0).unwrap();
        assert!((l1.re - 0.854).abs() < 5e-3 && (l1.im + 0.520).abs() < 5e-3);
    }

    #[test]
    fn eigenvalues_match_jacobian_at_theta0() {
        let ns = solve_ns_point(&base41()).unwrap().unwrap();
        let params = base41().with_theta(ns.theta0).unwrap();
        let j = jacobian(
            &params,
            PlanktonState {
                u: ns.u_tilde,
                v: ns.v_tilde,
            },
        );
        let [l1, _] = perturbed_eigenvalues(&ns, &base41(), 0.0).unwrap();
        assert!((j.trace() - 2.0 * l1.re).abs() < 1e-10);
        assert!((j.determinant() - l1.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn real_regime_is_an_error() {
        let ns = solve_ns_point(&base41()).unwrap().unwrap();
        assert!(matches!(
            perturbed_eigenvalues(&ns, &base41(), -30.0),
            Err(Error::RealEigenvalues { .. })
        ));
    }

    #[test]
    fn transversality_reference_values() {
        let ns = solve_ns_point(&base41()).unwrap().unwrap();
        assert!((transversality(&ns, &base41()) + 0.10496).abs() < 2e-4);
        let ns = solve_ns_point(&base42()).unwrap().unwrap();
        assert!((transversality(&ns, &base42()) + 0.088).abs() < 1e-3);
    }

    #[test]
    fn transversality_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let (base, ns) = random_ns(&mut rng);
            let step = 1e-6;
            let modulus = |t: f64| perturbed_trace_det(&ns, &base, t).1.sqrt();
            let fd = (modulus(step) - modulus(-step)) / (2.0 * step);
            let exact = transversality(&ns, &base);
            assert!(exact < 0.0);
            assert!((fd - exact).abs() < 1e-6, "{fd} vs {exact}");
        }
    }

    /// Second and third partials of the shifted map by central differences.
    struct ShiftedPartials {
        gxx: f64,
        gxy: f64,
        gxxy: f64,
        gxxx: f64,
        g10: f64,
        g01: f64,
    }

    fn shifted_partials(base: &BaseParams, ns: &NsPoint) -> ShiftedPartials {
        let params: ModelParams = base.with_theta(ns.theta0).unwrap();
        let g = |x: f64, y: f64| {
            evaluate_map(
                &params,
                PlanktonState {
                    u: ns.u_tilde + x,
                    v: ns.v_tilde + y,
                },
            )
            .v - ns.v_tilde
        };
        let e = 1e-4;
        // Third-order stencils at step k, combined by Richardson extrapolation.
        let dxxy = |k: f64| {
            ((g(k, k) - 2.0 * g(0.0, k) + g(-k, k)) - (g(k, -k) - 2.0 * g(0.0, -k) + g(-k, -k)))
                / (2.0 * k.powi(3))
        };
        let dxxx = |k: f64| {
            (g(2.0 * k, 0.0) - 2.0 * g(k, 0.0) + 2.0 * g(-k, 0.0) - g(-2.0 * k, 0.0))
                / (2.0 * k.powi(3))
        };
        let k = 2e-3;
        ShiftedPartials {
            g10: (g(e, 0.0) - g(-e, 0.0)) / (2.0 * e),
            g01: (g(0.0, e) - g(0.0, -e)) / (2.0 * e),
            gxx: (g(e, 0.0) - 2.0 * g(0.0, 0.0) + g(-e, 0.0)) / (e * e),
            gxy: (g(e, e) - g(e, -e) - g(-e, e) + g(-e, -e)) / (4.0 * e * e),
            gxxy: (4.0 * dxxy(0.5 * k) - dxxy(k)) / 3.0,
            gxxx: (4.0 * dxxx(0.5 * k) - dxxx(k)) / 3.0,
        }
    }

    #[test]
    fn taylor_coefficients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut cases = vec![(base41(), solve_ns_point(&base41()).unwrap().unwrap())];
        cases.extend((0..20).map(|_| random_ns(&mut rng)));
        for (base, ns) in cases {
            let tc = taylor_coefficients(&ns, &base);
            let fd = shifted_partials(&base, &ns);
            assert!((fd.g10 - tc.b10).abs() < 1e-6, "b10 {base:?}");
            assert!((fd.g01 - tc.b01).abs() < 1e-6);
            assert!((0.5 * fd.gxx - tc.b20).abs() < 1e-5, "b20 {base:?}");
            assert!((fd.gxy - tc.b11).abs() < 1e-5, "b11 {base:?}");
            assert!(
                (0.5 * fd.gxxy - tc.b21).abs() < 1e-5,
                "b21 {} vs {}",
                0.5 * fd.gxxy,
                tc.b21
            );
            assert!(
                (fd.gxxx / 6.0 - tc.b30).abs() < 1e-5,
                "b30 {} vs {}",
                fd.gxxx / 6.0,
                tc.b30
            );
            assert!((tc.b20 - (1.0 - ns.u_tilde) * tc.b21).abs() < 1e-15);
        }
    }

    #[test]
    fn b10_recomputed_from_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (base, ns) = random_ns(&mut rng);
            let params = base.with_theta(ns.theta0).unwrap();
            let b10 = (1.0 - ns.u_tilde)
                * (base.beta() - ns.theta0 * params.response_derivative(ns.u_tilde));
            assert!((b10 - 1.0).abs() < 1e-10);
        }
    }

    fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn similarity_to_rotation() {
        for (base, ns) in [(base41(), solve_ns_point(&base41()).unwrap().unwrap())] {
            let tc = taylor_coefficients(&ns, &base);
            let j = [[tc.a10, tc.a01], [tc.b10, tc.b01]];
            let m = mat_mul(
                transform_inverse(ns.u_tilde),
                mat_mul(j, transform(ns.u_tilde)),
            );
            let s = normal_form_scale(ns.u_tilde);
            let alpha = 0.5 * (2.0 - ns.u_tilde);
            let expected = [[alpha, -0.5 * s], [0.5 * s, alpha]];
            for i in 0..2 {
                for k in 0..2 {
                    assert!((m[i][k] - expected[i][k]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn projected_coefficients_reconstruct_nonlinear_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let (base, ns) = random_ns(&mut rng);
            let tc = taylor_coefficients(&ns, &base);
            let nf = normal_form(&ns, &tc, CoefficientConvention::Projected);
            let t = transform(ns.u_tilde);
            let ti = transform_inverse(ns.u_tilde);
            for _ in 0..100 {
                let (xx, yy) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let x = t[0][0] * xx + t[0][1] * yy;
                let y = t[1][0] * xx + t[1][1] * yy;
                let f = tc.a20 * x * x + tc.a11 * x * y;
                let g = tc.b20 * x * x + tc.b11 * x * y + tc.b21 * x * x * y + tc.b30 * x.powi(3);
                let expected = (ti[0][0] * f + ti[0][1] * g, ti[1][0] * f + ti[1][1] * g);
                let (ff, gg) = nf.eval(xx, yy);
                assert!((ff - expected.0).abs() < 1e-10, "{ff} vs {}", expected.0);
                assert!((gg - expected.1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn conventions_differ_only_in_c02() {
        let ns = solve_ns_point(&base42()).unwrap().unwrap();
        let tc = taylor_coefficients(&ns, &base42());
        let a = normal_form(&ns, &tc, CoefficientConvention::Published);
        let mut b = normal_form(&ns, &tc, CoefficientConvention::Projected);
        assert_ne!(a.c02, b.c02);
        b.c02 = a.c02;
        assert_eq!(a, b);
    }

    #[test]
    fn reference_lyapunov_coefficients_h1() {
        let report = analyze_ns(&base41(), 0, CoefficientConvention::Published).unwrap();
        let l = report.lyapunov;
        assert!((l.l20 - Complex64::new(0.0225, 0.1809)).norm() < 1e-3);
        assert!((l.l11 - Complex64::new(-0.1587, -0.1012)).norm() < 1e-3);
        assert!((l.l02 - Complex64::new(-0.4197, 0.0142)).norm() < 1e-3);
        assert!((l.l21 - Complex64::new(0.0209, -0.049)).norm() < 1e-3);
        assert!((report.l_quantity + 0.132).abs() < 1e-3);
        assert_eq!(report.curve_stability, CurveStability::Attracting);
        assert!(report.nondegenerate);
    }

    #[test]
    fn zero_normal_form_gives_zero_quantity() {
        let zero = NormalFormCoeffs {
            s: 1.0,
            c20: 0.0,
            c11: 0.0,
            c02: 0.0,
            c30: 0.0,
            c21: 0.0,
            c12: 0.0,
            c03: 0.0,
            d20: 0.0,
            d11: 0.0,
            d02: 0.0,
            d30: 0.0,
            d21: 0.0,
            d12: 0.0,
            d03: 0.0,
        };
        let l = LyapunovCoefficients::from_normal_form(&zero);
        assert_eq!(l.l20, Complex64::new(0.0, 0.0));
        assert_eq!(l.l21, Complex64::new(0.0, 0.0));
        assert_eq!(discriminating_quantity(Complex64::new(0.8, 0.6), &l), 0.0);
    }

    #[test]
    fn stability_follows_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let (base, _) = random_ns(&mut rng);
            let report = analyze_ns(&base, 0, CoefficientConvention::Projected).unwrap();
            assert_eq!(
                report.curve_stability == CurveStability::Attracting,
                report.l_quantity < 0.0
            );
        }
    }

    #[test]
    fn report_serde_round_trip() {
        let report = analyze_ns(&base41(), 0, CoefficientConvention::Published).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: NsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn bad_index_rejected() {
        assert!(analyze_ns(&base41(), 5, CoefficientConvention::Published).is_err());
    }

    #[test]
    fn closed_curve_below_and_convergence_above() {
        let base = base41();
        let ns = solve_ns_point(&base).unwrap().unwrap();
        let center = |params: &ModelParams| {
            crate::fixed_points::interior_fixed_point_h1(params)
                .unwrap()
                .unwrap()
                .point
        };

        let params = base.with_theta(ns.theta0 - 0.08).unwrap();
        let eq = center(&params);
        let mut s = PlanktonState { u: 0.2, v: 1.1 };
        for _ in 0..10_000 {
            s = evaluate_map(&params, s);
        }
        let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
        for _ in 0..10_000 {
            s = evaluate_map(&params, s);
            let d = s.distance(&eq);
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        assert!(dmin > 1e-3 && dmax < 1.0, "{dmin} {dmax}");

        // Contraction is weak this close to θ₀, so the transient is long.
        let params = base.with_theta(ns.theta0 + 0.004).unwrap();
        let eq = center(&params);
        let mut s = PlanktonState { u: 0.2, v: 1.1 };
        for _ in 0..400_000 {
            s = evaluate_map(&params, s);
        }
        assert!(s.distance(&eq) < 1e-6, "{}", s.distance(&eq));
    }
}
