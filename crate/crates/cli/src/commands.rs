use std::io::Write;

use serde::Serialize;

use plankton_core::bifurcation::{solve_ns_points, CoefficientConvention};
use plankton_core::dynamics::{
    bifurcation_sweep, default_tangent, iterate_orbit, max_lyapunov_exponent_with_tangent, Tangent,
    DEFAULT_KEEP, DEFAULT_STEPS, DEFAULT_TRANSIENT,
};
use plankton_core::fixed_points::{
    all_fixed_points, count_positive_fixed_points, psi2_critical_points,
};
use plankton_core::regions::{region_report, NonnegativityVerdict, RegionReport};
use plankton_core::stability::{quadratic_root_location, OtherRoot};
use plankton_core::{
    BaseParams, Branch, CubicRoots, CurveStability, FixedPointKind, FixedPointRecord, Holling,
    ModelParams, NsReport, OrbitSpec, PlanktonState, RootCase, RootLocation, StabilityLabel,
    SweepResult, TheoremCase,
};

use crate::args::{
    AnalysisArgs, Command, Convention, Format, MleArgs, ModelArgs, NsArgs, OrbitArgs,
    OrbitSpecArgs, SweepArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{json_envelope, num, opt_num, write_key_values, Product};

fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
}

fn base_params(m: &ModelArgs) -> CliResult<BaseParams> {
    Ok(BaseParams::new(
        require(m.beta, "beta")?,
        require(m.r, "r")?,
        require(m.c, "c")?,
        require(m.h, "h")?,
    )?)
}

fn model_params(m: &ModelArgs) -> CliResult<ModelParams> {
    let base = base_params(m)?;
    Ok(base.with_theta(require(m.theta, "theta")?)?)
}

fn orbit_spec(o: &OrbitSpecArgs, default_transient: usize) -> CliResult<OrbitSpec> {
    let initial = PlanktonState::new(require(o.u0, "u0")?, require(o.v0, "v0")?)?;
    Ok(OrbitSpec::new(
        initial,
        o.steps.unwrap_or(DEFAULT_STEPS),
        o.transient.unwrap_or(default_transient),
        o.record_every.unwrap_or(1),
    )?)
}

fn branch_name(b: Option<Branch>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

fn kind_name(k: FixedPointKind) -> &'static str {
    match k {
        FixedPointKind::Origin => "origin",
        FixedPointKind::BoundaryU1 => "boundary_u1",
        FixedPointKind::Interior => "interior",
    }
}

fn label_name(l: Option<StabilityLabel>) -> String {
    l.map(|l| l.to_string()).unwrap_or_default()
}

fn case_name(c: RootCase) -> String {
    let other = |o: OtherRoot| match o {
        OtherRoot::Inside => "inside",
        OtherRoot::OnCircle => "on_circle",
        OtherRoot::Outside => "outside",
    };
    match c {
        RootCase::BothInside => "both_inside".into(),
        RootCase::OneRootMinusOne => "one_root_minus_one".into(),
        RootCase::InsideOutside => "inside_outside".into(),
        RootCase::BothOutside => "both_outside".into(),
        RootCase::ConjugateUnit => "conjugate_unit".into(),
        RootCase::DoubleMinusOne => "double_minus_one".into(),
        RootCase::RootAtOne { other: o } => format!("root_at_one/{}", other(o)),
        RootCase::RootAboveOne { other: o } => format!("root_above_one/{}", other(o)),
    }
}

#[derive(Debug, Serialize)]
pub struct FixedPointsProduct {
    pub params: ModelParams,
    pub interior_count: usize,
    /// Subcase of the existence theorem (h = 2 only).
    pub theorem_case: Option<TheoremCase>,
    pub critical_points: Option<CubicRoots>,
    pub points: Vec<FixedPointRecord>,
}

impl Product for FixedPointsProduct {
    fn schema(&self) -> &'static str {
        "fixed-points"
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), self, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        w.write_record(["kind", "branch", "u", "v", "tangent", "p", "q", "label"])?;
        for p in &self.points {
            w.write_record([
                kind_name(p.kind).to_owned(),
                branch_name(p.branch),
                num(p.point.u),
                num(p.point.v),
                p.tangent.to_string(),
                num(p.char_p),
                num(p.char_q),
                label_name(p.label),
            ])?;
        }
        Ok(())
    }
}

pub fn fixed_points(args: &AnalysisArgs) -> CliResult<FixedPointsProduct> {
    let params = model_params(&args.model)?;
    let points = all_fixed_points(&params)?;
    let interior_count = points
        .iter()
        .filter(|p| p.kind == FixedPointKind::Interior)
        .count();
    let (theorem_case, critical_points) = if params.holling() == Holling::TypeIII {
        let (_, case) = count_positive_fixed_points(&params)?;
        let crit = params
            .base()
            .admits_interior()
            .then(|| psi2_critical_points(&params.base()))
            .transpose()?;
        (Some(case), crit)
    } else {
        (None, None)
    };
    Ok(FixedPointsProduct {
        params,
        interior_count,
        theorem_case,
        critical_points,
        points,
    })
}

#[derive(Debug, Serialize)]
pub struct ClassifiedPoint {
    pub kind: FixedPointKind,
    pub branch: Option<Branch>,
    pub point: PlanktonState,
    pub location: RootLocation,
    pub label: StabilityLabel,
}

#[derive(Debug, Serialize)]
pub struct ClassificationProduct {
    pub params: ModelParams,
    pub points: Vec<ClassifiedPoint>,
}

impl Product for ClassificationProduct {
    fn schema(&self) -> &'static str {
        "classification"
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), self, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        w.write_record([
            "kind", "branch", "u", "v", "case", "root1_re", "root1_im", "root2_re", "root2_im",
            "label",
        ])?;
        for p in &self.points {
            let [r1, r2] = p.location.roots;
            w.write_record([
                kind_name(p.kind).to_owned(),
                branch_name(p.branch),
                num(p.point.u),
                num(p.point.v),
                case_name(p.location.case),
                num(r1.re),
                num(r1.im),
                num(r2.re),
                num(r2.im),
                p.label.to_string(),
            ])?;
        }
        Ok(())
    }
}

pub fn classify(args: &AnalysisArgs) -> CliResult<ClassificationProduct> {
    let params = model_params(&args.model)?;
    let mut points = Vec::new();
    for rec in all_fixed_points(&params)? {
        // Characteristic polynomial λ² − pλ + q at every fixed point.
        let location = quadratic_root_location(-rec.char_p, rec.char_q);
        points.push(ClassifiedPoint {
            kind: rec.kind,
            branch: rec.branch,
            point: rec.point,
            location,
            label: location.stability_label(),
        });
    }
    Ok(ClassificationProduct { params, points })
}

pub struct NsProduct(pub NsReport);

impl Product for NsProduct {
    fn schema(&self) -> &'static str {
        "ns-report"
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), &self.0, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        let r = &self.0;
        let (t, n, l) = (&r.taylor, &r.normal_form, &r.lyapunov);
        let convention = match r.convention {
            CoefficientConvention::Published => "published",
            CoefficientConvention::Projected => "projected",
        };
        let rows: Vec<(&str, String)> = vec![
            ("beta", num(r.params.beta())),
            ("r", num(r.params.r())),
            ("c", num(r.params.c())),
            ("h", r.params.h().to_string()),
            ("theta0", num(r.ns_point.theta0)),
            ("u_tilde", num(r.ns_point.u_tilde)),
            ("v_tilde", num(r.ns_point.v_tilde)),
            ("lambda1_re", num(r.eigenvalues[0].re)),
            ("lambda1_im", num(r.eigenvalues[0].im)),
            ("lambda2_re", num(r.eigenvalues[1].re)),
            ("lambda2_im", num(r.eigenvalues[1].im)),
            ("d_modulus_dtheta", num(r.d_modulus_dtheta)),
            ("b20", num(t.b20)),
            ("b11", num(t.b11)),
            ("b21", num(t.b21)),
            ("b30", num(t.b30)),
            ("s", num(n.s)),
            ("c20", num(n.c20)),
            ("c11", num(n.c11)),
            ("c02", num(n.c02)),
            ("c30", num(n.c30)),
            ("c21", num(n.c21)),
            ("c12", num(n.c12)),
            ("c03", num(n.c03)),
            ("d20", num(n.d20)),
            ("d11", num(n.d11)),
            ("d02", num(n.d02)),
            ("d30", num(n.d30)),
            ("d21", num(n.d21)),
            ("d12", num(n.d12)),
            ("d03", num(n.d03)),
            ("l20_re", num(l.l20.re)),
            ("l20_im", num(l.l20.im)),
            ("l11_re", num(l.l11.re)),
            ("l11_im", num(l.l11.im)),
            ("l02_re", num(l.l02.re)),
            ("l02_im", num(l.l02.im)),
            ("l21_re", num(l.l21.re)),
            ("l21_im", num(l.l21.im)),
            ("l_quantity", num(r.l_quantity)),
            (
                "curve_stability",
                match r.curve_stability {
                    CurveStability::Attracting => "attracting".into(),
                    CurveStability::Repelling => "repelling".into(),
                },
            ),
            ("convention", convention.into()),
            ("nondegenerate", r.nondegenerate.to_string()),
        ];
        write_key_values(w, &rows)
    }
}

pub fn ns(args: &NsArgs) -> CliResult<NsProduct> {
    let base = base_params(&args.model)?;
    let convention = match args.convention.unwrap_or(Convention::Published) {
        Convention::Published => CoefficientConvention::Published,
        Convention::Projected => CoefficientConvention::Projected,
    };
    let found = solve_ns_points(&base)?.len();
    if found == 0 {
        return Err(CliError::Numerical(
            "no Neimark-Sacker point: the residual has no sign change on the admissible interval"
                .into(),
        ));
    }
    let index = args.index.unwrap_or(0);
    if index >= found {
        return Err(CliError::Usage(format!(
            "--index {index} out of range: {found} Neimark-Sacker point(s) found"
        )));
    }
    Ok(NsProduct(plankton_core::analyze_ns(
        &base, index, convention,
    )?))
}

#[derive(Debug, Serialize)]
pub struct OrbitProduct {
    pub params: ModelParams,
    pub spec: OrbitSpec,
    pub states: Vec<PlanktonState>,
    pub diverged_at: Option<usize>,
}

impl Product for OrbitProduct {
    fn schema(&self) -> &'static str {
        "orbit"
    }

    fn default_format(&self) -> Format {
        Format::Csv
    }

    fn failure(&self) -> Option<CliError> {
        self.diverged_at.map(|step| {
            CliError::Numerical(format!(
                "orbit diverged at step {step}; partial data written"
            ))
        })
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), self, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        w.write_record(["step", "u", "v"])?;
        for (i, s) in self.states.iter().enumerate() {
            let step = self.spec.transient + i * self.spec.record_every;
            w.write_record([step.to_string(), num(s.u), num(s.v)])?;
        }
        Ok(())
    }
}

pub fn orbit(args: &OrbitArgs) -> CliResult<OrbitProduct> {
    let params = model_params(&args.model)?;
    let spec = orbit_spec(&args.orbit, 0)?;
    let orbit = iterate_orbit(&params, &spec)?;
    Ok(OrbitProduct {
        params,
        spec,
        states: orbit.states,
        diverged_at: orbit.diverged_at,
    })
}

#[derive(Debug, Serialize)]
pub struct SweepProduct {
    pub params: BaseParams,
    pub spec: OrbitSpec,
    pub keep: usize,
    #[serde(flatten)]
    pub result: SweepResult,
}

impl Product for SweepProduct {
    fn schema(&self) -> &'static str {
        "sweep"
    }

    fn default_format(&self) -> Format {
        Format::Csv
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), self, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        w.write_record(["theta", "u", "v", "mle"])?;
        let r = &self.result;
        for (i, &theta) in r.theta_grid.iter().enumerate() {
            let mle = opt_num(r.mle[i]);
            for s in &r.samples[i] {
                w.write_record([num(theta), num(s.u), num(s.v), mle.clone()])?;
            }
        }
        Ok(())
    }
}

pub fn sweep(args: &SweepArgs) -> CliResult<SweepProduct> {
    let base = base_params(&args.model)?;
    let spec = orbit_spec(&args.orbit, DEFAULT_TRANSIENT)?;
    let keep = args.keep.unwrap_or(DEFAULT_KEEP);
    let result = bifurcation_sweep(
        &base,
        require(args.theta_min, "theta-min")?,
        require(args.theta_max, "theta-max")?,
        args.grid.unwrap_or(500),
        &spec,
        keep,
    )?;
    Ok(SweepProduct {
        params: base,
        spec,
        keep,
        result,
    })
}

#[derive(Debug, Serialize)]
pub struct MleProduct {
    pub params: ModelParams,
    pub spec: OrbitSpec,
    pub tangent: [f64; 2],
    pub mle: f64,
}

impl Product for MleProduct {
    fn schema(&self) -> &'static str {
        "mle"
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), self, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        w.write_record(["theta", "mle"])?;
        w.write_record([num(self.params.theta()), num(self.mle)])?;
        Ok(())
    }
}

pub fn mle(args: &MleArgs) -> CliResult<MleProduct> {
    let params = model_params(&args.model)?;
    let spec = orbit_spec(&args.orbit, DEFAULT_TRANSIENT)?;
    let tangent = match (args.tangent_u, args.tangent_v) {
        (None, None) => default_tangent(),
        (u, v) => Tangent::new(u.unwrap_or(0.0), v.unwrap_or(0.0)),
    };
    let mle = max_lyapunov_exponent_with_tangent(&params, &spec, tangent)?;
    Ok(MleProduct {
        params,
        spec,
        tangent: [tangent[0], tangent[1]],
        mle,
    })
}

pub struct RegionsProduct(pub RegionReport);

impl Product for RegionsProduct {
    fn schema(&self) -> &'static str {
        "regions"
    }

    fn write_json(&self, w: &mut dyn Write) -> CliResult<()> {
        json_envelope(self.schema(), &self.0, w)
    }

    fn write_csv(&self, w: &mut csv::Writer<&mut dyn Write>) -> CliResult<()> {
        let r = &self.0;
        let (nonneg, condition) = match r.nonnegativity {
            NonnegativityVerdict::Certified { condition } => (
                "certified",
                condition
                    .map(|c| format!("{c:?}").to_lowercase())
                    .unwrap_or_default(),
            ),
            NonnegativityVerdict::Inconclusive => ("inconclusive", String::new()),
        };
        let mut rows: Vec<(&str, String)> = vec![
            ("beta", num(r.params.beta())),
            ("r", num(r.params.r())),
            ("theta", num(r.params.theta())),
            ("c", num(r.params.c())),
            ("h", r.params.h().to_string()),
            ("nonnegativity", nonneg.into()),
            ("condition", condition),
        ];
        let omega = ["omega0", "omega1", "omega2", "omega3"];
        if let Some(b) = r.bernstein {
            for (k, w) in omega.iter().zip(b.omega) {
                rows.push((k, num(w)));
            }
        }
        rows.push(("v_decreasing", r.v_decreasing.to_string()));
        rows.push(("m_invariant", r.m_invariant.to_string()));
        rows.push((
            "attractor_from_interior_start",
            serde_json::to_value(r.attractor_from_interior_start)?
                .as_str()
                .unwrap_or_default()
                .to_owned(),
        ));
        write_key_values(w, &rows)
    }
}

pub fn regions(args: &AnalysisArgs) -> CliResult<RegionsProduct> {
    Ok(RegionsProduct(region_report(&model_params(&args.model)?)))
}

/// Runs the subcommand and returns its product.
pub fn dispatch(cmd: &Command) -> CliResult<Box<dyn Product>> {
    Ok(match cmd {
        Command::FixedPoints(a) => Box::new(fixed_points(a)?),
        Command::Classify(a) => Box::new(classify(a)?),
        Command::Ns(a) => Box::new(ns(a)?),
        Command::Orbit(a) => Box::new(orbit(a)?),
        Command::Sweep(a) => Box::new(sweep(a)?),
        Command::Mle(a) => Box::new(mle(a)?),
        Command::Regions(a) => Box::new(regions(a)?),
    })
}
