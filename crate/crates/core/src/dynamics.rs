//! Orbits, θ sweeps and the largest Lyapunov exponent.

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evaluate_map, jacobian, BaseParams, ModelParams, PlanktonState};

/// An orbit leaving this box counts as divergent.
pub const DIVERGENCE_BOUND: f64 = 1e6;

pub const DEFAULT_STEPS: usize = 10_000;
pub const DEFAULT_TRANSIENT: usize = 9_000;
pub const DEFAULT_KEEP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub initial: PlanktonState,
    pub steps: usize,
    pub transient: usize,
    pub record_every: usize,
}

impl OrbitSpec {
    pub fn new(
        initial: PlanktonState,
        steps: usize,
        transient: usize,
        record_every: usize,
    ) -> Result<Self> {
        let spec = OrbitSpec {
            initial,
            steps,
            transient,
            record_every,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 10⁴ steps, 9·10³ transient, every state recorded.
    pub fn with_defaults(initial: PlanktonState) -> Self {
        OrbitSpec {
            initial,
            steps: DEFAULT_STEPS,
            transient: DEFAULT_TRANSIENT,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSpec("steps must be positive".into()));
        }
        if self.transient >= self.steps {
            return Err(Error::InvalidSpec(format!(
                "transient ({}) must be smaller than steps ({})",
                self.transient, self.steps
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidSpec("record_every must be positive".into()));
        }
        let s = self.initial;
        if !(s.u.is_finite() && s.v.is_finite()) || !s.is_nonnegative() {
            return Err(Error::NegativeState { u: s.u, v: s.v });
        }
        Ok(())
    }

    /// Number of states an undiverged orbit records.
    pub fn recorded_len(&self) -> usize {
        (self.steps - self.transient) / self.record_every + 1
    }
}

/// States `s_k` for `k = transient, transient + record_every, …, ≤ steps`,
/// where `s_0` is the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub states: Vec<PlanktonState>,
    /// Step at which the orbit left the divergence box, if it did.
    pub diverged_at: Option<usize>,
}

impl Orbit {
    pub fn last(&self) -> Option<PlanktonState> {
        self.states.last().copied()
    }
}

fn escaped(s: PlanktonState) -> bool {
    !(s.u.abs() <= DIVERGENCE_BOUND && s.v.abs() <= DIVERGENCE_BOUND)
}

/// Shared loop: iterates the map, records states and optionally propagates a
/// tangent vector. Returns the orbit and the mean log growth over
/// post-transient steps.
fn run(
    params: &ModelParams,
    spec: &OrbitSpec,
    tangent: Option<Vector2<f64>>,
) -> (Orbit, Option<f64>) {
    let mut s = spec.initial;
    let mut w = tangent.map(|t| t / t.norm());
    let mut log_sum = 0.0;
    let mut states = Vec::with_capacity(spec.recorded_len());

    for k in 0..=spec.steps {
        if escaped(s) {
            return (
                Orbit {
                    states,
                    diverged_at: Some(k),
                },
                None,
            );
        }
        if k >= spec.transient && (k - spec.transient).is_multiple_of(spec.record_every) {
            states.push(s);
        }
        if k == spec.steps {
            break;
        }
        if let Some(vec) = w.as_mut() {
            let next = jacobian(params, s) * *vec;
            let norm = next.norm();
            if k >= spec.transient {
                log_sum += norm.ln();
            }
            *vec = next / norm;
        }
        s = evaluate_map(params, s);
    }

    let mle = w.map(|_| log_sum / (spec.steps - spec.transient) as f64);
    (
        Orbit {
            states,
            diverged_at: None,
        },
        mle,
    )
}

/// Recorded orbit; divergence stops the iteration and is flagged, keeping the
/// states recorded so far.
pub fn iterate_orbit(params: &ModelParams, spec: &OrbitSpec) -> Result<Orbit> {
    spec.validate()?;
    Ok(run(params, spec, None).0)
}

pub type Tangent = Vector2<f64>;

/// Default initial tangent `(1, 1)/√2`.
pub fn default_tangent() -> Tangent {
    Vector2::new(1.0, 1.0) / 2f64.sqrt()
}

/// Largest Lyapunov exponent (natural log) along the orbit of `spec`.
pub fn max_lyapunov_exponent(params: &ModelParams, spec: &OrbitSpec) -> Result<f64> {
    max_lyapunov_exponent_with_tangent(params, spec, default_tangent())
}

pub fn max_lyapunov_exponent_with_tangent(
    params: &ModelParams,
    spec: &OrbitSpec,
    tangent: Tangent,
) -> Result<f64> {
    spec.validate()?;
    if !(tangent.norm() > 0.0 && tangent.norm().is_finite()) {
        return Err(Error::InvalidSpec(
            "tangent vector must be nonzero and finite".into(),
        ));
    }
    match run(params, spec, Some(tangent)) {
        (
            Orbit {
                diverged_at: Some(step),
                ..
            },
            _,
        ) => Err(Error::Divergence { step }),
        (_, Some(mle)) => Ok(mle),
        (_, None) => unreachable!("tangent propagation always yields an estimate"),
    }
}

/// Largest pairwise distance among `states`; zero for fewer than two.
pub fn attractor_diameter(states: &[PlanktonState]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            d = d.max(a.distance(b));
        }
    }
    d
}

/// Uniform grid of `n ≥ 2` points from `lo` to `hi` inclusive.
pub fn theta_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = hi - lo;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + span * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub theta_grid: Vec<f64>,
    /// Last `keep` recorded states per θ; shorter when the column diverged.
    pub samples: Vec<Vec<PlanktonState>>,
    /// `None` for divergent columns.
    pub mle: Vec<Option<f64>>,
    pub diverged: Vec<bool>,
}

impl SweepResult {
    pub fn diameters(&self) -> Vec<f64> {
        self.samples.iter().map(|s| attractor_diameter(s)).collect()
    }
}

/// Runs one orbit per θ on the grid, columns in parallel, and keeps the last
/// `keep` recorded states along with the Lyapunov exponent of each column.
pub fn bifurcation_sweep(
    base: &BaseParams,
    theta_min: f64,
    theta_max: f64,
    grid_n: usize,
    spec: &OrbitSpec,
    keep: usize,
) -> Result<SweepResult> {
    if !(theta_min > 0.0 && theta_min < theta_max && theta_max.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "need 0 < theta_min < theta_max, got [{theta_min}, {theta_max}]"
        )));
    }
    if grid_n < 2 {
        return Err(Error::InvalidSpec(
            "grid must have at least two points".into(),
        ));
    }
    spec.validate()?;
    if keep == 0 || keep > spec.recorded_len() {
        return Err(Error::InvalidSpec(format!(
            "keep must lie in 1..={}, got {keep}",
            spec.recorded_len()
        )));
    }

    let grid = theta_grid(theta_min, theta_max, grid_n);
    let params: Vec<ModelParams> = grid
        .iter()
        .map(|&t| base.with_theta(t))
        .collect::<Result<_>>()?;

    let columns: Vec<(Vec<PlanktonState>, Option<f64>, bool)> = params
        .par_iter()
        .map(|p| {
            let (orbit, mle) = run(p, spec, Some(default_tangent()));
            let diverged = orbit.diverged_at.is_some();
            let start = orbit.states.len().saturating_sub(keep);
            (orbit.states[start..].to_vec(), mle, diverged)
        })
        .collect();

    let mut result = SweepResult {
        theta_grid: grid,
        samples: Vec::with_capacity(grid_n),
        mle: Vec::with_capacity(grid_n),
        diverged: Vec::with_capacity(grid_n),
    };
    for (samples, mle, diverged) in columns {
        result.samples.push(samples);
        result.mle.push(mle);
        result.diverged.push(diverged);
    }
    Ok(result)
}
