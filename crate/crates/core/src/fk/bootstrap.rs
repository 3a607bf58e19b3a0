//! The bootstrap `phi <= delta + e^{t Delta} phi  =>  max phi <= k delta / c`
//! and the Monte Carlo measurement of `delta`.

use rayon::prelude::*;
use serde::Serialize;

use super::heat::{contraction_constant, heat_propagate, mode_count, SineSeries};
use super::paths::{mean_and_stderr, run_ensemble, PathParams};
use crate::error::{Error, Result};
use crate::homsolver::{harmonic_mean, ExactSolution, HomogenizedSolution, ProblemInstance, SolutionField};
use crate::quadrature::CellGrid;

/// Slack allowed in the pointwise hypothesis check.
const HYPOTHESIS_TOLERANCE: f64 = 1e-12;

/// Number of equispaced points in `[0.1, 0.9]` where `delta` is sampled.
pub const DELTA_POINTS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapOutcome {
    pub verified: bool,
    /// `k delta / c` with `k = ceil(1/t)` and `c` the contraction over time `k t`.
    pub implied_bound: f64,
    pub max_phi: f64,
    pub steps: usize,
    pub contraction: f64,
    /// `phi <= k delta + e^{k t Delta} phi` holds on the grid after `k` iterations.
    pub iterate_holds: bool,
}

/// Checks `phi <= delta + e^{t abar Delta} phi` on the grid of `phi`, then
/// bounds `max phi` by iterating the inequality `k = ceil(1/t)` times.
pub fn bootstrap_bound(phi: &SolutionField, delta: f64, t: f64, abar: f64) -> Result<BootstrapOutcome> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be non-negative")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must lie in (0, 1]")));
    }
    if let Some(v) = phi.values().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("phi must be non-negative, found {v}")));
    }
    let once = heat_propagate(phi, abar, t)?;
    for (i, (p, w)) in phi.values().iter().zip(once.values()).enumerate() {
        let rhs = delta + w;
        if *p > rhs + HYPOTHESIS_TOLERANCE {
            return Err(Error::HypothesisViolated {
                index: i,
                x: phi.x(i),
                phi: *p,
                rhs,
            });
        }
    }
    let steps = (1.0 / t - 1e-12).ceil().max(1.0) as usize;
    let mut iterate = once;
    for _ in 1..steps {
        iterate = heat_propagate(&iterate, abar, t)?;
    }
    let kd = steps as f64 * delta;
    let iterate_holds = phi
        .values()
        .iter()
        .zip(iterate.values())
        .all(|(p, w)| *p <= kd + w + steps as f64 * HYPOTHESIS_TOLERANCE);
    let contraction = contraction_constant(abar, steps as f64 * t, phi.grid_size())?;
    let implied_bound = kd / contraction;
    let max_phi = phi.values().iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(BootstrapOutcome {
        verified: max_phi <= implied_bound,
        implied_bound,
        max_phi,
        steps,
        contraction,
        iterate_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPoint {
    pub x: f64,
    /// `E int_0^{t ^ tau} f - (u - e^{t Delta} u)(x)`
    pub source_term: f64,
    /// `E u_eps(X_{t ^ tau}) - (e^{t Delta} u_eps)(x)`
    pub terminal_term: f64,
    pub stderr: f64,
}

impl DeltaPoint {
    pub fn delta(&self) -> f64 {
        self.source_term.abs() + self.terminal_term.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// Standard error at the maximizing point.
    pub stderr: f64,
    /// `max_x (delta(x) + 3 stderr(x))`, an upper confidence bound for `delta`.
    pub delta_upper: f64,
    pub points: Vec<DeltaPoint>,
    /// `eps (|f| + |f'|) + eps (|u'| + |u_eps'|)` in sup norms.
    pub analytic_bound: f64,
}

/// Measures `delta = max_x |int_0^t int (k_s - l_s) f| + |int (k_t - l_t) u_eps|`
/// over [`DELTA_POINTS`] points, with `k` sampled by paths of the oscillating
/// problem and `l` the homogenized heat kernel.
pub fn delta_estimate(p: &ProblemInstance, t: f64, params: &PathParams) -> Result<DeltaEstimate> {
    let a = p.coefficient();
    let f = p.rhs();
    let eps = p.eps();
    let abar = harmonic_mean(a);
    let sol = ExactSolution::new(p);
    let hom = HomogenizedSolution::with_abar(abar, f);
    let modes = mode_count(abar, t);
    let grid = p.cell_grid();
    let smooth_grid = CellGrid::new(1.0 / 64.0).with_extra_points(&f.breakpoints());
    let u_t = SineSeries::project(|y| hom.value(y), modes, &smooth_grid).propagated(abar, t);
    let ue_t = SineSeries::project(|y| sol.value(y), modes, &grid).propagated(abar, t);
    let params = PathParams {
        horizon: t,
        ..*params
    };
    let points = (0..DELTA_POINTS)
        .map(|j| {
            let x = 0.1 + 0.8 * j as f64 / (DELTA_POINTS - 1) as f64;
            let outcomes = run_ensemble(a, eps, &params.at(x), ((j + 1) as u64) << 32, |y| f.eval(y))?;
            let costs: Vec<f64> = outcomes.iter().map(|o| o.running_cost).collect();
            let ends: Vec<f64> = outcomes
                .iter()
                .map(|o| if o.exit_side.is_some() { 0.0 } else { sol.value(o.endpoint) })
                .collect();
            let (m1, s1) = mean_and_stderr(&costs);
            let (m2, s2) = mean_and_stderr(&ends);
            Ok(DeltaPoint {
                x,
                source_term: m1 - (hom.value(x) - u_t.eval(x)),
                terminal_term: m2 - ue_t.eval(x),
                stderr: (s1 * s1 + s2 * s2).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .max_by(|l, r| l.delta().total_cmp(&r.delta()))
        .expect("at least one point");
    let delta_upper = points
        .iter()
        .map(|q| q.delta() + 3.0 * q.stderr)
        .fold(0.0, f64::max);
    Ok(DeltaEstimate {
        delta: best.delta(),
        stderr: best.stderr,
        delta_upper,
        analytic_bound: analytic_delta_bound(p, &sol, &hom),
        points,
    })
}

fn analytic_delta_bound(p: &ProblemInstance, sol: &ExactSolution, hom: &HomogenizedSolution) -> f64 {
    let f = p.rhs();
    let df = f.derivative_ae();
    let n = 64 * (1.0 / p.eps()).ceil() as usize;
    let sup = |g: &(dyn Fn(f64) -> f64 + Sync)| {
        (0..=n)
            .into_par_iter()
            .map(|i| g(i as f64 / n as f64).abs())
            .reduce(|| 0.0, f64::max)
    };
    let norms = sup(&|x| f.eval(x)) + sup(&|x| df.eval(x));
    let grads = sup(&|x| hom.derivative(x)) + sup(&|x| sol.derivative(x));
    p.eps() * (norms + grads)
}
