//! Euler-Maruyama paths of `dX = a'(X/eps)/eps dt + sqrt(2 a(X/eps)) dW`,
//! stopped at the first exit from `(0, 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspec::PeriodicCoefficient;

/// Simulation parameters for one path ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathParams {
    pub x0: f64,
    /// Horizon `t`.
    pub horizon: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
}

impl PathParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0 < 1.0) {
            return Err(Error::InvalidParameter(format!("x0 = {} must lie in (0, 1)", self.x0)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon t = {} must be positive", self.horizon)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if self.paths == 0 {
            return Err(Error::InvalidParameter("path count must be positive".into()));
        }
        Ok(())
    }

    pub fn at(&self, x0: f64) -> PathParams {
        PathParams { x0, ..*self }
    }

    /// Number of steps and the uniform step that lands exactly on the horizon.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.horizon / n as f64)
    }
}

/// Checks `dt <= eps^2/10` for oscillating coefficients and that `a'` exists.
pub fn check_step(a: &PeriodicCoefficient, eps: f64, dt: f64) -> Result<()> {
    if !a.is_differentiable() {
        return Err(Error::NonDifferentiable);
    }
    let limit = eps * eps / 10.0;
    if !a.is_constant() && dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

/// Source of standard normal increments.
pub trait NormalSource {
    fn next_normal(&mut self) -> f64;
}

/// ChaCha8 stream `stream` of the master seed.
#[derive(Debug, Clone)]
pub struct SeededNormals(ChaCha8Rng);

impl SeededNormals {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededNormals(rng)
    }
}

impl NormalSource for SeededNormals {
    #[inline]
    fn next_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}

/// Always zero: turns the SDE into its drift ODE.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl NormalSource for ZeroNoise {
    fn next_normal(&mut self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathOutcome {
    /// Position at the horizon, or the exit endpoint.
    pub endpoint: f64,
    pub exit_time: Option<f64>,
    pub exit_side: Option<Side>,
    /// Left-point sum of `f(X_s) ds` up to `min(t, exit time)`.
    pub running_cost: f64,
}

/// One stopped Euler-Maruyama path. `cost` is accrued at the left end of each
/// step taken while the path is inside `(0, 1)`.
pub fn simulate_path<N: NormalSource, C: Fn(f64) -> f64>(
    a: &PeriodicCoefficient,
    eps: f64,
    params: &PathParams,
    normals: &mut N,
    cost: C,
) -> Result<PathOutcome> {
    params.validate()?;
    check_step(a, eps, params.dt)?;
    Ok(run_path(a, eps, params, normals, cost))
}

/// [`simulate_path`] without validation.
pub(crate) fn run_path<N: NormalSource, C: Fn(f64) -> f64>(
    a: &PeriodicCoefficient,
    eps: f64,
    params: &PathParams,
    normals: &mut N,
    cost: C,
) -> PathOutcome {
    let (steps, h) = params.steps();
    let sqrt_h = h.sqrt();
    let inv_eps = 1.0 / eps;
    let mut x = params.x0;
    let mut acc = 0.0;
    for k in 0..steps {
        let (av, dv) = a
            .value_and_derivative(x * inv_eps)
            .expect("differentiability checked");
        acc += cost(x) * h;
        x += dv * inv_eps * h + (2.0 * av).sqrt() * sqrt_h * normals.next_normal();
        if x <= 0.0 || x >= 1.0 {
            let side = if x <= 0.0 { Side::Left } else { Side::Right };
            return PathOutcome {
                endpoint: if side == Side::Left { 0.0 } else { 1.0 },
                exit_time: Some((k + 1) as f64 * h),
                exit_side: Some(side),
                running_cost: acc,
            };
        }
    }
    PathOutcome {
        endpoint: x,
        exit_time: None,
        exit_side: None,
        running_cost: acc,
    }
}

/// Mean of a per-path quantity with its standard error and exit statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: usize,
    pub absorbed_left: f64,
    pub absorbed_right: f64,
}

impl MCEstimate {
    /// `(mean - target) / stderr`; zero when both sides agree exactly.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Sum in fixed binary-tree order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Mean and standard error of `values`, both reduced pairwise in index order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `params.paths` paths in parallel; path `i` uses stream
/// `stream_base + i` of the master seed, so results do not depend on the
/// worker count.
pub fn run_ensemble<C>(
    a: &PeriodicCoefficient,
    eps: f64,
    params: &PathParams,
    stream_base: u64,
    cost: C,
) -> Result<Vec<PathOutcome>>
where
    C: Fn(f64) -> f64 + Sync,
{
    params.validate()?;
    check_step(a, eps, params.dt)?;
    Ok((0..params.paths)
        .into_par_iter()
        .map(|i| {
            let mut normals = SeededNormals::new(params.seed, stream_base + i as u64);
            run_path(a, eps, params, &mut normals, &cost)
        })
        .collect())
}

/// Reduces per-path `value(outcome)` to an [`MCEstimate`].
pub fn summarize(outcomes: &[PathOutcome], value: impl Fn(&PathOutcome) -> f64) -> MCEstimate {
    let values: Vec<f64> = outcomes.iter().map(value).collect();
    let (mean, stderr) = mean_and_stderr(&values);
    let n = outcomes.len() as f64;
    let left = outcomes.iter().filter(|o| o.exit_side == Some(Side::Left)).count();
    let right = outcomes.iter().filter(|o| o.exit_side == Some(Side::Right)).count();
    MCEstimate {
        mean,
        stderr,
        paths: outcomes.len(),
        absorbed_left: left as f64 / n,
        absorbed_right: right as f64 / n,
    }
}

/// Monte Carlo mean of `min(t, exit time)`.
pub fn mean_exit_time(a: &PeriodicCoefficient, eps: f64, params: &PathParams) -> Result<MCEstimate> {
    let outcomes = run_ensemble(a, eps, params, 0, |_| 0.0)?;
    Ok(summarize(&outcomes, |o| o.exit_time.unwrap_or(params.horizon)))
}
