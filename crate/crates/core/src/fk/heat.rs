//! Dirichlet heat semigroup `e^{t abar d^2/dx^2}` on `(0, 1)` by sine series.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::homsolver::{Provenance, SolutionField};
use crate::quadrature::{CellGrid, QuadratureRule};

/// Modes beyond `abar k^2 pi^2 t > SPECTRAL_CUTOFF` are below `e^{-40}` and dropped.
const SPECTRAL_CUTOFF: f64 = 40.0;

/// Discrete sine transform (type I) of the interior values of a grid function
/// on `i/n`: `b_k = (2/n) sum_i phi_i sin(k pi i / n)`, `k = 1..n-1`.
fn dst1(values: &[f64], n: usize, table: &[f64]) -> Vec<f64> {
    let two_n = 2 * n;
    (1..n)
        .map(|k| {
            let mut s = 0.0;
            let mut idx = 0usize;
            for v in &values[1..n] {
                idx += k;
                if idx >= two_n {
                    idx -= two_n;
                }
                s += v * table[idx];
            }
            2.0 * s / n as f64
        })
        .collect()
}

fn sine_table(n: usize) -> Vec<f64> {
    (0..2 * n).map(|m| (PI * m as f64 / n as f64).sin()).collect()
}

/// `w(t) = sum_k b_k e^{-abar k^2 pi^2 t} sin(k pi x)` on the grid of `phi`.
pub fn heat_propagate(phi: &SolutionField, abar: f64, t: f64) -> Result<SolutionField> {
    if !phi.covers_full_grid() {
        return Err(Error::InvalidParameter(
            "heat propagation needs values on the whole grid".into(),
        ));
    }
    let n = phi.grid_size();
    let v = phi.values();
    if v[0] != 0.0 || v[n] != 0.0 {
        return Err(Error::InvalidParameter(
            "heat propagation needs zero boundary values".into(),
        ));
    }
    if !(t >= 0.0) || !(abar > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "heat propagation needs t >= 0 and abar > 0 (t = {t}, abar = {abar})"
        )));
    }
    if n < 2 {
        return Ok(phi.clone());
    }
    let table = sine_table(n);
    let mut b = dst1(v, n, &table);
    for (j, bk) in b.iter_mut().enumerate() {
        let k = (j + 1) as f64;
        *bk *= (-abar * k * k * PI * PI * t).exp();
    }
    // DST-I is its own inverse up to the factor n/2
    let mut padded = vec![0.0; n + 1];
    padded[1..n].copy_from_slice(&b);
    let back = dst1(&padded, n, &table);
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        out[i] = back[i - 1] * n as f64 / 2.0;
    }
    Ok(SolutionField::full(out, phi.provenance()))
}

/// The constant-one interior profile on `i/n`.
pub fn interior_ones(n: usize) -> SolutionField {
    let mut v = vec![1.0; n + 1];
    v[0] = 0.0;
    v[n] = 0.0;
    SolutionField::full(v, Provenance::Homogenized)
}

/// `c = 1 - max e^{t abar Delta} 1`, on the grid `i/n`.
pub fn contraction_constant(abar: f64, t: f64, n: usize) -> Result<f64> {
    let w = heat_propagate(&interior_ones(n), abar, t)?;
    Ok(1.0 - w.values().iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)))
}

/// Number of modes needed for time `t`.
pub fn mode_count(abar: f64, t: f64) -> usize {
    let k = (SPECTRAL_CUTOFF / (abar * PI * PI * t)).sqrt().ceil();
    (k.max(8.0) as usize).min(1 << 16)
}

/// Continuum sine series `sum_k b_k sin(k pi x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    coefficients: Vec<f64>,
}

impl SineSeries {
    pub fn new(coefficients: Vec<f64>) -> Self {
        SineSeries { coefficients }
    }

    /// `b_k = 2 int_0^1 g(y) sin(k pi y) dy`, `k = 1..=modes`, on the breaks of `grid`.
    pub fn project(g: impl Fn(f64) -> f64, modes: usize, grid: &CellGrid) -> Self {
        let rule = QuadratureRule::standard();
        let breaks = grid.breaks(0.0, 1.0);
        let mut b = vec![0.0; modes];
        for w in breaks.windows(2) {
            for (y, wt) in rule.mapped(w[0], w[1]) {
                let gy = g(y) * wt;
                for (j, bk) in b.iter_mut().enumerate() {
                    *bk += 2.0 * gy * ((j + 1) as f64 * PI * y).sin();
                }
            }
        }
        SineSeries { coefficients: b }
    }

    /// Heat kernel `l_t(x, .)` with diffusivity `abar`, as a series in `y`.
    pub fn heat_kernel(x: f64, abar: f64, t: f64) -> Self {
        let modes = mode_count(abar, t);
        SineSeries {
            coefficients: (1..=modes)
                .map(|k| {
                    let k = k as f64;
                    2.0 * (k * PI * x).sin() * (-abar * k * k * PI * PI * t).exp()
                })
                .collect(),
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, b)| b * ((j + 1) as f64 * PI * x).sin())
            .sum()
    }

    /// `int_lo^hi` of the series.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let kp = (j + 1) as f64 * PI;
                b * ((kp * lo).cos() - (kp * hi).cos()) / kp
            })
            .sum()
    }

    /// Applies `e^{t abar Delta}` mode by mode.
    pub fn propagated(&self, abar: f64, t: f64) -> Self {
        SineSeries {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let k = (j + 1) as f64;
                    b * (-abar * k * k * PI * PI * t).exp()
                })
                .collect(),
        }
    }
}

/// `int_lo^hi l_t(x, y) dy` for the Dirichlet heat kernel with diffusivity `abar`.
pub fn heat_cell_mass(x: f64, lo: f64, hi: f64, abar: f64, t: f64) -> f64 {
    SineSeries::heat_kernel(x, abar, t).integral(lo, hi)
}
