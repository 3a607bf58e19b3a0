//! Exact and homogenized solutions of `-(a(x/eps) u')' = f` on `(0, 1)` with
//! homogeneous Dirichlet data.
//!
//! The exact solution is evaluated through the explicit formula
//! `u_eps(x) = int_0^x a(y/eps)^{-1} (c_eps - F(y)) dy` with `F = int_0^y f`,
//! where `c_eps` is fixed by `u_eps(1) = 0`. The homogenized solution uses the
//! harmonic mean `abar = (int_0^1 1/a)^{-1}`. An independent conservative
//! finite-difference solver cross-checks the formula.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, PeriodicCoefficient};
use crate::quadrature::{CellGrid, PrefixIntegral, QuadratureRule};
use crate::tridiagonal::solve_tridiagonal;

/// Tolerance for deciding that `1/eps` is an integer.
const INTEGER_TOLERANCE: f64 = 1e-9;

/// Number of Gauss cells per unit period for coefficient moments.
const PERIOD_CELLS: f64 = 64.0;

/// Returns `Some(m)` when `1/eps` is the positive integer `m`.
pub fn inverse_integer(eps: f64) -> Option<usize> {
    let m = 1.0 / eps;
    let r = m.round();
    (r >= 1.0 && (m - r).abs() <= INTEGER_TOLERANCE * r).then_some(r as usize)
}

/// Coefficient, right-hand side and scale of one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    a: PeriodicCoefficient,
    f: FunctionSpec,
    eps: f64,
    relaxed: bool,
}

impl ProblemInstance {
    /// Strict instance: `1/eps` must be a positive integer.
    pub fn new(a: PeriodicCoefficient, f: FunctionSpec, eps: f64) -> Result<Self> {
        f.validate()?;
        if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidScale {
                eps,
                reason: "eps must lie in (0, 1]".into(),
            });
        }
        if inverse_integer(eps).is_none() {
            return Err(Error::InvalidScale {
                eps,
                reason: "1/eps must be a positive integer (use a relaxed instance otherwise)".into(),
            });
        }
        Ok(ProblemInstance {
            a,
            f,
            eps,
            relaxed: false,
        })
    }

    /// Relaxed instance: any `eps` in `(0, 1)`; results are tagged as outside
    /// the theorem's hypotheses when `1/eps` is not an integer.
    pub fn relaxed(a: PeriodicCoefficient, f: FunctionSpec, eps: f64) -> Result<Self> {
        f.validate()?;
        if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidScale {
                eps,
                reason: "eps must lie in (0, 1)".into(),
            });
        }
        Ok(ProblemInstance {
            a,
            f,
            eps,
            relaxed: true,
        })
    }

    pub fn coefficient(&self) -> &PeriodicCoefficient {
        &self.a
    }

    pub fn rhs(&self) -> &FunctionSpec {
        &self.f
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// Integer `1/eps` and a continuous coefficient.
    pub fn within_hypotheses(&self) -> bool {
        inverse_integer(self.eps).is_some() && !self.a.outside_hypotheses()
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        if self.relaxed {
            Self::relaxed(self.a.clone(), self.f.clone(), eps)
        } else {
            Self::new(self.a.clone(), self.f.clone(), eps)
        }
    }

    /// Break points of `a(x/eps)` and of the right-hand side.
    pub fn cell_grid(&self) -> CellGrid {
        CellGrid::with_offsets(self.eps, self.a.kinks()).with_extra_points(&self.f.breakpoints())
    }
}

fn period_grid(a: &PeriodicCoefficient) -> CellGrid {
    let mut kinks = Vec::new();
    for shift in [-1.0, 0.0] {
        kinks.extend(a.kinks().iter().map(|k| k + shift));
    }
    CellGrid::new(1.0 / PERIOD_CELLS).with_extra_points(&kinks)
}

fn period_integral(a: &PeriodicCoefficient, g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    period_grid(a).integrate(&g, lo, hi, QuadratureRule::standard())
}

/// `int_0^1 1/a`.
pub fn inverse_mean(a: &PeriodicCoefficient) -> f64 {
    a.closed_form_inverse_mean()
        .unwrap_or_else(|| period_integral(a, |y| a.eval_inverse(y), 0.0, 1.0))
}

/// Effective coefficient `abar = (int_0^1 1/a)^{-1}`.
pub fn harmonic_mean(a: &PeriodicCoefficient) -> f64 {
    if a.is_constant() {
        return a.eval(0.0);
    }
    1.0 / inverse_mean(a)
}

/// `int_0^1 a`.
pub fn arithmetic_mean(a: &PeriodicCoefficient) -> f64 {
    a.closed_form_mean()
        .unwrap_or_else(|| period_integral(a, |y| a.eval(y), 0.0, 1.0))
}

/// `M1 = int_0^1 a(y)^{-1} (y - 1/2) dy`.
pub fn moment_m1(a: &PeriodicCoefficient) -> f64 {
    period_integral(a, |y| a.eval_inverse(y) * (y - 0.5), 0.0, 1.0)
}

/// `M2 = int_{-1/2}^{1/2} int_0^y a(z)^{-1} dz dy`, with `a` extended periodically.
///
/// Evaluated after integrating by parts:
/// `M2 = (I(1/2) + I(-1/2)) / 2 - int_{-1/2}^{1/2} y a(y)^{-1} dy`, `I(y) = int_0^y 1/a`.
pub fn moment_m2(a: &PeriodicCoefficient) -> f64 {
    let inv = |y: f64| a.eval_inverse(y);
    let right = period_integral(a, inv, 0.0, 0.5);
    let left = -period_integral(a, inv, -0.5, 0.0);
    let first = period_integral(a, |y| y * a.eval_inverse(y), -0.5, 0.5);
    0.5 * (right + left) - first
}

/// First-order expansion `c_eps = c0 + eps c1 + O(eps^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expansion {
    pub c0: f64,
    pub c1: f64,
}

impl Expansion {
    pub fn at(&self, eps: f64) -> f64 {
        self.c0 + eps * self.c1
    }
}

/// `c0 = int_0^1 int_0^y f`, `c1 = abar M1 int_0^1 f`.
pub fn c_eps_asymptotic(a: &PeriodicCoefficient, f: &FunctionSpec) -> Expansion {
    let big_f = f.antiderivative();
    let big_g = big_f.antiderivative();
    Expansion {
        c0: big_g.eval(1.0),
        c1: harmonic_mean(a) * moment_m1(a) * big_f.eval(1.0),
    }
}

type Integrand = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// The exact solution `u_eps` with its prefix table.
pub struct ExactSolution {
    a: PeriodicCoefficient,
    big_f: FunctionSpec,
    eps: f64,
    c: f64,
    table: PrefixIntegral<Integrand>,
}

impl ExactSolution {
    pub fn new(p: &ProblemInstance) -> Self {
        let grid = p.cell_grid();
        let rule = QuadratureRule::standard();
        let eps = p.eps;
        let big_f = p.f.antiderivative();
        let a = p.a.clone();
        let weight = grid.integrate(&|y: f64| a.eval_inverse(y / eps), 0.0, 1.0, rule);
        let loaded = grid.integrate(&|y: f64| a.eval_inverse(y / eps) * big_f.eval(y), 0.0, 1.0, rule);
        // u(1) = 0 fixes c; equals abar * loaded whenever 1/eps is an integer
        let c = loaded / weight;
        let (ai, fi) = (a.clone(), big_f.clone());
        let integrand: Integrand = Box::new(move |y| ai.eval_inverse(y / eps) * (c - fi.eval(y)));
        let table = PrefixIntegral::new(integrand, &grid, 0.0, 1.0);
        ExactSolution {
            a,
            big_f,
            eps,
            c,
            table,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn c_eps(&self) -> f64 {
        self.c
    }

    pub fn value(&self, x: f64) -> f64 {
        self.table.at(x)
    }

    /// `u_eps'(x) = a(x/eps)^{-1} (c_eps - F(x))`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.a.eval_inverse(x / self.eps) * (self.c - self.big_f.eval(x))
    }

    /// Flux `a(x/eps) u_eps'(x) + int_0^x f`, constant and equal to `c_eps`.
    pub fn flux_plus_load(&self, x: f64) -> f64 {
        self.a.eval(x / self.eps) * self.derivative(x) + self.big_f.eval(x)
    }

    pub fn field(&self, n: usize) -> SolutionField {
        let mut values: Vec<f64> = (0..=n).map(|i| self.value(i as f64 / n as f64)).collect();
        values[0] = 0.0;
        values[n] = 0.0;
        SolutionField::new(n, 0, values, Provenance::ExactFormula)
    }
}

/// `c_eps` by quadrature of the explicit formula.
pub fn c_eps(p: &ProblemInstance) -> f64 {
    ExactSolution::new(p).c_eps()
}

/// Single evaluation of `u_eps(x)`; build an [`ExactSolution`] for repeated use.
pub fn u_eps(p: &ProblemInstance, x: f64) -> f64 {
    ExactSolution::new(p).value(x)
}

/// Homogenized solution `u(x) = (c0 x - int_0^x int_0^y f) / abar`.
#[derive(Debug, Clone)]
pub struct HomogenizedSolution {
    abar: f64,
    c0: f64,
    big_f: FunctionSpec,
    big_g: FunctionSpec,
}

impl HomogenizedSolution {
    pub fn new(a: &PeriodicCoefficient, f: &FunctionSpec) -> Self {
        Self::with_abar(harmonic_mean(a), f)
    }

    pub fn with_abar(abar: f64, f: &FunctionSpec) -> Self {
        let big_f = f.antiderivative();
        let big_g = big_f.antiderivative();
        HomogenizedSolution {
            abar,
            c0: big_g.eval(1.0),
            big_f,
            big_g,
        }
    }

    pub fn abar(&self) -> f64 {
        self.abar
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.c0 * x - self.big_g.eval(x)) / self.abar
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.c0 - self.big_f.eval(x)) / self.abar
    }

    pub fn field(&self, n: usize) -> SolutionField {
        let mut values: Vec<f64> = (0..=n).map(|i| self.value(i as f64 / n as f64)).collect();
        values[0] = 0.0;
        values[n] = 0.0;
        SolutionField::new(n, 0, values, Provenance::Homogenized)
    }
}

pub fn u_hom(a: &PeriodicCoefficient, f: &FunctionSpec, x: f64) -> f64 {
    HomogenizedSolution::new(a, f).value(x)
}

/// How a [`SolutionField`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactFormula,
    Homogenized,
    FiniteDifference,
    MovingAverage,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::ExactFormula => "exact-formula",
            Provenance::Homogenized => "homogenized",
            Provenance::FiniteDifference => "finite-difference",
            Provenance::MovingAverage => "moving-average",
        }
    }
}

/// Samples `values[j]` at `x = (start + j) / n` of the uniform grid `i / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    n: usize,
    start: usize,
    values: Vec<f64>,
    provenance: Provenance,
}

impl SolutionField {
    pub fn new(n: usize, start: usize, values: Vec<f64>, provenance: Provenance) -> Self {
        assert!(n >= 1 && start + values.len() <= n + 1, "field does not fit its grid");
        SolutionField {
            n,
            start,
            values,
            provenance,
        }
    }

    /// Field on the whole grid `i / n`, `i = 0..=n`.
    pub fn full(values: Vec<f64>, provenance: Provenance) -> Self {
        let n = values.len() - 1;
        Self::new(n, 0, values, provenance)
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn x(&self, j: usize) -> f64 {
        (self.start + j) as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(j, v)| (self.x(j), *v))
    }

    pub fn covers_full_grid(&self) -> bool {
        self.start == 0 && self.values.len() == self.n + 1
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Default evaluation grid: a multiple of `8/eps` points, at least 1000.
pub fn default_grid_size(eps: f64) -> usize {
    match inverse_integer(eps) {
        Some(m) => {
            let base = 8 * m;
            base * 1000usize.div_ceil(base)
        }
        None => 1000usize.max((8.0 / eps).ceil() as usize),
    }
}

/// Conservative finite-difference solve on `x_i = i/n`.
///
/// Face coefficients are harmonic means of `a(x/eps)` over `[x_i, x_{i+1}]`;
/// the load is `f(x_i)`.
pub fn fd_oracle(p: &ProblemInstance, n: usize) -> Result<SolutionField> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "finite-difference grid needs n >= 2, got {n}"
        )));
    }
    let h = 1.0 / n as f64;
    let grid = p.cell_grid();
    let rule = QuadratureRule::standard();
    let eps = p.eps;
    let faces: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i as f64 * h;
            let hi = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
            let resistance = grid.integrate(&|y: f64| p.a.eval_inverse(y / eps), lo, hi, rule);
            (hi - lo) / resistance
        })
        .collect();
    let interior = n - 1;
    let mut diag = Vec::with_capacity(interior);
    let mut rhs = Vec::with_capacity(interior);
    let mut off = Vec::with_capacity(interior.saturating_sub(1));
    for i in 1..n {
        diag.push(faces[i - 1] + faces[i]);
        rhs.push(h * h * p.f.eval(i as f64 * h));
        if i + 1 < n {
            off.push(-faces[i]);
        }
    }
    let u = solve_tridiagonal(&off, &diag, &off, &rhs)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(u);
    values.push(0.0);
    Ok(SolutionField::new(n, 0, values, Provenance::FiniteDifference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sin_reciprocal() -> PeriodicCoefficient {
        PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0])).unwrap()
    }

    fn cos_reciprocal() -> PeriodicCoefficient {
        PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![1.0], vec![])).unwrap()
    }

    fn one() -> FunctionSpec {
        FunctionSpec::constant(1.0)
    }

    /// Brute-force midpoint double integral; shares nothing with the library path.
    fn m2_brute_force(inv: impl Fn(f64) -> f64, n: usize) -> f64 {
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        let mut inner = 0.0;
        // y from 0 up to 1/2
        for j in 0..n / 2 {
            let y0 = j as f64 * h;
            let half = inner + inv(y0 + 0.25 * h) * 0.5 * h;
            total += half * h;
            inner += inv(y0 + 0.5 * h) * h;
        }
        inner = 0.0;
        for j in 0..n / 2 {
            let y0 = -(j as f64) * h;
            let half = inner - inv(y0 - 0.25 * h) * 0.5 * h;
            total += half * h;
            inner -= inv(y0 - 0.5 * h) * h;
        }
        total
    }

    #[test]
    fn integer_scale_detection() {
        assert_eq!(inverse_integer(0.125), Some(8));
        assert_eq!(inverse_integer(1.0 / 3.0), Some(3));
        assert_eq!(inverse_integer(0.3), None);
        let a = PeriodicCoefficient::constant(1.0).unwrap();
        assert!(ProblemInstance::new(a.clone(), one(), 0.3).is_err());
        let relaxed = ProblemInstance::relaxed(a, one(), 0.3).unwrap();
        assert!(!relaxed.within_hypotheses());
    }

    #[test]
    fn harmonic_mean_examples() {
        assert_eq!(harmonic_mean(&PeriodicCoefficient::constant(2.5).unwrap()), 2.5);
        assert_abs_diff_eq!(harmonic_mean(&sin_reciprocal()), 0.5, epsilon = 1e-15);
        // profile route: a = 1/(2 + sin) given directly needs quadrature
        let profile = PeriodicCoefficient::from_profile(FunctionSpec::piecewise_constant(
            vec![0.0, 0.5, 1.0],
            vec![1.0, 2.0],
        ))
        .unwrap();
        assert_abs_diff_eq!(harmonic_mean(&profile), 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn moment_m1_examples() {
        assert_abs_diff_eq!(moment_m1(&PeriodicCoefficient::constant(3.0).unwrap()), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(moment_m1(&cos_reciprocal()), 0.0, epsilon = 1e-15);
        // int_0^1 x sin(2 pi x) dx = -1/(2 pi)
        assert_abs_diff_eq!(moment_m1(&sin_reciprocal()), -1.0 / (2.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn moment_m2_examples() {
        assert_abs_diff_eq!(moment_m2(&PeriodicCoefficient::constant(3.0).unwrap()), 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(moment_m2(&cos_reciprocal()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(moment_m2(&sin_reciprocal()), 1.0 / (2.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn moment_m2_matches_nested_brute_force() {
        let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(
            1.7,
            vec![0.2, -0.1],
            vec![0.5, 0.3],
        ))
        .unwrap();
        let brute = m2_brute_force(|y| a.eval_inverse(y), 200_000);
        assert_abs_diff_eq!(moment_m2(&a), brute, epsilon = 1e-9);

        let pc = PeriodicCoefficient::from_profile(FunctionSpec::piecewise_constant(
            vec![0.0, 0.3, 1.0],
            vec![1.0, 4.0],
        ))
        .unwrap();
        let brute = m2_brute_force(|y| pc.eval_inverse(y), 200_000);
        assert_abs_diff_eq!(moment_m2(&pc), brute, epsilon = 1e-9);
    }

    #[test]
    fn c_eps_examples() {
        let a1 = PeriodicCoefficient::constant(1.0).unwrap();
        let p = ProblemInstance::new(a1, one(), 0.125).unwrap();
        assert_abs_diff_eq!(c_eps(&p), 0.5, epsilon = 1e-15);
        for m in [4.0, 8.0] {
            let eps = 1.0 / m;
            let p = ProblemInstance::new(sin_reciprocal(), one(), eps).unwrap();
            assert_abs_diff_eq!(c_eps(&p), 0.5 - eps / (4.0 * PI), epsilon = 1e-14);
        }
    }

    #[test]
    fn c_eps_asymptotic_examples() {
        let e = c_eps_asymptotic(&PeriodicCoefficient::constant(1.0).unwrap(), &one());
        assert_abs_diff_eq!(e.c0, 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(e.c1, 0.0, epsilon = 1e-16);
        let e = c_eps_asymptotic(&sin_reciprocal(), &one());
        assert_abs_diff_eq!(e.c0, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.c1, -1.0 / (4.0 * PI), epsilon = 1e-15);
        let codim2 = FunctionSpec::polynomial(vec![1.0 / 6.0, -1.0, 1.0]);
        let e = c_eps_asymptotic(&sin_reciprocal(), &codim2);
        assert_abs_diff_eq!(e.c0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.c1, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn u_eps_examples() {
        let a1 = PeriodicCoefficient::constant(1.0).unwrap();
        for m in [2.0, 8.0, 32.0] {
            let p = ProblemInstance::new(a1.clone(), one(), 1.0 / m).unwrap();
            let sol = ExactSolution::new(&p);
            assert_abs_diff_eq!(sol.value(0.5), 0.125, epsilon = 1e-15);
            assert_abs_diff_eq!(sol.value(0.0), 0.0, epsilon = 1e-16);
            assert_abs_diff_eq!(sol.value(1.0), 0.0, epsilon = 1e-15);
        }
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        let p = ProblemInstance::new(sin_reciprocal(), f, 1.0 / 16.0).unwrap();
        let sol = ExactSolution::new(&p);
        assert!(sol.value(1.0).abs() < 1e-11);
    }

    #[test]
    fn flux_is_constant() {
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        let p = ProblemInstance::new(sin_reciprocal(), f, 1.0 / 8.0).unwrap();
        let sol = ExactSolution::new(&p);
        let h = 1e-6;
        for i in 1..50 {
            let x = i as f64 / 50.0;
            assert_abs_diff_eq!(sol.flux_plus_load(x), sol.c_eps(), epsilon = 1e-12);
            // quadrature derivative of the table
            let d = (sol.value(x + h) - sol.value(x - h)) / (2.0 * h);
            let flux = p.coefficient().eval(x / p.eps()) * d + p.rhs().antiderivative().eval(x);
            assert_abs_diff_eq!(flux, sol.c_eps(), epsilon = 1e-8);
        }
    }

    #[test]
    fn u_hom_examples() {
        let a1 = PeriodicCoefficient::constant(1.0).unwrap();
        assert_abs_diff_eq!(u_hom(&a1, &one(), 0.5), 0.125, epsilon = 1e-16);
        assert_abs_diff_eq!(u_hom(&sin_reciprocal(), &one(), 0.5), 0.25, epsilon = 1e-15);
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        assert_abs_diff_eq!(u_hom(&a1, &f, 0.5), 1.0 / (PI * PI), epsilon = 1e-15);
    }

    #[test]
    fn constant_coefficient_exact_equals_homogenized() {
        let a = PeriodicCoefficient::constant(0.7).unwrap();
        let f = FunctionSpec::trig_with_period(0.3, vec![0.2], vec![1.0], 2.0);
        let hom = HomogenizedSolution::new(&a, &f);
        for m in [1.0, 4.0, 16.0] {
            let p = ProblemInstance::new(a.clone(), f.clone(), 1.0 / m).unwrap();
            let sol = ExactSolution::new(&p);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                assert_abs_diff_eq!(sol.value(x), hom.value(x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fd_oracle_constant_case() {
        let a1 = PeriodicCoefficient::constant(1.0).unwrap();
        let p = ProblemInstance::new(a1, one(), 0.125).unwrap();
        let field = fd_oracle(&p, 100).unwrap();
        let dev = field
            .points()
            .map(|(x, v)| (v - x * (1.0 - x) / 2.0).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-4, "deviation {dev}");
    }

    #[test]
    fn fd_oracle_matches_formula_and_converges_quadratically() {
        let f = FunctionSpec::polynomial(vec![1.0, 0.0, -3.0]);
        let p = ProblemInstance::new(sin_reciprocal(), f, 1.0 / 8.0).unwrap();
        let sol = ExactSolution::new(&p);
        let dev = |n: usize| {
            let field = fd_oracle(&p, n).unwrap();
            field
                .points()
                .map(|(x, v)| (v - sol.value(x)).abs())
                .fold(0.0, f64::max)
        };
        let coarse = dev(1000);
        let fine = dev(2000);
        let ratio = coarse / fine;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn default_grid_resolves_cells() {
        assert_eq!(default_grid_size(1.0 / 8.0), 1024);
        assert_eq!(default_grid_size(1.0 / 256.0), 2048);
        assert_eq!(default_grid_size(1.0 / 125.0), 1000);
        assert_eq!(default_grid_size(0.3), 1000);
    }
}
