//! Moving averages, the affine corrector and sup-norm error metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, PeriodicCoefficient};
use crate::homsolver::{
    moment_m1, moment_m2, ExactSolution, HomogenizedSolution, Provenance, ProblemInstance,
    SolutionField,
};
use crate::quadrature::{CellGrid, QuadratureRule};

/// Threshold below which a corrector coefficient counts as zero.
pub const VANISHING_TOLERANCE: f64 = 1e-12;

fn check_window(x: f64, eps: f64) -> Result<()> {
    let slack = 1e-12;
    if !(eps > 0.0) || x < eps / 2.0 - slack || x > 1.0 - eps / 2.0 + slack {
        return Err(Error::WindowOutOfDomain { x, eps });
    }
    Ok(())
}

/// `(1/eps) int_{x-eps/2}^{x+eps/2} u`, split at multiples of `eps`.
pub fn moving_average(u: impl Fn(f64) -> f64, x: f64, eps: f64) -> Result<f64> {
    moving_average_on(&u, x, eps, &CellGrid::new(eps))
}

/// Moving average with the window split at every break of `grid`.
pub fn moving_average_on<U: Fn(f64) -> f64 + ?Sized>(
    u: &U,
    x: f64,
    eps: f64,
    grid: &CellGrid,
) -> Result<f64> {
    check_window(x, eps)?;
    let lo = (x - eps / 2.0).max(0.0);
    let hi = (x + eps / 2.0).min(1.0);
    Ok(grid.integrate(u, lo, hi, QuadratureRule::standard()) / eps)
}

/// `A_eps u_eps` on the grid points of `[eps/2, 1 - eps/2]`.
pub fn averaged_field(p: &ProblemInstance, n: usize) -> Result<SolutionField> {
    let sol = ExactSolution::new(p);
    let grid = p.cell_grid();
    let eps = p.eps();
    let (first, last) = window_range(n, eps / 2.0);
    if first > last {
        return Err(Error::InvalidParameter(format!(
            "grid with n = {n} has no point whose averaging window fits in [0, 1]"
        )));
    }
    let values = (first..=last)
        .into_par_iter()
        .map(|i| moving_average_on(&|y| sol.value(y), i as f64 / n as f64, eps, &grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionField::new(n, first, values, Provenance::MovingAverage))
}

/// Grid indices `i` with `margin <= i/n <= 1 - margin`.
fn window_range(n: usize, margin: f64) -> (usize, usize) {
    let nf = n as f64;
    let first = (margin * nf - 1e-9).ceil().max(0.0) as usize;
    let last = ((1.0 - margin) * nf + 1e-9).floor().min(nf) as usize;
    (first, last)
}

/// Coefficients of the affine corrector `l_eps(x) = eps (slope x + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corrector {
    pub m1: f64,
    pub m2: f64,
    pub int_f: f64,
    pub int_int_f: f64,
}

impl Corrector {
    pub fn new(a: &PeriodicCoefficient, f: &FunctionSpec) -> Self {
        let big_f = f.antiderivative();
        Corrector {
            m1: moment_m1(a),
            m2: moment_m2(a),
            int_f: big_f.eval(1.0),
            int_int_f: big_f.antiderivative().eval(1.0),
        }
    }

    pub fn slope(&self) -> f64 {
        self.int_f * self.m1
    }

    pub fn offset(&self) -> f64 {
        self.int_int_f * self.m2
    }

    pub fn value(&self, eps: f64, x: f64) -> f64 {
        eps * (self.slope() * x + self.offset())
    }

    pub fn vanishes(&self) -> bool {
        self.slope().abs() <= VANISHING_TOLERANCE && self.offset().abs() <= VANISHING_TOLERANCE
    }
}

/// `l_eps(x) = eps (int f) M1 x + eps (int int f) M2`.
pub fn corrector(a: &PeriodicCoefficient, f: &FunctionSpec, eps: f64, x: f64) -> f64 {
    Corrector::new(a, f).value(eps, x)
}

pub fn corrector_vanishes(a: &PeriodicCoefficient, f: &FunctionSpec) -> bool {
    Corrector::new(a, f).vanishes()
}

/// Sign `s` in `A_eps u_eps + s l_eps - u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorVariant {
    /// `|u_eps - u|`
    Raw,
    /// `|A_eps u_eps - u|`
    Averaged,
    /// `|A_eps u_eps + s l_eps - u|`
    Corrected(Sign),
}

impl ErrorVariant {
    pub fn label(self) -> &'static str {
        match self {
            ErrorVariant::Raw => "raw",
            ErrorVariant::Averaged => "averaged",
            ErrorVariant::Corrected(Sign::Plus) => "corrected+",
            ErrorVariant::Corrected(Sign::Minus) => "corrected-",
        }
    }
}

/// Sup errors of every variant over the grid points of `[eps, 1 - eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorProfile {
    pub eps: f64,
    pub grid_size: usize,
    pub raw: f64,
    pub averaged: f64,
    pub corrected_plus: f64,
    pub corrected_minus: f64,
}

impl ErrorProfile {
    pub fn compute(p: &ProblemInstance, n: usize) -> Result<Self> {
        let eps = p.eps();
        if (n as f64) * eps < 8.0 - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "grid size {n} does not resolve eps = {eps} (need n >= 8/eps)"
            )));
        }
        let sol = ExactSolution::new(p);
        let hom = HomogenizedSolution::new(p.coefficient(), p.rhs());
        let corr = Corrector::new(p.coefficient(), p.rhs());
        let grid = p.cell_grid();
        let (first, last) = window_range(n, eps);
        let rows = (first..=last)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / n as f64;
                let u = hom.value(x);
                let avg = moving_average_on(&|y| sol.value(y), x, eps, &grid)?;
                let l = corr.value(eps, x);
                Ok([
                    (sol.value(x) - u).abs(),
                    (avg - u).abs(),
                    (avg + l - u).abs(),
                    (avg - l - u).abs(),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sup = [0.0f64; 4];
        for r in &rows {
            for (s, v) in sup.iter_mut().zip(r) {
                *s = s.max(*v);
            }
        }
        Ok(ErrorProfile {
            eps,
            grid_size: n,
            raw: sup[0],
            averaged: sup[1],
            corrected_plus: sup[2],
            corrected_minus: sup[3],
        })
    }

    pub fn get(&self, variant: ErrorVariant) -> f64 {
        match variant {
            ErrorVariant::Raw => self.raw,
            ErrorVariant::Averaged => self.averaged,
            ErrorVariant::Corrected(Sign::Plus) => self.corrected_plus,
            ErrorVariant::Corrected(Sign::Minus) => self.corrected_minus,
        }
    }
}

/// Sup over grid points in `[eps, 1 - eps]` of the variant's pointwise error.
pub fn sup_error(p: &ProblemInstance, variant: ErrorVariant, n: usize) -> Result<f64> {
    Ok(ErrorProfile::compute(p, n)?.get(variant))
}

/// Pointwise `|u_eps - u|` on the whole grid, zero at the endpoints.
pub fn raw_error_field(p: &ProblemInstance, n: usize) -> SolutionField {
    let sol = ExactSolution::new(p);
    let hom = HomogenizedSolution::new(p.coefficient(), p.rhs());
    let values = (0..=n)
        .into_par_iter()
        .map(|i| {
            if i == 0 || i == n {
                0.0
            } else {
                let x = i as f64 / n as f64;
                (sol.value(x) - hom.value(x)).abs()
            }
        })
        .collect();
    SolutionField::full(values, Provenance::ExactFormula)
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

    fn codim2() -> FunctionSpec {
        FunctionSpec::polynomial(vec![1.0 / 6.0, -1.0, 1.0])
    }

    #[test]
    fn moving_average_examples() {
        assert_abs_diff_eq!(moving_average(|y| y, 0.3, 0.1).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(
            moving_average(|y| y * y, 0.5, 0.1).unwrap(),
            0.25 + 0.01 / 12.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            moving_average(|y| y * (1.0 - y) / 2.0, 0.5, 0.1).unwrap(),
            0.125 - 0.01 / 24.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn window_must_fit() {
        assert!(matches!(
            moving_average(|y| y, 0.01, 0.1),
            Err(Error::WindowOutOfDomain { .. })
        ));
        assert!(moving_average(|y| y, 0.05, 0.1).is_ok());
        assert!(moving_average(|y| y, 0.95, 0.1).is_ok());
        assert!(moving_average(|y| y, 0.96, 0.1).is_err());
    }

    #[test]
    fn corrector_examples() {
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        assert_abs_diff_eq!(corrector(&cos_reciprocal(), &f, 0.125, 0.3), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(corrector(&sin_reciprocal(), &codim2(), 0.125, 0.3), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            corrector(&sin_reciprocal(), &FunctionSpec::constant(1.0), 0.125, 0.25),
            1.0 / (64.0 * PI),
            epsilon = 1e-15
        );
    }

    #[test]
    fn vanishing_examples() {
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        assert!(corrector_vanishes(&cos_reciprocal(), &f));
        assert!(corrector_vanishes(&sin_reciprocal(), &codim2()));
        assert!(!corrector_vanishes(&sin_reciprocal(), &FunctionSpec::constant(1.0)));
    }

    #[test]
    fn sup_error_constant_case() {
        let a = PeriodicCoefficient::constant(1.0).unwrap();
        let p = ProblemInstance::new(a, FunctionSpec::constant(1.0), 1.0 / 16.0).unwrap();
        let prof = ErrorProfile::compute(&p, 128).unwrap();
        assert!(prof.raw <= 1e-12);
        assert_abs_diff_eq!(prof.averaged, 1.0 / (16.0 * 16.0 * 24.0), epsilon = 1e-10);
    }

    #[test]
    fn sup_error_requires_resolution() {
        let a = PeriodicCoefficient::constant(1.0).unwrap();
        let p = ProblemInstance::new(a, FunctionSpec::constant(1.0), 1.0 / 16.0).unwrap();
        assert!(sup_error(&p, ErrorVariant::Raw, 64).is_err());
    }

    #[test]
    fn corrected_minus_decays_quadratically() {
        let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
        let e = |m: f64| {
            let p = ProblemInstance::new(sin_reciprocal(), f.clone(), 1.0 / m).unwrap();
            sup_error(&p, ErrorVariant::Corrected(Sign::Minus), (8.0 * m) as usize).unwrap()
        };
        let (coarse, fine) = (e(32.0), e(64.0));
        assert!(fine <= 10.0 * coarse / 4.0, "{coarse} -> {fine}");
        assert!(coarse / fine > 3.0, "{coarse} -> {fine}");
    }

    #[test]
    fn averaged_field_layout() {
        let a = PeriodicCoefficient::constant(1.0).unwrap();
        let p = ProblemInstance::new(a, FunctionSpec::constant(1.0), 0.125).unwrap();
        let field = averaged_field(&p, 64).unwrap();
        assert_eq!(field.start(), 4);
        assert_eq!(field.values().len(), 57);
        for (x, v) in field.points() {
            assert_abs_diff_eq!(v, x * (1.0 - x) / 2.0 - 0.125 * 0.125 / 24.0, epsilon = 1e-14);
        }
    }
}
