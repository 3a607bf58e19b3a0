//! Structured scalar functions on `[0, 1]` with closed-form calculus.
//!
//! [`FunctionSpec`] covers the function classes used for the coefficient
//! profile and the right-hand side: constants, polynomials, trigonometric
//! series, piecewise-constant and piecewise-polynomial functions, and finite
//! sums of those. Every class is closed under antidifferentiation, so
//! integrals of the data are exact.
//!
//! [`PeriodicCoefficient`] wraps a profile (or its reciprocal) as a 1-periodic
//! coefficient with a certified positive lower bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn unit_period() -> f64 {
    1.0
}

/// A scalar function from one of the supported closed-form classes.
///
/// Serialized as a tagged object, e.g.
/// `{"type":"trig","mean":2.0,"sin":[1.0],"cos":[]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    /// Coefficients in ascending degree.
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// `mean + sum_k cos[k-1] cos(k w x) + sin[k-1] sin(k w x)` with
    /// `w = 2 pi / period`. Missing entries in the shorter list are zero.
    Trig {
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
        #[serde(default = "unit_period")]
        period: f64,
    },
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// One polynomial per piece, each in the absolute variable `x`.
    PiecewisePolynomial {
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn constant(value: f64) -> Self {
        FunctionSpec::Constant { value }
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        FunctionSpec::Polynomial { coefficients }
    }

    /// Trigonometric series with base frequency `2 pi`.
    pub fn trig(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        FunctionSpec::Trig {
            mean,
            cos,
            sin,
            period: 1.0,
        }
    }

    pub fn trig_with_period(mean: f64, cos: Vec<f64>, sin: Vec<f64>, period: f64) -> Self {
        FunctionSpec::Trig {
            mean,
            cos,
            sin,
            period,
        }
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        FunctionSpec::PiecewiseConstant {
            breakpoints,
            values,
        }
    }

    pub fn sum(terms: Vec<FunctionSpec>) -> Self {
        FunctionSpec::Sum { terms }
    }

    /// Checks the structural invariants of every variant.
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64], what: &str| -> Result<()> {
            if v.iter().all(|c| c.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidFunction(format!("{what} must be finite")))
            }
        };
        match self {
            FunctionSpec::Constant { value } => finite(&[*value], "constant value"),
            FunctionSpec::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidFunction(
                        "polynomial coefficient list is empty".into(),
                    ));
                }
                finite(coefficients, "polynomial coefficients")
            }
            FunctionSpec::Trig {
                mean,
                cos,
                sin,
                period,
            } => {
                finite(&[*mean], "trig mean")?;
                finite(cos, "cosine coefficients")?;
                finite(sin, "sine coefficients")?;
                if !(period.is_finite() && *period > 0.0) {
                    return Err(Error::InvalidFunction(format!(
                        "trig period must be positive, got {period}"
                    )));
                }
                Ok(())
            }
            FunctionSpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                check_breakpoints(breakpoints, values.len())?;
                finite(values, "piecewise values")
            }
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => {
                check_breakpoints(breakpoints, pieces.len())?;
                for p in pieces {
                    if p.is_empty() {
                        return Err(Error::InvalidFunction("empty polynomial piece".into()));
                    }
                    finite(p, "piece coefficients")?;
                }
                Ok(())
            }
            FunctionSpec::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidFunction("sum has no terms".into()));
                }
                terms.iter().try_for_each(FunctionSpec::validate)
            }
        }
    }

    /// Pointwise value. Piecewise functions are extended by their first/last
    /// piece outside `[0, 1]`; a breakpoint belongs to the piece on its right.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Polynomial { coefficients } => horner(coefficients, x),
            FunctionSpec::Trig {
                mean,
                cos,
                sin,
                period,
            } => mean + trig_sum(cos, sin, 2.0 * PI / period, x),
            FunctionSpec::PiecewiseConstant {
                breakpoints,
                values,
            } => values[piece_index(breakpoints, x)],
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => horner(&pieces[piece_index(breakpoints, x)], x),
            FunctionSpec::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
        }
    }

    /// Antiderivative `G` with `G(0) = 0` and `G' = self` away from breakpoints.
    pub fn antiderivative(&self) -> FunctionSpec {
        match self {
            FunctionSpec::Constant { value } => FunctionSpec::polynomial(vec![0.0, *value]),
            FunctionSpec::Polynomial { coefficients } => {
                FunctionSpec::polynomial(poly_antiderivative(coefficients))
            }
            FunctionSpec::Trig {
                mean,
                cos,
                sin,
                period,
            } => {
                let w = 2.0 * PI / period;
                let n = cos.len().max(sin.len());
                let mut new_cos = vec![0.0; n];
                let mut new_sin = vec![0.0; n];
                let mut offset = 0.0;
                for k in 0..n {
                    let kw = (k + 1) as f64 * w;
                    let c = cos.get(k).copied().unwrap_or(0.0);
                    let s = sin.get(k).copied().unwrap_or(0.0);
                    // c cos -> c sin / kw ; s sin -> -s cos / kw (+ s / kw so G(0) = 0)
                    new_sin[k] = c / kw;
                    new_cos[k] = -s / kw;
                    offset += s / kw;
                }
                let oscillatory = FunctionSpec::Trig {
                    mean: offset,
                    cos: new_cos,
                    sin: new_sin,
                    period: *period,
                };
                if *mean == 0.0 {
                    oscillatory
                } else {
                    FunctionSpec::sum(vec![
                        FunctionSpec::polynomial(vec![0.0, *mean]),
                        oscillatory,
                    ])
                }
            }
            FunctionSpec::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let pieces = values.iter().map(|v| vec![*v]).collect::<Vec<_>>();
                piecewise_antiderivative(breakpoints, &pieces)
            }
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => piecewise_antiderivative(breakpoints, pieces),
            FunctionSpec::Sum { terms } => {
                FunctionSpec::sum(terms.iter().map(FunctionSpec::antiderivative).collect())
            }
        }
    }

    /// Derivative almost everywhere; piecewise classes differentiate piece by
    /// piece and ignore the jumps.
    pub fn derivative_ae(&self) -> FunctionSpec {
        match self {
            FunctionSpec::Constant { .. } => FunctionSpec::constant(0.0),
            FunctionSpec::Polynomial { coefficients } => {
                FunctionSpec::polynomial(poly_derivative(coefficients))
            }
            FunctionSpec::Trig {
                cos, sin, period, ..
            } => {
                let w = 2.0 * PI / period;
                let n = cos.len().max(sin.len());
                let mut new_cos = vec![0.0; n];
                let mut new_sin = vec![0.0; n];
                for k in 0..n {
                    let kw = (k + 1) as f64 * w;
                    new_cos[k] = kw * sin.get(k).copied().unwrap_or(0.0);
                    new_sin[k] = -kw * cos.get(k).copied().unwrap_or(0.0);
                }
                FunctionSpec::Trig {
                    mean: 0.0,
                    cos: new_cos,
                    sin: new_sin,
                    period: *period,
                }
            }
            FunctionSpec::PiecewiseConstant {
                breakpoints,
                values,
            } => FunctionSpec::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: vec![0.0; values.len()],
            },
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => FunctionSpec::PiecewisePolynomial {
                breakpoints: breakpoints.clone(),
                pieces: pieces.iter().map(|p| poly_derivative(p)).collect(),
            },
            FunctionSpec::Sum { terms } => {
                FunctionSpec::sum(terms.iter().map(FunctionSpec::derivative_ae).collect())
            }
        }
    }

    /// `(g(x), g'(x))` in one pass; `None` for the piecewise classes.
    pub(crate) fn value_and_slope(&self, x: f64) -> Option<(f64, f64)> {
        match self {
            FunctionSpec::Constant { value } => Some((*value, 0.0)),
            FunctionSpec::Polynomial { coefficients } => Some(horner_with_slope(coefficients, x)),
            FunctionSpec::Trig {
                mean,
                cos,
                sin,
                period,
            } => {
                let (v, d) = trig_sum_with_slope(cos, sin, 2.0 * PI / period, x);
                Some((mean + v, d))
            }
            FunctionSpec::Sum { terms } => terms.iter().try_fold((0.0, 0.0), |(v, d), t| {
                let (tv, td) = t.value_and_slope(x)?;
                Some((v + tv, d + td))
            }),
            FunctionSpec::PiecewiseConstant { .. } | FunctionSpec::PiecewisePolynomial { .. } => None,
        }
    }

    /// Classical derivative; fails for the piecewise classes.
    pub fn derivative(&self) -> Result<FunctionSpec> {
        if self.is_piecewise() {
            Err(Error::NonDifferentiable)
        } else {
            Ok(self.derivative_ae())
        }
    }

    pub fn is_piecewise(&self) -> bool {
        match self {
            FunctionSpec::PiecewiseConstant { .. } | FunctionSpec::PiecewisePolynomial { .. } => {
                true
            }
            FunctionSpec::Sum { terms } => terms.iter().any(FunctionSpec::is_piecewise),
            _ => false,
        }
    }

    /// True for functions that do not depend on `x` at all.
    pub fn is_constant(&self) -> bool {
        match self {
            FunctionSpec::Constant { .. } => true,
            FunctionSpec::Polynomial { coefficients } => coefficients[1..].iter().all(|c| *c == 0.0),
            FunctionSpec::Trig { cos, sin, .. } => {
                cos.iter().chain(sin.iter()).all(|c| *c == 0.0)
            }
            FunctionSpec::PiecewiseConstant { values, .. } => {
                values.iter().all(|v| *v == values[0])
            }
            FunctionSpec::PiecewisePolynomial { pieces, .. } => pieces
                .iter()
                .all(|p| p[1..].iter().all(|c| *c == 0.0) && p[0] == pieces[0][0]),
            FunctionSpec::Sum { terms } => terms.iter().all(FunctionSpec::is_constant),
        }
    }

    /// Interior breakpoints in `(0, 1)` where the function or its derivative may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            FunctionSpec::PiecewiseConstant { breakpoints, .. }
            | FunctionSpec::PiecewisePolynomial { breakpoints, .. } => {
                out.extend(
                    breakpoints
                        .iter()
                        .copied()
                        .filter(|b| *b > 0.0 && *b < 1.0),
                );
            }
            FunctionSpec::Sum { terms } => {
                for t in terms {
                    t.collect_breakpoints(out);
                }
            }
            _ => {}
        }
    }

    /// Upper bound on `|g''|` over `[lo, hi]` (within one smooth piece).
    fn second_derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        let reach = lo.abs().max(hi.abs());
        match self {
            FunctionSpec::Constant { .. } => 0.0,
            FunctionSpec::Polynomial { coefficients } => poly_d2_bound(coefficients, reach),
            FunctionSpec::Trig {
                cos, sin, period, ..
            } => {
                let w = 2.0 * PI / period;
                (0..cos.len().max(sin.len()))
                    .map(|k| {
                        let kw = (k + 1) as f64 * w;
                        let amp = cos.get(k).map_or(0.0, |c| c.abs())
                            + sin.get(k).map_or(0.0, |s| s.abs());
                        amp * kw * kw
                    })
                    .sum()
            }
            FunctionSpec::PiecewiseConstant { .. } => 0.0,
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => {
                let mid = 0.5 * (lo + hi);
                poly_d2_bound(&pieces[piece_index(breakpoints, mid)], reach)
            }
            FunctionSpec::Sum { terms } => terms
                .iter()
                .map(|t| t.second_derivative_bound(lo, hi))
                .sum(),
        }
    }

    /// Rigorous lower bound on `min_{[0,1]} g`, within `1e-10` of the true minimum.
    ///
    /// Piecewise-constant classes are exact; smooth pieces use branch and
    /// bound with a second-order Taylor bound.
    pub fn lower_bound(&self) -> f64 {
        if let FunctionSpec::PiecewiseConstant { values, .. } = self {
            return values.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let mut edges = vec![0.0];
        edges.extend(self.breakpoints());
        edges.push(1.0);
        let deriv = self.derivative_ae();
        edges
            .windows(2)
            .map(|w| {
                // stay strictly inside the piece so lookups pick the right branch
                let (lo, hi) = (w[0], w[1]);
                let m2 = self.second_derivative_bound(lo, hi);
                let inner_hi = if hi < 1.0 { prev_float(hi) } else { hi };
                branch_and_bound_min(|x| self.eval(x), |x| deriv.eval(x), m2, lo, inner_hi)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Rigorous upper bound on `max_{[0,1]} g`, within `1e-10`.
    pub fn upper_bound(&self) -> f64 {
        -self.negated().lower_bound()
    }

    pub fn negated(&self) -> FunctionSpec {
        match self {
            FunctionSpec::Constant { value } => FunctionSpec::constant(-value),
            FunctionSpec::Polynomial { coefficients } => {
                FunctionSpec::polynomial(coefficients.iter().map(|c| -c).collect())
            }
            FunctionSpec::Trig {
                mean,
                cos,
                sin,
                period,
            } => FunctionSpec::Trig {
                mean: -mean,
                cos: cos.iter().map(|c| -c).collect(),
                sin: sin.iter().map(|c| -c).collect(),
                period: *period,
            },
            FunctionSpec::PiecewiseConstant {
                breakpoints,
                values,
            } => FunctionSpec::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|c| -c).collect(),
            },
            FunctionSpec::PiecewisePolynomial {
                breakpoints,
                pieces,
            } => FunctionSpec::PiecewisePolynomial {
                breakpoints: breakpoints.clone(),
                pieces: pieces
                    .iter()
                    .map(|p| p.iter().map(|c| -c).collect())
                    .collect(),
            },
            FunctionSpec::Sum { terms } => {
                FunctionSpec::sum(terms.iter().map(FunctionSpec::negated).collect())
            }
        }
    }
}

/// Exact `int_lo^hi g` through the closed-form antiderivative.
pub fn definite_integral(g: &FunctionSpec, lo: f64, hi: f64) -> f64 {
    let big_g = g.antiderivative();
    big_g.eval(hi) - big_g.eval(lo)
}

/// Certified minimum of `g` over `[0, 1]`; rejects non-positive functions.
pub fn certified_minimum(g: &FunctionSpec) -> Result<f64> {
    let m = g.lower_bound();
    if m > 0.0 {
        Ok(m)
    } else {
        Err(Error::NonPositiveCoefficient { minimum: m })
    }
}

fn check_breakpoints(breakpoints: &[f64], pieces: usize) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidFunction(
            "piecewise function needs at least two breakpoints".into(),
        ));
    }
    if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
        return Err(Error::InvalidFunction(
            "breakpoints must start at 0 and end at 1".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidFunction(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    if pieces + 1 != breakpoints.len() {
        return Err(Error::InvalidFunction(format!(
            "{} breakpoints need {} pieces, got {pieces}",
            breakpoints.len(),
            breakpoints.len() - 1
        )));
    }
    Ok(())
}

fn piece_index(breakpoints: &[f64], x: f64) -> usize {
    let last = breakpoints.len() - 2;
    breakpoints.partition_point(|b| *b <= x).saturating_sub(1).min(last)
}

fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn trig_sum(cos: &[f64], sin: &[f64], w: f64, x: f64) -> f64 {
    let n = cos.len().max(sin.len());
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        // single harmonic: skip the unused half of sin_cos
        let c = cos.first().copied().unwrap_or(0.0);
        let s = sin.first().copied().unwrap_or(0.0);
        return match (c == 0.0, s == 0.0) {
            (true, _) => s * (w * x).sin(),
            (_, true) => c * (w * x).cos(),
            _ => {
                let (sv, cv) = (w * x).sin_cos();
                c * cv + s * sv
            }
        };
    }
    let (s1, c1) = (w * x).sin_cos();
    let (mut s, mut c) = (s1, c1);
    let mut total = 0.0;
    for k in 0..n {
        if k > 0 {
            // angle addition keeps one sin_cos call per evaluation; the
            // series used here are short, so drift stays at rounding level
            if k % 8 == 0 {
                let (sk, ck) = ((k + 1) as f64 * w * x).sin_cos();
                s = sk;
                c = ck;
            } else {
                let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
                s = sn;
                c = cn;
            }
        }
        total += cos.get(k).copied().unwrap_or(0.0) * c + sin.get(k).copied().unwrap_or(0.0) * s;
    }
    total
}

/// `(g(x), g'(x))` for a trig series with a single `sin_cos` call.
fn trig_sum_with_slope(cos: &[f64], sin: &[f64], w: f64, x: f64) -> (f64, f64) {
    let n = cos.len().max(sin.len());
    let (s1, c1) = (w * x).sin_cos();
    let (mut s, mut c) = (s1, c1);
    let (mut value, mut slope) = (0.0, 0.0);
    for k in 0..n {
        if k > 0 {
            if k % 8 == 0 {
                let (sk, ck) = ((k + 1) as f64 * w * x).sin_cos();
                s = sk;
                c = ck;
            } else {
                let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
                s = sn;
                c = cn;
            }
        }
        let a = cos.get(k).copied().unwrap_or(0.0);
        let b = sin.get(k).copied().unwrap_or(0.0);
        value += a * c + b * s;
        slope += (k + 1) as f64 * w * (b * c - a * s);
    }
    (value, slope)
}

fn horner_with_slope(coefficients: &[f64], x: f64) -> (f64, f64) {
    coefficients
        .iter()
        .rev()
        .fold((0.0, 0.0), |(v, d), c| (v * x + c, d * x + v))
}

fn poly_antiderivative(coefficients: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(coefficients.len() + 1);
    out.push(0.0);
    out.extend(
        coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k + 1) as f64),
    );
    out
}

fn poly_derivative(coefficients: &[f64]) -> Vec<f64> {
    if coefficients.len() <= 1 {
        return vec![0.0];
    }
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn poly_d2_bound(coefficients: &[f64], reach: f64) -> f64 {
    coefficients
        .iter()
        .enumerate()
        .skip(2)
        .map(|(k, c)| c.abs() * (k * (k - 1)) as f64 * reach.powi(k as i32 - 2))
        .sum()
}

fn piecewise_antiderivative(breakpoints: &[f64], pieces: &[Vec<f64>]) -> FunctionSpec {
    let mut out = Vec::with_capacity(pieces.len());
    let mut running = 0.0;
    for (j, p) in pieces.iter().enumerate() {
        let mut q = poly_antiderivative(p);
        let (lo, hi) = (breakpoints[j], breakpoints[j + 1]);
        q[0] = running - horner(&q, lo);
        running = horner(&q, hi);
        out.push(q);
    }
    FunctionSpec::PiecewisePolynomial {
        breakpoints: breakpoints.to_vec(),
        pieces: out,
    }
}

fn prev_float(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

const BOUND_TOLERANCE: f64 = 1e-10;

fn branch_and_bound_min(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    m2: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    const INITIAL_CELLS: usize = 1024;
    let width = (hi - lo) / INITIAL_CELLS as f64;
    let mut stack: Vec<(f64, f64)> = (0..INITIAL_CELLS)
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == INITIAL_CELLS { hi } else { a + width };
            (a, b)
        })
        .collect();
    let mut best_upper = g(lo).min(g(hi));
    for &(a, b) in &stack {
        best_upper = best_upper.min(g(0.5 * (a + b)));
    }
    let mut certified = f64::INFINITY;
    while let Some((a, b)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let w = b - a;
        let gm = g(mid);
        best_upper = best_upper.min(gm);
        let bound = gm - dg(mid).abs() * 0.5 * w - m2 * w * w / 8.0;
        if bound >= best_upper - BOUND_TOLERANCE || w < 1e-13 {
            certified = certified.min(bound);
        } else {
            stack.push((a, mid));
            stack.push((mid, b));
        }
    }
    certified.min(best_upper)
}

/// Which function the coefficient's [`FunctionSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// The spec is the profile `a` itself.
    #[default]
    Profile,
    /// The spec is `1/a`; closed-form moments become available.
    Reciprocal,
}

/// A strictly positive, 1-periodic coefficient `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficient {
    spec: FunctionSpec,
    convention: Convention,
    lower_bound: f64,
    derivative: Option<FunctionSpec>,
    kinks: Vec<f64>,
}

impl PeriodicCoefficient {
    pub fn new(spec: FunctionSpec, convention: Convention) -> Result<Self> {
        spec.validate()?;
        check_unit_periodic(&spec)?;
        let lower_bound = match convention {
            Convention::Profile => certified_minimum(&spec)?,
            Convention::Reciprocal => {
                certified_minimum(&spec)?;
                1.0 / spec.upper_bound()
            }
        };
        let derivative = spec.derivative().ok();
        let kinks = spec.breakpoints();
        Ok(PeriodicCoefficient {
            spec,
            convention,
            lower_bound,
            derivative,
            kinks,
        })
    }

    /// Coefficient given by its profile `a`.
    pub fn from_profile(spec: FunctionSpec) -> Result<Self> {
        Self::new(spec, Convention::Profile)
    }

    /// Coefficient given by its reciprocal `1/a`.
    pub fn from_reciprocal(spec: FunctionSpec) -> Result<Self> {
        Self::new(spec, Convention::Reciprocal)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::from_profile(FunctionSpec::constant(value))
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Certified `min a > 0`.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// Interior kinks of one period, in `(0, 1)`.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn is_constant(&self) -> bool {
        self.spec.is_constant()
    }

    /// True when the coefficient is discontinuous (piecewise profile, or a
    /// polynomial whose periodic extension jumps at the integers).
    pub fn outside_hypotheses(&self) -> bool {
        if self.spec.is_piecewise() {
            return true;
        }
        let at = |y: f64| self.spec.eval(y);
        (at(0.0) - at(1.0)).abs() > 1e-12 * (1.0 + at(0.0).abs())
    }

    /// `a(z)` for any real `z`, via `z mod 1`.
    pub fn eval(&self, z: f64) -> f64 {
        let g = self.spec.eval(reduce_unit(z));
        match self.convention {
            Convention::Profile => g,
            Convention::Reciprocal => 1.0 / g,
        }
    }

    /// `1/a(z)` for any real `z`.
    pub fn eval_inverse(&self, z: f64) -> f64 {
        let g = self.spec.eval(reduce_unit(z));
        match self.convention {
            Convention::Profile => 1.0 / g,
            Convention::Reciprocal => g,
        }
    }

    /// `a'(z)`; fails for piecewise coefficients.
    pub fn derivative(&self, z: f64) -> Result<f64> {
        let d = self.derivative.as_ref().ok_or(Error::NonDifferentiable)?;
        let y = reduce_unit(z);
        Ok(match self.convention {
            Convention::Profile => d.eval(y),
            Convention::Reciprocal => {
                let g = self.spec.eval(y);
                -d.eval(y) / (g * g)
            }
        })
    }

    /// `a(z)` and `a'(z)` from a single profile evaluation pass.
    pub(crate) fn value_and_derivative(&self, z: f64) -> Option<(f64, f64)> {
        let (g, dg) = self.spec.value_and_slope(reduce_unit(z))?;
        Some(match self.convention {
            Convention::Profile => (g, dg),
            Convention::Reciprocal => (1.0 / g, -dg / (g * g)),
        })
    }

    pub fn is_differentiable(&self) -> bool {
        self.derivative.is_some()
    }

    /// Closed-form `int_0^1 1/a` when the reciprocal was supplied.
    pub fn closed_form_inverse_mean(&self) -> Option<f64> {
        match self.convention {
            Convention::Reciprocal => Some(definite_integral(&self.spec, 0.0, 1.0)),
            Convention::Profile => None,
        }
    }

    /// Closed-form `int_0^1 a` when the profile was supplied.
    pub fn closed_form_mean(&self) -> Option<f64> {
        match self.convention {
            Convention::Profile => Some(definite_integral(&self.spec, 0.0, 1.0)),
            Convention::Reciprocal => None,
        }
    }
}

/// `a((x/eps) mod 1)`, valid for negative `x`.
pub fn eval_periodic_scaled(a: &PeriodicCoefficient, x: f64, eps: f64) -> f64 {
    a.eval(x / eps)
}

fn reduce_unit(z: f64) -> f64 {
    let y = z - z.floor();
    // tiny negative inputs round up to exactly 1.0
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

fn check_unit_periodic(spec: &FunctionSpec) -> Result<()> {
    match spec {
        FunctionSpec::Trig { period, .. } => {
            let harmonics = 1.0 / period;
            if (harmonics - harmonics.round()).abs() > 1e-12 || harmonics.round() < 1.0 {
                return Err(Error::InvalidFunction(format!(
                    "coefficient profile must be 1-periodic; trig period {period} does not divide 1"
                )));
            }
            Ok(())
        }
        FunctionSpec::Sum { terms } => terms.iter().try_for_each(check_unit_periodic),
        _ => Ok(()),
    }
}
