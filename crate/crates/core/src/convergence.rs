//! Sweeps over `eps` and log-log rate fits.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{ErrorProfile, ErrorVariant, Sign};
use crate::error::{Error, Result};
use crate::funcspec::{FunctionSpec, PeriodicCoefficient};
use crate::homsolver::{default_grid_size, ProblemInstance};

/// Errors at or below this are treated as exact zeros and left out of fits.
pub const EXACT_THRESHOLD: f64 = 1e-13;

/// Corrected rates at or above this confirm second-order convergence.
pub const SECOND_ORDER_THRESHOLD: f64 = 1.85;

pub const DEFAULT_LADDER: [f64; 6] = [
    1.0 / 8.0,
    1.0 / 16.0,
    1.0 / 32.0,
    1.0 / 64.0,
    1.0 / 128.0,
    1.0 / 256.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub residual: f64,
    /// Points used by the fit.
    pub used: usize,
}

/// Least-squares slope of `ln error` against `ln eps`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(e, err)| *e > 0.0 && *err > EXACT_THRESHOLD)
        .map(|(e, err)| (e.ln(), err.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::DegenerateFit {
            positive: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit { positive: 1 });
    }
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let residual = logs
        .iter()
        .map(|(x, y)| (y - intercept - rate * x).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        rate,
        intercept,
        residual,
        used: logs.len(),
    })
}

/// Outcome of fitting one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateSummary {
    /// Every error is below [`EXACT_THRESHOLD`].
    Exact,
    Fitted(RateFit),
    /// Some but fewer than three positive errors.
    Unfitted { positive: usize },
}

impl RateSummary {
    pub fn of(points: &[(f64, f64)]) -> Self {
        match fit_rate(points) {
            Ok(fit) => RateSummary::Fitted(fit),
            Err(Error::DegenerateFit { positive: 0 }) => RateSummary::Exact,
            Err(Error::DegenerateFit { positive }) => RateSummary::Unfitted { positive },
            Err(_) => RateSummary::Unfitted { positive: 0 },
        }
    }

    pub fn rate(&self) -> Option<f64> {
        match self {
            RateSummary::Fitted(f) => Some(f.rate),
            _ => None,
        }
    }

    /// Exact, or fitted with at least the given rate.
    pub fn at_least(&self, threshold: f64) -> bool {
        match self {
            RateSummary::Exact => true,
            RateSummary::Fitted(f) => f.rate >= threshold,
            RateSummary::Unfitted { .. } => false,
        }
    }
}

/// Variants a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantRequest {
    Raw,
    Averaged,
    CorrectedPlus,
    CorrectedMinus,
    /// Corrected with the sign chosen by calibration.
    Corrected,
}

impl VariantRequest {
    pub fn label(self) -> &'static str {
        match self {
            VariantRequest::Raw => "raw",
            VariantRequest::Averaged => "averaged",
            VariantRequest::CorrectedPlus => "corrected+",
            VariantRequest::CorrectedMinus => "corrected-",
            VariantRequest::Corrected => "corrected",
        }
    }

    fn resolve(self, calibrated: Sign) -> ErrorVariant {
        match self {
            VariantRequest::Raw => ErrorVariant::Raw,
            VariantRequest::Averaged => ErrorVariant::Averaged,
            VariantRequest::CorrectedPlus => ErrorVariant::Corrected(Sign::Plus),
            VariantRequest::CorrectedMinus => ErrorVariant::Corrected(Sign::Minus),
            VariantRequest::Corrected => ErrorVariant::Corrected(calibrated),
        }
    }
}

/// Which corrector sign reaches second order on this sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCalibration {
    pub sign: Sign,
    pub plus: RateSummary,
    pub minus: RateSummary,
    /// The chosen sign reaches [`SECOND_ORDER_THRESHOLD`].
    pub confirmed: bool,
}

impl SignCalibration {
    pub fn from_profiles(profiles: &[ErrorProfile]) -> Self {
        let series = |s: Sign| -> Vec<(f64, f64)> {
            profiles
                .iter()
                .map(|p| (p.eps, p.get(ErrorVariant::Corrected(s))))
                .collect()
        };
        let plus = RateSummary::of(&series(Sign::Plus));
        let minus = RateSummary::of(&series(Sign::Minus));
        let score = |r: &RateSummary| match r {
            RateSummary::Exact => f64::INFINITY,
            RateSummary::Fitted(f) => f.rate,
            RateSummary::Unfitted { .. } => f64::NEG_INFINITY,
        };
        // ties (vanishing corrector) go to the minus sign
        let sign = if score(&plus) > score(&minus) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let chosen = if sign == Sign::Plus { plus } else { minus };
        SignCalibration {
            sign,
            plus,
            minus,
            confirmed: chosen.at_least(SECOND_ORDER_THRESHOLD),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub request: VariantRequest,
    pub variant: ErrorVariant,
    pub points: Vec<(f64, f64)>,
    pub summary: RateSummary,
}

impl Series {
    pub fn error_at(&self, eps: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|(e, _)| (e - eps).abs() <= 1e-12 * eps)
            .map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub description: String,
    pub eps: Vec<f64>,
    pub profiles: Vec<ErrorProfile>,
    pub series: Vec<Series>,
    pub calibration: SignCalibration,
}

impl ConvergenceReport {
    pub fn series(&self, request: VariantRequest) -> Option<&Series> {
        self.series.iter().find(|s| s.request == request)
    }

    /// Rows `variant,eps,sup_error`, ordered by variant request then decreasing eps.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,eps,sup_error\n");
        for s in &self.series {
            for (e, err) in &s.points {
                writeln!(out, "{},{:.16e},{:.16e}", s.request.label(), e, err).unwrap();
            }
        }
        out
    }

    /// Rows `variant,rate,intercept,residual,sign`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("variant,rate,intercept,residual,sign\n");
        for s in &self.series {
            let sign = match s.variant {
                ErrorVariant::Corrected(sg) => sg.symbol(),
                _ => "",
            };
            let (rate, intercept, residual) = match s.summary {
                RateSummary::Fitted(f) => (
                    format!("{:.16e}", f.rate),
                    format!("{:.16e}", f.intercept),
                    format!("{:.16e}", f.residual),
                ),
                RateSummary::Exact => ("exact".into(), String::new(), String::new()),
                RateSummary::Unfitted { .. } => ("unfitted".into(), String::new(), String::new()),
            };
            writeln!(out, "{},{},{},{},{}", s.request.label(), rate, intercept, residual, sign).unwrap();
        }
        out
    }
}

/// Sweep options.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOptions {
    /// Fixed grid size; `None` picks [`default_grid_size`] per `eps`.
    pub grid_size: Option<usize>,
    /// Accept non-integer `1/eps`.
    pub relaxed: bool,
}

/// Sup errors for every `eps` and variant, rate fits and sign calibration.
pub fn sweep(
    a: &PeriodicCoefficient,
    f: &FunctionSpec,
    eps_list: &[f64],
    variants: &[VariantRequest],
) -> Result<ConvergenceReport> {
    sweep_with(a, f, eps_list, variants, &SweepOptions::default())
}

pub fn sweep_with(
    a: &PeriodicCoefficient,
    f: &FunctionSpec,
    eps_list: &[f64],
    variants: &[VariantRequest],
    options: &SweepOptions,
) -> Result<ConvergenceReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("eps list is empty".into()));
    }
    if variants.is_empty() {
        return Err(Error::InvalidParameter("no variants requested".into()));
    }
    let mut eps: Vec<f64> = eps_list.to_vec();
    eps.sort_by(|x, y| y.total_cmp(x));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("eps list contains duplicates".into()));
    }
    let instances = eps
        .iter()
        .map(|&e| {
            let p = if options.relaxed {
                ProblemInstance::relaxed(a.clone(), f.clone(), e)
            } else {
                ProblemInstance::new(a.clone(), f.clone(), e)
            };
            p.map_err(|source| Error::Instance {
                eps: e,
                source: Box::new(source),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let profiles = instances
        .par_iter()
        .map(|p| {
            let n = options.grid_size.unwrap_or_else(|| default_grid_size(p.eps()));
            ErrorProfile::compute(p, n).map_err(|source| Error::Instance {
                eps: p.eps(),
                source: Box::new(source),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let calibration = SignCalibration::from_profiles(&profiles);
    let series = variants
        .iter()
        .map(|&request| {
            let variant = request.resolve(calibration.sign);
            let points: Vec<(f64, f64)> = profiles.iter().map(|p| (p.eps, p.get(variant))).collect();
            Series {
                request,
                variant,
                summary: RateSummary::of(&points),
                points,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        description: describe(a, f),
        eps,
        profiles,
        series,
        calibration,
    })
}

fn describe(a: &PeriodicCoefficient, f: &FunctionSpec) -> String {
    let a_json = serde_json::to_string(a.spec()).unwrap_or_default();
    let f_json = serde_json::to_string(f).unwrap_or_default();
    format!("coefficient ({:?}) {a_json}; rhs {f_json}", a.convention())
}
