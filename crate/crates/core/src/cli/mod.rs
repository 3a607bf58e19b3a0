//! Command-line front end: one verb per experiment, configured by a JSON file.
//!
//! Every verb writes CSV files (17 significant digits) into the output
//! directory and, with `--svg` or `"output": {"svg": true}`, an SVG figure.
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or usage,
//! 3 numerical precondition or solver failure.

mod config;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{BootstrapConfig, CoefficientConfig, ExperimentConfig, MonteCarloConfig, OutputConfig};

use crate::averaging::{averaged_field, raw_error_field, Corrector};
use crate::convergence::{sweep_with, ConvergenceReport, RateSummary, SweepOptions, VariantRequest};
use crate::error::Error;
use crate::fk::{bootstrap_bound, cell_mass_check, delta_estimate, fk_estimate_u_eps, PathParams};
use crate::funcspec::PeriodicCoefficient;
use crate::homsolver::{default_grid_size, harmonic_mean, ExactSolution, HomogenizedSolution, ProblemInstance, SolutionField};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(.path, *.line, *.column, .field.as_deref(), .message))]
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
        field: Option<String>,
        message: String,
    },
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Plot(String),
}

fn config_message(path: &Path, line: usize, column: usize, field: Option<&str>, message: &str) -> String {
    let mut out = path.display().to_string();
    if line > 0 {
        write!(out, ":{line}:{column}").unwrap();
    }
    if let Some(f) = field {
        write!(out, ": {f}").unwrap();
    }
    write!(out, ": {message}").unwrap();
    out
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Plot(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "homog1d", version, about = "One-dimensional periodic homogenization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and homogenized solutions on a grid
    Solve(RunArgs),
    /// Moving average of the exact solution
    Average(RunArgs),
    /// Moments and coefficients of the affine corrector, per eps
    Corrector(RunArgs),
    /// Sup errors over the eps ladder with fitted rates
    Converge(RunArgs),
    /// Monte Carlo check of the Feynman-Kac identity at one point
    FkVerify(RunArgs),
    /// Cell masses of the oscillating diffusion against the homogenized kernel
    CellMass(RunArgs),
    /// Measured delta and the heat-semigroup bootstrap bound
    Bootstrap(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment configuration (JSON)
    pub config: PathBuf,
    /// Replace the configured eps list by this single value
    #[arg(long)]
    pub eps: Option<f64>,
    /// Master seed for Monte Carlo verbs
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths
    #[arg(long)]
    pub paths: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG figure
    #[arg(long)]
    pub svg: bool,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Solve(a)
            | Command::Average(a)
            | Command::Corrector(a)
            | Command::Converge(a)
            | Command::FkVerify(a)
            | Command::CellMass(a)
            | Command::Bootstrap(a) => a,
        }
    }

    /// The verb as typed on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Average(_) => "average",
            Command::Corrector(_) => "corrector",
            Command::Converge(_) => "converge",
            Command::FkVerify(_) => "fk-verify",
            Command::CellMass(_) => "cell-mass",
            Command::Bootstrap(_) => "bootstrap",
        }
    }
}

/// Parses arguments, runs the verb and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Loads the configuration, applies flag overrides and runs one verb.
/// Returns the files written.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let args = command.args();
    let mut config = ExperimentConfig::load(&args.config)?;
    apply_overrides(&mut config, args)?;
    let ctx = Context::new(config, args.svg)?;
    match command {
        Command::Solve(_) => ctx.solve(),
        Command::Average(_) => ctx.average(),
        Command::Corrector(_) => ctx.corrector(),
        Command::Converge(_) => ctx.converge(),
        Command::FkVerify(_) => ctx.fk_verify(),
        Command::CellMass(_) => ctx.cell_mass(),
        Command::Bootstrap(_) => ctx.bootstrap(),
    }
}

fn apply_overrides(config: &mut ExperimentConfig, args: &RunArgs) -> Result<(), CliError> {
    if let Some(e) = args.eps {
        config.eps = vec![e];
    }
    if let Some(s) = args.seed {
        config.monte_carlo.seed = s;
    }
    if let Some(n) = args.paths {
        config.monte_carlo.paths = n;
        config.bootstrap.paths = Some(n);
    }
    if let Some(dir) = &args.out {
        config.output.dir = dir.clone();
    }
    config.validate().map_err(|(field, message)| CliError::Config {
        path: args.config.clone(),
        line: 0,
        column: 0,
        field: Some(field),
        message: format!("{message} (after command-line overrides)"),
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Context {
    config: ExperimentConfig,
    a: PeriodicCoefficient,
    svg: bool,
}

impl Context {
    fn new(config: ExperimentConfig, svg_flag: bool) -> Result<Self, CliError> {
        let a = PeriodicCoefficient::new(config.coefficient.spec.clone(), config.coefficient.convention)?;
        let svg = svg_flag || config.output.svg;
        Ok(Context { config, a, svg })
    }

    fn eps(&self) -> f64 {
        self.config.eps[0]
    }

    fn instance(&self, eps: f64) -> Result<ProblemInstance, CliError> {
        let p = if self.config.relaxed {
            ProblemInstance::relaxed(self.a.clone(), self.config.rhs.clone(), eps)
        } else {
            ProblemInstance::new(self.a.clone(), self.config.rhs.clone(), eps)
        };
        Ok(p?)
    }

    fn grid_size(&self, eps: f64) -> usize {
        self.config.grid_size.unwrap_or_else(|| default_grid_size(eps))
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let dir = &self.config.output.dir;
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    fn params(&self, paths: usize) -> PathParams {
        let mc = &self.config.monte_carlo;
        PathParams {
            x0: mc.x,
            horizon: mc.t,
            dt: mc.dt,
            paths,
            seed: mc.seed,
        }
    }

    fn solve(&self) -> Result<Vec<PathBuf>, CliError> {
        let eps = self.eps();
        let p = self.instance(eps)?;
        let n = self.grid_size(eps);
        let exact = ExactSolution::new(&p).field(n);
        let hom = HomogenizedSolution::new(&self.a, p.rhs()).field(n);
        let mut wide = String::from("x,u_eps,u_hom\n");
        for ((x, ue), (_, u)) in exact.points().zip(hom.points()) {
            writeln!(wide, "{},{},{}", num(x), num(ue), num(u)).unwrap();
        }
        let max_diff = exact
            .values()
            .iter()
            .zip(hom.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("eps = {eps}, n = {n}, max |u_eps - u_hom| = {max_diff:.3e}");
        let mut files = vec![
            self.write("solve.csv", &wide)?,
            self.write("solution.csv", &field_csv(&[&exact, &hom]))?,
        ];
        if self.svg {
            let avg = averaged_field(&p, n)?;
            let series = [&exact, &hom, &avg].map(|f| svg::LineSeries {
                label: f.provenance().label().to_string(),
                points: f.points().collect(),
            });
            let title = format!("solutions, eps = {eps}");
            let doc = svg::line_plot(&title, "x", "u", &series).map_err(|e| CliError::Plot(e.to_string()))?;
            files.push(self.write("solve.svg", &doc)?);
        }
        Ok(files)
    }

    fn average(&self) -> Result<Vec<PathBuf>, CliError> {
        let eps = self.eps();
        let p = self.instance(eps)?;
        let n = self.grid_size(eps);
        let avg = averaged_field(&p, n)?;
        println!(
            "eps = {eps}, n = {n}, averaged on {} points of [eps/2, 1 - eps/2]",
            avg.values().len()
        );
        let mut files = vec![self.write("average.csv", &field_csv(&[&avg]))?];
        if self.svg {
            let hom = HomogenizedSolution::new(&self.a, p.rhs()).field(n);
            let series = [&avg, &hom].map(|f| svg::LineSeries {
                label: f.provenance().label().to_string(),
                points: f.points().collect(),
            });
            let doc = svg::line_plot("moving average", "x", "u", &series).map_err(|e| CliError::Plot(e.to_string()))?;
            files.push(self.write("average.svg", &doc)?);
        }
        Ok(files)
    }

    fn corrector(&self) -> Result<Vec<PathBuf>, CliError> {
        let c = Corrector::new(&self.a, &self.config.rhs);
        let mut csv = String::from("eps,m1,m2,int_f,int_int_f,slope,offset,vanishes\n");
        for &eps in &self.config.eps {
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                num(eps),
                num(c.m1),
                num(c.m2),
                num(c.int_f),
                num(c.int_int_f),
                num(eps * c.slope()),
                num(eps * c.offset()),
                c.vanishes()
            )
            .unwrap();
        }
        println!(
            "M1 = {:.12e}, M2 = {:.12e}, corrector vanishes: {}",
            c.m1,
            c.m2,
            c.vanishes()
        );
        Ok(vec![self.write("corrector.csv", &csv)?])
    }

    fn converge(&self) -> Result<Vec<PathBuf>, CliError> {
        let options = SweepOptions {
            grid_size: self.config.grid_size,
            relaxed: self.config.relaxed,
        };
        let report = sweep_with(&self.a, &self.config.rhs, &self.config.eps, &self.config.variants, &options)?;
        print_summary(&report);
        let mut files = vec![
            self.write("convergence.csv", &report.to_csv())?,
            self.write("convergence_summary.csv", &report.summary_csv())?,
        ];
        if self.svg {
            // variants reported as exact have nothing to show on a log scale
            let series: Vec<_> = report
                .series
                .iter()
                .filter(|s| !matches!(s.summary, RateSummary::Exact))
                .map(|s| svg::ScatterSeries {
                    label: s.request.label().to_string(),
                    points: s.points.clone(),
                    fit: match s.summary {
                        RateSummary::Fitted(f) => Some((f.rate, f.intercept)),
                        _ => None,
                    },
                })
                .collect();
            let doc = svg::loglog_scatter("sup error against eps", "eps", "sup error", &series)
                .map_err(|e| CliError::Plot(e.to_string()))?;
            files.push(self.write("convergence.svg", &doc)?);
        }
        Ok(files)
    }

    fn fk_verify(&self) -> Result<Vec<PathBuf>, CliError> {
        let eps = self.eps();
        let p = self.instance(eps)?;
        let params = self.params(self.config.monte_carlo.paths);
        let est = fk_estimate_u_eps(&p, &params)?;
        let exact = ExactSolution::new(&p).value(params.x0);
        let z = est.z_score(exact);
        println!(
            "u_eps({}) = {exact:.10}, Monte Carlo {:.10} +- {:.2e}, z = {z:.3}",
            params.x0, est.mean, est.stderr
        );
        let mut csv = String::from("x,eps,t,dt,paths,seed,mc_mean,stderr,u_eps,z,absorbed_left,absorbed_right\n");
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            num(params.x0),
            num(eps),
            num(params.horizon),
            num(params.dt),
            params.paths,
            params.seed,
            num(est.mean),
            num(est.stderr),
            num(exact),
            num(z),
            num(est.absorbed_left),
            num(est.absorbed_right)
        )
        .unwrap();
        Ok(vec![self.write("fk_verify.csv", &csv)?])
    }

    fn cell_mass(&self) -> Result<Vec<PathBuf>, CliError> {
        let eps = self.eps();
        self.instance(eps)?;
        let params = self.params(self.config.monte_carlo.paths);
        let table = cell_mass_check(&self.a, eps, &params)?;
        println!(
            "x = {}, t = {}, {} cells, max interior |z| = {:.3}, total probability {:.15}",
            table.x,
            table.t,
            table.cells.len(),
            table.max_interior_z(),
            table.total_probability()
        );
        Ok(vec![self.write("cell_mass.csv", &table.to_csv())?])
    }

    fn bootstrap(&self) -> Result<Vec<PathBuf>, CliError> {
        let eps = self.eps();
        let p = self.instance(eps)?;
        let t = self.config.bootstrap.t;
        let paths = self.config.bootstrap.paths.unwrap_or(self.config.monte_carlo.paths);
        let delta = delta_estimate(&p, t, &self.params(paths))?;
        let mut points = String::from("x,source_term,terminal_term,stderr,delta\n");
        for q in &delta.points {
            writeln!(
                points,
                "{},{},{},{},{}",
                num(q.x),
                num(q.source_term),
                num(q.terminal_term),
                num(q.stderr),
                num(q.delta())
            )
            .unwrap();
        }
        let mut files = vec![self.write("bootstrap_delta.csv", &points)?];
        let phi = raw_error_field(&p, self.grid_size(eps));
        let outcome = bootstrap_bound(&phi, delta.delta_upper, t, harmonic_mean(&self.a))?;
        println!(
            "delta = {:.4e} (upper {:.4e}, analytic {:.4e}); max |u_eps - u| = {:.4e} <= {:.4e}: {}",
            delta.delta,
            delta.delta_upper,
            delta.analytic_bound,
            outcome.max_phi,
            outcome.implied_bound,
            outcome.verified
        );
        let mut summary = String::from(
            "delta,delta_stderr,delta_upper,analytic_bound,max_phi,implied_bound,contraction,steps,verified,iterate_holds\n",
        );
        writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{}",
            num(delta.delta),
            num(delta.stderr),
            num(delta.delta_upper),
            num(delta.analytic_bound),
            num(outcome.max_phi),
            num(outcome.implied_bound),
            num(outcome.contraction),
            outcome.steps,
            outcome.verified,
            outcome.iterate_holds
        )
        .unwrap();
        files.push(self.write("bootstrap.csv", &summary)?);
        Ok(files)
    }
}

/// Rows `x,value,provenance` for each field in turn.
pub fn field_csv(fields: &[&SolutionField]) -> String {
    let mut out = String::from("x,value,provenance\n");
    for f in fields {
        let label = f.provenance().label();
        for (x, v) in f.points() {
            writeln!(out, "{},{},{label}", num(x), num(v)).unwrap();
        }
    }
    out
}

fn print_summary(report: &ConvergenceReport) {
    for s in &report.series {
        match s.summary {
            RateSummary::Fitted(f) => println!(
                "{:<11} rate {:.4}  (intercept {:.4}, max log residual {:.2e})",
                s.request.label(),
                f.rate,
                f.intercept,
                f.residual
            ),
            RateSummary::Exact => println!("{:<11} exact (all errors <= 1e-13)", s.request.label()),
            RateSummary::Unfitted { positive } => {
                println!("{:<11} unfitted ({positive} positive errors)", s.request.label())
            }
        }
    }
    let corrected = report.series.iter().any(|s| {
        matches!(
            s.request,
            VariantRequest::Corrected | VariantRequest::CorrectedPlus | VariantRequest::CorrectedMinus
        )
    });
    if !corrected {
        return;
    }
    let c = &report.calibration;
    println!(
        "corrector sign {} ({})",
        c.sign.symbol(),
        if c.confirmed { "rate >= 1.85" } else { "second order not reached" }
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verbs_parse() {
        for verb in ["solve", "average", "corrector", "converge", "fk-verify", "cell-mass", "bootstrap"] {
            let cli = Cli::try_parse_from(["homog1d", verb, "c.json", "--eps", "0.125", "--seed", "3"]).unwrap();
            assert_eq!(cli.command.name(), verb);
            assert_eq!(cli.command.args().eps, Some(0.125));
        }
        assert!(Cli::try_parse_from(["homog1d", "explode", "c.json"]).is_err());
    }

    #[test]
    fn exit_codes() {
        let io = CliError::Io {
            path: "x".into(),
            source: std::io::Error::other("boom"),
        };
        assert_eq!(io.exit_code(), 1);
        assert_eq!(CliError::Numerical(Error::NonDifferentiable).exit_code(), 3);
    }

    #[test]
    fn field_csv_round_trips() {
        let f = SolutionField::full(vec![0.0, 0.1 + 0.2, 1.0 / 3.0, 0.0], crate::homsolver::Provenance::ExactFormula);
        let csv = field_csv(&[&f]);
        for (line, v) in csv.lines().skip(1).zip(f.values()) {
            let cols: Vec<_> = line.split(',').collect();
            assert_eq!(cols[1].parse::<f64>().unwrap(), *v);
            assert_eq!(cols[2], "exact-formula");
        }
    }
}
