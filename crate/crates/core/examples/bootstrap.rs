//! The heat-semigroup bootstrap: measure `delta` by Monte Carlo, then check
//! `phi <= delta + e^{t Delta} phi` for `phi = |u_eps - u|` and the bound it implies.

use homog1d::averaging::raw_error_field;
use homog1d::fk::{bootstrap_bound, delta_estimate, PathParams};
use homog1d::homsolver::{default_grid_size, harmonic_mean};
use homog1d::{FunctionSpec, PeriodicCoefficient, ProblemInstance};

fn main() -> homog1d::Result<()> {
    let paths = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000);
    let eps = 1.0 / 16.0;
    let t = 1.0;
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let p = ProblemInstance::new(a.clone(), f, eps)?;
    let params = PathParams {
        x0: 0.5,
        horizon: t,
        dt: 1e-5,
        paths,
        seed: 99,
    };
    let delta = delta_estimate(&p, t, &params)?;
    for pt in &delta.points {
        println!(
            "x = {:.2}: source {:+.3e}  terminal {:+.3e}  (stderr {:.1e})",
            pt.x, pt.source_term, pt.terminal_term, pt.stderr
        );
    }
    println!(
        "delta = {:.4e} +- {:.1e}, upper confidence bound {:.4e}, analytic bound {:.4e}",
        delta.delta, delta.stderr, delta.delta_upper, delta.analytic_bound
    );
    let phi = raw_error_field(&p, default_grid_size(eps));
    println!("max |u_eps - u| = {:.4e}", phi.sup_norm());
    match bootstrap_bound(&phi, delta.delta_upper, t, harmonic_mean(&a)) {
        Ok(out) => println!(
            "hypothesis holds; implied bound {:.4e} (k = {}, c = {:.6}), verified = {}",
            out.implied_bound, out.steps, out.contraction, out.verified
        ),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
