//! Monte Carlo check of the Feynman-Kac identity
//! `u_eps(x) = E u_eps(X_t) + E int_0^t f(X_s) ds` for the stopped diffusion.

use homog1d::fk::{fk_estimate_u_eps, PathParams};
use homog1d::homsolver::ExactSolution;
use homog1d::{FunctionSpec, PeriodicCoefficient, ProblemInstance};

fn main() -> homog1d::Result<()> {
    let paths = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let p = ProblemInstance::new(a, f, 1.0 / 8.0)?;
    let exact = ExactSolution::new(&p).value(0.5);
    let params = PathParams {
        x0: 0.5,
        horizon: 0.25,
        dt: 1e-5,
        paths,
        seed: 2024,
    };
    let est = fk_estimate_u_eps(&p, &params)?;
    println!("u_eps(0.5)    = {exact:.8}");
    println!("MC estimate   = {:.8} +- {:.2e} ({} paths)", est.mean, est.stderr, est.paths);
    println!("z-score       = {:.3}", est.z_score(exact));
    println!("absorbed      = {:.4} left, {:.4} right", est.absorbed_left, est.absorbed_right);
    Ok(())
}
