//! Closed-form solution against a conservative finite-difference solve.

use homog1d::homsolver::fd_oracle;
use homog1d::{ExactSolution, FunctionSpec, PeriodicCoefficient, ProblemInstance};

fn main() -> homog1d::Result<()> {
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let p = ProblemInstance::new(a, f, 1.0 / 16.0)?;
    let sol = ExactSolution::new(&p);
    let mut previous: Option<f64> = None;
    for n in [2_500, 5_000, 10_000, 20_000, 40_000] {
        let fd = fd_oracle(&p, n)?;
        let diff = fd.points().map(|(x, v)| (v - sol.value(x)).abs()).fold(0.0, f64::max);
        match previous {
            Some(d) => println!("N = {n:>6}  sup |u_eps - fd| = {diff:.3e}  ratio {:.2}", d / diff),
            None => println!("N = {n:>6}  sup |u_eps - fd| = {diff:.3e}"),
        }
        previous = Some(diff);
    }
    Ok(())
}
