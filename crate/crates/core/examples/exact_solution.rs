//! Exact solution of the oscillating problem next to its homogenized limit.

use homog1d::homsolver::{c_eps_asymptotic, harmonic_mean, moment_m1, moment_m2};
use homog1d::{ExactSolution, FunctionSpec, HomogenizedSolution, PeriodicCoefficient, ProblemInstance};

fn main() -> homog1d::Result<()> {
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    println!(
        "abar = {:.12}, M1 = {:+.12}, M2 = {:+.12}",
        harmonic_mean(&a),
        moment_m1(&a),
        moment_m2(&a)
    );
    let hom = HomogenizedSolution::new(&a, &f);
    let e = c_eps_asymptotic(&a, &f);
    for m in [4, 8, 16, 32] {
        let eps = 1.0 / m as f64;
        let sol = ExactSolution::new(&ProblemInstance::new(a.clone(), f.clone(), eps)?);
        println!(
            "eps = 1/{m:<3} c_eps = {:.10} (c0 + c1 eps = {:.10})  u_eps(0.5) = {:.8}  u(0.5) = {:.8}",
            sol.c_eps(),
            e.at(eps),
            sol.value(0.5),
            hom.value(0.5)
        );
    }
    Ok(())
}
