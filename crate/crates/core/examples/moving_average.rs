//! The window average of `u_eps` and the sup errors of each variant at one scale.

use homog1d::averaging::{averaged_field, ErrorProfile};
use homog1d::homsolver::default_grid_size;
use homog1d::{FunctionSpec, HomogenizedSolution, PeriodicCoefficient, ProblemInstance};

fn main() -> homog1d::Result<()> {
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let eps = 1.0 / 16.0;
    let p = ProblemInstance::new(a.clone(), f.clone(), eps)?;
    let n = default_grid_size(eps);
    let avg = averaged_field(&p, n)?;
    let hom = HomogenizedSolution::new(&a, &f);
    for (x, v) in avg.points().step_by(avg.values().len() / 8) {
        println!("x = {x:.4}  A u_eps = {v:.8}  u = {:.8}", hom.value(x));
    }
    let e = ErrorProfile::compute(&p, n)?;
    println!(
        "sup errors on [eps, 1 - eps]: raw {:.3e}, averaged {:.3e}, corrected+ {:.3e}, corrected- {:.3e}",
        e.raw, e.averaged, e.corrected_plus, e.corrected_minus
    );
    Ok(())
}
