//! When the affine corrector vanishes: symmetric coefficients, or loads with
//! zero mean and zero first moment.

use homog1d::averaging::Corrector;
use homog1d::{FunctionSpec, PeriodicCoefficient};

fn main() -> homog1d::Result<()> {
    let asymmetric = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let symmetric = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![1.0], vec![]))?;
    let sine = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let codim2 = FunctionSpec::polynomial(vec![1.0 / 6.0, -1.0, 1.0]);
    let cases = [
        ("asymmetric a, f = sin pi x", &asymmetric, &sine),
        ("symmetric a,  f = sin pi x", &symmetric, &sine),
        ("asymmetric a, f = x^2 - x + 1/6", &asymmetric, &codim2),
    ];
    for (name, a, f) in cases {
        let c = Corrector::new(a, f);
        println!(
            "{name:<32} M1 = {:+.3e} M2 = {:+.3e} int f = {:+.3e} int int f = {:+.3e} -> vanishes: {}",
            c.m1,
            c.m2,
            c.int_f,
            c.int_int_f,
            c.vanishes()
        );
    }
    Ok(())
}
