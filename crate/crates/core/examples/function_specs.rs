//! Closed-form function descriptions: evaluation, antiderivatives, certified
//! bounds, and a coefficient given through its reciprocal.

use homog1d::funcspec::{certified_minimum, definite_integral};
use homog1d::{FunctionSpec, PeriodicCoefficient};

fn main() -> homog1d::Result<()> {
    let f = FunctionSpec::polynomial(vec![1.0 / 6.0, -1.0, 1.0]);
    let g = FunctionSpec::trig(2.0, vec![0.5], vec![1.0]);
    let step = FunctionSpec::piecewise_constant(vec![0.0, 0.3, 1.0], vec![1.0, 4.0]);
    for (name, s) in [("x^2 - x + 1/6", &f), ("2 + cos + sin", &g), ("step", &step)] {
        println!(
            "{name:>14}: f(0.25) = {:+.6}  int_0^1 = {:+.3e}  bounds [{:+.6}, {:+.6}]",
            s.eval(0.25),
            definite_integral(s, 0.0, 1.0),
            s.lower_bound(),
            s.upper_bound()
        );
    }
    println!("json: {}", serde_json::to_string(&g).expect("serializable"));

    println!("certified positive minimum of 2 + cos + sin: {:.6}", certified_minimum(&g)?);
    let a = PeriodicCoefficient::from_reciprocal(g)?;
    println!(
        "a from 1/a: a(0.25) = {:.6}, closed-form mean of 1/a = {:?}",
        a.eval(0.25),
        a.closed_form_inverse_mean()
    );
    Ok(())
}
