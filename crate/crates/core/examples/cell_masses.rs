//! Occupation of the cells `[x + k eps, x + (k+1) eps]` at time `t` by paths of
//! the oscillating problem, against the homogenized heat kernel.

use homog1d::fk::{cell_mass_check, PathParams};
use homog1d::{FunctionSpec, PeriodicCoefficient};

fn main() -> homog1d::Result<()> {
    let paths = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let params = PathParams {
        x0: 0.5,
        horizon: 0.05,
        dt: 1e-5,
        paths,
        seed: 17,
    };
    let table = cell_mass_check(&a, 1.0 / 8.0, &params)?;
    println!("{:>5} {:>7} {:>7} {:>9} {:>9} {:>7}", "k", "lo", "hi", "mc", "exact", "z");
    for c in &table.cells {
        println!(
            "{:>5} {:>7.4} {:>7.4} {:>9.6} {:>9.6} {:>7.2}{}",
            c.index,
            c.lo,
            c.hi,
            c.mc_mass,
            c.exact_mass,
            c.z,
            if c.interior { "" } else { "  (boundary)" }
        );
    }
    println!("max interior |z| = {:.2}", table.max_interior_z());
    println!(
        "absorbed {:.5} + {:.5}, total probability {:.15}",
        table.absorbed_left,
        table.absorbed_right,
        table.total_probability()
    );
    Ok(())
}
