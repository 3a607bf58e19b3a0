//! Rate study for the main instance: raw error decays like eps, the
//! corrected moving average like eps^2.

use homog1d::convergence::{sweep, RateSummary, VariantRequest, DEFAULT_LADDER};
use homog1d::{FunctionSpec, PeriodicCoefficient};

fn main() -> homog1d::Result<()> {
    let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0]))?;
    let f = FunctionSpec::trig_with_period(0.0, vec![], vec![1.0], 2.0);
    let variants = [
        VariantRequest::Raw,
        VariantRequest::Averaged,
        VariantRequest::CorrectedPlus,
        VariantRequest::CorrectedMinus,
    ];
    let report = sweep(&a, &f, &DEFAULT_LADDER, &variants)?;
    for s in &report.series {
        print!("{:<11}", s.request.label());
        for (_, err) in &s.points {
            print!(" {err:.3e}");
        }
        match s.summary {
            RateSummary::Fitted(fit) => println!("  rate {:.3}", fit.rate),
            other => println!("  {other:?}"),
        }
    }
    println!("calibrated sign: {}", report.calibration.sign.symbol());
    Ok(())
}
