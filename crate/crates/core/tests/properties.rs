use proptest::prelude::*;

use homog1d::averaging::{moving_average, Corrector};
use homog1d::convergence::fit_rate;
use homog1d::fk::{heat_propagate, run_ensemble, PathParams};
use homog1d::homsolver::{arithmetic_mean, harmonic_mean, Provenance};
use homog1d::{ExactSolution, FunctionSpec, HomogenizedSolution, PeriodicCoefficient, ProblemInstance, SolutionField};

fn coefficient() -> impl Strategy<Value = PeriodicCoefficient> {
    (1.5f64..4.0, -0.5f64..0.5, -0.5f64..0.5, any::<bool>()).prop_map(|(mean, c, s, reciprocal)| {
        let spec = FunctionSpec::trig(mean, vec![c], vec![s]);
        if reciprocal {
            PeriodicCoefficient::from_reciprocal(spec).unwrap()
        } else {
            PeriodicCoefficient::from_profile(spec).unwrap()
        }
    })
}

fn grid_field(values: Vec<f64>) -> SolutionField {
    let mut v = values;
    v.insert(0, 0.0);
    v.push(0.0);
    SolutionField::full(v, Provenance::Homogenized)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moving_average_preserves_affine_functions(
        alpha in -5.0f64..5.0, beta in -5.0f64..5.0, m in 2usize..64, t in 0.0f64..1.0,
    ) {
        let eps = 1.0 / m as f64;
        let x = eps / 2.0 + t * (1.0 - eps);
        let avg = moving_average(|y| alpha + beta * y, x, eps).unwrap();
        prop_assert!((avg - (alpha + beta * x)).abs() <= 1e-13);
    }

    #[test]
    fn corrector_is_affine_and_linear_in_eps(a in coefficient(), c in -2.0f64..2.0, x in 0.0f64..1.0, m in 1usize..200) {
        let f = FunctionSpec::polynomial(vec![c, 1.0]);
        let corr = Corrector::new(&a, &f);
        let eps = 1.0 / m as f64;
        prop_assert_eq!(corr.value(eps / 2.0, x), corr.value(eps, x) / 2.0);
        let (l0, l1, lx) = (corr.value(eps, 0.0), corr.value(eps, 1.0), corr.value(eps, x));
        prop_assert!((lx - (l0 + (l1 - l0) * x)).abs() <= 1e-14 * (1.0 + l0.abs() + l1.abs()));
    }

    #[test]
    fn rate_fit_is_scale_invariant(rate in 0.5f64..3.0, scale in 1e-6f64..1e6, wobble in prop::collection::vec(-0.05f64..0.05, 6)) {
        let points: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let e = 0.5f64.powi(k + 3);
                (e, e.powf(rate) * (1.0 + wobble[k as usize]))
            })
            .collect();
        let scaled: Vec<(f64, f64)> = points.iter().map(|(e, v)| (*e, v * scale)).collect();
        let (p, q) = (fit_rate(&points).unwrap(), fit_rate(&scaled).unwrap());
        prop_assert!((p.rate - q.rate).abs() <= 1e-12);
        prop_assert!((q.intercept - p.intercept - scale.ln()).abs() <= 1e-9);
    }

    #[test]
    fn harmonic_mean_below_arithmetic_mean(a in coefficient()) {
        prop_assert!(harmonic_mean(&a) <= arithmetic_mean(&a) * (1.0 + 1e-12));
    }

    #[test]
    fn reciprocal_convention_inverts(mean in 1.5f64..4.0, s in -0.5f64..0.5, z in -3.0f64..3.0) {
        let g = FunctionSpec::trig(mean, vec![], vec![s]);
        let a = PeriodicCoefficient::from_reciprocal(g.clone()).unwrap();
        let gz = g.eval(z - z.floor());
        prop_assert!((a.eval(z) * gz - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn constant_coefficient_has_no_oscillation(value in 0.2f64..5.0, c in prop::collection::vec(-2.0f64..2.0, 1..4), m in 1usize..40, x in 0.0f64..1.0) {
        let a = PeriodicCoefficient::constant(value).unwrap();
        let f = FunctionSpec::polynomial(c);
        let p = ProblemInstance::new(a.clone(), f.clone(), 1.0 / m as f64).unwrap();
        let ue = ExactSolution::new(&p).value(x);
        let u = HomogenizedSolution::new(&a, &f).value(x);
        prop_assert!((ue - u).abs() <= 1e-12);
    }

    #[test]
    fn csv_numbers_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format!("{x:.16e}");
        prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn heat_flow_is_a_semigroup(values in prop::collection::vec(-1.0f64..1.0, 15..80), s in 0.0f64..0.2, t in 0.0f64..0.2, abar in 0.2f64..2.0) {
        let phi = grid_field(values);
        let two = heat_propagate(&heat_propagate(&phi, abar, s).unwrap(), abar, t).unwrap();
        let one = heat_propagate(&phi, abar, s + t).unwrap();
        for (u, v) in two.values().iter().zip(one.values()) {
            prop_assert!((u - v).abs() <= 1e-10);
        }
    }

    #[test]
    fn heat_flow_does_not_increase_energy(values in prop::collection::vec(-1.0f64..1.0, 15..80), t in 0.0f64..0.5) {
        let phi = grid_field(values);
        let w = heat_propagate(&phi, 1.0, t).unwrap();
        let norm = |f: &SolutionField| f.values().iter().map(|v| v * v).sum::<f64>();
        prop_assert!(norm(&w) <= norm(&phi) * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn ensembles_are_reproducible(seed in any::<u64>(), x0 in 0.2f64..0.8) {
        let a = PeriodicCoefficient::from_reciprocal(FunctionSpec::trig(2.0, vec![], vec![1.0])).unwrap();
        let params = PathParams { x0, horizon: 0.01, dt: 1e-4, paths: 16, seed };
        let first = run_ensemble(&a, 0.25, &params, 0, |x| x).unwrap();
        let second = run_ensemble(&a, 0.25, &params, 0, |x| x).unwrap();
        for (p, q) in first.iter().zip(&second) {
            prop_assert_eq!(p.endpoint.to_bits(), q.endpoint.to_bits());
            prop_assert_eq!(p.running_cost.to_bits(), q.running_cost.to_bits());
        }
    }
}
