use approx::assert_relative_eq;
use boyd::operators::oracle::{product_measure_distribution, Profile};
use boyd::operators::theta_distribution;
use boyd::spaces::{OrliczSpec, SpaceSpec};
use boyd::StepFunction;
use proptest::prelude::*;

fn step_function() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.05f64..3.0, 0.0f64..10.0), 1..8).prop_map(|pieces| {
        let mut end = 0.0;
        let pairs: Vec<(f64, f64)> = pieces
            .into_iter()
            .map(|(len, value)| {
                end += len;
                (end, value)
            })
            .collect();
        StepFunction::from_pairs(&pairs).unwrap()
    })
}

fn nonzero() -> impl Strategy<Value = StepFunction> {
    step_function().prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rearrangement_is_equimeasurable(f in step_function(), v in 0.0f64..11.0) {
        let mu = f.rearrangement();
        prop_assert!(mu.is_nonincreasing());
        assert_relative_eq!(mu.distribution(v).unwrap(), f.distribution(v).unwrap(), max_relative = 1e-12);
        prop_assert_eq!(mu.rearrangement(), mu);
    }

    #[test]
    fn pointwise_max_submajorizes(f in step_function(), g in step_function()) {
        let h = f.max(&g);
        prop_assert!(h.submajorizes(&f) && h.submajorizes(&g));
        prop_assert!(f.add(&g).submajorizes(&h));
    }

    #[test]
    fn norms_are_rearrangement_invariant(f in nonzero(), p in 0.5f64..4.0, q in 0.5f64..6.0) {
        let mu = f.rearrangement();
        for space in [
            SpaceSpec::lp(p).unwrap(),
            SpaceSpec::lorentz(p, q).unwrap(),
            SpaceSpec::weak_lp(p).unwrap(),
        ] {
            assert_relative_eq!(space.norm(&f), space.norm(&mu), max_relative = 1e-10);
        }
    }

    #[test]
    fn lorentz_diagonal_is_lebesgue(f in nonzero(), p in 0.5f64..4.0) {
        let lorentz = SpaceSpec::lorentz(p, p).unwrap().norm(&f);
        let lp = SpaceSpec::lp(p).unwrap().norm(&f);
        assert_relative_eq!(lorentz, lp, max_relative = 1e-9);
    }

    #[test]
    fn power_luxemburg_is_lebesgue(f in nonzero(), p in 1.0f64..4.0) {
        let phi = SpaceSpec::orlicz(OrliczSpec::power(p).unwrap()).unwrap().norm(&f);
        let lp = SpaceSpec::lp(p).unwrap().norm(&f);
        assert_relative_eq!(phi, lp, max_relative = 1e-9);
    }

    #[test]
    fn dilation_scales_lp(f in nonzero(), p in 0.5f64..4.0, a in 0.1f64..10.0) {
        let space = SpaceSpec::lp(p).unwrap();
        let scaled = space.norm(&f.dilate(a).unwrap());
        assert_relative_eq!(scaled, a.powf(-1.0 / p) * space.norm(&f), max_relative = 1e-12);
    }

    #[test]
    fn theta_matches_product_measure(f in nonzero(), v in 0.01f64..12.0, p in 0.5f64..3.0, extra in 0.1f64..4.0) {
        let q = p + extra;
        let dist = theta_distribution(&f, p, q).unwrap();
        let oracle = product_measure_distribution(&f, Profile::Theta { p, q }, v);
        assert_relative_eq!(dist.eval(v), oracle, max_relative = 1e-12);
    }
}
