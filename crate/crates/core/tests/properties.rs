use opineq::matcore::{func_calc, loewner_leq, mean_arith, mean_harm, random_pd, HermitianMatrix};
use opineq::posmap::PositiveMap;
use opineq::report::Witness;
use opineq::scalarfun::{check_func_eq1, legendre_numeric, tilde, ScalarFunction, LEGENDRE_TOL};
use opineq::tracefun::{core_functional, inverse_form, FunctionalSpec, Mode};
use opineq::verify::{replay, JointSuite, Suite, TrialConfig};
use proptest::prelude::*;

fn catalog() -> impl Strategy<Value = ScalarFunction> {
    prop_oneof![
        Just(ScalarFunction::Log),
        (0.05f64..3.0).prop_map(ScalarFunction::Power),
        (0.05f64..3.0).prop_map(ScalarFunction::NegPower),
        (0.05f64..1.0).prop_map(ScalarFunction::InvPower),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tilde_is_an_involution(f in catalog(), x in 0.01f64..100.0) {
        let back = tilde(&tilde(&f));
        let (a, b) = (f.eval(x).unwrap(), back.eval(x).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn tags_round_trip(f in catalog()) {
        let parsed: ScalarFunction = f.to_string().parse().unwrap();
        prop_assert_eq!(parsed, f);
    }

    #[test]
    fn harmonic_mean_below_arithmetic(n in 1usize..5, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_pd(n, s1, (0.1, 10.0)).unwrap();
        let b = random_pd(n, s2, (0.1, 10.0)).unwrap();
        let h = mean_harm(&a, &b).unwrap();
        let m = mean_arith(&a, &b).unwrap();
        prop_assert!(loewner_leq(h.as_hermitian(), m.as_hermitian(), 1e-9).unwrap());
    }

    #[test]
    fn spectral_reconstruction(n in 1usize..8, seed in any::<u64>()) {
        let a = random_pd(n, seed, (0.01, 100.0)).unwrap();
        let back = a.as_hermitian().spectrum().unwrap().reconstruct();
        prop_assert!(back.frobenius_distance(a.as_hermitian()).unwrap() < 1e-10);
        let sq = a.sqrt().unwrap();
        let again = sq.as_hermitian().sandwich(&HermitianMatrix::identity(n)).unwrap();
        let prod = HermitianMatrix::new(again.entries() * again.entries()).unwrap();
        prop_assert!(prod.frobenius_distance(a.as_hermitian()).unwrap() < 1e-9 * (1.0 + a.as_hermitian().frobenius_norm()));
    }

    #[test]
    fn positive_maps_keep_positivity(m in 1usize..5, k in 1usize..5, extra in 0usize..2, seed in any::<u64>()) {
        let count = k.div_ceil(m) + extra;
        let map = PositiveMap::random(m, k, count, seed).unwrap();
        let x = random_pd(m, seed ^ 1, (0.1, 10.0)).unwrap();
        prop_assert!(map.apply(x.as_hermitian()).unwrap().min_eigenvalue().unwrap() > 0.0);
    }

    #[test]
    fn identity_holds_for_random_instances(seed in any::<u64>(), r in 0.05f64..0.5) {
        let spec = FunctionalSpec::new(
            ScalarFunction::NegPower(r),
            ScalarFunction::InvPower(1.0),
            ScalarFunction::InvPower(0.5),
            PositiveMap::random(2, 3, 2, seed).unwrap(),
            PositiveMap::random(3, 3, 2, seed ^ 7).unwrap(),
            Mode::Convex,
        ).unwrap();
        let a = random_pd(2, seed ^ 11, (0.1, 10.0)).unwrap();
        let b = random_pd(3, seed ^ 13, (0.1, 10.0)).unwrap();
        let x = core_functional(&spec, &a, &b).unwrap();
        let y = inverse_form(&spec, &a, &b).unwrap();
        prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
    }

    #[test]
    fn conjugate_is_below_every_affine_minorant(t in 0.05f64..20.0, x in 0.01f64..100.0) {
        // check(h)(t) <= t x - h(x)
        for f in [ScalarFunction::Log, ScalarFunction::Power(0.5), ScalarFunction::NegPower(1.0)] {
            let c = legendre_numeric(&f, t, LEGENDRE_TOL).unwrap();
            prop_assert!(c.value <= t * x - f.eval(x).unwrap() + 1e-9 * (1.0 + c.value.abs()));
        }
    }
}

#[test]
fn operator_monotone_functions_satisfy_condition_one() {
    for tag in [
        "log",
        "power:0.5",
        "power:1",
        "negpower:1",
        "loewner:0,1,[(2,1)]",
    ] {
        let f: ScalarFunction = tag.parse().unwrap();
        assert!(check_func_eq1(&f, 1000, 5).unwrap().passed, "{tag}");
    }
    // power:2 is convex: the first inequality fails
    assert!(
        !check_func_eq1(&ScalarFunction::Power(2.0), 1000, 5)
            .unwrap()
            .passed
    );
}

#[test]
fn functional_calculus_matches_scalar_on_diagonals() {
    let a = opineq::PdMatrix::from_diagonal(&[0.5, 2.0, 7.0]).unwrap();
    let l = func_calc(&a, f64::ln).unwrap();
    for (i, x) in [0.5f64, 2.0, 7.0].iter().enumerate() {
        assert!((l.entries()[(i, i)].re - x.ln()).abs() < 1e-14);
    }
}

#[test]
fn witnesses_survive_json() {
    let spec = FunctionalSpec::new(
        ScalarFunction::Log,
        ScalarFunction::InvPower(1.0),
        ScalarFunction::InvPower(1.0),
        PositiveMap::random(2, 2, 2, 1).unwrap(),
        PositiveMap::random(2, 2, 2, 2).unwrap(),
        Mode::Convex,
    )
    .unwrap();
    let cfg = TrialConfig {
        trials: 32,
        ..TrialConfig::default()
    };
    let suite = JointSuite::new(spec);
    let report = opineq::verify::run_suite(&suite, &cfg).unwrap();
    let text = report.to_json().unwrap();
    let back: opineq::TrialReport = serde_json::from_str(&text).unwrap();
    let w: Witness = back.worst_witness.unwrap();
    assert_eq!(
        replay(&suite, &w, &cfg).unwrap().to_bits(),
        report.min_gap.to_bits()
    );
    assert!(suite.name().starts_with("joint_convexity"));
}
