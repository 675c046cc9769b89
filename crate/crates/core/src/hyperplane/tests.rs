use super::*;
use crate::input::parse_value;
use proptest::prelude::*;

fn spec(coeffs: &[&str]) -> HyperplaneSpec {
    HyperplaneSpec::new(coeffs.iter().map(|c| parse_value(c, 256).unwrap()).collect()).unwrap()
}

fn fin(x: f64) -> Exponent {
    Exponent::Finite(x)
}

#[test]
fn predictions() {
    let p = predict(&spec(&["0", "tau:3"]));
    assert_eq!((p.s, p.omega_times_l, p.omega_l), (1, fin(6.0), fin(3.0)));
    assert!(!p.gap_flag);
    let p = predict(&spec(&["1", "0"]));
    assert!(p.omega_times_l.is_infinite() && p.omega_l.is_infinite());
    assert_eq!(spec(&["1", "0", "2", "5"]).s, 3);
    let p = predict(&spec(&["1", "phi"]));
    assert_eq!((p.s, p.omega_times_l, p.omega_l), (2, fin(2.0), fin(2.0)));
    // s < n with both maxima equal to n
    assert!(predict(&spec(&["0", "phi"])).gap_flag);
    assert!(HyperplaneSpec::new(vec![parse_value("1", 64).unwrap()]).is_err());
}

#[test]
fn special_case() {
    assert_eq!(special_case_predict(2, &parse_value("phi", 128).unwrap()), fin(2.0));
    assert_eq!(special_case_predict(3, &parse_value("tau:3", 128).unwrap()), fin(9.0));
    assert!(special_case_predict(3, &parse_value("2/7", 128).unwrap()).is_infinite());
}

#[test]
fn embedding() {
    let s = spec(&["0", "1/3"]);
    let y = embed_point(&s, &RealVector(vec![Scalar::ratio(7, 10)])).unwrap();
    assert!(y.0[0].cmp_value(&Scalar::ratio(1, 3)).is_eq() && y.0[1].cmp_value(&Scalar::ratio(7, 10)).is_eq());
    let y = embed_point(&spec(&["1", "0"]), &RealVector(vec![Scalar::ratio(3, 10)])).unwrap();
    assert!(y.0[0].cmp_value(&y.0[1]).is_eq());
    let s = spec(&["2", "-1", "5/2"]);
    let y = embed_point(&s, &RealVector(vec![Scalar::int(0); 2])).unwrap();
    assert!(y.0[0].cmp_value(&Scalar::ratio(5, 2)).is_eq() && y.0[1].is_zero() && y.0[2].is_zero());
    assert!(embed_point(&s, &RealVector(vec![Scalar::int(0)])).is_err());
}

#[test]
fn rational_hyperplane_gives_exact_hits() {
    let opts = VerifyOptions { samples: 10, q_max: 64, tolerance: 0.5, seed: 1, submanifold: None, prediction: None };
    let r = verify_by_sampling(&spec(&["1", "0"]), &opts).unwrap();
    assert!(r.prediction.is_infinite());
    assert!(r.rows.iter().all(|row| row.exact_hit && row.within_tolerance));
}

#[test]
fn prescribed_hyperplane_sampling() {
    let s = spec(&["0", "tau:3"]);
    let opts = VerifyOptions { samples: 10, q_max: 10_000, tolerance: 0.5, seed: 3, submanifold: None, prediction: None };
    let r = verify_by_sampling(&s, &opts).unwrap();
    assert!(r.all_within, "{:?}", r.rows.iter().map(|x| x.omega_times_estimate).collect::<Vec<_>>());
    let sigma = s.a[1].construction.as_ref().unwrap().measured_sigma().unwrap().to_f64();
    for row in &r.rows {
        assert!(row.omega_times_estimate.to_f64() >= 2.0 * sigma - 0.3);
    }
    let again = verify_by_sampling(&s, &opts).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    let bad = VerifyOptions { submanifold: Some(PolyMap::parse("x,x^2").unwrap()), ..opts.clone() };
    assert!(verify_by_sampling(&s, &bad).is_err());
    assert!(verify_by_sampling(&s, &VerifyOptions { samples: 9, ..opts }).is_err());
}

#[test]
fn parameters_avoid_small_relations() {
    assert!(near_relation(&[0.5]));
    assert!(near_relation(&[0.25, 0.75 + 1e-8]));
    assert!(!near_relation(&[0.318309886]));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let u = draw_parameters(&mut rng, 2);
    assert!(u.iter().all(|x| x >= &BigRational::from_integer(0.into()) && x < &BigRational::from_integer(1.into())));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_order_and_s(coeffs in prop::collection::vec(-3i64..=3, 2..=5), last in -9i64..=9, sigma in 0.2f64..9.0) {
        let mut a: Vec<ParsedValue> = coeffs.iter().map(|&c| parse_value(&c.to_string(), 64).unwrap()).collect();
        let n = a.len();
        let s0 = stratum_s(&a.iter().map(|v| v.value.clone()).collect::<Vec<_>>());
        prop_assert!((1..=n).contains(&s0));
        a[n - 1] = parse_value(&last.to_string(), 64).unwrap();
        let spec = HyperplaneSpec { n, s: stratum_s(&a.iter().map(|v| v.value.clone()).collect::<Vec<_>>()), a, sigma: SigmaSource::Known { value: fin(sigma) } };
        prop_assert_eq!(spec.s, s0);
        let p = predict(&spec);
        prop_assert!(p.omega_times_l.to_f64() >= p.omega_l.to_f64());
        prop_assert!(p.omega_l.to_f64() >= n as f64);
        if spec.s == n {
            prop_assert_eq!(p.omega_times_l, p.omega_l);
        }
    }
}
