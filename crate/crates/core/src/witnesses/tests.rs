use super::*;
use crate::numerics::{golden_ratio, rational_to_f64};
use proptest::prelude::*;

fn exact(v: &[(i64, i64)]) -> RealVector {
    RealVector(v.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect())
}

fn real(v: &[PrecisionReal]) -> RealVector {
    RealVector(v.iter().cloned().map(Scalar::Real).collect())
}

/// Independent brute force over every lex-positive `q` in the region, with
/// exact rational errors and f64 qualities.
fn brute(y: &RealVector, q_max: i64, mode: Mode) -> (f64, f64, bool) {
    let ys = exact_coords(y);
    let n = ys.len();
    let lo = match mode {
        Mode::Omega => (q_max + 1) / 2,
        _ => (1..).find(|k: &i64| k * k >= q_max).unwrap(),
    };
    let mut raw = f64::NEG_INFINITY;
    let mut win = f64::NEG_INFINITY;
    let mut exact = false;
    let mut q = vec![-q_max; n];
    loop {
        let lexpos = q.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0);
        let h = match mode {
            Mode::Omega => q.iter().map(|x| x.abs()).max().unwrap(),
            _ => q.iter().map(|x| x.abs().max(1)).product(),
        };
        if lexpos && h <= q_max {
            let mut s = BigRational::zero();
            for (qi, yi) in q.iter().zip(&ys) {
                s += yi * BigRational::from_integer(BigInt::from(*qi));
            }
            let e = (&s - BigRational::from_integer(s.round().to_integer())).abs();
            if e.is_zero() {
                exact = true;
            } else if h >= 2 {
                let scale = if mode == Mode::Omega { 1.0 } else { n as f64 };
                let qual = scale * -rational_to_f64(&e).ln() / (h as f64).ln();
                raw = raw.max(qual);
                if h >= lo {
                    win = win.max(qual);
                }
            }
        }
        let mut i = 0;
        while i < n && q[i] == q_max {
            q[i] = -q_max;
            i += 1;
        }
        if i == n {
            break;
        }
        q[i] += 1;
    }
    (raw, win, exact)
}

#[test]
fn companion_examples() {
    let (p, e) = best_companion(&IntVector::from_i64(&[2, -1]), &exact(&[(1, 2), (0, 1)])).unwrap();
    assert_eq!(p, BigInt::from(-1));
    assert!(e.is_zero());
    let (p, e) = best_companion(&IntVector::from_i64(&[1, 1]), &exact(&[(1, 3), (1, 3)])).unwrap();
    assert_eq!(p, BigInt::from(-1));
    assert!((e.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    let phi = golden_ratio(256);
    let (p, e) = best_companion(&IntVector::from_i64(&[1]), &real(&[phi])).unwrap();
    assert_eq!(p, BigInt::from(-2));
    assert!((e.to_f64() - 0.381_966_011_250_105).abs() < 1e-14);
    assert!(best_companion(&IntVector::from_i64(&[1]), &exact(&[(1, 2), (1, 3)])).is_err());
}

#[test]
fn rational_points_give_exact_hits() {
    let opts = SearchOptions::default();
    let e = estimate_omega(&exact(&[(1, 2)]), 100, &opts).unwrap();
    assert!(e.exact_hit);
    assert_eq!(e.raw_max, Exponent::Infinite);
    assert_eq!(e.window_estimate, Exponent::Infinite);
    let w = e.witnesses.iter().find(|w| w.error.is_zero()).unwrap();
    assert_eq!(w.q, IntVector::from_i64(&[2]));
    let e = estimate_omega_times(&exact(&[(1, 3), (2, 7)]), 50, &opts).unwrap();
    assert!(e.exact_hit);
}

#[test]
fn equal_irrational_coordinates_cancel_exactly() {
    let phi = golden_ratio(256);
    let y = real(&[phi.clone(), phi]);
    let e = estimate_omega_times(&y, 1000, &SearchOptions::default()).unwrap();
    assert!(e.exact_hit);
    let w = e.witnesses.iter().find(|w| w.error.is_zero()).unwrap();
    assert_eq!(w.q, IntVector::from_i64(&[1, -1]));
}

#[test]
fn rounded_relation_is_an_exact_hit() {
    // 2 phi - sqrt 5 = 1 holds exactly for the stored binary values
    let y = real(&[golden_ratio(256), PrecisionReal::from_i64(5, 256).sqrt().unwrap()]);
    let est = estimate_omega_times(&y, 100, &SearchOptions::default()).unwrap();
    assert!(est.exact_hit);
}

#[test]
fn matches_brute_force_on_small_regions() {
    let pts = [
        real(&[golden_ratio(256), PrecisionReal::from_i64(2, 256).sqrt().unwrap()]),
        exact(&[(3, 7), (5, 11)]),
        exact(&[(1234567, 10000000), (7654321, 10000000)]),
        real(&[PrecisionReal::from_i64(3, 256).sqrt().unwrap()]),
    ];
    for y in &pts {
        for mode in [Mode::Omega, Mode::OmegaTimes] {
            for q_max in [7i64, 30] {
                let (raw, win, ex) = brute(y, q_max, mode);
                let est = linear_estimate(y, q_max as u64, mode, &SearchOptions::default()).unwrap();
                assert_eq!(est.exact_hit, ex, "{mode:?} {q_max}");
                if !ex {
                    assert!((est.raw_max.to_f64() - raw).abs() < 1e-9, "{mode:?} {q_max} {} {raw}", est.raw_max.to_f64());
                    assert!((est.window_estimate.to_f64() - win).abs() < 1e-9, "{mode:?} {q_max}");
                }
            }
        }
    }
}

#[test]
fn sigma_enumeration_matches_brute_force() {
    let a = real(&[golden_ratio(256), PrecisionReal::from_i64(2, 256).sqrt().unwrap()]);
    let ys = exact_coords(&a);
    let q_max = 300i64;
    let mut raw = f64::NEG_INFINITY;
    let mut win = f64::NEG_INFINITY;
    for q in 2..=q_max {
        let worst = ys
            .iter()
            .map(|y| {
                let s = y * BigRational::from_integer(q.into());
                rational_to_f64(&(&s - BigRational::from_integer(s.round().to_integer())).abs())
            })
            .fold(0.0f64, f64::max);
        let qual = -worst.ln() / (q as f64).ln();
        raw = raw.max(qual);
        if 2 * q >= q_max {
            win = win.max(qual);
        }
    }
    let est = estimate_sigma(&a, &BigInt::from(q_max), &SearchOptions::default()).unwrap();
    assert!((est.raw_max.to_f64() - raw).abs() < 1e-9);
    assert!((est.window_estimate.to_f64() - win).abs() < 1e-9);
}

#[test]
fn sigma_of_rational_is_exact() {
    let e = estimate_sigma(&exact(&[(1, 3), (5, 1)]), &BigInt::from(100), &SearchOptions::default()).unwrap();
    assert!(e.exact_hit);
    let big = BigInt::from(10).pow(30u32);
    let e = estimate_sigma(&exact(&[(22, 7), (5, 1)]), &big, &SearchOptions::default()).unwrap();
    assert_eq!(e.method, "continued_fraction");
    assert!(e.exact_hit);
}

#[test]
fn sigma_continued_fraction_path_agrees_with_enumeration() {
    let a = real(&[golden_ratio(256), PrecisionReal::from_i64(0, 64)]);
    let q_max = 5000u64;
    let direct = estimate_sigma(&a, &BigInt::from(q_max), &SearchOptions::default()).unwrap();
    let tiny = SearchOptions { budget: 10.0, ..SearchOptions::default() };
    let cf = estimate_sigma(&a, &BigInt::from(q_max), &tiny).unwrap();
    assert_eq!(cf.method, "continued_fraction");
    assert!((direct.raw_max.to_f64() - cf.raw_max.to_f64()).abs() < 1e-12);
    assert!(cf.window_estimate.to_f64() <= direct.window_estimate.to_f64() + 1e-12);
}

#[test]
fn budget_is_enforced() {
    let y = exact(&[(1, 3), (1, 5), (1, 7)]);
    let opts = SearchOptions { budget: 1000.0, ..SearchOptions::default() };
    assert!(matches!(estimate_omega(&y, 100, &opts), Err(Error::BudgetExceeded { .. })));
    assert!(matches!(estimate_omega(&y, 1, &opts), Err(Error::InvalidInput { .. })));
}

#[test]
fn witnesses_carry_consistent_qualities() {
    let y = real(&[golden_ratio(256), PrecisionReal::from_i64(3, 256).sqrt().unwrap()]);
    let est = estimate_omega_times(&y, 2000, &SearchOptions::default()).unwrap();
    assert!(!est.exact_hit);
    for w in &est.witnesses {
        let Companion::Scalar(p) = &w.p else { panic!() };
        let (p2, e2) = best_companion(&w.q, &y).unwrap();
        assert_eq!(p, &p2);
        assert!((w.log_error() - e2.log_f64()).abs() < 1e-12);
        assert_eq!(w.height_int, pi_plus_int(&w.q));
        assert!(w.q.is_lex_positive());
    }
    assert!(est.window_estimate.to_f64() <= est.raw_max.to_f64());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn window_never_exceeds_raw(a in 1i64..1_000_000, b in 1i64..1_000_000, q_max in 4u64..60) {
        let y = exact(&[(a, 1_000_003), (b, 999_983)]);
        for mode in [Mode::Omega, Mode::OmegaTimes] {
            let e = linear_estimate(&y, q_max, mode, &SearchOptions::default()).unwrap();
            prop_assert!(e.window_estimate.total_cmp(&e.raw_max).is_le());
        }
    }

    #[test]
    fn multiplicative_dominates_standard(a in 1i64..1_000_000, b in 1i64..1_000_000, q_max in 4u64..40) {
        // Pi_+(q) <= sup|q|^n: the box lies in the hyperbolic region of radius
        // q_max^n and each witness scores at least as well there
        let y = exact(&[(a, 1_000_003), (b, 999_983)]);
        let o = estimate_omega(&y, q_max, &SearchOptions::default()).unwrap();
        let ox = estimate_omega_times(&y, q_max * q_max, &SearchOptions::default()).unwrap();
        prop_assert!(ox.raw_max.total_cmp(&o.raw_max).is_ge());
    }

    #[test]
    fn determinism_across_runs(a in 1i64..1_000_000, q_max in 4u64..200) {
        let y = exact(&[(a, 1_000_003), (7, 13)]);
        let e1 = estimate_omega_times(&y, q_max, &SearchOptions::default()).unwrap();
        let e2 = estimate_omega_times(&y, q_max, &SearchOptions::default()).unwrap();
        prop_assert_eq!(serde_json::to_string(&e1).unwrap(), serde_json::to_string(&e2).unwrap());
    }
}
