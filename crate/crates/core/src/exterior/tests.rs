use super::*;
use crate::constructions::{build_prescribed, BuildOptions};
use crate::numerics::golden_ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e(dim: usize, i: usize) -> MultiVector {
    MultiVector::basis(dim, i)
}

fn mv(dim: usize, degree: usize, terms: &[(&[usize], i64)]) -> MultiVector {
    MultiVector::from_terms(dim, degree, terms.iter().map(|(i, c)| (i.to_vec(), BigInt::from(*c)))).unwrap()
}

fn random_mv(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> MultiVector {
    loop {
        let mut terms: Vec<(IndexSet, BigInt)> = Vec::new();
        for s in subsets_of(dim, degree) {
            if rng.gen_bool(0.6) {
                terms.push((s, BigInt::from(rng.gen_range(-5..=5))));
            }
        }
        let w = MultiVector::from_terms(dim, degree, terms).unwrap();
        if !w.is_zero() {
            return w;
        }
    }
}

#[test]
fn wedge_signs() {
    let w = e(4, 0).wedge(&e(4, 1)).unwrap();
    assert_eq!(w, mv(4, 2, &[(&[0, 1], 1)]));
    assert_eq!(e(4, 1).wedge(&e(4, 0)).unwrap(), mv(4, 2, &[(&[0, 1], -1)]));
    assert!(e(4, 1).wedge(&e(4, 1)).unwrap().is_zero());
    let three = e(4, 2).wedge(&e(4, 0)).unwrap().wedge(&e(4, 1)).unwrap();
    assert_eq!(three, mv(4, 3, &[(&[0, 1, 2], 1)]));
    let top = three.wedge(&e(4, 3)).unwrap();
    assert!(top.wedge(&e(4, 0)).is_err());
    assert_eq!(MultiVector::one(4).wedge(&e(4, 2)).unwrap(), e(4, 2));
}

#[test]
fn c_of_w_examples() {
    // n = 3, w = e1 ^ e2: c_1 = e2, c_2 = -e1, c_3 = c_4 = 0
    let c = c_of_w(&mv(4, 2, &[(&[0, 1], 1)])).unwrap();
    assert_eq!(c[0], e(4, 1));
    assert_eq!(c[1], e(4, 0).scale(&BigInt::from(-1)));
    assert!(c[2].is_zero() && c[3].is_zero());
    // degree one: c_i is the scalar coordinate
    let c = c_of_w(&MultiVector::from_vector(&IntVector::from_i64(&[4, -2, 7]))).unwrap();
    let coords: Vec<BigInt> = c.iter().map(|m| m.coefficient(&[])).collect();
    assert_eq!(coords, vec![BigInt::from(4), BigInt::from(-2), BigInt::from(7)]);
    // index sets never contain the expanding coordinate
    let c = c_of_w(&mv(4, 2, &[(&[0, 3], 5)])).unwrap();
    assert!(c[0].is_zero());
    assert_eq!(c[3], e(4, 0).scale(&BigInt::from(-5)));
}

#[test]
fn r0_norm_degree_one() {
    // n = 2, a = (0, phi), w = (q, 0, -p) from a convergent 13/8
    let phi = golden_ratio(256);
    let a = RealVector(vec![Scalar::int(0), Scalar::Real(phi.clone())]);
    let w = MultiVector::from_vector(&IntVector::from_i64(&[8, 0, -13]));
    let norm = r0_c_norm(&a, &w).unwrap().to_f64();
    assert!((norm - (8.0 * phi.to_f64() - 13.0).abs()).abs() < 1e-12);
    assert!(norm < 1.0);
    let a = RealVector(vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3)]);
    let w = MultiVector::from_vector(&IntVector::from_i64(&[6, -3, -2]));
    assert!(r0_c_norm_sq(&a, &w).unwrap().is_zero());
}

#[test]
fn rank2_bound_holds_on_small_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let a = RealVector((0..3).map(|_| Scalar::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=13))).collect());
        for j in 2..=3 {
            assert!(check_rank2_bound(&a, j, 2).unwrap().is_empty());
        }
    }
    assert!(check_rank2_bound(&RealVector(vec![Scalar::int(0); 3]), 1, 2).is_err());
}

#[test]
fn flow_expansion_matches_minors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits = 256;
    for case in 0..500 {
        let n = 1 + case % 4;
        let j = rng.gen_range(1..=n);
        let w = random_mv(&mut rng, n + 1, j);
        let y = RealVector((0..n).map(|_| Scalar::ratio(rng.gen_range(-30..=30), rng.gen_range(1..=9))).collect());
        let t = FlowVector::from_f64(&(0..n).map(|_| rng.gen_range(0.0..5.0)).collect::<Vec<_>>()).unwrap();
        let exp = flow_expansion(&w, &y, &t).unwrap();
        let oracle = exterior_power_action(&flow_matrix(&y, &t, bits), &w);
        let scale = oracle.iter().fold(PrecisionReal::zero(bits), |acc, (_, v)| acc + v * v).sqrt().unwrap().to_f64();
        for (k, v) in &oracle {
            let got = exp.coefficient(k, n).map_or(0.0, |c| c.to_real().to_f64());
            assert!((got - v.to_f64()).abs() <= 1e-12 * scale, "case {case}: {k:?} {got} vs {}", v.to_f64());
        }
        let total = exp.norm_sq(bits).to_f64();
        assert!((total - scale * scale).abs() <= 1e-12 * scale * scale);
    }
}

#[test]
fn contraction_agrees_with_wedge_products() {
    // <e_i ^ e_J, w> computed by wedging basis vectors
    for n in 1..=3 {
        let d = n + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for j in 1..=d {
            for _ in 0..10 {
                let v = random_mv(&mut rng, d, 1);
                let u = if j == 1 { MultiVector::one(d) } else { random_mv(&mut rng, d, j - 1) };
                let w = v.wedge(&u).unwrap();
                if w.is_zero() {
                    continue;
                }
                let c = c_of_w(&w).unwrap();
                for i in 0..d {
                    for jj in subsets_of(n, j - 1) {
                        let mut b = e(d, i);
                        for &x in &jj {
                            b = b.wedge(&e(d, x)).unwrap();
                        }
                        let (key, sign) = match b.terms().next() {
                            Some((k, s)) => (k.clone(), s.clone()),
                            None => {
                                assert!(c[i].coefficient(&jj).is_zero());
                                continue;
                            }
                        };
                        assert_eq!(c[i].coefficient(&jj), sign * w.coefficient(&key));
                    }
                }
            }
        }
    }
}

#[test]
fn equi_search_finds_convergent_on_prescribed_point() {
    let x = build_prescribed(&Scalar::int(3), 6, &BuildOptions::default()).unwrap();
    let a = RealVector(vec![Scalar::int(0), x.scalar()]);
    let d = 3.0 / 7.0 + 0.01;
    let t = FlowVector::from_ints(&[13, 0]);
    let hit = condition_equi_search(&a, d, 1, &t, 1_000_000).unwrap().unwrap();
    assert_eq!(hit.w.0[0], BigInt::from(731));
    assert!(hit.w.0[1].is_zero());
    assert!(hit.log_max < hit.log_bound);
    assert!(hit.implied_v > 5.0);
    let none = condition_equi_search(&a, d, 1, &FlowVector::from_ints(&[0, 0]), 1_000_000).unwrap();
    assert!(none.is_none());
}

#[test]
fn equi_search_is_empty_for_golden_hyperplane() {
    let a = RealVector(vec![Scalar::int(1), Scalar::Real(golden_ratio(256))]);
    for k in 1..=2usize {
        let c = 0.5 / (2.0 + 2.5 * k as f64);
        let d = c + 0.01;
        for t1 in 0..=30i64 {
            let t = if k == 1 { vec![t1, 0] } else { vec![t1 / 2, t1 - t1 / 2] };
            let t = FlowVector::from_ints(&t.iter().map(|&x| x as u64).collect::<Vec<_>>());
            let total = t.total().to_f64();
            let ok = t.components().iter().filter(|x| x.to_f64() >= d * total).count() >= k;
            if ok {
                assert!(condition_equi_search(&a, d, k, &t, 1_000_000).unwrap().is_none(), "k={k} t={t1}");
            }
        }
    }
}

#[test]
fn compare_ratio_is_between_one_and_root_count() {
    let f = PolyMap::parse("x,x^2").unwrap();
    let t = FlowVector::from_ints(&[2, 1]);
    for w in [e(3, 0), e(3, 2), mv(3, 2, &[(&[0, 2], 1), (&[1, 2], -3)])] {
        let count = flow_expansion(&w, &RealVector(f.eval(&Scalar::int(0))), &t).unwrap().terms.len();
        let r = compare_ratio(&f, (0.0, 1.0), &w, &t, 33).unwrap().unwrap();
        assert!(r >= 1.0 - 1e-12 && r <= (count as f64).sqrt() + 1e-12, "{r} with {count} terms");
    }
    assert!(compare_ratio(&f, (1.0, 0.0), &e(3, 0), &t, 10).is_err());
    assert!(compare_ratio(&f, (0.0, 1.0), &e(3, 0), &t, 1).is_err());
}

#[test]
fn json_shape() {
    let w = mv(4, 2, &[(&[0, 1], 3), (&[1, 3], -1)]);
    let v = serde_json::to_value(&w).unwrap();
    assert_eq!(v["degree"], 2);
    assert_eq!(v["terms"][0]["indices"], serde_json::json!([1, 2]));
    assert_eq!(v["terms"][1]["coeff"], "-1");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>(), p in 1usize..3, q in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_mv(&mut rng, 5, p);
        let v = random_mv(&mut rng, 5, q);
        let uv = u.wedge(&v).unwrap();
        let vu = v.wedge(&u).unwrap();
        prop_assert_eq!(uv, vu.scale(&BigInt::from(parity(p * q))));
    }

    #[test]
    fn rank_two_norm_is_at_least_one(seed in any::<u64>(), j in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = RealVector((0..3).map(|_| Scalar::ratio(rng.gen_range(-99..=99), rng.gen_range(1..=50))).collect());
        let w = random_mv(&mut rng, 4, j);
        prop_assert!(r0_c_norm_sq(&a, &w).unwrap().cmp_value(&Scalar::int(1)).is_ge());
    }
}
