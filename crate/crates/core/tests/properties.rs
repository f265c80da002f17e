mod common;

use ctmc_core::analysis::{apply_generator, hp, hp_limit, indices, moments, GeneratorProbe, LaurentIndices, Limit};
use ctmc_core::bd_oracle::{bd_classify, BdVerdict, BirthDeathModel};
use ctmc_core::classifier::{
    check_general, classify_laurent, classify_model, criteria, haldane_table, laurent_cases, mm_table,
    AsymptoticSummary, EnzymePair, ErgodicitySpeed, Explosivity, Recurrence, TableVerdict,
};
use ctmc_core::master_eq::{stationary_truncated, tv_distance};
use ctmc_core::model::{bd_network, haldane_rate, mm_rate, unit_bd, JumpRate};
use ctmc_core::rates::{from_u64, int, rational, to_f64, FallingFactorialPoly, LaurentExpansion, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rational(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn falling_to_monomial_preserves_values(c in prop::collection::vec(-20i64..=20, 1..=7)) {
        let ff = FallingFactorialPoly::from_ints(&c);
        let mono = ff.to_monomial();
        for x in 0..=50u64 {
            prop_assert_eq!(ff.eval(x), mono.eval(&from_u64(x)));
        }
        prop_assert_eq!(FallingFactorialPoly::from_monomial(&mono), ff);
    }

    #[test]
    fn laurent_remainder_is_two_orders_down(seed in any::<u64>()) {
        let mut r = rng(seed);
        let nd = r.random_range(0..=4);
        let dd = r.random_range(0..=3);
        let rate = common::positive_rate(&mut r, nd, dd);
        let LaurentExpansion::Terms { degree, a, b, .. } = rate.laurent() else {
            return Err(TestCaseError::fail("positive rate expanded to zero"));
        };
        prop_assert_eq!(degree, nd as i64 - dd as i64);
        // x^(2-R) |lambda - a x^R - b x^(R-1)| must stay bounded.
        let scaled: Vec<f64> = (1..=20).map(|k| {
            let x = 1u64 << k;
            let xr = from_u64(x);
            let pow = |e: i64| if e >= 0 { num_traits::pow(xr.clone(), e as usize) } else { Rational::from_integer(1.into()) / num_traits::pow(xr.clone(), (-e) as usize) };
            let rem = rate.eval(x) - &a * pow(degree) - &b * pow(degree - 1);
            to_f64(&(rem.abs() * pow(2 - degree)))
        }).collect();
        let tail = &scaled[9..];
        let max = tail.iter().cloned().fold(0.0, f64::max);
        prop_assert!(max <= 2.0 * scaled[9].max(1e-300) + 1e-12, "{:?}", scaled);
    }

    #[test]
    fn moments_are_exact_sums(seed in any::<u64>()) {
        let m = common::random_model(&mut rng(seed));
        let mf = moments(&m);
        for x in 0..40u64 {
            let mut drift = Rational::zero();
            let mut var = Rational::zero();
            for j in m.jumps() {
                let l = j.effective(x);
                drift += int(j.eta) * &l;
                var += int(j.eta * j.eta) * &l / int(2);
            }
            prop_assert_eq!(mf.m_at(x), drift);
            prop_assert_eq!(mf.v_at(x), var);
        }
    }

    #[test]
    fn indices_match_large_state_moments(seed in any::<u64>()) {
        let m = common::random_model(&mut rng(seed));
        let ix = indices(&m).unwrap();
        let mf = moments(&m);
        let x = 1u64 << 20;
        let xf = x as f64;
        let scale = xf.powi(ix.r as i32);
        let v = to_f64(&mf.v_at(x)) / scale;
        prop_assert!((v / to_f64(&ix.theta) - 1.0).abs() < 0.01);
        let drift = to_f64(&mf.m_at(x));
        if ix.alpha.is_zero() {
            let g = drift / (scale / xf);
            if !ix.gamma.is_zero() {
                prop_assert!((g / to_f64(&ix.gamma) - 1.0).abs() < 0.01, "{} vs {}", g, ix.gamma);
            }
        } else {
            prop_assert!((drift / scale / to_f64(&ix.alpha) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn generator_kills_constants_and_scales(seed in any::<u64>(), x in 2u64..5000) {
        let m = common::random_model(&mut rng(seed));
        let one = GeneratorProbe::PowerLog { p: 0.0, q: 0.0 };
        prop_assert_eq!(apply_generator(&m, &one, x), 0.0);
        // A x = m(x) exactly for the identity probe away from the clamp.
        let id = GeneratorProbe::PowerLog { p: 1.0, q: 0.0 };
        if x > m.max_jump() + 1 {
            let direct = apply_generator(&m, &id, x);
            let drift = to_f64(&moments(&m).m_at(x));
            prop_assert!((direct - drift).abs() <= 1e-9 * drift.abs().max(1.0));
        }
    }

    #[test]
    fn h1_sign_follows_its_limit(seed in any::<u64>()) {
        let m = common::random_model(&mut rng(seed));
        let ix = indices(&m).unwrap();
        let h = hp(&m, 1.0, 1 << 20).unwrap();
        match hp_limit(&ix, &int(1)) {
            Limit::PosInf => prop_assert!(h > 0.0),
            Limit::NegInf => prop_assert!(h < 0.0),
            Limit::Finite(_) => {}
        }
    }

    #[test]
    fn laurent_cases_partition(alpha in small(), gamma in small(), theta in (1i64..=8, 1i64..=3), r in -4i64..=0, on_edge in 0u8..3) {
        let theta = rational(theta.0, theta.1);
        let gamma = match on_edge {
            0 => theta.clone(),
            1 => int(r - 1) * &theta,
            _ => gamma,
        };
        let ix = LaurentIndices::new(alpha, gamma, theta, r).unwrap();
        let fired = laurent_cases(&ix)
            .iter()
            .filter(|c| c.fired && criteria::LAURENT_CASES.contains(&c.criterion.as_str()))
            .count();
        prop_assert_eq!(fired, 1);
        prop_assert!(!classify_laurent(&ix).unwrap().is_unresolved());
    }

    #[test]
    fn general_engine_never_contradicts_laurent_cases(alpha in small(), gamma in small(), theta in (1i64..=8, 1i64..=3), r in -4i64..=0) {
        let ix = LaurentIndices::new(alpha, gamma, rational(theta.0, theta.1), r).unwrap();
        let v = classify_laurent(&ix).unwrap();
        let general = check_general(&AsymptoticSummary::new(ix.clone()).unwrap());
        let fired = |id: &str| general.iter().any(|c| c.fired && c.criterion == id);
        use criteria::*;
        prop_assert_eq!(v.explosivity, Explosivity::NonExplosive);
        prop_assert!(!fired(EXPLOSIVE_DRIFT));
        if fired(TRANSIENT_H1) {
            prop_assert_eq!(v.recurrence, Recurrence::Transient);
        }
        if fired(RECURRENT_H1) {
            prop_assert_ne!(v.recurrence, Recurrence::Transient);
        }
        if fired(POSITIVE_J) || fired(POSITIVE_H1) {
            prop_assert_eq!(v.recurrence, Recurrence::PositiveRecurrent);
        }
        if fired(NULL_J) || fired(NULL_H) {
            prop_assert_eq!(v.recurrence, Recurrence::NullRecurrent);
        }
        if v.recurrence == Recurrence::PositiveRecurrent {
            if fired(EXPONENTIAL_H1) || fired(EXPONENTIAL_J) || fired(EXPONENTIAL_DRIFT) || fired(EXPONENTIAL_QUADRATIC) {
                prop_assert_eq!(v.ergodicity_speed, ErgodicitySpeed::Exponential);
            }
            if fired(NONEXPONENTIAL_J) || fired(NONEXPONENTIAL_DECAY) {
                prop_assert_eq!(v.ergodicity_speed, ErgodicitySpeed::NonExponential);
            }
        }
    }
}

fn random_pair(r: &mut ChaCha8Rng, balanced: bool, shift: usize) -> EnzymePair {
    let n1 = r.random_range(1..=3);
    let n2 = r.random_range(1..=3);
    let c1 = r.random_range(1..=n1);
    let c2 = r.random_range(1..=3);
    let k1 = int(r.random_range(1..=5));
    let k2 = int(r.random_range(1..=5));
    let v1 = rational(r.random_range(1..=9), r.random_range(1..=3));
    let v2 = if balanced {
        // Solve c1 v1 k1^(n1+s) = c2 v2 k2^(n2+s) for v2.
        int(c1 as i64) * &v1 * num_traits::pow(k1.clone(), n1 as usize + shift)
            / (int(c2 as i64) * num_traits::pow(k2.clone(), n2 as usize + shift))
    } else {
        rational(r.random_range(1..=9), r.random_range(1..=3))
    };
    EnzymePair { v1, k1, v2, k2, n1, c1, n2, c2 }
}

#[test]
fn closed_form_tables_match_classifier() {
    let mut r = rng(99);
    for i in 0..1000 {
        let haldane = i % 2 == 1;
        let p = random_pair(&mut r, i % 4 < 2, haldane as usize);
        let rate = if haldane { haldane_rate } else { mm_rate };
        let m = bd_network(
            rate(p.n1, &p.v1, &p.k1, -(p.c1 as i64)).unwrap(),
            rate(p.n2, &p.v2, &p.k2, p.c2 as i64).unwrap(),
        )
        .unwrap();
        let table = if haldane { haldane_table(&p) } else { mm_table(&p) };
        let got = TableVerdict::of(&classify_model(&m).unwrap());
        assert_eq!(got, Some(table), "{p:?} haldane={haldane}");
    }
}

#[test]
fn oracle_agrees_on_many_birth_death_models() {
    let mut r = rng(123);
    let mut n = 0;
    while n < 400 {
        let (b, d) = common::random_bd(&mut r);
        let m = unit_bd(b.clone(), d.clone()).unwrap();
        if common::on_boundary(&m) {
            continue;
        }
        n += 1;
        let oracle = bd_classify(&BirthDeathModel::new(b, d).unwrap()).unwrap();
        let expected = match classify_model(&m).unwrap().recurrence {
            Recurrence::Transient => BdVerdict::Transient,
            Recurrence::NullRecurrent => BdVerdict::NullRecurrent,
            Recurrence::PositiveRecurrent => BdVerdict::PositiveRecurrent,
            Recurrence::Unresolved => BdVerdict::Indeterminate,
        };
        assert_eq!(oracle, expected, "{:?}", indices(&m).unwrap());
    }
}

#[test]
fn oracle_agrees_on_classification_boundaries() {
    // Boundary cases are decided by the second-order terms on both sides.
    let mut r = rng(321);
    let mut n = 0;
    for _ in 0..20_000 {
        let (b, d) = common::random_bd(&mut r);
        let m = unit_bd(b.clone(), d.clone()).unwrap();
        if !common::on_boundary(&m) {
            continue;
        }
        n += 1;
        let oracle = bd_classify(&BirthDeathModel::new(b, d).unwrap()).unwrap();
        let v = classify_model(&m).unwrap();
        let expected = match v.recurrence {
            Recurrence::Transient => BdVerdict::Transient,
            Recurrence::NullRecurrent => BdVerdict::NullRecurrent,
            Recurrence::PositiveRecurrent => BdVerdict::PositiveRecurrent,
            Recurrence::Unresolved => BdVerdict::Indeterminate,
        };
        assert_eq!(oracle, expected, "{:?}", indices(&m).unwrap());
    }
    assert!(n > 0, "no boundary models drawn");
}

#[test]
fn truncation_does_not_move_light_tailed_laws() {
    let mut r = rng(77);
    for _ in 0..20 {
        let kb = r.random_range(0..=1);
        let b = common::positive_rate(&mut r, kb, 0);
        let mut dc: Vec<i64> = (0..=kb + 1).map(|_| r.random_range(0..=3)).collect();
        dc[0] = 0;
        dc[1] = dc[1].max(1);
        dc[kb + 1] = r.random_range(1..=3);
        let d = ctmc_core::rates::RationalRate::polynomial(FallingFactorialPoly::from_ints(&dc));
        let m = unit_bd(b, d).unwrap();
        let a = stationary_truncated(&m, 150).unwrap();
        let c = stationary_truncated(&m, 300).unwrap();
        assert!(a.warnings.is_empty());
        assert!(tv_distance(&a.distribution, &c.distribution) < 1e-8);
    }
}

#[test]
fn multi_jump_solver_matches_detailed_balance_free_check() {
    // For {-2, +1} no product form exists; check pi Q = 0 at the interior
    // directly from the rates.
    let b = JumpRate::new(1, ctmc_core::model::constant_rate(2)).unwrap();
    let d = JumpRate::new(-2, ctmc_core::rates::RationalRate::polynomial(FallingFactorialPoly::from_ints(&[0, 0, 1]))).unwrap();
    let m = bd_network(d, b).unwrap();
    let pi = stationary_truncated(&m, 120).unwrap().distribution;
    for x in 2..100usize {
        let out = pi.get(x) * m.rates_at_f64(x as u64).iter().sum::<f64>();
        let inflow = pi.get(x - 1) * 2.0 + pi.get(x + 2) * ((x + 2) * (x + 1)) as f64;
        assert!((out - inflow).abs() < 1e-12);
    }
}
