use boxlab::arith;
use boxlab::boxspace::{self, DAlphaParams, KConstant};
use boxlab::cayley::{GraphMetrics, Girth};
use boxlab::coarse::{self, AlmostPermutation};
use boxlab::groups::{Element, Group, GroupSpec, Lamp, ZxZ2Kind};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;

fn fake_component(order: u64, diameter: u32) -> GraphMetrics {
    GraphMetrics {
        spec: GroupSpec::Cyclic { n: order },
        order,
        degree: 2,
        diameter,
        girth: Girth::Finite(order as u32),
        lambda1: None,
        cheeger_exact: None,
        cheeger_lower: None,
        cheeger_upper: None,
    }
}

fn strictly_increasing(len: usize) -> impl Strategy<Value = Vec<BigUint>> {
    prop::collection::vec(1u64..6, len).prop_map(|steps| {
        let mut acc = 1u64;
        steps
            .into_iter()
            .map(|s| {
                acc = acc * (1 + s % 3) + s;
                BigUint::from(acc)
            })
            .collect()
    })
}

fn small_spec() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        (2u64..30).prop_map(|n| GroupSpec::Cyclic { n }),
        (2u64..12).prop_map(|n| GroupSpec::SolQuotient { n }),
        (2u64..8).prop_map(|n| GroupSpec::SlModN { m: 2, n }),
        (2u64..4).prop_map(|n| GroupSpec::SlModN { m: 3, n }),
        (1u32..6, prop_oneof![Just(Lamp::Z2), Just(Lamp::Z4), Just(Lamp::Z2xZ2)])
            .prop_map(|(n, lamp)| GroupSpec::WreathOverCycle { lamp, n }),
        (1usize..3).prop_map(|k| GroupSpec::LamplighterCongruence { k }),
        (2u64..10).prop_map(|n| GroupSpec::HeisenbergModN { n }),
        (1u64..20, prop_oneof![Just(ZxZ2Kind::Full), Just(ZxZ2Kind::Plain), Just(ZxZ2Kind::Twisted)])
            .prop_map(|(n, kind)| GroupSpec::ZxZ2Quotient { kind, n }),
    ]
}

fn random_word(g: &Group, word: &[usize]) -> Element {
    let gens = g.generator_elements();
    word.iter().fold(g.identity(), |x, &i| g.mul_unchecked(&x, &gens[i % gens.len()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dalpha_is_monotone_in_alpha(
        comps in prop::collection::vec((1u64..5000, 1u32..200), 1..6),
        (p, q) in (1i64..=8, 1i64..=8).prop_filter("α ≤ 1", |(p, q)| p <= q),
        shrink in 0i64..8,
        (ka, kb) in (1i64..5, 1i64..5),
    ) {
        let metrics: Vec<_> = comps.iter().map(|&(o, d)| fake_component(o, d)).collect();
        let k = KConstant::Exact(BigRational::new(ka.into(), kb.into()));
        let alpha = BigRational::new(p.into(), q.into());
        let lower = &alpha * BigRational::new((8 - shrink).max(1).into(), 8.into());
        let hi = boxspace::dalpha_check(&metrics, &DAlphaParams::new(alpha, k.clone()).unwrap());
        let lo = boxspace::dalpha_check(&metrics, &DAlphaParams::new(lower, k).unwrap());
        prop_assert!(hi.exact && lo.exact);
        if hi.verdict {
            prop_assert!(lo.verdict);
        }
    }

    #[test]
    fn matching_is_symmetric_and_certified(
        a in strictly_increasing(40),
        b in strictly_increasing(40),
        d in 0u64..5,
        r in 1i64..20,
    ) {
        let h = 40;
        let r = BigRational::from_integer(r.into());
        let ab = coarse::ratio_bounded_matching(&a, &b, d, &r, h).unwrap();
        let ba = coarse::ratio_bounded_matching(&b, &a, d, &r, h).unwrap();
        prop_assert_eq!(ab.is_matched(), ba.is_matched());
        prop_assert!(coarse::verify_verdict(&a, &b, &ab));
        prop_assert!(coarse::verify_verdict(&b, &a, &ba));
    }

    #[test]
    fn matching_is_monotone_in_d_and_r(
        a in strictly_increasing(40),
        b in strictly_increasing(40),
        d in 0u64..5,
        r in 1i64..20,
    ) {
        let h = 40;
        let r = BigRational::from_integer(r.into());
        let base = coarse::ratio_bounded_matching(&a, &b, d, &r, h).unwrap();
        if base.is_matched() {
            let wider = coarse::ratio_bounded_matching(&a, &b, d, &(&r * BigRational::from_integer(2.into())), h).unwrap();
            prop_assert!(wider.is_matched());
            if 2 * (d + 1) < h {
                prop_assert!(coarse::ratio_bounded_matching(&a, &b, d + 1, &r, h).unwrap().is_matched());
            }
        }
    }

    #[test]
    fn nks_matches_itself(num in 10i64..30, den in prop_oneof![Just(10i64), Just(4)]) {
        let s = BigRational::new(num.into(), den.into());
        prop_assume!(s >= BigRational::from_integer(1.into()));
        let r = coarse::parse_ratio_bound("2^16").unwrap();
        prop_assert!(coarse::distinguish_nks(&s, &s, 8, &r, 60).unwrap().is_matched());
    }

    #[test]
    fn window_shuffles_satisfy_the_permutation_lemma(seed in any::<u64>(), n in 1u64..9, h in 50u64..300) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<u64> = (1..=h).collect();
        for chunk in values.chunks_mut(n as usize) {
            chunk.shuffle(&mut rng);
        }
        let ap = AlmostPermutation::from_values(&values).unwrap();
        let hyp = coarse::permut_hypothesis(&ap, n);
        prop_assert!(hyp.holds);
        prop_assert_eq!(hyp.bounds_hold, Some(true));
    }

    #[test]
    fn group_laws_hold(spec in small_spec(), w1 in prop::collection::vec(0usize..16, 0..12),
                       w2 in prop::collection::vec(0usize..16, 0..12), w3 in prop::collection::vec(0usize..16, 0..12)) {
        let g = Group::new(&spec).unwrap();
        let (x, y, z) = (random_word(&g, &w1), random_word(&g, &w2), random_word(&g, &w3));
        let e = g.identity();
        prop_assert!(g.check(&x).is_ok());
        prop_assert_eq!(g.mul_unchecked(&g.mul_unchecked(&x, &y), &z), g.mul_unchecked(&x, &g.mul_unchecked(&y, &z)));
        prop_assert_eq!(g.mul_unchecked(&x, &e), x);
        prop_assert_eq!(g.mul_unchecked(&e, &x), x);
        prop_assert_eq!(g.mul_unchecked(&x, &g.inverse_unchecked(&x)), e);
    }

    #[test]
    fn offsets_respect_the_gap_rule(diams in prop::collection::vec(0u32..50, 1..10)) {
        let offsets = boxspace::coarse_union_offsets(&diams);
        prop_assert!(boxspace::offsets_respect_gap_rule(&diams, &offsets));
        prop_assert_eq!(offsets[0], 0);
    }

    #[test]
    fn pisano_is_multiplicative_over_coprime_moduli(m in 2u64..300, n in 2u64..300) {
        prop_assume!(m.gcd(&n) == 1);
        let lcm = arith::lcm_u64(arith::pisano(m).unwrap(), arith::pisano(n).unwrap());
        prop_assert_eq!(arith::pisano(m * n).unwrap(), lcm);
    }
}
