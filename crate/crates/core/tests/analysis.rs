mod common;

use common::{dsl, m, rng, ERGODIC_QUADRATICS};
use padic_forge::analysis::{
    affine_linear_complexity, bit_plane_periods, complexity_growth_profile, orbit_of_zero, relation_at_order,
    relation_complexity, Complexity, Flavor,
};
use padic_forge::certify::{is_transitive_mod, Limits};
use padic_forge::Natural;
use rand::Rng;

fn orbit(text: &str, p: u64, k: u32) -> Vec<u64> {
    orbit_of_zero(&dsl(text), &m(p, k), &Limits::default()).unwrap()
}

#[test]
fn linear_generator_relations() {
    let mut rng = rng(7);
    for _ in 0..20 {
        let k = rng.gen_range(3..=10u32);
        let q = 1u64 << k;
        let a = rng.gen_range(0..q / 2) * 2 + 1;
        let b = (rng.gen_range(0..q / 4) * 4 + 1) % q;
        let text = format!("{a} + {b}*x");
        let seq = orbit(&text, 2, k);
        assert_eq!(seq.len() as u64, q);
        let modulus = m(2, k);

        let (c, rel) = relation_complexity(&seq, &modulus, Flavor::Affine, 8).unwrap();
        assert_eq!(c, Complexity::Found(1));
        let (constant, coeffs) = rel.unwrap().monic_form(&modulus).unwrap();
        assert_eq!((constant, coeffs), (a, vec![b]));

        let (c, rel) = relation_complexity(&seq, &modulus, Flavor::Homogeneous, 8).unwrap();
        assert_eq!(c, Complexity::Found(2), "{text} mod 2^{k}");
        let (constant, coeffs) = rel.unwrap().monic_form(&modulus).unwrap();
        assert_eq!(constant, 0);
        assert_eq!(coeffs, vec![(q - b) % q, (1 + b) % q]);
    }
}

#[test]
fn alternating_sign_map_satisfies_the_shift_relation() {
    let text = "1 + x + 4*(-1)^(1 + x)";
    for k in 1..=12 {
        let modulus = m(2, k);
        let seq = orbit(text, 2, k);
        assert_eq!(seq.len() as u64, 1 << k, "transitive mod 2^{k}");
        let q = 1u64 << k;
        for i in 0..seq.len() {
            assert_eq!(seq[(i + 2) % seq.len()], (seq[i] + 2) % q);
        }
        let (c, rel) = relation_complexity(&seq, &modulus, Flavor::Affine, 8).unwrap();
        assert!(rel.unwrap().holds(&seq, &modulus));
        // Mod 16 the map agrees with the affine map -3 + 9x, so order 1 suffices there.
        let expected = if k <= 4 { 1 } else { 2 };
        assert_eq!(c, Complexity::Found(expected), "k={k}");
    }
}

#[test]
fn constant_sequences_have_order_one() {
    let modulus = m(3, 3);
    let report = affine_linear_complexity(&[4u64; 9], &modulus, 8).unwrap();
    assert_eq!(report.linear_complexity, Complexity::Found(1));
    assert_eq!(report.period, 1);
    assert!(!report.census_ok);
    assert!(report.bit_periods.is_none());
}

#[test]
fn relations_persist_at_higher_orders() {
    for text in ERGODIC_QUADRATICS {
        for k in [5, 8] {
            let modulus = m(2, k);
            let seq = orbit(text, 2, k);
            for flavor in [Flavor::Affine, Flavor::Unit, Flavor::Any, Flavor::Homogeneous] {
                let (c, _) = relation_complexity(&seq, &modulus, flavor, 16).unwrap();
                let Some(r) = c.found() else { continue };
                for higher in r..=r + 3 {
                    let rel = relation_at_order(&seq, &modulus, flavor, higher).unwrap();
                    assert!(rel.is_some_and(|rel| rel.holds(&seq, &modulus)), "{text} {flavor:?} r={higher}");
                }
            }
        }
    }
}

#[test]
fn reduction_never_raises_complexity() {
    for text in ERGODIC_QUADRATICS.iter().chain(&["3 + 5*x", "1 + x + 4*(-1)^(1 + x)"]) {
        for k in 2..=10 {
            let seq = orbit(text, 2, k);
            let reduced: Vec<u64> = seq.iter().map(|x| x % (1 << (k - 1))).collect();
            for flavor in [Flavor::Affine, Flavor::Unit] {
                let (high, _) = relation_complexity(&seq, &m(2, k), flavor, 32).unwrap();
                let (low, _) = relation_complexity(&reduced, &m(2, k - 1), flavor, 32).unwrap();
                assert!(low <= high, "{text} k={k} {flavor:?}: {low:?} > {high:?}");
            }
        }
    }
}

#[test]
fn growth_profiles() {
    let limits = Limits::default();
    let linear = complexity_growth_profile(&dsl("3 + 5*x"), 2, 3..=12, 16, &limits).unwrap();
    assert!(linear.iter().all(|(_, c, _)| c.found().is_some_and(|r| r <= 2)));

    let sign = complexity_growth_profile(&dsl("1 + x + 4*(-1)^(1 + x)"), 2, 5..=12, 16, &limits).unwrap();
    assert!(sign.iter().all(|(_, c, _)| *c == Complexity::Found(2)));

    for text in ERGODIC_QUADRATICS {
        let f = dsl(text);
        for k in 1..=12 {
            assert!(is_transitive_mod(&f, &m(2, k), &limits).unwrap(), "{text} mod 2^{k}");
        }
        let profile = complexity_growth_profile(&f, 2, 3..=12, 16, &limits).unwrap();
        assert!(profile.windows(2).all(|w| w[0].1 <= w[1].1), "{text}: {profile:?}");
        assert!(profile.first().unwrap().1 < profile.last().unwrap().1, "{text}");
    }
}

#[test]
fn bit_planes_of_ergodic_maps() {
    for text in ERGODIC_QUADRATICS.iter().chain(&["1 + x", "1 + x + 2*delta(xor(x, 2*x + 1))"]) {
        for k in [1, 6, 14] {
            let seq = orbit(text, 2, k);
            let periods = bit_plane_periods(&seq, k);
            for (j, &period) in periods.iter().enumerate() {
                assert_eq!(period, 1 << (j + 1), "{text} k={k} bit {j}");
            }
        }
    }
    assert_eq!(bit_plane_periods(&[6u64; 5], 3), vec![1, 1, 1]);
}

#[test]
fn report_json_shape() {
    let modulus = m(2, 5);
    let seq = orbit("1 + x + 4*(-1)^(1 + x)", 2, 5);
    let report = affine_linear_complexity(&seq, &modulus, 32).unwrap();
    assert!(report.census_ok);
    assert_eq!(report.period, 32);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["linear_complexity"], 2);
    assert_eq!(json["relation"]["order"], 2);
    assert_eq!(json["bit_periods"].as_array().unwrap().len(), 5);
    let none = affine_linear_complexity(&orbit("1 - x + 2*x^2", 2, 10), &m(2, 10), 2).unwrap();
    assert_eq!(serde_json::to_value(none.linear_complexity).unwrap()["none_found_up_to"], 2);
}

#[test]
fn big_backing_type_agrees() {
    let seq: Vec<num_bigint::BigUint> = orbit("1 - x + 2*x^2", 2, 8).iter().map(|&x| x.into()).collect();
    let modulus = padic_forge::Modulus::new(num_bigint::BigUint::from(2u8), 8).unwrap();
    let (big, _) = relation_complexity(&seq, &modulus, Flavor::Unit, 16).unwrap();
    let small_seq: Vec<u64> = seq.iter().map(|x| x.to_biguint().try_into().unwrap()).collect();
    let (small, _) = relation_complexity(&small_seq, &m(2, 8), Flavor::Unit, 16).unwrap();
    assert_eq!(big, small);
}
