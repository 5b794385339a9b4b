mod common;

use common::{brute, corpus_series, m, rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_forge::mahler::{
    coeffs_from_values, eval, is_compatible, is_ergodic_2adic, is_ergodic_sufficient_oddp, is_measure_preserving_2adic,
    Basis, RationalPoly,
};
use padic_forge::padic::floor_log;
use proptest::prelude::*;

fn rationals(max_degree: usize, denominators: &'static [i64]) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-1000i64..1000, prop::sample::select(denominators)), 1..=max_degree + 1)
        .prop_map(|terms| terms.into_iter().map(|(n, d)| BigRational::new(n.into(), d.into())).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interpolation_round_trip(coeffs in rationals(8, &[1]), wide in any::<bool>()) {
        let poly = RationalPoly::monomial(coeffs);
        let (p, k) = if wide { (2, 10) } else { (5, 4) };
        let values: Vec<BigRational> = (0..=poly.degree() as i64).map(|x| poly.eval_integer(x)).collect();
        let series = coeffs_from_values(&values, p);
        let modulus = m(p, k);
        for x in 0..*modulus.value() {
            let exact = modulus.reduce_rational(&poly.eval_integer(x as i64)).unwrap();
            prop_assert_eq!(*eval(&series, &modulus.residue(x)).unwrap().residue(), exact);
        }
    }

    #[test]
    fn basis_conversion_is_an_involution(coeffs in rationals(12, &[1, 2, 3, 6, 18, 35])) {
        let poly = RationalPoly::monomial(coeffs);
        let falling = poly.to_basis(Basis::FallingFactorial);
        prop_assert_eq!(falling.to_basis(Basis::Monomial), poly.clone());
        let as_falling = RationalPoly::falling(poly.coeffs().to_vec());
        prop_assert_eq!(as_falling.to_basis(Basis::Monomial).to_basis(Basis::FallingFactorial), as_falling);
        for x in -4..14 {
            prop_assert_eq!(poly.eval_integer(x), falling.eval_integer(x));
        }
    }
}

#[test]
fn compatibility_criterion_matches_brute_force() {
    for (p, seed) in [(2, 11), (3, 12), (5, 13)] {
        let corpus = corpus_series(&mut rng(seed), p, 150);
        let mut positives = 0;
        for series in &corpus {
            let k = floor_log(series.degree().max(1) as u64, p) + 3;
            let verdict = is_compatible(series).unwrap();
            positives += verdict as usize;
            assert_eq!(verdict, brute(series, p, k).compatible, "{series} mod {p}^{k}");
        }
        assert!(positives > 20 && positives < corpus.len() - 20, "p={p}: {positives} positives");
    }
}

#[test]
fn binary_normal_forms_match_brute_force() {
    let corpus = corpus_series(&mut rng(21), 2, 80);
    let (mut ergodic, mut preserving) = (0, 0);
    for series in &corpus {
        let runs: Vec<_> = (1..=12).map(|k| brute(series, 2, k)).collect();
        let all = |pick: fn(&common::Brute) -> bool| runs.iter().all(|r| r.compatible && pick(r));
        let mp = is_measure_preserving_2adic(series).unwrap();
        let erg = is_ergodic_2adic(series).unwrap();
        assert_eq!(mp, all(|r| r.bijective), "measure preservation of {series}");
        assert_eq!(erg, all(|r| r.transitive), "ergodicity of {series}");
        preserving += mp as usize;
        ergodic += erg as usize;
    }
    assert!(ergodic >= 5 && preserving > ergodic, "{ergodic} ergodic, {preserving} preserving");
}

#[test]
fn odd_prime_sufficient_condition_is_sound() {
    for (p, seed) in [(3, 31), (5, 32), (7, 33)] {
        let corpus = corpus_series(&mut rng(seed), p, 120);
        let positives: Vec<_> = corpus.iter().filter(|s| is_ergodic_sufficient_oddp(s).unwrap()).collect();
        assert!(positives.len() >= 5, "p={p}");
        for series in positives {
            for k in 1..=3 {
                let run = brute(series, p, k);
                assert!(run.compatible && run.transitive, "{series} mod {p}^{k}");
            }
        }
    }
}

#[test]
fn mahler_coefficients_of_binomials() {
    for i in 0..12usize {
        let mut coeffs = vec![BigRational::from_integer(BigInt::from(0)); i + 1];
        coeffs[i] = BigRational::from_integer(BigInt::from(1));
        let poly = RationalPoly::new(Basis::FallingFactorial, coeffs)
            .scale(&BigRational::new(1.into(), (1..=i as i64).product::<i64>().into()));
        let series = poly.to_mahler(2);
        for (j, a) in series.coeffs().iter().enumerate() {
            assert_eq!(*a, BigRational::from_integer(BigInt::from((i == j) as i64)));
        }
    }
}
