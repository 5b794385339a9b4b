mod common;

use common::{brute, dsl, m, random_ast, rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_forge::certify::{is_transitive_mod, Limits};
use padic_forge::expr::{build_ergodic, constant, falling, rational, var, BoolTriangle, FnExpr};
use padic_forge::Modulus;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::ops::{Add, Mul, Sub};

/// Random compatible AST at `p` covering every node kind valid there.
fn ast(rng: &mut ChaCha8Rng, depth: usize, p: u64) -> FnExpr {
    if depth <= 1 {
        return match rng.gen_range(0..4) {
            0 => constant(rng.gen_range(-9..=20)),
            1 => rational(rng.gen_range(-9..=9), 7),
            _ => var(),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| ast(rng, depth - 1, p);
    let unit = |e: FnExpr| constant(1).add(constant(p as i64).mul(e));
    let bitwise = p == 2;
    match rng.gen_range(0..14) {
        0 => sub(rng).add(sub(rng)),
        1 => sub(rng).sub(sub(rng)),
        2 => sub(rng).mul(sub(rng)),
        3 if bitwise => sub(rng).xor(sub(rng)),
        4 if bitwise => sub(rng).and(sub(rng)),
        5 if bitwise => sub(rng).or(sub(rng)),
        6 if bitwise => sub(rng).bit_neg(),
        7 => unit(sub(rng)).pow(sub(rng)),
        8 => sub(rng).pow(constant(rng.gen_range(0..4))),
        9 => unit(sub(rng)).inv(),
        10 => falling(rng.gen_range(1..6)).compose(sub(rng)),
        11 => sub(rng).delta(),
        12 => sub(rng).compose(sub(rng)),
        _ => sub(rng),
    }
}

#[test]
fn random_asts_are_compatible() {
    for (p, k, seed) in [(2, 10, 1), (5, 4, 2)] {
        let mut rng = rng(seed);
        for _ in 0..40 {
            let e = ast(&mut rng, 5, p);
            assert!(brute(&e, p, k).compatible, "{e} mod {p}^{k}");
        }
    }
    let mut rng = rng(3);
    for _ in 0..40 {
        let e = random_ast(&mut rng, 5);
        assert!(brute(&e, 2, 10).compatible, "{e}");
    }
}

#[test]
fn evaluation_is_well_defined_on_residues() {
    let mut rng = rng(4);
    for p in [2u64, 3, 5] {
        for _ in 0..20 {
            let e = ast(&mut rng, 4, p);
            let k = 3;
            let low = m(p, k);
            let high = m(p, k + 4);
            let low_kernel = e.compile(&low).unwrap();
            let high_kernel = e.compile(&high).unwrap();
            for x in 0..*low.value() {
                let t = rng.gen_range(0..p.pow(4));
                let lifted = x + t * low.value();
                assert_eq!(
                    high_kernel.eval(&lifted).unwrap() % low.value(),
                    low_kernel.eval(&x).unwrap(),
                    "{e} at {x}"
                );
            }
        }
    }
}

#[test]
fn complement_forms_of_the_binary_ergodic_family() {
    let limits = Limits::default();
    let mut rng = rng(5);
    for _ in 0..15 {
        let v = random_ast(&mut rng, 4);
        let at_next = v.clone().compose(var().add(constant(1)));
        let first = constant(1).add(var()).add(constant(2).mul(at_next.clone().add(v.clone().bit_neg())));
        let second =
            constant(2).add(var()).add(constant(2).mul(at_next.clone())).add(constant(2).mul(v.clone()).bit_neg());
        let third =
            constant(3).add(var()).add(constant(2).mul(at_next.clone())).add(constant(2).mul(v.clone().bit_neg()));
        let one = BigRational::from_integer(BigInt::from(1));
        let delta_form = build_ergodic(&v, &one, 2).unwrap();
        // The first form drops the `+1` of `Delta v = v(x+1) + NEG v(x) + 1`, so it is the
        // member with constant -1; shifting `v` by `x` restores the others.
        let shifted = v.clone().add(var());
        let first_shifted = constant(1)
            .add(var())
            .add(constant(2).mul(shifted.clone().compose(var().add(constant(1))).add(shifted.bit_neg())));
        for k in 1..=10 {
            let modulus = m(2, k);
            let q = *modulus.value();
            let eval = |e: &FnExpr| -> Vec<u64> {
                let kernel = e.compile(&modulus).unwrap();
                (0..q).map(|x| kernel.eval(&x).unwrap()).collect()
            };
            let reference = eval(&delta_form);
            assert_eq!(eval(&second), reference, "{v} k={k}");
            assert_eq!(eval(&third), reference, "{v} k={k}");
            assert_eq!(eval(&first_shifted), reference, "{v} k={k}");
            let offset: Vec<u64> = eval(&first).iter().map(|y| (y + 2) % q).collect();
            assert_eq!(offset, reference, "{v} k={k}");
            for e in [&first, &second, &third] {
                assert!(is_transitive_mod(e, &modulus, &limits).unwrap(), "{e} k={k}");
            }
        }
    }
}

#[test]
fn ergodic_builder_is_transitive() {
    let limits = Limits::default();
    let mut rng = rng(6);
    for p in [2u64, 3, 5] {
        let (count, max_k) = if p == 2 { (20, 14) } else { (8, 8) };
        for _ in 0..count {
            let v = if p == 2 { random_ast(&mut rng, 5) } else { ast(&mut rng, 4, p) };
            let c = BigRational::new(rng.gen_range(1..p as i64).into(), 7.into());
            let f = build_ergodic(&v, &c, p).unwrap();
            let kernels_k = if p == 5 { max_k - 1 } else { max_k };
            for k in 1..=kernels_k {
                assert!(is_transitive_mod(&f, &m(p, k), &limits).unwrap(), "{f} mod {p}^{k}");
            }
        }
    }
}

fn triangle_orbit_is_full(t: &BoolTriangle, n: usize) -> bool {
    let mut x = 0;
    for step in 1..=1u64 << n {
        x = t.eval_u64(x, n);
        if x == 0 {
            return step == 1 << n;
        }
    }
    false
}

#[test]
fn triangle_criterion_is_exact() {
    let mut checked = 0;
    for n in 1..=4usize {
        let sizes: Vec<u64> = (0..n).map(|i| 1u64 << (1u64 << i)).collect();
        let total: u64 = sizes.iter().product();
        for index in 0..total {
            let mut rest = index;
            let tables: Vec<u64> = sizes
                .iter()
                .map(|&s| {
                    let t = rest % s;
                    rest /= s;
                    t
                })
                .collect();
            let t = BoolTriangle::from_truth_tables(&tables).unwrap();
            assert_eq!(triangle_orbit_is_full(&t, n), t.has_odd_weights(n), "{tables:?}");
            let modulus = Modulus::new(2u64, n as u32).unwrap();
            assert_eq!(is_transitive_mod(&t, &modulus, &Limits::default()).unwrap(), t.has_odd_weights(n));
            checked += 1;
        }
    }
    assert_eq!(checked, 2 + 2 * 4 + 2 * 4 * 16 + 2 * 4 * 16 * 256);
}

#[test]
fn parsed_and_built_asts_agree() {
    let parsed = dsl("1 + x + 2*delta(xor(x, 2*x + 1))");
    let v = var().xor(constant(2).mul(var()).add(constant(1)));
    let built = build_ergodic(&v, &BigRational::from_integer(BigInt::from(1)), 2).unwrap();
    for x in 0..256 {
        let modulus = m(2, 8);
        assert_eq!(
            parsed.compile(&modulus).unwrap().eval(&x).unwrap(),
            built.compile(&modulus).unwrap().eval(&x).unwrap()
        );
    }
}
