use num_bigint::BigUint;
use padic_forge::padic::{binomial, lucas_binomial_mod_p, mod_inverse, ord_p, unit_pow};
use padic_forge::{Modulus, Modulus64, Order};
use proptest::prelude::*;

fn m(p: u64, k: u32) -> Modulus64 {
    Modulus::new(p, k).unwrap()
}

#[test]
fn order_is_additive_on_products() {
    for (p, k) in [(2, 1), (2, 5), (3, 3), (3, 5), (5, 3), (7, 2)] {
        let modulus = m(p, k);
        let q = modulus.value();
        for x in 0..*q {
            for y in 0..*q {
                let product = modulus.residue(x).mul(&modulus.residue(y)).unwrap();
                let expected = (ord_p(&x, &p).capped(k) + ord_p(&y, &p).capped(k)).min(k);
                assert_eq!(product.ord().capped(k), expected, "{x}*{y} mod {p}^{k}");
                assert_eq!(product.ord() == Order::Infinite, expected == k);
            }
        }
    }
}

#[test]
fn inverses_of_all_units() {
    for (p, k) in [(2, 10), (3, 6), (5, 4), (31, 2)] {
        let modulus = m(p, k);
        for u in (0..*modulus.value()).filter(|u| u % p != 0) {
            let r = modulus.residue(u);
            assert_eq!(*mod_inverse(&r).unwrap().mul(&r).unwrap().residue(), 1);
        }
        assert!(mod_inverse(&modulus.residue(p)).is_err());
    }
}

#[test]
fn unit_powers_add_exponents() {
    for (p, k) in [(2, 8), (3, 5), (5, 3)] {
        let modulus = m(p, k);
        let q = *modulus.value();
        for u in (1..q).step_by(p as usize) {
            let base = modulus.residue(u);
            for e1 in 0..q {
                for e2 in 0..q {
                    let lhs = unit_pow(&base, &modulus.residue((e1 + e2) % q)).unwrap();
                    let rhs = unit_pow(&base, &modulus.residue(e1))
                        .unwrap()
                        .mul(&unit_pow(&base, &modulus.residue(e2)).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn unit_powers_vanish_at_the_modulus() {
    for (p, k) in [(2, 8), (3, 4), (5, 3)] {
        let modulus = m(p, k);
        let q = *modulus.value();
        let big = Modulus::new(p, 2 * k).unwrap();
        for u in (1..q).step_by(p as usize) {
            // The exponent p^k is zero mod p^k, so evaluate it one level up.
            let lifted = unit_pow(&big.residue(u), &big.residue(q)).unwrap();
            assert_eq!(lifted.into_inner() % q, 1, "{u}^{q}");
            assert_eq!(*unit_pow(&modulus.residue(u), &modulus.residue(0)).unwrap().residue(), 1);
        }
    }
}

#[test]
fn lucas_matches_exact_binomials() {
    for p in [2u64, 3, 5, 7] {
        for a in 0..200u64 {
            for b in 0..200u64 {
                let exact = if b > a { BigUint::from(0u8) } else { binomial(a, b) % p };
                assert_eq!(BigUint::from(lucas_binomial_mod_p(&a, &b, &p)), exact, "C({a},{b}) mod {p}");
            }
        }
    }
}

proptest! {
    #[test]
    fn reduction_commutes_with_ring_operations(x in 0u64..1 << 20, y in 0u64..1 << 20, k in 1u32..20) {
        let high = m(2, 20);
        let low = m(2, k);
        let (a, b) = (high.residue(x), high.residue(y));
        let sum = a.add(&b).unwrap().reduce_to(&low).unwrap();
        let product = a.mul(&b).unwrap().reduce_to(&low).unwrap();
        let (ra, rb) = (a.reduce_to(&low).unwrap(), b.reduce_to(&low).unwrap());
        prop_assert_eq!(sum, ra.add(&rb).unwrap());
        prop_assert_eq!(product, ra.mul(&rb).unwrap());
    }

    #[test]
    fn big_and_small_backings_agree(x in 0u64..3u64.pow(12), y in 0u64..3u64.pow(12)) {
        let small = m(3, 12);
        let big = Modulus::new(BigUint::from(3u8), 12).unwrap();
        let s = small.residue(x).mul(&small.residue(y)).unwrap();
        let b = big.residue(x.into()).mul(&big.residue(y.into())).unwrap();
        prop_assert_eq!(BigUint::from(*s.residue()), b.residue().clone());
        prop_assert_eq!(s.ord(), b.ord());
    }
}
