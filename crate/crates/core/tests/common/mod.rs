//! Seeded corpora shared by the property and acceptance suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use padic_forge::certify::{bijective_mod, compatible_mod, is_transitive_mod, Limits, UnaryMap};
use padic_forge::expr::{constant, parse_dsl, var, FnExpr};
use padic_forge::mahler::MahlerSeries;
use padic_forge::padic::floor_log;
use padic_forge::{Modulus, Modulus64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::{Add, Mul};

pub const DENOMINATORS: [i64; 5] = [1, 2, 3, 6, 18];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dsl(text: &str) -> FnExpr {
    parse_dsl(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn m(p: u64, k: u32) -> Modulus64 {
    Modulus::new(p, k).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(p: u64, e: u32) -> i64 {
    (p as i64).pow(e)
}

/// Interpolation coefficients `a_0..a_d` over `p`, drawn from templates that sit on
/// both sides of the coefficient criteria: free coefficients, the compatible shape
/// `p^floor(log_p i) t`, the measure-preserving and ergodic normal forms at `p = 2`,
/// and single-coefficient perturbations that break them by one power of `p`.
pub fn corpus_series(rng: &mut ChaCha8Rng, p: u64, count: usize) -> Vec<MahlerSeries> {
    (0..count).map(|_| random_series(rng, p)).collect()
}

fn small(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-12..=12)
}

/// Numerator over a denominator from `DENOMINATORS`; `unit_only` keeps it prime to `p`.
fn ratio(rng: &mut ChaCha8Rng, p: u64, unit_only: bool) -> BigRational {
    loop {
        let d = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
        if unit_only && d % p as i64 == 0 {
            continue;
        }
        return q(small(rng), d);
    }
}

fn random_series(rng: &mut ChaCha8Rng, p: u64) -> MahlerSeries {
    let degree = rng.gen_range(1..=8usize);
    let template = rng.gen_range(0..5);
    let mut coeffs: Vec<BigRational> = (0..=degree)
        .map(|i| {
            let t = ratio(rng, p, template != 0);
            let scale = match template {
                0 => 1,
                1 => pow(p, if i >= p as usize { floor_log(i as u64, p) } else { 0 }),
                2 if p == 2 => pow(2, if i >= 2 { floor_log(i as u64, 2) + 1 } else { 0 }),
                _ => pow(p, if i >= 1 { floor_log(i as u64 + 1, p) + 1 } else { 0 }),
            };
            t * q(scale, 1)
        })
        .collect();
    match template {
        2 if p == 2 => coeffs[1] = q(2 * small(rng) + 1, [1, 3][rng.gen_range(0..2)]),
        3 | 4 => {
            coeffs[0] = q(p as i64 * small(rng) + 1, 1);
            coeffs[1] = q(pow(p, if p == 2 { 2 } else { 1 }) * small(rng) + 1, 1);
        }
        _ => {}
    }
    if template == 4 {
        let i = rng.gen_range(0..=degree);
        coeffs[i] = coeffs[i].clone() / q(p as i64, 1);
    }
    MahlerSeries::new(p, coeffs)
}

/// Random compatible AST over `Z_2` of depth at most `depth`, mixing ring operations,
/// bitwise operations, digitwise complement, 1-unit powers and inverses of odd values.
pub fn random_ast(rng: &mut ChaCha8Rng, depth: usize) -> FnExpr {
    if depth <= 1 {
        return leaf(rng);
    }
    let sub = |rng: &mut ChaCha8Rng| random_ast(rng, depth - 1);
    match rng.gen_range(0..9) {
        0 => sub(rng).add(sub(rng)),
        1 => sub(rng).mul(sub(rng)),
        2 => sub(rng).xor(sub(rng)),
        3 => sub(rng).and(sub(rng)),
        4 => sub(rng).or(sub(rng)),
        5 => sub(rng).bit_neg(),
        6 => odd(sub(rng)).pow(sub(rng)),
        7 => odd(sub(rng)).inv(),
        _ => leaf(rng),
    }
}

/// `1 + 2 e`, a 1-unit for every value of `e`.
fn odd(e: FnExpr) -> FnExpr {
    constant(1).add(constant(2).mul(e))
}

fn leaf(rng: &mut ChaCha8Rng) -> FnExpr {
    if rng.gen_bool(0.6) {
        var()
    } else {
        constant(rng.gen_range(0..16))
    }
}

/// Ergodic polynomials of degree `>= 2` over `Q` in the `p = 2` normal form.
pub const ERGODIC_QUADRATICS: [&str; 5] = [
    "1 - x + 2*x^2",
    "1 + x + (2/3)*x*(x - 1)",
    "1 + x + 4*x^2 + 8*x^3",
    "1 + x + (5/18)*ff(x, 6)",
    "1 + 5*x + 4*x^2 + 8*x^5",
];

/// Brute-force verdicts of a map on `Z/p^k`; a map leaving `Z_p` fails all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Brute {
    pub compatible: bool,
    pub bijective: bool,
    pub transitive: bool,
}

pub fn brute<F: UnaryMap + ?Sized>(f: &F, p: u64, k: u32) -> Brute {
    let modulus = m(p, k);
    let limits = Limits::default();
    let compat = compatible_mod(f, &modulus, &limits).unwrap();
    if compat.not_integer_valued_at.is_some() {
        return Brute { compatible: false, bijective: false, transitive: false };
    }
    Brute {
        compatible: compat.compatible,
        bijective: bijective_mod(f, &modulus, &limits).unwrap().bijective,
        transitive: is_transitive_mod(f, &modulus, &limits).unwrap(),
    }
}
