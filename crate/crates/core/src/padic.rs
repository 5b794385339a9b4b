//! Residue rings `Z/p^k`, composite moduli and the p-adic primitives built on them.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Natural;

/// p-adic order of an integer; zero has infinite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(e) => Some(e),
            Order::Infinite => None,
        }
    }

    /// Order as seen in `Z/p^k`, where everything divisible by `p^k` is zero.
    pub fn capped(self, k: u32) -> u32 {
        match self {
            Order::Finite(e) => e.min(k),
            Order::Infinite => k,
        }
    }

    pub fn at_least(self, bound: u32) -> bool {
        self >= Order::Finite(bound)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(e) => write!(f, "{e}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

pub fn ord_p<T: Natural>(n: &T, p: &T) -> Order {
    if n.is_zero() {
        return Order::Infinite;
    }
    let mut e = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Order::Finite(e);
        }
        m = q;
        e += 1;
    }
}

/// Valuation of a nonzero rational; `None` for zero.
pub fn rational_valuation(q: &BigRational, p: &BigUint) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let num = ord_p(q.numer().magnitude(), p).finite().unwrap_or(0) as i64;
    let den = ord_p(q.denom().magnitude(), p).finite().unwrap_or(0) as i64;
    Some(num - den)
}

/// Legendre's formula for `ord_p(i!)`.
pub fn factorial_order(i: u64, p: u64) -> u32 {
    let mut total = 0u64;
    let mut power = p;
    while power <= i {
        total += i / power;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    total as u32
}

/// `floor(log_p(n))` for `n >= 1`.
pub fn floor_log(n: u64, p: u64) -> u32 {
    assert!(n >= 1 && p >= 2);
    let mut e = 0;
    let mut power = p;
    while power <= n {
        e += 1;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    e
}

pub fn is_prime<T: Natural>(n: &T) -> bool {
    let two = T::from_small(2);
    let three = T::from_small(3);
    if *n < two {
        return false;
    }
    if *n == two || *n == three {
        return true;
    }
    if n.is_even() || (n.clone() % three).is_zero() {
        return false;
    }
    let six = T::from_small(6);
    let mut d = T::from_small(5);
    while d.clone() * d.clone() <= *n {
        if (n.clone() % d.clone()).is_zero() || (n.clone() % (d.clone() + two.clone())).is_zero() {
            return false;
        }
        d = d + six.clone();
    }
    true
}

/// Wire form of a prime-power modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModulusSpec {
    pub p: u64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus<T> {
    p: T,
    k: u32,
    value: T,
}

impl<T: Natural> Modulus<T> {
    pub fn new(p: T, k: u32) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime { p: p.to_string() });
        }
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        let value = checked_power(&p, k).ok_or_else(|| Error::Overflow { p: p.to_string(), k })?;
        Ok(Modulus { p, k, value })
    }

    pub fn from_spec(spec: ModulusSpec) -> Result<Self> {
        Self::new(T::from_small(spec.p), spec.k)
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    pub fn p_u64(&self) -> u64 {
        self.p.to_u64().expect("primes are checked below 2^64")
    }

    pub fn spec(&self) -> ModulusSpec {
        ModulusSpec { p: self.p_u64(), k: self.k }
    }

    /// Same prime, different exponent.
    pub fn with_exponent(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroExponent);
        }
        let value = checked_power(&self.p, k).ok_or_else(|| Error::Overflow { p: self.p.to_string(), k })?;
        Ok(Modulus { p: self.p.clone(), k, value })
    }

    pub fn residue(&self, n: T) -> ResidueInt<T> {
        ResidueInt { residue: n % self.value.clone(), modulus: self.clone() }
    }

    pub fn zero(&self) -> ResidueInt<T> {
        self.residue(T::zero())
    }

    pub fn one(&self) -> ResidueInt<T> {
        self.residue(T::one())
    }

    pub fn reduce(&self, n: &T) -> T {
        n.clone() % self.value.clone()
    }

    pub fn reduce_bigint(&self, n: &BigInt) -> T {
        let m = self.value.to_biguint();
        let r = n.magnitude() % &m;
        let r = if n.sign() == Sign::Minus && !r.is_zero() { &m - r } else { r };
        T::from_biguint(&r).expect("residue below modulus fits")
    }

    /// Image of a p-integral rational in `Z/p^k`.
    pub fn reduce_rational(&self, q: &BigRational) -> Result<T> {
        let num = self.reduce_bigint(q.numer());
        let den = self.reduce_bigint(q.denom());
        let inv = inverse_mod(&den, &self.value).ok_or_else(|| Error::NotIntegerValued { p: self.p.to_string() })?;
        Ok(num.mul_mod(&inv, &self.value))
    }

    pub fn is_unit(&self, n: &T) -> bool {
        !(n.clone() % self.p.clone()).is_zero()
    }
}

impl<T: Natural> fmt::Display for Modulus<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

impl<T: Natural> Serialize for Modulus<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.spec().serialize(serializer)
    }
}

fn checked_power<T: Natural>(p: &T, k: u32) -> Option<T> {
    let mut value = T::one();
    for _ in 0..k {
        value = value.checked_mul(p)?;
    }
    Some(value)
}

/// Inverse of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
pub fn inverse_mod<T: Natural>(a: &T, m: &T) -> Option<T> {
    if m.is_one() {
        return Some(T::zero());
    }
    let (mut r0, mut r1) = (m.clone(), a.clone() % m.clone());
    let (mut t0, mut t1) = (T::zero(), T::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let t = t0.sub_mod(&q.mul_mod(&t1, m), m);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t);
    }
    r0.is_one().then_some(t0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueInt<T> {
    residue: T,
    modulus: Modulus<T>,
}

impl<T: Natural> ResidueInt<T> {
    pub fn new(residue: T, modulus: &Modulus<T>) -> Self {
        modulus.residue(residue)
    }

    pub fn residue(&self) -> &T {
        &self.residue
    }

    pub fn modulus(&self) -> &Modulus<T> {
        &self.modulus
    }

    pub fn into_inner(self) -> T {
        self.residue
    }

    fn same_ring(&self, rhs: &Self) -> Result<()> {
        if self.modulus == rhs.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch { left: self.modulus.to_string(), right: rhs.modulus.to_string() })
        }
    }

    fn with(&self, residue: T) -> Self {
        ResidueInt { residue, modulus: self.modulus.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        Ok(self.with(self.residue.add_mod(&rhs.residue, self.modulus.value())))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        Ok(self.with(self.residue.sub_mod(&rhs.residue, self.modulus.value())))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.same_ring(rhs)?;
        Ok(self.with(self.residue.mul_mod(&rhs.residue, self.modulus.value())))
    }

    pub fn neg(&self) -> Self {
        self.with(self.residue.neg_mod(self.modulus.value()))
    }

    pub fn ord(&self) -> Order {
        ord_p(&self.residue, self.modulus.p())
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_unit(&self.residue)
    }

    /// Reduction to a lower exponent of the same prime.
    pub fn reduce_to(&self, target: &Modulus<T>) -> Result<Self> {
        if target.p() != self.modulus.p() || target.k() > self.modulus.k() {
            return Err(Error::ModulusMismatch { left: self.modulus.to_string(), right: target.to_string() });
        }
        Ok(target.residue(self.residue.clone()))
    }

    /// The least non-negative representative read in a higher ring `p^j`, `j >= k`.
    pub fn lift_to(&self, target: &Modulus<T>) -> Result<Self> {
        if target.p() != self.modulus.p() || target.k() < self.modulus.k() {
            return Err(Error::ModulusMismatch { left: self.modulus.to_string(), right: target.to_string() });
        }
        Ok(target.residue(self.residue.clone()))
    }
}

impl<T: Natural> fmt::Display for ResidueInt<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Base-p digits, least significant first, always `k` of them.
pub fn digits<T: Natural>(x: &ResidueInt<T>) -> Vec<T> {
    let p = x.modulus.p();
    let mut rest = x.residue.clone();
    (0..x.modulus.k())
        .map(|_| {
            let (q, r) = rest.div_rem(p);
            rest = q;
            r
        })
        .collect()
}

/// `(x)_i = x(x-1)...(x-i+1)` in the ring of `x`.
pub fn falling_factorial<T: Natural>(x: &ResidueInt<T>, i: u64) -> ResidueInt<T> {
    let m = x.modulus.value();
    let mut acc = T::one() % m.clone();
    let mut term = x.residue.clone();
    let one = T::one() % m.clone();
    for _ in 0..i {
        acc = acc.mul_mod(&term, m);
        if acc.is_zero() {
            break;
        }
        term = term.sub_mod(&one, m);
    }
    x.with(acc)
}

/// `C(x, i) mod p^k` from a representative of `x` known mod `p^(k + ord_p(i!))`.
pub fn binomial_eval<T: Natural>(x: &ResidueInt<T>, i: u64, target: &Modulus<T>) -> Result<ResidueInt<T>> {
    if x.modulus.p() != target.p() {
        return Err(Error::ModulusMismatch { left: x.modulus.to_string(), right: target.to_string() });
    }
    let p = target.p_u64();
    let shift = factorial_order(i, p);
    let required = target.k() + shift;
    if x.modulus.k() < required {
        return Err(Error::PrecisionShortfall { supplied: x.modulus.k(), required });
    }
    let lifted = x.modulus.with_exponent(required)?;
    let numerator = falling_factorial(&lifted.residue(x.residue.clone()), i).into_inner();
    let scale = checked_power(target.p(), shift).expect("divides the lift modulus");
    let reduced = numerator / scale;
    let unit = factorial_unit_part(i, target);
    let inv = inverse_mod(&unit, target.value()).expect("unit part of i! is prime to p");
    Ok(target.residue(reduced.mul_mod(&inv, target.value())))
}

/// `i! / p^ord_p(i!)` reduced mod `p^k`.
fn factorial_unit_part<T: Natural>(i: u64, m: &Modulus<T>) -> T {
    let p = m.p_u64();
    let mut acc = T::one() % m.value().clone();
    for j in 2..=i {
        let mut j = j;
        while j % p == 0 {
            j /= p;
        }
        acc = acc.mul_mod(&(T::from_small(j) % m.value().clone()), m.value());
    }
    acc
}

pub fn mod_inverse<T: Natural>(u: &ResidueInt<T>) -> Result<ResidueInt<T>> {
    inverse_mod(&u.residue, u.modulus.value())
        .map(|v| u.with(v))
        .ok_or_else(|| Error::NotAUnit { value: u.residue.to_string(), p: u.modulus.p().to_string() })
}

/// `u^e` for a 1-unit `u`, with the exponent read as a p-adic integer mod `p^k`.
pub fn unit_pow<T: Natural>(u: &ResidueInt<T>, e: &ResidueInt<T>) -> Result<ResidueInt<T>> {
    u.same_ring(e)?;
    unit_pow_raw(&u.residue, &e.residue, &u.modulus).map(|v| u.with(v))
}

pub(crate) fn unit_pow_raw<T: Natural>(u: &T, e: &T, m: &Modulus<T>) -> Result<T> {
    if !(u.clone() % m.p().clone()).is_one() {
        return Err(Error::BaseNotOneUnit { value: u.to_string(), p: m.p().to_string() });
    }
    Ok(u.pow_mod(&m.reduce(e), m.value()))
}

/// `C(a, b) mod p` through base-p digits.
pub fn lucas_binomial_mod_p<T: Natural>(a: &T, b: &T, p: &T) -> T {
    let mut result = T::one();
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (qa, da) = a.div_rem(p);
        let (qb, db) = b.div_rem(p);
        if db > da {
            return T::zero();
        }
        result = result.mul_mod(&small_binomial_mod(&da, &db, p), p);
        a = qa;
        b = qb;
    }
    result % p.clone()
}

/// `C(n, r) mod p` for digits `r <= n < p`.
fn small_binomial_mod<T: Natural>(n: &T, r: &T, p: &T) -> T {
    let mut num = T::one();
    let mut den = T::one();
    let mut i = T::zero();
    while i < *r {
        num = num.mul_mod(&(n.clone() - i.clone()), p);
        i = i + T::one();
        den = den.mul_mod(&i, p);
    }
    num.mul_mod(&inverse_mod(&den, p).expect("digit factorials are prime to p"), p)
}

/// Product of prime powers with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeModulus<T> {
    factors: Vec<Modulus<T>>,
    value: T,
}

impl<T: Natural> CompositeModulus<T> {
    pub fn new(factors: Vec<Modulus<T>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("composite modulus needs at least one factor".into()));
        }
        if factors.windows(2).any(|w| w[0].p() >= w[1].p()) {
            return Err(Error::UnorderedFactors);
        }
        let mut value = T::one();
        for f in &factors {
            value = value.checked_mul(f.value()).ok_or_else(|| Error::Overflow { p: f.p().to_string(), k: f.k() })?;
        }
        Ok(CompositeModulus { factors, value })
    }

    /// Trial-division factorization of `m >= 2`.
    pub fn factorize(m: &T) -> Result<Self> {
        if *m < T::from_small(2) {
            return Err(Error::InvalidArgument(format!("cannot factor {m}")));
        }
        let mut rest = m.clone();
        let mut factors = Vec::new();
        let mut d = T::from_small(2);
        while d.clone() * d.clone() <= rest {
            let mut k = 0;
            while (rest.clone() % d.clone()).is_zero() {
                rest = rest / d.clone();
                k += 1;
            }
            if k > 0 {
                factors.push(Modulus::new(d.clone(), k)?);
            }
            d = d + T::one();
        }
        if !rest.is_one() {
            factors.push(Modulus::new(rest, 1)?);
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Modulus<T>] {
        &self.factors
    }

    pub fn value(&self) -> &T {
        &self.value
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> T {
        self.factors.iter().fold(T::one(), |acc, f| acc * f.p().clone())
    }

    pub fn split(&self, x: &T) -> Vec<T> {
        self.factors.iter().map(|f| f.reduce(x)).collect()
    }

    pub fn combine(&self, residues: &[T]) -> T {
        crt_combine(&self.factors, residues)
    }
}

impl<T: Natural> From<Modulus<T>> for CompositeModulus<T> {
    fn from(m: Modulus<T>) -> Self {
        let value = m.value().clone();
        CompositeModulus { factors: vec![m], value }
    }
}

impl<T: Natural> fmt::Display for CompositeModulus<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Chinese remaindering over pairwise coprime moduli.
pub fn crt_combine<T: Natural>(moduli: &[Modulus<T>], residues: &[T]) -> T {
    assert_eq!(moduli.len(), residues.len());
    let total = moduli.iter().fold(T::one(), |acc, m| acc * m.value().clone());
    let mut x = T::zero();
    for (m, r) in moduli.iter().zip(residues) {
        let cofactor = total.clone() / m.value().clone();
        let inv = inverse_mod(&(cofactor.clone() % m.value().clone()), m.value()).expect("coprime factors");
        let term = cofactor.mul_mod(&r.mul_mod(&inv, m.value()), &total);
        x = x.add_mod(&term, &total);
    }
    x
}

/// Exact binomial coefficient, used by oracles and series arithmetic.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for j in 0..r {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}
