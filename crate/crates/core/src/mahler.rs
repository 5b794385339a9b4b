//! Interpolation series `f(x) = sum a_i C(x, i)`, rational polynomials in the monomial
//! and falling-factorial bases, and the coefficient criteria for compatibility,
//! measure preservation and ergodicity.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    factorial_order, floor_log, inverse_mod, rational_valuation, Modulus, ModulusSpec, Order, ResidueInt,
};
use crate::scalar::Natural;

/// Largest degree accepted by the coefficient criteria.
pub const DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Monomial,
    FallingFactorial,
}

/// Polynomial with exact rational coefficients in a fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoly {
    basis: Basis,
    #[serde(with = "rational_list")]
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(basis: Basis, coeffs: Vec<BigRational>) -> Self {
        let mut poly = RationalPoly { basis, coeffs };
        poly.trim();
        poly
    }

    pub fn monomial(coeffs: Vec<BigRational>) -> Self {
        Self::new(Basis::Monomial, coeffs)
    }

    pub fn falling(coeffs: Vec<BigRational>) -> Self {
        Self::new(Basis::FallingFactorial, coeffs)
    }

    pub fn from_integers(basis: Basis, coeffs: &[i64]) -> Self {
        Self::new(basis, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// `c * basis_i`, e.g. `(5/18)(x)_6`.
    pub fn term(basis: Basis, i: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); i + 1];
        coeffs[i] = c;
        Self::new(basis, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_basis(&self, basis: Basis) -> RationalPoly {
        if basis == self.basis {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n];
        match self.basis {
            // x^j = sum_i S2(j, i) (x)_i
            Basis::Monomial => {
                let table = stirling_second(n);
                for (j, c) in self.coeffs.iter().enumerate() {
                    for (i, s) in table[j].iter().enumerate() {
                        if !s.is_zero() {
                            out[i] += c * BigRational::from_integer(s.clone());
                        }
                    }
                }
            }
            // (x)_j = sum_i s1(j, i) x^i
            Basis::FallingFactorial => {
                let table = stirling_first(n);
                for (j, c) in self.coeffs.iter().enumerate() {
                    for (i, s) in table[j].iter().enumerate() {
                        if !s.is_zero() {
                            out[i] += c * BigRational::from_integer(s.clone());
                        }
                    }
                }
            }
        }
        RationalPoly::new(basis, out)
    }

    pub fn add(&self, rhs: &RationalPoly) -> RationalPoly {
        let rhs = rhs.to_basis(self.basis);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
                    + rhs.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect();
        RationalPoly::new(self.basis, coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        RationalPoly::new(self.basis, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> RationalPoly {
        self.scale(&-BigRational::one())
    }

    /// Product, returned in the monomial basis.
    pub fn mul(&self, rhs: &RationalPoly) -> RationalPoly {
        let a = self.to_basis(Basis::Monomial);
        let b = rhs.to_basis(Basis::Monomial);
        if a.is_zero() || b.is_zero() {
            return RationalPoly::monomial(vec![]);
        }
        let mut out = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        RationalPoly::monomial(out)
    }

    /// `self(inner(x))`, in the monomial basis.
    pub fn compose(&self, inner: &RationalPoly) -> RationalPoly {
        let outer = self.to_basis(Basis::Monomial);
        let mut acc = RationalPoly::monomial(vec![]);
        for c in outer.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&RationalPoly::monomial(vec![c.clone()]));
        }
        acc.to_basis(Basis::Monomial)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = match self.basis {
                Basis::Monomial => acc * x + c,
                Basis::FallingFactorial => acc * (x - BigRational::from_integer(BigInt::from(i))) + c,
            };
        }
        acc
    }

    pub fn eval_integer(&self, x: i64) -> BigRational {
        self.eval_exact(&BigRational::from_integer(x.into()))
    }

    /// Interpolation-series coefficients `a_i = i! b_i` from the falling-factorial form.
    pub fn to_mahler(&self, p: u64) -> MahlerSeries {
        let falling = self.to_basis(Basis::FallingFactorial);
        let mut fact = BigInt::one();
        let coeffs = falling
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if i > 0 {
                    fact *= BigInt::from(i);
                }
                b * BigRational::from_integer(fact.clone())
            })
            .collect();
        MahlerSeries::new(p, coeffs)
    }

    /// Largest power of `p` in any coefficient denominator; basis independent.
    pub fn denominator_order(&self, p: u64) -> u32 {
        let p = BigUint::from(p);
        self.coeffs.iter().filter_map(|c| rational_valuation(c, &p)).map(|v| (-v).max(0) as u32).max().unwrap_or(0)
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.denominator_order(p) == 0
    }

    /// Whether every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn compile<T: Natural>(&self, m: &Modulus<T>) -> Result<PolyKernel<T>> {
        PolyKernel::new(self, m)
    }

    /// Exact evaluation at every residue lifted as its least representative.
    pub fn eval_residue<T: Natural>(&self, x: &ResidueInt<T>) -> Result<ResidueInt<T>> {
        let kernel = self.compile(x.modulus())?;
        Ok(x.modulus().residue(kernel.eval(x.residue())?))
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.is_integer() { c.numer().to_string() } else { format!("({c})") };
            match (i, self.basis) {
                (0, _) => write!(f, "{coeff}")?,
                (_, Basis::Monomial) => write!(f, "{coeff}*x^{i}")?,
                (_, Basis::FallingFactorial) => write!(f, "{coeff}*ff(x,{i})")?,
            }
        }
        Ok(())
    }
}

/// Signed Stirling numbers of the first kind, `s1[n][k]`, for `n < size`.
pub fn stirling_first(size: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); size.max(1)]; size.max(1)];
    table[0][0] = BigInt::one();
    for n in 1..size {
        for k in 1..=n {
            table[n][k] = &table[n - 1][k - 1] - BigInt::from(n - 1) * &table[n - 1][k];
        }
    }
    table
}

/// Stirling numbers of the second kind, `s2[n][k]`, for `n < size`.
pub fn stirling_second(size: usize) -> Vec<Vec<BigInt>> {
    let mut table = vec![vec![BigInt::zero(); size.max(1)]; size.max(1)];
    table[0][0] = BigInt::one();
    for n in 1..size {
        for k in 1..=n {
            table[n][k] = &table[n - 1][k - 1] + BigInt::from(k) * &table[n - 1][k];
        }
    }
    table
}

/// Evaluator for one rational polynomial at one modulus.
///
/// With `D = p^e D'` the common denominator, values are computed as
/// `(D f(x) mod p^(k+e)) / p^e * D'^-1 mod p^k`.
#[derive(Debug, Clone)]
pub struct PolyKernel<T> {
    basis: Basis,
    numerators: Vec<T>,
    lift: T,
    shift: T,
    unit_inv: T,
    target: T,
    p: String,
}

impl<T: Natural> PolyKernel<T> {
    pub fn new(poly: &RationalPoly, m: &Modulus<T>) -> Result<Self> {
        let p = m.p_u64();
        let lcd = poly.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let e = crate::padic::ord_p(lcd.magnitude(), &BigUint::from(p)).finite().unwrap_or(0);
        let lifted = m.with_exponent(m.k() + e)?;
        let shift = lifted.value().clone() / m.value().clone();
        let unit = (lcd.clone() / num_traits::pow(BigInt::from(p), e as usize)).abs();
        let unit_inv = inverse_mod(&m.reduce_bigint(&unit), m.value()).expect("unit part is prime to p");
        let numerators = poly
            .coeffs
            .iter()
            .map(|c| lifted.reduce_bigint(&(c * BigRational::from_integer(lcd.clone())).to_integer()))
            .collect();
        Ok(PolyKernel {
            basis: poly.basis,
            numerators,
            lift: lifted.value().clone(),
            shift,
            unit_inv,
            target: m.value().clone(),
            p: m.p().to_string(),
        })
    }

    pub fn eval(&self, x: &T) -> Result<T> {
        let lift = &self.lift;
        let x = x.clone() % lift.clone();
        let mut acc = T::zero();
        for (i, c) in self.numerators.iter().enumerate().rev() {
            let factor = match self.basis {
                Basis::Monomial => x.clone(),
                Basis::FallingFactorial => x.sub_mod(&(T::from_small(i as u64) % lift.clone()), lift),
            };
            acc = acc.mul_mod(&factor, lift).add_mod(c, lift);
        }
        let (q, r) = acc.div_rem(&self.shift);
        if !r.is_zero() {
            return Err(Error::NotIntegerValued { p: self.p.clone() });
        }
        Ok(q.mul_mod(&self.unit_inv, &self.target))
    }
}

/// Truncated interpolation series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MahlerSeries {
    p: u64,
    #[serde(with = "rational_list")]
    coeffs: Vec<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision_note: Option<ModulusSpec>,
}

impl MahlerSeries {
    pub fn new(p: u64, coeffs: Vec<BigRational>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        MahlerSeries { p, coeffs, precision_note: None }
    }

    pub fn from_integers(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn with_precision_note(mut self, note: ModulusSpec) -> Self {
        self.precision_note = Some(note);
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn precision_note(&self) -> Option<ModulusSpec> {
        self.precision_note
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Same function as a falling-factorial polynomial, `b_i = a_i / i!`.
    pub fn to_poly(&self) -> RationalPoly {
        let mut fact = BigInt::one();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i > 0 {
                    fact *= BigInt::from(i);
                }
                a / BigRational::from_integer(fact.clone())
            })
            .collect();
        RationalPoly::falling(coeffs)
    }

    /// Whether every coefficient is p-integral, i.e. the series maps `Z_p` into `Z_p`.
    pub fn is_integer_valued(&self) -> bool {
        let p = BigUint::from(self.p);
        self.coeffs.iter().all(|c| rational_valuation(c, &p).is_none_or(|v| v >= 0))
    }

    fn order(&self, i: usize) -> Order {
        let p = BigUint::from(self.p);
        match rational_valuation(&self.coeff(i), &p) {
            None => Order::Infinite,
            Some(v) => Order::Finite(v.max(0) as u32),
        }
    }

    fn order_of_shifted(&self, i: usize, shift: i64) -> Order {
        let p = BigUint::from(self.p);
        let c = self.coeff(i) - BigRational::from_integer(shift.into());
        match rational_valuation(&c, &p) {
            None => Order::Infinite,
            Some(v) => Order::Finite(v.max(0) as u32),
        }
    }

    fn check_degree(&self) -> Result<()> {
        if self.degree() > DEGREE_CAP {
            return Err(Error::DegreeCap { degree: self.degree(), cap: DEGREE_CAP });
        }
        Ok(())
    }

    pub fn compile<T: Natural>(&self, m: &Modulus<T>) -> Result<PolyKernel<T>> {
        if m.p_u64() != self.p {
            return Err(Error::WrongPrime { expected: self.p.to_string(), actual: m.p().to_string() });
        }
        self.to_poly().compile(m)
    }
}

impl fmt::Display for MahlerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}] (p = {})", parts.join(", "), self.p)
    }
}

/// `a_i = Delta^i f(0)` from the values `f(0), ..., f(d)`.
pub fn coeffs_from_values(values: &[BigRational], p: u64) -> MahlerSeries {
    let mut row: Vec<BigRational> = values.to_vec();
    let mut coeffs = Vec::with_capacity(values.len());
    while !row.is_empty() {
        coeffs.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    MahlerSeries::new(p, coeffs)
}

/// `sum a_i C(x, i) mod p^k`, lifting `x` so each binomial is exact.
pub fn eval<T: Natural>(series: &MahlerSeries, x: &ResidueInt<T>) -> Result<ResidueInt<T>> {
    let target = x.modulus();
    if target.p_u64() != series.p {
        return Err(Error::WrongPrime { expected: series.p.to_string(), actual: target.p().to_string() });
    }
    series.check_degree()?;
    let extra = factorial_order(series.degree() as u64, series.p);
    let lifted = x.lift_to(&target.with_exponent(target.k() + extra)?)?;
    let mut acc = target.zero();
    for (i, a) in series.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let a = target.residue(target.reduce_rational(a)?);
        let c = crate::padic::binomial_eval(&lifted, i as u64, target)?;
        acc = acc.add(&a.mul(&c)?)?;
    }
    Ok(acc)
}

/// Compatibility criterion: `ord_p(a_i) >= floor(log_p i)` for every `i >= p`.
///
/// Series that are not integer-valued are reported as incompatible.
pub fn is_compatible(series: &MahlerSeries) -> Result<bool> {
    series.check_degree()?;
    if !series.is_integer_valued() {
        return Ok(false);
    }
    let p = series.p;
    Ok((p as usize..=series.degree()).all(|i| series.order(i).at_least(floor_log(i as u64, p))))
}

fn require_prime(series: &MahlerSeries, two: bool) -> Result<()> {
    match (two, series.p == 2) {
        (true, false) => Err(Error::WrongPrime { expected: "2".into(), actual: series.p.to_string() }),
        (false, true) => Err(Error::WrongPrime { expected: "an odd prime".into(), actual: "2".into() }),
        _ => Ok(()),
    }
}

/// Normal form for compatible measure-preserving maps of `Z_2`.
pub fn is_measure_preserving_2adic(series: &MahlerSeries) -> Result<bool> {
    require_prime(series, true)?;
    series.check_degree()?;
    if !series.is_integer_valued() {
        return Ok(false);
    }
    let unit_slope = series.order(1) == Order::Finite(0);
    Ok(unit_slope && (2..=series.degree()).all(|i| series.order(i).at_least(floor_log(i as u64, 2) + 1)))
}

/// Normal form for compatible ergodic maps of `Z_2`.
pub fn is_ergodic_2adic(series: &MahlerSeries) -> Result<bool> {
    require_prime(series, true)?;
    series.check_degree()?;
    if !series.is_integer_valued() {
        return Ok(false);
    }
    let odd_constant = series.order(0) == Order::Finite(0);
    let slope = series.order_of_shifted(1, 1).at_least(2);
    Ok(odd_constant && slope && (2..=series.degree()).all(|i| series.order(i).at_least(floor_log(i as u64 + 1, 2) + 1)))
}

/// Sufficient coefficient conditions for ergodicity at odd `p`. A `false` is not a refutation.
pub fn is_ergodic_sufficient_oddp(series: &MahlerSeries) -> Result<bool> {
    require_prime(series, false)?;
    series.check_degree()?;
    if !series.is_integer_valued() {
        return Ok(false);
    }
    let p = series.p;
    let constant = series.order(0) == Order::Finite(0);
    let slope = series.order_of_shifted(1, 1).at_least(1);
    Ok(constant && slope && (2..=series.degree()).all(|i| series.order(i).at_least(floor_log(i as u64 + 1, p) + 1)))
}

/// `rho = ord_p` of the common denominator; `lambda = min{k >= 1 : 2(p^k - 1)/(p - 1) - k > rho}`.
pub fn rho_lambda(poly: &RationalPoly, p: u64) -> (u32, u32) {
    let rho = poly.denominator_order(p);
    let mut k = 1u32;
    loop {
        // 2(p^k - 1)/(p - 1) = 2(1 + p + ... + p^(k-1))
        let geometric: u128 = (0..k).map(|j| (p as u128).saturating_pow(j)).sum();
        if 2 * geometric > k as u128 + rho as u128 {
            return (rho, k);
        }
        k += 1;
    }
}

/// JSON form `[[numerator, denominator], ...]`, integers inline when they fit in i64.
pub(crate) mod rational_list {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn int_value(n: &BigInt) -> Value {
        match n.to_i64() {
            Some(v) => Value::from(v),
            None => Value::from(n.to_string()),
        }
    }

    pub fn parse_int(v: &Value) -> Option<BigInt> {
        match v {
            Value::Number(n) => n.as_i64().map(BigInt::from),
            Value::String(s) => s.parse().ok(),
            _ => None,
        }
    }

    pub fn to_value(q: &BigRational) -> Value {
        Value::Array(vec![int_value(q.numer()), int_value(q.denom())])
    }

    pub fn from_value(v: &Value) -> Option<BigRational> {
        let pair = v.as_array()?;
        if pair.len() != 2 {
            return None;
        }
        let den = parse_int(&pair[1])?;
        if den == BigInt::from(0) {
            return None;
        }
        Some(BigRational::new(parse_int(&pair[0])?, den))
    }

    pub fn serialize<S: Serializer>(coeffs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        coeffs.iter().map(to_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<Value>::deserialize(d)?;
        raw.iter().map(|v| from_value(v).ok_or_else(|| D::Error::custom(format!("bad rational {v}")))).collect()
    }
}
