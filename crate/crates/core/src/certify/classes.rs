//! Function classes: structural membership tests, class inference and the mod-`p^2`
//! derivative of class-A series.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::UnaryMap;
use crate::error::{Error, Result};
use crate::expr::FnExpr;
use crate::mahler::{is_compatible, rho_lambda, MahlerSeries, RationalPoly, DEGREE_CAP};
use crate::padic::{rational_valuation, Modulus, ResidueInt};
use crate::scalar::Natural;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassTag {
    /// Polynomial with p-integral coefficients.
    ZPoly,
    /// Integer-valued polynomial over `Q` with p in some denominator.
    QpPolyIntval,
    ClassA,
    ClassB,
    GenericCompatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionClass {
    pub tag: ClassTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u32>,
}

impl FunctionClass {
    pub fn class_b() -> Self {
        FunctionClass { tag: ClassTag::ClassB, degree: None, rho: Some(0), lambda: Some(1) }
    }

    pub fn generic() -> Self {
        FunctionClass { tag: ClassTag::GenericCompatible, degree: None, rho: None, lambda: None }
    }

    /// Class A with `rho` and `lambda` taken from the polynomial's denominators.
    pub fn class_a(poly: &RationalPoly, p: u64) -> Self {
        let (rho, lambda) = rho_lambda(poly, p);
        FunctionClass { tag: ClassTag::ClassA, degree: Some(poly.degree()), rho: Some(rho), lambda: Some(lambda) }
    }

    /// `Z_POLY` or `QP_POLY_INTVAL`; polynomials leaving `Z_p` are rejected.
    pub fn of_poly(poly: &RationalPoly, p: u64) -> Result<Self> {
        let degree = Some(poly.degree());
        if poly.is_p_integral(p) {
            return Ok(FunctionClass { tag: ClassTag::ZPoly, degree, rho: Some(0), lambda: Some(1) });
        }
        if !poly.to_mahler(p).is_integer_valued() {
            return Err(Error::NotIntegerValued { p: p.to_string() });
        }
        let (rho, lambda) = rho_lambda(poly, p);
        Ok(FunctionClass { tag: ClassTag::QpPolyIntval, degree, rho: Some(rho), lambda: Some(lambda) })
    }
}

/// Most specific class recognised for `f` at the prime `p`.
pub fn infer_class<F: UnaryMap + ?Sized>(f: &F, p: u64) -> Result<FunctionClass> {
    if let Some(poly) = f.to_poly() {
        return FunctionClass::of_poly(&poly, p);
    }
    match f.as_expr() {
        Some(e) if class_b_membership(e, p) => Ok(FunctionClass::class_b()),
        _ => Ok(FunctionClass::generic()),
    }
}

fn p_integral(q: &BigRational, p: u64) -> bool {
    rational_valuation(q, &BigUint::from(p)).is_none_or(|v| v >= 0)
}

/// Residues `e(0), ..., e(p - 1)` mod `p`, or `None` when evaluation fails.
fn residues_mod_p(e: &FnExpr, p: u64) -> Option<Vec<u64>> {
    let m = Modulus::<u64>::new(p, 1).ok()?;
    let compiled = e.compile(&m).ok()?;
    (0..p).map(|x| compiled.eval(&x).ok()).collect()
}

fn nowhere_zero_mod_p(e: &FnExpr, p: u64) -> bool {
    residues_mod_p(e, p).is_some_and(|r| r.iter().all(|&v| v != 0))
}

fn one_unit_mod_p(e: &FnExpr, p: u64) -> bool {
    residues_mod_p(e, p).is_some_and(|r| r.iter().all(|&v| v == 1 % p))
}

/// Structural membership in the ring B: p-integral polynomials, inverses of functions
/// vanishing nowhere mod `p`, powers of 1-units with exponents in B, and their sums,
/// products, differences and compositions. Bitwise nodes are rejected.
pub fn class_b_membership(e: &FnExpr, p: u64) -> bool {
    match e {
        FnExpr::Var => true,
        FnExpr::Const(c) => p_integral(&c.0, p),
        FnExpr::Add(a, b) | FnExpr::Sub(a, b) | FnExpr::Mul(a, b) | FnExpr::Compose(a, b) => {
            class_b_membership(a, p) && class_b_membership(b, p)
        }
        FnExpr::Xor(..) | FnExpr::And(..) | FnExpr::Or(..) | FnExpr::Neg(_) => false,
        FnExpr::Pow(base, exponent) => match FnExpr::natural_exponent(exponent) {
            Some(_) => class_b_membership(base, p),
            None => one_unit_in_b(base, p) && class_b_membership(exponent, p),
        },
        FnExpr::Inv(a) => class_b_membership(a, p) && nowhere_zero_mod_p(a, p),
        FnExpr::Poly { poly, arg } => poly.is_p_integral(p) && class_b_membership(arg, p),
        FnExpr::Delta(a) => class_b_membership(a, p),
    }
}

/// `u = 1 + p w` with `w` in B. Members of B reduce mod `p` through `x mod p`, so the
/// residues at `0..p` decide the congruence.
fn one_unit_in_b(e: &FnExpr, p: u64) -> bool {
    class_b_membership(e, p) && one_unit_mod_p(e, p)
}

/// Whether every node is a compatible primitive used within its hypotheses.
pub fn structurally_compatible(e: &FnExpr, p: u64) -> bool {
    match e {
        FnExpr::Var => true,
        FnExpr::Const(c) => p_integral(&c.0, p),
        FnExpr::Add(a, b) | FnExpr::Sub(a, b) | FnExpr::Mul(a, b) | FnExpr::Compose(a, b) => {
            structurally_compatible(a, p) && structurally_compatible(b, p)
        }
        FnExpr::Xor(a, b) | FnExpr::And(a, b) | FnExpr::Or(a, b) => {
            p == 2 && structurally_compatible(a, p) && structurally_compatible(b, p)
        }
        FnExpr::Neg(a) => p == 2 && structurally_compatible(a, p),
        FnExpr::Pow(base, exponent) => match FnExpr::natural_exponent(exponent) {
            Some(_) => structurally_compatible(base, p),
            None => structurally_compatible(base, p) && structurally_compatible(exponent, p) && one_unit_mod_p(base, p),
        },
        FnExpr::Inv(a) => structurally_compatible(a, p) && nowhere_zero_mod_p(a, p),
        FnExpr::Poly { poly, arg } => {
            poly.degree() <= DEGREE_CAP
                && is_compatible(&poly.to_mahler(p)).unwrap_or(false)
                && structurally_compatible(arg, p)
        }
        FnExpr::Delta(a) => structurally_compatible(a, p),
    }
}

/// `f'_2(x) = sum_{i=1}^{2 p^lambda} (-1)^(i-1) Delta^i f(x) / i (mod p^2)` for a
/// compatible series at odd `p`.
pub fn derivative_mod_p<T: Natural>(series: &MahlerSeries, x: &ResidueInt<T>, lambda: u32) -> Result<ResidueInt<T>> {
    let p = series.p();
    let not_a = || Error::NotClassA { p: p.to_string() };
    if p == 2 || x.modulus().p_u64() != p || !is_compatible(series)? {
        return Err(not_a());
    }
    let target = x.modulus().with_exponent(2)?;
    let terms = 2 * p.checked_pow(lambda).ok_or_else(not_a)?;
    let xv = BigInt::from(x.residue().to_biguint());
    let d = series.degree() as u64;
    // C(x, j) for j = 0..=d by the multiplicative recurrence.
    let mut binoms = Vec::with_capacity(d as usize + 1);
    let mut c = BigRational::one();
    for j in 0..=d {
        binoms.push(c.clone());
        c *= BigRational::new(&xv - BigInt::from(j), BigInt::from(j + 1));
    }
    let mut sum = BigRational::zero();
    for i in 1..=terms.min(d) {
        // Delta^i f(x) = sum_{j >= i} a_j C(x, j - i)
        let diff: BigRational = (i..=d).map(|j| series.coeff(j as usize) * &binoms[(j - i) as usize]).sum();
        let term = diff / BigRational::from_integer(BigInt::from(i));
        sum = if i % 2 == 1 { sum + term } else { sum - term };
    }
    Ok(target.residue(target.reduce_rational(&sum).map_err(|_| not_a())?))
}
