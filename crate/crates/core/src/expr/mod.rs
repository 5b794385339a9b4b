//! Expression algebra of compatible functions: the AST, its evaluation in `Z/p^k`,
//! the difference operator and the generator constructors.

mod parse;
mod triangle;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use parse::{parse_dsl, parse_dsl_with_spans, Parsed, Span};
pub use triangle::{triangle_eval, BoolTriangle};

use crate::error::{Error, Result};
use crate::mahler::{Basis, PolyKernel, RationalPoly};
use crate::padic::{rational_valuation, unit_pow_raw, CompositeModulus, Modulus, ResidueInt};
use crate::scalar::Natural;

/// Exact rational constant with the `[numerator, denominator]` JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::mahler::rational_list::to_value(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        crate::mahler::rational_list::from_value(&v)
            .map(Rational)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {v}")))
    }
}

/// AST of a compatible one-variable function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "args", rename_all = "snake_case")]
pub enum FnExpr {
    Var,
    Const(Rational),
    Add(Box<FnExpr>, Box<FnExpr>),
    Sub(Box<FnExpr>, Box<FnExpr>),
    Mul(Box<FnExpr>, Box<FnExpr>),
    Xor(Box<FnExpr>, Box<FnExpr>),
    And(Box<FnExpr>, Box<FnExpr>),
    Or(Box<FnExpr>, Box<FnExpr>),
    /// Digitwise complement, `z -> -1 - z` in `Z/2^k`.
    Neg(Box<FnExpr>),
    /// Ordinary power for a natural constant exponent, otherwise a 1-unit base raised
    /// to a p-adic exponent.
    Pow(Box<FnExpr>, Box<FnExpr>),
    Inv(Box<FnExpr>),
    Poly {
        poly: RationalPoly,
        arg: Box<FnExpr>,
    },
    Delta(Box<FnExpr>),
    /// `outer(inner(x))`
    Compose(Box<FnExpr>, Box<FnExpr>),
}

pub fn var() -> FnExpr {
    FnExpr::Var
}

pub fn constant(c: impl Into<BigInt>) -> FnExpr {
    FnExpr::Const(Rational(BigRational::from_integer(c.into())))
}

pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> FnExpr {
    FnExpr::Const(Rational(BigRational::new(num.into(), den.into())))
}

pub fn poly(poly: RationalPoly) -> FnExpr {
    FnExpr::Poly { poly, arg: Box::new(FnExpr::Var) }
}

/// `(x)_i` as a polynomial node.
pub fn falling(i: usize) -> FnExpr {
    poly(RationalPoly::term(Basis::FallingFactorial, i, BigRational::one()))
}

impl std::ops::Add for FnExpr {
    type Output = FnExpr;

    fn add(self, rhs: FnExpr) -> FnExpr {
        FnExpr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for FnExpr {
    type Output = FnExpr;

    fn sub(self, rhs: FnExpr) -> FnExpr {
        FnExpr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for FnExpr {
    type Output = FnExpr;

    fn mul(self, rhs: FnExpr) -> FnExpr {
        FnExpr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl FnExpr {
    pub fn xor(self, rhs: FnExpr) -> FnExpr {
        FnExpr::Xor(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: FnExpr) -> FnExpr {
        FnExpr::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: FnExpr) -> FnExpr {
        FnExpr::Or(Box::new(self), Box::new(rhs))
    }

    pub fn bit_neg(self) -> FnExpr {
        FnExpr::Neg(Box::new(self))
    }

    pub fn pow(self, exponent: FnExpr) -> FnExpr {
        FnExpr::Pow(Box::new(self), Box::new(exponent))
    }

    pub fn inv(self) -> FnExpr {
        FnExpr::Inv(Box::new(self))
    }

    pub fn delta(self) -> FnExpr {
        FnExpr::Delta(Box::new(self))
    }

    /// `self(inner(x))`
    pub fn compose(self, inner: FnExpr) -> FnExpr {
        FnExpr::Compose(Box::new(self), Box::new(inner))
    }

    pub fn children(&self) -> Vec<&FnExpr> {
        match self {
            FnExpr::Var | FnExpr::Const(_) => vec![],
            FnExpr::Add(a, b)
            | FnExpr::Sub(a, b)
            | FnExpr::Mul(a, b)
            | FnExpr::Xor(a, b)
            | FnExpr::And(a, b)
            | FnExpr::Or(a, b)
            | FnExpr::Pow(a, b)
            | FnExpr::Compose(a, b) => vec![a, b],
            FnExpr::Neg(a) | FnExpr::Inv(a) | FnExpr::Delta(a) => vec![a],
            FnExpr::Poly { arg, .. } => vec![arg],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn uses_bitwise(&self) -> bool {
        matches!(self, FnExpr::Xor(..) | FnExpr::And(..) | FnExpr::Or(..) | FnExpr::Neg(_))
            || self.children().iter().any(|c| c.uses_bitwise())
    }

    /// Exponent of a `Pow` node when it is a natural-number constant.
    pub fn natural_exponent(exponent: &FnExpr) -> Option<u64> {
        match exponent {
            FnExpr::Const(Rational(q)) if q.is_integer() && !q.is_negative() => q.numer().to_u64(),
            _ => None,
        }
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            FnExpr::Const(Rational(q)) => Some(q),
            _ => None,
        }
    }

    /// Polynomial form when the expression is built from `+`, `-`, `*`, natural powers,
    /// polynomial nodes, differences and compositions only.
    pub fn to_poly(&self) -> Option<RationalPoly> {
        let x = || RationalPoly::from_integers(Basis::Monomial, &[0, 1]);
        match self {
            FnExpr::Var => Some(x()),
            FnExpr::Const(Rational(q)) => Some(RationalPoly::monomial(vec![q.clone()])),
            FnExpr::Add(a, b) => Some(a.to_poly()?.add(&b.to_poly()?)),
            FnExpr::Sub(a, b) => Some(a.to_poly()?.add(&b.to_poly()?.neg())),
            FnExpr::Mul(a, b) => Some(a.to_poly()?.mul(&b.to_poly()?)),
            FnExpr::Pow(base, e) => {
                let n = Self::natural_exponent(e)?;
                if n > 64 {
                    return None;
                }
                let base = base.to_poly()?;
                let mut acc = RationalPoly::monomial(vec![BigRational::one()]);
                for _ in 0..n {
                    acc = acc.mul(&base);
                }
                Some(acc)
            }
            FnExpr::Poly { poly, arg } => Some(poly.compose(&arg.to_poly()?)),
            FnExpr::Delta(a) => {
                let inner = a.to_poly()?;
                let shifted = inner.compose(&RationalPoly::from_integers(Basis::Monomial, &[1, 1]));
                Some(shifted.add(&inner.neg()).to_basis(Basis::Monomial))
            }
            FnExpr::Compose(outer, inner) => Some(outer.to_poly()?.compose(&inner.to_poly()?)),
            _ => None,
        }
        .map(|p| p.to_basis(Basis::Monomial))
    }

    pub fn compile<T: Natural>(&self, m: &Modulus<T>) -> Result<CompiledExpr<T>> {
        Ok(CompiledExpr { root: compile_node(self, m)?, modulus: m.clone() })
    }
}

impl fmt::Display for FnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnExpr::Var => write!(f, "x"),
            FnExpr::Const(Rational(q)) => {
                if q.is_integer() && !q.is_negative() {
                    write!(f, "{}", q.numer())
                } else if q.is_integer() {
                    write!(f, "({})", q.numer())
                } else {
                    write!(f, "({}/{})", q.numer(), q.denom())
                }
            }
            FnExpr::Add(a, b) => write!(f, "({a} + {b})"),
            FnExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            FnExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            FnExpr::Xor(a, b) => write!(f, "xor({a}, {b})"),
            FnExpr::And(a, b) => write!(f, "and({a}, {b})"),
            FnExpr::Or(a, b) => write!(f, "or({a}, {b})"),
            FnExpr::Neg(a) => write!(f, "neg({a})"),
            FnExpr::Pow(a, b) => write!(f, "({a})^({b})"),
            FnExpr::Inv(a) => write!(f, "inv({a})"),
            FnExpr::Poly { poly, arg } => {
                let body = poly_text(poly);
                if **arg == FnExpr::Var {
                    write!(f, "({body})")
                } else {
                    write!(f, "compose({body}, {arg})")
                }
            }
            FnExpr::Delta(a) => write!(f, "delta({a})"),
            FnExpr::Compose(a, b) => write!(f, "compose({a}, {b})"),
        }
    }
}

/// DSL text for a polynomial that parses back into a single polynomial node.
fn poly_text(poly: &RationalPoly) -> String {
    let mut parts = Vec::new();
    for (i, c) in poly.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let coeff = if c.is_integer() { format!("({})", c.numer()) } else { format!("({}/{})", c.numer(), c.denom()) };
        let basis = match (i, poly.basis()) {
            (0, _) => String::new(),
            (_, Basis::Monomial) => format!("*x^{i}"),
            (_, Basis::FallingFactorial) => format!("*ff(x,{i})"),
        };
        parts.push(format!("{coeff}{basis}"));
    }
    if parts.is_empty() {
        match poly.basis() {
            Basis::Monomial => "0*x".into(),
            Basis::FallingFactorial => "0*ff(x,1)".into(),
        }
    } else {
        parts.join(" + ")
    }
}

#[derive(Debug, Clone)]
enum Node<T> {
    Var,
    Const(T),
    Add(Box<Node<T>>, Box<Node<T>>),
    Sub(Box<Node<T>>, Box<Node<T>>),
    Mul(Box<Node<T>>, Box<Node<T>>),
    Xor(Box<Node<T>>, Box<Node<T>>),
    And(Box<Node<T>>, Box<Node<T>>),
    Or(Box<Node<T>>, Box<Node<T>>),
    Neg(Box<Node<T>>),
    NatPow(Box<Node<T>>, T),
    UnitPow(Box<Node<T>>, Box<Node<T>>),
    Inv(Box<Node<T>>),
    Poly(PolyKernel<T>, Box<Node<T>>),
    Delta(Box<Node<T>>),
    Compose(Box<Node<T>>, Box<Node<T>>),
}

fn compile_node<T: Natural>(e: &FnExpr, m: &Modulus<T>) -> Result<Node<T>> {
    let sub = |c: &FnExpr| compile_node(c, m).map(Box::new);
    let bitwise = || {
        if m.p_u64() == 2 {
            Ok(())
        } else {
            Err(Error::BitwiseOddPrime { p: m.p().to_string() })
        }
    };
    Ok(match e {
        FnExpr::Var => Node::Var,
        FnExpr::Const(Rational(q)) => Node::Const(m.reduce_rational(q)?),
        FnExpr::Add(a, b) => Node::Add(sub(a)?, sub(b)?),
        FnExpr::Sub(a, b) => Node::Sub(sub(a)?, sub(b)?),
        FnExpr::Mul(a, b) => Node::Mul(sub(a)?, sub(b)?),
        FnExpr::Xor(a, b) => {
            bitwise()?;
            Node::Xor(sub(a)?, sub(b)?)
        }
        FnExpr::And(a, b) => {
            bitwise()?;
            Node::And(sub(a)?, sub(b)?)
        }
        FnExpr::Or(a, b) => {
            bitwise()?;
            Node::Or(sub(a)?, sub(b)?)
        }
        FnExpr::Neg(a) => {
            bitwise()?;
            Node::Neg(sub(a)?)
        }
        FnExpr::Pow(base, exponent) => match FnExpr::natural_exponent(exponent) {
            Some(n) => Node::NatPow(sub(base)?, T::from_small(n)),
            None => Node::UnitPow(sub(base)?, sub(exponent)?),
        },
        FnExpr::Inv(a) => Node::Inv(sub(a)?),
        FnExpr::Poly { poly, arg } => Node::Poly(poly.compile(m)?, sub(arg)?),
        FnExpr::Delta(a) => Node::Delta(sub(a)?),
        FnExpr::Compose(a, b) => Node::Compose(sub(a)?, sub(b)?),
    })
}

/// An expression with constants and polynomial kernels prepared for one modulus.
#[derive(Debug, Clone)]
pub struct CompiledExpr<T> {
    root: Node<T>,
    modulus: Modulus<T>,
}

impl<T: Natural> CompiledExpr<T> {
    pub fn modulus(&self) -> &Modulus<T> {
        &self.modulus
    }

    /// Value at a reduced input `x < p^k`.
    pub fn eval(&self, x: &T) -> Result<T> {
        self.eval_node(&self.root, x)
    }

    fn eval_node(&self, node: &Node<T>, x: &T) -> Result<T> {
        let m = self.modulus.value();
        Ok(match node {
            Node::Var => x.clone(),
            Node::Const(c) => c.clone(),
            Node::Add(a, b) => self.eval_node(a, x)?.add_mod(&self.eval_node(b, x)?, m),
            Node::Sub(a, b) => self.eval_node(a, x)?.sub_mod(&self.eval_node(b, x)?, m),
            Node::Mul(a, b) => self.eval_node(a, x)?.mul_mod(&self.eval_node(b, x)?, m),
            Node::Xor(a, b) => self.eval_node(a, x)? ^ self.eval_node(b, x)?,
            Node::And(a, b) => self.eval_node(a, x)? & self.eval_node(b, x)?,
            Node::Or(a, b) => self.eval_node(a, x)? | self.eval_node(b, x)?,
            Node::Neg(a) => (m.clone() - T::one()) - self.eval_node(a, x)?,
            Node::NatPow(a, n) => self.eval_node(a, x)?.pow_mod(n, m),
            Node::UnitPow(a, b) => unit_pow_raw(&self.eval_node(a, x)?, &self.eval_node(b, x)?, &self.modulus)?,
            Node::Inv(a) => {
                let v = self.eval_node(a, x)?;
                crate::padic::inverse_mod(&v, m)
                    .ok_or_else(|| Error::NotAUnit { value: v.to_string(), p: self.modulus.p().to_string() })?
            }
            Node::Poly(kernel, arg) => kernel.eval(&self.eval_node(arg, x)?)?,
            Node::Delta(a) => {
                let next = x.add_mod(&(T::one() % m.clone()), m);
                self.eval_node(a, &next)?.sub_mod(&self.eval_node(a, x)?, m)
            }
            Node::Compose(outer, inner) => {
                let y = self.eval_node(inner, x)?;
                self.eval_node(outer, &y)?
            }
        })
    }
}

pub fn eval_expr<T: Natural>(e: &FnExpr, x: &ResidueInt<T>) -> Result<ResidueInt<T>> {
    let compiled = e.compile(x.modulus())?;
    Ok(x.modulus().residue(compiled.eval(x.residue())?))
}

/// `e(x + 1) - e(x)`
pub fn delta(e: &FnExpr) -> FnExpr {
    e.clone().delta()
}

fn unit_coefficient(c: &BigRational, p: u64) -> Result<()> {
    match rational_valuation(c, &p.into()) {
        Some(0) => Ok(()),
        Some(v) if v < 0 => Err(Error::NotIntegerValued { p: p.to_string() }),
        _ => Err(Error::CDivisibleByP { p: p.to_string() }),
    }
}

/// `d + c x + p v(x)`, measure-preserving for `c` a p-adic unit and `v` compatible.
pub fn build_measure_preserving(v: &FnExpr, c: &BigRational, d: &BigRational, p: u64) -> Result<FnExpr> {
    unit_coefficient(c, p)?;
    Ok(FnExpr::Const(Rational(d.clone())) + FnExpr::Const(Rational(c.clone())) * var() + constant(p) * v.clone())
}

/// `c + x + p (v(x + 1) - v(x))`, ergodic for `c` a p-adic unit and `v` compatible.
pub fn build_ergodic(v: &FnExpr, c: &BigRational, p: u64) -> Result<FnExpr> {
    unit_coefficient(c, p)?;
    Ok(FnExpr::Const(Rational(c.clone())) + var() + constant(p) * delta(v))
}

/// `1 + x + p^2 g(x)` for `g` in class B.
pub fn build_ergodic_4_12(g: &FnExpr, p: u64) -> Result<FnExpr> {
    if !crate::certify::class_b_membership(g, p) {
        return Err(Error::NotClassB { p: p.to_string() });
    }
    Ok(constant(1) + var() + constant(p * p) * g.clone())
}

/// `1 + x + r^2 u(x) (1 + r v(x))^w(x)` with `r` the product of the primes of `m`.
pub fn build_composite_generator<T: Natural>(
    u: &RationalPoly,
    v: &RationalPoly,
    w: &RationalPoly,
    m: &CompositeModulus<T>,
) -> Result<FnExpr> {
    for part in [u, v, w] {
        if !part.has_integer_coeffs() {
            return Err(Error::InvalidArgument(format!("polynomial {part} must have integer coefficients")));
        }
    }
    let radical = BigInt::from(m.radical().to_biguint());
    let base = constant(1) + FnExpr::Const(Rational(radical.clone().into())) * poly(v.clone());
    let scale = FnExpr::Const(Rational((&radical * &radical).into()));
    Ok(constant(1) + var() + scale * poly(u.clone()) * base.pow(poly(w.clone())))
}

/// Evaluates an expression componentwise over a composite modulus.
pub fn eval_composite<T: Natural>(e: &FnExpr, m: &CompositeModulus<T>, x: &T) -> Result<T> {
    let parts = m.factors().iter().zip(m.split(x)).map(|(f, r)| e.compile(f)?.eval(&r)).collect::<Result<Vec<T>>>()?;
    Ok(m.combine(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::{Add, Mul};

    fn m64(p: u64, k: u32) -> Modulus<u64> {
        Modulus::new(p, k).unwrap()
    }

    fn at(e: &FnExpr, p: u64, k: u32, x: u64) -> u64 {
        eval_expr(e, &m64(p, k).residue(x)).unwrap().into_inner()
    }

    #[test]
    fn bitwise_examples() {
        assert_eq!(at(&constant(1).xor(constant(3)), 2, 3, 0), 2);
        assert_eq!(at(&constant(2).and(constant(7)), 2, 3, 0), 2);
        assert_eq!(at(&constant(13).bit_neg(), 2, 3, 0), 2);
        for k in 1..8 {
            for z in 0..(1u64 << k) {
                assert_eq!(at(&var().add(var().bit_neg()), 2, k, z), (1 << k) - 1);
            }
        }
    }

    #[test]
    fn bitwise_is_rejected_at_odd_primes() {
        let err = eval_expr(&var().xor(constant(1)), &m64(3, 2).residue(1)).unwrap_err();
        assert!(matches!(err, Error::BitwiseOddPrime { .. }));
    }

    #[test]
    fn pow_and_inverse() {
        let m = m64(2, 4);
        assert_eq!(at(&constant(3).inv(), 2, 4, 0), 11);
        assert_eq!(
            at(&constant(3).pow(rational(-1, 3)), 2, 4, 0),
            unit_pow_raw(&3, &m.reduce_rational(&BigRational::new((-1).into(), 3.into())).unwrap(), &m).unwrap()
        );
        assert_eq!(at(&constant(3).pow(constant(-5)), 2, 4, 0), 11);
        assert_eq!(at(&var().pow(constant(3)), 5, 2, 7), 343 % 25);
        let err = eval_expr(&constant(2).pow(var()), &m64(5, 2).residue(3)).unwrap_err();
        assert!(matches!(err, Error::BaseNotOneUnit { .. }));
        let err = eval_expr(&var().inv(), &m64(5, 2).residue(10)).unwrap_err();
        assert!(matches!(err, Error::NotAUnit { .. }));
    }

    #[test]
    fn delta_examples() {
        let square = var().mul(var());
        assert_eq!(at(&delta(&square), 2, 4, 3), 7);
        for x in 0..16 {
            assert_eq!(at(&delta(&constant(9)), 2, 4, x), 0);
        }
        // Pascal: Delta C(x, i) = C(x, i - 1). Binomials are not compatible, so the
        // wrap from 2^k - 1 to 0 is excluded.
        for i in 1..=6usize {
            let binom = |j: usize| {
                let c = BigRational::new(1.into(), (1..=j as i64).product::<i64>().into());
                poly(RationalPoly::term(Basis::FallingFactorial, j, c))
            };
            for k in 1..=8 {
                for x in 0..(1u64 << k) - 1 {
                    assert_eq!(at(&delta(&binom(i)), 2, k, x), at(&binom(i - 1), 2, k, x));
                }
            }
        }
    }

    #[test]
    fn measure_preserving_builder() {
        let one = BigRational::one();
        let id = build_measure_preserving(&constant(0), &one, &BigRational::zero(), 2).unwrap();
        for x in 0..32 {
            assert_eq!(at(&id, 2, 5, x), x);
        }
        let err = build_measure_preserving(&var(), &BigRational::from_integer(5.into()), &BigRational::zero(), 5);
        assert_eq!(err.unwrap_err(), Error::CDivisibleByP { p: "5".into() });
    }

    #[test]
    fn composite_builder_shape() {
        let m = CompositeModulus::factorize(&10_000u64).unwrap();
        let zero = RationalPoly::monomial(vec![]);
        let f = build_composite_generator(&zero, &zero, &zero, &m).unwrap();
        for x in [0u64, 17, 9_999] {
            assert_eq!(eval_composite(&f, &m, &x).unwrap(), (x + 1) % 10_000);
        }
        let half = RationalPoly::monomial(vec![BigRational::new(1.into(), 2.into())]);
        assert!(build_composite_generator(&half, &zero, &zero, &m).is_err());
    }

    #[test]
    fn to_poly_recovers_polynomials() {
        let e = constant(1).add(var()).add(rational(5, 18).mul(falling(6)));
        let p = e.to_poly().unwrap();
        assert_eq!(p.degree(), 6);
        for x in 0..20 {
            let want = BigRational::from_integer((1 + x).into())
                + BigRational::new(5.into(), 18.into())
                    * BigRational::from_integer((0..6).map(|j| x - j).product::<i64>().into());
            assert_eq!(p.eval_integer(x), want);
        }
        assert!(var().xor(constant(1)).to_poly().is_none());
        assert!(constant(3).pow(var()).to_poly().is_none());
    }

    #[test]
    fn json_round_trip() {
        let e = constant(1).add(var()).add(constant(2).mul(var().xor(constant(2).mul(var()).add(constant(1))).delta()));
        let json = serde_json::to_string(&e).unwrap();
        let back: FnExpr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
