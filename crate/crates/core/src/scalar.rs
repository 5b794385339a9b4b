//! Backing integer types for residues.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{BitAnd, BitOr, BitXor};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedMul, FromPrimitive, ToPrimitive, Unsigned};

/// An unsigned natural number type able to hold residues mod `p^k`.
///
/// Fixed-width implementors report overflow through `from_biguint` and
/// `checked_mul`; `BigUint` never overflows.
pub trait Natural:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + Unsigned
    + Integer
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + BitAnd<Output = Self>
    + BitOr<Output = Self>
    + BitXor<Output = Self>
    + 'static
{
    fn from_biguint(n: &BigUint) -> Option<Self>;

    fn to_biguint(&self) -> BigUint;

    /// `(self * rhs) mod m` without intermediate overflow.
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self;

    fn from_small(n: u64) -> Self {
        <Self as FromPrimitive>::from_u64(n).expect("u64 fits every natural backing type")
    }

    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        // Operands are reduced, so `m - rhs` cannot underflow.
        let gap = m.clone() - rhs.clone();
        if *self >= gap {
            self.clone() - gap
        } else {
            self.clone() + rhs.clone()
        }
    }

    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self.clone() - rhs.clone()
        } else {
            m.clone() - (rhs.clone() - self.clone())
        }
    }

    fn neg_mod(&self, m: &Self) -> Self {
        if self.is_zero() {
            Self::zero()
        } else {
            m.clone() - self.clone()
        }
    }

    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        let two = Self::one() + Self::one();
        let mut result = Self::one() % m.clone();
        let mut base = self.clone() % m.clone();
        let mut e = exp.clone();
        while !e.is_zero() {
            if e.is_odd() {
                result = result.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            e = e / two.clone();
        }
        result
    }

    /// Lossy conversion used only for brute-force indexing below the state cap.
    fn to_index(&self) -> usize {
        self.to_usize().expect("index exceeds usize")
    }
}

impl Natural for u32 {
    fn from_biguint(n: &BigUint) -> Option<Self> {
        n.to_u32()
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        ((*self as u64 * *rhs as u64) % *m as u64) as u32
    }
}

impl Natural for u64 {
    fn from_biguint(n: &BigUint) -> Option<Self> {
        n.to_u64()
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        ((*self as u128 * *rhs as u128) % *m as u128) as u64
    }
}

impl Natural for BigUint {
    fn from_biguint(n: &BigUint) -> Option<Self> {
        Some(n.clone())
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self * rhs) % m
    }

    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        self.modpow(exp, m)
    }
}
