//! Multivariate integer polynomials and their fiber censuses.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Certificate, Limits, Property, Theorem, Verdict, Witness};
use crate::error::{Error, Result};
use crate::padic::{Modulus, ModulusSpec};
use crate::scalar::Natural;

/// Sparse polynomial `sum c * x_0^e_0 ... x_{n-1}^e_{n-1}` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiPoly {
    arity: usize,
    /// JSON form `[[coefficient, [e_0, ..., e_{n-1}]], ...]`.
    #[serde(with = "term_list")]
    terms: Vec<(BigInt, Vec<u32>)>,
}

mod term_list {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    use crate::mahler::rational_list::{int_value, parse_int};

    pub fn serialize<S: Serializer>(terms: &[(BigInt, Vec<u32>)], s: S) -> Result<S::Ok, S::Error> {
        terms.iter().map(|(c, e)| (int_value(c), e)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigInt, Vec<u32>)>, D::Error> {
        let raw = Vec::<(Value, Vec<u32>)>::deserialize(d)?;
        raw.into_iter()
            .map(|(c, e)| parse_int(&c).map(|c| (c, e)).ok_or_else(|| D::Error::custom(format!("bad coefficient {c}"))))
            .collect()
    }
}

impl MultiPoly {
    pub fn new(arity: usize, terms: Vec<(BigInt, Vec<u32>)>) -> Result<Self> {
        if let Some((_, e)) = terms.iter().find(|(_, e)| e.len() != arity) {
            return Err(Error::LengthMismatch { expected: arity, actual: e.len() });
        }
        Ok(MultiPoly { arity, terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect() })
    }

    pub fn from_terms(arity: usize, terms: &[(i64, &[u32])]) -> Result<Self> {
        Self::new(arity, terms.iter().map(|(c, e)| (BigInt::from(*c), e.to_vec())).collect())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(BigInt, Vec<u32>)] {
        &self.terms
    }

    /// Formal partial derivative in variable `var`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[var] > 0)
            .map(|(c, e)| {
                let mut e = e.clone();
                let c = c * BigInt::from(e[var]);
                e[var] -= 1;
                (c, e)
            })
            .collect();
        MultiPoly::new(self.arity, terms).expect("arity preserved")
    }

    fn compile(&self, m: u64) -> Compiled {
        let modulus = BigInt::from(m);
        let reduce = |c: &BigInt| {
            let r = ((c % &modulus) + &modulus) % &modulus;
            r.to_u64().expect("reduced below the modulus")
        };
        Compiled { m, terms: self.terms.iter().map(|(c, e)| (reduce(c), e.clone())).collect() }
    }
}

struct Compiled {
    m: u64,
    terms: Vec<(u64, Vec<u32>)>,
}

impl Compiled {
    fn eval(&self, point: &[u64]) -> u64 {
        let m = &self.m;
        self.terms.iter().fold(0u64, |acc, (c, e)| {
            let term = e.iter().zip(point).fold(*c, |t, (&exp, x)| t.mul_mod(&x.pow_mod(&(exp as u64), m), m));
            acc.add_mod(&term, m)
        })
    }
}

fn decode(mut index: u64, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = index % base;
            index /= base;
            d
        })
        .collect()
}

fn encode(digits: &[u64], base: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, d| acc * base + d)
}

fn checked_count(base: u64, exp: usize, cap: u64) -> Result<u64> {
    let states = || format!("{base}^{exp}");
    let n = u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::CapExceeded { states: states(), cap })?;
    if n > cap {
        return Err(Error::CapExceeded { states: states(), cap });
    }
    Ok(n)
}

fn check_arity(fs: &[MultiPoly]) -> Result<usize> {
    let arity = fs.first().map(MultiPoly::arity).ok_or(Error::EmptySequence)?;
    if let Some(f) = fs.iter().find(|f| f.arity() != arity) {
        return Err(Error::LengthMismatch { expected: arity, actual: f.arity() });
    }
    Ok(arity)
}

/// Preimage counts of a polynomial map `(Z/p^k)^n -> (Z/p^k)^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberCensus {
    pub modulus: ModulusSpec,
    pub arity: usize,
    pub outputs: usize,
    /// `p^(k(n - m))`, zero when `m > n`.
    pub expected: u64,
    pub min: u64,
    pub max: u64,
    pub equiprobable: bool,
    /// A point whose fiber size differs from `expected`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Vec<u64>, u64)>,
    #[serde(skip)]
    pub counts: Vec<u64>,
}

pub fn equiprobable_mod(fs: &[MultiPoly], m: &Modulus<u64>, limits: &Limits) -> Result<FiberCensus> {
    let arity = check_arity(fs)?;
    let q = *m.value();
    let inputs = checked_count(q, arity, limits.fibers)?;
    let cells = checked_count(q, fs.len(), limits.fibers)?;
    let compiled: Vec<Compiled> = fs.iter().map(|f| f.compile(q)).collect();
    let counts = (0..inputs)
        .into_par_iter()
        .fold(
            || vec![0u64; cells as usize],
            |mut acc, index| {
                let point = decode(index, q, arity);
                let image: Vec<u64> = compiled.iter().map(|c| c.eval(&point)).collect();
                acc[encode(&image, q) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; cells as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected = if fs.len() > arity { 0 } else { inputs / cells };
    let min = *counts.iter().min().expect("at least one cell");
    let max = *counts.iter().max().expect("at least one cell");
    let equiprobable = fs.len() <= arity && min == expected && max == expected;
    let witness =
        counts.iter().position(|&c| c != expected).map(|cell| (decode(cell as u64, q, fs.len()), counts[cell]));
    Ok(FiberCensus { modulus: m.spec(), arity, outputs: fs.len(), expected, min, max, equiprobable, witness, counts })
}

/// Rank over `F_p` of an integer matrix given mod `p`.
fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = crate::padic::inverse_mod(&rows[rank][col], &p).expect("nonzero mod p");
        let pivot_row: Vec<u64> = rows[rank].iter().map(|v| v.mul_mod(&inv, &p)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.sub_mod(&pv.mul_mod(&factor, &p), &p);
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Equiprobable mod `p` with a Jacobian of full rank mod `p` everywhere implies
/// equiprobable mod every `p^k`. The Jacobian condition is only sufficient.
pub fn jacobian_equiprobable_certificate(fs: &[MultiPoly], p: u64, limits: &Limits) -> Result<Certificate> {
    let start = Instant::now();
    let m = Modulus::<u64>::new(p, 1)?;
    let arity = check_arity(fs)?;
    let census = equiprobable_mod(fs, &m, limits)?;
    let cert =
        |verdict, witness| Certificate::new(Property::Equiprobable, verdict, Theorem::C3_8, m.spec(), witness, start);
    if !census.equiprobable {
        let (point, count) = census.witness.expect("unequal census has a witness");
        return Ok(cert(Verdict::Refuted, Some(Witness::UnequalFibers { point, count, expected: census.expected })));
    }
    let jacobian: Vec<Vec<Compiled>> =
        fs.iter().map(|f| (0..arity).map(|j| f.partial(j).compile(p)).collect()).collect();
    let points = checked_count(p, arity, limits.fibers)?;
    let critical = (0..points).into_par_iter().find_first(|&index| {
        let point = decode(index, p, arity);
        let rows = jacobian.iter().map(|row| row.iter().map(|d| d.eval(&point)).collect()).collect();
        rank_mod_p(rows, p) < fs.len()
    });
    Ok(match critical {
        None => cert(Verdict::Proven, None),
        Some(index) => cert(Verdict::Unknown, Some(Witness::CriticalPoint { point: decode(index, p, arity) })),
    })
}

/// Measure preservation of `F: Z_p^n -> Z_p^n` decided by bijectivity mod `p^2`.
pub fn polynomial_bijectivity_certificate(fs: &[MultiPoly], p: u64, limits: &Limits) -> Result<Certificate> {
    let start = Instant::now();
    let arity = check_arity(fs)?;
    if fs.len() != arity {
        return Err(Error::LengthMismatch { expected: arity, actual: fs.len() });
    }
    let m = Modulus::<u64>::new(p, 2)?;
    let q = *m.value();
    let inputs = checked_count(q, arity, limits.fibers)?;
    let compiled: Vec<Compiled> = fs.iter().map(|f| f.compile(q)).collect();
    let mut first = vec![u64::MAX; inputs as usize];
    let mut collision = None;
    for index in 0..inputs {
        let point = decode(index, q, arity);
        let image: Vec<u64> = compiled.iter().map(|c| c.eval(&point)).collect();
        let slot = &mut first[encode(&image, q) as usize];
        if *slot != u64::MAX {
            collision = Some((decode(*slot, q, arity), point));
            break;
        }
        *slot = index;
    }
    let (verdict, witness) = match collision {
        None => (Verdict::Proven, None),
        Some((a, b)) => (Verdict::Refuted, Some(Witness::CollidingPoints { a, b })),
    };
    Ok(Certificate::new(Property::MeasurePreserving, verdict, Theorem::C3_10, m.spec(), witness, start))
}
