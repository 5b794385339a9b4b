//! Sequence diagnostics over `Z/p^k`: linear complexity with a constant term, its growth
//! in `k`, and periods of binary digit planes.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::certify::{Limits, UnaryMap};
use crate::error::{Error, Result};
use crate::padic::{inverse_mod, Modulus, ModulusSpec};
use crate::scalar::Natural;

/// Default largest relation order searched.
pub const DEFAULT_RMAX: usize = 32;

/// Least order found, or the search bound when none exists up to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Complexity {
    Found(usize),
    NoneFoundUpTo { none_found_up_to: usize },
}

impl Complexity {
    pub fn found(self) -> Option<usize> {
        match self {
            Complexity::Found(r) => Some(r),
            Complexity::NoneFoundUpTo { .. } => None,
        }
    }

    /// Orders compare with "not found up to r" above every found order `<= r`.
    fn rank(self) -> usize {
        match self {
            Complexity::Found(r) => r,
            Complexity::NoneFoundUpTo { none_found_up_to } => none_found_up_to + 1,
        }
    }
}

impl PartialOrd for Complexity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.rank().cmp(&other.rank()))
    }
}

/// Which relations count towards the complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `x_{n+r} = c + sum_{j<r} c_j x_{n+j}`.
    Affine,
    /// `x_{n+r} = sum_{j<r} c_j x_{n+j}`.
    Homogeneous,
    /// `c + sum_{j<=r} c_j x_{n+j} = 0` with some `c_j` a unit.
    Unit,
    /// `c + sum_{j<=r} c_j x_{n+j} = 0` with the relation nonzero mod `p^k`.
    Any,
}

/// Relation `constant + sum_j coefficients[j] x_{n+j} = 0 (mod p^k)` holding at every
/// cyclic index. Monic flavors store `-1` as the last coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation<T> {
    pub flavor: Flavor,
    pub constant: T,
    pub coefficients: Vec<T>,
}

impl<T: Natural> Relation<T> {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// For monic flavors, `(c, c_0, ..., c_{r-1})` with `x_{n+r} = c + sum c_j x_{n+j}`.
    pub fn monic_form(&self, m: &Modulus<T>) -> Option<(T, Vec<T>)> {
        let (last, rest) = self.coefficients.split_last()?;
        if *last != m.value().clone() - T::one() {
            return None;
        }
        Some((self.constant.clone(), rest.to_vec()))
    }

    /// Checks the relation at every cyclic index of `seq`.
    pub fn holds(&self, seq: &[T], m: &Modulus<T>) -> bool {
        let q = m.value();
        let n = seq.len();
        (0..n).all(|i| {
            let sum = self
                .coefficients
                .iter()
                .enumerate()
                .fold(self.constant.clone(), |acc, (j, c)| acc.add_mod(&c.mul_mod(&seq[(i + j) % n], q), q));
            sum.is_zero()
        })
    }
}

fn natural_json<T: Natural>(v: &T) -> Value {
    match v.to_u64() {
        Some(n) => Value::from(n),
        None => Value::from(v.to_string()),
    }
}

impl<T: Natural> Serialize for Relation<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({
            "flavor": self.flavor,
            "order": self.order(),
            "constant": natural_json(&self.constant),
            "coefficients": self.coefficients.iter().map(natural_json).collect::<Vec<_>>(),
        })
        .serialize(s)
    }
}

/// Arithmetic helpers for `Z/p^k` as a local ring.
struct Ring<T> {
    p: T,
    k: u32,
    q: T,
}

impl<T: Natural> Ring<T> {
    fn new(m: &Modulus<T>) -> Self {
        Ring { p: m.p().clone(), k: m.k(), q: m.value().clone() }
    }

    /// `ord_p`, with `k` standing for zero.
    fn val(&self, a: &T) -> u32 {
        if a.is_zero() {
            return self.k;
        }
        let mut a = a.clone();
        let mut e = 0;
        while (a.clone() % self.p.clone()).is_zero() {
            a = a / self.p.clone();
            e += 1;
        }
        e
    }

    fn power(&self, e: u32) -> T {
        (0..e).fold(T::one(), |acc, _| acc * self.p.clone())
    }

    /// Inverse of the unit part of a nonzero `a`.
    fn unit_inverse(&self, a: &T) -> T {
        let e = self.val(a);
        inverse_mod(&(a.clone() / self.power(e)), &self.q).expect("unit part is invertible")
    }

    fn axpy(&self, row: &mut [T], factor: &T, pivot: &[T]) {
        for (r, v) in row.iter_mut().zip(pivot) {
            *r = r.sub_mod(&factor.mul_mod(v, &self.q), &self.q);
        }
    }

    fn scale(&self, row: &mut [T], factor: &T) {
        for r in row.iter_mut() {
            *r = r.mul_mod(factor, &self.q);
        }
    }
}

/// Generating set of at most `width` rows for the row module of a stream of rows.
struct Echelon<'a, T> {
    ring: &'a Ring<T>,
    pivots: Vec<Option<Vec<T>>>,
}

impl<'a, T: Natural> Echelon<'a, T> {
    fn new(ring: &'a Ring<T>, width: usize) -> Self {
        Echelon { ring, pivots: vec![None; width] }
    }

    fn insert(&mut self, mut row: Vec<T>) {
        let ring = self.ring;
        for j in 0..row.len() {
            if row[j].is_zero() {
                continue;
            }
            let normalize = |row: &mut Vec<T>| {
                let inv = ring.unit_inverse(&row[j]);
                ring.scale(row, &inv);
            };
            match self.pivots[j].take() {
                None => {
                    normalize(&mut row);
                    self.pivots[j] = Some(row);
                    return;
                }
                Some(mut pivot) => {
                    if ring.val(&row[j]) < ring.val(&pivot[j]) {
                        normalize(&mut row);
                        std::mem::swap(&mut row, &mut pivot);
                    }
                    // row[j] is divisible by the pivot entry p^e as an integer.
                    let factor = row[j].clone() / pivot[j].clone();
                    ring.axpy(&mut row, &factor, &pivot);
                    self.pivots[j] = Some(pivot);
                }
            }
        }
    }

    fn rows(self) -> Vec<Vec<T>> {
        self.pivots.into_iter().flatten().collect()
    }
}

/// Diagonal form `U A V = diag(p^e_0, ..., p^e_{s-1}, 0, ...)`.
struct Smith<T> {
    exponents: Vec<u32>,
    /// Columns of `V`, indexed by diagonal position.
    v_cols: Vec<Vec<T>>,
    rhs: Vec<T>,
}

fn smith<T: Natural>(ring: &Ring<T>, mut a: Vec<Vec<T>>, mut rhs: Vec<T>, cols: usize) -> Smith<T> {
    let rows = a.len();
    let mut v_cols: Vec<Vec<T>> =
        (0..cols).map(|j| (0..cols).map(|i| if i == j { T::one() } else { T::zero() }).collect()).collect();
    let mut exponents = Vec::new();
    for t in 0..rows.min(cols) {
        let best = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| ring.val(&a[i][j]));
        let Some((i, j)) = best else { break };
        a.swap(t, i);
        rhs.swap(t, i);
        for row in a.iter_mut() {
            row.swap(t, j);
        }
        v_cols.swap(t, j);
        let inv = ring.unit_inverse(&a[t][t]);
        ring.scale(&mut a[t], &inv);
        rhs[t] = rhs[t].mul_mod(&inv, &ring.q);
        let pivot = a[t][t].clone();
        let pivot_row = a[t].clone();
        for i in t + 1..rows {
            if !a[i][t].is_zero() {
                let factor = a[i][t].clone() / pivot.clone();
                ring.axpy(&mut a[i], &factor, &pivot_row);
                rhs[i] = rhs[i].sub_mod(&factor.mul_mod(&rhs[t], &ring.q), &ring.q);
            }
        }
        for (j, entry) in a[t].iter_mut().enumerate().skip(t + 1) {
            if !entry.is_zero() {
                let factor = entry.clone() / pivot.clone();
                *entry = T::zero();
                let (head, tail) = v_cols.split_at_mut(j);
                ring.axpy(&mut tail[0], &factor, &head[t]);
            }
        }
        exponents.push(ring.val(&pivot));
    }
    Smith { exponents, v_cols, rhs }
}

fn reduced_system<T: Natural>(ring: &Ring<T>, seq: &[T], width: usize, build: impl Fn(usize) -> Vec<T>) -> Vec<Vec<T>> {
    let mut echelon = Echelon::new(ring, width);
    for i in 0..seq.len() {
        echelon.insert(build(i));
    }
    echelon.rows()
}

/// Solves the monic system of order `r`.
fn monic_relation<T: Natural>(seq: &[T], m: &Modulus<T>, r: usize, affine: bool) -> Option<Relation<T>> {
    let ring = Ring::new(m);
    let n = seq.len();
    let offset = usize::from(affine);
    let cols = r + offset;
    let rows = reduced_system(&ring, seq, cols + 1, |i| {
        let mut row = Vec::with_capacity(cols + 1);
        if affine {
            row.push(T::one());
        }
        row.extend((0..r).map(|j| seq[(i + j) % n].clone()));
        row.push(seq[(i + r) % n].clone());
        row
    });
    let (a, rhs): (Vec<Vec<T>>, Vec<T>) = rows
        .into_iter()
        .map(|mut row| {
            let b = row.pop().expect("augmented row");
            (row, b)
        })
        .unzip();
    let s = smith(&ring, a, rhs, cols);
    let mut z = vec![T::zero(); cols];
    for (i, b) in s.rhs.iter().enumerate() {
        match s.exponents.get(i) {
            Some(&e) => {
                if ring.val(b) < e {
                    return None;
                }
                z[i] = b.clone() / ring.power(e);
            }
            None if !b.is_zero() => return None,
            None => {}
        }
    }
    let mut y = vec![T::zero(); cols];
    for (zi, col) in z.iter().zip(&s.v_cols) {
        ring.axpy(&mut y, &zi.neg_mod(&ring.q), col);
    }
    let constant = if affine { y.remove(0) } else { T::zero() };
    let mut coefficients = y;
    coefficients.push(ring.q.clone() - T::one());
    let flavor = if affine { Flavor::Affine } else { Flavor::Homogeneous };
    Some(Relation { flavor, constant, coefficients })
}

/// Relation of order `r` with a unit coefficient (`unit`) or any nonzero relation.
fn kernel_relation<T: Natural>(seq: &[T], m: &Modulus<T>, r: usize, unit: bool) -> Option<Relation<T>> {
    let ring = Ring::new(m);
    let n = seq.len();
    let cols = r + 2;
    let rows = reduced_system(&ring, seq, cols, |i| {
        std::iter::once(T::one()).chain((0..=r).map(|j| seq[(i + j) % n].clone())).collect()
    });
    let s = smith(&ring, rows, vec![T::zero(); cols], cols);
    let exponent = |j: usize| s.exponents.get(j).copied().unwrap_or(ring.k);
    let generator = (0..cols).find_map(|j| {
        let e = exponent(j);
        let col = &s.v_cols[j];
        if unit {
            let has_unit = col[1..].iter().any(|v| !(v.clone() % ring.p.clone()).is_zero());
            (e == ring.k && has_unit).then(|| col.clone())
        } else {
            (e >= 1).then(|| {
                let mut g = col.clone();
                ring.scale(&mut g, &ring.power(ring.k - e));
                g
            })
        }
    })?;
    let flavor = if unit { Flavor::Unit } else { Flavor::Any };
    Some(Relation { flavor, constant: generator[0].clone(), coefficients: generator[1..].to_vec() })
}

fn check_sequence<T: Natural>(seq: &[T], m: &Modulus<T>) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if seq.iter().any(|x| x >= m.value()) {
        return Err(Error::InvalidArgument("sequence entries must be reduced mod p^k".into()));
    }
    Ok(())
}

/// A relation of exactly order `r`, if one exists.
pub fn relation_at_order<T: Natural>(
    seq: &[T],
    m: &Modulus<T>,
    flavor: Flavor,
    r: usize,
) -> Result<Option<Relation<T>>> {
    check_sequence(seq, m)?;
    let found = match flavor {
        Flavor::Affine => monic_relation(seq, m, r, true),
        Flavor::Homogeneous => monic_relation(seq, m, r, false),
        Flavor::Unit => kernel_relation(seq, m, r, true),
        Flavor::Any => kernel_relation(seq, m, r, false),
    };
    match found {
        Some(relation) if !relation.holds(seq, m) => {
            Err(Error::InvalidArgument(format!("solver produced a relation of order {r} that fails")))
        }
        found => Ok(found),
    }
}

/// Least order `r <= r_max` admitting a relation of the given flavor over one cyclic
/// period, with the relation re-verified at every index.
pub fn relation_complexity<T: Natural>(
    seq: &[T],
    m: &Modulus<T>,
    flavor: Flavor,
    r_max: usize,
) -> Result<(Complexity, Option<Relation<T>>)> {
    check_sequence(seq, m)?;
    for r in 1..=r_max {
        if let Some(relation) = relation_at_order(seq, m, flavor, r)? {
            return Ok((Complexity::Found(r), Some(relation)));
        }
    }
    Ok((Complexity::NoneFoundUpTo { none_found_up_to: r_max }, None))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceReport<T: Natural> {
    pub modulus: ModulusSpec,
    pub period: u64,
    /// Affine complexity `x_{n+r} = c + sum c_j x_{n+j}`.
    pub linear_complexity: Complexity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation<T>>,
    pub unit_complexity: Complexity,
    pub any_complexity: Complexity,
    /// Present for `p = 2` only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bit_periods: Option<Vec<u64>>,
    /// The period visits every residue exactly once.
    pub census_ok: bool,
}

/// Full diagnostics of one period of a sequence over `Z/p^k`.
pub fn affine_linear_complexity<T: Natural>(seq: &[T], m: &Modulus<T>, r_max: usize) -> Result<SequenceReport<T>> {
    let (linear_complexity, relation) = relation_complexity(seq, m, Flavor::Affine, r_max)?;
    let (unit_complexity, _) = relation_complexity(seq, m, Flavor::Unit, r_max)?;
    let (any_complexity, _) = relation_complexity(seq, m, Flavor::Any, r_max)?;
    let bit_periods = (m.p_u64() == 2).then(|| bit_plane_periods(seq, m.k()));
    let census_ok = m.value().to_u64() == Some(seq.len() as u64) && {
        let mut seen = vec![false; seq.len()];
        seq.iter().all(|x| !std::mem::replace(&mut seen[x.to_index()], true))
    };
    Ok(SequenceReport {
        modulus: m.spec(),
        period: minimal_period(seq) as u64,
        linear_complexity,
        relation,
        unit_complexity,
        any_complexity,
        bit_periods,
        census_ok,
    })
}

fn divisors(n: usize) -> Vec<usize> {
    let mut small: Vec<usize> = (1..).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let large: Vec<usize> = small.iter().rev().map(|d| n / d).filter(|&d| d * d != n).collect();
    small.extend(large);
    small
}

/// Least cyclic shift fixing the sequence.
pub fn minimal_period<S: PartialEq>(seq: &[S]) -> usize {
    let n = seq.len();
    divisors(n).into_iter().find(|&d| (0..n).all(|i| seq[i] == seq[(i + d) % n])).unwrap_or(n)
}

/// Minimal periods of the binary digit sequences `j = 0..k-1` of a cyclic sequence.
pub fn bit_plane_periods<T: Natural>(seq: &[T], k: u32) -> Vec<u64> {
    (0..k)
        .map(|j| {
            let bits: Vec<bool> = seq.iter().map(|x| x.to_biguint().bit(j as u64)).collect();
            minimal_period(&bits) as u64
        })
        .collect()
}

/// Cycle of the map through 0 mod `p^k`.
pub fn orbit_of_zero<F: UnaryMap + ?Sized, T: Natural>(f: &F, m: &Modulus<T>, limits: &Limits) -> Result<Vec<T>> {
    let cap = limits.states;
    let n = m
        .value()
        .to_u64()
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::CapExceeded { states: m.value().to_string(), cap })?;
    let kernel = f.kernel(m)?;
    let mut seq = vec![T::zero()];
    let mut x = kernel(&T::zero())?;
    while !x.is_zero() {
        if seq.len() as u64 >= n {
            return Err(Error::NotBijective { state: x.to_string(), steps: seq.len() as u64 });
        }
        seq.push(x.clone());
        x = kernel(&x)?;
    }
    Ok(seq)
}

/// `(k, unit complexity, witnessing relation)`.
pub type ProfileEntry = (u32, Complexity, Option<Relation<BigUint>>);

/// Unit-relation complexity of the orbit of 0 for each `k` in the range.
pub fn complexity_growth_profile<F: UnaryMap + ?Sized>(
    state_fn: &F,
    p: u64,
    k_range: RangeInclusive<u32>,
    r_max: usize,
    limits: &Limits,
) -> Result<Vec<ProfileEntry>> {
    k_range
        .map(|k| {
            let m = Modulus::<u64>::new(p, k)?;
            let seq = orbit_of_zero(state_fn, &m, limits)?;
            let (c, relation) = relation_complexity(&seq, &m, Flavor::Unit, r_max)?;
            let relation = relation.map(|r| Relation {
                flavor: r.flavor,
                constant: r.constant.to_biguint(),
                coefficients: r.coefficients.iter().map(Natural::to_biguint).collect(),
            });
            Ok((k, c, relation))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, k: u32) -> Modulus<u64> {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn constant_sequence_has_complexity_one() {
        let seq = vec![5u64; 8];
        let (c, rel) = relation_complexity(&seq, &m(2, 4), Flavor::Affine, 8).unwrap();
        assert_eq!(c, Complexity::Found(1));
        let (constant, coeffs) = rel.unwrap().monic_form(&m(2, 4)).unwrap();
        assert_eq!(constant.add_mod(&coeffs[0].mul_mod(&5, &16), &16), 5);
        assert_eq!(bit_plane_periods(&seq, 4), vec![1; 4]);
    }

    #[test]
    fn empty_sequence_is_rejected() {
        assert_eq!(relation_complexity::<u64>(&[], &m(2, 3), Flavor::Affine, 4).unwrap_err(), Error::EmptySequence);
    }

    #[test]
    fn divisors_are_sorted() {
        assert_eq!(divisors(36), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert_eq!(divisors(1), vec![1]);
    }

    #[test]
    fn smith_solves_nonunit_systems() {
        // 2y = 4 mod 8 has solutions y = 2, 6; 2y = 3 mod 8 has none.
        let ring = Ring::new(&m(2, 3));
        let s = smith(&ring, vec![vec![2u64]], vec![4], 1);
        assert_eq!(s.exponents, vec![1]);
        assert_eq!(s.rhs, vec![4]);
        let s = smith(&ring, vec![vec![6u64]], vec![3], 1);
        assert!(ring.val(&s.rhs[0]) < s.exponents[0]);
    }
}
