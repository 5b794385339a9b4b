//! Exhaustive checkers over `Z/p^k`.

use rayon::prelude::*;
use serde::Serialize;

use super::{Kernel, Limits, UnaryMap};
use crate::error::{Error, Result};
use crate::padic::{CompositeModulus, Modulus, ModulusSpec};
use crate::scalar::Natural;

pub(crate) fn state_count<T: Natural>(m: &Modulus<T>, cap: u64) -> Result<usize> {
    match m.value().to_u64() {
        Some(n) if n <= cap => Ok(n as usize),
        _ => Err(Error::CapExceeded { states: m.value().to_string(), cap }),
    }
}

/// All values `f(0), ..., f(p^k - 1)`, computed in parallel.
pub(crate) fn value_table<T: Natural>(kernel: &Kernel<'_, T>, n: usize) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(|x| kernel(&T::from_small(x as u64))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub modulus: ModulusSpec,
    pub compatible: bool,
    /// `(x, y, j)` with `x = y mod p^j` but `f(x) != f(y) mod p^j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(u64, u64, u32)>,
    /// First input where the function left `Z_p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub not_integer_valued_at: Option<u64>,
}

/// Decides `f(x) = f(x mod p^j) (mod p^j)` for every `x < p^k` and `j < k`, which is
/// compatibility of the induced map on `Z/p^k`.
pub fn compatible_mod<F: UnaryMap + ?Sized, T: Natural>(
    f: &F,
    m: &Modulus<T>,
    limits: &Limits,
) -> Result<CompatibilityReport> {
    let n = state_count(m, limits.states)?;
    let kernel = f.kernel(m)?;
    let mut report =
        CompatibilityReport { modulus: m.spec(), compatible: true, witness: None, not_integer_valued_at: None };
    let values = match value_table(&kernel, n) {
        Ok(v) => v,
        Err(Error::NotIntegerValued { .. }) => {
            let x = (0..n)
                .find(|&x| matches!(kernel(&T::from_small(x as u64)), Err(Error::NotIntegerValued { .. })))
                .expect("some input failed");
            report.compatible = false;
            report.not_integer_valued_at = Some(x as u64);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let p = m.p_u64() as usize;
    let mut level = 1usize;
    for j in 1..m.k() {
        level *= p;
        let bad = (level..n).into_par_iter().find_first(|&x| {
            let lhs = values[x].clone() % T::from_small(level as u64);
            let rhs = values[x % level].clone() % T::from_small(level as u64);
            lhs != rhs
        });
        if let Some(x) = bad {
            report.compatible = false;
            report.witness = Some((x as u64, (x % level) as u64, j));
            return Ok(report);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectivityReport {
    pub modulus: ModulusSpec,
    pub bijective: bool,
    /// Two inputs with the same image.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision: Option<(u64, u64)>,
}

pub fn bijective_mod<F: UnaryMap + ?Sized, T: Natural>(
    f: &F,
    m: &Modulus<T>,
    limits: &Limits,
) -> Result<BijectivityReport> {
    let n = state_count(m, limits.states)?;
    let values = value_table(&f.kernel(m)?, n)?;
    let mut first = vec![u32::MAX; n];
    for (x, v) in values.iter().enumerate() {
        let slot = &mut first[v.to_index()];
        if *slot != u32::MAX {
            return Ok(BijectivityReport {
                modulus: m.spec(),
                bijective: false,
                collision: Some((*slot as u64, x as u64)),
            });
        }
        *slot = x as u32;
    }
    Ok(BijectivityReport { modulus: m.spec(), bijective: true, collision: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub modulus: ModulusSpec,
    pub transitive: bool,
    /// Length of the cycle through 0.
    pub orbit_length: u64,
}

/// Walks the orbit of 0; transitive iff the first return happens after exactly `p^k` steps.
pub fn transitive_mod<F: UnaryMap + ?Sized, T: Natural>(f: &F, m: &Modulus<T>, limits: &Limits) -> Result<OrbitReport> {
    let n = state_count(m, limits.states)?;
    let kernel = f.kernel(m)?;
    walk_orbit(&kernel, n, m.spec())
}

pub(crate) fn walk_orbit<T: Natural>(kernel: &Kernel<'_, T>, n: usize, spec: ModulusSpec) -> Result<OrbitReport> {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut x = T::zero();
    for step in 1..=n as u64 {
        x = kernel(&x)?;
        if x.is_zero() {
            return Ok(OrbitReport { modulus: spec, transitive: step == n as u64, orbit_length: step });
        }
        let slot = &mut seen[x.to_index()];
        if *slot {
            return Err(Error::NotBijective { state: x.to_string(), steps: step });
        }
        *slot = true;
    }
    unreachable!("a walk of p^k distinct states must return to 0")
}

/// Orbit walk that reports a non-bijective map as non-transitive instead of failing.
pub fn is_transitive_mod<F: UnaryMap + ?Sized, T: Natural>(f: &F, m: &Modulus<T>, limits: &Limits) -> Result<bool> {
    match transitive_mod(f, m, limits) {
        Ok(r) => Ok(r.transitive),
        Err(Error::NotBijective { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Per-factor orbit walks; the map is transitive mod `m` iff every component is.
pub fn transitive_mod_composite<F: UnaryMap + ?Sized, T: Natural>(
    f: &F,
    m: &CompositeModulus<T>,
    limits: &Limits,
) -> Result<Vec<OrbitReport>> {
    m.factors().iter().map(|factor| transitive_mod(f, factor, limits)).collect()
}
