//! Boolean triangles: maps of `Z/2^n` whose digit `i` is `psi_i(x_0, ..., x_{i-1}) XOR x_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{digits, ResidueInt};
use crate::scalar::Natural;

/// `psi[i]` is an algebraic normal form over `x_0..x_{i-1}`: a set of monomials,
/// each a bitmask of the variables it multiplies (mask 0 is the constant 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoolTriangle {
    psi: Vec<Vec<u32>>,
}

impl BoolTriangle {
    pub fn new(psi: Vec<Vec<u32>>) -> Result<Self> {
        for (i, monomials) in psi.iter().enumerate() {
            if i > 31 {
                return Err(Error::InvalidArgument("triangles are limited to 32 digits".into()));
            }
            if let Some(bad) = monomials.iter().find(|&&m| (m as u64) >> i != 0) {
                return Err(Error::InvalidArgument(format!(
                    "psi_{i} uses variable mask {bad:#b} beyond x_{}",
                    i as i64 - 1
                )));
            }
        }
        Ok(BoolTriangle { psi })
    }

    /// Triangle from truth tables: bit `j` of `tables[i]` is `psi_i` at the input with bits `j`.
    pub fn from_truth_tables(tables: &[u64]) -> Result<Self> {
        let psi = tables.iter().enumerate().map(|(i, &table)| anf_from_table(table, i)).collect();
        Self::new(psi)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self) -> &[Vec<u32>] {
        &self.psi
    }

    /// Value of `psi_i` at the low `i` bits of `input`.
    pub fn psi_at(&self, i: usize, input: u64) -> bool {
        self.psi[i].iter().fold(false, |acc, &mask| acc ^ (input & mask as u64 == mask as u64))
    }

    /// Number of inputs in `{0,1}^i` where `psi_i` is 1.
    pub fn weight(&self, i: usize) -> u64 {
        (0..1u64 << i).filter(|&input| self.psi_at(i, input)).count() as u64
    }

    /// The single-cycle condition: `psi_0 = 1` and every `psi_i` has odd weight.
    pub fn has_odd_weights(&self, n: usize) -> bool {
        (0..n).all(|i| self.weight(i) % 2 == 1)
    }

    pub fn eval_u64(&self, x: u64, n: usize) -> u64 {
        let mut out = 0;
        for i in 0..n {
            let low = x & ((1u64 << i) - 1);
            let bit = ((x >> i) & 1 == 1) ^ self.psi_at(i, low);
            out |= (bit as u64) << i;
        }
        out
    }
}

/// Moebius transform of a truth table over `vars` variables.
fn anf_from_table(table: u64, vars: usize) -> Vec<u32> {
    let size = 1usize << vars;
    let mut coeffs: Vec<bool> = (0..size).map(|j| (table >> j) & 1 == 1).collect();
    for v in 0..vars {
        for j in 0..size {
            if j & (1 << v) != 0 {
                coeffs[j] ^= coeffs[j ^ (1 << v)];
            }
        }
    }
    (0..size).filter(|&j| coeffs[j]).map(|j| j as u32).collect()
}

pub fn triangle_eval<T: Natural>(t: &BoolTriangle, x: &ResidueInt<T>) -> Result<ResidueInt<T>> {
    let m = x.modulus();
    if m.p_u64() != 2 {
        return Err(Error::WrongPrime { expected: "2".into(), actual: m.p().to_string() });
    }
    let n = m.k() as usize;
    if t.len() < n {
        return Err(Error::LengthMismatch { expected: n, actual: t.len() });
    }
    let bits: Vec<bool> = digits(x).iter().map(|d| d.is_one()).collect();
    let mut out = T::zero();
    let two = T::from_small(2);
    let mut place = T::one();
    for i in 0..n {
        let low = bits[..i].iter().enumerate().fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j));
        if bits[i] ^ t.psi_at(i, low) {
            out = out + place.clone();
        }
        place = place * two.clone();
    }
    Ok(m.residue(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Modulus;

    fn orbit_len(t: &BoolTriangle, n: usize) -> u64 {
        let mut x = t.eval_u64(0, n);
        let mut steps = 1;
        while x != 0 && steps <= 1 << n {
            x = t.eval_u64(x, n);
            steps += 1;
        }
        steps
    }

    #[test]
    fn constant_one_flips_digit_zero() {
        let t = BoolTriangle::new(vec![vec![0], vec![], vec![]]).unwrap();
        let m = Modulus::new(2u64, 3).unwrap();
        let mut images: Vec<u64> = (0..8).map(|x| triangle_eval(&t, &m.residue(x)).unwrap().into_inner()).collect();
        assert_eq!(images[..2], [1, 0]);
        images.sort();
        assert_eq!(images, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn odd_weight_second_digit_is_a_four_cycle() {
        let t = BoolTriangle::new(vec![vec![0], vec![1]]).unwrap();
        assert_eq!(orbit_len(&t, 2), 4);
        let even = BoolTriangle::new(vec![vec![0], vec![]]).unwrap();
        assert_eq!(orbit_len(&even, 2), 2);
    }

    #[test]
    fn truth_tables_round_trip_through_anf() {
        for vars in 0..4usize {
            for table in 0..(1u64 << (1 << vars)) {
                let mut tables = vec![0u64; vars + 1];
                tables[vars] = table;
                let t = BoolTriangle::from_truth_tables(&tables).unwrap();
                for input in 0..(1u64 << vars) {
                    assert_eq!(t.psi_at(vars, input), (table >> input) & 1 == 1);
                }
                assert_eq!(t.weight(vars), table.count_ones() as u64);
            }
        }
    }

    #[test]
    fn eval_checks_prime_and_length() {
        let t = BoolTriangle::new(vec![vec![0]]).unwrap();
        assert!(matches!(
            triangle_eval(&t, &Modulus::new(2u64, 3).unwrap().residue(1)),
            Err(Error::LengthMismatch { expected: 3, actual: 1 })
        ));
        assert!(matches!(triangle_eval(&t, &Modulus::new(3u64, 1).unwrap().residue(1)), Err(Error::WrongPrime { .. })));
        assert!(BoolTriangle::new(vec![vec![1]]).is_err());
    }
}
