//! Seeded generators `x_{n+1} = f(x_n) mod m` with an optional output function.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::certify::{
    bijective_mod, compatible_mod, ergodicity_certificate, infer_class, structurally_compatible, Certificate,
    CertifyOptions, Limits, Verdict,
};
use crate::error::{Error, Result};
use crate::expr::{CompiledExpr, FnExpr};
use crate::padic::{crt_combine, CompositeModulus, Modulus, ModulusSpec};
use crate::scalar::Natural;

/// Output function together with the output exponent `t_i <= k_i` for each prime factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFn {
    pub expr: FnExpr,
    pub exponents: Vec<u32>,
}

/// JSON spec file: AST of the state function, optional output function, modulus as
/// its prime-power factors, and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub state_fn: FnExpr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_fn: Option<OutputFn>,
    pub modulus: Vec<ModulusSpec>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct Component<T> {
    state: CompiledExpr<T>,
    output: Option<(CompiledExpr<T>, Modulus<T>)>,
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec<T> {
    state_fn: FnExpr,
    out_fn: Option<OutputFn>,
    modulus: CompositeModulus<T>,
    seed: T,
    certificates: Vec<Certificate>,
    components: Vec<Component<T>>,
}

impl<T: Natural> GeneratorSpec<T> {
    /// Builds a generator whose state function carries a PROVEN ergodicity certificate
    /// for every prime factor, and whose output function is certified to be compatible
    /// and bijective mod `p^t`.
    pub fn certified(
        state_fn: FnExpr,
        out_fn: Option<OutputFn>,
        modulus: CompositeModulus<T>,
        seed: T,
        opts: &CertifyOptions,
    ) -> Result<Self> {
        let mut certificates = Vec::new();
        for factor in modulus.factors() {
            let p = factor.p_u64();
            let cls = infer_class(&state_fn, p)?;
            let cert = ergodicity_certificate(&state_fn, &cls, p, opts)?;
            if cert.verdict != Verdict::Proven {
                return Err(Error::Uncertified {
                    reason: format!("ergodicity at p = {p} is {:?} ({:?})", cert.verdict, cert.theorem),
                    refuted: cert.verdict == Verdict::Refuted,
                });
            }
            certificates.push(cert);
        }
        if let Some(out) = &out_fn {
            check_exponents(out, &modulus)?;
            for (factor, &t) in modulus.factors().iter().zip(&out.exponents) {
                certify_output(&out.expr, factor, t, &opts.limits)?;
            }
        }
        let mut spec = Self::unchecked(state_fn, out_fn, modulus, seed)?;
        spec.certificates = certificates;
        Ok(spec)
    }

    /// Builds a generator without certification; period guarantees do not apply.
    pub fn unchecked(
        state_fn: FnExpr,
        out_fn: Option<OutputFn>,
        modulus: CompositeModulus<T>,
        seed: T,
    ) -> Result<Self> {
        if seed >= *modulus.value() {
            return Err(Error::InvalidArgument(format!("seed {seed} is not below the modulus {}", modulus.value())));
        }
        if let Some(out) = &out_fn {
            check_exponents(out, &modulus)?;
        }
        let components = modulus
            .factors()
            .iter()
            .enumerate()
            .map(|(i, factor)| {
                let output = match &out_fn {
                    Some(out) => Some((out.expr.compile(factor)?, factor.with_exponent(out.exponents[i])?)),
                    None => None,
                };
                Ok(Component { state: state_fn.compile(factor)?, output })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorSpec { state_fn, out_fn, modulus, seed, certificates: Vec::new(), components })
    }

    pub fn from_file(file: SpecFile, unchecked: bool, opts: &CertifyOptions) -> Result<Self> {
        let factors = file.modulus.iter().map(|&s| Modulus::from_spec(s)).collect::<Result<Vec<_>>>()?;
        let modulus = CompositeModulus::new(factors)?;
        let seed = T::from_small(file.seed);
        if unchecked {
            Self::unchecked(file.state_fn, file.out_fn, modulus, seed)
        } else {
            Self::certified(file.state_fn, file.out_fn, modulus, seed, opts)
        }
    }

    pub fn to_file(&self) -> Result<SpecFile> {
        let seed = self
            .seed
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("seed does not fit the spec file format".into()))?;
        Ok(SpecFile {
            state_fn: self.state_fn.clone(),
            out_fn: self.out_fn.clone(),
            modulus: self.modulus.factors().iter().map(Modulus::spec).collect(),
            seed,
        })
    }

    pub fn state_fn(&self) -> &FnExpr {
        &self.state_fn
    }

    pub fn out_fn(&self) -> Option<&OutputFn> {
        self.out_fn.as_ref()
    }

    pub fn modulus(&self) -> &CompositeModulus<T> {
        &self.modulus
    }

    pub fn seed(&self) -> &T {
        &self.seed
    }

    /// Per-factor ergodicity certificates; empty for unchecked specs.
    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    /// Moduli `p_i^(t_i)` of the output components.
    pub fn output_moduli(&self) -> Vec<Modulus<T>> {
        self.modulus
            .factors()
            .iter()
            .zip(&self.components)
            .map(|(f, c)| c.output.as_ref().map_or_else(|| f.clone(), |(_, m)| m.clone()))
            .collect()
    }

    /// Product of the output moduli.
    pub fn output_modulus(&self) -> T {
        self.output_moduli().iter().fold(T::one(), |acc, m| acc * m.value().clone())
    }

    pub fn generator(&self) -> Generator<'_, T> {
        Generator { spec: self, components: self.modulus.split(&self.seed), steps_taken: 0 }
    }
}

fn check_exponents<T: Natural>(out: &OutputFn, modulus: &CompositeModulus<T>) -> Result<()> {
    let factors = modulus.factors();
    if out.exponents.len() != factors.len() {
        return Err(Error::LengthMismatch { expected: factors.len(), actual: out.exponents.len() });
    }
    match factors.iter().zip(&out.exponents).find(|(f, &t)| t == 0 || t > f.k()) {
        Some((f, t)) => Err(Error::InvalidArgument(format!("output exponent {t} does not divide {f}"))),
        None => Ok(()),
    }
}

/// A compatible output function bijective mod `p^t` is equiprobable `Z/p^k -> Z/p^t`.
fn certify_output<T: Natural>(expr: &FnExpr, factor: &Modulus<T>, t: u32, limits: &Limits) -> Result<()> {
    let p = factor.p_u64();
    let uncertified =
        |what: &str| Error::Uncertified { reason: format!("output function is not {what} at p = {p}"), refuted: true };
    let m = Modulus::<u64>::from_spec(factor.spec())?;
    let compatible = structurally_compatible(expr, p) || compatible_mod(expr, &m, limits)?.compatible;
    if !compatible {
        return Err(uncertified("compatible"));
    }
    if !bijective_mod(expr, &m.with_exponent(t)?, limits)?.bijective {
        return Err(uncertified("bijective mod p^t"));
    }
    Ok(())
}

/// Snapshot of a running generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorState<T> {
    pub current: T,
    pub steps_taken: u64,
}

/// Iteration state; the per-prime components advance in lockstep.
#[derive(Debug, Clone)]
pub struct Generator<'a, T> {
    spec: &'a GeneratorSpec<T>,
    components: Vec<T>,
    steps_taken: u64,
}

impl<T: Natural> Generator<'_, T> {
    pub fn state(&self) -> GeneratorState<T> {
        GeneratorState { current: self.spec.modulus.combine(&self.components), steps_taken: self.steps_taken }
    }

    /// Advances the state and returns the output of the new state.
    pub fn next_value(&mut self) -> Result<T> {
        for (x, c) in self.components.iter_mut().zip(&self.spec.components) {
            *x = c.state.eval(x)?;
        }
        self.steps_taken += 1;
        self.output()
    }

    fn output(&self) -> Result<T> {
        if self.spec.out_fn.is_none() {
            return Ok(self.spec.modulus.combine(&self.components));
        }
        let mut moduli = Vec::with_capacity(self.components.len());
        let mut parts = Vec::with_capacity(self.components.len());
        for (x, c) in self.components.iter().zip(&self.spec.components) {
            let (out, m) = c.output.as_ref().expect("output compiled with out_fn");
            parts.push(m.reduce(&out.eval(x)?));
            moduli.push(m.clone());
        }
        Ok(crt_combine(&moduli, &parts))
    }

    /// Writes `count` output words as `floor(w / 8)` little-endian bytes each, where
    /// `2^w` is the output modulus.
    pub fn write_bytes<W: Write>(&mut self, count: u64, sink: &mut W) -> Result<()> {
        let width = byte_width(self.spec)?;
        let mut buf = Vec::with_capacity(width);
        for _ in 0..count {
            let word = self.next_value()?.to_biguint();
            buf.clear();
            buf.extend(word.to_bytes_le());
            buf.resize(width, 0);
            sink.write_all(&buf).map_err(|e| Error::InvalidArgument(format!("write failed: {e}")))?;
        }
        Ok(())
    }
}

impl<T: Natural> Iterator for Generator<'_, T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_value())
    }
}

fn byte_width<T: Natural>(spec: &GeneratorSpec<T>) -> Result<usize> {
    let factors = spec.modulus.factors();
    if factors.len() != 1 || factors[0].p_u64() != 2 || factors[0].k() < 8 {
        return Err(Error::NotBinaryModulus);
    }
    let width = spec.out_fn.as_ref().map_or(factors[0].k(), |o| o.exponents[0]);
    if width < 8 {
        return Err(Error::NotBinaryModulus);
    }
    Ok(width as usize / 8)
}

/// `count` output words from the seed as little-endian bytes.
pub fn emit_bytes<T: Natural>(spec: &GeneratorSpec<T>, count: u64) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(count as usize * byte_width(spec)?);
    spec.generator().write_bytes(count, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub modulus: String,
    pub output_modulus: String,
    pub steps: u64,
    /// Length of the cycle the state sequence enters.
    pub period: u64,
    /// Every output value occurs equally often over the `steps` outputs.
    pub uniform: bool,
    pub min_count: u64,
    pub max_count: u64,
    #[serde(skip)]
    pub counts: Vec<u64>,
}

/// Runs exactly `m` steps from the seed, recording the state cycle length and how often
/// each output value occurs.
pub fn full_period_census<T: Natural>(spec: &GeneratorSpec<T>, limits: &Limits) -> Result<CensusReport> {
    let m = spec.modulus.value();
    let cap_error = || Error::CapExceeded { states: m.to_string(), cap: limits.states };
    let steps = m.to_u64().filter(|&n| n <= limits.states).ok_or_else(cap_error)?;
    let out_modulus = spec.output_modulus();
    let mut counts = vec![0u64; out_modulus.to_index()];
    let mut first_seen = vec![u64::MAX; steps as usize];
    let mut generator = spec.generator();
    first_seen[spec.seed.to_index()] = 0;
    let mut period = None;
    for step in 1..=steps {
        counts[generator.next_value()?.to_index()] += 1;
        let slot = &mut first_seen[generator.state().current.to_index()];
        if *slot == u64::MAX {
            *slot = step;
        } else if period.is_none() {
            period = Some(step - *slot);
        }
    }
    let period = period.expect("m + 1 states among m residues repeat");
    let min_count = *counts.iter().min().expect("nonempty output range");
    let max_count = *counts.iter().max().expect("nonempty output range");
    Ok(CensusReport {
        modulus: m.to_string(),
        output_modulus: out_modulus.to_string(),
        steps,
        period,
        uniform: min_count == max_count,
        min_count,
        max_count,
        counts,
    })
}
