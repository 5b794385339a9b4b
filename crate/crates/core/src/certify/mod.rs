//! Brute-force checkers over `Z/p^k` and certificates that lift finite checks to
//! statements about all of `Z_p`.

mod brute;
mod classes;
mod multi;

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use brute::{
    bijective_mod, compatible_mod, is_transitive_mod, transitive_mod, transitive_mod_composite, BijectivityReport,
    CompatibilityReport, OrbitReport,
};
pub use classes::{
    class_b_membership, derivative_mod_p, infer_class, structurally_compatible, ClassTag, FunctionClass,
};
pub use multi::{
    equiprobable_mod, jacobian_equiprobable_certificate, polynomial_bijectivity_certificate, FiberCensus, MultiPoly,
};

use crate::error::{Error, Result};
use crate::expr::{triangle_eval, BoolTriangle, FnExpr};
use crate::mahler::{
    is_compatible, is_ergodic_2adic, is_ergodic_sufficient_oddp, is_measure_preserving_2adic, MahlerSeries,
    RationalPoly, DEGREE_CAP,
};
use crate::padic::{floor_log, rational_valuation, Modulus, ModulusSpec};
use crate::scalar::Natural;

/// Environment variable overriding the default orbit-walk state cap.
pub const CAP_ENV: &str = "PADIC_FORGE_CAP";

/// Brute-force budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `p^k` walked or tabulated.
    pub states: u64,
    /// Largest number of inputs in a fiber census.
    pub fibers: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { states: 1 << 24, fibers: 1 << 20 }
    }
}

impl Limits {
    /// Defaults with the state cap taken from `PADIC_FORGE_CAP` when it parses.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            limits.states = cap;
        }
        limits
    }
}

/// A function prepared for evaluation on reduced residues mod one modulus.
pub type Kernel<'a, T> = Box<dyn Fn(&T) -> Result<T> + Send + Sync + 'a>;

/// Anything the checkers can evaluate as a map `Z/p^k -> Z/p^k`.
pub trait UnaryMap: Sync {
    fn kernel<T: Natural>(&self, m: &Modulus<T>) -> Result<Kernel<'_, T>>;

    /// Exact polynomial form, when one is known.
    fn to_poly(&self) -> Option<RationalPoly> {
        None
    }

    fn as_expr(&self) -> Option<&FnExpr> {
        None
    }

    /// Finite interpolation series at `p`, when one is known.
    fn series(&self, p: u64) -> Option<MahlerSeries> {
        self.to_poly().filter(|q| q.degree() <= DEGREE_CAP).map(|q| q.to_mahler(p))
    }
}

impl UnaryMap for FnExpr {
    fn kernel<T: Natural>(&self, m: &Modulus<T>) -> Result<Kernel<'_, T>> {
        let compiled = self.compile(m)?;
        Ok(Box::new(move |x| compiled.eval(x)))
    }

    fn to_poly(&self) -> Option<RationalPoly> {
        FnExpr::to_poly(self)
    }

    fn as_expr(&self) -> Option<&FnExpr> {
        Some(self)
    }
}

impl UnaryMap for RationalPoly {
    fn kernel<T: Natural>(&self, m: &Modulus<T>) -> Result<Kernel<'_, T>> {
        let kernel = self.compile(m)?;
        Ok(Box::new(move |x| kernel.eval(x)))
    }

    fn to_poly(&self) -> Option<RationalPoly> {
        Some(self.clone())
    }
}

impl UnaryMap for MahlerSeries {
    fn kernel<T: Natural>(&self, m: &Modulus<T>) -> Result<Kernel<'_, T>> {
        let kernel = self.compile(m)?;
        Ok(Box::new(move |x| kernel.eval(x)))
    }

    fn to_poly(&self) -> Option<RationalPoly> {
        Some(MahlerSeries::to_poly(self))
    }

    fn series(&self, p: u64) -> Option<MahlerSeries> {
        (p == self.p()).then(|| self.clone())
    }
}

impl UnaryMap for BoolTriangle {
    fn kernel<T: Natural>(&self, m: &Modulus<T>) -> Result<Kernel<'_, T>> {
        if m.p_u64() != 2 {
            return Err(Error::WrongPrime { expected: "2".into(), actual: m.p().to_string() });
        }
        if self.len() < m.k() as usize {
            return Err(Error::LengthMismatch { expected: m.k() as usize, actual: self.len() });
        }
        let m = m.clone();
        Ok(Box::new(move |x| triangle_eval(self, &m.residue(x.clone())).map(|r| r.into_inner())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Property {
    Compatible,
    MeasurePreserving,
    Ergodic,
    Equiprobable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Proven,
    Refuted,
    Unknown,
}

/// Result that justifies a verdict.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Compatibility criterion on interpolation coefficients.
    T2_1,
    /// Measure-preservation normal form at `p = 2`.
    T2_2,
    /// Ergodicity normal form at `p = 2`.
    T2_3,
    /// Sufficient ergodicity conditions at odd `p`.
    T2_4,
    /// `c + x + p Delta v` and `d + c x + p v` constructions.
    L2_5,
    /// Digitwise-complement constructions at `p = 2`.
    P2_8,
    /// Equiprobable mod `p` with a nowhere-degenerate differential.
    C3_8,
    /// Polynomial maps: measure-preserving iff bijective mod `p^2`.
    C3_10,
    /// No finite check decides ergodicity of an arbitrary compatible function.
    T3_14_NOTE,
    /// Class A at odd `p`: threshold `lambda + 1` (`lambda + 2` at `p = 3`).
    T4_1,
    /// Integer-valued polynomials: transitivity mod `p^(floor(log_p d) + 3)`.
    P4_7,
    /// Integer-valued polynomials: bijectivity mod `p^(floor(log_p d) + 3)`.
    P4_8,
    /// Class B: transitivity mod `p^2` (`p^3` for `p` in {2, 3}), bijectivity mod `p^2`.
    T4_9,
    /// `1 + x + p^2 g` with `g` in class B.
    P4_12,
    BRUTE_ONLY,
}

/// Concrete data behind a refutation or an inconclusive check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    CollidingPair {
        x: u64,
        y: u64,
    },
    CollidingPoints {
        a: Vec<u64>,
        b: Vec<u64>,
    },
    ShortCycle {
        orbit_length: u64,
        modulus: ModulusSpec,
    },
    /// The orbit of 0 revisited a nonzero state, so the map is not injective.
    OrbitReentry {
        state: String,
        steps: u64,
        modulus: ModulusSpec,
    },
    UnequalFibers {
        point: Vec<u64>,
        count: u64,
        expected: u64,
    },
    CompatibilityBreak {
        x: u64,
        y: u64,
        level: u32,
    },
    NotIntegerValued {
        x: u64,
    },
    CriticalPoint {
        point: Vec<u64>,
    },
    /// Index of the first interpolation coefficient violating the criterion.
    Coefficient {
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: Property,
    pub verdict: Verdict,
    pub theorem: Theorem,
    /// Largest modulus at which a finite check was actually run.
    #[serde(rename = "modulus")]
    pub checked_modulus: ModulusSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub elapsed_ms: u64,
}

impl Certificate {
    pub(crate) fn new(
        property: Property,
        verdict: Verdict,
        theorem: Theorem,
        checked_modulus: ModulusSpec,
        witness: Option<Witness>,
        start: Instant,
    ) -> Self {
        let elapsed_ms = start.elapsed().as_millis() as u64;
        Certificate { property, verdict, theorem, checked_modulus, witness, elapsed_ms }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CertifyOptions {
    pub limits: Limits,
    /// Exponent for brute-force-only verdicts; defaults to the largest `k` with
    /// `p^k <= min(states, 2^20)`.
    pub brute_k: Option<u32>,
}

impl CertifyOptions {
    fn brute_k(&self, p: u64) -> u32 {
        self.brute_k.unwrap_or_else(|| floor_log(self.limits.states.min(1 << 20), p).max(1))
    }
}

fn brute_modulus(p: u64, k: u32, limits: &Limits) -> Result<Modulus<u64>> {
    let cap = || Error::CapExceeded { states: format!("{p}^{k}"), cap: limits.states };
    match p.checked_pow(k) {
        Some(n) if n <= limits.states => Modulus::new(p, k),
        _ => {
            if !crate::padic::is_prime(&p) {
                return Err(Error::NotPrime { p: p.to_string() });
            }
            Err(cap())
        }
    }
}

/// `Ok(None)` when transitive, otherwise the witness.
fn transitivity_witness<F: UnaryMap + ?Sized>(f: &F, m: &Modulus<u64>, limits: &Limits) -> Result<Option<Witness>> {
    match transitive_mod(f, m, limits) {
        Ok(r) if r.transitive => Ok(None),
        Ok(r) => Ok(Some(Witness::ShortCycle { orbit_length: r.orbit_length, modulus: m.spec() })),
        Err(Error::NotBijective { state, steps }) => {
            Ok(Some(Witness::OrbitReentry { state, steps, modulus: m.spec() }))
        }
        Err(e) => Err(e),
    }
}

fn bijectivity_witness<F: UnaryMap + ?Sized>(f: &F, m: &Modulus<u64>, limits: &Limits) -> Result<Option<Witness>> {
    let r = bijective_mod(f, m, limits)?;
    Ok(r.collision.map(|(x, y)| Witness::CollidingPair { x, y }))
}

fn compatibility_witness<F: UnaryMap + ?Sized>(f: &F, m: &Modulus<u64>, limits: &Limits) -> Result<Option<Witness>> {
    let r = compatible_mod(f, m, limits)?;
    Ok(match (r.witness, r.not_integer_valued_at) {
        (_, Some(x)) => Some(Witness::NotIntegerValued { x }),
        (Some((x, y, level)), None) => Some(Witness::CompatibilityBreak { x, y, level }),
        (None, None) => None,
    })
}

fn prop_4_7_exponent(degree: usize, p: u64) -> u32 {
    floor_log(degree.max(1) as u64, p) + 3
}

fn class_degree<F: UnaryMap + ?Sized>(f: &F, cls: &FunctionClass) -> Result<usize> {
    cls.degree
        .or_else(|| f.to_poly().map(|q| q.degree()))
        .ok_or_else(|| Error::InvalidArgument("polynomial class without a degree".into()))
}

#[derive(Clone, Copy)]
enum Goal {
    Ergodic,
    MeasurePreserving,
}

impl Goal {
    fn property(self) -> Property {
        match self {
            Goal::Ergodic => Property::Ergodic,
            Goal::MeasurePreserving => Property::MeasurePreserving,
        }
    }

    fn witness<F: UnaryMap + ?Sized>(self, f: &F, m: &Modulus<u64>, limits: &Limits) -> Result<Option<Witness>> {
        match self {
            Goal::Ergodic => transitivity_witness(f, m, limits),
            Goal::MeasurePreserving => bijectivity_witness(f, m, limits),
        }
    }
}

/// Exact threshold check: the property holds iff the finite check passes at `p^k`.
#[allow(clippy::too_many_arguments)]
fn threshold<F: UnaryMap + ?Sized>(
    f: &F,
    goal: Goal,
    p: u64,
    k: u32,
    theorem: Theorem,
    check_compatibility: bool,
    opts: &CertifyOptions,
    start: Instant,
) -> Result<Certificate> {
    let m = brute_modulus(p, k, &opts.limits)?;
    let mut witness = None;
    if check_compatibility {
        witness = compatibility_witness(f, &m, &opts.limits)?;
    }
    if witness.is_none() {
        witness = goal.witness(f, &m, &opts.limits)?;
    }
    let verdict = if witness.is_none() { Verdict::Proven } else { Verdict::Refuted };
    Ok(Certificate::new(goal.property(), verdict, theorem, m.spec(), witness, start))
}

/// Searches `p^1, ..., p^k` for the smallest modulus where the finite check fails.
fn first_failure<F: UnaryMap + ?Sized>(f: &F, goal: Goal, p: u64, k: u32, limits: &Limits) -> Result<Option<Witness>> {
    for j in 1..=k {
        let Ok(m) = brute_modulus(p, j, limits) else { break };
        if let Some(w) = compatibility_witness(f, &m, limits)?.or(goal.witness(f, &m, limits)?) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Verdict for a series from the interpolation-coefficient criteria, with the finite
/// check at `p^(floor(log_p d) + 3)` recorded as confirmation.
fn series_certificate(series: &MahlerSeries, goal: Goal, opts: &CertifyOptions, start: Instant) -> Result<Certificate> {
    let p = series.p();
    if !series.is_integer_valued() {
        return Err(Error::NotIntegerValued { p: p.to_string() });
    }
    let k = prop_4_7_exponent(series.degree(), p).min(floor_log(opts.limits.states, p).max(1));
    let m = brute_modulus(p, k, &opts.limits)?;
    let (holds, theorem) = match (goal, p) {
        (Goal::Ergodic, 2) => (Some(is_ergodic_2adic(series)?), Theorem::T2_3),
        (Goal::MeasurePreserving, 2) => (Some(is_measure_preserving_2adic(series)?), Theorem::T2_2),
        // Sufficient only: a failure proves nothing.
        (Goal::Ergodic, _) => (is_ergodic_sufficient_oddp(series)?.then_some(true), Theorem::T2_4),
        (Goal::MeasurePreserving, _) => (None, Theorem::BRUTE_ONLY),
    };
    let cert =
        |verdict, theorem, witness| Certificate::new(goal.property(), verdict, theorem, m.spec(), witness, start);
    match holds {
        Some(true) => match goal.witness(series, &m, &opts.limits)? {
            None => Ok(cert(Verdict::Proven, theorem, None)),
            // A disagreement would be a defect; the finite check is ground truth.
            Some(w) => Ok(cert(Verdict::Refuted, Theorem::BRUTE_ONLY, Some(w))),
        },
        Some(false) => {
            let witness = first_failure(series, goal, p, k, &opts.limits)?
                .unwrap_or(Witness::Coefficient { index: first_bad_coefficient(series, goal) });
            Ok(cert(Verdict::Refuted, theorem, Some(witness)))
        }
        None => match first_failure(series, goal, p, k, &opts.limits)? {
            Some(w) => Ok(cert(Verdict::Refuted, Theorem::BRUTE_ONLY, Some(w))),
            None => Ok(cert(Verdict::Unknown, theorem, None)),
        },
    }
}

fn first_bad_coefficient(series: &MahlerSeries, goal: Goal) -> usize {
    (0..=series.degree())
        .find(|&i| {
            let truncated = MahlerSeries::new(series.p(), series.coeffs()[..=i].to_vec());
            match goal {
                Goal::Ergodic => !is_ergodic_2adic(&truncated).unwrap_or(true),
                Goal::MeasurePreserving => !is_measure_preserving_2adic(&truncated).unwrap_or(true),
            }
        })
        .unwrap_or(0)
}

/// Sum decomposition `constant + slope * x + sum q_i w_i` with constant `q_i`.
struct AffineSplit<'a> {
    constant: BigRational,
    slope: BigRational,
    scaled: Vec<(BigRational, &'a FnExpr)>,
}

fn split_affine(e: &FnExpr) -> Option<AffineSplit<'_>> {
    fn terms<'a>(e: &'a FnExpr, negate: bool, out: &mut Vec<(bool, &'a FnExpr)>) {
        match e {
            FnExpr::Add(a, b) => {
                terms(a, negate, out);
                terms(b, negate, out);
            }
            FnExpr::Sub(a, b) => {
                terms(a, negate, out);
                terms(b, !negate, out);
            }
            _ => out.push((negate, e)),
        }
    }
    let mut parts = Vec::new();
    terms(e, false, &mut parts);
    let mut split = AffineSplit { constant: BigRational::zero(), slope: BigRational::zero(), scaled: Vec::new() };
    for (negate, term) in parts {
        let sign = if negate { -BigRational::one() } else { BigRational::one() };
        if let Some(poly) = term.to_poly().filter(|q| q.degree() <= 1) {
            let c = poly.coeffs();
            split.constant += c.first().cloned().unwrap_or_default() * &sign;
            split.slope += c.get(1).cloned().unwrap_or_default() * &sign;
            continue;
        }
        let (q, w) = match term {
            FnExpr::Mul(a, b) => match (a.as_const(), b.as_const()) {
                (Some(q), _) => (q.clone(), b.as_ref()),
                (_, Some(q)) => (q.clone(), a.as_ref()),
                _ => return None,
            },
            _ => return None,
        };
        split.scaled.push((q * sign, w));
    }
    Some(split)
}

fn valuation(q: &BigRational, p: u64) -> Option<i64> {
    rational_valuation(q, &BigUint::from(p))
}

/// Recognises the constructions `c + x + p Delta v` (ergodic) and `d + c x + p v`
/// (measure-preserving) with `c` a unit and `v` structurally compatible.
fn structural_theorem(e: &FnExpr, goal: Goal, p: u64) -> Option<Theorem> {
    let split = split_affine(e)?;
    let unit = |q: &BigRational| valuation(q, p) == Some(0);
    let divisible = |q: &BigRational| valuation(q, p).is_none_or(|v| v >= 1);
    let integral = |q: &BigRational| valuation(q, p).is_none_or(|v| v >= 0);
    let holds = match goal {
        Goal::Ergodic => {
            split.slope.is_one()
                && unit(&split.constant)
                && split
                    .scaled
                    .iter()
                    .all(|(q, w)| divisible(q) && matches!(w, FnExpr::Delta(v) if structurally_compatible(v, p)))
        }
        Goal::MeasurePreserving => {
            unit(&split.slope)
                && integral(&split.constant)
                && split.scaled.iter().all(|(q, w)| divisible(q) && structurally_compatible(w, p))
        }
    };
    holds.then_some(Theorem::L2_5)
}

fn generic_certificate<F: UnaryMap + ?Sized>(
    f: &F,
    goal: Goal,
    p: u64,
    opts: &CertifyOptions,
    start: Instant,
) -> Result<Certificate> {
    let m = brute_modulus(p, opts.brute_k(p), &opts.limits)?;
    let witness = match compatibility_witness(f, &m, &opts.limits)? {
        Some(w) => Some(w),
        None => goal.witness(f, &m, &opts.limits)?,
    };
    let structural = f.as_expr().and_then(|e| structural_theorem(e, goal, p));
    let (verdict, theorem) = match (&witness, structural) {
        (Some(_), _) => (Verdict::Refuted, Theorem::BRUTE_ONLY),
        (None, Some(t)) => (Verdict::Proven, t),
        (None, None) => match goal {
            Goal::Ergodic => (Verdict::Unknown, Theorem::T3_14_NOTE),
            Goal::MeasurePreserving => (Verdict::Unknown, Theorem::BRUTE_ONLY),
        },
    };
    Ok(Certificate::new(goal.property(), verdict, theorem, m.spec(), witness, start))
}

fn certificate<F: UnaryMap + ?Sized>(
    f: &F,
    cls: &FunctionClass,
    p: u64,
    goal: Goal,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    let start = Instant::now();
    let lambda = || cls.lambda.ok_or_else(|| Error::NotClassA { p: p.to_string() });
    match (cls.tag, goal) {
        (ClassTag::ClassB, Goal::Ergodic) | (ClassTag::ZPoly, Goal::Ergodic) => {
            let k = if p <= 3 { 3 } else { 2 };
            threshold(f, goal, p, k, Theorem::T4_9, false, opts, start)
        }
        (ClassTag::ClassB, Goal::MeasurePreserving) => threshold(f, goal, p, 2, Theorem::T4_9, false, opts, start),
        (ClassTag::ZPoly, Goal::MeasurePreserving) => threshold(f, goal, p, 2, Theorem::C3_10, false, opts, start),
        (ClassTag::ClassA, _) if p == 2 => {
            let series = f.series(2).ok_or_else(|| Error::NotClassA { p: "2".into() })?;
            series_certificate(&series, goal, opts, start)
        }
        (ClassTag::ClassA, Goal::Ergodic) => {
            let k = if p == 3 { lambda()? + 2 } else { lambda()? + 1 };
            threshold(f, goal, p, k, Theorem::T4_1, false, opts, start)
        }
        (ClassTag::ClassA, Goal::MeasurePreserving) => {
            threshold(f, goal, p, lambda()? + 2, Theorem::T4_1, false, opts, start)
        }
        (ClassTag::QpPolyIntval, _) => {
            let k = prop_4_7_exponent(class_degree(f, cls)?, p);
            let theorem = match goal {
                Goal::Ergodic => Theorem::P4_7,
                Goal::MeasurePreserving => Theorem::P4_8,
            };
            threshold(f, goal, p, k, theorem, true, opts, start)
        }
        (ClassTag::GenericCompatible, _) => generic_certificate(f, goal, p, opts, start),
    }
}

/// Ergodicity verdict from the class threshold: transitivity mod `p^k0` decides it for
/// every class except `GENERIC_COMPATIBLE`, which gets at most a brute-force refutation
/// or a structural proof.
pub fn ergodicity_certificate<F: UnaryMap + ?Sized>(
    f: &F,
    cls: &FunctionClass,
    p: u64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    certificate(f, cls, p, Goal::Ergodic, opts)
}

/// Measure-preservation verdict from bijectivity at the class threshold.
pub fn measure_preservation_certificate<F: UnaryMap + ?Sized>(
    f: &F,
    cls: &FunctionClass,
    p: u64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    certificate(f, cls, p, Goal::MeasurePreserving, opts)
}

/// Ergodicity of an interpolation series from its coefficients: exact at `p = 2`,
/// sufficient only at odd `p`.
pub fn series_ergodicity_certificate(series: &MahlerSeries, opts: &CertifyOptions) -> Result<Certificate> {
    series_certificate(series, Goal::Ergodic, opts, Instant::now())
}

/// Compatibility from the coefficient criterion when a series is known, otherwise a
/// brute-force check at the default exponent.
pub fn compatibility_certificate<F: UnaryMap + ?Sized>(f: &F, p: u64, opts: &CertifyOptions) -> Result<Certificate> {
    let start = Instant::now();
    let cert = |verdict, theorem, m: &Modulus<u64>, witness| {
        Certificate::new(Property::Compatible, verdict, theorem, m.spec(), witness, start)
    };
    if let Some(series) = f.series(p) {
        let k = prop_4_7_exponent(series.degree(), p).min(floor_log(opts.limits.states, p).max(1));
        let m = brute_modulus(p, k, &opts.limits)?;
        if is_compatible(&series)? {
            return Ok(cert(Verdict::Proven, Theorem::T2_1, &m, None));
        }
        let witness = (2..=k)
            .filter_map(|j| brute_modulus(p, j, &opts.limits).ok())
            .find_map(|m| compatibility_witness(f, &m, &opts.limits).ok().flatten())
            .unwrap_or_else(|| {
                let bad = (0..=series.degree())
                    .find(|&i| !is_compatible(&MahlerSeries::new(p, series.coeffs()[..=i].to_vec())).unwrap_or(true));
                Witness::Coefficient { index: bad.unwrap_or(0) }
            });
        return Ok(cert(Verdict::Refuted, Theorem::T2_1, &m, Some(witness)));
    }
    let m = brute_modulus(p, opts.brute_k(p), &opts.limits)?;
    Ok(match compatibility_witness(f, &m, &opts.limits)? {
        Some(w) => cert(Verdict::Refuted, Theorem::BRUTE_ONLY, &m, Some(w)),
        None => cert(Verdict::Unknown, Theorem::BRUTE_ONLY, &m, None),
    })
}
