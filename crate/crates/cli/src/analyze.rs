use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::Args;
use num_bigint::BigUint;
use padic_forge::analysis::{
    affine_linear_complexity, complexity_growth_profile, Complexity, Relation, SequenceReport,
};
use padic_forge::certify::Limits;
use padic_forge::expr::FnExpr;
use padic_forge::{Error, Modulus64};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::input::Target;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub target: Target,
    /// Raw little-endian words (one period) instead of a function; needs -p and -k
    #[arg(long, conflicts_with_all = ["function", "file"])]
    pub input: Option<PathBuf>,
    /// Start of the orbit (defaults to the spec file's seed, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest relation order searched
    #[arg(long, default_value_t = padic_forge::analysis::DEFAULT_RMAX)]
    pub rmax: usize,
    /// Unit-relation complexity of the orbit of 0 for each exponent in a range such as 3..12
    #[arg(long, value_parser = parse_range)]
    pub profile: Option<RangeInclusive<u32>>,
}

fn parse_range(text: &str) -> Result<RangeInclusive<u32>, String> {
    let (lo, hi) = text.split_once("..").ok_or("expected a range like 3..12")?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let (lo, hi): (u32, u32) = (lo.parse().map_err(|e| format!("{e}"))?, hi.parse().map_err(|e| format!("{e}"))?);
    if lo == 0 || lo > hi {
        return Err("range must satisfy 1 <= start <= end".into());
    }
    Ok(lo..=hi)
}

#[derive(Debug, Serialize)]
pub struct ProfileRow {
    pub k: u32,
    pub unit_complexity: Complexity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation<BigUint>>,
}

#[derive(Debug, Serialize)]
pub struct FactorAnalysis {
    pub sequence: SequenceReport<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<ProfileRow>>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub source: String,
    pub factors: Vec<FactorAnalysis>,
}

fn word_bytes(m: &Modulus64) -> usize {
    let bits = 64 - (m.value() - 1).leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

/// Words of a raw little-endian file, each below the modulus.
pub fn read_words(bytes: &[u8], m: &Modulus64) -> CliResult<Vec<u64>> {
    let width = word_bytes(m);
    if bytes.is_empty() || !bytes.len().is_multiple_of(width) {
        return Err(CliError::Parse(format!("input length {} is not a positive multiple of {width}", bytes.len())));
    }
    bytes
        .chunks(width)
        .map(|chunk| {
            let word = chunk.iter().rev().fold(0u64, |acc, &b| (acc << 8) | b as u64);
            if word >= *m.value() {
                return Err(CliError::Parse(format!("word {word} is not below {}", m.value())));
            }
            Ok(word)
        })
        .collect()
}

/// The cycle through `seed` mod `m`; fails when `seed` lies on a tail.
fn cycle_from(expr: &FnExpr, m: &Modulus64, seed: u64, limits: &Limits) -> CliResult<Vec<u64>> {
    let n = *m.value();
    if n > limits.states {
        return Err(Error::CapExceeded { states: n.to_string(), cap: limits.states }.into());
    }
    let kernel = expr.compile(m)?;
    let start = seed % n;
    let mut seq = vec![start];
    let mut x = kernel.eval(&start)?;
    while x != start {
        if seq.len() as u64 >= n {
            return Err(CliError::Failed(format!("seed {seed} does not lie on a cycle mod {n}")));
        }
        seq.push(x);
        x = kernel.eval(&x)?;
    }
    Ok(seq)
}

pub fn run(args: &AnalyzeArgs, limits: &Limits) -> CliResult<AnalyzeReport> {
    if let Some(path) = &args.input {
        let modulus = args.target.modulus(None)?;
        let [m] = modulus.factors() else {
            return Err(CliError::Parse("binary input needs a prime-power modulus (-p, -k)".into()));
        };
        let seq = read_words(&std::fs::read(path)?, m)?;
        let sequence = affine_linear_complexity(&seq, m, args.rmax)?;
        return Ok(AnalyzeReport {
            source: path.display().to_string(),
            factors: vec![FactorAnalysis { sequence, profile: None }],
        });
    }
    let source = args.target.source()?;
    let modulus = args.target.modulus(source.spec.as_ref())?;
    let seed = args.seed.or(source.spec.as_ref().map(|s| s.seed)).unwrap_or(0);
    let factors = modulus
        .factors()
        .iter()
        .map(|m| {
            let seq = cycle_from(&source.expr, m, seed, limits)?;
            let sequence = affine_linear_complexity(&seq, m, args.rmax)?;
            let profile = match &args.profile {
                Some(range) => Some(
                    complexity_growth_profile(&source.expr, m.p_u64(), range.clone(), args.rmax, limits)?
                        .into_iter()
                        .map(|(k, unit_complexity, relation)| ProfileRow { k, unit_complexity, relation })
                        .collect(),
                ),
                None => None,
            };
            Ok(FactorAnalysis { sequence, profile })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(AnalyzeReport { source: source.expr.to_string(), factors })
}

fn complexity(c: Complexity) -> String {
    match c {
        Complexity::Found(r) => r.to_string(),
        Complexity::NoneFoundUpTo { none_found_up_to } => format!("> {none_found_up_to}"),
    }
}

pub fn render(report: &AnalyzeReport) -> String {
    let mut out = format!("sequence from {}\n", report.source);
    for f in &report.factors {
        let s = &f.sequence;
        out += &format!(
            "  {}^{}: period {}, affine complexity {}, unit {}, any {}, full census {}\n",
            s.modulus.p,
            s.modulus.k,
            s.period,
            complexity(s.linear_complexity),
            complexity(s.unit_complexity),
            complexity(s.any_complexity),
            s.census_ok
        );
        if let Some(rel) = &s.relation {
            out += &format!("    relation: {}\n", serde_json::to_string(rel).unwrap_or_default());
        }
        if let Some(bits) = &s.bit_periods {
            out += &format!("    bit-plane periods: {bits:?}\n");
        }
        if let Some(profile) = &f.profile {
            let row: Vec<String> =
                profile.iter().map(|r| format!("k={}:{}", r.k, complexity(r.unit_complexity))).collect();
            out += &format!("    unit complexity profile: {}\n", row.join(" "));
        }
    }
    out
}
