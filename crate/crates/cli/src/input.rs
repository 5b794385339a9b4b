use std::path::PathBuf;

use clap::Args;
use padic_forge::expr::{parse_dsl, FnExpr};
use padic_forge::genlib::SpecFile;
use padic_forge::{CompositeModulus64, Modulus, ModulusSpec};

use crate::error::{CliError, CliResult};

/// Function source and modulus shared by the subcommands.
#[derive(Debug, Clone, Args)]
pub struct Target {
    /// Function in the expression DSL, e.g. "1 + x + 2*delta(xor(x, 2*x + 1))"
    pub function: Option<String>,
    /// File holding DSL text, a JSON AST, or a JSON generator spec
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Prime p of the modulus p^k
    #[arg(short = 'p')]
    pub p: Option<u64>,
    /// Exponent k of the modulus p^k
    #[arg(short = 'k')]
    pub k: Option<u32>,
    /// Composite modulus in decimal, factored automatically
    #[arg(short = 'm')]
    pub m: Option<u64>,
}

/// Parsed function, plus the spec file when the input was one.
pub struct Source {
    pub expr: FnExpr,
    pub spec: Option<SpecFile>,
}

impl Target {
    pub fn source(&self) -> CliResult<Source> {
        let text = match (&self.function, &self.file) {
            (Some(_), Some(_)) => return Err(CliError::Parse("pass either a function or --file, not both".into())),
            (Some(t), None) => t.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)?,
            (None, None) => return Err(CliError::Parse("missing function (positional argument or --file)".into())),
        };
        let trimmed = text.trim();
        if !trimmed.starts_with('{') {
            return Ok(Source { expr: parse_dsl(trimmed)?, spec: None });
        }
        let value: serde_json::Value = serde_json::from_str(trimmed)?;
        if value.get("state_fn").is_some() {
            let spec: SpecFile = serde_json::from_value(value)?;
            return Ok(Source { expr: spec.state_fn.clone(), spec: Some(spec) });
        }
        Ok(Source { expr: serde_json::from_value(value)?, spec: None })
    }

    /// `-m` wins over `-p/-k`, which win over the modulus of a spec file.
    pub fn modulus(&self, spec: Option<&SpecFile>) -> CliResult<CompositeModulus64> {
        if let Some(m) = self.m {
            if self.p.is_some() || self.k.is_some() {
                return Err(CliError::Parse("pass either -m or -p/-k".into()));
            }
            return Ok(CompositeModulus64::factorize(&m)?);
        }
        match (self.p, self.k) {
            (Some(p), Some(k)) => return Ok(CompositeModulus64::new(vec![Modulus::new(p, k)?])?),
            (Some(_), None) | (None, Some(_)) => return Err(CliError::Parse("-p and -k go together".into())),
            (None, None) => {}
        }
        match spec {
            Some(spec) => {
                let factors =
                    spec.modulus.iter().map(|&s: &ModulusSpec| Modulus::from_spec(s)).collect::<Result<Vec<_>, _>>()?;
                Ok(CompositeModulus64::new(factors)?)
            }
            None => Err(CliError::Parse("missing modulus: pass -p and -k, or -m".into())),
        }
    }

    /// The prime for single-prime commands: `-p`, or the prime of a prime-power `-m`.
    pub fn primes(&self, spec: Option<&SpecFile>) -> CliResult<Vec<(u64, Option<u32>)>> {
        if let (Some(p), None, None) = (self.p, self.k, self.m) {
            Modulus::new(p, 1)?;
            return Ok(vec![(p, None)]);
        }
        Ok(self.modulus(spec)?.factors().iter().map(|f| (f.p_u64(), Some(f.k()))).collect())
    }
}
