use std::io::Write;

use clap::Args;
use padic_forge::certify::{Certificate, CertifyOptions};
use padic_forge::expr::parse_dsl;
use padic_forge::genlib::{full_period_census, CensusReport, GeneratorSpec, GeneratorState, OutputFn, SpecFile};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::input::Target;

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub target: Target,
    /// Seed, below the modulus (defaults to the spec file's seed, else 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output function in the DSL
    #[arg(long = "out")]
    pub out_fn: Option<String>,
    /// Output exponents t_i <= k_i, one per prime factor, comma separated
    #[arg(long, value_delimiter = ',')]
    pub out_exponents: Vec<u32>,
    /// Number of output words
    #[arg(long, default_value_t = 16)]
    pub count: u64,
    /// Hex-encode the byte stream
    #[arg(long, conflicts_with = "decimal")]
    pub hex: bool,
    /// Print one decimal word per line (any modulus)
    #[arg(long)]
    pub decimal: bool,
    /// Skip certification; period guarantees no longer apply
    #[arg(long)]
    pub unchecked: bool,
    /// Also run a full-period census of the outputs
    #[arg(long)]
    pub census: bool,
}

#[derive(Debug, Serialize)]
pub struct GenReport {
    pub spec: SpecFile,
    pub certified: bool,
    pub certificates: Vec<Certificate>,
    pub output_modulus: String,
    pub words: u64,
    pub format: &'static str,
    pub final_state: GeneratorState<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusReport>,
}

fn build(args: &GenArgs, opts: &CertifyOptions) -> CliResult<GeneratorSpec<u64>> {
    let source = args.target.source()?;
    let overridden = args.target.m.is_some() || args.target.p.is_some();
    if let (Some(spec), false, None, None) = (&source.spec, overridden, args.seed, &args.out_fn) {
        return Ok(GeneratorSpec::from_file(spec.clone(), args.unchecked, opts)?);
    }
    let modulus = args.target.modulus(source.spec.as_ref())?;
    let seed = args.seed.or(source.spec.as_ref().map(|s| s.seed)).unwrap_or(0);
    let out_fn = match &args.out_fn {
        Some(text) => {
            let exponents = if args.out_exponents.is_empty() {
                modulus.factors().iter().map(|f| f.k()).collect()
            } else {
                args.out_exponents.clone()
            };
            Some(OutputFn { expr: parse_dsl(text)?, exponents })
        }
        None if !args.out_exponents.is_empty() => {
            return Err(CliError::Parse("--out-exponents needs --out".into()));
        }
        None => source.spec.as_ref().and_then(|s| s.out_fn.clone()),
    };
    Ok(if args.unchecked {
        GeneratorSpec::unchecked(source.expr, out_fn, modulus, seed)?
    } else {
        GeneratorSpec::certified(source.expr, out_fn, modulus, seed, opts)?
    })
}

/// Writes the stream to `sink` and returns the report destined for stderr.
pub fn run<W: Write>(args: &GenArgs, opts: &CertifyOptions, sink: &mut W) -> CliResult<GenReport> {
    let spec = build(args, opts)?;
    let mut generator = spec.generator();
    let format = if args.decimal {
        for _ in 0..args.count {
            writeln!(sink, "{}", generator.next_value()?)?;
        }
        "decimal"
    } else {
        let mut bytes = Vec::new();
        generator.write_bytes(args.count, &mut bytes)?;
        if args.hex {
            writeln!(sink, "{}", hex::encode(&bytes))?;
            "hex"
        } else {
            sink.write_all(&bytes)?;
            "bytes"
        }
    };
    sink.flush()?;
    let census = if args.census { Some(full_period_census(&spec, &opts.limits)?) } else { None };
    Ok(GenReport {
        spec: spec.to_file()?,
        certified: !spec.certificates().is_empty(),
        certificates: spec.certificates().to_vec(),
        output_modulus: spec.output_modulus().to_string(),
        words: args.count,
        format,
        final_state: generator.state(),
        census,
    })
}

pub fn render(report: &GenReport) -> String {
    let mut out = format!(
        "{} {} words mod {} ({}), state {} after {} steps\n",
        if report.certified { "certified" } else { "unchecked" },
        report.words,
        report.output_modulus,
        report.format,
        report.final_state.current,
        report.final_state.steps_taken
    );
    if let Some(c) = &report.census {
        out += &format!(
            "census: period {} over {} steps, counts {}..{}, uniform {}\n",
            c.period, c.steps, c.min_count, c.max_count, c.uniform
        );
    }
    out
}
