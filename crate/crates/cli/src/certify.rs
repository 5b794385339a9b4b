use clap::ValueEnum;
use padic_forge::certify::{
    compatibility_certificate, ergodicity_certificate, infer_class, measure_preservation_certificate, Certificate,
    CertifyOptions, ClassTag, FunctionClass, Verdict,
};
use padic_forge::expr::FnExpr;

use crate::error::{CliError, CliResult};
use crate::input::Target;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Ergodic,
    MeasurePreserving,
    Compatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    ZPoly,
    QpPolyIntval,
    ClassA,
    ClassB,
    Generic,
}

fn supplied_class(expr: &FnExpr, class: ClassArg, p: u64) -> CliResult<FunctionClass> {
    let poly = || expr.to_poly().ok_or_else(|| CliError::Failed(format!("{class:?} needs a polynomial input")));
    let cls = match class {
        ClassArg::ClassB => FunctionClass::class_b(),
        ClassArg::Generic => FunctionClass::generic(),
        ClassArg::ClassA => FunctionClass::class_a(&poly()?, p),
        ClassArg::ZPoly | ClassArg::QpPolyIntval => {
            let cls = FunctionClass::of_poly(&poly()?, p)?;
            let wanted = if class == ClassArg::ZPoly { ClassTag::ZPoly } else { ClassTag::QpPolyIntval };
            if cls.tag != wanted {
                return Err(CliError::Failed(format!("polynomial is {:?}, not {wanted:?}", cls.tag)));
            }
            cls
        }
    };
    Ok(cls)
}

pub fn run(
    target: &Target,
    property: PropertyArg,
    class: Option<ClassArg>,
    opts: &CertifyOptions,
) -> CliResult<Vec<Certificate>> {
    let source = target.source()?;
    let expr = &source.expr;
    target
        .primes(source.spec.as_ref())?
        .into_iter()
        .map(|(p, _)| {
            if property == PropertyArg::Compatible {
                return Ok(compatibility_certificate(expr, p, opts)?);
            }
            let cls = match class {
                Some(c) => supplied_class(expr, c, p)?,
                None => infer_class(expr, p)?,
            };
            Ok(match property {
                PropertyArg::Ergodic => ergodicity_certificate(expr, &cls, p, opts)?,
                _ => measure_preservation_certificate(expr, &cls, p, opts)?,
            })
        })
        .collect()
}

/// Exit status: any refutation beats any unknown verdict.
pub fn outcome(certs: &[Certificate]) -> CliResult<()> {
    let summary = |c: &Certificate| format!("{:?} at p = {} ({:?})", c.property, c.checked_modulus.p, c.theorem);
    if let Some(c) = certs.iter().find(|c| c.verdict == Verdict::Refuted) {
        return Err(CliError::Refuted(summary(c)));
    }
    if let Some(c) = certs.iter().find(|c| c.verdict == Verdict::Unknown) {
        return Err(CliError::Unknown(summary(c)));
    }
    Ok(())
}

pub fn render(certs: &[Certificate]) -> String {
    certs
        .iter()
        .map(|c| {
            let mut line = format!(
                "{:?} at p = {}: {:?} via {:?} (checked mod {}^{}, {} ms)",
                c.property,
                c.checked_modulus.p,
                c.verdict,
                c.theorem,
                c.checked_modulus.p,
                c.checked_modulus.k,
                c.elapsed_ms
            );
            if let Some(w) = &c.witness {
                line += &format!("\n  witness: {}", serde_json::to_string(w).unwrap_or_default());
            }
            line + "\n"
        })
        .collect()
}
