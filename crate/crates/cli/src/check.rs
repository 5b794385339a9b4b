use padic_forge::certify::{bijective_mod, compatible_mod, transitive_mod, Limits};
use padic_forge::expr::FnExpr;
use padic_forge::mahler::{is_compatible, is_ergodic_2adic, is_ergodic_sufficient_oddp, is_measure_preserving_2adic};
use padic_forge::{Error, Modulus64, ModulusSpec};
use serde::Serialize;

use crate::error::CliResult;
use crate::input::Target;

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub function: String,
    pub modulus: String,
    /// Transitive modulo every factor, hence modulo the composite.
    pub transitive: bool,
    pub factors: Vec<FactorCheck>,
}

#[derive(Debug, Serialize)]
pub struct FactorCheck {
    pub modulus: ModulusSpec,
    pub compatible: bool,
    /// `(x, y, j)` with `x = y (mod p^j)` but `f(x) != f(y) (mod p^j)`.
    pub compatibility_witness: Option<(u64, u64, u32)>,
    pub not_integer_valued_at: Option<u64>,
    pub bijective: Option<bool>,
    pub collision: Option<(u64, u64)>,
    pub transitive: Option<bool>,
    /// Length of the cycle through 0 when the map is bijective.
    pub orbit_length: Option<u64>,
    /// Coefficient criteria for polynomial inputs.
    pub coefficients: Option<CoefficientVerdicts>,
}

#[derive(Debug, Serialize)]
pub struct CoefficientVerdicts {
    pub compatible: bool,
    pub measure_preserving: Option<bool>,
    pub ergodic: Option<bool>,
    /// Sufficient condition at odd p; `false` decides nothing.
    pub ergodic_sufficient: Option<bool>,
}

fn coefficient_verdicts(expr: &FnExpr, p: u64) -> CliResult<Option<CoefficientVerdicts>> {
    let Some(poly) = expr.to_poly() else { return Ok(None) };
    let series = poly.to_mahler(p);
    let binary = p == 2;
    match is_compatible(&series) {
        Err(Error::DegreeCap { .. }) => Ok(None),
        Err(e) => Err(e.into()),
        Ok(compatible) => Ok(Some(CoefficientVerdicts {
            compatible,
            measure_preserving: binary.then(|| is_measure_preserving_2adic(&series)).transpose()?,
            ergodic: binary.then(|| is_ergodic_2adic(&series)).transpose()?,
            ergodic_sufficient: (!binary).then(|| is_ergodic_sufficient_oddp(&series)).transpose()?,
        })),
    }
}

fn check_factor(expr: &FnExpr, m: &Modulus64, limits: &Limits) -> CliResult<FactorCheck> {
    let compat = compatible_mod(expr, m, limits)?;
    let mut out = FactorCheck {
        modulus: m.spec(),
        compatible: compat.compatible,
        compatibility_witness: compat.witness,
        not_integer_valued_at: compat.not_integer_valued_at,
        bijective: None,
        collision: None,
        transitive: None,
        orbit_length: None,
        coefficients: coefficient_verdicts(expr, m.p_u64())?,
    };
    if compat.not_integer_valued_at.is_some() {
        return Ok(out);
    }
    let bij = bijective_mod(expr, m, limits)?;
    out.bijective = Some(bij.bijective);
    out.collision = bij.collision;
    match transitive_mod(expr, m, limits) {
        Ok(orbit) => {
            out.transitive = Some(orbit.transitive);
            out.orbit_length = Some(orbit.orbit_length);
        }
        Err(Error::NotBijective { .. }) => out.transitive = Some(false),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

pub fn run(target: &Target, limits: &Limits) -> CliResult<CheckReport> {
    let source = target.source()?;
    let modulus = target.modulus(source.spec.as_ref())?;
    let factors =
        modulus.factors().iter().map(|m| check_factor(&source.expr, m, limits)).collect::<CliResult<Vec<_>>>()?;
    Ok(CheckReport {
        function: source.expr.to_string(),
        modulus: modulus.value().to_string(),
        transitive: factors.iter().all(|f| f.transitive == Some(true)),
        factors,
    })
}

fn flag(v: Option<bool>) -> String {
    v.map_or_else(|| "n/a".into(), |b| b.to_string())
}

pub fn render(report: &CheckReport) -> String {
    let mut out = format!("f(x) = {}\nmodulus {}: transitive {}\n", report.function, report.modulus, report.transitive);
    for f in &report.factors {
        out += &format!("  {}^{}: compatible {}", f.modulus.p, f.modulus.k, f.compatible);
        if let Some((x, y, j)) = f.compatibility_witness {
            out += &format!(" (f({x}) != f({y}) mod {}^{j})", f.modulus.p);
        }
        if let Some(x) = f.not_integer_valued_at {
            out += &format!(" (not integer-valued at {x})");
        }
        out += &format!(", bijective {}", flag(f.bijective));
        if let Some((x, y)) = f.collision {
            out += &format!(" (f({x}) = f({y}))");
        }
        out += &format!(", transitive {}", flag(f.transitive));
        if let Some(n) = f.orbit_length {
            out += &format!(" (orbit of 0 has length {n})");
        }
        out.push('\n');
        if let Some(c) = &f.coefficients {
            out += &format!(
                "    coefficients: compatible {}, measure-preserving {}, ergodic {}, ergodic (sufficient test) {}\n",
                c.compatible,
                flag(c.measure_preserving),
                flag(c.ergodic),
                flag(c.ergodic_sufficient)
            );
        }
    }
    out
}
