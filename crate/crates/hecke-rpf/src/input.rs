//! JSON input: RPF spec files, seed forms and Fourier coefficient files.

use std::path::Path;
use std::sync::Arc;

use hecke_rpf_core::mellin::{FourierSeries, GrowthBound};
use hecke_rpf_core::qexp;
use hecke_rpf_core::quadratic_forms::default_max_depth;
use hecke_rpf_core::{enumerate_simple_cycle, LambdaRing, QuadraticForm, RpfSpec, RpfTerm};
use serde::Deserialize;

use crate::CliError;

/// One coefficient of a form: an integer, or `Z[λ]` coordinates `[c0, c1, …]` for `c0 + c1 λ + …`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Poly(Vec<i64>),
}

impl Coeff {
    fn coords(&self) -> Vec<i64> {
        match self {
            Coeff::Int(n) => vec![*n],
            Coeff::Poly(v) => v.clone(),
        }
    }
}

pub type FormSpec = [Coeff; 3];

/// `"[1,1,-1]"` or `"[[1],[0,-1],[-1]]"`.
pub fn parse_form(text: &str) -> Result<FormSpec, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad form {text:?}: {e}")))
}

pub fn build_form(ring: &Arc<LambdaRing>, form: &FormSpec) -> Result<QuadraticForm, CliError> {
    Ok(QuadraticForm::from_i64(
        ring,
        &form[0].coords(),
        &form[1].coords(),
        &form[2].coords(),
    )?)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub seed_form: FormSpec,
    #[serde(default = "one")]
    pub d: f64,
}

fn one() -> f64 {
    1.0
}

/// On-disk description of `q = c0·q0 + Σ d·q*_A`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u32,
    pub k: u32,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub terms: Vec<TermFile>,
    pub max_depth: Option<usize>,
}

impl SpecFile {
    pub fn read(path: &Path) -> Result<SpecFile, CliError> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Enumerates each term's cycle; `max_depth` overrides the file and the `4p` default.
    pub fn build(&self, max_depth: Option<usize>) -> Result<RpfSpec, CliError> {
        let ring = LambdaRing::new(self.p)?;
        let depth = max_depth
            .or(self.max_depth)
            .unwrap_or_else(|| default_max_depth(self.p));
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let seed = build_form(&ring, &t.seed_form)?;
            terms.push(RpfTerm {
                cycle: enumerate_simple_cycle(&seed, depth)?,
                d: t.d,
            });
        }
        Ok(RpfSpec::new(
            &ring, self.k, terms, self.c0, self.nu, self.eta,
        )?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowthFile {
    constant: f64,
    exponent: f64,
}

/// Fourier coefficients: either listed, or produced by a named generator.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffFile {
    weight: u32,
    lambda: Option<f64>,
    coefficients: Option<Vec<f64>>,
    generator: Option<String>,
    count: Option<usize>,
    growth: Option<GrowthFile>,
}

/// A cusp form's expansion plus what the Dirichlet-series check needs.
#[derive(Clone, Debug)]
pub struct CoeffInput {
    pub series: FourierSeries,
    pub growth: Option<GrowthBound>,
    /// A longer expansion for the Dirichlet side, when a generator can provide it.
    pub dirichlet: Option<FourierSeries>,
}

/// Terms used on the Dirichlet side of the generated `Δ·E6` check.
const DIRICHLET_TERMS: usize = 2000;

impl CoeffInput {
    pub fn read(path: &Path, default_lambda: f64) -> Result<CoeffInput, CliError> {
        let text = read_text(path)?;
        let file: CoeffFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let lambda = file.lambda.unwrap_or(default_lambda);
        let growth = file.growth.map(|g| GrowthBound {
            constant: g.constant,
            exponent: g.exponent,
        });
        match (file.coefficients, file.generator.as_deref()) {
            (Some(c), None) => Ok(CoeffInput {
                series: FourierSeries::new(lambda, file.weight, c)?,
                growth,
                dirichlet: None,
            }),
            (None, Some("delta_e6")) => {
                if file.weight != 18 {
                    return Err(CliError::Input("delta_e6 has weight 18".into()));
                }
                let count = file.count.unwrap_or(50);
                let long = qexp::delta_e6(count.max(DIRICHLET_TERMS))?;
                let long: Vec<f64> = long.iter().map(|&a| a as f64).collect();
                Ok(CoeffInput {
                    series: FourierSeries::new(lambda, 18, long[..count].to_vec())?,
                    // |a_n| <= d(n) n^{17/2} <= 2 n^9.
                    growth: growth.or(Some(GrowthBound {
                        constant: 2.0,
                        exponent: 9.0,
                    })),
                    dirichlet: Some(FourierSeries::new(lambda, 18, long)?),
                })
            }
            (None, Some(g)) => Err(CliError::Input(format!("unknown generator {g:?}"))),
            _ => Err(CliError::Input(
                "coefficient file needs exactly one of \"coefficients\" and \"generator\"".into(),
            )),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
