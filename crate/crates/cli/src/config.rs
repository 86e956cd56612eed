use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use translie_core::tp::build_example_family;
use translie_core::{BasisSymbol, BracketDef, FiniteFunctional, Scalar, TpParams, Window};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema {
        field: field.to_owned(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckLaws,
    SolveDerivations,
    TpTriviality,
    BuildTp,
    VerifyTp,
    Generators,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckLaws => "check-laws",
            Command::SolveDerivations => "solve-derivations",
            Command::TpTriviality => "tp-triviality",
            Command::BuildTp => "build-tp",
            Command::VerifyTp => "verify-tp",
            Command::Generators => "generators",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    AOmegaDelta,
    AOmegaDeltaOmegaForm,
    AFK,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<BTreeMap<i64, Scalar>>,
}

impl AlgebraSpec {
    pub fn bracket(&self) -> Result<BracketDef, ConfigError> {
        match self.kind {
            AlgebraKind::AOmegaDelta => Ok(BracketDef::AOmegaDelta),
            AlgebraKind::AOmegaDeltaOmegaForm => Ok(BracketDef::OmegaForm),
            AlgebraKind::AFK => {
                let f = self.f.clone().ok_or_else(|| schema("algebra.f", "required for a-f-k"))?;
                BracketDef::afk(self.k.unwrap_or(0), FiniteFunctional::new(f))
                    .map_err(|e| schema("algebra.f", e.to_string()))
            }
        }
    }

    fn functional(&self) -> FiniteFunctional {
        FiniteFunctional::new(self.f.clone().unwrap_or_default())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Windows {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Window>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleFamily {
    #[serde(default)]
    pub d_seq: BTreeMap<i64, Scalar>,
    #[serde(default)]
    pub c: BTreeMap<i64, Scalar>,
}

/// Either explicit `(α, c, d)` or the `d_{i,j,p} = d_p f(M_i) f(M_j)` family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TpSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<BTreeMap<i64, Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<(i64, i64, i64, Scalar)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example_family: Option<ExampleFamily>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    #[default]
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub windows: Windows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tp_params: Option<TpSpec>,
    #[serde(default)]
    pub mode: ModeChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<BasisSymbol>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<BasisSymbol>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_samples: Option<usize>,
}

impl RunConfig {
    pub fn algebra(&self) -> Result<&AlgebraSpec, ConfigError> {
        self.algebra.as_ref().ok_or_else(|| schema("algebra", "required for this command"))
    }

    pub fn domain(&self) -> Result<Window, ConfigError> {
        self.windows
            .domain
            .ok_or_else(|| schema("windows.domain", "required for this command"))
    }

    /// The TP parameters, with `f` and `k` taken from the algebra.
    pub fn tp_params(&self) -> Result<TpParams, ConfigError> {
        let alg = self.algebra()?;
        if alg.kind != AlgebraKind::AFK {
            return Err(schema("algebra.kind", "TP parameters need the a-f-k algebra"));
        }
        let f = alg.functional();
        let k = alg.k.unwrap_or(0);
        let spec = self
            .tp_params
            .as_ref()
            .ok_or_else(|| schema("tp_params", "required for this command"))?;
        match &spec.example_family {
            Some(fam) => {
                if spec.alpha.is_some() || spec.c.is_some() || spec.d.is_some() {
                    return Err(schema(
                        "tp_params",
                        "give either example_family or alpha/c/d, not both",
                    ));
                }
                Ok(build_example_family(f, &fam.d_seq, fam.c.clone(), k))
            }
            None => {
                let alpha = spec
                    .alpha
                    .clone()
                    .ok_or_else(|| schema("tp_params.alpha", "required without example_family"))?;
                let mut d = BTreeMap::new();
                for (i, j, q, v) in spec.d.clone().unwrap_or_default() {
                    if d.insert((i, j, q), v).is_some() {
                        return Err(schema("tp_params.d", format!("entry ({i}, {j}, {q}) repeated")));
                    }
                }
                Ok(TpParams::new(alpha, spec.c.clone().unwrap_or_default(), d, f, k))
            }
        }
    }

    /// Checks the fields each command needs.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.command {
            Command::CheckLaws => {
                self.algebra()?.bracket()?;
                self.domain()?;
            }
            Command::SolveDerivations => {
                let alg = self.algebra()?;
                alg.bracket()?;
                self.domain()?;
                self.windows
                    .core
                    .ok_or_else(|| schema("windows.core", "required for solve-derivations"))?;
                match alg.kind {
                    AlgebraKind::AOmegaDelta => {
                        self.degree
                            .ok_or_else(|| schema("degree", "required for the graded solve"))?;
                    }
                    AlgebraKind::AFK => {}
                    AlgebraKind::AOmegaDeltaOmegaForm => {
                        return Err(schema("algebra.kind", "solve the relabeled a-omega-delta instead"))
                    }
                }
            }
            Command::TpTriviality => {
                self.domain()?;
                if let Some(alg) = &self.algebra {
                    if alg.kind != AlgebraKind::AOmegaDelta {
                        return Err(schema("algebra.kind", "tp-triviality applies to a-omega-delta"));
                    }
                }
            }
            Command::BuildTp | Command::VerifyTp => {
                self.algebra()?.bracket()?;
                self.tp_params()?;
            }
            Command::Generators => {
                self.algebra()?.bracket()?;
                self.domain()?;
                match &self.generators {
                    Some(g) if !g.is_empty() => {}
                    _ => return Err(schema("generators", "a nonempty list is required")),
                }
            }
        }
        if self.budget == Some(0) {
            return Err(schema("budget", "must be positive"));
        }
        Ok(())
    }
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ConfigError::Schema {
            field: "(document)".into(),
            message: e.to_string(),
        },
        _ => ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })?;
    config.validate()?;
    Ok(config)
}
