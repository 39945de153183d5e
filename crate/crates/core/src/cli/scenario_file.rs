//! TOML scenario files.
//!
//! ```toml
//! [meta]
//! name = "fig1"
//!
//! [payoff]
//! kind = "quadratic"   # or "cosh_bowl", "quartic_bowl"
//! c = 0.0
//!
//! [[groups]]
//! alpha = 10.0
//! alpha_hat = 5.0
//! q = 0.5
//!
//! [[groups]]
//! alpha = 12.0
//! alpha_hat = 15.0
//! q = 0.5
//!
//! [peer]
//! rows = [[0.5, 0.5], [0.5, 0.5]]
//!
//! [lambdas]            # optional, one entry per group
//! misspecified = [0.8, 0.7]
//! correct = [0.0, 0.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    validate_scenario, ConcaveKind, GroupParams, PayoffSpec, PeerMatrix, Scenario, TypeRole,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    meta: Meta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payoff: Option<PayoffSection>,
    #[serde(default)]
    groups: Vec<GroupSection>,
    peer: Option<PeerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambdas: Option<LambdaSection>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    name: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffSection {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    alpha: Option<f64>,
    alpha_hat: Option<f64>,
    q: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeerSection {
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    misspecified: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    correct: Option<Vec<f64>>,
}

/// A parsed file, remembering whether it fixed any conformity weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub has_lambdas: bool,
}

fn payoff_of(section: Option<PayoffSection>) -> Result<PayoffSpec> {
    let Some(p) = section else {
        return Ok(PayoffSpec::default());
    };
    match p.kind.as_str() {
        "quadratic" => Ok(PayoffSpec::Quadratic {
            c: p.c.unwrap_or(0.0),
        }),
        other => {
            if p.c.is_some() {
                return Err(Error::Parse(format!(
                    "[payoff]: key `c` only applies to kind = \"quadratic\", not \"{other}\""
                )));
            }
            ConcaveKind::from_name(other)
                .map(PayoffSpec::Concave)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "[payoff]: unknown kind \"{other}\" (expected quadratic, cosh_bowl or quartic_bowl)"
                    ))
                })
        }
    }
}

fn per_group(values: &Option<Vec<f64>>, k: usize, key: &str) -> Result<Option<Vec<f64>>> {
    match values {
        Some(v) if v.len() != k => Err(Error::Parse(format!(
            "[lambdas]: `{key}` has {} entries for {k} groups",
            v.len()
        ))),
        other => Ok(other.clone()),
    }
}

fn build(doc: Document) -> Result<ScenarioFile> {
    let payoff = payoff_of(doc.payoff)?;
    if doc.groups.is_empty() {
        return Err(Error::Parse("no [[groups]] entries".into()));
    }
    let groups = doc
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let need = |v: Option<f64>, key: &str| {
                v.ok_or_else(|| Error::Parse(format!("group {}: missing {key}", i + 1)))
            };
            Ok(GroupParams::new(
                need(g.alpha, "alpha")?,
                need(g.alpha_hat, "alpha_hat")?,
                need(g.q, "q")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let peer = doc
        .peer
        .ok_or_else(|| Error::Parse("missing [peer] section".into()))?;
    let at_file = |e: Error| match e {
        Error::Validation { location, message } => Error::Parse(format!("{location}: {message}")),
        other => other,
    };
    let mut scenario = Scenario::canonical(doc.meta.name, groups, PeerMatrix::from_rows(peer.rows), payoff)
        .map_err(at_file)?;

    let k = scenario.num_groups();
    let mut has_lambdas = false;
    if let Some(l) = doc.lambdas {
        let mis = per_group(&l.misspecified, k, "misspecified")?;
        let cor = per_group(&l.correct, k, "correct")?;
        has_lambdas = mis.is_some() || cor.is_some();
        for t in scenario.types.iter_mut() {
            let src = match t.role {
                TypeRole::Misspecified => &mis,
                TypeRole::Correct => &cor,
                TypeRole::Mutant => &None,
            };
            if let Some(v) = src {
                t.lambda = v[t.group];
            }
        }
        scenario = validate_scenario(scenario).map_err(at_file)?;
    }
    Ok(ScenarioFile {
        scenario,
        has_lambdas,
    })
}

pub fn parse_scenario_str(text: &str) -> Result<ScenarioFile> {
    let doc: Document = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
    build(doc)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    load_scenario(path).map(|f| f.scenario)
}

/// TOML text for a scenario with one correct and one misspecified type per
/// group. Weights are written only when some type has a nonzero weight.
pub fn serialize_scenario(s: &Scenario) -> Result<String> {
    if !s.is_canonical() {
        return Err(Error::InvalidArgument(
            "only scenarios with one correct and one misspecified type per group can be written"
                .into(),
        ));
    }
    let payoff = match s.payoff {
        PayoffSpec::Quadratic { c } => PayoffSection {
            kind: "quadratic".into(),
            c: Some(c),
        },
        PayoffSpec::Concave(kind) => PayoffSection {
            kind: kind.name().into(),
            c: None,
        },
    };
    let k = s.num_groups();
    let lambdas = if s.types.iter().any(|t| t.lambda != 0.0) {
        let of = |role: TypeRole| {
            (0..k)
                .map(|g| {
                    s.types
                        .iter()
                        .find(|t| t.group == g && t.role == role)
                        .map_or(0.0, |t| t.lambda)
                })
                .collect()
        };
        Some(LambdaSection {
            misspecified: Some(of(TypeRole::Misspecified)),
            correct: Some(of(TypeRole::Correct)),
        })
    } else {
        None
    };
    let doc = Document {
        meta: Meta {
            name: s.name.clone(),
        },
        payoff: Some(payoff),
        groups: s
            .groups
            .iter()
            .map(|g| GroupSection {
                alpha: Some(g.alpha),
                alpha_hat: Some(g.alpha_hat),
                q: Some(g.q),
            })
            .collect(),
        peer: Some(PeerSection {
            rows: s.peer.rows().to_vec(),
        }),
        lambdas,
    };
    toml::to_string(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))
}
