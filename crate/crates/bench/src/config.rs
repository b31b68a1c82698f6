//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{BenchError, Result};

/// One experiment: an instance, an algorithm and a seed batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithm: AlgorithmSpec,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// CSV destination; relative paths resolve against the output directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_seeds() -> usize {
    1
}

fn default_scale() -> f64 {
    1.0
}

/// Testbed instance to generate. In JSON the variant is the `kind` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        d: usize,
        #[serde(rename = "L")]
        lipschitz: f64,
        mu: f64,
        #[serde(default)]
        sigma: f64,
        #[serde(default)]
        seed: u64,
    },
    Saddle {
        dx: usize,
        dy: usize,
        #[serde(rename = "L")]
        lipschitz: f64,
        mu_p: f64,
        mu_d: f64,
        #[serde(default)]
        sigma: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

impl ProblemSpec {
    pub fn seed(&self) -> u64 {
        match *self {
            ProblemSpec::Quadratic { seed, .. } | ProblemSpec::Saddle { seed, .. } => seed,
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            ProblemSpec::Quadratic { sigma, .. } | ProblemSpec::Saddle { sigma, .. } => sigma,
        }
    }
}

/// Solver and its targets; in JSON the variant is the `name` field. Unset estimates default to the testbed's ground
/// truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    CatalystSgd {
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        outer_iters: Option<usize>,
        #[serde(default)]
        inner_steps: Option<usize>,
        #[serde(default)]
        dist_sq: Option<f64>,
    },
    RCatalystSgd {
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        epochs: Option<usize>,
        #[serde(default)]
        initial_gap: Option<f64>,
    },
    Reg {
        steps: usize,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        eta: Option<f64>,
    },
    Sreg {
        steps: usize,
        #[serde(default)]
        mu: Option<f64>,
    },
    SregRestarted {
        epsilon: f64,
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        r_sq: Option<f64>,
    },
    CatalystMinimaxDet {
        #[serde(default)]
        outer_iters: Option<usize>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        potential: Option<f64>,
        #[serde(default)]
        gap_ratio: Option<f64>,
    },
    RCatalystMinimaxDet {
        epochs: usize,
    },
    CatalystMinimaxStoch {
        epsilon: f64,
        #[serde(default)]
        potential: Option<f64>,
        #[serde(default)]
        gap_ratio: Option<f64>,
    },
    RCatalystMinimaxStoch {
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        epochs: Option<usize>,
        #[serde(default)]
        initial_gap: Option<f64>,
    },
    ExactProxBaseline {
        outer_iters: usize,
    },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::CatalystSgd { .. } => "catalyst_sgd",
            AlgorithmSpec::RCatalystSgd { .. } => "r_catalyst_sgd",
            AlgorithmSpec::Reg { .. } => "reg",
            AlgorithmSpec::Sreg { .. } => "sreg",
            AlgorithmSpec::SregRestarted { .. } => "sreg_restarted",
            AlgorithmSpec::CatalystMinimaxDet { .. } => "catalyst_minimax_det",
            AlgorithmSpec::RCatalystMinimaxDet { .. } => "r_catalyst_minimax_det",
            AlgorithmSpec::CatalystMinimaxStoch { .. } => "catalyst_minimax_stoch",
            AlgorithmSpec::RCatalystMinimaxStoch { .. } => "r_catalyst_minimax_stoch",
            AlgorithmSpec::ExactProxBaseline { .. } => "exact_prox_baseline",
        }
    }

    fn needs_quadratic(&self) -> bool {
        matches!(
            self,
            AlgorithmSpec::CatalystSgd { .. }
                | AlgorithmSpec::RCatalystSgd { .. }
                | AlgorithmSpec::ExactProxBaseline { .. }
        )
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BenchError::config(
            path,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn positive_opt(path: &str, v: Option<f64>) -> Result<()> {
    v.map_or(Ok(()), |v| positive(path, v))
}

fn nonneg(path: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BenchError::config(
            path,
            format!("must be non-negative and finite, got {v}"),
        ))
    }
}

fn count(path: &str, v: usize) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(BenchError::config(path, "must be at least 1"))
    }
}

fn count_opt(path: &str, v: Option<usize>) -> Result<()> {
    v.map_or(Ok(()), |v| count(path, v))
}

fn one_of(path: &str, a: bool, b: bool, names: &str) -> Result<()> {
    if a || b {
        Ok(())
    } else {
        Err(BenchError::config(path, format!("set at least one of {names}")))
    }
}

/// Enum-valued keys of the document and the field naming their variant.
const TAGS: [(&str, &str); 2] = [("problem", "kind"), ("algorithm", "name")];

/// `{"kind": "k", ..rest}` becomes `{"k": {..rest}}`.
fn untag(doc: &mut Value) -> Result<()> {
    for (key, tag) in TAGS {
        let Some(obj) = doc.get_mut(key).and_then(Value::as_object_mut) else {
            continue;
        };
        let name = match obj.remove(tag) {
            Some(Value::String(s)) => s,
            Some(other) => {
                return Err(BenchError::config(
                    format!("{key}.{tag}"),
                    format!("expected a string, got {other}"),
                ))
            }
            None => return Err(BenchError::config(format!("{key}.{tag}"), "missing field")),
        };
        let rest = Value::Object(std::mem::take(obj));
        doc[key] = Value::Object(Map::from_iter([(name, rest)]));
    }
    Ok(())
}

fn retag(doc: &mut Value) {
    for (key, tag) in TAGS {
        let Some(Value::Object(outer)) = doc.get_mut(key) else {
            continue;
        };
        let Some((name, Value::Object(mut rest))) = std::mem::take(outer).into_iter().next() else {
            continue;
        };
        rest.insert(tag.to_string(), Value::String(name));
        doc[key] = Value::Object(rest);
    }
}

/// Maps a path in the untagged form back to the document's layout.
fn document_path(path: &str) -> String {
    let parts: Vec<&str> = path.split('.').collect();
    match parts.as_slice() {
        [key] => match TAGS.iter().find(|(k, _)| k == key) {
            Some((k, tag)) => format!("{k}.{tag}"),
            None => path.to_string(),
        },
        [key, _variant, rest @ ..] if TAGS.iter().any(|(k, _)| k == key) => {
            if rest.is_empty() {
                (*key).to_string()
            } else {
                format!("{key}.{}", rest.join("."))
            }
        }
        _ => path.to_string(),
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON document; errors carry the field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| BenchError::config("<document>", e.to_string()))?;
        untag(&mut doc)?;
        let cfg: Self = serde_path_to_error::deserialize(doc).map_err(|e| {
            let path = document_path(&e.path().to_string());
            BenchError::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let mut doc = serde_json::to_value(self).expect("config serializes");
        retag(&mut doc);
        serde_json::to_string_pretty(&doc).expect("value serializes")
    }

    pub fn validate(&self) -> Result<()> {
        count("seeds", self.seeds)?;
        match self.problem {
            ProblemSpec::Quadratic {
                d,
                lipschitz,
                mu,
                sigma,
                ..
            } => {
                count("problem.d", d)?;
                positive("problem.L", lipschitz)?;
                nonneg("problem.mu", mu)?;
                nonneg("problem.sigma", sigma)?;
                if mu > lipschitz {
                    return Err(BenchError::config("problem.mu", "must not exceed L"));
                }
            }
            ProblemSpec::Saddle {
                dx,
                dy,
                lipschitz,
                mu_p,
                mu_d,
                sigma,
                scale,
                ..
            } => {
                count("problem.dx", dx)?;
                count("problem.dy", dy)?;
                positive("problem.L", lipschitz)?;
                nonneg("problem.mu_p", mu_p)?;
                positive("problem.mu_d", mu_d)?;
                nonneg("problem.sigma", sigma)?;
                positive("problem.scale", scale)?;
                if mu_p > mu_d {
                    return Err(BenchError::config("problem.mu_p", "must not exceed mu_d"));
                }
                if lipschitz < mu_d {
                    return Err(BenchError::config("problem.L", "must be at least mu_d"));
                }
            }
        }
        let quadratic = matches!(self.problem, ProblemSpec::Quadratic { .. });
        if self.algorithm.needs_quadratic() != quadratic {
            let kind = if quadratic { "quadratic" } else { "saddle" };
            return Err(BenchError::config(
                "algorithm.name",
                format!("`{}` does not apply to a {kind} problem", self.algorithm.name()),
            ));
        }
        match &self.algorithm {
            AlgorithmSpec::CatalystSgd {
                epsilon,
                outer_iters,
                inner_steps,
                dist_sq,
            } => {
                positive_opt("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.dist_sq", *dist_sq)?;
                count_opt("algorithm.outer_iters", *outer_iters)?;
                count_opt("algorithm.inner_steps", *inner_steps)?;
                one_of(
                    "algorithm",
                    epsilon.is_some(),
                    outer_iters.is_some(),
                    "epsilon, outer_iters",
                )?;
            }
            AlgorithmSpec::RCatalystSgd {
                epsilon,
                epochs,
                initial_gap,
            } => {
                positive_opt("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.initial_gap", *initial_gap)?;
                count_opt("algorithm.epochs", *epochs)?;
                one_of("algorithm", epsilon.is_some(), epochs.is_some(), "epsilon, epochs")?;
            }
            AlgorithmSpec::Reg { steps, mu, eta } => {
                count("algorithm.steps", *steps)?;
                positive_opt("algorithm.mu", *mu)?;
                positive_opt("algorithm.eta", *eta)?;
            }
            AlgorithmSpec::Sreg { steps, mu } => {
                count("algorithm.steps", *steps)?;
                positive_opt("algorithm.mu", *mu)?;
            }
            AlgorithmSpec::SregRestarted { epsilon, mu, r_sq } => {
                positive("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.mu", *mu)?;
                positive_opt("algorithm.r_sq", *r_sq)?;
            }
            AlgorithmSpec::CatalystMinimaxDet {
                outer_iters,
                epsilon,
                potential,
                gap_ratio,
            } => {
                count_opt("algorithm.outer_iters", *outer_iters)?;
                positive_opt("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.potential", *potential)?;
                positive_opt("algorithm.gap_ratio", *gap_ratio)?;
                one_of(
                    "algorithm",
                    epsilon.is_some(),
                    outer_iters.is_some(),
                    "epsilon, outer_iters",
                )?;
            }
            AlgorithmSpec::RCatalystMinimaxDet { epochs } => count("algorithm.epochs", *epochs)?,
            AlgorithmSpec::CatalystMinimaxStoch {
                epsilon,
                potential,
                gap_ratio,
            } => {
                positive("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.potential", *potential)?;
                positive_opt("algorithm.gap_ratio", *gap_ratio)?;
            }
            AlgorithmSpec::RCatalystMinimaxStoch {
                epsilon,
                epochs,
                initial_gap,
            } => {
                positive_opt("algorithm.epsilon", *epsilon)?;
                positive_opt("algorithm.initial_gap", *initial_gap)?;
                count_opt("algorithm.epochs", *epochs)?;
                one_of("algorithm", epsilon.is_some(), epochs.is_some(), "epsilon, epochs")?;
            }
            AlgorithmSpec::ExactProxBaseline { outer_iters } => count("algorithm.outer_iters", *outer_iters)?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD: &str = r#"{
        "problem": {"kind": "quadratic", "d": 10, "L": 100, "mu": 0, "seed": 3},
        "algorithm": {"name": "catalyst_sgd", "epsilon": 0.01},
        "seeds": 2
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_json(QUAD).unwrap();
        assert_eq!(cfg.seeds, 2);
        assert_eq!(cfg.algorithm.name(), "catalyst_sgd");
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn type_errors_name_the_field() {
        let bad = QUAD.replace("\"d\": 10", "\"d\": \"ten\"");
        match ExperimentConfig::from_json(&bad) {
            Err(BenchError::Config { path, .. }) => assert_eq!(path, "problem.d"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = QUAD.replace("\"seeds\": 2", "\"seeds\": 2, \"colour\": 1");
        assert!(matches!(
            ExperimentConfig::from_json(&bad),
            Err(BenchError::Config { .. })
        ));
    }

    #[test]
    fn validation_names_the_field() {
        let bad = QUAD.replace("\"epsilon\": 0.01", "\"epsilon\": -1");
        match ExperimentConfig::from_json(&bad) {
            Err(BenchError::Config { path, .. }) => assert_eq!(path, "algorithm.epsilon"),
            other => panic!("{other:?}"),
        }
        let missing = QUAD.replace("\"epsilon\": 0.01", "\"dist_sq\": 1");
        assert!(ExperimentConfig::from_json(&missing).is_err());
    }

    #[test]
    fn algorithm_must_match_problem_kind() {
        let bad = QUAD.replace("\"catalyst_sgd\", \"epsilon\": 0.01", "\"reg\", \"steps\": 10");
        match ExperimentConfig::from_json(&bad) {
            Err(BenchError::Config { path, .. }) => assert_eq!(path, "algorithm.name"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn saddle_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"problem": {"kind": "saddle", "dx": 2, "dy": 3, "L": 10, "mu_p": 0, "mu_d": 1},
                "algorithm": {"name": "r_catalyst_minimax_det", "epochs": 3}}"#,
        )
        .unwrap();
        assert_eq!(cfg.seeds, 1);
        match cfg.problem {
            ProblemSpec::Saddle { scale, sigma, .. } => assert_eq!((scale, sigma), (1.0, 0.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn tag_errors_name_the_tag_field() {
        for (from, to, path) in [
            ("\"catalyst_sgd\"", "\"nope\"", "algorithm.name"),
            ("\"kind\": \"quadratic\",", "", "problem.kind"),
            ("\"kind\": \"quadratic\"", "\"kind\": 3", "problem.kind"),
        ] {
            match ExperimentConfig::from_json(&QUAD.replace(from, to)) {
                Err(BenchError::Config { path: p, .. }) => assert_eq!(p, path),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn emitted_json_uses_tag_fields() {
        let text = ExperimentConfig::from_json(QUAD).unwrap().to_json();
        assert!(text.contains("\"kind\": \"quadratic\""));
        assert!(text.contains("\"name\": \"catalyst_sgd\""));
    }
}
