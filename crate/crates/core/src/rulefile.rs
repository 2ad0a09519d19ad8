//! JSON serialization of verified rules.

use serde::{Deserialize, Serialize};

use crate::cubature::{exactness_check, CubatureRule, ExactnessReport};
use crate::error::{Error, Result};
use crate::nodes::{Family, NodeSet};
use crate::weights::WeightSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// A cubature rule together with the oracle report produced when it was
/// written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFile {
    pub schema_version: u32,
    pub weight: WeightSpec,
    pub degree: usize,
    pub n: usize,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub variant: String,
    pub nodes: Vec<[f64; 2]>,
    pub lambdas: Vec<f64>,
    pub provenance: String,
    pub oracle_report: ExactnessReport,
}

impl RuleFile {
    /// Runs the oracle on `rule` and records the outcome.
    pub fn from_rule(rule: &CubatureRule) -> Result<Self> {
        let report = exactness_check(rule)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            weight: rule.weight,
            degree: rule.degree,
            n: rule.nodes.n,
            family: rule.nodes.family,
            alpha: rule.nodes.alpha,
            beta: rule.nodes.beta,
            variant: rule.nodes.variant.clone(),
            nodes: rule.nodes.points.clone(),
            lambdas: rule.lambdas.clone(),
            provenance: rule.provenance.clone(),
            oracle_report: report,
        })
    }

    pub fn to_rule(&self) -> CubatureRule {
        CubatureRule {
            weight: self.weight,
            degree: self.degree,
            nodes: NodeSet {
                family: self.family,
                n: self.n,
                expected_count: self.nodes.len(),
                alpha: self.alpha,
                beta: self.beta,
                variant: self.variant.clone(),
                points: self.nodes.clone(),
            },
            lambdas: self.lambdas.clone(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if f.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                f.schema_version
            )));
        }
        if f.nodes.len() != f.lambdas.len() {
            return Err(Error::Parse(format!(
                "{} nodes but {} weights",
                f.nodes.len(),
                f.lambdas.len()
            )));
        }
        Ok(f)
    }

    /// Re-runs the oracle on the stored nodes and weights.
    pub fn verify(&self) -> Result<ExactnessReport> {
        exactness_check(&self.to_rule())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubature::RuleFamily;

    #[test]
    fn round_trip_is_exact() {
        let rule = RuleFamily::GaussU { n: 4 }.build().unwrap();
        let f = RuleFile::from_rule(&rule).unwrap();
        let back = RuleFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(back.verify().unwrap().pass);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let rule = RuleFamily::GaussU { n: 3 }.build().unwrap();
        let mut f = RuleFile::from_rule(&rule).unwrap();
        f.lambdas.pop();
        assert!(matches!(RuleFile::from_json(&f.to_json().unwrap()), Err(Error::Parse(_))));
    }
}
