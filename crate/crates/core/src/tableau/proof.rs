//! Proof traces: the ordered rule applications and clashes of a search.

use std::fmt;

use serde::{Serialize, Serializer};

use super::{ClashWitness, RuleApplication};
use crate::syntax::FuzzyConstraint;

pub(crate) fn ser_constraint<S: Serializer>(c: &FuzzyConstraint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

fn ser_constraints<S: Serializer>(cs: &[FuzzyConstraint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(cs.iter().map(|c| c.to_string()))
}

fn ser_alternatives<S: Serializer>(alts: &[Vec<FuzzyConstraint>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(alts.iter().map(|alt| alt.iter().map(|c| c.to_string()).collect::<Vec<_>>()))
}

/// One rule application. Branch ids are dotted paths: the root branch is
/// `1`, and the alternatives of a nondeterministic rule on branch `b` are
/// `b.1` and `b.2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub branch: String,
    pub rule: String,
    #[serde(serialize_with = "ser_constraints")]
    pub premises: Vec<FuzzyConstraint>,
    /// One list per successor branch.
    #[serde(serialize_with = "ser_alternatives")]
    pub conclusions: Vec<Vec<FuzzyConstraint>>,
}

impl ProofStep {
    pub(crate) fn new(branch: &str, app: &RuleApplication) -> Self {
        ProofStep {
            branch: branch.to_string(),
            rule: app.rule.name(),
            premises: app.premises.clone(),
            conclusions: app.alternatives.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "camelCase")]
pub enum ProofEvent {
    Step(ProofStep),
    Clash { branch: String, witness: ClashWitness },
    /// The branch reached a clash-free completion.
    Complete { branch: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ProofLog {
    pub events: Vec<ProofEvent>,
}

impl ProofLog {
    /// Branches that ended in a clash.
    pub fn closed_branches(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter_map(|e| match e {
                ProofEvent::Clash { branch, .. } => Some(branch.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Branches that reached a clash-free completion.
    pub fn open_branches(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter_map(|e| match e {
                ProofEvent::Complete { branch } => Some(branch.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Leaf branches: those that were never split by a nondeterministic rule.
    pub fn leaf_branches(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for e in &self.events {
            let b = match e {
                ProofEvent::Step(s) => s.branch.as_str(),
                ProofEvent::Clash { branch, .. } | ProofEvent::Complete { branch } => branch.as_str(),
            };
            if !seen.contains(&b) {
                seen.push(b);
            }
        }
        seen.iter()
            .copied()
            .filter(|b| !seen.iter().any(|other| other.len() > b.len() && other.starts_with(b) && other.as_bytes()[b.len()] == b'.'))
            .collect()
    }
}

impl fmt::Display for ProofLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |cs: &[FuzzyConstraint]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        for (i, event) in self.events.iter().enumerate() {
            match event {
                ProofEvent::Step(s) => {
                    let alts: Vec<String> = s.conclusions.iter().map(|alt| join(alt)).collect();
                    writeln!(f, "{:>4}  [{}] ({}) {}  =>  {}", i + 1, s.branch, s.rule, join(&s.premises), alts.join("  |  "))?
                }
                ProofEvent::Clash { branch, witness } => writeln!(f, "{:>4}  [{branch}] clash: {witness}", i + 1)?,
                ProofEvent::Complete { branch } => writeln!(f, "{:>4}  [{branch}] complete, clash-free", i + 1)?,
            }
        }
        Ok(())
    }
}
