use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::ring::Valuation;

/// Outcome of one congruence check.
///
/// `defect_valuation` is the smallest p-adic valuation among the entries of the
/// difference of both sides (`inf` when the difference vanishes at working precision).
/// A check with `exponent = None` asserts an exact identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongruenceReport {
    pub claim: String,
    pub params: BTreeMap<String, Value>,
    pub modulus: String,
    pub defect_valuation: Valuation,
    pub pass: bool,
    /// Experimental checks never fail a run unless asked to.
    pub soft: bool,
}

impl CongruenceReport {
    pub fn new(claim: &str, p: u64, exponent: Option<i64>, defect: Valuation) -> Self {
        let (modulus, pass) = match exponent {
            Some(e) => (format!("{p}^{e}"), defect.at_least(e)),
            None => ("exact".to_string(), defect == Valuation::Infinite),
        };
        CongruenceReport {
            claim: claim.to_string(),
            params: BTreeMap::new(),
            modulus,
            defect_valuation: defect,
            pass,
            soft: false,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn soft(mut self) -> Self {
        self.soft = true;
        self
    }

    /// A failed check that should change the exit status.
    pub fn is_hard_failure(&self) -> bool {
        !self.pass && !self.soft
    }
}
