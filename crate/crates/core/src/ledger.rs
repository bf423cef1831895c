//! Named positive constants standing in for implicit "≪" constants.
//!
//! Each entry records the exact rational used and the formula it came from,
//! so a report can show where every bound originates.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::wire::WireRational;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerBound {
    pub name: String,
    pub value: WireRational,
    pub provenance: String,
}

impl LedgerBound {
    pub fn new(name: impl Into<String>, value: Rational, provenance: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !value.is_positive() {
            return domain(format!("ledger constant {name} must be positive, got {value}"));
        }
        Ok(LedgerBound {
            name,
            value: WireRational(value),
            provenance: provenance.into(),
        })
    }

    pub fn value(&self) -> &Rational {
        &self.value.0
    }
}

/// Ordered by name so serialisation is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantLedger {
    entries: BTreeMap<String, LedgerBound>,
}

impl ConstantLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a constant, replacing any previous entry of the same name.
    pub fn record(&mut self, name: &str, value: Rational, provenance: &str) -> Result<Rational> {
        let b = LedgerBound::new(name, value.clone(), provenance)?;
        self.entries.insert(name.to_owned(), b);
        Ok(value)
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.entries.get(name).map(LedgerBound::value)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LedgerBound> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge(&mut self, other: &ConstantLedger) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn rejects_non_positive() {
        let mut l = ConstantLedger::new();
        assert!(l.record("c", rat(0, 1), "zero").is_err());
        assert!(l.record("c", rat(-1, 2), "neg").is_err());
        l.record("c", rat(3, 2), "three halves").unwrap();
        assert_eq!(l.get("c"), Some(&rat(3, 2)));
    }
}
