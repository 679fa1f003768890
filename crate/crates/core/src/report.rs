//! Named pass/fail records produced by the verification routines.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckItem {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

pub fn all_pass(items: &[CheckItem]) -> bool {
    items.iter().all(|i| i.pass)
}

/// Deliberate corruptions used to show that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Adds q^{-3}y² to f₂ in the double-sum lemma.
    PerturbF2,
    /// Adds t² to the degree-two coefficient of 𝒯_{E,0}.
    PerturbT0,
}

impl std::str::FromStr for Mutation {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "perturb-f2" => Ok(Self::PerturbF2),
            "perturb-t0" => Ok(Self::PerturbT0),
            _ => Err(crate::Error::Parse(s.to_string())),
        }
    }
}
