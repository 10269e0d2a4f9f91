use std::fmt;
use std::str::FromStr;

use rcalab_core::words::is_unbordered;
use rcalab_core::Word;
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Pipeline stages, in the order they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Words,
    Involution,
    TranslateUniversality,
    CtrlIdentities,
    CommutatorGeneration,
    NormalClosure,
    TwoInvolution,
    Certificates,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Words,
        Check::Involution,
        Check::TranslateUniversality,
        Check::CtrlIdentities,
        Check::CommutatorGeneration,
        Check::NormalClosure,
        Check::TwoInvolution,
        Check::Certificates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Words => "words",
            Check::Involution => "involution",
            Check::TranslateUniversality => "translate-universality",
            Check::CtrlIdentities => "ctrl-identities",
            Check::CommutatorGeneration => "commutator-generation",
            Check::NormalClosure => "normal-closure",
            Check::TwoInvolution => "two-involution",
            Check::Certificates => "certificates",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::ConfigInvalid(format!("unknown check {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub ell: usize,
    pub n: u32,
    pub k: u32,
    /// Replaces the first formula-family word as the control word `w`.
    pub word: Option<Word>,
    pub gates: String,
    pub budget: u64,
    pub seed: u64,
    /// Sorted and deduplicated.
    pub checks: Vec<Check>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ell: 9,
            n: 3,
            k: 2,
            word: None,
            gates: "standard".into(),
            budget: DEFAULT_BUDGET,
            seed: 1,
            checks: Check::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn validate(mut self) -> Result<Self, CliError> {
        let invalid = |m: String| Err(CliError::ConfigInvalid(m));
        if 2 * self.k as usize + 4 >= self.ell {
            return invalid(format!(
                "k = {} violates k < (ℓ - 4)/2 for ℓ = {}",
                self.k, self.ell
            ));
        }
        if self.ell > 12 {
            return invalid(format!("ℓ = {} is above the supported 12", self.ell));
        }
        if !(2..=3).contains(&self.n) {
            return invalid(format!("n = {} must be 2 or 3", self.n));
        }
        if let Some(w) = &self.word {
            if w.len() != self.ell {
                return invalid(format!("word {w} does not have length ℓ = {}", self.ell));
            }
            if !is_unbordered(w) {
                return invalid(format!("word {w} is bordered"));
            }
        }
        if self.checks.is_empty() {
            return invalid("no checks selected".into());
        }
        self.checks.sort();
        self.checks.dedup();
        Ok(self)
    }
}

/// Parses `--checks words,involution`.
pub fn parse_checks(list: &str) -> Result<Vec<Check>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn k_bound_enforced() {
        let c = RunConfig {
            ell: 10,
            k: 3,
            ..RunConfig::default()
        };
        assert!(matches!(c.validate(), Err(CliError::ConfigInvalid(_))));
    }

    #[test]
    fn checks_are_ordered() {
        let checks = parse_checks("certificates, words,words").unwrap();
        let c = RunConfig {
            checks,
            ..RunConfig::default()
        }
        .validate()
        .unwrap();
        assert_eq!(c.checks, vec![Check::Words, Check::Certificates]);
        assert!(parse_checks("nope").is_err());
    }

    #[test]
    fn word_override_checked() {
        let c = RunConfig {
            word: Some("010000010".parse().unwrap()),
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
