use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Numeral, Symbol, NUMBER_MAX, NUMBER_MIN};

/// Where a system came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSource {
    Builtin,
    Ingested,
    Generated,
}

/// A total mapping from each number in 1..=99 to one numeral form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumeralSystem {
    name: String,
    numerals: BTreeMap<u32, Numeral>,
    source: SystemSource,
}

/// One problem found by `validate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationFailure {
    /// No entry for this number.
    Missing(u32),
    /// Key outside 1..=99.
    OutOfRange(u32),
    /// The form does not evaluate to its key.
    ValueMismatch { number: u32, actual: i64 },
    /// Two numbers share the same surface form.
    DuplicateForm { first: u32, second: u32, form: String },
}

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationFailure::Missing(n) => write!(f, "missing entry for {n}"),
            ValidationFailure::OutOfRange(n) => write!(f, "key {n} is outside 1..=99"),
            ValidationFailure::ValueMismatch { number, actual } => {
                write!(f, "form for {number} evaluates to {actual}")
            }
            ValidationFailure::DuplicateForm {
                first,
                second,
                form,
            } => write!(f, "{first} and {second} share the form {form}"),
        }
    }
}

/// Outcome of validating a system. Collects every failure instead of
/// stopping at the first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "valid");
        }
        for (i, failure) in self.failures.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{failure}")?;
        }
        Ok(())
    }
}

/// Surface statistics of a system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemStats {
    /// Unique atom morphemes across all numerals.
    pub lexicon_size_atoms: usize,
    /// Unique morphemes including combinators.
    pub lexicon_size_all: usize,
    /// Mean morphosyntactic length over 1..=99.
    pub avg_complexity: f64,
}

impl NumeralSystem {
    pub fn new(
        name: impl Into<String>,
        numerals: BTreeMap<u32, Numeral>,
        source: SystemSource,
    ) -> Self {
        NumeralSystem {
            name: name.into(),
            numerals,
            source,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn source(&self) -> SystemSource {
        self.source
    }

    pub fn numerals(&self) -> &BTreeMap<u32, Numeral> {
        &self.numerals
    }

    pub fn numeral(&self, n: u32) -> Option<&Numeral> {
        self.numerals.get(&n)
    }

    /// All morphemes used anywhere in the system, in canonical order.
    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.numerals
            .values()
            .flat_map(|n| n.symbols().iter().copied())
            .collect()
    }

    /// Checks totality over 1..=99, exactness of every form's value, and
    /// absence of duplicate surface forms. Returns every failure found.
    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        for n in NUMBER_MIN..=NUMBER_MAX {
            if !self.numerals.contains_key(&n) {
                failures.push(ValidationFailure::Missing(n));
            }
        }
        let mut seen: BTreeMap<&Numeral, u32> = BTreeMap::new();
        for (&n, numeral) in &self.numerals {
            if !(NUMBER_MIN..=NUMBER_MAX).contains(&n) {
                failures.push(ValidationFailure::OutOfRange(n));
            }
            let actual = numeral.evaluate();
            if actual != i64::from(n) {
                failures.push(ValidationFailure::ValueMismatch { number: n, actual });
            }
            if let Some(&first) = seen.get(numeral) {
                failures.push(ValidationFailure::DuplicateForm {
                    first,
                    second: n,
                    form: numeral.to_string(),
                });
            } else {
                seen.insert(numeral, n);
            }
        }
        ValidationReport { failures }
    }

    /// Lexicon sizes and mean numeral length. Meaningful for validated
    /// systems; averages over however many entries are present.
    pub fn stats(&self) -> SystemStats {
        let alphabet = self.alphabet();
        let atoms = alphabet.iter().filter(|s| s.is_atom()).count();
        let total_len: usize = self.numerals.values().map(Numeral::len).sum();
        let count = self.numerals.len().max(1);
        SystemStats {
            lexicon_size_atoms: atoms,
            lexicon_size_all: alphabet.len(),
            avg_complexity: total_len as f64 / count as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeral::{builtin_system, tokenize, BuiltinName};

    fn system_from(entries: &[(u32, &str)]) -> NumeralSystem {
        let numerals = entries
            .iter()
            .map(|&(n, text)| (n, tokenize(text).unwrap()))
            .collect();
        NumeralSystem::new("test", numerals, SystemSource::Ingested)
    }

    #[test]
    fn mandarin_validates_cleanly() {
        let report = builtin_system(BuiltinName::Mandarin).validate();
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn value_mismatch_is_reported() {
        let mut sys = builtin_system(BuiltinName::Mandarin);
        let mut numerals = sys.numerals().clone();
        numerals.insert(24, tokenize("2*10+3").unwrap());
        sys = NumeralSystem::new("broken", numerals, SystemSource::Ingested);
        let report = sys.validate();
        assert!(report.failures.contains(&ValidationFailure::ValueMismatch {
            number: 24,
            actual: 23
        }));
        // 23 and 24 now share a surface form.
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, ValidationFailure::DuplicateForm { form, .. } if form == "2*10+3")));
    }

    #[test]
    fn duplicate_forms_are_reported() {
        let sys = system_from(&[(21, "2*10+1"), (22, "2*10+1")]);
        let report = sys.validate();
        assert!(report.failures.contains(&ValidationFailure::DuplicateForm {
            first: 21,
            second: 22,
            form: "2*10+1".into()
        }));
    }

    #[test]
    fn missing_and_out_of_range_keys_are_reported() {
        let sys = system_from(&[(1, "1"), (100, "10*10")]);
        let report = sys.validate();
        assert!(report.failures.contains(&ValidationFailure::Missing(2)));
        assert!(report.failures.contains(&ValidationFailure::OutOfRange(100)));
        assert!(!report.failures.contains(&ValidationFailure::Missing(1)));
    }

    #[test]
    fn mandarin_lexicon_sizes() {
        let stats = builtin_system(BuiltinName::Mandarin).stats();
        assert_eq!(stats.lexicon_size_atoms, 10); // 1..9 and 10
        assert_eq!(stats.lexicon_size_all, 12); // plus + and *
    }

    #[test]
    fn mandarin_avg_complexity_matches_direct_summation() {
        let sys = builtin_system(BuiltinName::Mandarin);
        // Independent route: re-parse each rendered form and count characters
        // worth of morphemes by splitting on combinators.
        let mut total = 0usize;
        for numeral in sys.numerals().values() {
            let text = numeral.to_string();
            let combinators = text.chars().filter(|c| "+-*".contains(*c)).count();
            total += 2 * combinators + 1;
        }
        let expected = total as f64 / 99.0;
        assert!((sys.stats().avg_complexity - expected).abs() < 1e-12);
        assert!((sys.stats().avg_complexity - 421.0 / 99.0).abs() < 1e-12);
    }

    #[test]
    fn all_single_atoms_has_unit_complexity() {
        let numerals: BTreeMap<u32, Numeral> = (1..=99)
            .map(|n| (n, tokenize(&n.to_string()).unwrap()))
            .collect();
        let sys = NumeralSystem::new("atoms", numerals, SystemSource::Generated);
        assert!(sys.validate().is_valid());
        let stats = sys.stats();
        assert_eq!(stats.lexicon_size_atoms, 99);
        assert_eq!(stats.lexicon_size_all, 99);
        assert!((stats.avg_complexity - 1.0).abs() < 1e-15);
    }
}
