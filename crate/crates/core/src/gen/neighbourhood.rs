//! Local neighbourhoods: families of systems sharing a base system's
//! lexicon and per-number numeral lengths, differing only in which
//! same-length expression each number uses.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::{enumerate_alternatives, LexiconSpec};
use crate::mdl::irregularity_of_strings;
use crate::numeral::{Numeral, NumeralSystem, SystemSource, Symbol, NUMBER_MAX, NUMBER_MIN};
use crate::seed;

/// Which end of the regularity range the greedy walk aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MostRegular,
    LeastRegular,
}

/// A base system with, per number, every same-length rewrite the lexicon
/// allows, plus a sample of whole-system variants.
#[derive(Debug, Clone)]
pub struct Neighbourhood {
    pub base: NumeralSystem,
    pub lexicon: LexiconSpec,
    /// Sorted candidates per number; always contains the base form.
    pub alternatives: BTreeMap<u32, Vec<Numeral>>,
    /// Greedy extremes first, then any random interior combinations.
    pub variants: Vec<NumeralSystem>,
}

impl Neighbourhood {
    /// Number of distinct systems in the neighbourhood: the product of
    /// per-number choice counts (saturating).
    pub fn size(&self) -> u128 {
        self.alternatives
            .values()
            .map(|alts| alts.len() as u128)
            .fold(1u128, u128::saturating_mul)
    }

    /// True when some number has more than one candidate form.
    pub fn has_variation(&self) -> bool {
        self.alternatives.values().any(|alts| alts.len() > 1)
    }

    /// One variant with an independent uniform pick per number.
    pub fn random_variant(&self, seed: u64, name: &str) -> NumeralSystem {
        let mut rng = seed::rng(seed);
        let numerals: BTreeMap<u32, Numeral> = self
            .alternatives
            .iter()
            .map(|(&n, alts)| (n, alts[rng.random_range(0..alts.len())].clone()))
            .collect();
        NumeralSystem::new(name, numerals, SystemSource::Generated)
    }
}

/// Builds the neighbourhood of `base`: enumerates per-number alternatives
/// over the base's inferred lexicon, then populates variants with both
/// greedy extremes and `interiors` random combinations.
pub fn build_neighbourhood(base: &NumeralSystem, seed: u64, interiors: usize) -> Neighbourhood {
    let lexicon = LexiconSpec::infer(base);
    let mut alternatives: BTreeMap<u32, Vec<Numeral>> = BTreeMap::new();
    for (&n, numeral) in base.numerals() {
        let mut set = enumerate_alternatives(n, numeral.len(), &lexicon);
        set.insert(numeral.clone());
        alternatives.insert(n, set.into_iter().collect());
    }
    let mut neighbourhood = Neighbourhood {
        base: base.clone(),
        lexicon,
        alternatives,
        variants: Vec::new(),
    };
    let most = greedy_extremes(&neighbourhood, Direction::MostRegular);
    let least = greedy_extremes(&neighbourhood, Direction::LeastRegular);
    neighbourhood.variants.push(most);
    neighbourhood.variants.push(least);
    for i in 0..interiors {
        let variant_seed = seed::derive(seed, &[seed::tag("interior"), i as u64]);
        let name = format!("{}_var{i}", base.name());
        neighbourhood
            .variants
            .push(neighbourhood.random_variant(variant_seed, &name));
    }
    neighbourhood
}

/// Walks 1..=99 in order, at each step choosing the candidate that
/// minimizes (or maximizes) the description length of the partial system
/// built so far. Ties go to the lexicographically smallest candidate.
pub fn greedy_extremes(neighbourhood: &Neighbourhood, direction: Direction) -> NumeralSystem {
    let mut chosen_strings: BTreeSet<Vec<Symbol>> = BTreeSet::new();
    let mut numerals: BTreeMap<u32, Numeral> = BTreeMap::new();
    for n in NUMBER_MIN..=NUMBER_MAX {
        let candidates = &neighbourhood.alternatives[&n];
        let mut best: Option<(&Numeral, f64)> = None;
        for candidate in candidates {
            let mut strings = chosen_strings.clone();
            strings.insert(candidate.symbols().to_vec());
            let bits = irregularity_of_strings(&strings)
                .expect("string set is non-empty")
                .bits;
            let better = match best {
                None => true,
                Some((_, best_bits)) => match direction {
                    Direction::MostRegular => bits < best_bits,
                    Direction::LeastRegular => bits > best_bits,
                },
            };
            if better {
                best = Some((candidate, bits));
            }
        }
        let (pick, _) = best.expect("candidate list always contains the base form");
        chosen_strings.insert(pick.symbols().to_vec());
        numerals.insert(n, pick.clone());
    }
    let suffix = match direction {
        Direction::MostRegular => "most_regular",
        Direction::LeastRegular => "least_regular",
    };
    NumeralSystem::new(
        format!("{}_{suffix}", neighbourhood.base.name()),
        numerals,
        SystemSource::Generated,
    )
}
