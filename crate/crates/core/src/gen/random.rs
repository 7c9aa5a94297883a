//! Random baseline systems: unattested but valid numeral systems drawn from
//! the same raw material as attested ones.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use super::{canonical_numeral, enumerate_alternatives, Combinator, LexiconSpec};
use crate::numeral::{Numeral, NumeralSystem, SystemSource, NUMBER_MAX, NUMBER_MIN};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("lexicon cannot express {0}")]
    Inexpressible(u32),
    #[error("no valid lexicon found after {0} attempts")]
    LexiconSearchExhausted(usize),
}

/// Draws one system: for every `n`, a uniform pick among all well-formed
/// expressions no longer than the canonical greedy form for `n`. The same
/// `(lexicon, seed)` pair always yields the same system.
pub fn generate_random_system(lexicon: &LexiconSpec, seed: u64) -> Result<NumeralSystem, GenError> {
    let mut rng = seed::rng(seed);
    let mut numerals: BTreeMap<u32, Numeral> = BTreeMap::new();
    for n in NUMBER_MIN..=NUMBER_MAX {
        let cap = canonical_numeral(n, lexicon)
            .ok_or(GenError::Inexpressible(n))?
            .len();
        let mut pool: Vec<Numeral> = Vec::new();
        let mut len = 1;
        while len <= cap {
            pool.extend(enumerate_alternatives(n, len, lexicon));
            len += 2;
        }
        // The canonical form itself is in the pool, so it cannot be empty.
        let pick = rng.random_range(0..pool.len());
        numerals.insert(n, pool.swap_remove(pick));
    }
    let system = NumeralSystem::new(format!("random_{seed}"), numerals, SystemSource::Generated);
    debug_assert!(system.validate().is_valid());
    Ok(system)
}

/// Samples a lexicon of the kinds seen across human systems: a base with its
/// digit range, optionally a squared or doubled base, optionally an
/// alternating near-base. Retries until every number in 1..=99 is
/// expressible.
pub fn sample_lexicon(rng: &mut impl Rng) -> Result<LexiconSpec, GenError> {
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let base = rng.random_range(4..=12u32);
        let mut multipliers = vec![base];
        // A second tier is required when digits cannot cover 99 / base.
        if (99 / base) >= base {
            multipliers.push(base * base);
        }
        match rng.random_range(0..4u32) {
            0 if base >= 6 => multipliers.push(base - 1),
            1 if base * 2 <= 99 && !multipliers.contains(&(base * 2)) => {
                multipliers.push(base * 2)
            }
            _ => {}
        }
        multipliers.retain(|&m| m <= 99);
        let lexicon = LexiconSpec::new(
            1..base,
            multipliers,
            &[Combinator::Plus, Combinator::Times],
        );
        let expressible =
            (NUMBER_MIN..=NUMBER_MAX).all(|n| canonical_numeral(n, &lexicon).is_some());
        if expressible {
            return Ok(lexicon);
        }
    }
    Err(GenError::LexiconSearchExhausted(ATTEMPTS))
}

/// The random comparison population: `count` systems with independently
/// sampled lexicons, all derived from one master seed.
pub fn random_population(
    count: usize,
    master_seed: u64,
) -> Result<Vec<(LexiconSpec, NumeralSystem)>, GenError> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let lex_seed = seed::derive(master_seed, &[seed::tag("lexicon"), i as u64]);
        let sys_seed = seed::derive(master_seed, &[seed::tag("system"), i as u64]);
        let lexicon = sample_lexicon(&mut seed::rng(lex_seed))?;
        let mut system = generate_random_system(&lexicon, sys_seed)?;
        system.set_name(format!("random_{i:03}"));
        out.push((lexicon, system));
    }
    Ok(out)
}
