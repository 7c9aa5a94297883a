//! Irregularity as minimum description length of a numeral grammar.
//!
//! The grammar of a finite set of numeral strings is the minimal partial DFA
//! accepting exactly that set. Minimality is obtained by merging states with
//! equal right languages, which is exact on acyclic automata. The bit cost of
//! a DFA with transition set `Z`, state set `S` and alphabet `Σ` is
//!
//! ```text
//! |Z| * (2*log2|S| + log2|Σ|) + log2|S| + |S|
//! ```
//!
//! with real-valued logarithms. Partiality matters: there is no trap state,
//! so absent transitions cost nothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeral::{NumeralSystem, Symbol};

/// A partial, deterministic, acyclic finite automaton over morphemes.
///
/// States are dense indices; state 0 is initial. Every stored transition is
/// meaningful (no dead states), and every state lies on a path from the
/// initial state to an accepting one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    /// `transitions[s]` maps each outgoing symbol of state `s` to its target.
    transitions: Vec<BTreeMap<Symbol, usize>>,
    accepting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("cannot build an automaton from an empty string set")]
    EmptyInput,
    #[error("input contains an empty string")]
    EmptyString,
}

impl Dfa {
    pub const INITIAL: usize = 0;

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).sum()
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn transitions_from(&self, state: usize) -> &BTreeMap<Symbol, usize> {
        &self.transitions[state]
    }

    /// Symbols that occur on at least one transition.
    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.transitions
            .iter()
            .flat_map(|t| t.keys().copied())
            .collect()
    }

    pub fn accepts(&self, string: &[Symbol]) -> bool {
        let mut state = Self::INITIAL;
        for sym in string {
            match self.transitions[state].get(sym) {
                Some(&next) => state = next,
                None => return false,
            }
        }
        self.accepting[state]
    }

    /// Enumerates the accepted language. Finite because the automaton is
    /// acyclic.
    pub fn language(&self) -> BTreeSet<Vec<Symbol>> {
        self.suffixes(Self::INITIAL)
    }

    /// The right language of a state: all suffixes leading to acceptance.
    pub fn suffixes(&self, state: usize) -> BTreeSet<Vec<Symbol>> {
        let mut out = BTreeSet::new();
        let mut prefix = Vec::new();
        self.collect_suffixes(state, &mut prefix, &mut out);
        out
    }

    fn collect_suffixes(
        &self,
        state: usize,
        prefix: &mut Vec<Symbol>,
        out: &mut BTreeSet<Vec<Symbol>>,
    ) {
        if self.accepting[state] {
            out.insert(prefix.clone());
        }
        for (&sym, &next) in &self.transitions[state] {
            prefix.push(sym);
            self.collect_suffixes(next, prefix, out);
            prefix.pop();
        }
    }

    /// Checks determinism (by construction), acyclicity, reachability and
    /// co-reachability of every state. Used by tests and by callers that
    /// build automata from untrusted pieces.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.state_count();
        // Acyclicity via DFS with an explicit on-stack marker.
        let mut visiting = vec![false; n];
        let mut done = vec![false; n];
        fn dfs(
            dfa: &Dfa,
            state: usize,
            visiting: &mut [bool],
            done: &mut [bool],
        ) -> Result<(), String> {
            if done[state] {
                return Ok(());
            }
            if visiting[state] {
                return Err(format!("cycle through state {state}"));
            }
            visiting[state] = true;
            for &next in dfa.transitions[state].values() {
                dfs(dfa, next, visiting, done)?;
            }
            visiting[state] = false;
            done[state] = true;
            Ok(())
        }
        dfs(self, Self::INITIAL, &mut visiting, &mut done)?;
        if let Some(unreachable) = done.iter().position(|d| !d) {
            return Err(format!("state {unreachable} is unreachable"));
        }
        // Co-reachability: every state must reach an accepting state.
        for state in 0..n {
            if self.suffixes(state).is_empty() {
                return Err(format!("state {state} cannot reach acceptance"));
            }
        }
        Ok(())
    }
}

/// Builds the prefix-tree acceptor of a non-empty set of non-empty strings.
pub fn build_trie<'a, I>(strings: I) -> Result<Dfa, DfaError>
where
    I: IntoIterator<Item = &'a [Symbol]>,
{
    let mut transitions: Vec<BTreeMap<Symbol, usize>> = vec![BTreeMap::new()];
    let mut accepting = vec![false];
    let mut any = false;
    for string in strings {
        if string.is_empty() {
            return Err(DfaError::EmptyString);
        }
        any = true;
        let mut state = Dfa::INITIAL;
        for &sym in string {
            state = match transitions[state].get(&sym) {
                Some(&next) => next,
                None => {
                    let next = transitions.len();
                    transitions.push(BTreeMap::new());
                    accepting.push(false);
                    transitions[state].insert(sym, next);
                    next
                }
            };
        }
        accepting[state] = true;
    }
    if !any {
        return Err(DfaError::EmptyInput);
    }
    Ok(Dfa {
        transitions,
        accepting,
    })
}

/// Minimizes an acyclic partial DFA by merging states with equal right
/// languages: states are canonicalized bottom-up, with two states mapping to
/// the same class exactly when they agree on acceptance and on the class of
/// every successor. The result is renumbered breadth-first in symbol order,
/// so equal inputs give identical outputs.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let order = postorder(dfa);
    type Signature = (bool, Vec<(Symbol, usize)>);
    let mut register: HashMap<Signature, usize> = HashMap::new();
    let mut class_of = vec![usize::MAX; dfa.state_count()];
    let mut class_sigs: Vec<Signature> = Vec::new();
    for state in order {
        let sig: Signature = (
            dfa.accepting[state],
            dfa.transitions[state]
                .iter()
                .map(|(&sym, &next)| (sym, class_of[next]))
                .collect(),
        );
        let next_class = class_sigs.len();
        let class = *register.entry(sig.clone()).or_insert_with(|| {
            class_sigs.push(sig);
            next_class
        });
        class_of[state] = class;
    }

    // Rebuild from the initial class, renumbering BFS-first.
    let initial_class = class_of[Dfa::INITIAL];
    let mut new_id: BTreeMap<usize, usize> = BTreeMap::new();
    new_id.insert(initial_class, 0);
    let mut queue = std::collections::VecDeque::from([initial_class]);
    let mut transitions: Vec<BTreeMap<Symbol, usize>> = vec![BTreeMap::new()];
    let mut accepting = vec![class_sigs[initial_class].0];
    while let Some(class) = queue.pop_front() {
        let id = new_id[&class];
        for (sym, target_class) in class_sigs[class].1.clone() {
            let target_id = match new_id.get(&target_class) {
                Some(&t) => t,
                None => {
                    let t = transitions.len();
                    transitions.push(BTreeMap::new());
                    accepting.push(class_sigs[target_class].0);
                    new_id.insert(target_class, t);
                    queue.push_back(target_class);
                    t
                }
            };
            transitions[id].insert(sym, target_id);
        }
    }
    Dfa {
        transitions,
        accepting,
    }
}

/// Reverse topological order: every state appears after all its successors.
fn postorder(dfa: &Dfa) -> Vec<usize> {
    let mut order = Vec::with_capacity(dfa.state_count());
    let mut seen = vec![false; dfa.state_count()];
    // Iterative DFS; the second stack element marks the post-visit.
    let mut stack = vec![(Dfa::INITIAL, false)];
    while let Some((state, post)) = stack.pop() {
        if post {
            order.push(state);
            continue;
        }
        if seen[state] {
            continue;
        }
        seen[state] = true;
        stack.push((state, true));
        for &next in dfa.transitions[state].values() {
            if !seen[next] {
                stack.push((next, false));
            }
        }
    }
    order
}

/// Description length of a DFA in bits, together with the counts it was
/// computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrregularityScore {
    pub bits: f64,
    pub state_count: usize,
    pub transition_count: usize,
    pub alphabet_size: usize,
}

impl IrregularityScore {
    /// Evaluates the bit-cost formula on raw counts.
    pub fn from_counts(state_count: usize, transition_count: usize, alphabet_size: usize) -> Self {
        let s = state_count as f64;
        let z = transition_count as f64;
        let sigma = alphabet_size as f64;
        let bits = z * (2.0 * s.log2() + sigma.log2()) + s.log2() + s;
        IrregularityScore {
            bits,
            state_count,
            transition_count,
            alphabet_size,
        }
    }
}

/// Scores a DFA. The alphabet is the set of symbols on its transitions.
pub fn encoding_cost(dfa: &Dfa) -> IrregularityScore {
    IrregularityScore::from_counts(
        dfa.state_count(),
        dfa.transition_count(),
        dfa.alphabet().len(),
    )
}

/// Irregularity of an explicit string set: cost of the minimal partial DFA
/// accepting exactly those strings, scored over the set's own alphabet.
pub fn irregularity_of_strings(strings: &BTreeSet<Vec<Symbol>>) -> Result<IrregularityScore, DfaError> {
    let trie = build_trie(strings.iter().map(Vec::as_slice))?;
    Ok(encoding_cost(&minimize(&trie)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("range {0}..={1} is empty")]
    Empty(u32, u32),
    #[error("system has no numeral for {0}")]
    MissingNumeral(u32),
    #[error("window size {0} is out of 1..=99")]
    BadWindow(usize),
}

/// Irregularity of a system over an inclusive number range.
pub fn irregularity(
    system: &NumeralSystem,
    lo: u32,
    hi: u32,
) -> Result<IrregularityScore, RangeError> {
    if lo > hi {
        return Err(RangeError::Empty(lo, hi));
    }
    let mut strings: BTreeSet<Vec<Symbol>> = BTreeSet::new();
    for n in lo..=hi {
        let numeral = system
            .numeral(n)
            .ok_or(RangeError::MissingNumeral(n))?;
        strings.insert(numeral.symbols().to_vec());
    }
    irregularity_of_strings(&strings).map_err(|_| RangeError::Empty(lo, hi))
}

/// Unweighted mean irregularity over every window of `window` consecutive
/// numbers inside 1..=99 (90 windows at the default size of 10).
pub fn local_irregularity(system: &NumeralSystem, window: usize) -> Result<f64, RangeError> {
    if window == 0 || window > 99 {
        return Err(RangeError::BadWindow(window));
    }
    let window = window as u32;
    let mut total = 0.0;
    let mut count = 0usize;
    for lo in 1..=(99 - window + 1) {
        total += irregularity(system, lo, lo + window - 1)?.bits;
        count += 1;
    }
    Ok(total / count as f64)
}
