//! Generation of comparison numeral systems.
//!
//! Expressions here are additive sequences of *terms*, where a term is a
//! bare atom or a `digit*multiplier` product. The shape constraints mirror
//! attested numeral morphology:
//!
//! * products multiply a digit (left) by a multiplier (right), never two
//!   digits or two multipliers;
//! * at most one term is a bare digit (a "unit"), and it sits at the end —
//!   or first when exactly one other term follows, the one-and-twenty order;
//! * no term is repeated (bases combine, they never stutter).
//!
//! Bare multiplier terms are unrestricted in number and position, which is
//! what lets a vigesimal system say `20+10+1` and place `10` before or after
//! `4*20` when rebuilding 91.

mod neighbourhood;
mod random;

pub use neighbourhood::{build_neighbourhood, greedy_extremes, Direction, Neighbourhood};
pub use random::{generate_random_system, random_population, sample_lexicon, GenError};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::numeral::{Numeral, NumeralSystem, Symbol};

/// Arithmetic combinators a lexicon may offer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combinator {
    Plus,
    Minus,
    Times,
}

impl Combinator {
    pub fn symbol(self) -> Symbol {
        match self {
            Combinator::Plus => Symbol::Plus,
            Combinator::Minus => Symbol::Minus,
            Combinator::Times => Symbol::Times,
        }
    }
}

/// The raw material of a system: digit values, multiplier values and the
/// available combinators. A value may be both digit and multiplier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconSpec {
    pub digits: BTreeSet<u32>,
    pub multipliers: BTreeSet<u32>,
    pub combinators: BTreeSet<Combinator>,
}

impl LexiconSpec {
    pub fn new<D, M>(digits: D, multipliers: M, combinators: &[Combinator]) -> Self
    where
        D: IntoIterator<Item = u32>,
        M: IntoIterator<Item = u32>,
    {
        LexiconSpec {
            digits: digits.into_iter().collect(),
            multipliers: multipliers.into_iter().collect(),
            combinators: combinators.iter().copied().collect(),
        }
    }

    /// Digits 1..=9 with the given multipliers and `+`, `*` — the shape of
    /// every decimal-or-vigesimal system handled here.
    pub fn decimal_style<M: IntoIterator<Item = u32>>(multipliers: M) -> Self {
        LexiconSpec::new(1..=9, multipliers, &[Combinator::Plus, Combinator::Times])
    }

    /// Every value usable as an atom.
    pub fn atoms(&self) -> BTreeSet<u32> {
        self.digits.union(&self.multipliers).copied().collect()
    }

    pub fn size_atoms(&self) -> usize {
        self.atoms().len()
    }

    fn has(&self, c: Combinator) -> bool {
        self.combinators.contains(&c)
    }

    /// A bare atom that can only be a digit; these are the position-
    /// restricted unit terms.
    fn is_unit_value(&self, value: u32) -> bool {
        self.digits.contains(&value) && !self.multipliers.contains(&value)
    }

    /// Recovers a lexicon from a system's surface forms: atoms left of `*`
    /// are digits, atoms right of `*` are multipliers, and bare atoms split
    /// by magnitude (units below 10, bases from 10 up).
    pub fn infer(system: &NumeralSystem) -> Self {
        let mut digits = BTreeSet::new();
        let mut multipliers = BTreeSet::new();
        let mut combinators = BTreeSet::new();
        for numeral in system.numerals().values() {
            for term in terms_of(numeral) {
                match term {
                    Term::Product { digit, multiplier } => {
                        digits.insert(digit);
                        multipliers.insert(multiplier);
                    }
                    Term::Atom(v) if v >= 10 => {
                        multipliers.insert(v);
                    }
                    Term::Atom(v) => {
                        digits.insert(v);
                    }
                }
            }
            for sym in numeral.symbols() {
                match sym {
                    Symbol::Plus => {
                        combinators.insert(Combinator::Plus);
                    }
                    Symbol::Minus => {
                        combinators.insert(Combinator::Minus);
                    }
                    Symbol::Times => {
                        combinators.insert(Combinator::Times);
                    }
                    Symbol::Atom(_) => {}
                }
            }
        }
        LexiconSpec {
            digits,
            multipliers,
            combinators,
        }
    }
}

/// One additive term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Term {
    Atom(u32),
    Product { digit: u32, multiplier: u32 },
}

impl Term {
    fn value(self) -> i64 {
        match self {
            Term::Atom(v) => i64::from(v),
            Term::Product { digit, multiplier } => i64::from(digit) * i64::from(multiplier),
        }
    }

    fn symbol_len(self) -> usize {
        match self {
            Term::Atom(_) => 1,
            Term::Product { .. } => 3,
        }
    }

    fn push_symbols(self, out: &mut Vec<Symbol>) {
        match self {
            Term::Atom(v) => out.push(Symbol::Atom(v)),
            Term::Product { digit, multiplier } => {
                out.push(Symbol::Atom(digit));
                out.push(Symbol::Times);
                out.push(Symbol::Atom(multiplier));
            }
        }
    }
}

/// Splits a numeral into its additive terms. Only used on forms whose
/// multiplicative runs are single `digit*multiplier` pairs, which holds for
/// everything this module builds or ingests.
fn terms_of(numeral: &Numeral) -> Vec<Term> {
    let mut terms = Vec::new();
    let symbols = numeral.symbols();
    let mut i = 0;
    while i < symbols.len() {
        let Symbol::Atom(first) = symbols[i] else {
            unreachable!("well-formed numerals start terms with atoms")
        };
        if i + 2 < symbols.len() && symbols[i + 1] == Symbol::Times {
            let Symbol::Atom(second) = symbols[i + 2] else {
                unreachable!()
            };
            terms.push(Term::Product {
                digit: first,
                multiplier: second,
            });
            i += 4; // skip the following additive combinator, if any
        } else {
            terms.push(Term::Atom(first));
            i += 2;
        }
    }
    terms
}

/// All well-formed expressions of exactly `length` symbols over the lexicon
/// that evaluate to `n`. Term order matters: distinct orders are distinct
/// members. The empty set is a valid result.
pub fn enumerate_alternatives(n: u32, length: usize, lexicon: &LexiconSpec) -> BTreeSet<Numeral> {
    if length == 0 || length % 2 == 0 {
        return BTreeSet::new();
    }
    let mut terms: Vec<Term> = lexicon.atoms().into_iter().map(Term::Atom).collect();
    if lexicon.has(Combinator::Times) {
        for &digit in &lexicon.digits {
            for &multiplier in &lexicon.multipliers {
                terms.push(Term::Product { digit, multiplier });
            }
        }
    }
    let mut ops = Vec::new();
    if lexicon.has(Combinator::Plus) {
        ops.push(Symbol::Plus);
    }
    if lexicon.has(Combinator::Minus) {
        ops.push(Symbol::Minus);
    }

    let mut search = Search {
        target: i64::from(n),
        terms,
        ops,
        can_overshoot: lexicon.has(Combinator::Minus),
        lexicon,
        seq: Vec::with_capacity(length),
        used: Vec::new(),
        out: BTreeSet::new(),
    };
    search.step(length, 0, false, false);
    search.out
}

struct Search<'a> {
    target: i64,
    terms: Vec<Term>,
    ops: Vec<Symbol>,
    can_overshoot: bool,
    lexicon: &'a LexiconSpec,
    seq: Vec<Symbol>,
    used: Vec<Term>,
    out: BTreeSet<Numeral>,
}

impl Search<'_> {
    /// Depth-first construction over (operator, term) choices.
    /// `unit_first_open` means a leading unit demands that the next term
    /// close the expression.
    fn step(&mut self, remaining: usize, value: i64, unit_used: bool, unit_first_open: bool) {
        let first = self.seq.is_empty();
        for ti in 0..self.terms.len() {
            let term = self.terms[ti];
            let cost = term.symbol_len() + usize::from(!first);
            if cost > remaining {
                continue;
            }
            let after = remaining - cost;
            if after % 2 != 0 {
                continue; // leftover cannot be filled by (op, term) pairs
            }
            if unit_first_open && after != 0 {
                continue;
            }
            if self.used.contains(&term) {
                continue;
            }
            let is_unit = matches!(term, Term::Atom(v) if self.lexicon.is_unit_value(v));
            let mut opens_unit_first = false;
            if is_unit {
                if unit_used {
                    continue;
                }
                if after != 0 {
                    if !first {
                        continue; // units go last...
                    }
                    opens_unit_first = true; // ...or first with one term to come
                }
            }
            let op_count = if first { 1 } else { self.ops.len() };
            for oi in 0..op_count {
                let op = if first { None } else { Some(self.ops[oi]) };
                let signed = match op {
                    None | Some(Symbol::Plus) => term.value(),
                    Some(Symbol::Minus) => -term.value(),
                    Some(_) => unreachable!(),
                };
                let next_value = value + signed;
                if !self.can_overshoot && next_value > self.target {
                    continue;
                }
                let mark = self.seq.len();
                if let Some(op) = op {
                    self.seq.push(op);
                }
                term.push_symbols(&mut self.seq);
                self.used.push(term);
                if after == 0 {
                    if next_value == self.target {
                        let numeral = Numeral::new(self.seq.clone())
                            .expect("constructed sequences alternate correctly");
                        self.out.insert(numeral);
                    }
                } else {
                    self.step(after, next_value, unit_used || is_unit, opens_unit_first);
                }
                self.used.pop();
                self.seq.truncate(mark);
            }
        }
    }
}

/// The canonical greedy expression: peel off the largest multiplier that
/// admits a usable digit factor, then recurse on the remainder. `None` when
/// the lexicon cannot express `n` this way.
pub fn canonical_numeral(n: u32, lexicon: &LexiconSpec) -> Option<Numeral> {
    let terms = canonical_terms(n, lexicon)?;
    let mut symbols = Vec::new();
    for (i, term) in terms.iter().enumerate() {
        if i > 0 {
            symbols.push(Symbol::Plus);
        }
        term.push_symbols(&mut symbols);
    }
    Some(Numeral::new(symbols).expect("canonical sequences alternate correctly"))
}

fn canonical_terms(n: u32, lexicon: &LexiconSpec) -> Option<Vec<Term>> {
    canonical_terms_below(n, lexicon, u32::MAX)
}

/// Place-value decomposition: each recursion level consumes one multiplier
/// and passes strictly smaller ones down, so no term can repeat.
fn canonical_terms_below(n: u32, lexicon: &LexiconSpec, bound: u32) -> Option<Vec<Term>> {
    if lexicon.atoms().contains(&n) {
        return Some(vec![Term::Atom(n)]);
    }
    if !lexicon.has(Combinator::Plus) {
        return None;
    }
    for &m in lexicon.multipliers.iter().rev() {
        if m > n || m >= bound {
            continue;
        }
        let quotient = n / m;
        let d = if quotient == 1 || !lexicon.has(Combinator::Times) {
            1
        } else if lexicon.digits.contains(&quotient) {
            quotient
        } else {
            // Largest usable factor below the true quotient.
            lexicon
                .digits
                .range(2..=quotient)
                .next_back()
                .copied()
                .unwrap_or(1)
        };
        let term = if d == 1 {
            Term::Atom(m)
        } else {
            Term::Product {
                digit: d,
                multiplier: m,
            }
        };
        let rest = n - d * m;
        if rest == 0 {
            return Some(vec![term]);
        }
        if let Some(mut tail) = canonical_terms_below(rest, lexicon, m) {
            let mut all = vec![term];
            all.append(&mut tail);
            return Some(all);
        }
    }
    None
}

/// Symbol length of the canonical expression; the complexity cap used when
/// sampling random forms for `n`.
pub fn length_cap(n: u32, lexicon: &LexiconSpec) -> Option<usize> {
    canonical_numeral(n, lexicon).map(|c| c.len())
}
