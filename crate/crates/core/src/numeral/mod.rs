//! Core representation of recursive numerals.
//!
//! A numeral is an alternating sequence of atoms (digits and multipliers,
//! each a single morpheme regardless of how many decimal digits it takes to
//! write) and arithmetic combinators (`+`, `-`, `*`). The compact surface
//! form is ordinary arithmetic notation with maximal-munch digit runs, so
//! `4*20+10+1` is seven morphemes: `[4, *, 20, +, 10, +, 1]`.

mod builtin;
mod system;

pub use builtin::{builtin_names, builtin_system, BuiltinName};
pub use system::{
    NumeralSystem, SystemSource, SystemStats, ValidationFailure, ValidationReport,
};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest number a system must express.
pub const NUMBER_MIN: u32 = 1;
/// Largest number a system must express.
pub const NUMBER_MAX: u32 = 99;

/// One morpheme: a number atom or an arithmetic combinator.
///
/// Equality and ordering are by `(kind, value)`, so the atom `10` is the same
/// alphabet letter wherever it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    /// A digit or multiplier morpheme carrying its integer value (>= 1).
    Atom(u32),
    Plus,
    Minus,
    Times,
}

impl Symbol {
    pub fn is_atom(&self) -> bool {
        matches!(self, Symbol::Atom(_))
    }

    pub fn is_combinator(&self) -> bool {
        !self.is_atom()
    }

    pub fn atom_value(&self) -> Option<u32> {
        match self {
            Symbol::Atom(v) => Some(*v),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Atom(v) => write!(f, "{v}"),
            Symbol::Plus => write!(f, "+"),
            Symbol::Minus => write!(f, "-"),
            Symbol::Times => write!(f, "*"),
        }
    }
}

/// Error raised when a symbol sequence is not a well-formed numeral.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumeralError {
    #[error("numeral is empty")]
    Empty,
    #[error("numeral has an atom with value zero")]
    ZeroAtom,
    #[error("expected an atom at position {0}")]
    ExpectedAtom(usize),
    #[error("expected a combinator at position {0}")]
    ExpectedCombinator(usize),
    #[error("numeral ends with a combinator")]
    TrailingCombinator,
    #[error("invalid character {0:?} in numeral text")]
    InvalidChar(char),
}

/// A numeral form: a non-empty, well-formed alternation of atoms and
/// combinators. Its length counts every morpheme including combinators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Numeral {
    symbols: Vec<Symbol>,
}

impl Numeral {
    /// Builds a numeral from raw symbols, checking well-formedness:
    /// odd positions hold atoms, even positions hold combinators, and every
    /// atom value is at least 1.
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, NumeralError> {
        if symbols.is_empty() {
            return Err(NumeralError::Empty);
        }
        for (i, sym) in symbols.iter().enumerate() {
            if i % 2 == 0 {
                match sym {
                    Symbol::Atom(0) => return Err(NumeralError::ZeroAtom),
                    Symbol::Atom(_) => {}
                    _ => return Err(NumeralError::ExpectedAtom(i)),
                }
            } else if sym.is_atom() {
                return Err(NumeralError::ExpectedCombinator(i));
            }
        }
        if symbols.len() % 2 == 0 {
            return Err(NumeralError::TrailingCombinator);
        }
        Ok(Numeral { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Morphosyntactic length: the number of symbols, combinators included.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: non-empty
    }

    /// Atoms in surface order.
    pub fn atoms(&self) -> impl Iterator<Item = u32> + '_ {
        self.symbols.iter().filter_map(Symbol::atom_value)
    }

    /// Arithmetic value with `*` binding tighter than `+`/`-`, which apply
    /// left to right. Single pass: multiplicative runs are folded into a
    /// pending term, which the next additive operator commits.
    pub fn evaluate(&self) -> i64 {
        let mut total: i64 = 0;
        let mut term: i64 = 0;
        let mut term_sign: i64 = 1;
        let mut pending_mul = false;
        for sym in &self.symbols {
            match sym {
                Symbol::Atom(v) => {
                    if pending_mul {
                        term *= i64::from(*v);
                        pending_mul = false;
                    } else {
                        term = i64::from(*v);
                    }
                }
                Symbol::Times => pending_mul = true,
                Symbol::Plus => {
                    total += term_sign * term;
                    term_sign = 1;
                }
                Symbol::Minus => {
                    total += term_sign * term;
                    term_sign = -1;
                }
            }
        }
        total + term_sign * term
    }
}

impl fmt::Display for Numeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for sym in &self.symbols {
            write!(f, "{sym}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Numeral {
    type Err = NumeralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        tokenize(s)
    }
}

/// Parses compact arithmetic notation into a numeral. Maximal-munch digit
/// runs form one atom, so `"10"` is a single morpheme.
pub fn tokenize(text: &str) -> Result<Numeral, NumeralError> {
    let mut symbols = Vec::new();
    let mut digits = String::new();
    for ch in text.chars() {
        match ch {
            '0'..='9' => digits.push(ch),
            '+' | '-' | '*' => {
                flush_atom(&mut digits, &mut symbols)?;
                symbols.push(match ch {
                    '+' => Symbol::Plus,
                    '-' => Symbol::Minus,
                    _ => Symbol::Times,
                });
            }
            other => return Err(NumeralError::InvalidChar(other)),
        }
    }
    flush_atom(&mut digits, &mut symbols)?;
    Numeral::new(symbols)
}

fn flush_atom(digits: &mut String, symbols: &mut Vec<Symbol>) -> Result<(), NumeralError> {
    if digits.is_empty() {
        return Ok(());
    }
    // Digit runs are bounded by the numeral charset, so parsing only fails
    // on overflow; treat that like any other malformed atom.
    let value: u32 = digits
        .parse()
        .map_err(|_| NumeralError::InvalidChar(digits.chars().next().unwrap()))?;
    digits.clear();
    if value == 0 {
        return Err(NumeralError::ZeroAtom);
    }
    symbols.push(Symbol::Atom(value));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms_and_ops(text: &str) -> Vec<Symbol> {
        tokenize(text).unwrap().symbols().to_vec()
    }

    #[test]
    fn tokenize_basque_ninety_one() {
        let n = tokenize("4*20+10+1").unwrap();
        assert_eq!(n.len(), 7);
        assert_eq!(
            n.symbols(),
            &[
                Symbol::Atom(4),
                Symbol::Times,
                Symbol::Atom(20),
                Symbol::Plus,
                Symbol::Atom(10),
                Symbol::Plus,
                Symbol::Atom(1),
            ]
        );
    }

    #[test]
    fn tokenize_multi_digit_atom_is_single_morpheme() {
        let n = tokenize("10").unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n.symbols(), &[Symbol::Atom(10)]);
    }

    #[test]
    fn tokenize_alternating_base_form() {
        assert_eq!(
            atoms_and_ops("2*9+5"),
            vec![
                Symbol::Atom(2),
                Symbol::Times,
                Symbol::Atom(9),
                Symbol::Plus,
                Symbol::Atom(5),
            ]
        );
    }

    #[test]
    fn tokenize_rejects_malformed_input() {
        assert_eq!(tokenize(""), Err(NumeralError::Empty));
        assert_eq!(tokenize("2++3"), Err(NumeralError::ExpectedAtom(2)));
        assert_eq!(tokenize("+2"), Err(NumeralError::ExpectedAtom(0)));
        assert_eq!(tokenize("2+"), Err(NumeralError::TrailingCombinator));
        assert_eq!(tokenize("0"), Err(NumeralError::ZeroAtom));
        assert_eq!(tokenize("2*0"), Err(NumeralError::ZeroAtom));
        assert_eq!(tokenize("2 + 3"), Err(NumeralError::InvalidChar(' ')));
        assert_eq!(tokenize("2x3"), Err(NumeralError::InvalidChar('x')));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(tokenize("2*10+3").unwrap().evaluate(), 23);
        assert_eq!(tokenize("7").unwrap().evaluate(), 7);
        assert_eq!(tokenize("4*20+10+1").unwrap().evaluate(), 91);
        assert_eq!(tokenize("20-1").unwrap().evaluate(), 19);
        assert_eq!(tokenize("2*10-1").unwrap().evaluate(), 19);
        assert_eq!(tokenize("1-2*10").unwrap().evaluate(), -19);
    }

    #[test]
    fn display_round_trips() {
        for text in ["4*20+10+1", "10", "2*9+5", "20-1", "99"] {
            let n = tokenize(text).unwrap();
            assert_eq!(n.to_string(), text);
            assert_eq!(tokenize(&n.to_string()).unwrap(), n);
        }
    }

    #[test]
    fn numeral_new_checks_alternation() {
        assert!(Numeral::new(vec![Symbol::Atom(3)]).is_ok());
        assert_eq!(Numeral::new(vec![]), Err(NumeralError::Empty));
        assert_eq!(
            Numeral::new(vec![Symbol::Atom(3), Symbol::Atom(4)]),
            Err(NumeralError::ExpectedCombinator(1))
        );
        assert_eq!(
            Numeral::new(vec![Symbol::Plus]),
            Err(NumeralError::ExpectedAtom(0))
        );
        assert_eq!(
            Numeral::new(vec![Symbol::Atom(3), Symbol::Plus]),
            Err(NumeralError::TrailingCombinator)
        );
    }

    /// Shunting-yard evaluator used as an independent oracle for `evaluate`.
    fn shunting_yard_eval(symbols: &[Symbol]) -> i64 {
        fn apply(values: &mut Vec<i64>, op: Symbol) {
            let b = values.pop().unwrap();
            let a = values.pop().unwrap();
            values.push(match op {
                Symbol::Plus => a + b,
                Symbol::Minus => a - b,
                Symbol::Times => a * b,
                Symbol::Atom(_) => unreachable!(),
            });
        }
        fn prec(op: &Symbol) -> u8 {
            match op {
                Symbol::Times => 2,
                _ => 1,
            }
        }
        let mut values: Vec<i64> = Vec::new();
        let mut ops: Vec<Symbol> = Vec::new();
        for sym in symbols {
            match sym {
                Symbol::Atom(v) => values.push(i64::from(*v)),
                op => {
                    while let Some(top) = ops.last() {
                        if prec(top) >= prec(op) {
                            let top = ops.pop().unwrap();
                            apply(&mut values, top);
                        } else {
                            break;
                        }
                    }
                    ops.push(*op);
                }
            }
        }
        while let Some(op) = ops.pop() {
            apply(&mut values, op);
        }
        values.pop().unwrap()
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        fn arb_numeral() -> impl Strategy<Value = Numeral> {
            let atom = (1u32..=99).prop_map(Symbol::Atom);
            let comb = prop_oneof![
                Just(Symbol::Plus),
                Just(Symbol::Minus),
                Just(Symbol::Times)
            ];
            (atom.clone(), proptest::collection::vec((comb, atom), 0..6)).prop_map(
                |(first, rest)| {
                    let mut symbols = vec![first];
                    for (op, a) in rest {
                        symbols.push(op);
                        symbols.push(a);
                    }
                    Numeral::new(symbols).unwrap()
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn evaluate_matches_shunting_yard_oracle(n in arb_numeral()) {
                prop_assert_eq!(n.evaluate(), shunting_yard_eval(n.symbols()));
            }

            #[test]
            fn render_tokenize_round_trip(n in arb_numeral()) {
                prop_assert_eq!(tokenize(&n.to_string()).unwrap(), n);
            }
        }
    }
}
