//! Regularity and machine learnability of recursive numeral systems.
//!
//! The crate has three layers:
//!
//! * representation — [`numeral`] parses, evaluates and validates numeral
//!   systems; [`sysfile`] reads and writes the on-disk definition format.
//! * measurement — [`mdl`] infers the minimal partial DFA generating a
//!   system's forms and scores its description length; [`gen`] produces
//!   comparison populations (random baselines, same-shape neighbourhood
//!   variants and their greedy regularity extremes).
//! * learning — [`learner`] trains a small recurrent agent with a Gaussian
//!   REINFORCE policy to map numerals to numbers; [`harness`] turns accuracy
//!   traces into AUC learnability scores; [`experiment`] batches systems
//!   through the full pipeline and fits regressions via [`regress`].

pub mod experiment;
pub mod gen;
pub mod harness;
pub mod learner;
pub mod mdl;
pub mod numeral;
pub mod regress;
pub mod seed;
pub mod sysfile;

pub use numeral::{builtin_system, tokenize, BuiltinName, Numeral, NumeralSystem, Symbol};
