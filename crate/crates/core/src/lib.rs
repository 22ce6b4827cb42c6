//! Least periods of k-automatic sequences.
//!
//! The set of least periods of the factors of a k-automatic sequence is again
//! k-automatic. This crate computes an automaton for it by compiling first-order
//! predicates over the sequence (addition, comparison, indexing, Boolean
//! connectives and quantifiers over the naturals) into finite automata reading
//! base-k digits, least significant digit first.
//!
//! * [`dfa`], [`nfa`], [`minimize`]: multi-track automata and their algebra.
//! * [`numeration`]: digit encodings and the primitive relation automata.
//! * [`sequences`]: Thue–Morse, Rudin–Shapiro, period-doubling and
//!   paperfolding, kernel synthesis, and a brute-force factor oracle.
//! * [`logic`]: the predicate language, its parser and compiler.
//! * [`pipeline`]: the period, least-period and least-period-set predicates.
//! * [`analysis`]: exact densities and related statistics of integer sets.

pub mod alphabet;
pub mod analysis;
pub mod dfa;
pub mod dfao;
pub mod error;
pub mod format;
pub mod logic;
pub mod minimize;
pub mod nfa;
pub mod numeration;
pub mod pipeline;
pub mod sequences;

pub use alphabet::{DigitOrder, Letter, TrackAlphabet};
pub use dfa::{BoolOp, Dfa, StateId};
pub use dfao::Dfao;
pub use error::{Error, Result};
pub use nfa::Nfa;
