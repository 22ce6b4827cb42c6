//! The predicate language: syntax, normalization, compilation and a
//! reference interpreter.

mod ast;
mod compile;
mod interp;
mod parser;
mod rewrite;

pub use ast::{CmpOp, Formula, SeqOp, SeqRef, Term};
pub use compile::{seq_atom_automaton, CompileEnv, CompileOptions, CompileStats, Predicate};
pub use interp::{Assignment, Interpreter};
pub use parser::{parse, parse_term};
pub use rewrite::{eliminate_difference, flatten_terms, is_flat};
