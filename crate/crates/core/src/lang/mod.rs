//! Typed first-order language: terms, clauses, signatures and text formats.

mod error;
mod language;
mod parse;
mod subst;
mod term;

pub use error::LangError;
pub use language::{FunctorSig, Language, ModeArg, ModeDecl, ModeKind, PredicateSig};
pub use parse::{
    examples_to_text, facts_to_text, modes_to_text, parse_atom, parse_clause, parse_examples, parse_facts,
    parse_language, parse_modes, parse_program, program_to_text, Example,
};
pub use subst::{theta_equivalent, theta_subsumes, Substitution};
pub use term::{sym, Atom, Clause, Symbol, Term, CONS, NIL, TOP_PREDICATE};
