use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String, line: usize },
    #[error("line {line}: `{name}` expects {expected} arguments, found {found}")]
    Arity { name: String, expected: usize, found: usize, line: usize },
    #[error("line {line}: `{what}` has datatype {found}, expected {expected}")]
    Datatype { what: String, expected: String, found: String, line: usize },
    #[error("{kind} `{name}` declared more than once")]
    Duplicate { kind: &'static str, name: String },
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
}
