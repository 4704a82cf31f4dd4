use thiserror::Error;

/// Errors raised by the kernel. Validation findings are not errors; they travel in a
/// [`Report`](crate::report::Report).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error: {message} at offset {offset}")]
    Syntax { offset: usize, message: String },

    #[error("stage {requested} exceeds the materialization cap of {cap}")]
    StageTooLarge { requested: u32, cap: u32 },

    #[error("structure file line {line}: {message}")]
    StructureFormat { line: usize, message: String },

    #[error("cycle through node '{0}'")]
    Cycle(String),

    #[error("nodes '{0}' and '{1}' have identical children")]
    NotExtensional(String, String),

    #[error("assignment domain {found:?} does not match free variables {expected:?}")]
    AssignmentDomain {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("variable '{0}' is not free in the formula")]
    NotFree(String),

    #[error("constant {0} does not denote an element of the structure")]
    ConstantOutside(String),

    #[error("variable '{0}' already occurs in the formula")]
    VariableOccurs(String),

    #[error("empty sequence")]
    EmptySequence,

    #[error("evaluation budget of {0} steps exceeded")]
    BudgetExceeded(u64),

    #[error("no interpretation for predicate '{0}'")]
    Uninterpreted(String),

    #[error("depth {depth} exceeds bound {bound}")]
    DepthExceeded { depth: u32, bound: u32 },

    #[error("not a sentence: free variables {0:?}")]
    NotSentence(Vec<String>),

    #[error("not a formula code: {0}")]
    BadCode(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("{0} is not in the requested Levy class")]
    LevyClass(String),

    #[error("formula is not bounded: {0}")]
    NotDelta0(String),

    #[error("stage index out of range: {0}")]
    StageBounds(String),

    #[error("class is not extensional: {0} witness pair(s)")]
    NonExtensional(usize),

    #[error("class file line {line}: {message}")]
    ClassFormat { line: usize, message: String },

    #[error("theory file line {line}: {message}")]
    TheoryFormat { line: usize, message: String },

    #[error("proof file line {line}: {message}")]
    ProofFormat { line: usize, message: String },

    #[error("coding maps {0} outside the structure")]
    CodingOutside(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
