//! Tarskian satisfaction, satisfaction and truth classes, and partial truth predicates over
//! finite set structures.

pub mod classes;
pub mod error;
pub mod eval;
pub mod hfset;
pub mod hierarchy;
pub mod proofcheck;
pub mod report;
pub mod schemes;
pub mod syntax;

pub use error::{Error, Result};
pub use hfset::{stage, Elem, FinStructure, HfSet};
pub use syntax::{parse, Formula, Kind, Term, Var};
