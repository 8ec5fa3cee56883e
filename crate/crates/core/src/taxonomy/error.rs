use std::fmt;

use thiserror::Error;

/// Malformed descriptor text. `position` is a byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: expected {}, found {found}", join_expected(.expected))]
pub struct SyntaxError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

fn join_expected(expected: &[String]) -> String {
    match expected {
        [] => "nothing".to_owned(),
        [one] => one.clone(),
        many => format!("one of {}", many.join(", ")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureViolation {
    WildcardInOutputs,
    SymbolicInOutputs,
    WildcardNotLast,
    MultipleWildcards,
    WildcardInList,
    SymbolicInList,
    EmptyProduct,
    RepeatCountTooSmall,
    InvalidAliasName,
    TooLarge,
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            StructureViolation::WildcardInOutputs => "`...` is only allowed among inputs",
            StructureViolation::SymbolicInOutputs => {
                "symbolic exponents are only allowed among inputs"
            }
            StructureViolation::WildcardNotLast => "`...` must be the last input",
            StructureViolation::MultipleWildcards => "at most one `...` per product",
            StructureViolation::WildcardInList => "`...` cannot appear inside a list",
            StructureViolation::SymbolicInList => "symbolic exponents cannot appear inside a list",
            StructureViolation::EmptyProduct => "a product needs at least one mode",
            StructureViolation::RepeatCountTooSmall => "literal exponents must be at least 2",
            StructureViolation::InvalidAliasName => {
                "enum alias must be a lowercase identifier that is not a mode keyword"
            }
            StructureViolation::TooLarge => "product expands to too many modes",
        };
        f.write_str(msg)
    }
}

/// Well-formed text whose AST breaks a structural rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid descriptor structure{}: {violation}", .position.map(|p| format!(" at byte {p}")).unwrap_or_default())]
pub struct StructureError {
    pub violation: StructureViolation,
    pub position: Option<usize>,
}

impl StructureError {
    pub(crate) fn new(violation: StructureViolation) -> Self {
        StructureError {
            violation,
            position: None,
        }
    }

    pub(crate) fn at(violation: StructureViolation, position: usize) -> Self {
        StructureError {
            violation,
            position: Some(position),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax(e) => Some(e.position),
            ParseError::Structure(e) => e.position,
        }
    }
}
