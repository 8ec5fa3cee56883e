//! The classification language: `Inf(inputs -> outputs)` descriptors.

mod assign;
mod ast;
mod error;
pub mod lexer;
mod normalize;
mod parser;
mod printer;

pub use assign::mode_assignable;
pub use ast::{
    Classification, InferenceMode, Mode, ModeProduct, PrimitiveKind, ProductElement, RepeatCount,
};
pub use error::{ParseError, StructureError, StructureViolation, SyntaxError};
pub use normalize::{normalize, normalize_mode, normalize_product};
pub use parser::{parse_classification, validate_structure, MAX_EXPANDED, MAX_NESTING, MAX_REPEAT};
pub use printer::print_classification;

impl std::str::FromStr for Classification {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_classification(s)
    }
}
