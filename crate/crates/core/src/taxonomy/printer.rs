use std::fmt::{self, Write};

use super::ast::{Classification, Mode, ModeProduct, ProductElement, RepeatCount};

/// Canonical text form, e.g. `Analysis (audio, [audio, enum] -> [audio, enum])`.
pub fn print_classification(c: &Classification) -> String {
    c.to_string()
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} -> {})",
            self.inference, self.inputs, self.outputs
        )
    }
}

impl fmt::Display for ModeProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, element) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{element}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ProductElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductElement::Single(mode) => write!(f, "{mode}"),
            ProductElement::Repeat(mode, RepeatCount::Literal(k)) => write!(f, "{mode}^{k}"),
            ProductElement::Repeat(mode, RepeatCount::Symbolic(n)) => write!(f, "{mode}^{n}"),
            ProductElement::Wildcard => f.write_str("..."),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Primitive(kind) => f.write_str(kind.keyword()),
            Mode::EnumAlias(name) => f.write_str(name),
            Mode::ListOf(inner) => {
                f.write_char('[')?;
                write!(f, "{inner}")?;
                f.write_char(']')
            }
        }
    }
}
