//! Recursive-descent parser for descriptors of the form
//!
//! ```text
//! classification := INFERENCE "(" product ARROW product ")"
//! product        := element ("," element)*
//! element        := "..." | mode ("^" (INT | IDENT))?
//! mode           := IDENT | "[" product "]"
//! ```
//!
//! Identifiers that are not one of the six primitive keywords become enum
//! aliases. Keywords are case-insensitive.

use super::ast::{
    Classification, InferenceMode, Mode, ModeProduct, PrimitiveKind, ProductElement, RepeatCount,
};
use super::error::{ParseError, StructureError, StructureViolation, SyntaxError};
use super::lexer::{tokenize, Token, TokenKind};

/// Largest literal exponent accepted by `mode^k`.
pub const MAX_REPEAT: u32 = 64;

/// Deepest list nesting the parser will descend into.
pub const MAX_NESTING: usize = 32;

/// Most modes a product may hold once literal repeats are expanded, counting
/// lists and everything inside them.
pub const MAX_EXPANDED: usize = 256;

pub fn parse_classification(source: &str) -> Result<Classification, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.classification()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Inputs,
    Outputs,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek();
        SyntaxError {
            position: tok.offset,
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found: tok.kind.describe(),
        }
        .into()
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.error(&[&kind.describe()]))
        }
    }

    fn classification(&mut self) -> Result<Classification, ParseError> {
        const INFERENCE: [&str; 3] = ["`Analysis`", "`Synthesis`", "`Generation`"];
        let inference = match &self.peek().kind {
            TokenKind::Ident(word) => match InferenceMode::from_keyword(word) {
                Some(mode) => mode,
                None => return Err(self.error(&INFERENCE)),
            },
            _ => return Err(self.error(&INFERENCE)),
        };
        self.bump();
        self.expect(TokenKind::LParen)?;
        let inputs = self.product(Side::Inputs, 0)?;
        if self.peek().kind != TokenKind::Arrow {
            return Err(self.error(&["`,`", "`->`"]));
        }
        self.bump();
        let outputs = self.product(Side::Outputs, 0)?;
        if self.peek().kind != TokenKind::RParen {
            return Err(self.error(&["`,`", "`)`"]));
        }
        self.bump();
        self.expect(TokenKind::Eof)?;
        let c = Classification {
            inference,
            inputs,
            outputs,
        };
        check_size(&c)?;
        Ok(c)
    }

    fn product(&mut self, side: Side, depth: usize) -> Result<ModeProduct, ParseError> {
        let mut elements = Vec::new();
        let mut wildcard_at = None;
        loop {
            let offset = self.peek().offset;
            if wildcard_at.is_some() {
                let violation = if self.peek().kind == TokenKind::Ellipsis {
                    StructureViolation::MultipleWildcards
                } else {
                    StructureViolation::WildcardNotLast
                };
                return Err(StructureError::at(violation, offset).into());
            }
            let element = self.element(side, depth)?;
            if element == ProductElement::Wildcard {
                wildcard_at = Some(offset);
            }
            elements.push(element);
            if self.peek().kind == TokenKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(ModeProduct(elements))
    }

    fn element(&mut self, side: Side, depth: usize) -> Result<ProductElement, ParseError> {
        let offset = self.peek().offset;
        if self.peek().kind == TokenKind::Ellipsis {
            let violation = if depth > 0 {
                StructureViolation::WildcardInList
            } else if side == Side::Outputs {
                StructureViolation::WildcardInOutputs
            } else {
                self.bump();
                return Ok(ProductElement::Wildcard);
            };
            return Err(StructureError::at(violation, offset).into());
        }

        let mode = self.mode(side, depth)?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(ProductElement::Single(mode));
        }
        self.bump();
        let exp_offset = self.peek().offset;
        match self.peek().kind.clone() {
            TokenKind::Int(digits) => {
                self.bump();
                let count: u32 = digits.parse().unwrap_or(u32::MAX);
                match count {
                    0 => Err(StructureError::at(
                        StructureViolation::RepeatCountTooSmall,
                        exp_offset,
                    )
                    .into()),
                    1 => Ok(ProductElement::Single(mode)),
                    c if c > MAX_REPEAT => Err(SyntaxError {
                        position: exp_offset,
                        expected: vec![format!("an exponent no larger than {MAX_REPEAT}")],
                        found: format!("integer `{digits}`"),
                    }
                    .into()),
                    c => Ok(ProductElement::Repeat(mode, RepeatCount::Literal(c))),
                }
            }
            TokenKind::Ident(name) => {
                let violation = if depth > 0 {
                    Some(StructureViolation::SymbolicInList)
                } else if side == Side::Outputs {
                    Some(StructureViolation::SymbolicInOutputs)
                } else {
                    None
                };
                if let Some(v) = violation {
                    return Err(StructureError::at(v, exp_offset).into());
                }
                self.bump();
                Ok(ProductElement::Repeat(
                    mode,
                    RepeatCount::Symbolic(name.to_ascii_lowercase()),
                ))
            }
            _ => Err(self.error(&["an integer exponent", "a symbolic exponent"])),
        }
    }

    fn mode(&mut self, side: Side, depth: usize) -> Result<Mode, ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Ident(word) => {
                self.bump();
                Ok(match PrimitiveKind::from_keyword(&word) {
                    Some(kind) => Mode::Primitive(kind),
                    None => Mode::EnumAlias(word.to_ascii_lowercase()),
                })
            }
            TokenKind::LBracket => {
                if depth >= MAX_NESTING {
                    return Err(SyntaxError {
                        position: self.peek().offset,
                        expected: vec![format!("at most {MAX_NESTING} nested lists")],
                        found: "`[`".to_owned(),
                    }
                    .into());
                }
                self.bump();
                let inner = self.product(side, depth + 1)?;
                if self.peek().kind != TokenKind::RBracket {
                    return Err(self.error(&["`,`", "`]`"]));
                }
                self.bump();
                Ok(Mode::ListOf(inner))
            }
            _ => {
                let mut expected = vec!["a mode", "`[`"];
                if side == Side::Inputs && depth == 0 {
                    expected.push("`...`");
                }
                Err(self.error(&expected))
            }
        }
    }
}

/// Checks the structural invariants of an AST built outside the parser.
pub fn validate_structure(c: &Classification) -> Result<(), StructureError> {
    check_product(&c.inputs, Side::Inputs, 0)?;
    check_product(&c.outputs, Side::Outputs, 0)?;
    check_size(c)
}

fn check_size(c: &Classification) -> Result<(), StructureError> {
    if expanded_size(&c.inputs) > MAX_EXPANDED || expanded_size(&c.outputs) > MAX_EXPANDED {
        return Err(StructureError::new(StructureViolation::TooLarge));
    }
    Ok(())
}

/// Saturating count of modes after expansion.
fn expanded_size(product: &ModeProduct) -> usize {
    product.iter().fold(0usize, |acc, element| {
        let (mode, times) = match element {
            ProductElement::Single(m) => (m, 1),
            ProductElement::Repeat(m, RepeatCount::Literal(k)) => (m, *k as usize),
            ProductElement::Repeat(m, RepeatCount::Symbolic(_)) => (m, 1),
            ProductElement::Wildcard => return acc.saturating_add(1),
        };
        let each = match mode {
            Mode::ListOf(inner) => expanded_size(inner).saturating_add(1),
            _ => 1,
        };
        acc.saturating_add(each.saturating_mul(times))
    })
}

fn check_product(product: &ModeProduct, side: Side, depth: usize) -> Result<(), StructureError> {
    if product.is_empty() {
        return Err(StructureError::new(StructureViolation::EmptyProduct));
    }
    let last = product.len() - 1;
    let wildcards = product
        .iter()
        .filter(|e| **e == ProductElement::Wildcard)
        .count();
    if wildcards > 1 {
        return Err(StructureError::new(StructureViolation::MultipleWildcards));
    }
    for (i, element) in product.iter().enumerate() {
        match element {
            ProductElement::Wildcard => {
                let violation = if depth > 0 {
                    Some(StructureViolation::WildcardInList)
                } else if side == Side::Outputs {
                    Some(StructureViolation::WildcardInOutputs)
                } else if i != last {
                    Some(StructureViolation::WildcardNotLast)
                } else {
                    None
                };
                if let Some(v) = violation {
                    return Err(StructureError::new(v));
                }
            }
            ProductElement::Single(mode) => check_mode(mode, side, depth)?,
            ProductElement::Repeat(mode, count) => {
                match count {
                    RepeatCount::Literal(k) if *k < 2 || *k > MAX_REPEAT => {
                        return Err(StructureError::new(StructureViolation::RepeatCountTooSmall))
                    }
                    RepeatCount::Literal(_) => {}
                    RepeatCount::Symbolic(name) => {
                        if depth > 0 {
                            return Err(StructureError::new(StructureViolation::SymbolicInList));
                        }
                        if side == Side::Outputs {
                            return Err(StructureError::new(StructureViolation::SymbolicInOutputs));
                        }
                        if !is_lower_ident(name) {
                            return Err(StructureError::new(StructureViolation::InvalidAliasName));
                        }
                    }
                }
                check_mode(mode, side, depth)?;
            }
        }
    }
    Ok(())
}

fn check_mode(mode: &Mode, side: Side, depth: usize) -> Result<(), StructureError> {
    match mode {
        Mode::Primitive(_) => Ok(()),
        Mode::EnumAlias(name) => {
            if is_lower_ident(name) && PrimitiveKind::from_keyword(name).is_none() {
                Ok(())
            } else {
                Err(StructureError::new(StructureViolation::InvalidAliasName))
            }
        }
        Mode::ListOf(inner) => check_product(inner, side, depth + 1),
    }
}

fn is_lower_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}
