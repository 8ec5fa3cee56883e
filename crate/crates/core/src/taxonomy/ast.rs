use std::fmt;

use serde::{Deserialize, Serialize};

/// How a tool derives its outputs from its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InferenceMode {
    Analysis,
    Synthesis,
    Generation,
}

impl InferenceMode {
    pub const ALL: [InferenceMode; 3] = [
        InferenceMode::Analysis,
        InferenceMode::Synthesis,
        InferenceMode::Generation,
    ];

    /// Case-insensitive keyword lookup.
    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.keyword().eq_ignore_ascii_case(word))
    }

    pub fn keyword(self) -> &'static str {
        match self {
            InferenceMode::Analysis => "Analysis",
            InferenceMode::Synthesis => "Synthesis",
            InferenceMode::Generation => "Generation",
        }
    }

    /// Lowercase form used in query strings and JSON keys.
    pub fn slug(self) -> &'static str {
        match self {
            InferenceMode::Analysis => "analysis",
            InferenceMode::Synthesis => "synthesis",
            InferenceMode::Generation => "generation",
        }
    }
}

impl fmt::Display for InferenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimitiveKind {
    Text,
    Image,
    Video,
    Audio,
    Enum,
    Prompt,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 6] = [
        PrimitiveKind::Text,
        PrimitiveKind::Image,
        PrimitiveKind::Video,
        PrimitiveKind::Audio,
        PrimitiveKind::Enum,
        PrimitiveKind::Prompt,
    ];

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.keyword().eq_ignore_ascii_case(word))
    }

    pub fn keyword(self) -> &'static str {
        match self {
            PrimitiveKind::Text => "text",
            PrimitiveKind::Image => "image",
            PrimitiveKind::Video => "video",
            PrimitiveKind::Audio => "audio",
            PrimitiveKind::Enum => "enum",
            PrimitiveKind::Prompt => "prompt",
        }
    }
}

/// A single input or output data kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mode {
    Primitive(PrimitiveKind),
    /// A named refinement of `enum` such as `bool` or `index`. Stored lowercase.
    EnumAlias(String),
    /// A collection of instances of a (possibly compound) mode.
    ListOf(ModeProduct),
}

impl Mode {
    pub fn text() -> Self {
        Mode::Primitive(PrimitiveKind::Text)
    }

    pub fn alias(name: &str) -> Self {
        Mode::EnumAlias(name.to_ascii_lowercase())
    }

    pub fn list(elements: Vec<ProductElement>) -> Self {
        Mode::ListOf(ModeProduct::new(elements))
    }

    /// List nesting depth: `text` is 0, `[text]` is 1, `[[text]]` is 2.
    pub fn depth(&self) -> usize {
        match self {
            Mode::Primitive(_) | Mode::EnumAlias(_) => 0,
            Mode::ListOf(inner) => 1 + inner.depth(),
        }
    }
}

impl From<PrimitiveKind> for Mode {
    fn from(kind: PrimitiveKind) -> Self {
        Mode::Primitive(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RepeatCount {
    /// Literal exponent, always at least 2 in a valid AST.
    Literal(u32),
    /// Symbolic exponent such as `n`; means "one or more".
    Symbolic(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProductElement {
    Single(Mode),
    Repeat(Mode, RepeatCount),
    /// `...`: zero or more further inputs of any mode.
    Wildcard,
}

impl ProductElement {
    pub fn mode(&self) -> Option<&Mode> {
        match self {
            ProductElement::Single(m) | ProductElement::Repeat(m, _) => Some(m),
            ProductElement::Wildcard => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ProductElement::Repeat(_, RepeatCount::Symbolic(_)))
    }
}

impl From<Mode> for ProductElement {
    fn from(mode: Mode) -> Self {
        ProductElement::Single(mode)
    }
}

impl From<PrimitiveKind> for ProductElement {
    fn from(kind: PrimitiveKind) -> Self {
        ProductElement::Single(Mode::Primitive(kind))
    }
}

/// Comma-separated sequence of modes consumed or produced together.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeProduct(pub Vec<ProductElement>);

impl ModeProduct {
    pub fn new(elements: Vec<ProductElement>) -> Self {
        ModeProduct(elements)
    }

    pub fn elements(&self) -> &[ProductElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProductElement> {
        self.0.iter()
    }

    pub fn depth(&self) -> usize {
        self.0
            .iter()
            .filter_map(ProductElement::mode)
            .map(Mode::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn has_wildcard(&self) -> bool {
        self.0.iter().any(|e| matches!(e, ProductElement::Wildcard))
    }
}

impl<E: Into<ProductElement>> FromIterator<E> for ModeProduct {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        ModeProduct(iter.into_iter().map(Into::into).collect())
    }
}

/// One taxonomy descriptor: `Inf(inputs -> outputs)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Classification {
    pub inference: InferenceMode,
    pub inputs: ModeProduct,
    pub outputs: ModeProduct,
}

impl Classification {
    pub fn new(inference: InferenceMode, inputs: ModeProduct, outputs: ModeProduct) -> Self {
        Classification {
            inference,
            inputs,
            outputs,
        }
    }

    /// Deepest list nesting on either side.
    pub fn depth(&self) -> usize {
        self.inputs.depth().max(self.outputs.depth())
    }
}
