use super::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    Caret,
    Ellipsis,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(s) => format!("integer `{s}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::Ellipsis => "`...`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the first character.
    pub offset: usize,
}

/// Splits descriptor text into tokens. Whitespace between tokens is ignored;
/// both `->` and `→` lex as [`TokenKind::Arrow`], both `...` and `…` as
/// [`TokenKind::Ellipsis`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();

    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let kind = match c {
            '(' => single(&mut chars, TokenKind::LParen),
            ')' => single(&mut chars, TokenKind::RParen),
            '[' => single(&mut chars, TokenKind::LBracket),
            ']' => single(&mut chars, TokenKind::RBracket),
            ',' => single(&mut chars, TokenKind::Comma),
            '^' => single(&mut chars, TokenKind::Caret),
            '→' => single(&mut chars, TokenKind::Arrow),
            '…' => single(&mut chars, TokenKind::Ellipsis),
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        TokenKind::Arrow
                    }
                    _ => return Err(unexpected_char(source, offset + 1, &["`>`"])),
                }
            }
            '.' => {
                for i in 0..3 {
                    match chars.peek() {
                        Some(&(_, '.')) => {
                            chars.next();
                        }
                        _ => return Err(unexpected_char(source, offset + i, &["`...`"])),
                    }
                }
                TokenKind::Ellipsis
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    chars.next();
                }
                TokenKind::Int(digits)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    word.push(d);
                    chars.next();
                }
                TokenKind::Ident(word)
            }
            _ => return Err(unexpected_char(source, offset, &["a token"])),
        };
        tokens.push(Token { kind, offset });
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        offset: source.len(),
    });
    Ok(tokens)
}

fn single<I: Iterator<Item = (usize, char)>>(
    chars: &mut std::iter::Peekable<I>,
    kind: TokenKind,
) -> TokenKind {
    chars.next();
    kind
}

fn unexpected_char(source: &str, offset: usize, expected: &[&str]) -> SyntaxError {
    let found = source[offset..]
        .chars()
        .next()
        .map(|c| format!("`{c}`"))
        .unwrap_or_else(|| "end of input".to_owned());
    SyntaxError {
        position: offset,
        expected: expected.iter().map(|s| (*s).to_owned()).collect(),
        found,
    }
}
