use std::fmt;

use super::source::{FileId, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// Magnitude of an integer literal; the sign is handled by the parser.
    Int(u64),
    Keyword(&'static str),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    Assign,
    Plus,
    Minus,
    Star,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(v) => write!(f, "integer `{v}`"),
            TokenKind::Keyword(k) => write!(f, "`{k}`"),
            TokenKind::Eof => f.write_str("end of input"),
            other => write!(f, "`{}`", other.describe()),
        }
    }
}

impl TokenKind {
    /// Short description used in expected-token lists.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(_) => "identifier".into(),
            TokenKind::Int(_) => "integer".into(),
            TokenKind::Keyword(k) => (*k).into(),
            TokenKind::LBrace => "{".into(),
            TokenKind::RBrace => "}".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
            TokenKind::LBracket => "[".into(),
            TokenKind::RBracket => "]".into(),
            TokenKind::Colon => ":".into(),
            TokenKind::Comma => ",".into(),
            TokenKind::Dot => ".".into(),
            TokenKind::Assign => "=".into(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::EqEq => "==".into(),
            TokenKind::NotEq => "!=".into(),
            TokenKind::Lt => "<".into(),
            TokenKind::Le => "<=".into(),
            TokenKind::Gt => ">".into(),
            TokenKind::Ge => ">=".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub span: Span,
}

pub fn tokenize(file: FileId, text: &str) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    let span = |s: usize, e: usize| Span::new(file, s as u32, e as u32);

    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            if word.contains('_') {
                return Err(LexError {
                    message: format!("identifier `{word}` contains `_`, which is not allowed"),
                    span: span(start, i),
                });
            }
            let kind = match super::ast::KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            };
            tokens.push(Token {
                kind,
                span: span(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(LexError {
                    message: "identifiers cannot start with a digit".into(),
                    span: span(start, i + 1),
                });
            }
            let value = text[start..i].parse::<u64>().map_err(|_| LexError {
                message: format!("integer literal `{}` is too large", &text[start..i]),
                span: span(start, i),
            })?;
            tokens.push(Token {
                kind: TokenKind::Int(value),
                span: span(start, i),
            });
            continue;
        }
        let two = bytes.get(i + 1).copied();
        let (kind, len) = match (c, two) {
            (b'=', Some(b'=')) => (TokenKind::EqEq, 2),
            (b'!', Some(b'=')) => (TokenKind::NotEq, 2),
            (b'<', Some(b'=')) => (TokenKind::Le, 2),
            (b'>', Some(b'=')) => (TokenKind::Ge, 2),
            (b'{', _) => (TokenKind::LBrace, 1),
            (b'}', _) => (TokenKind::RBrace, 1),
            (b'(', _) => (TokenKind::LParen, 1),
            (b')', _) => (TokenKind::RParen, 1),
            (b'[', _) => (TokenKind::LBracket, 1),
            (b']', _) => (TokenKind::RBracket, 1),
            (b':', _) => (TokenKind::Colon, 1),
            (b',', _) => (TokenKind::Comma, 1),
            (b'.', _) => (TokenKind::Dot, 1),
            (b'=', _) => (TokenKind::Assign, 1),
            (b'+', _) => (TokenKind::Plus, 1),
            (b'-', _) => (TokenKind::Minus, 1),
            (b'*', _) => (TokenKind::Star, 1),
            (b'<', _) => (TokenKind::Lt, 1),
            (b'>', _) => (TokenKind::Gt, 1),
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(LexError {
                    message: format!("unexpected character `{ch}`"),
                    span: span(i, i + ch.len_utf8()),
                });
            }
        };
        i += len;
        tokens.push(Token {
            kind,
            span: span(start, i),
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: span(bytes.len(), bytes.len()),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(FileId(0), text)
            .unwrap()
            .into_iter()
            .map(|t| t.kind)
            .collect()
    }

    #[test]
    fn lexes_operators_and_comments() {
        assert_eq!(
            kinds("a <= -3 // trailing\n!= b"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Le,
                TokenKind::Minus,
                TokenKind::Int(3),
                TokenKind::NotEq,
                TokenKind::Ident("b".into()),
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn rejects_underscore_identifiers() {
        let err = tokenize(FileId(0), "type a_b").unwrap_err();
        assert_eq!(err.span, Span::new(FileId(0), 5, 8));
    }

    #[test]
    fn keywords_are_recognized() {
        assert_eq!(kinds("implies")[0], TokenKind::Keyword("implies"));
        assert_eq!(kinds("inhab")[0], TokenKind::Keyword("inhab"));
    }
}
