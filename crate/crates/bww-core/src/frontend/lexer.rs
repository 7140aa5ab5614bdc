//! Hand-rolled lexer for `.bww` source text.
//!
//! Whitespace and `//` line comments are skipped. Identifiers match
//! `[A-Za-z_][A-Za-z0-9_]*`; words that collide with a keyword lex as that
//! keyword. Illegal characters are reported and skipped so a single run
//! surfaces every lexical problem in the file.

use crate::diag::{Diagnostic, Severity};
use crate::frontend::token::{Keyword, Punct, Token, TokenKind};
use crate::span::SourceSpan;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("illegal character '{found}'")]
    IllegalChar { span: SourceSpan, found: char },
    #[error("number does not fit in 64 bits")]
    NumberTooLarge { span: SourceSpan },
    #[error("'-' must be followed by '>'")]
    LoneMinus { span: SourceSpan },
}

impl LexError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            LexError::IllegalChar { span, .. } => span,
            LexError::NumberTooLarge { span } => span,
            LexError::LoneMinus { span } => span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new("L1", Severity::Error, self.to_string()).with_span(self.span().clone())
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: Arc<str>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str, file: Arc<str>) -> Self {
        Lexer {
            chars: source.chars().peekable(),
            file,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn here(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn span(&self, start: (u32, u32), end: (u32, u32)) -> SourceSpan {
        SourceSpan::new(self.file.clone(), start.0, start.1, end.0, end.1)
    }
}

/// Produce the token list for `source`. All lexical errors are collected;
/// offending characters are skipped.
pub fn tokenize(source: &str, file: &str) -> (Vec<Token>, Vec<LexError>) {
    let file: Arc<str> = Arc::from(file);
    let mut lx = Lexer::new(source, file);
    let mut tokens = Vec::new();
    let mut errors = Vec::new();

    while let Some(c) = lx.peek() {
        let start = lx.here();
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                lx.bump();
            }
            '/' => {
                lx.bump();
                if lx.peek() == Some('/') {
                    while let Some(c) = lx.peek() {
                        if c == '\n' {
                            break;
                        }
                        lx.bump();
                    }
                } else {
                    errors.push(LexError::IllegalChar {
                        span: lx.span(start, start),
                        found: '/',
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                let mut end = start;
                while let Some(c) = lx.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = lx.here();
                        word.push(c);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                let kind = match Keyword::lookup(&word) {
                    Some(kw) => TokenKind::Keyword(kw),
                    None => TokenKind::Ident,
                };
                tokens.push(Token {
                    kind,
                    lexeme: word,
                    span: lx.span(start, end),
                });
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                let mut end = start;
                while let Some(c) = lx.peek() {
                    if c.is_ascii_digit() {
                        end = lx.here();
                        digits.push(c);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                match digits.parse::<u64>() {
                    Ok(value) => tokens.push(Token {
                        kind: TokenKind::Natural(value),
                        lexeme: digits,
                        span: lx.span(start, end),
                    }),
                    Err(_) => errors.push(LexError::NumberTooLarge {
                        span: lx.span(start, end),
                    }),
                }
            }
            '-' => {
                lx.bump();
                if lx.peek() == Some('>') {
                    let end = lx.here();
                    lx.bump();
                    tokens.push(Token {
                        kind: TokenKind::Punct(Punct::Arrow),
                        lexeme: "->".to_string(),
                        span: lx.span(start, end),
                    });
                } else {
                    errors.push(LexError::LoneMinus {
                        span: lx.span(start, start),
                    });
                }
            }
            _ => {
                let punct = match c {
                    '{' => Some(Punct::LBrace),
                    '}' => Some(Punct::RBrace),
                    '(' => Some(Punct::LParen),
                    ')' => Some(Punct::RParen),
                    ';' => Some(Punct::Semi),
                    ',' => Some(Punct::Comma),
                    ':' => Some(Punct::Colon),
                    '=' => Some(Punct::Eq),
                    '&' => Some(Punct::Amp),
                    '@' => Some(Punct::At),
                    '<' => Some(Punct::Lt),
                    '>' => Some(Punct::Gt),
                    _ => None,
                };
                lx.bump();
                match punct {
                    Some(p) => tokens.push(Token {
                        kind: TokenKind::Punct(p),
                        lexeme: p.as_str().to_string(),
                        span: lx.span(start, start),
                    }),
                    None => errors.push(LexError::IllegalChar {
                        span: lx.span(start, start),
                        found: c,
                    }),
                }
            }
        }
    }

    (tokens, errors)
}

/// Join token lexemes back into parseable text. Whitespace is not
/// preserved; re-tokenizing yields the same kinds and lexemes.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.lexeme.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
