//! Token shapes produced by the lexer.

use crate::span::SourceSpan;
use std::fmt;

/// Reserved words. Keywords cannot be used as identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Model,
    Property,
    Mutual,
    Binding,
    Nonbinding,
    Thing,
    Possesses,
    Parts,
    States,
    Of,
    Schema,
    Class,
    Characteristic,
    Kind,
    Properties,
    Precedes,
    History,
    Process,
}

impl Keyword {
    pub fn lookup(s: &str) -> Option<Keyword> {
        Some(match s {
            "model" => Keyword::Model,
            "property" => Keyword::Property,
            "mutual" => Keyword::Mutual,
            "binding" => Keyword::Binding,
            "nonbinding" => Keyword::Nonbinding,
            "thing" => Keyword::Thing,
            "possesses" => Keyword::Possesses,
            "parts" => Keyword::Parts,
            "states" => Keyword::States,
            "of" => Keyword::Of,
            "schema" => Keyword::Schema,
            "class" => Keyword::Class,
            "characteristic" => Keyword::Characteristic,
            "kind" => Keyword::Kind,
            "properties" => Keyword::Properties,
            "precedes" => Keyword::Precedes,
            "history" => Keyword::History,
            "process" => Keyword::Process,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Model => "model",
            Keyword::Property => "property",
            Keyword::Mutual => "mutual",
            Keyword::Binding => "binding",
            Keyword::Nonbinding => "nonbinding",
            Keyword::Thing => "thing",
            Keyword::Possesses => "possesses",
            Keyword::Parts => "parts",
            Keyword::States => "states",
            Keyword::Of => "of",
            Keyword::Schema => "schema",
            Keyword::Class => "class",
            Keyword::Characteristic => "characteristic",
            Keyword::Kind => "kind",
            Keyword::Properties => "properties",
            Keyword::Precedes => "precedes",
            Keyword::History => "history",
            Keyword::Process => "process",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Eq,
    Amp,
    Arrow,
    At,
    Lt,
    Gt,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::Semi => ";",
            Punct::Comma => ",",
            Punct::Colon => ":",
            Punct::Eq => "=",
            Punct::Amp => "&",
            Punct::Arrow => "->",
            Punct::At => "@",
            Punct::Lt => "<",
            Punct::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    /// A non-negative integer literal. The parsed value is stored on the
    /// token so downstream code never re-parses the lexeme.
    Natural(u64),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Keyword(k) => format!("keyword '{}'", k.as_str()),
            TokenKind::Ident => format!("identifier '{}'", self.lexeme),
            TokenKind::Natural(_) => format!("number '{}'", self.lexeme),
            TokenKind::Punct(p) => format!("'{}'", p.as_str()),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexeme)
    }
}
