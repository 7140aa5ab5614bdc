//! Recursive-descent parser with panic-mode recovery.
//!
//! On a syntax error the parser records a diagnostic carrying the expected
//! token set and skips to the next `;` or `}`, so one run reports every
//! error in the file rather than stopping at the first.

use crate::diag::{Diagnostic, Severity};
use crate::frontend::ast::*;
use crate::frontend::token::{Keyword, Punct, Token, TokenKind};
use crate::span::SourceSpan;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::new("P1", Severity::Error, self.to_string()).with_span(self.span.clone())
    }
}

/// Parse a token stream into an AST. The returned tree covers every
/// declaration that parsed cleanly; errors are returned alongside it.
pub fn parse(tokens: &[Token], file: &str) -> (Ast, Vec<ParseError>) {
    let mut parser = Parser {
        tokens,
        pos: 0,
        file: Arc::from(file),
        errors: Vec::new(),
    };
    let ast = parser.model();
    (ast, parser.errors)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    file: Arc<str>,
    errors: Vec<ParseError>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(t) => t.span.clone(),
            None => SourceSpan::point(self.file.clone(), 1, 1),
        }
    }

    fn found_text(&self) -> String {
        match self.peek() {
            Some(t) => t.describe(),
            None => "end of file".to_string(),
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            span: self.peek().map(|t| t.span.clone()).unwrap_or_else(|| self.eof_span()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.found_text(),
        }
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Punct(p))
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Keyword(k))
    }

    fn eat_punct(&mut self, p: Punct) -> Result<SourceSpan, ParseError> {
        if self.at_punct(p) {
            let span = self.peek().unwrap().span.clone();
            self.bump();
            Ok(span)
        } else {
            Err(self.error(&[&format!("'{}'", p.as_str())]))
        }
    }

    fn eat_keyword(&mut self, k: Keyword) -> Result<SourceSpan, ParseError> {
        if self.at_keyword(k) {
            let span = self.peek().unwrap().span.clone();
            self.bump();
            Ok(span)
        } else {
            Err(self.error(&[&format!("'{}'", k.as_str())]))
        }
    }

    fn eat_ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let ident = Ident {
                    text: t.lexeme.clone(),
                    span: t.span.clone(),
                };
                self.bump();
                Ok(ident)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn eat_natural(&mut self) -> Result<(u64, SourceSpan), ParseError> {
        match self.peek() {
            Some(t) => {
                if let TokenKind::Natural(value) = t.kind {
                    let span = t.span.clone();
                    self.bump();
                    Ok((value, span))
                } else {
                    Err(self.error(&["number"]))
                }
            }
            None => Err(self.error(&["number"])),
        }
    }

    /// `IDENT ("," IDENT)*`
    fn ident_list(&mut self) -> Result<Vec<Ident>, ParseError> {
        let mut idents = vec![self.eat_ident()?];
        while self.at_punct(Punct::Comma) {
            self.bump();
            idents.push(self.eat_ident()?);
        }
        Ok(idents)
    }

    /// Skip to just past the next `;` or `}` so parsing can continue with
    /// the following declaration.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Punct(Punct::Semi) | TokenKind::Punct(Punct::RBrace) => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn model(&mut self) -> Ast {
        let name = match self.header() {
            Ok(name) => name,
            Err(e) => {
                self.errors.push(e);
                self.recover();
                Ident {
                    text: String::new(),
                    span: self.eof_span(),
                }
            }
        };

        let mut decls = Vec::new();
        loop {
            if self.at_punct(Punct::RBrace) {
                self.bump();
                break;
            }
            if self.peek().is_none() {
                self.errors.push(self.error(&["'}'", "declaration"]));
                break;
            }
            match self.decl() {
                Ok(decl) => decls.push(decl),
                Err(e) => {
                    self.errors.push(e);
                    self.recover();
                }
            }
        }

        if let Some(t) = self.peek() {
            self.errors.push(ParseError {
                span: t.span.clone(),
                expected: vec!["end of file".to_string()],
                found: t.describe(),
            });
        }

        Ast { name, decls }
    }

    fn header(&mut self) -> Result<Ident, ParseError> {
        self.eat_keyword(Keyword::Model)?;
        let name = self.eat_ident()?;
        self.eat_punct(Punct::LBrace)?;
        Ok(name)
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        match self.peek().map(|t| t.kind) {
            Some(TokenKind::Keyword(Keyword::Property)) => self.property(),
            Some(TokenKind::Keyword(Keyword::Mutual)) => self.mutual(),
            Some(TokenKind::Keyword(Keyword::Thing)) => self.thing(),
            Some(TokenKind::Keyword(Keyword::States)) => self.states(),
            Some(TokenKind::Keyword(Keyword::Schema)) => self.schema(),
            Some(TokenKind::Keyword(Keyword::Class)) => self.class(),
            Some(TokenKind::Keyword(Keyword::Kind)) => self.kind(),
            Some(TokenKind::Keyword(Keyword::Precedes)) => self.precedes(),
            Some(TokenKind::Keyword(Keyword::History)) => self.history(),
            Some(TokenKind::Keyword(Keyword::Process)) => self.process(),
            _ => Err(self.error(&["declaration"])),
        }
    }

    fn property(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Property)?;
        let name = self.eat_ident()?;
        let conjuncts = if self.at_punct(Punct::Eq) {
            self.bump();
            let mut cs = vec![self.eat_ident()?];
            self.eat_punct(Punct::Amp)?;
            cs.push(self.eat_ident()?);
            while self.at_punct(Punct::Amp) {
                self.bump();
                cs.push(self.eat_ident()?);
            }
            Some(cs)
        } else {
            None
        };
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Property { name, conjuncts })
    }

    fn mutual(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Mutual)?;
        self.eat_keyword(Keyword::Property)?;
        let name = self.eat_ident()?;
        self.eat_punct(Punct::LParen)?;
        let relata = self.ident_list()?;
        self.eat_punct(Punct::RParen)?;
        let binding = if self.at_keyword(Keyword::Binding) {
            self.bump();
            true
        } else if self.at_keyword(Keyword::Nonbinding) {
            self.bump();
            false
        } else {
            return Err(self.error(&["'binding'", "'nonbinding'"]));
        };
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::MutualProperty {
            name,
            relata,
            binding,
        })
    }

    fn thing(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Thing)?;
        let name = self.eat_ident()?;
        let possesses = if self.at_keyword(Keyword::Possesses) {
            self.bump();
            self.ident_list()?
        } else {
            Vec::new()
        };
        let parts = if self.at_keyword(Keyword::Parts) {
            self.bump();
            self.ident_list()?
        } else {
            Vec::new()
        };
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Thing {
            name,
            possesses,
            parts,
        })
    }

    fn states(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::States)?;
        self.eat_keyword(Keyword::Of)?;
        let owner = self.eat_ident()?;
        self.eat_punct(Punct::Colon)?;
        let states = self.ident_list()?;
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::States { owner, states })
    }

    fn schema(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Schema)?;
        let name = self.eat_ident()?;
        self.eat_keyword(Keyword::Of)?;
        let describes = self.eat_ident()?;
        self.eat_punct(Punct::LParen)?;
        let attributes = self.ident_list()?;
        self.eat_punct(Punct::RParen)?;
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Schema {
            name,
            describes,
            attributes,
        })
    }

    fn extension(&mut self) -> Result<Option<Vec<Ident>>, ParseError> {
        if !self.at_punct(Punct::Eq) {
            return Ok(None);
        }
        self.bump();
        self.eat_punct(Punct::LBrace)?;
        let members = if self.at_punct(Punct::RBrace) {
            Vec::new()
        } else {
            self.ident_list()?
        };
        self.eat_punct(Punct::RBrace)?;
        Ok(Some(members))
    }

    fn class(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Class)?;
        let name = self.eat_ident()?;
        self.eat_keyword(Keyword::Characteristic)?;
        let characteristic = self.eat_ident()?;
        let extension = self.extension()?;
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Class {
            name,
            characteristic,
            extension,
        })
    }

    fn kind(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Kind)?;
        let name = self.eat_ident()?;
        self.eat_keyword(Keyword::Properties)?;
        let properties = self.ident_list()?;
        let extension = self.extension()?;
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Kind {
            name,
            properties,
            extension,
        })
    }

    fn precedes(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Precedes)?;
        let first = self.eat_ident()?;
        self.eat_punct(Punct::Arrow)?;
        let then = self.eat_ident()?;
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Precedes { first, then })
    }

    fn history(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::History)?;
        let subject = self.eat_ident()?;
        self.eat_punct(Punct::LBrace)?;
        let mut observations = Vec::new();
        loop {
            let state = self.eat_ident()?;
            self.eat_punct(Punct::At)?;
            let (time, time_span) = self.eat_natural()?;
            let semi = self.eat_punct(Punct::Semi)?;
            let _ = semi;
            observations.push(ObservationDecl {
                span: state.span.to(&time_span),
                state,
                time,
            });
            if self.at_punct(Punct::RBrace) {
                self.bump();
                break;
            }
        }
        Ok(Decl::History {
            subject,
            observations,
        })
    }

    fn process(&mut self) -> Result<Decl, ParseError> {
        self.eat_keyword(Keyword::Process)?;
        let name = self.eat_ident()?;
        self.eat_keyword(Keyword::Of)?;
        let subject = self.eat_ident()?;
        self.eat_punct(Punct::Eq)?;
        let mut steps = vec![self.pair()?];
        while self.at_punct(Punct::Comma) {
            self.bump();
            steps.push(self.pair()?);
        }
        self.eat_punct(Punct::Semi)?;
        Ok(Decl::Process {
            name,
            subject,
            steps,
        })
    }

    fn pair(&mut self) -> Result<PairDecl, ParseError> {
        let open = self.eat_punct(Punct::Lt)?;
        let from = self.eat_ident()?;
        self.eat_punct(Punct::Comma)?;
        let to = self.eat_ident()?;
        let close = self.eat_punct(Punct::Gt)?;
        Ok(PairDecl {
            span: open.to(&close),
            from,
            to,
        })
    }
}
