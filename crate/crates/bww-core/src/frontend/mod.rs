//! BWW-ML frontend: lexer, parser, canonical printer, and name resolution.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod resolver;
pub mod token;

pub use ast::{print, Ast, Decl, Ident};
pub use lexer::{detokenize, tokenize, LexError};
pub use parser::{parse, ParseError};
pub use resolver::{resolve, ResolveError, ResolvedAst};
pub use token::{Keyword, Punct, Token, TokenKind};
