//! BWW-ML: a conceptual-modeling toolchain with an executable type system.
//!
//! Models declare things and the properties they possess, the states they
//! move through, precedence between properties, schemas describing things,
//! and classes/kinds collecting them — and the library answers the
//! standard questions over such a model: does this thing possess that
//! property, is one property a necessary condition for another, did a
//! change from one state to another happen, which things form a class.
//!
//! The pipeline:
//!
//! ```text
//! source (.bww) --tokenize--> tokens --parse--> Ast --resolve--> ResolvedAst
//!        --build_model--> Model --validate--> [Diagnostic]
//!                            \--queries (semantics)
//!                             \--export (JSON)
//! ```
//!
//! - [`frontend`]: lexer, parser, canonical printer, name resolution
//! - [`model`]: domain types, the immutable registry, construction
//! - [`semantics`]: pure queries over a built model
//! - [`validate`]: the rule suite (stable codes V1..V11, W1, I2)
//! - [`export`]: deterministic JSON document, with a reader
//!
//! A built [`Model`](model::Model) is immutable and safe to query from any
//! number of threads.

pub mod diag;
pub mod export;
pub mod frontend;
pub mod model;
pub mod semantics;
pub mod span;
pub mod validate;

pub use diag::{Diagnostic, Severity};
pub use model::{build_model, BuildError, BuildFailure, Model, ModelBuilder};
pub use semantics::{composable, is_process, QueryError, QueryResult, QueryValue};
pub use span::SourceSpan;
pub use validate::validate as validate_model;

/// Run the whole frontend over `source`: tokenize, parse, resolve, build.
///
/// All frontend problems found in one run are returned together as
/// diagnostics (codes `L1` lex, `P1` parse, `R1`..`R3` resolve, `B1`
/// build). The returned model still needs [`validate`](validate::validate)
/// for the semantic rule suite.
pub fn compile(source: &str, file: &str) -> Result<Model, Vec<Diagnostic>> {
    let (tokens, lex_errors) = frontend::tokenize(source, file);
    if !lex_errors.is_empty() {
        return Err(lex_errors.iter().map(|e| e.to_diagnostic()).collect());
    }
    let (ast, parse_errors) = frontend::parse(&tokens, file);
    if !parse_errors.is_empty() {
        return Err(parse_errors.iter().map(|e| e.to_diagnostic()).collect());
    }
    let resolved = match frontend::resolve(&ast) {
        Ok(resolved) => resolved,
        Err(errors) => return Err(errors.iter().map(|e| e.to_diagnostic()).collect()),
    };
    build_model(&resolved).map_err(|failure| {
        let mut d = Diagnostic::new("B1", Severity::Error, failure.error.to_string());
        if let Some(span) = failure.span {
            d = d.with_span(span);
        }
        vec![d]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compile_runs_the_full_pipeline() {
        let model = compile(
            "model M { property Title; thing Book possesses Title; }",
            "m.bww",
        )
        .unwrap();
        assert_eq!(model.things().len(), 2);
        assert!(validate_model(&model).is_empty());
    }

    #[test]
    fn compile_surfaces_frontend_errors_as_diagnostics() {
        let errs = compile("model M { thing $; }", "m.bww").unwrap_err();
        assert_eq!(errs[0].code, "L1");
        let errs = compile("model M { precedes A -> ; }", "m.bww").unwrap_err();
        assert_eq!(errs[0].code, "P1");
        let errs = compile("model M { thing Book possesses Ghost; }", "m.bww").unwrap_err();
        assert_eq!(errs[0].code, "R1");
        let errs = compile("model M { property A; property X = A & A; thing T possesses A; }", "m.bww")
            .unwrap_err();
        assert_eq!(errs[0].code, "B1");
    }
}
