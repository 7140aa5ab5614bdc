//! Diagnostics: stable rule codes, severities, and rendering.
//!
//! Every finding the toolchain reports — lexer, parser, resolver, or
//! validator — is surfaced as a [`Diagnostic`]. Codes are stable across
//! releases; tooling may match on them.

use crate::span::SourceSpan;
use std::fmt;

/// How serious a diagnostic is. Only `Error` affects exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single finding, tied to a rule code and (when the model came from
/// source text) a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Stable rule code: `V1`..`V11`, `W1`, `I2` from the validator,
    /// `L1`/`P1`/`R1`..`R3` from the frontend.
    pub code: &'static str,
    pub severity: Severity,
    /// Name of the model element the finding is about, when there is one.
    pub subject: Option<String>,
    pub span: Option<SourceSpan>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, severity: Severity, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity,
            subject: None,
            span: None,
            message: message.into(),
        }
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = Some(subject.into());
        self
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    /// Deterministic ordering: file position first, then code, then message.
    /// Diagnostics without a span sort after those with one.
    pub fn sort_key(&self) -> (bool, String, u32, u32, &'static str, &str) {
        match &self.span {
            Some(s) => (
                false,
                s.file.to_string(),
                s.start_line,
                s.start_col,
                self.code,
                &self.message,
            ),
            None => (true, String::new(), 0, 0, self.code, &self.message),
        }
    }

    /// Render as `FILE:LINE:COL: SEVERITY[CODE]: MESSAGE`, with the position
    /// prefix dropped for span-less diagnostics. `color` adds ANSI coloring
    /// to the severity token.
    pub fn render(&self, color: bool) -> String {
        let sev = if color {
            let code = match self.severity {
                Severity::Error => "31",
                Severity::Warning => "33",
                Severity::Info => "36",
            };
            format!("\x1b[{}m{}\x1b[0m", code, self.severity)
        } else {
            self.severity.to_string()
        };
        match &self.span {
            Some(span) => format!("{}: {}[{}]: {}", span, sev, self.code, self.message),
            None => format!("{}[{}]: {}", sev, self.code, self.message),
        }
    }
}

/// Sort diagnostics into their deterministic reporting order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}
