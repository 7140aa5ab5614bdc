//! Syntax tree for BWW-ML source files, plus the canonical printer.

use crate::span::SourceSpan;
use std::fmt::Write;

/// A name occurrence in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub text: String,
    pub span: SourceSpan,
}

/// One parsed file: a single `model NAME { ... }` block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ast {
    pub name: Ident,
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    /// `property P;` or `property P = A & B;`
    Property {
        name: Ident,
        conjuncts: Option<Vec<Ident>>,
    },
    /// `mutual property M (a, b) binding;`
    MutualProperty {
        name: Ident,
        relata: Vec<Ident>,
        binding: bool,
    },
    /// `thing T possesses P, Q parts a, b;`
    Thing {
        name: Ident,
        possesses: Vec<Ident>,
        parts: Vec<Ident>,
    },
    /// `states of T: s1, s2;`
    States { owner: Ident, states: Vec<Ident> },
    /// `schema S of T (P, Q);`
    Schema {
        name: Ident,
        describes: Ident,
        attributes: Vec<Ident>,
    },
    /// `class C characteristic P = { t1, t2 };`
    Class {
        name: Ident,
        characteristic: Ident,
        extension: Option<Vec<Ident>>,
    },
    /// `kind K properties P, Q = { t1 };`
    Kind {
        name: Ident,
        properties: Vec<Ident>,
        extension: Option<Vec<Ident>>,
    },
    /// `precedes A -> B;`
    Precedes { first: Ident, then: Ident },
    /// `history t { s1 @ 0; s2 @ 5; }`
    History {
        subject: Ident,
        observations: Vec<ObservationDecl>,
    },
    /// `process P of T = <a, b>, <b, c>;`
    Process {
        name: Ident,
        subject: Ident,
        steps: Vec<PairDecl>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationDecl {
    pub state: Ident,
    pub time: u64,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDecl {
    pub from: Ident,
    pub to: Ident,
    pub span: SourceSpan,
}

fn comma_list(items: &[Ident]) -> String {
    items
        .iter()
        .map(|i| i.text.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Render an AST back to canonical source text. `parse(print(ast))`
/// reproduces the tree (spans aside), and `print` is a fixed point of
/// `print ∘ parse`.
pub fn print(ast: &Ast) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", ast.name.text);
    for decl in &ast.decls {
        match decl {
            Decl::Property { name, conjuncts } => match conjuncts {
                None => {
                    let _ = writeln!(out, "  property {};", name.text);
                }
                Some(cs) => {
                    let joined = cs
                        .iter()
                        .map(|c| c.text.as_str())
                        .collect::<Vec<_>>()
                        .join(" & ");
                    let _ = writeln!(out, "  property {} = {};", name.text, joined);
                }
            },
            Decl::MutualProperty {
                name,
                relata,
                binding,
            } => {
                let flag = if *binding { "binding" } else { "nonbinding" };
                let _ = writeln!(out, "  mutual property {} ({}) {};", name.text, comma_list(relata), flag);
            }
            Decl::Thing {
                name,
                possesses,
                parts,
            } => {
                let mut line = format!("  thing {}", name.text);
                if !possesses.is_empty() {
                    let _ = write!(line, " possesses {}", comma_list(possesses));
                }
                if !parts.is_empty() {
                    let _ = write!(line, " parts {}", comma_list(parts));
                }
                let _ = writeln!(out, "{};", line);
            }
            Decl::States { owner, states } => {
                let _ = writeln!(out, "  states of {}: {};", owner.text, comma_list(states));
            }
            Decl::Schema {
                name,
                describes,
                attributes,
            } => {
                let _ = writeln!(
                    out,
                    "  schema {} of {} ({});",
                    name.text,
                    describes.text,
                    comma_list(attributes)
                );
            }
            Decl::Class {
                name,
                characteristic,
                extension,
            } => {
                let mut line = format!("  class {} characteristic {}", name.text, characteristic.text);
                if let Some(ext) = extension {
                    if ext.is_empty() {
                        let _ = write!(line, " = {{ }}");
                    } else {
                        let _ = write!(line, " = {{ {} }}", comma_list(ext));
                    }
                }
                let _ = writeln!(out, "{};", line);
            }
            Decl::Kind {
                name,
                properties,
                extension,
            } => {
                let mut line = format!("  kind {} properties {}", name.text, comma_list(properties));
                if let Some(ext) = extension {
                    if ext.is_empty() {
                        let _ = write!(line, " = {{ }}");
                    } else {
                        let _ = write!(line, " = {{ {} }}", comma_list(ext));
                    }
                }
                let _ = writeln!(out, "{};", line);
            }
            Decl::Precedes { first, then } => {
                let _ = writeln!(out, "  precedes {} -> {};", first.text, then.text);
            }
            Decl::History {
                subject,
                observations,
            } => {
                let _ = writeln!(out, "  history {} {{", subject.text);
                for obs in observations {
                    let _ = writeln!(out, "    {} @ {};", obs.state.text, obs.time);
                }
                let _ = writeln!(out, "  }}");
            }
            Decl::Process {
                name,
                subject,
                steps,
            } => {
                let pairs = steps
                    .iter()
                    .map(|p| format!("<{}, {}>", p.from.text, p.to.text))
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(out, "  process {} of {} = {};", name.text, subject.text, pairs);
            }
        }
    }
    out.push_str("}\n");
    out
}

impl Ast {
    /// Normalize every span to a fixed point, for structural comparison of
    /// trees that came from different renderings of the same model.
    pub fn erase_spans(&mut self) {
        fn wipe(ident: &mut Ident) {
            ident.span = SourceSpan::point(std::sync::Arc::from(""), 1, 1);
        }
        wipe(&mut self.name);
        for decl in &mut self.decls {
            match decl {
                Decl::Property { name, conjuncts } => {
                    wipe(name);
                    if let Some(cs) = conjuncts {
                        cs.iter_mut().for_each(wipe);
                    }
                }
                Decl::MutualProperty { name, relata, .. } => {
                    wipe(name);
                    relata.iter_mut().for_each(wipe);
                }
                Decl::Thing {
                    name,
                    possesses,
                    parts,
                } => {
                    wipe(name);
                    possesses.iter_mut().for_each(wipe);
                    parts.iter_mut().for_each(wipe);
                }
                Decl::States { owner, states } => {
                    wipe(owner);
                    states.iter_mut().for_each(wipe);
                }
                Decl::Schema {
                    name,
                    describes,
                    attributes,
                } => {
                    wipe(name);
                    wipe(describes);
                    attributes.iter_mut().for_each(wipe);
                }
                Decl::Class {
                    name,
                    characteristic,
                    extension,
                } => {
                    wipe(name);
                    wipe(characteristic);
                    if let Some(ext) = extension {
                        ext.iter_mut().for_each(wipe);
                    }
                }
                Decl::Kind {
                    name,
                    properties,
                    extension,
                } => {
                    wipe(name);
                    properties.iter_mut().for_each(wipe);
                    if let Some(ext) = extension {
                        ext.iter_mut().for_each(wipe);
                    }
                }
                Decl::Precedes { first, then } => {
                    wipe(first);
                    wipe(then);
                }
                Decl::History {
                    subject,
                    observations,
                } => {
                    wipe(subject);
                    for obs in observations {
                        wipe(&mut obs.state);
                        obs.span = SourceSpan::point(std::sync::Arc::from(""), 1, 1);
                    }
                }
                Decl::Process {
                    name,
                    subject,
                    steps,
                } => {
                    wipe(name);
                    wipe(subject);
                    for step in steps {
                        wipe(&mut step.from);
                        wipe(&mut step.to);
                        step.span = SourceSpan::point(std::sync::Arc::from(""), 1, 1);
                    }
                }
            }
        }
    }
}
