//! Name resolution: binds every identifier in an AST to a model-kernel id.
//!
//! Two passes. The first collects declared names per namespace so forward
//! references work; the second binds every use. The reserved name `null`
//! always refers to the predefined null thing and cannot be declared.
//!
//! State references inside `history` and `process` declarations resolve
//! against the subject's own states first and fall back to a state of the
//! same name on another thing (in owner-name order). The fallback binds a
//! foreign state on purpose: ownership is a validation rule (V8/V11) and
//! should be reported with a span, not masked as an unknown name.

use crate::diag::{Diagnostic, Severity};
use crate::frontend::ast::{Ast, Decl, Ident};
use crate::model::ids::*;
use crate::model::TimePoint;
use crate::span::SourceSpan;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("unknown {namespace} '{name}'")]
    Unknown {
        namespace: Namespace,
        name: String,
        span: SourceSpan,
    },
    #[error("duplicate {namespace} '{name}'")]
    Duplicate {
        namespace: Namespace,
        name: String,
        span: SourceSpan,
    },
    #[error("'{name}' is reserved for the predefined null thing")]
    Reserved { name: String, span: SourceSpan },
}

impl ResolveError {
    pub fn span(&self) -> &SourceSpan {
        match self {
            ResolveError::Unknown { span, .. } => span,
            ResolveError::Duplicate { span, .. } => span,
            ResolveError::Reserved { span, .. } => span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let code = match self {
            ResolveError::Unknown { .. } => "R1",
            ResolveError::Duplicate { .. } => "R2",
            ResolveError::Reserved { .. } => "R3",
        };
        Diagnostic::new(code, Severity::Error, self.to_string()).with_span(self.span().clone())
    }
}

/// An AST with every name bound; the input [`build_model`] consumes.
///
/// [`build_model`]: crate::model::build_model
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedAst {
    pub model_name: String,
    pub properties: Vec<ResolvedProperty>,
    pub things: Vec<ResolvedThing>,
    pub states: Vec<ResolvedState>,
    pub schemas: Vec<ResolvedSchema>,
    pub classes: Vec<ResolvedClass>,
    pub kinds: Vec<ResolvedKind>,
    pub precedes: Vec<ResolvedPrecedes>,
    pub histories: Vec<ResolvedHistory>,
    pub processes: Vec<ResolvedProcess>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedProperty {
    pub id: PropertyId,
    pub name: String,
    pub form: ResolvedForm,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolvedForm {
    Intrinsic,
    Mutual { relata: Vec<ThingId>, binding: bool },
    /// Conjunct ids exactly as written; flattening happens at build.
    Complex { conjuncts: Vec<PropertyId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedThing {
    pub id: ThingId,
    pub name: String,
    pub possessed: Vec<PropertyId>,
    pub parts: Vec<ThingId>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedState {
    pub id: StateId,
    pub name: String,
    pub owner: ThingId,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedAttribute {
    pub name: String,
    pub represents: PropertyId,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSchema {
    pub name: String,
    pub describes: ThingId,
    pub attributes: Vec<ResolvedAttribute>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedClass {
    pub name: String,
    pub characteristic: PropertyId,
    pub declared_extension: Option<Vec<ThingId>>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedKind {
    pub name: String,
    pub properties: Vec<PropertyId>,
    pub declared_extension: Option<Vec<ThingId>>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPrecedes {
    pub first: PropertyId,
    pub then: PropertyId,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedObservation {
    pub state: StateId,
    pub at: TimePoint,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedHistory {
    pub subject: ThingId,
    pub observations: Vec<ResolvedObservation>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedStep {
    pub from: StateId,
    pub to: StateId,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedProcess {
    pub name: String,
    pub subject: ThingId,
    pub steps: Vec<ResolvedStep>,
    pub span: SourceSpan,
}

struct Scope {
    properties: BTreeMap<String, PropertyId>,
    things: BTreeMap<String, ThingId>,
    states: BTreeMap<(ThingId, String), StateId>,
    /// State name -> owners carrying it, sorted by owner name for a
    /// deterministic foreign-state fallback.
    states_by_name: BTreeMap<String, Vec<(String, StateId)>>,
    schemas: BTreeMap<String, ()>,
    classes: BTreeMap<String, ()>,
    kinds: BTreeMap<String, ()>,
    processes: BTreeMap<String, ()>,
}

/// Resolve an AST. All resolution errors in the file are collected; the
/// result is only produced when there are none.
pub fn resolve(ast: &Ast) -> Result<ResolvedAst, Vec<ResolveError>> {
    let mut errors = Vec::new();
    let scope = collect(ast, &mut errors);
    let resolved = bind(ast, &scope, &mut errors);
    if errors.is_empty() {
        Ok(resolved)
    } else {
        Err(errors)
    }
}

fn declare<V: Copy>(
    map: &mut BTreeMap<String, V>,
    namespace: Namespace,
    ident: &Ident,
    value: V,
    errors: &mut Vec<ResolveError>,
) {
    if ident.text == "null" {
        errors.push(ResolveError::Reserved {
            name: ident.text.clone(),
            span: ident.span.clone(),
        });
        return;
    }
    if map.contains_key(&ident.text) {
        errors.push(ResolveError::Duplicate {
            namespace,
            name: ident.text.clone(),
            span: ident.span.clone(),
        });
        return;
    }
    map.insert(ident.text.clone(), value);
}

fn collect(ast: &Ast, errors: &mut Vec<ResolveError>) -> Scope {
    let mut scope = Scope {
        properties: BTreeMap::new(),
        things: BTreeMap::new(),
        states: BTreeMap::new(),
        states_by_name: BTreeMap::new(),
        schemas: BTreeMap::new(),
        classes: BTreeMap::new(),
        kinds: BTreeMap::new(),
        processes: BTreeMap::new(),
    };
    scope.things.insert("null".to_string(), ThingId::new(0));

    let mut next_property = 0usize;
    let mut next_thing = 1usize; // 0 is the null thing
    for decl in &ast.decls {
        match decl {
            Decl::Property { name, .. } | Decl::MutualProperty { name, .. } => {
                let id = PropertyId::new(next_property);
                let before = scope.properties.len();
                declare(&mut scope.properties, Namespace::Property, name, id, errors);
                if scope.properties.len() > before {
                    next_property += 1;
                }
            }
            Decl::Thing { name, .. } => {
                let id = ThingId::new(next_thing);
                let before = scope.things.len();
                declare(&mut scope.things, Namespace::Thing, name, id, errors);
                if scope.things.len() > before {
                    next_thing += 1;
                }
            }
            Decl::Schema { name, .. } => {
                declare(&mut scope.schemas, Namespace::Schema, name, (), errors)
            }
            Decl::Class { name, .. } => {
                declare(&mut scope.classes, Namespace::Class, name, (), errors)
            }
            Decl::Kind { name, .. } => declare(&mut scope.kinds, Namespace::Kind, name, (), errors),
            Decl::Process { name, .. } => {
                declare(&mut scope.processes, Namespace::Process, name, (), errors)
            }
            _ => {}
        }
    }

    // States need the thing table, so they go in a second sweep.
    let mut next_state = 0usize;
    for decl in &ast.decls {
        if let Decl::States { owner, states } = decl {
            if owner.text == "null" {
                errors.push(ResolveError::Reserved {
                    name: owner.text.clone(),
                    span: owner.span.clone(),
                });
                continue;
            }
            let Some(&owner_id) = scope.things.get(&owner.text) else {
                errors.push(ResolveError::Unknown {
                    namespace: Namespace::Thing,
                    name: owner.text.clone(),
                    span: owner.span.clone(),
                });
                continue;
            };
            for state in states {
                let key = (owner_id, state.text.clone());
                if scope.states.contains_key(&key) {
                    errors.push(ResolveError::Duplicate {
                        namespace: Namespace::State,
                        name: state.text.clone(),
                        span: state.span.clone(),
                    });
                    continue;
                }
                let id = StateId::new(next_state);
                next_state += 1;
                scope.states.insert(key, id);
                scope
                    .states_by_name
                    .entry(state.text.clone())
                    .or_default()
                    .push((owner.text.clone(), id));
            }
        }
    }
    for owners in scope.states_by_name.values_mut() {
        owners.sort();
    }

    scope
}

impl Scope {
    fn property(&self, ident: &Ident, errors: &mut Vec<ResolveError>) -> Option<PropertyId> {
        match self.properties.get(&ident.text) {
            Some(&id) => Some(id),
            None => {
                errors.push(ResolveError::Unknown {
                    namespace: Namespace::Property,
                    name: ident.text.clone(),
                    span: ident.span.clone(),
                });
                None
            }
        }
    }

    fn thing(&self, ident: &Ident, errors: &mut Vec<ResolveError>) -> Option<ThingId> {
        match self.things.get(&ident.text) {
            Some(&id) => Some(id),
            None => {
                errors.push(ResolveError::Unknown {
                    namespace: Namespace::Thing,
                    name: ident.text.clone(),
                    span: ident.span.clone(),
                });
                None
            }
        }
    }

    /// Subject-first state lookup with a deterministic foreign fallback.
    fn state(&self, subject: ThingId, ident: &Ident, errors: &mut Vec<ResolveError>) -> Option<StateId> {
        if let Some(&id) = self.states.get(&(subject, ident.text.clone())) {
            return Some(id);
        }
        if let Some(owners) = self.states_by_name.get(&ident.text) {
            if let Some((_, id)) = owners.first() {
                return Some(*id);
            }
        }
        errors.push(ResolveError::Unknown {
            namespace: Namespace::State,
            name: ident.text.clone(),
            span: ident.span.clone(),
        });
        None
    }
}

fn bind(ast: &Ast, scope: &Scope, errors: &mut Vec<ResolveError>) -> ResolvedAst {
    let mut out = ResolvedAst {
        model_name: ast.name.text.clone(),
        properties: Vec::new(),
        things: Vec::new(),
        states: Vec::new(),
        schemas: Vec::new(),
        classes: Vec::new(),
        kinds: Vec::new(),
        precedes: Vec::new(),
        histories: Vec::new(),
        processes: Vec::new(),
    };

    for decl in &ast.decls {
        match decl {
            Decl::Property { name, conjuncts } => {
                let Some(&id) = scope.properties.get(&name.text) else {
                    continue; // declaration itself failed in collect()
                };
                if id.index() != out.properties.len() {
                    // A duplicate re-declaration; already reported.
                    continue;
                }
                let form = match conjuncts {
                    None => ResolvedForm::Intrinsic,
                    Some(cs) => ResolvedForm::Complex {
                        conjuncts: cs
                            .iter()
                            .filter_map(|c| scope.property(c, errors))
                            .collect(),
                    },
                };
                out.properties.push(ResolvedProperty {
                    id,
                    name: name.text.clone(),
                    form,
                    span: name.span.clone(),
                });
            }
            Decl::MutualProperty {
                name,
                relata,
                binding,
            } => {
                let Some(&id) = scope.properties.get(&name.text) else {
                    continue;
                };
                if id.index() != out.properties.len() {
                    continue;
                }
                let relata: Vec<ThingId> = relata
                    .iter()
                    .filter_map(|r| scope.thing(r, errors))
                    .collect();
                out.properties.push(ResolvedProperty {
                    id,
                    name: name.text.clone(),
                    form: ResolvedForm::Mutual {
                        relata,
                        binding: *binding,
                    },
                    span: name.span.clone(),
                });
            }
            Decl::Thing {
                name,
                possesses,
                parts,
            } => {
                let Some(&id) = scope.things.get(&name.text) else {
                    continue;
                };
                if id.index() != out.things.len() + 1 {
                    continue;
                }
                out.things.push(ResolvedThing {
                    id,
                    name: name.text.clone(),
                    possessed: possesses
                        .iter()
                        .filter_map(|p| scope.property(p, errors))
                        .collect(),
                    parts: parts.iter().filter_map(|p| scope.thing(p, errors)).collect(),
                    span: name.span.clone(),
                });
            }
            Decl::States { owner, states } => {
                let Some(&owner_id) = scope.things.get(&owner.text) else {
                    continue;
                };
                for state in states {
                    let Some(&id) = scope.states.get(&(owner_id, state.text.clone())) else {
                        continue;
                    };
                    if id.index() != out.states.len() {
                        continue;
                    }
                    out.states.push(ResolvedState {
                        id,
                        name: state.text.clone(),
                        owner: owner_id,
                        span: state.span.clone(),
                    });
                }
            }
            Decl::Schema {
                name,
                describes,
                attributes,
            } => {
                let Some(describes_id) = scope.thing(describes, errors) else {
                    continue;
                };
                let attrs: Vec<ResolvedAttribute> = attributes
                    .iter()
                    .filter_map(|a| {
                        scope.property(a, errors).map(|p| ResolvedAttribute {
                            name: a.text.clone(),
                            represents: p,
                            span: a.span.clone(),
                        })
                    })
                    .collect();
                out.schemas.push(ResolvedSchema {
                    name: name.text.clone(),
                    describes: describes_id,
                    attributes: attrs,
                    span: name.span.clone(),
                });
            }
            Decl::Class {
                name,
                characteristic,
                extension,
            } => {
                let Some(ch) = scope.property(characteristic, errors) else {
                    continue;
                };
                let declared_extension = extension.as_ref().map(|ext| {
                    ext.iter().filter_map(|t| scope.thing(t, errors)).collect()
                });
                out.classes.push(ResolvedClass {
                    name: name.text.clone(),
                    characteristic: ch,
                    declared_extension,
                    span: name.span.clone(),
                });
            }
            Decl::Kind {
                name,
                properties,
                extension,
            } => {
                let props: Vec<PropertyId> = properties
                    .iter()
                    .filter_map(|p| scope.property(p, errors))
                    .collect();
                let declared_extension = extension.as_ref().map(|ext| {
                    ext.iter().filter_map(|t| scope.thing(t, errors)).collect()
                });
                out.kinds.push(ResolvedKind {
                    name: name.text.clone(),
                    properties: props,
                    declared_extension,
                    span: name.span.clone(),
                });
            }
            Decl::Precedes { first, then } => {
                let a = scope.property(first, errors);
                let b = scope.property(then, errors);
                if let (Some(a), Some(b)) = (a, b) {
                    out.precedes.push(ResolvedPrecedes {
                        first: a,
                        then: b,
                        span: first.span.to(&then.span),
                    });
                }
            }
            Decl::History {
                subject,
                observations,
            } => {
                let Some(subject_id) = scope.thing(subject, errors) else {
                    continue;
                };
                let obs: Vec<ResolvedObservation> = observations
                    .iter()
                    .filter_map(|o| {
                        scope.state(subject_id, &o.state, errors).map(|s| ResolvedObservation {
                            state: s,
                            at: TimePoint(o.time),
                            span: o.span.clone(),
                        })
                    })
                    .collect();
                out.histories.push(ResolvedHistory {
                    subject: subject_id,
                    observations: obs,
                    span: subject.span.clone(),
                });
            }
            Decl::Process {
                name,
                subject,
                steps,
            } => {
                let Some(subject_id) = scope.thing(subject, errors) else {
                    continue;
                };
                let resolved_steps: Vec<ResolvedStep> = steps
                    .iter()
                    .filter_map(|s| {
                        let from = scope.state(subject_id, &s.from, errors)?;
                        let to = scope.state(subject_id, &s.to, errors)?;
                        Some(ResolvedStep {
                            from,
                            to,
                            span: s.span.clone(),
                        })
                    })
                    .collect();
                out.processes.push(ResolvedProcess {
                    name: name.text.clone(),
                    subject: subject_id,
                    steps: resolved_steps,
                    span: name.span.clone(),
                });
            }
        }
    }

    out
}
