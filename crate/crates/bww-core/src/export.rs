//! JSON export of a built model, and the matching reader.
//!
//! The document references every element by name, never by internal id, so
//! two builds of the same declarations — independent declarations in any
//! order — serialize identically: field order is fixed by the structs
//! below and every set-valued array is sorted by name. Lists that carry
//! order in the model (parts, schema attributes, process steps, history
//! observations) keep it.

use crate::diag::Diagnostic;
use crate::model::element::*;
use crate::model::ids::*;
use crate::model::{BuildError, Model, ModelBuilder};
use crate::validate::validate;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub things: Vec<ThingDoc>,
    pub properties: Vec<PropertyDoc>,
    pub schemas: Vec<SchemaDoc>,
    pub classes: Vec<ClassDoc>,
    pub kinds: Vec<KindDoc>,
    pub precedes: PrecedesDoc,
    pub processes: Vec<ProcessDoc>,
    pub diagnostics: Vec<DiagnosticDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThingDoc {
    pub name: String,
    #[serde(rename = "isNull")]
    pub is_null: bool,
    pub possesses: Vec<String>,
    pub parts: Vec<String>,
    pub states: Vec<String>,
    pub history: Vec<ObservationDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationDoc {
    pub state: String,
    pub time: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDoc {
    pub name: String,
    pub form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjuncts: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relata: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binding: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDoc {
    pub name: String,
    pub describes: String,
    pub attributes: Vec<AttributeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDoc {
    pub name: String,
    pub represents: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDoc {
    pub name: String,
    pub characteristic: String,
    /// Computed extension; declared ones are only checked (rule V4).
    pub extension: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindDoc {
    pub name: String,
    pub properties: Vec<String>,
    pub extension: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecedesDoc {
    pub base: Vec<[String; 2]>,
    pub closure: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessDoc {
    pub name: String,
    pub subject: String,
    pub steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticDoc {
    pub code: String,
    pub severity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<u32>,
    pub message: String,
}

impl DiagnosticDoc {
    pub fn from_diagnostic(d: &Diagnostic) -> Self {
        DiagnosticDoc {
            code: d.code.to_string(),
            severity: d.severity.to_string(),
            subject: d.subject.clone(),
            file: d.span.as_ref().map(|s| s.file.to_string()),
            line: d.span.as_ref().map(|s| s.start_line),
            column: d.span.as_ref().map(|s| s.start_col),
            message: d.message.clone(),
        }
    }
}

fn sorted_names<I: IntoIterator<Item = String>>(names: I) -> Vec<String> {
    let mut v: Vec<String> = names.into_iter().collect();
    v.sort();
    v
}

/// Serialize `model` (and its validation report) into the export document.
pub fn export_model(model: &Model) -> ModelDoc {
    let mut things: Vec<ThingDoc> = model
        .things()
        .iter()
        .map(|t| {
            let history = model
                .history_of(t.id)
                .map(|h| {
                    h.observations
                        .iter()
                        .map(|o| ObservationDoc {
                            state: model.state_name(o.state).to_string(),
                            time: o.at.tick(),
                        })
                        .collect()
                })
                .unwrap_or_default();
            ThingDoc {
                name: t.name.clone(),
                is_null: t.is_null,
                possesses: sorted_names(t.possessed.iter().map(|p| model.property_name(*p).to_string())),
                parts: t.parts.iter().map(|p| model.thing_name(*p).to_string()).collect(),
                states: sorted_names(
                    model
                        .states()
                        .iter()
                        .filter(|s| s.owner == t.id)
                        .map(|s| s.name.clone()),
                ),
                history,
            }
        })
        .collect();
    things.sort_by(|a, b| a.name.cmp(&b.name));

    let mut properties: Vec<PropertyDoc> = model
        .properties()
        .iter()
        .map(|p| match &p.form {
            PropertyForm::Intrinsic => PropertyDoc {
                name: p.name.clone(),
                form: "intrinsic".into(),
                conjuncts: None,
                relata: None,
                binding: None,
            },
            PropertyForm::Mutual { relata, binding } => PropertyDoc {
                name: p.name.clone(),
                form: "mutual".into(),
                conjuncts: None,
                relata: Some(relata.iter().map(|t| model.thing_name(*t).to_string()).collect()),
                binding: Some(*binding),
            },
            PropertyForm::Complex { conjuncts } => PropertyDoc {
                name: p.name.clone(),
                form: "complex".into(),
                conjuncts: Some(sorted_names(
                    conjuncts.iter().map(|c| model.property_name(*c).to_string()),
                )),
                relata: None,
                binding: None,
            },
        })
        .collect();
    properties.sort_by(|a, b| a.name.cmp(&b.name));

    let mut schemas: Vec<SchemaDoc> = model
        .schemas()
        .iter()
        .map(|s| SchemaDoc {
            name: s.name.clone(),
            describes: model.thing_name(s.describes).to_string(),
            attributes: s
                .attributes
                .iter()
                .map(|a| AttributeDoc {
                    name: a.name.clone(),
                    represents: model.property_name(a.represents).to_string(),
                })
                .collect(),
        })
        .collect();
    schemas.sort_by(|a, b| a.name.cmp(&b.name));

    let mut classes: Vec<ClassDoc> = model
        .classes()
        .iter()
        .map(|c| ClassDoc {
            name: c.name.clone(),
            characteristic: model.property_name(c.characteristic).to_string(),
            extension: sorted_names(
                model
                    .class_extension(c.id)
                    .unwrap_or_default()
                    .iter()
                    .map(|t| model.thing_name(*t).to_string()),
            ),
        })
        .collect();
    classes.sort_by(|a, b| a.name.cmp(&b.name));

    let mut kinds: Vec<KindDoc> = model
        .kinds()
        .iter()
        .map(|k| KindDoc {
            name: k.name.clone(),
            properties: sorted_names(k.properties.iter().map(|p| model.property_name(*p).to_string())),
            extension: sorted_names(
                model
                    .kind_extension(k.id)
                    .unwrap_or_default()
                    .iter()
                    .map(|t| model.thing_name(*t).to_string()),
            ),
        })
        .collect();
    kinds.sort_by(|a, b| a.name.cmp(&b.name));

    let name_pair = |&(a, b): &(PropertyId, PropertyId)| {
        [
            model.property_name(a).to_string(),
            model.property_name(b).to_string(),
        ]
    };
    let mut base: Vec<[String; 2]> = model.precedes_relation().base.keys().map(name_pair).collect();
    base.sort();
    let mut closure: Vec<[String; 2]> = model.precedes_closure().iter().map(name_pair).collect();
    closure.sort();

    let mut processes: Vec<ProcessDoc> = model
        .processes()
        .iter()
        .map(|p| ProcessDoc {
            name: p.name.clone(),
            subject: model.thing_name(p.subject).to_string(),
            steps: p
                .steps
                .iter()
                .map(|s| StepDoc {
                    from: model.state_name(s.from).to_string(),
                    to: model.state_name(s.to).to_string(),
                })
                .collect(),
        })
        .collect();
    processes.sort_by(|a, b| a.name.cmp(&b.name));

    let diagnostics = validate(model)
        .iter()
        .map(DiagnosticDoc::from_diagnostic)
        .collect();

    ModelDoc {
        things,
        properties,
        schemas,
        classes,
        kinds,
        precedes: PrecedesDoc { base, closure },
        processes,
        diagnostics,
    }
}

/// Pretty-printed JSON for the export document.
pub fn to_json(doc: &ModelDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("export document serializes");
    s.push('\n');
    s
}

/// Why an export document could not be read back into a model.
#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document references unknown name '{0}'")]
    UnknownName(String),
    #[error("document rejected by the model kernel: {0}")]
    Build(#[from] BuildError),
    #[error("unknown property form '{0}'")]
    UnknownForm(String),
}

/// Rebuild a model from an export document.
///
/// Identifiers are reassigned; equality with the original is structural.
/// Re-exporting the imported model reproduces the document (diagnostics
/// keep their codes but lose source positions).
pub fn import_model(doc: &ModelDoc) -> Result<Model, ImportError> {
    let mut b = ModelBuilder::new();

    // Properties first: intrinsics, then mutual (needs things) and complex
    // (needs other properties) in dependency order. Names are interned up
    // front so cross-references resolve by name.
    let mut property_ids: std::collections::BTreeMap<String, PropertyId> =
        std::collections::BTreeMap::new();
    let mut thing_ids: std::collections::BTreeMap<String, ThingId> =
        std::collections::BTreeMap::new();
    thing_ids.insert("null".to_string(), ThingId::new(0));

    for p in &doc.properties {
        if p.form == "intrinsic" {
            property_ids.insert(p.name.clone(), b.declare_property(&p.name)?);
        }
    }
    for t in &doc.things {
        if t.is_null {
            continue;
        }
        // Possession and parts are wired after every name exists.
        thing_ids.insert(t.name.clone(), b.declare_thing(&t.name, &[], &[])?);
    }
    for p in &doc.properties {
        if p.form == "mutual" {
            let relata: Vec<ThingId> = p
                .relata
                .clone()
                .unwrap_or_default()
                .iter()
                .map(|n| lookup(&thing_ids, n))
                .collect::<Result<_, _>>()?;
            let id = b.declare_mutual_property(&p.name, &relata, p.binding.unwrap_or(false))?;
            property_ids.insert(p.name.clone(), id);
        }
    }
    for p in &doc.properties {
        if p.form == "complex" {
            let conjuncts: Vec<PropertyId> = p
                .conjuncts
                .clone()
                .unwrap_or_default()
                .iter()
                .map(|n| lookup(&property_ids, n))
                .collect::<Result<_, _>>()?;
            let id = b.declare_complex_property(&p.name, &conjuncts)?;
            property_ids.insert(p.name.clone(), id);
        } else if p.form != "intrinsic" && p.form != "mutual" {
            return Err(ImportError::UnknownForm(p.form.clone()));
        }
    }

    let mut state_ids: std::collections::BTreeMap<(ThingId, String), StateId> =
        std::collections::BTreeMap::new();
    for t in &doc.things {
        if t.is_null {
            continue;
        }
        let id = lookup(&thing_ids, &t.name)?;
        for prop in &t.possesses {
            b.add_possession(id, lookup(&property_ids, prop)?)?;
        }
        for state in &t.states {
            state_ids.insert((id, state.clone()), b.declare_state(id, state)?);
        }
    }
    // Parts go through the raw registry path: an exported model may carry
    // diagnosed part cycles, which associate() would refuse.
    for t in &doc.things {
        if t.is_null {
            continue;
        }
        let id = lookup(&thing_ids, &t.name)?;
        for part in &t.parts {
            let part_id = lookup(&thing_ids, part)?;
            b.add_part(id, part_id)?;
        }
    }

    for t in &doc.things {
        if t.history.is_empty() {
            continue;
        }
        let id = lookup(&thing_ids, &t.name)?;
        let observations: Vec<(StateId, TimePoint)> = t
            .history
            .iter()
            .map(|o| {
                state_lookup(&state_ids, id, &o.state)
                    .map(|s| (s, TimePoint(o.time)))
            })
            .collect::<Result<_, _>>()?;
        b.record_history(id, &observations)?;
    }

    for s in &doc.schemas {
        let describes = lookup(&thing_ids, &s.describes)?;
        let attrs: Vec<(&str, PropertyId)> = s
            .attributes
            .iter()
            .map(|a| lookup(&property_ids, &a.represents).map(|p| (a.name.as_str(), p)))
            .collect::<Result<_, _>>()?;
        b.declare_schema(&s.name, describes, &attrs)?;
    }

    for c in &doc.classes {
        b.declare_class(&c.name, lookup(&property_ids, &c.characteristic)?, None)?;
    }
    for k in &doc.kinds {
        let props: Vec<PropertyId> = k
            .properties
            .iter()
            .map(|p| lookup(&property_ids, p))
            .collect::<Result<_, _>>()?;
        b.declare_kind(&k.name, &props, None)?;
    }

    for pair in &doc.precedes.base {
        b.declare_precedes(lookup(&property_ids, &pair[0])?, lookup(&property_ids, &pair[1])?)?;
    }

    for p in &doc.processes {
        let subject = lookup(&thing_ids, &p.subject)?;
        let steps: Vec<(StateId, StateId)> = p
            .steps
            .iter()
            .map(|s| {
                Ok((
                    state_lookup(&state_ids, subject, &s.from)?,
                    state_lookup(&state_ids, subject, &s.to)?,
                ))
            })
            .collect::<Result<_, ImportError>>()?;
        b.declare_process(&p.name, subject, &steps)?;
    }

    Ok(b.build())
}

fn lookup<K: Copy>(
    map: &std::collections::BTreeMap<String, K>,
    name: &str,
) -> Result<K, ImportError> {
    map.get(name)
        .copied()
        .ok_or_else(|| ImportError::UnknownName(name.to_string()))
}

fn state_lookup(
    map: &std::collections::BTreeMap<(ThingId, String), StateId>,
    subject: ThingId,
    name: &str,
) -> Result<StateId, ImportError> {
    if let Some(&id) = map.get(&(subject, name.to_string())) {
        return Ok(id);
    }
    // Foreign state (a diagnosed model): fall back to any owner, in the
    // same deterministic order the resolver uses.
    map.iter()
        .filter(|((_, n), _)| n == name)
        .map(|(_, id)| *id)
        .next()
        .ok_or_else(|| ImportError::UnknownName(name.to_string()))
}

/// Validation report in machine form, shared by `check --format json` and
/// the export document.
pub fn diagnostics_json(diags: &[Diagnostic]) -> String {
    let docs: Vec<DiagnosticDoc> = diags.iter().map(DiagnosticDoc::from_diagnostic).collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("diagnostics serialize");
    s.push('\n');
    s
}

/// Strip source positions from the diagnostics so re-imported models (which
/// have no source text) compare equal to their originals.
pub fn strip_diagnostic_positions(doc: &mut ModelDoc) {
    for d in &mut doc.diagnostics {
        d.file = None;
        d.line = None;
        d.column = None;
    }
}

impl ModelDoc {
    pub fn from_json(json: &str) -> Result<ModelDoc, serde_json::Error> {
        serde_json::from_str(json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model_exports_only_the_null_thing() {
        let model = ModelBuilder::new().build();
        let doc = export_model(&model);
        assert_eq!(doc.things.len(), 1);
        assert_eq!(doc.things[0].name, "null");
        assert!(doc.things[0].is_null);
        assert!(doc.properties.is_empty());
        assert!(doc.precedes.base.is_empty());
        assert!(doc.diagnostics.is_empty());
        let json = to_json(&doc);
        assert!(json.contains("\"isNull\": true"));
    }

    #[test]
    fn export_import_export_is_stable() {
        let mut b = ModelBuilder::new();
        let title = b.declare_property("Title").unwrap();
        let isbn = b.declare_property("ISBN").unwrap();
        let combo = b.declare_complex_property("Catalogued", &[title, isbn]).unwrap();
        let book = b.declare_thing("Book", &[title, isbn, combo], &[]).unwrap();
        let on = b.declare_state(book, "onTheRack").unwrap();
        let issued = b.declare_state(book, "issued").unwrap();
        b.record_history(book, &[(on, TimePoint(0)), (issued, TimePoint(5))]).unwrap();
        b.declare_schema("Book1", book, &[("Title", title), ("ISBN", isbn)]).unwrap();
        b.declare_class("Catalogue", title, None).unwrap();
        b.declare_kind("Full", &[title, isbn], None).unwrap();
        b.declare_precedes(title, isbn).unwrap();
        b.declare_process("Borrow", book, &[(on, issued)]).unwrap();
        let model = b.build();

        let doc = export_model(&model);
        let reimported = import_model(&doc).unwrap();
        let doc2 = export_model(&reimported);
        assert_eq!(doc, doc2);
        assert_eq!(to_json(&doc), to_json(&doc2));
    }

    #[test]
    fn declaration_order_does_not_change_the_document() {
        let forwards = {
            let mut b = ModelBuilder::new();
            let a = b.declare_property("Alpha").unwrap();
            let z = b.declare_property("Zeta").unwrap();
            b.declare_thing("t1", &[a], &[]).unwrap();
            b.declare_thing("t2", &[z], &[]).unwrap();
            b.build()
        };
        let backwards = {
            let mut b = ModelBuilder::new();
            let z = b.declare_property("Zeta").unwrap();
            let a = b.declare_property("Alpha").unwrap();
            b.declare_thing("t2", &[z], &[]).unwrap();
            b.declare_thing("t1", &[a], &[]).unwrap();
            b.build()
        };
        assert_eq!(to_json(&export_model(&forwards)), to_json(&export_model(&backwards)));
    }
}
