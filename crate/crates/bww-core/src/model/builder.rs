//! Model construction: the mutable builder, the checked composition
//! operations, and materialization of resolved source files.
//!
//! Name-level problems (duplicates, dangling references, declaring the
//! reserved null thing) are construction errors. Semantic problems a
//! source file can express — a thing without properties, a part-of cycle,
//! a non-composable process — build fine and are reported by the
//! validator, so a check run can surface all of them at once with spans.
//! The checked operations ([`ModelBuilder::associate`],
//! [`ModelBuilder::conjoin`], [`record_observation`]) refuse to *create*
//! such states programmatically.

use crate::diag::{Diagnostic, Severity};
use crate::frontend::resolver::{ResolvedAst, ResolvedForm};
use crate::model::element::*;
use crate::model::ids::*;
use crate::model::Model;
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// Why a model could not be constructed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("duplicate {namespace} name '{name}'")]
    DuplicateName { namespace: Namespace, name: String },
    #[error("reference to undeclared {namespace} '{name}'")]
    DanglingReference { namespace: Namespace, name: String },
    #[error("'null' names the predefined null thing and cannot be declared")]
    IllegalNullDeclaration,
    #[error("element names must be non-empty")]
    EmptyName,
    #[error("unknown property {0}")]
    UnknownProperty(PropertyId),
    #[error("unknown thing {0}")]
    UnknownThing(ThingId),
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("conjunction needs at least one property")]
    EmptyConjunction,
    #[error("complex property '{0}' flattens to fewer than two distinct conjuncts")]
    DegenerateComplex(String),
    #[error("complex property '{0}' is defined in terms of itself")]
    CircularConjunction(String),
    #[error("association needs at least one component")]
    EmptyAssociation,
    #[error("the null thing cannot be a component of an association")]
    NullAsComponent,
    #[error("association '{0}' would contain itself")]
    SelfContainment(String),
    #[error("schema '{0}' needs at least one attribute")]
    EmptySchema(String),
    #[error("kind '{0}' needs at least one property")]
    EmptyKind(String),
    #[error("process '{0}' needs at least one step")]
    EmptyProcess(String),
    #[error("an observation already exists at time {0}")]
    TimeCollision(u64),
    #[error("state is not owned by the history's subject")]
    ForeignState(StateId),
}

/// A [`BuildError`] pinned to the source position it arose from, when the
/// model came from a file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct BuildFailure {
    pub error: BuildError,
    pub span: Option<SourceSpan>,
}

impl std::fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.span {
            Some(span) => write!(f, "{}: {}", span, self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl From<BuildError> for BuildFailure {
    fn from(error: BuildError) -> Self {
        BuildFailure { error, span: None }
    }
}

/// Accumulates declarations and freezes them into an immutable [`Model`].
///
/// The predefined null thing is present from the start; everything else is
/// declared explicitly. Identifiers are handed out sequentially per
/// element category.
#[derive(Debug)]
pub struct ModelBuilder {
    properties: Vec<Property>,
    things: Vec<Thing>,
    states: Vec<State>,
    state_variables: Vec<StateVariable>,
    schemas: Vec<Schema>,
    classes: Vec<ClassDef>,
    kinds: Vec<KindDef>,
    processes: Vec<Process>,
    histories: BTreeMap<ThingId, History>,
    precedes: PrecedesRelation,

    property_names: BTreeMap<String, PropertyId>,
    thing_names: BTreeMap<String, ThingId>,
    state_names: BTreeMap<(ThingId, String), StateId>,
    state_variable_names: BTreeSet<(ThingId, String)>,
    schema_names: BTreeMap<String, SchemaId>,
    class_names: BTreeMap<String, ClassId>,
    kind_names: BTreeMap<String, KindId>,
    process_names: BTreeMap<String, ProcessId>,

    /// Canonical conjunct set -> first property registered with that form.
    complex_index: BTreeMap<BTreeSet<PropertyId>, PropertyId>,

    notes: Vec<Diagnostic>,
}

impl Default for ModelBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Result of [`record_observation`]: the extended (or unchanged) history
/// and whether a duplicate observation was collapsed (warning W1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recording {
    pub history: History,
    pub collapsed: bool,
}

impl ModelBuilder {
    pub fn new() -> Self {
        let null = Thing {
            id: ThingId::new(0),
            name: "null".to_string(),
            is_null: true,
            possessed: BTreeSet::new(),
            parts: Vec::new(),
            span: None,
        };
        let mut thing_names = BTreeMap::new();
        thing_names.insert("null".to_string(), ThingId::new(0));
        ModelBuilder {
            properties: Vec::new(),
            things: vec![null],
            states: Vec::new(),
            state_variables: Vec::new(),
            schemas: Vec::new(),
            classes: Vec::new(),
            kinds: Vec::new(),
            processes: Vec::new(),
            histories: BTreeMap::new(),
            precedes: PrecedesRelation::default(),
            property_names: BTreeMap::new(),
            thing_names,
            state_names: BTreeMap::new(),
            state_variable_names: BTreeSet::new(),
            schema_names: BTreeMap::new(),
            class_names: BTreeMap::new(),
            kind_names: BTreeMap::new(),
            process_names: BTreeMap::new(),
            complex_index: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn check_name(&self, name: &str) -> Result<(), BuildError> {
        if name.is_empty() {
            return Err(BuildError::EmptyName);
        }
        if name == "null" {
            return Err(BuildError::IllegalNullDeclaration);
        }
        Ok(())
    }

    fn check_property(&self, id: PropertyId) -> Result<(), BuildError> {
        if id.index() >= self.properties.len() {
            return Err(BuildError::UnknownProperty(id));
        }
        Ok(())
    }

    fn check_thing(&self, id: ThingId) -> Result<(), BuildError> {
        if id.index() >= self.things.len() {
            return Err(BuildError::UnknownThing(id));
        }
        Ok(())
    }

    fn check_state(&self, id: StateId) -> Result<(), BuildError> {
        if id.index() >= self.states.len() {
            return Err(BuildError::UnknownState(id));
        }
        Ok(())
    }

    fn insert_property(
        &mut self,
        name: String,
        form: PropertyForm,
        span: Option<SourceSpan>,
    ) -> Result<PropertyId, BuildError> {
        self.check_name(&name)?;
        if self.property_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Property,
                name,
            });
        }
        let id = PropertyId::new(self.properties.len());
        if let PropertyForm::Complex { conjuncts } = &form {
            self.complex_index.entry(conjuncts.clone()).or_insert(id);
        }
        self.property_names.insert(name.clone(), id);
        self.properties.push(Property { id, name, form, span });
        Ok(id)
    }

    /// Declare an intrinsic property.
    pub fn declare_property(&mut self, name: &str) -> Result<PropertyId, BuildError> {
        self.insert_property(name.to_string(), PropertyForm::Intrinsic, None)
    }

    /// Declare a mutual (relational) property over the given things.
    ///
    /// A relata list shorter than two is accepted and reported by the
    /// validator (rule V10); a relation spanning fewer than two things is a
    /// modeling mistake, not a registry corruption.
    pub fn declare_mutual_property(
        &mut self,
        name: &str,
        relata: &[ThingId],
        binding: bool,
    ) -> Result<PropertyId, BuildError> {
        for &t in relata {
            self.check_thing(t)?;
        }
        self.insert_property(
            name.to_string(),
            PropertyForm::Mutual {
                relata: relata.to_vec(),
                binding,
            },
            None,
        )
    }

    /// Flatten a conjunct list into the canonical set of non-complex
    /// properties. Every id must already be declared.
    fn canonical_conjuncts(&self, props: &[PropertyId]) -> Result<BTreeSet<PropertyId>, BuildError> {
        let mut out = BTreeSet::new();
        for &p in props {
            self.check_property(p)?;
            match &self.properties[p.index()].form {
                PropertyForm::Complex { conjuncts } => out.extend(conjuncts.iter().copied()),
                _ => {
                    out.insert(p);
                }
            }
        }
        Ok(out)
    }

    /// Declare a named complex property as the conjunction of `conjuncts`.
    ///
    /// The stored form is flattened, deduplicated, and sorted. A definition
    /// that flattens to a single property has no identity of its own and is
    /// rejected.
    pub fn declare_complex_property(
        &mut self,
        name: &str,
        conjuncts: &[PropertyId],
    ) -> Result<PropertyId, BuildError> {
        if conjuncts.is_empty() {
            return Err(BuildError::EmptyConjunction);
        }
        let canonical = self.canonical_conjuncts(conjuncts)?;
        if canonical.len() < 2 {
            return Err(BuildError::DegenerateComplex(name.to_string()));
        }
        self.insert_property(
            name.to_string(),
            PropertyForm::Complex { conjuncts: canonical },
            None,
        )
    }

    fn insert_thing(
        &mut self,
        name: String,
        possessed: BTreeSet<PropertyId>,
        parts: Vec<ThingId>,
        span: Option<SourceSpan>,
    ) -> Result<ThingId, BuildError> {
        self.check_name(&name)?;
        if self.thing_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Thing,
                name,
            });
        }
        // Keep the first occurrence of a repeated part.
        let mut seen = BTreeSet::new();
        let parts: Vec<ThingId> = parts.into_iter().filter(|p| seen.insert(*p)).collect();
        let id = ThingId::new(self.things.len());
        self.thing_names.insert(name.clone(), id);
        self.things.push(Thing {
            id,
            name,
            is_null: false,
            possessed,
            parts,
            span,
        });
        Ok(id)
    }

    /// Declare a thing with its possessed properties and direct parts.
    /// Parts must already be declared; see [`ModelBuilder::associate`] for
    /// the checked composition form.
    pub fn declare_thing(
        &mut self,
        name: &str,
        possessed: &[PropertyId],
        parts: &[ThingId],
    ) -> Result<ThingId, BuildError> {
        for &p in possessed {
            self.check_property(p)?;
        }
        for &t in parts {
            self.check_thing(t)?;
        }
        self.insert_thing(
            name.to_string(),
            possessed.iter().copied().collect(),
            parts.to_vec(),
            None,
        )
    }

    /// Declare a state of `owner`. State names are scoped per owner.
    pub fn declare_state(&mut self, owner: ThingId, name: &str) -> Result<StateId, BuildError> {
        self.declare_state_spanned(owner, name, None, None)
    }

    /// Declare a state carrying explicit state-variable value bindings.
    pub fn declare_state_with_bindings(
        &mut self,
        owner: ThingId,
        name: &str,
        bindings: BTreeMap<String, String>,
    ) -> Result<StateId, BuildError> {
        self.declare_state_spanned(owner, name, Some(bindings), None)
    }

    /// Add one property to a thing's possessed set after declaration.
    pub fn add_possession(&mut self, thing: ThingId, prop: PropertyId) -> Result<(), BuildError> {
        self.check_thing(thing)?;
        self.check_property(prop)?;
        if self.things[thing.index()].is_null {
            return Err(BuildError::IllegalNullDeclaration);
        }
        self.things[thing.index()].possessed.insert(prop);
        Ok(())
    }

    /// Add a raw part edge after declaration. Unlike [`associate`], this
    /// does not refuse cycles — it exists so diagnosed models (and their
    /// exports) can be reconstructed; the validator reports them as V7.
    ///
    /// [`associate`]: ModelBuilder::associate
    pub fn add_part(&mut self, whole: ThingId, part: ThingId) -> Result<(), BuildError> {
        self.check_thing(whole)?;
        self.check_thing(part)?;
        if self.things[whole.index()].is_null {
            return Err(BuildError::IllegalNullDeclaration);
        }
        let parts = &mut self.things[whole.index()].parts;
        if !parts.contains(&part) {
            parts.push(part);
        }
        Ok(())
    }

    fn declare_state_spanned(
        &mut self,
        owner: ThingId,
        name: &str,
        bindings: Option<BTreeMap<String, String>>,
        span: Option<SourceSpan>,
    ) -> Result<StateId, BuildError> {
        self.check_name(name)?;
        self.check_thing(owner)?;
        let key = (owner, name.to_string());
        if self.state_names.contains_key(&key) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::State,
                name: name.to_string(),
            });
        }
        let id = StateId::new(self.states.len());
        self.state_names.insert(key, id);
        self.states.push(State {
            id,
            name: name.to_string(),
            owner,
            bindings,
            span,
        });
        Ok(id)
    }

    /// Declare a state variable mapping a property of `domain_thing` into
    /// `codomain`. Names are scoped per domain thing.
    pub fn declare_state_variable(
        &mut self,
        name: &str,
        domain_thing: ThingId,
        codomain: &str,
    ) -> Result<(), BuildError> {
        self.check_name(name)?;
        self.check_thing(domain_thing)?;
        if !self.state_variable_names.insert((domain_thing, name.to_string())) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::StateVariable,
                name: name.to_string(),
            });
        }
        self.state_variables.push(StateVariable {
            name: name.to_string(),
            domain_thing,
            codomain: codomain.to_string(),
            span: None,
        });
        Ok(())
    }

    /// Declare a schema describing `describes` through attribute columns.
    pub fn declare_schema(
        &mut self,
        name: &str,
        describes: ThingId,
        attributes: &[(&str, PropertyId)],
    ) -> Result<SchemaId, BuildError> {
        let attrs: Vec<Attribute> = attributes
            .iter()
            .map(|(n, p)| Attribute {
                name: n.to_string(),
                represents: *p,
                span: None,
            })
            .collect();
        self.insert_schema(name.to_string(), describes, attrs, None)
    }

    fn insert_schema(
        &mut self,
        name: String,
        describes: ThingId,
        attributes: Vec<Attribute>,
        span: Option<SourceSpan>,
    ) -> Result<SchemaId, BuildError> {
        self.check_name(&name)?;
        self.check_thing(describes)?;
        if attributes.is_empty() {
            return Err(BuildError::EmptySchema(name));
        }
        for a in &attributes {
            self.check_property(a.represents)?;
        }
        if self.schema_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Schema,
                name,
            });
        }
        let id = SchemaId::new(self.schemas.len());
        self.schema_names.insert(name.clone(), id);
        self.schemas.push(Schema {
            id,
            name,
            describes,
            attributes,
            span,
        });
        Ok(id)
    }

    /// Declare a class with its single characteristic property.
    pub fn declare_class(
        &mut self,
        name: &str,
        characteristic: PropertyId,
        declared_extension: Option<&[ThingId]>,
    ) -> Result<ClassId, BuildError> {
        self.insert_class(name.to_string(), characteristic, declared_extension, None)
    }

    fn insert_class(
        &mut self,
        name: String,
        characteristic: PropertyId,
        declared_extension: Option<&[ThingId]>,
        span: Option<SourceSpan>,
    ) -> Result<ClassId, BuildError> {
        self.check_name(&name)?;
        self.check_property(characteristic)?;
        if let Some(ext) = declared_extension {
            for &t in ext {
                self.check_thing(t)?;
            }
        }
        if self.class_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Class,
                name,
            });
        }
        let id = ClassId::new(self.classes.len());
        self.class_names.insert(name.clone(), id);
        self.classes.push(ClassDef {
            id,
            name,
            characteristic,
            declared_extension: declared_extension.map(|e| e.iter().copied().collect()),
            span,
        });
        Ok(id)
    }

    /// Declare a kind over a non-empty property set.
    pub fn declare_kind(
        &mut self,
        name: &str,
        properties: &[PropertyId],
        declared_extension: Option<&[ThingId]>,
    ) -> Result<KindId, BuildError> {
        self.insert_kind(name.to_string(), properties, declared_extension, None)
    }

    fn insert_kind(
        &mut self,
        name: String,
        properties: &[PropertyId],
        declared_extension: Option<&[ThingId]>,
        span: Option<SourceSpan>,
    ) -> Result<KindId, BuildError> {
        self.check_name(&name)?;
        if properties.is_empty() {
            return Err(BuildError::EmptyKind(name));
        }
        for &p in properties {
            self.check_property(p)?;
        }
        if let Some(ext) = declared_extension {
            for &t in ext {
                self.check_thing(t)?;
            }
        }
        if self.kind_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Kind,
                name,
            });
        }
        let id = KindId::new(self.kinds.len());
        self.kind_names.insert(name.clone(), id);
        self.kinds.push(KindDef {
            id,
            name,
            properties: properties.iter().copied().collect(),
            declared_extension: declared_extension.map(|e| e.iter().copied().collect()),
            span,
        });
        Ok(id)
    }

    /// Add a base precedence pair; repeated declarations are idempotent.
    pub fn declare_precedes(&mut self, first: PropertyId, then: PropertyId) -> Result<(), BuildError> {
        self.declare_precedes_spanned(first, then, None)
    }

    fn declare_precedes_spanned(
        &mut self,
        first: PropertyId,
        then: PropertyId,
        span: Option<SourceSpan>,
    ) -> Result<(), BuildError> {
        self.check_property(first)?;
        self.check_property(then)?;
        self.precedes.base.entry((first, then)).or_insert(span);
        Ok(())
    }

    /// Declare a process over raw state pairs. Subject ownership and
    /// composability are validation rules (V8, V9), not build errors.
    pub fn declare_process(
        &mut self,
        name: &str,
        subject: ThingId,
        steps: &[(StateId, StateId)],
    ) -> Result<ProcessId, BuildError> {
        let steps: Vec<ProcessStep> = steps
            .iter()
            .map(|(f, t)| ProcessStep {
                from: *f,
                to: *t,
                span: None,
            })
            .collect();
        self.insert_process(name.to_string(), subject, steps, None)
    }

    fn insert_process(
        &mut self,
        name: String,
        subject: ThingId,
        steps: Vec<ProcessStep>,
        span: Option<SourceSpan>,
    ) -> Result<ProcessId, BuildError> {
        self.check_name(&name)?;
        self.check_thing(subject)?;
        if steps.is_empty() {
            return Err(BuildError::EmptyProcess(name));
        }
        for s in &steps {
            self.check_state(s.from)?;
            self.check_state(s.to)?;
        }
        if self.process_names.contains_key(&name) {
            return Err(BuildError::DuplicateName {
                namespace: Namespace::Process,
                name,
            });
        }
        let id = ProcessId::new(self.processes.len());
        self.process_names.insert(name.clone(), id);
        self.processes.push(Process {
            id,
            name,
            subject,
            steps,
            span,
        });
        Ok(id)
    }

    /// Append observations to a thing's history in the given order,
    /// collapsing each observation whose state repeats its immediate
    /// predecessor's (warning W1). Time monotonicity is rule V2.
    pub fn record_history(
        &mut self,
        subject: ThingId,
        observations: &[(StateId, TimePoint)],
    ) -> Result<(), BuildError> {
        let spanned: Vec<(StateId, TimePoint, Option<SourceSpan>)> = observations
            .iter()
            .map(|(s, t)| (*s, *t, None))
            .collect();
        self.record_history_spanned(subject, &spanned)
    }

    fn record_history_spanned(
        &mut self,
        subject: ThingId,
        observations: &[(StateId, TimePoint, Option<SourceSpan>)],
    ) -> Result<(), BuildError> {
        self.check_thing(subject)?;
        for (s, _, _) in observations {
            self.check_state(*s)?;
        }
        let subject_name = self.things[subject.index()].name.clone();
        let history = self
            .histories
            .entry(subject)
            .or_insert_with(|| History::empty(subject));
        for (state, at, span) in observations {
            if history.observations.last().map(|o| o.state) == Some(*state) {
                let state_name = &self.states[state.index()].name;
                let mut note = Diagnostic::new(
                    "W1",
                    Severity::Warning,
                    format!(
                        "repeated observation of state '{}' carries no change and was collapsed",
                        state_name
                    ),
                )
                .with_subject(subject_name.clone());
                if let Some(span) = span {
                    note = note.with_span(span.clone());
                }
                self.notes.push(note);
                continue;
            }
            history.observations.push(Observation {
                state: *state,
                at: *at,
                span: span.clone(),
            });
        }
        Ok(())
    }

    /// Conjoin properties into their canonical form.
    ///
    /// Nested complex properties are flattened, duplicates removed, and the
    /// result interned: conjoining the same set twice — in any order — hands
    /// back the same property. A singleton list is the underlying property
    /// itself, unchanged.
    pub fn conjoin(&mut self, props: &[PropertyId]) -> Result<Property, BuildError> {
        if props.is_empty() {
            return Err(BuildError::EmptyConjunction);
        }
        let canonical = self.canonical_conjuncts(props)?;
        if canonical.len() == 1 {
            let id = *canonical.iter().next().unwrap();
            return Ok(self.properties[id.index()].clone());
        }
        if let Some(&id) = self.complex_index.get(&canonical) {
            return Ok(self.properties[id.index()].clone());
        }
        let name = format!(
            "({})",
            canonical
                .iter()
                .map(|p| self.properties[p.index()].name.as_str())
                .collect::<Vec<_>>()
                .join(" & ")
        );
        let id = self.insert_property(name, PropertyForm::Complex { conjuncts: canonical }, None)?;
        Ok(self.properties[id.index()].clone())
    }

    /// Compose existing things into a new composite thing with its own
    /// identity. The null thing is never a component, and the composite
    /// cannot end up among its own parts.
    pub fn associate(&mut self, name: &str, components: &[ThingId]) -> Result<ThingId, BuildError> {
        if components.is_empty() {
            return Err(BuildError::EmptyAssociation);
        }
        let new_id = ThingId::new(self.things.len());
        for &c in components {
            self.check_thing(c)?;
            if c == ThingId::new(0) {
                return Err(BuildError::NullAsComponent);
            }
            if c == new_id || self.reaches(c, new_id) {
                return Err(BuildError::SelfContainment(name.to_string()));
            }
        }
        self.insert_thing(name.to_string(), BTreeSet::new(), components.to_vec(), None)
    }

    /// Whether `target` is reachable from `from` through direct parts.
    fn reaches(&self, from: ThingId, target: ThingId) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if t == target {
                return true;
            }
            if seen.insert(t) {
                if let Some(thing) = self.things.get(t.index()) {
                    stack.extend(thing.parts.iter().copied());
                }
            }
        }
        false
    }

    /// Freeze into an immutable model.
    pub fn build(self) -> Model {
        Model {
            properties: self.properties,
            things: self.things,
            states: self.states,
            state_variables: self.state_variables,
            schemas: self.schemas,
            classes: self.classes,
            kinds: self.kinds,
            processes: self.processes,
            histories: self.histories,
            precedes: self.precedes,
            property_names: self.property_names,
            thing_names: self.thing_names,
            state_names: self.state_names,
            schema_names: self.schema_names,
            class_names: self.class_names,
            kind_names: self.kind_names,
            process_names: self.process_names,
            build_notes: self.notes,
            closure: OnceLock::new(),
        }
    }
}

/// Extend a history with one observation, keeping observations in time
/// order. An observation at an already-occupied time is rejected; one whose
/// state equals its now-adjacent predecessor's collapses (warning W1).
pub fn record_observation(
    history: &History,
    state: StateId,
    at: TimePoint,
    model: &Model,
) -> Result<Recording, BuildError> {
    let declared = model
        .state(state)
        .ok_or(BuildError::UnknownState(state))?;
    if declared.owner != history.subject {
        return Err(BuildError::ForeignState(state));
    }
    let pos = history.observations.partition_point(|o| o.at < at);
    if history.observations.get(pos).map(|o| o.at) == Some(at) {
        return Err(BuildError::TimeCollision(at.tick()));
    }
    // Collapse against the observation now immediately before the slot.
    if pos > 0 && history.observations[pos - 1].state == state {
        return Ok(Recording {
            history: history.clone(),
            collapsed: true,
        });
    }
    let mut extended = history.clone();
    extended.observations.insert(
        pos,
        Observation {
            state,
            at,
            span: None,
        },
    );
    // The insertion may have made the successor redundant; keep the earlier.
    let mut collapsed = false;
    if extended.observations.get(pos + 1).map(|o| o.state) == Some(state) {
        extended.observations.remove(pos + 1);
        collapsed = true;
    }
    Ok(Recording {
        history: extended,
        collapsed,
    })
}

/// Materialize a resolved source file into a model.
///
/// Complex property definitions are flattened transitively (rejecting
/// circular definitions), histories are recorded in declaration order with
/// duplicate collapse, and the predefined null thing is present without any
/// declaration.
pub fn build_model(ast: &ResolvedAst) -> Result<Model, BuildFailure> {
    let mut b = ModelBuilder::new();

    // Complex definitions may reference properties declared later, so the
    // canonical conjunct sets are computed over the whole file first.
    let canonical = flatten_complexes(ast)?;

    for prop in &ast.properties {
        let form = match &prop.form {
            ResolvedForm::Intrinsic => PropertyForm::Intrinsic,
            ResolvedForm::Mutual { relata, binding } => PropertyForm::Mutual {
                relata: relata.clone(),
                binding: *binding,
            },
            ResolvedForm::Complex { .. } => {
                let conjuncts = canonical[&prop.id].clone();
                if conjuncts.len() < 2 {
                    return Err(BuildFailure {
                        error: BuildError::DegenerateComplex(prop.name.clone()),
                        span: Some(prop.span.clone()),
                    });
                }
                PropertyForm::Complex { conjuncts }
            }
        };
        let id = b
            .insert_property(prop.name.clone(), form, Some(prop.span.clone()))
            .map_err(|error| BuildFailure {
                error,
                span: Some(prop.span.clone()),
            })?;
        debug_assert_eq!(id, prop.id);
    }

    for thing in &ast.things {
        let id = b
            .insert_thing(
                thing.name.clone(),
                thing.possessed.iter().copied().collect(),
                thing.parts.clone(),
                Some(thing.span.clone()),
            )
            .map_err(|error| BuildFailure {
                error,
                span: Some(thing.span.clone()),
            })?;
        debug_assert_eq!(id, thing.id);
    }

    for state in &ast.states {
        let id = b
            .declare_state_spanned(state.owner, &state.name, None, Some(state.span.clone()))
            .map_err(|error| BuildFailure {
                error,
                span: Some(state.span.clone()),
            })?;
        debug_assert_eq!(id, state.id);
    }

    for schema in &ast.schemas {
        let attrs: Vec<Attribute> = schema
            .attributes
            .iter()
            .map(|a| Attribute {
                name: a.name.clone(),
                represents: a.represents,
                span: Some(a.span.clone()),
            })
            .collect();
        b.insert_schema(schema.name.clone(), schema.describes, attrs, Some(schema.span.clone()))
            .map_err(|error| BuildFailure {
                error,
                span: Some(schema.span.clone()),
            })?;
    }

    for class in &ast.classes {
        b.insert_class(
            class.name.clone(),
            class.characteristic,
            class.declared_extension.as_deref(),
            Some(class.span.clone()),
        )
        .map_err(|error| BuildFailure {
            error,
            span: Some(class.span.clone()),
        })?;
    }

    for kind in &ast.kinds {
        b.insert_kind(
            kind.name.clone(),
            &kind.properties,
            kind.declared_extension.as_deref(),
            Some(kind.span.clone()),
        )
        .map_err(|error| BuildFailure {
            error,
            span: Some(kind.span.clone()),
        })?;
    }

    for pair in &ast.precedes {
        b.declare_precedes_spanned(pair.first, pair.then, Some(pair.span.clone()))
            .map_err(|error| BuildFailure {
                error,
                span: Some(pair.span.clone()),
            })?;
    }

    for history in &ast.histories {
        let spanned: Vec<(StateId, TimePoint, Option<SourceSpan>)> = history
            .observations
            .iter()
            .map(|o| (o.state, o.at, Some(o.span.clone())))
            .collect();
        b.record_history_spanned(history.subject, &spanned)
            .map_err(|error| BuildFailure {
                error,
                span: Some(history.span.clone()),
            })?;
    }

    for process in &ast.processes {
        let steps: Vec<ProcessStep> = process
            .steps
            .iter()
            .map(|s| ProcessStep {
                from: s.from,
                to: s.to,
                span: Some(s.span.clone()),
            })
            .collect();
        b.insert_process(process.name.clone(), process.subject, steps, Some(process.span.clone()))
            .map_err(|error| BuildFailure {
                error,
                span: Some(process.span.clone()),
            })?;
    }

    Ok(b.build())
}

/// Canonical conjunct sets for every complex declaration in the file,
/// flattened through nested complex references.
fn flatten_complexes(
    ast: &ResolvedAst,
) -> Result<BTreeMap<PropertyId, BTreeSet<PropertyId>>, BuildFailure> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }

    let by_id: BTreeMap<PropertyId, usize> = ast
        .properties
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id, i))
        .collect();

    fn visit(
        id: PropertyId,
        ast: &ResolvedAst,
        by_id: &BTreeMap<PropertyId, usize>,
        marks: &mut BTreeMap<PropertyId, Mark>,
        out: &mut BTreeMap<PropertyId, BTreeSet<PropertyId>>,
    ) -> Result<BTreeSet<PropertyId>, BuildFailure> {
        let prop = &ast.properties[by_id[&id]];
        match &prop.form {
            ResolvedForm::Complex { conjuncts } => {
                match marks.get(&id) {
                    Some(Mark::Visiting) => {
                        return Err(BuildFailure {
                            error: BuildError::CircularConjunction(prop.name.clone()),
                            span: Some(prop.span.clone()),
                        })
                    }
                    Some(Mark::Done) => return Ok(out[&id].clone()),
                    None => {}
                }
                marks.insert(id, Mark::Visiting);
                let mut flat = BTreeSet::new();
                for &c in conjuncts {
                    flat.extend(visit(c, ast, by_id, marks, out)?);
                }
                marks.insert(id, Mark::Done);
                out.insert(id, flat.clone());
                Ok(flat)
            }
            _ => Ok([id].into_iter().collect()),
        }
    }

    let mut marks = BTreeMap::new();
    let mut out = BTreeMap::new();
    for prop in &ast.properties {
        if matches!(prop.form, ResolvedForm::Complex { .. }) {
            visit(prop.id, ast, &by_id, &mut marks, &mut out)?;
        }
    }
    Ok(out)
}
