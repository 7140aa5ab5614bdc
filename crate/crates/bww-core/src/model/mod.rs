//! The model kernel: domain types, the closed-world registry, and the
//! construction operations that guarantee referential integrity and
//! canonical forms.

pub mod builder;
pub mod element;
pub mod ids;

pub use builder::{build_model, BuildError, BuildFailure, ModelBuilder, Recording};
pub use element::*;
pub use ids::*;

use crate::diag::Diagnostic;
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// An immutable registry of every declared element.
///
/// A model is built once — through [`ModelBuilder`] or [`build_model`] —
/// and never mutated afterwards, so it is safe to share across threads for
/// concurrent read-only queries.
#[derive(Debug)]
pub struct Model {
    pub(crate) properties: Vec<Property>,
    pub(crate) things: Vec<Thing>,
    pub(crate) states: Vec<State>,
    pub(crate) state_variables: Vec<StateVariable>,
    pub(crate) schemas: Vec<Schema>,
    pub(crate) classes: Vec<ClassDef>,
    pub(crate) kinds: Vec<KindDef>,
    pub(crate) processes: Vec<Process>,
    pub(crate) histories: BTreeMap<ThingId, History>,
    pub(crate) precedes: PrecedesRelation,

    pub(crate) property_names: BTreeMap<String, PropertyId>,
    pub(crate) thing_names: BTreeMap<String, ThingId>,
    /// Keyed by (owner, state name); state names are scoped per thing.
    pub(crate) state_names: BTreeMap<(ThingId, String), StateId>,
    pub(crate) schema_names: BTreeMap<String, SchemaId>,
    pub(crate) class_names: BTreeMap<String, ClassId>,
    pub(crate) kind_names: BTreeMap<String, KindId>,
    pub(crate) process_names: BTreeMap<String, ProcessId>,

    /// Warnings produced while building (duplicate-observation collapses).
    /// The validator folds these into its report.
    pub(crate) build_notes: Vec<Diagnostic>,

    /// Reflexive-transitive closure of the precedes base, computed on first
    /// use with single-assignment semantics.
    pub(crate) closure: OnceLock<std::collections::BTreeSet<(PropertyId, PropertyId)>>,
}

impl Model {
    /// The predefined null thing.
    pub fn null_thing(&self) -> ThingId {
        ThingId::new(0)
    }

    pub fn property(&self, id: PropertyId) -> Option<&Property> {
        self.properties.get(id.index())
    }

    pub fn thing(&self, id: ThingId) -> Option<&Thing> {
        self.things.get(id.index())
    }

    pub fn state(&self, id: StateId) -> Option<&State> {
        self.states.get(id.index())
    }

    pub fn schema(&self, id: SchemaId) -> Option<&Schema> {
        self.schemas.get(id.index())
    }

    pub fn class(&self, id: ClassId) -> Option<&ClassDef> {
        self.classes.get(id.index())
    }

    pub fn kind(&self, id: KindId) -> Option<&KindDef> {
        self.kinds.get(id.index())
    }

    pub fn process(&self, id: ProcessId) -> Option<&Process> {
        self.processes.get(id.index())
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    /// All registered things, the null thing included.
    pub fn things(&self) -> &[Thing] {
        &self.things
    }

    /// Declared things only.
    pub fn declared_things(&self) -> impl Iterator<Item = &Thing> {
        self.things.iter().filter(|t| !t.is_null)
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_variables(&self) -> &[StateVariable] {
        &self.state_variables
    }

    pub fn schemas(&self) -> &[Schema] {
        &self.schemas
    }

    pub fn classes(&self) -> &[ClassDef] {
        &self.classes
    }

    pub fn kinds(&self) -> &[KindDef] {
        &self.kinds
    }

    pub fn processes(&self) -> &[Process] {
        &self.processes
    }

    pub fn histories(&self) -> impl Iterator<Item = &History> {
        self.histories.values()
    }

    pub fn precedes_relation(&self) -> &PrecedesRelation {
        &self.precedes
    }

    pub fn build_notes(&self) -> &[Diagnostic] {
        &self.build_notes
    }

    pub fn property_by_name(&self, name: &str) -> Option<PropertyId> {
        self.property_names.get(name).copied()
    }

    pub fn thing_by_name(&self, name: &str) -> Option<ThingId> {
        self.thing_names.get(name).copied()
    }

    /// Look a state up within its owner's scope.
    pub fn state_by_name(&self, owner: ThingId, name: &str) -> Option<StateId> {
        self.state_names.get(&(owner, name.to_string())).copied()
    }

    /// All states carrying `name`, across owners, in owner-name order.
    pub fn states_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = StateId> + 'a {
        let mut hits: Vec<(String, StateId)> = self
            .state_names
            .iter()
            .filter(|((_, n), _)| n == name)
            .map(|((owner, _), id)| (self.things[owner.index()].name.clone(), *id))
            .collect();
        hits.sort();
        hits.into_iter().map(|(_, id)| id)
    }

    pub fn schema_by_name(&self, name: &str) -> Option<SchemaId> {
        self.schema_names.get(name).copied()
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.class_names.get(name).copied()
    }

    pub fn kind_by_name(&self, name: &str) -> Option<KindId> {
        self.kind_names.get(name).copied()
    }

    pub fn process_by_name(&self, name: &str) -> Option<ProcessId> {
        self.process_names.get(name).copied()
    }

    /// Convenience for rendering: the name behind a property id.
    pub fn property_name(&self, id: PropertyId) -> &str {
        &self.properties[id.index()].name
    }

    pub fn thing_name(&self, id: ThingId) -> &str {
        &self.things[id.index()].name
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()].name
    }
}
