//! The domain types a model registers: properties, things, states,
//! representational elements, events, processes, and histories.

use crate::model::ids::*;
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};

/// Which ontological group an element belongs to. Every element carries
/// exactly one tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CategoryTag {
    Intrinsic,
    Representational,
    PrimitiveRelational,
    Composition,
    Collection,
}

/// The shape of a property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyForm {
    /// Depends on a single thing (age, title, finger-print).
    Intrinsic,
    /// Relates several things. `binding` marks an interaction relationship.
    Mutual { relata: Vec<ThingId>, binding: bool },
    /// Conjunction of two or more non-complex properties, stored flattened,
    /// deduplicated, and sorted.
    Complex { conjuncts: BTreeSet<PropertyId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub id: PropertyId,
    pub name: String,
    pub form: PropertyForm,
    pub span: Option<SourceSpan>,
}

impl Property {
    pub fn is_complex(&self) -> bool {
        matches!(self.form, PropertyForm::Complex { .. })
    }

    /// Conjunction is a composition category; simple and mutual properties
    /// are intrinsic.
    pub fn category(&self) -> CategoryTag {
        if self.is_complex() {
            CategoryTag::Composition
        } else {
            CategoryTag::Intrinsic
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thing {
    pub id: ThingId,
    pub name: String,
    pub is_null: bool,
    /// Properties this thing directly possesses.
    pub possessed: BTreeSet<PropertyId>,
    /// Direct components, in declaration order, deduplicated.
    pub parts: Vec<ThingId>,
    pub span: Option<SourceSpan>,
}

impl Thing {
    pub fn is_composite(&self) -> bool {
        !self.parts.is_empty()
    }

    /// Association makes a composite thing a composition-category element.
    pub fn category(&self) -> CategoryTag {
        if self.is_composite() {
            CategoryTag::Composition
        } else {
            CategoryTag::Intrinsic
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub id: StateId,
    pub name: String,
    pub owner: ThingId,
    /// Value assignment per state variable, when one was given. The DSL
    /// never populates this; it exists for programmatic construction.
    pub bindings: Option<BTreeMap<String, String>>,
    pub span: Option<SourceSpan>,
}

impl State {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Intrinsic
    }
}

/// A discrete, totally ordered instant. Ticks are non-negative by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimePoint(pub u64);

impl TimePoint {
    pub fn tick(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for TimePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Maps a property of a thing to a value in some codomain,
/// e.g. `statusOfBook :: Book -> Boolean`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVariable {
    pub name: String,
    pub domain_thing: ThingId,
    pub codomain: String,
    pub span: Option<SourceSpan>,
}

impl StateVariable {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Representational
    }
}

/// One column of a schema; stands for a property of the described thing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub represents: PropertyId,
    pub span: Option<SourceSpan>,
}

impl Attribute {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Representational
    }
}

/// A thing-specific descriptive framework. Several schemas may describe
/// the same thing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub id: SchemaId,
    pub name: String,
    pub describes: ThingId,
    pub attributes: Vec<Attribute>,
    pub span: Option<SourceSpan>,
}

impl Schema {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Representational
    }
}

/// An ordered pair of distinct states of one thing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub subject: ThingId,
    pub from: StateId,
    pub to: StateId,
}

impl Event {
    /// Checked constructor: the endpoints must differ.
    pub fn new(subject: ThingId, from: StateId, to: StateId) -> Result<Event, DegenerateEvent> {
        if from == to {
            return Err(DegenerateEvent { state: from });
        }
        Ok(Event { subject, from, to })
    }

    pub fn from_state(self) -> StateId {
        self.from
    }

    pub fn to_state(self) -> StateId {
        self.to
    }

    pub fn category(self) -> CategoryTag {
        CategoryTag::PrimitiveRelational
    }
}

/// Rejected construction of an event whose endpoints coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("an event needs two distinct states")]
pub struct DegenerateEvent {
    pub state: StateId,
}

/// One declared step of a process. Kept as a raw state pair so the
/// validator can diagnose degenerate steps instead of the builder
/// rejecting the whole model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessStep {
    pub from: StateId,
    pub to: StateId,
    pub span: Option<SourceSpan>,
}

impl ProcessStep {
    pub fn as_event(&self, subject: ThingId) -> Result<Event, DegenerateEvent> {
        Event::new(subject, self.from, self.to)
    }
}

/// A declared composition of events over one subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub id: ProcessId,
    pub name: String,
    pub subject: ThingId,
    pub steps: Vec<ProcessStep>,
    pub span: Option<SourceSpan>,
}

impl Process {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Composition
    }
}

/// A single state observation at a point in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub state: StateId,
    pub at: TimePoint,
    pub span: Option<SourceSpan>,
}

/// The time-ordered record of states a thing has been observed in.
///
/// Construction collapses an observation whose state equals its immediate
/// predecessor's; strictly increasing times are a validation rule (V2), not
/// a construction guarantee, so source-declared histories can be diagnosed
/// rather than rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub subject: ThingId,
    pub observations: Vec<Observation>,
}

impl History {
    pub fn empty(subject: ThingId) -> Self {
        History {
            subject,
            observations: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn category(&self) -> CategoryTag {
        CategoryTag::Collection
    }
}

/// The declared precedence base relation. Queries go through the
/// reflexive-transitive closure, never the base pairs directly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrecedesRelation {
    /// Base pairs with the span of their declaration, when from source.
    pub base: BTreeMap<(PropertyId, PropertyId), Option<SourceSpan>>,
}

impl PrecedesRelation {
    pub fn pairs(&self) -> impl Iterator<Item = (PropertyId, PropertyId)> + '_ {
        self.base.keys().copied()
    }

    pub fn category(&self) -> CategoryTag {
        CategoryTag::PrimitiveRelational
    }
}

/// A power-type over things: membership is possession of exactly one
/// characteristic property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub id: ClassId,
    pub name: String,
    pub characteristic: PropertyId,
    /// Extension asserted in the source, if any. Checked against the
    /// computed extension (rule V4), never trusted.
    pub declared_extension: Option<BTreeSet<ThingId>>,
    pub span: Option<SourceSpan>,
}

impl ClassDef {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Collection
    }
}

/// Organizes things through a set of properties; membership is possession
/// of every one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindDef {
    pub id: KindId,
    pub name: String,
    pub properties: BTreeSet<PropertyId>,
    pub declared_extension: Option<BTreeSet<ThingId>>,
    pub span: Option<SourceSpan>,
}

impl KindDef {
    pub fn category(&self) -> CategoryTag {
        CategoryTag::Collection
    }
}
