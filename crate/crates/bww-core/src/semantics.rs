//! The semantics engine: pure, side-effect-free queries over a built model.
//!
//! Every function here is read-only. The precedence closure is computed
//! once on first use and cached with single-assignment semantics, so a
//! model can be queried from any number of threads concurrently.

use crate::model::element::*;
use crate::model::ids::*;
use crate::model::Model;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("unknown thing {0}")]
    UnknownThing(ThingId),
    #[error("unknown property {0}")]
    UnknownProperty(PropertyId),
    #[error("unknown state {0}")]
    UnknownState(StateId),
    #[error("unknown class {0}")]
    UnknownClass(ClassId),
    #[error("unknown kind {0}")]
    UnknownKind(KindId),
    #[error("a process needs at least one event")]
    EmptyProcess,
    #[error("a kind test needs at least one property")]
    EmptyPropertySet,
}

/// The value a query evaluates to, with an optional explanation trace
/// listing the base facts used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub value: QueryValue,
    pub trace: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryValue {
    Bool(bool),
    State(StateId),
    Things(BTreeSet<ThingId>),
    Pairs(Vec<(PropertyId, PropertyId)>),
}

impl Model {
    fn req_thing(&self, id: ThingId) -> Result<&Thing, QueryError> {
        self.thing(id).ok_or(QueryError::UnknownThing(id))
    }

    fn req_property(&self, id: PropertyId) -> Result<&Property, QueryError> {
        self.property(id).ok_or(QueryError::UnknownProperty(id))
    }

    fn req_state(&self, id: StateId) -> Result<&State, QueryError> {
        self.state(id).ok_or(QueryError::UnknownState(id))
    }

    fn req_class(&self, id: ClassId) -> Result<&ClassDef, QueryError> {
        self.class(id).ok_or(QueryError::UnknownClass(id))
    }

    fn req_kind(&self, id: KindId) -> Result<&KindDef, QueryError> {
        self.kind(id).ok_or(QueryError::UnknownKind(id))
    }

    /// Does `thing` possess `prop`?
    ///
    /// True when the property is in the thing's possessed set, or when the
    /// property is complex and every conjunct is possessed. The null thing
    /// possesses nothing.
    pub fn possesses(&self, thing: ThingId, prop: PropertyId) -> Result<bool, QueryError> {
        let t = self.req_thing(thing)?;
        let p = self.req_property(prop)?;
        if t.is_null {
            return Ok(false);
        }
        if t.possessed.contains(&prop) {
            return Ok(true);
        }
        if let PropertyForm::Complex { conjuncts } = &p.form {
            return Ok(conjuncts.iter().all(|c| t.possessed.contains(c)));
        }
        Ok(false)
    }

    /// The reflexive-transitive closure of the declared precedence pairs,
    /// over every declared property. Computed once, then cached.
    pub fn precedes_closure(&self) -> &BTreeSet<(PropertyId, PropertyId)> {
        self.closure.get_or_init(|| {
            let mut adjacency: BTreeMap<PropertyId, Vec<PropertyId>> = BTreeMap::new();
            for (a, b) in self.precedes.pairs() {
                adjacency.entry(a).or_default().push(b);
            }
            let mut closure = BTreeSet::new();
            for p in &self.properties {
                let start = p.id;
                let mut stack = vec![start];
                let mut seen = BTreeSet::new();
                seen.insert(start);
                while let Some(n) = stack.pop() {
                    for &next in adjacency.get(&n).into_iter().flatten() {
                        if seen.insert(next) {
                            stack.push(next);
                        }
                    }
                }
                for r in seen {
                    closure.insert((start, r));
                }
            }
            closure
        })
    }

    /// Is `first` a necessary condition for `then`? Reflexive and
    /// transitive by construction.
    pub fn precedes(&self, first: PropertyId, then: PropertyId) -> Result<bool, QueryError> {
        self.req_property(first)?;
        self.req_property(then)?;
        Ok(self.precedes_closure().contains(&(first, then)))
    }

    /// The base pairs along one path witnessing `precedes(first, then)`,
    /// empty for the reflexive case, `None` when the pair is not in the
    /// closure.
    pub fn precedes_trace(
        &self,
        first: PropertyId,
        then: PropertyId,
    ) -> Result<Option<Vec<(PropertyId, PropertyId)>>, QueryError> {
        self.req_property(first)?;
        self.req_property(then)?;
        if first == then {
            return Ok(Some(Vec::new()));
        }
        let mut adjacency: BTreeMap<PropertyId, Vec<PropertyId>> = BTreeMap::new();
        for (a, b) in self.precedes.pairs() {
            adjacency.entry(a).or_default().push(b);
        }
        let mut parent: BTreeMap<PropertyId, PropertyId> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([first]);
        let mut seen = BTreeSet::from([first]);
        while let Some(n) = queue.pop_front() {
            if n == then {
                let mut path = Vec::new();
                let mut cur = then;
                while cur != first {
                    let prev = parent[&cur];
                    path.push((prev, cur));
                    cur = prev;
                }
                path.reverse();
                return Ok(Some(path));
            }
            for &next in adjacency.get(&n).into_iter().flatten() {
                if seen.insert(next) {
                    parent.insert(next, n);
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    /// Is `thing` in `state` at time `at`?
    ///
    /// Piecewise-constant reading of the history: true exactly when the
    /// latest observation at or before `at` carries `state`. False before
    /// the first observation.
    pub fn is_in(&self, thing: ThingId, state: StateId, at: TimePoint) -> Result<bool, QueryError> {
        self.req_thing(thing)?;
        self.req_state(state)?;
        let Some(history) = self.histories.get(&thing) else {
            return Ok(false);
        };
        // Linear max-scan instead of binary search: a diagnosed model may
        // carry a non-monotonic history, and is_in stays total over it.
        let mut latest: Option<&Observation> = None;
        for obs in &history.observations {
            if obs.at <= at && latest.map(|l| obs.at >= l.at).unwrap_or(true) {
                latest = Some(obs);
            }
        }
        Ok(latest.map(|o| o.state == state).unwrap_or(false))
    }

    /// Did `thing` change from `from` directly to `to` at some point?
    ///
    /// Adjacent-pair reading over the recorded history; equivalent to the
    /// quantified change formula under the piecewise-constant `is_in`.
    pub fn is_event(&self, thing: ThingId, from: StateId, to: StateId) -> Result<bool, QueryError> {
        self.req_thing(thing)?;
        self.req_state(from)?;
        self.req_state(to)?;
        if from == to {
            return Ok(false);
        }
        let Some(history) = self.histories.get(&thing) else {
            return Ok(false);
        };
        Ok(history
            .observations
            .windows(2)
            .any(|w| w[0].state == from && w[1].state == to))
    }

    /// All events in a thing's history: its consecutive observation pairs,
    /// in time order.
    pub fn derive_events(&self, thing: ThingId) -> Result<Vec<Event>, QueryError> {
        self.req_thing(thing)?;
        let Some(history) = self.histories.get(&thing) else {
            return Ok(Vec::new());
        };
        Ok(history
            .observations
            .windows(2)
            .map(|w| Event {
                subject: thing,
                from: w[0].state,
                to: w[1].state,
            })
            .collect())
    }

    pub fn is_complex_property(&self, prop: PropertyId) -> Result<bool, QueryError> {
        Ok(self.req_property(prop)?.is_complex())
    }

    pub fn is_composite(&self, thing: ThingId) -> Result<bool, QueryError> {
        Ok(self.req_thing(thing)?.is_composite())
    }

    /// Is `part` a direct component of `whole`?
    pub fn is_part_of(&self, whole: ThingId, part: ThingId) -> Result<bool, QueryError> {
        self.req_thing(part)?;
        Ok(self.req_thing(whole)?.parts.contains(&part))
    }

    /// Is `part` reachable from `whole` through components of components?
    pub fn is_part_of_transitive(&self, whole: ThingId, part: ThingId) -> Result<bool, QueryError> {
        self.req_thing(whole)?;
        self.req_thing(part)?;
        let mut stack = self.things[whole.index()].parts.clone();
        let mut seen: BTreeSet<ThingId> = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if t == part {
                return Ok(true);
            }
            if seen.insert(t) {
                stack.extend(self.things[t.index()].parts.iter().copied());
            }
        }
        Ok(false)
    }

    /// Every non-null thing possessing the class's characteristic property.
    /// Extensions are always computed, never read from a declaration.
    pub fn class_extension(&self, class: ClassId) -> Result<BTreeSet<ThingId>, QueryError> {
        let characteristic = self.req_class(class)?.characteristic;
        self.possessors(characteristic)
    }

    /// The set of non-null things possessing `prop` (complex expansion
    /// included).
    pub fn possessors(&self, prop: PropertyId) -> Result<BTreeSet<ThingId>, QueryError> {
        self.req_property(prop)?;
        let mut out = BTreeSet::new();
        for t in self.declared_things() {
            if self.possesses(t.id, prop)? {
                out.insert(t.id);
            }
        }
        Ok(out)
    }

    pub fn is_member_of_class(&self, class: ClassId, thing: ThingId) -> Result<bool, QueryError> {
        let characteristic = self.req_class(class)?.characteristic;
        self.req_thing(thing)?;
        if thing == self.null_thing() {
            return Ok(false);
        }
        self.possesses(thing, characteristic)
    }

    /// Does `candidate` form a class with characteristic property `prop`?
    /// Both directions must hold: every member possesses `prop` and no
    /// outside thing does.
    pub fn is_class(
        &self,
        candidate: &BTreeSet<ThingId>,
        prop: PropertyId,
    ) -> Result<bool, QueryError> {
        for &t in candidate {
            self.req_thing(t)?;
        }
        Ok(*candidate == self.possessors(prop)?)
    }

    /// Every non-null thing possessing all of the kind's properties.
    pub fn kind_extension(&self, kind: KindId) -> Result<BTreeSet<ThingId>, QueryError> {
        let props = self.req_kind(kind)?.properties.clone();
        self.possessors_of_all(&props)
    }

    fn possessors_of_all(&self, props: &BTreeSet<PropertyId>) -> Result<BTreeSet<ThingId>, QueryError> {
        let mut out = BTreeSet::new();
        for t in self.declared_things() {
            let mut all = true;
            for &p in props {
                if !self.possesses(t.id, p)? {
                    all = false;
                    break;
                }
            }
            if all {
                out.insert(t.id);
            }
        }
        Ok(out)
    }

    pub fn is_member_of_kind(&self, kind: KindId, thing: ThingId) -> Result<bool, QueryError> {
        let props = self.req_kind(kind)?.properties.clone();
        self.req_thing(thing)?;
        if thing == self.null_thing() {
            return Ok(false);
        }
        for &p in &props {
            if !self.possesses(thing, p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Does `candidate` form a kind over the non-empty property set
    /// `props`?
    pub fn is_kind(
        &self,
        candidate: &BTreeSet<ThingId>,
        props: &BTreeSet<PropertyId>,
    ) -> Result<bool, QueryError> {
        if props.is_empty() {
            return Err(QueryError::EmptyPropertySet);
        }
        for &p in props {
            self.req_property(p)?;
        }
        for &t in candidate {
            self.req_thing(t)?;
        }
        Ok(*candidate == self.possessors_of_all(props)?)
    }

    pub fn is_characteristic_of_class(
        &self,
        class: ClassId,
        prop: PropertyId,
    ) -> Result<bool, QueryError> {
        self.req_property(prop)?;
        Ok(self.req_class(class)?.characteristic == prop)
    }

    pub fn is_characteristic_of_kind(
        &self,
        kind: KindId,
        props: &BTreeSet<PropertyId>,
    ) -> Result<bool, QueryError> {
        for &p in props {
            self.req_property(p)?;
        }
        Ok(self.req_kind(kind)?.properties == *props)
    }

    /// All declared states of `thing`.
    pub fn state_space(&self, thing: ThingId) -> Result<BTreeSet<StateId>, QueryError> {
        self.req_thing(thing)?;
        Ok(self
            .states
            .iter()
            .filter(|s| s.owner == thing)
            .map(|s| s.id)
            .collect())
    }

    /// The recorded history of `thing`, empty when nothing was observed.
    pub fn history_of(&self, thing: ThingId) -> Result<History, QueryError> {
        self.req_thing(thing)?;
        Ok(self
            .histories
            .get(&thing)
            .cloned()
            .unwrap_or_else(|| History::empty(thing)))
    }
}

/// Can `second` directly continue `first`? True when the first event ends
/// in the state the second starts from and both concern the same thing.
pub fn composable(first: &Event, second: &Event) -> bool {
    first.to == second.from && first.subject == second.subject
}

/// Is this non-empty event sequence a process, i.e. does every adjacent
/// pair compose? A single event is a process.
pub fn is_process(steps: &[Event]) -> Result<bool, QueryError> {
    if steps.is_empty() {
        return Err(QueryError::EmptyProcess);
    }
    Ok(steps.windows(2).all(|w| composable(&w[0], &w[1])))
}
