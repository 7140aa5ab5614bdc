//! The query sub-language: one expression of the form `fn(args)` per
//! invocation, where the function names mirror the model queries
//! (`possesses?`, `precedes?`, `fromState!`, ...).
//!
//! Argument forms:
//! - `name` — a thing, property, state, class, or kind, by position
//! - `42` — a time tick
//! - `<thing, from, to>` — an event literal
//! - `{a, b}` — a set of things or properties
//!
//! Truth values are data: evaluation succeeds with `true` or `false`.
//! Unknown functions or identifiers are invocation errors.

use bww_core::model::{Event, Model, PropertyId, StateId, ThingId, TimePoint};
use bww_core::{composable, is_process, QueryResult, QueryValue};
use std::collections::BTreeSet;

/// An evaluation problem that maps to exit status 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryFailure(pub String);

impl std::fmt::Display for QueryFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail<T>(message: impl Into<String>) -> Result<T, QueryFailure> {
    Err(QueryFailure(message.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arg {
    Name(String),
    Nat(u64),
    Event(String, String, String),
    Set(Vec<String>),
}

impl Arg {
    fn describe(&self) -> &'static str {
        match self {
            Arg::Name(_) => "a name",
            Arg::Nat(_) => "a number",
            Arg::Event(..) => "an event literal",
            Arg::Set(_) => "a set",
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Split `text` on commas that sit at nesting depth zero.
fn split_args(text: &str) -> Result<Vec<String>, QueryFailure> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '<' | '{' => {
                depth += 1;
                current.push(c);
            }
            '>' | '}' => {
                depth -= 1;
                if depth < 0 {
                    return fail("unbalanced brackets in query");
                }
                current.push(c);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if depth != 0 {
        return fail("unbalanced brackets in query");
    }
    let last = current.trim();
    if !last.is_empty() {
        parts.push(last.to_string());
    } else if !parts.is_empty() {
        return fail("trailing comma in query arguments");
    }
    Ok(parts)
}

fn parse_arg(text: &str) -> Result<Arg, QueryFailure> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('<') {
        let Some(inner) = inner.strip_suffix('>') else {
            return fail(format!("event literal '{}' is missing '>'", text));
        };
        let parts = split_args(inner)?;
        let [subject, from, to]: [String; 3] = parts
            .try_into()
            .map_err(|_| QueryFailure(format!("event literal '{}' needs <thing, from, to>", text)))?;
        if !(is_ident(&subject) && is_ident(&from) && is_ident(&to)) {
            return fail(format!("event literal '{}' must hold three names", text));
        }
        return Ok(Arg::Event(subject, from, to));
    }
    if let Some(inner) = text.strip_prefix('{') {
        let Some(inner) = inner.strip_suffix('}') else {
            return fail(format!("set literal '{}' is missing '}}'", text));
        };
        let parts = split_args(inner)?;
        for p in &parts {
            if !is_ident(p) {
                return fail(format!("'{}' is not a valid name in a set literal", p));
            }
        }
        return Ok(Arg::Set(parts));
    }
    if text.chars().all(|c| c.is_ascii_digit()) && !text.is_empty() {
        return match text.parse::<u64>() {
            Ok(n) => Ok(Arg::Nat(n)),
            Err(_) => fail(format!("number '{}' does not fit in 64 bits", text)),
        };
    }
    if is_ident(text) {
        return Ok(Arg::Name(text.to_string()));
    }
    fail(format!("'{}' is not a valid query argument", text))
}

fn parse_query(expr: &str) -> Result<(String, Vec<Arg>), QueryFailure> {
    let expr = expr.trim();
    let Some(open) = expr.find('(') else {
        return fail("a query looks like fn(arg, ...)");
    };
    if !expr.ends_with(')') {
        return fail("query is missing the closing ')'");
    }
    let name = expr[..open].trim().to_string();
    let inner = &expr[open + 1..expr.len() - 1];
    let args = split_args(inner)?
        .iter()
        .map(|a| parse_arg(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name, args))
}

struct Resolver<'m> {
    model: &'m Model,
}

impl<'m> Resolver<'m> {
    fn thing(&self, name: &str) -> Result<ThingId, QueryFailure> {
        self.model
            .thing_by_name(name)
            .ok_or_else(|| QueryFailure(format!("unknown thing '{}'", name)))
    }

    fn property(&self, name: &str) -> Result<PropertyId, QueryFailure> {
        self.model
            .property_by_name(name)
            .ok_or_else(|| QueryFailure(format!("unknown property '{}'", name)))
    }

    fn state_of(&self, thing: ThingId, name: &str) -> Result<StateId, QueryFailure> {
        self.model.state_by_name(thing, name).ok_or_else(|| {
            QueryFailure(format!(
                "unknown state '{}' of thing '{}'",
                name,
                self.model.thing_name(thing)
            ))
        })
    }

    fn class(&self, name: &str) -> Result<bww_core::model::ClassId, QueryFailure> {
        self.model
            .class_by_name(name)
            .ok_or_else(|| QueryFailure(format!("unknown class '{}'", name)))
    }

    fn kind(&self, name: &str) -> Result<bww_core::model::KindId, QueryFailure> {
        self.model
            .kind_by_name(name)
            .ok_or_else(|| QueryFailure(format!("unknown kind '{}'", name)))
    }

    fn event(&self, arg: &Arg) -> Result<Event, QueryFailure> {
        let Arg::Event(subject, from, to) = arg else {
            return fail(format!("expected an event literal, got {}", arg.describe()));
        };
        let subject_id = self.thing(subject)?;
        let from_id = self.state_of(subject_id, from)?;
        let to_id = self.state_of(subject_id, to)?;
        Event::new(subject_id, from_id, to_id)
            .map_err(|_| QueryFailure(format!("<{}, {}, {}> is not an event: states are equal", subject, from, to)))
    }

    fn thing_set(&self, arg: &Arg) -> Result<BTreeSet<ThingId>, QueryFailure> {
        let Arg::Set(names) = arg else {
            return fail(format!("expected a set of things, got {}", arg.describe()));
        };
        names.iter().map(|n| self.thing(n)).collect()
    }

    fn property_set(&self, arg: &Arg) -> Result<BTreeSet<PropertyId>, QueryFailure> {
        let Arg::Set(names) = arg else {
            return fail(format!("expected a set of properties, got {}", arg.describe()));
        };
        names.iter().map(|n| self.property(n)).collect()
    }
}

fn name_arg<'a>(args: &'a [Arg], index: usize, role: &str) -> Result<&'a str, QueryFailure> {
    match args.get(index) {
        Some(Arg::Name(n)) => Ok(n),
        Some(other) => fail(format!("argument {} must be {}, got {}", index + 1, role, other.describe())),
        None => fail(format!("missing argument {} ({})", index + 1, role)),
    }
}

fn arity(args: &[Arg], n: usize, usage: &str) -> Result<(), QueryFailure> {
    if args.len() != n {
        return fail(format!("usage: {}", usage));
    }
    Ok(())
}

/// Evaluate one query expression against a built model.
pub fn evaluate(model: &Model, expr: &str) -> Result<QueryResult, QueryFailure> {
    let (name, args) = parse_query(expr)?;
    let r = Resolver { model };
    let q = |e: bww_core::QueryError| QueryFailure(e.to_string());

    let value = match name.as_str() {
        "possesses?" => {
            arity(&args, 2, "possesses?(thing, property)")?;
            let t = r.thing(name_arg(&args, 0, "a thing")?)?;
            let p = r.property(name_arg(&args, 1, "a property")?)?;
            QueryValue::Bool(model.possesses(t, p).map_err(q)?)
        }
        "precedes?" => {
            arity(&args, 2, "precedes?(property, property)")?;
            let a = r.property(name_arg(&args, 0, "a property")?)?;
            let b = r.property(name_arg(&args, 1, "a property")?)?;
            QueryValue::Bool(model.precedes(a, b).map_err(q)?)
        }
        "isIn?" => {
            arity(&args, 3, "isIn?(thing, state, time)")?;
            let t = r.thing(name_arg(&args, 0, "a thing")?)?;
            let s = r.state_of(t, name_arg(&args, 1, "a state")?)?;
            let Some(Arg::Nat(tick)) = args.get(2) else {
                return fail("isIn? takes a numeric time as its third argument");
            };
            QueryValue::Bool(model.is_in(t, s, TimePoint(*tick)).map_err(q)?)
        }
        "event?" => {
            arity(&args, 3, "event?(thing, fromState, toState)")?;
            let t = r.thing(name_arg(&args, 0, "a thing")?)?;
            let s1 = r.state_of(t, name_arg(&args, 1, "a state")?)?;
            let s2 = r.state_of(t, name_arg(&args, 2, "a state")?)?;
            QueryValue::Bool(model.is_event(t, s1, s2).map_err(q)?)
        }
        "composableEvent?" => {
            arity(&args, 2, "composableEvent?(<t, a, b>, <t, b, c>)")?;
            let e1 = r.event(&args[0])?;
            let e2 = r.event(&args[1])?;
            QueryValue::Bool(composable(&e1, &e2))
        }
        "process?" => {
            if args.is_empty() {
                return fail("process? takes at least one event literal");
            }
            let events = args
                .iter()
                .map(|a| r.event(a))
                .collect::<Result<Vec<_>, _>>()?;
            QueryValue::Bool(is_process(&events).map_err(q)?)
        }
        "complexProperty?" => {
            arity(&args, 1, "complexProperty?(property)")?;
            let p = r.property(name_arg(&args, 0, "a property")?)?;
            QueryValue::Bool(model.is_complex_property(p).map_err(q)?)
        }
        "composite?" => {
            arity(&args, 1, "composite?(thing)")?;
            let t = r.thing(name_arg(&args, 0, "a thing")?)?;
            QueryValue::Bool(model.is_composite(t).map_err(q)?)
        }
        "partof?" => {
            arity(&args, 2, "partof?(whole, part)")?;
            let whole = r.thing(name_arg(&args, 0, "a thing")?)?;
            let part = r.thing(name_arg(&args, 1, "a thing")?)?;
            QueryValue::Bool(model.is_part_of(whole, part).map_err(q)?)
        }
        "memberof_c?" => {
            arity(&args, 2, "memberof_c?(class, thing)")?;
            let c = r.class(name_arg(&args, 0, "a class")?)?;
            let t = r.thing(name_arg(&args, 1, "a thing")?)?;
            QueryValue::Bool(model.is_member_of_class(c, t).map_err(q)?)
        }
        "memberof_k?" => {
            arity(&args, 2, "memberof_k?(kind, thing)")?;
            let k = r.kind(name_arg(&args, 0, "a kind")?)?;
            let t = r.thing(name_arg(&args, 1, "a thing")?)?;
            QueryValue::Bool(model.is_member_of_kind(k, t).map_err(q)?)
        }
        "class?" => {
            arity(&args, 2, "class?({things}, property)")?;
            let candidate = r.thing_set(&args[0])?;
            let p = r.property(name_arg(&args, 1, "a property")?)?;
            QueryValue::Bool(model.is_class(&candidate, p).map_err(q)?)
        }
        "kind?" => {
            arity(&args, 2, "kind?({things}, {properties})")?;
            let candidate = r.thing_set(&args[0])?;
            let props = r.property_set(&args[1])?;
            QueryValue::Bool(model.is_kind(&candidate, &props).map_err(q)?)
        }
        "characteristicProp_c?" => {
            arity(&args, 2, "characteristicProp_c?(class, property)")?;
            let c = r.class(name_arg(&args, 0, "a class")?)?;
            let p = r.property(name_arg(&args, 1, "a property")?)?;
            QueryValue::Bool(model.is_characteristic_of_class(c, p).map_err(q)?)
        }
        "characteristicProp_k?" => {
            arity(&args, 2, "characteristicProp_k?(kind, {properties})")?;
            let k = r.kind(name_arg(&args, 0, "a kind")?)?;
            let props = r.property_set(&args[1])?;
            QueryValue::Bool(model.is_characteristic_of_kind(k, &props).map_err(q)?)
        }
        "fromState!" => {
            arity(&args, 1, "fromState!(<thing, from, to>)")?;
            QueryValue::State(r.event(&args[0])?.from_state())
        }
        "toState!" => {
            arity(&args, 1, "toState!(<thing, from, to>)")?;
            QueryValue::State(r.event(&args[0])?.to_state())
        }
        other => return fail(format!("unknown query function '{}'", other)),
    };

    Ok(QueryResult { value, trace: None })
}

/// Render a query value the way the CLI prints it.
pub fn render(model: &Model, result: &QueryResult) -> String {
    match &result.value {
        QueryValue::Bool(b) => b.to_string(),
        QueryValue::State(s) => model.state_name(*s).to_string(),
        QueryValue::Things(set) => {
            let names: Vec<&str> = set.iter().map(|t| model.thing_name(*t)).collect();
            format!("{{{}}}", names.join(", "))
        }
        QueryValue::Pairs(pairs) => pairs
            .iter()
            .map(|(a, b)| format!("{} -> {}", model.property_name(*a), model.property_name(*b)))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}
