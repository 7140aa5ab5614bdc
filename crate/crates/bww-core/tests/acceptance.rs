//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measurements. Run with `cargo test --test acceptance --
//! --nocapture` to see them.

mod common;

use bww_core::model::{ModelBuilder, PropertyId, StateId, ThingId, TimePoint};
use bww_core::{compile, composable, is_process, validate_model, Model};
use common::{compile_fixture, fixture, naive_closure, XorShift};
use std::collections::BTreeSet;
use std::time::Instant;

fn names(model: &Model, set: impl IntoIterator<Item = PropertyId>) -> BTreeSet<String> {
    set.into_iter()
        .map(|p| model.property_name(p).to_string())
        .collect()
}

fn state_names(model: &Model, thing: &str) -> BTreeSet<String> {
    let id = model.thing_by_name(thing).unwrap();
    model
        .state_space(id)
        .unwrap()
        .into_iter()
        .map(|s| model.state_name(s).to_string())
        .collect()
}

fn set_of(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Criterion: the four reference models parse, build, and validate with
/// zero diagnostics, in under a second, with content transcribed exactly.
#[test]
fn fixture_conformance() {
    let start = Instant::now();
    let model = compile_fixture("library.bww");
    let diags = validate_model(&model);
    let elapsed = start.elapsed();

    assert_eq!(diags, vec![], "reference fixture must be conformant");

    for thing in ["Book", "Student", "Player", "Printer"] {
        assert!(model.thing_by_name(thing).is_some(), "missing thing {}", thing);
    }
    let book = model.thing_by_name("Book").unwrap();
    assert_eq!(
        names(&model, model.thing(book).unwrap().possessed.iter().copied()),
        set_of(&["Title", "Author", "Price", "ISBN", "Publisher", "ClassificationNo"])
    );
    assert_eq!(
        state_names(&model, "Book"),
        set_of(&["onTheRack", "issued", "claimed", "writtenOff", "missing"])
    );
    assert_eq!(
        state_names(&model, "Student"),
        set_of(&["registered", "graduated", "migrated"])
    );
    assert_eq!(
        state_names(&model, "Player"),
        set_of(&["playing", "injured", "rested", "retired"])
    );
    assert_eq!(state_names(&model, "Printer"), set_of(&["on", "off", "busy", "idle"]));

    let schema_attrs = |name: &str| -> Vec<String> {
        let id = model.schema_by_name(name).unwrap_or_else(|| panic!("missing schema {}", name));
        model
            .schema(id)
            .unwrap()
            .attributes
            .iter()
            .map(|a| a.name.clone())
            .collect()
    };
    assert_eq!(schema_attrs("Book1"), vec!["ClassificationNo", "Title", "Author"]);
    assert_eq!(schema_attrs("Book2"), vec!["ISBN", "Title", "Publisher"]);
    assert_eq!(schema_attrs("Student1"), vec!["RegNo", "Names", "Address"]);
    assert_eq!(
        schema_attrs("Student2"),
        vec!["RegNo", "CourseRegistered", "DegreeAwarded"]
    );

    assert!(
        elapsed.as_secs_f64() < 1.0,
        "conformance run took {:?}, budget is 1s",
        elapsed
    );
    println!(
        "ACCEPTANCE PASS: fixture conformance — 4 models, 0 diagnostics, {:?}",
        elapsed
    );
}

/// Direct evaluation of the quantified change formula over a state-at-time
/// table built from `is_in`: a change from s1 to s2 happened when two
/// instants witness the states in order with no third state between them.
fn formula_event(state_at: &[Option<StateId>], s1: StateId, s2: StateId) -> bool {
    if s1 == s2 {
        return false;
    }
    let max_tick = state_at.len() - 1;
    for t1 in 0..=max_tick {
        if state_at[t1] != Some(s1) {
            continue;
        }
        for t2 in (t1 + 1)..=max_tick {
            if state_at[t2] != Some(s2) {
                continue;
            }
            let blocked = ((t1 + 1)..t2)
                .any(|t3| matches!(state_at[t3], Some(s) if s != s1 && s != s2));
            if !blocked {
                return true;
            }
        }
    }
    false
}

/// Criterion: over 1,000 randomized histories the adjacent-pair event test
/// agrees exactly with the quantified formula evaluated through `is_in`.
#[test]
fn event_formula_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = XorShift::new(0xE7E57);
    let mut disagreements = 0usize;
    let mut comparisons = 0usize;

    for _ in 0..1000 {
        let n_states = 1 + rng.below(5) as usize;
        let len = rng.below(9) as usize;
        let mut ticks: Vec<u64> = (0..=20).collect();
        rng.shuffle(&mut ticks);
        let mut chosen: Vec<u64> = ticks[..len].to_vec();
        chosen.sort_unstable();

        let mut b = ModelBuilder::new();
        let p = b.declare_property("P").unwrap();
        let subject = b.declare_thing("subject", &[p], &[]).unwrap();
        let states: Vec<StateId> = (0..n_states)
            .map(|i| b.declare_state(subject, &format!("s{}", i)).unwrap())
            .collect();
        let observations: Vec<(StateId, TimePoint)> = chosen
            .iter()
            .map(|&t| (states[rng.below(n_states as u64) as usize], TimePoint(t)))
            .collect();
        b.record_history(subject, &observations).unwrap();
        let model = b.build();

        // State-at-time table through is_in, covering one tick past the
        // observation range (the final state persists).
        let state_at: Vec<Option<StateId>> = (0..=21u64)
            .map(|t| {
                states
                    .iter()
                    .copied()
                    .find(|&s| model.is_in(subject, s, TimePoint(t)).unwrap())
            })
            .collect();

        for &s1 in &states {
            for &s2 in &states {
                comparisons += 1;
                let implemented = model.is_event(subject, s1, s2).unwrap();
                let oracle = formula_event(&state_at, s1, s2);
                if implemented != oracle {
                    disagreements += 1;
                }
            }
        }
    }

    let elapsed = start.elapsed();
    assert_eq!(disagreements, 0, "event test diverged from the formula");
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "event oracle run took {:?}, budget is 10s",
        elapsed
    );
    println!(
        "ACCEPTANCE PASS: event-formula equivalence — 1000 histories, {} comparisons, 0 disagreements, {:?}",
        comparisons, elapsed
    );
}

/// Criterion: the closure engine equals a naive fixed-point oracle on 200
/// random base relations, and reflexivity/transitivity hold pointwise.
#[test]
fn closure_oracle_agreement() {
    let start = Instant::now();
    let mut rng = XorShift::new(0xC105);

    for trial in 0..200 {
        let n = 1 + rng.below(10) as usize;
        let n_edges = rng.below(2 * n as u64 + 5) as usize;
        let mut b = ModelBuilder::new();
        let props: Vec<PropertyId> = (0..n)
            .map(|i| b.declare_property(&format!("p{}", i)).unwrap())
            .collect();
        let mut base = BTreeSet::new();
        for _ in 0..n_edges {
            let from = props[rng.below(n as u64) as usize];
            let to = props[rng.below(n as u64) as usize];
            b.declare_precedes(from, to).unwrap();
            base.insert((from, to));
        }
        let model = b.build();
        let closure = model.precedes_closure();

        assert_eq!(
            closure,
            &naive_closure(&props, &base),
            "trial {}: closure diverged from the fixed-point oracle",
            trial
        );
        for &p in &props {
            assert!(model.precedes(p, p).unwrap(), "reflexivity failed");
        }
        for &(a, bb) in closure {
            for &(b2, c) in closure {
                if bb == b2 {
                    assert!(model.precedes(a, c).unwrap(), "transitivity failed");
                }
            }
        }
    }

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE PASS: closure oracle — 200 relations, 0 disagreements, {:?}",
        elapsed
    );
}

/// Criterion: computed class extensions match a brute-force possession
/// filter on 200 random models, and an extra possessor outside a declared
/// extension always triggers V4.
#[test]
fn class_equivalence_and_v4_injection() {
    let start = Instant::now();
    let mut rng = XorShift::new(0xC1A55);

    for trial in 0..200 {
        let n_props = 1 + rng.below(6) as usize;
        let n_things = 1 + rng.below(6) as usize;
        let matrix: Vec<BTreeSet<usize>> = (0..n_things)
            .map(|_| (0..n_props).filter(|_| rng.chance(45)).collect())
            .collect();

        // One class per property; extensions must equal the matrix filter.
        let mut b = ModelBuilder::new();
        let props: Vec<PropertyId> = (0..n_props)
            .map(|i| b.declare_property(&format!("p{}", i)).unwrap())
            .collect();
        let things: Vec<ThingId> = matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let possessed: Vec<PropertyId> = row.iter().map(|&p| props[p]).collect();
                b.declare_thing(&format!("t{}", i), &possessed, &[]).unwrap()
            })
            .collect();
        let classes: Vec<_> = (0..n_props)
            .map(|p| b.declare_class(&format!("c{}", p), props[p], None).unwrap())
            .collect();
        let model = b.build();

        for (p, &class) in classes.iter().enumerate() {
            let expected: BTreeSet<ThingId> = (0..n_things)
                .filter(|&t| matrix[t].contains(&p))
                .map(|t| things[t])
                .collect();
            assert_eq!(
                model.class_extension(class).unwrap(),
                expected,
                "trial {}: extension of c{} diverged from brute force",
                trial,
                p
            );
            for (t, &thing) in things.iter().enumerate() {
                assert_eq!(
                    model.is_member_of_class(class, thing).unwrap(),
                    matrix[t].contains(&p)
                );
            }
        }

        // Declare the extension as computed, then inject one extra
        // possessor outside it: V4 must fire.
        let char_prop = rng.below(n_props as u64) as usize;
        let declared: Vec<ThingId> = (0..n_things)
            .filter(|&t| matrix[t].contains(&char_prop))
            .map(|t| things[t])
            .collect();
        let mut b = ModelBuilder::new();
        let props2: Vec<PropertyId> = (0..n_props)
            .map(|i| b.declare_property(&format!("p{}", i)).unwrap())
            .collect();
        for (i, row) in matrix.iter().enumerate() {
            let possessed: Vec<PropertyId> = row.iter().map(|&p| props2[p]).collect();
            b.declare_thing(&format!("t{}", i), &possessed, &[]).unwrap();
        }
        b.declare_thing("intruder", &[props2[char_prop]], &[]).unwrap();
        b.declare_class("declared", props2[char_prop], Some(&declared)).unwrap();
        let diags = validate_model(&b.build());
        assert_eq!(
            diags.iter().filter(|d| d.code == "V4").count(),
            1,
            "trial {}: injected possessor did not trigger V4",
            trial
        );
    }

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE PASS: class equivalence — 200 models match brute force, V4 injection always fires, {:?}",
        elapsed
    );
}

/// Criterion: conjunction is invariant under permutation, duplication, and
/// flattening, and possession of a conjunction is possession of every
/// conjunct, against brute force.
#[test]
fn conjunction_algebra() {
    let start = Instant::now();
    let mut rng = XorShift::new(0xA16EB);

    for trial in 0..300 {
        let mut b = ModelBuilder::new();
        let base: Vec<PropertyId> = (0..6)
            .map(|i| b.declare_property(&format!("p{}", i)).unwrap())
            .collect();

        // Pool of base properties plus up to two named complexes; each
        // pool entry knows its hand-flattened base set.
        let mut pool: Vec<(PropertyId, BTreeSet<PropertyId>)> = base
            .iter()
            .map(|&p| (p, BTreeSet::from([p])))
            .collect();
        for c in 0..rng.below(3) {
            let size = 2 + rng.below(2) as usize;
            let mut members = BTreeSet::new();
            while members.len() < size {
                members.insert(base[rng.below(6) as usize]);
            }
            let member_vec: Vec<PropertyId> = members.iter().copied().collect();
            let id = b
                .declare_complex_property(&format!("complex{}", c), &member_vec)
                .unwrap();
            pool.push((id, members));
        }

        let len = 1 + rng.below(6) as usize;
        let draws: Vec<usize> = (0..len).map(|_| rng.below(pool.len() as u64) as usize).collect();
        let list: Vec<PropertyId> = draws.iter().map(|&i| pool[i].0).collect();
        let flat: BTreeSet<PropertyId> = draws.iter().flat_map(|&i| pool[i].1.clone()).collect();

        let canonical = b.conjoin(&list).unwrap();
        let mut shuffled = list.clone();
        rng.shuffle(&mut shuffled);
        assert_eq!(b.conjoin(&shuffled).unwrap().id, canonical.id, "permutation");
        let mut doubled = list.clone();
        doubled.extend_from_slice(&list);
        assert_eq!(b.conjoin(&doubled).unwrap().id, canonical.id, "duplication");
        let flat_list: Vec<PropertyId> = flat.iter().copied().collect();
        assert_eq!(b.conjoin(&flat_list).unwrap().id, canonical.id, "flattening");

        // Possession equivalence against the brute-force conjunct check.
        let things: Vec<(ThingId, BTreeSet<PropertyId>)> = (0..3)
            .map(|i| {
                let possessed: Vec<PropertyId> = base
                    .iter()
                    .copied()
                    .filter(|_| rng.chance(50))
                    .collect();
                let id = b.declare_thing(&format!("t{}_{}", trial, i), &possessed, &[]).unwrap();
                (id, possessed.into_iter().collect())
            })
            .collect();
        let model = b.build();
        for (thing, possessed) in &things {
            let expected = flat.iter().all(|c| possessed.contains(c));
            assert_eq!(
                model.possesses(*thing, canonical.id).unwrap(),
                expected,
                "trial {}: possession of the conjunction diverged",
                trial
            );
        }
    }

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE PASS: conjunction algebra — 300 random lists invariant and possession-consistent, {:?}",
        elapsed
    );
}

/// Criterion: the borrow/claim event pair forms a process, and a process
/// with one broken junction yields exactly one V9.
#[test]
fn process_composability() {
    let start = Instant::now();

    let model = compile_fixture("library.bww");
    let book = model.thing_by_name("Book").unwrap();
    let issued = model.state_by_name(book, "issued").unwrap();
    let claimed = model.state_by_name(book, "claimed").unwrap();
    let e1 = bww_core::model::Event::new(book, issued, claimed).unwrap();
    let e2 = bww_core::model::Event::new(book, claimed, issued).unwrap();
    assert!(composable(&e1, &e2));
    assert!(is_process(&[e1, e2]).unwrap());

    // The declared process in the fixture is the same pair.
    let declared = model.process_by_name("BorrowCycle").unwrap();
    let steps: Vec<_> = model
        .process(declared)
        .unwrap()
        .steps
        .iter()
        .map(|s| s.as_event(book).unwrap())
        .collect();
    assert!(is_process(&steps).unwrap());

    // Randomized single-break processes always yield exactly one V9.
    let mut rng = XorShift::new(0x9B0C);
    for trial in 0..50 {
        let n_states = 3 + rng.below(3) as usize;
        let len = 2 + rng.below(3) as usize;
        let mut b = ModelBuilder::new();
        let p = b.declare_property("P").unwrap();
        let t = b.declare_thing("machine", &[p], &[]).unwrap();
        let states: Vec<StateId> = (0..n_states)
            .map(|i| b.declare_state(t, &format!("s{}", i)).unwrap())
            .collect();

        // A valid chain, then one junction broken.
        let mut chain: Vec<(StateId, StateId)> = Vec::new();
        let mut current = 0usize;
        for _ in 0..len {
            let mut next = rng.below(n_states as u64) as usize;
            if next == current {
                next = (next + 1) % n_states;
            }
            chain.push((states[current], states[next]));
            current = next;
        }
        let junction = 1 + rng.below(len as u64 - 1) as usize;
        let must_not_be = [chain[junction - 1].1, chain[junction].1];
        let replacement = states
            .iter()
            .copied()
            .find(|s| !must_not_be.contains(s))
            .expect("three states leave a free one");
        chain[junction].0 = replacement;

        b.declare_process("broken", t, &chain).unwrap();
        let diags = validate_model(&b.build());
        let v9s = diags.iter().filter(|d| d.code == "V9").count();
        assert_eq!(v9s, 1, "trial {}: expected exactly one V9, got {:?}", trial, diags);
        assert!(diags.iter().all(|d| d.code == "V9"), "trial {}: stray codes: {:?}", trial, diags);
    }

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE PASS: process composability — borrow/claim pair composes, 50 single-break processes each yield exactly one V9, {:?}",
        elapsed
    );
}

/// Criterion: each rule has a minimal fixture triggering exactly its code
/// and nothing else.
#[test]
fn diagnostic_precision() {
    let start = Instant::now();
    let cases = [
        ("rules/v1.bww", "V1"),
        ("rules/v2.bww", "V2"),
        ("rules/v3.bww", "V3"),
        ("rules/v4.bww", "V4"),
        ("rules/v5.bww", "V5"),
        ("rules/v6.bww", "V6"),
        ("rules/v7.bww", "V7"),
        ("rules/v8.bww", "V8"),
        ("rules/v9.bww", "V9"),
        ("rules/v10.bww", "V10"),
        ("rules/v11.bww", "V11"),
        ("rules/w1.bww", "W1"),
        ("rules/i2.bww", "I2"),
    ];
    for (name, expected) in cases {
        let source = fixture(name);
        let model = compile(&source, name).unwrap_or_else(|e| panic!("{} failed: {:?}", name, e));
        let diags = validate_model(&model);
        assert_eq!(
            diags.len(),
            1,
            "{}: expected exactly one finding, got {:?}",
            name,
            diags
        );
        assert_eq!(diags[0].code, expected, "{}: wrong code", name);
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE PASS: diagnostic precision — 13 minimal fixtures, each exactly one code, {:?}",
        elapsed
    );
}
