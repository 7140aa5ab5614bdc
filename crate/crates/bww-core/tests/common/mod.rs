//! Helpers shared by the integration suites: fixture loading, a seeded
//! generator, and independent oracles the implementation is checked
//! against.

#![allow(dead_code)]

use bww_core::model::PropertyId;
use std::collections::BTreeSet;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    let path = fixture_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {:?}: {}", path, e))
}

pub fn compile_fixture(name: &str) -> bww_core::Model {
    let source = fixture(name);
    bww_core::compile(&source, name).unwrap_or_else(|e| panic!("fixture {} failed: {:?}", name, e))
}

/// Small deterministic generator for the randomized suites. Fixed seeds
/// keep every run identical across machines.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.wrapping_mul(0x9E3779B97F4A7C15).max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform-enough value in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below((i + 1) as u64) as usize;
            items.swap(i, j);
        }
    }
}

/// Fixed-point closure oracle: start from the base plus the reflexive
/// pairs, then add (a, c) whenever (a, b) and (b, c) are present, until
/// nothing changes. Independent of the engine's per-node reachability.
pub fn naive_closure(
    properties: &[PropertyId],
    base: &BTreeSet<(PropertyId, PropertyId)>,
) -> BTreeSet<(PropertyId, PropertyId)> {
    let mut closure: BTreeSet<(PropertyId, PropertyId)> = base.clone();
    for &p in properties {
        closure.insert((p, p));
    }
    loop {
        let mut additions = Vec::new();
        for &(a, b) in &closure {
            for &(b2, c) in &closure {
                if b == b2 && !closure.contains(&(a, c)) {
                    additions.push((a, c));
                }
            }
        }
        if additions.is_empty() {
            return closure;
        }
        closure.extend(additions);
    }
}
