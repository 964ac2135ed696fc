//! Shared helpers for integration tests.

#![allow(dead_code)]

use serde_json::Value;

/// Pilot bands and seeds from `tests/data/bands.json`.
pub fn bands() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/bands.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("bands.json present")).expect("bands.json parses")
}

pub fn u64_at(v: &Value, key: &str) -> u64 {
    v[key].as_u64().unwrap_or_else(|| panic!("missing integer {key}"))
}

pub fn usize_at(v: &Value, key: &str) -> usize {
    u64_at(v, key) as usize
}

pub fn f64_at(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing number {key}"))
}

pub fn grid_at(v: &Value, key: &str) -> Vec<usize> {
    v[key].as_array().unwrap_or_else(|| panic!("missing list {key}")).iter().map(|x| x.as_u64().unwrap() as usize).collect()
}
