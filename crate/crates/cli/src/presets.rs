//! Built-in problem documents for `verify-theorem`, `frequencies` and `witness`.

use reldec_core::schema::{parse_problem, Problem};

const BELL: &str = r#"{
  "schema": 1,
  "layout": {"labels": ["1", "2"]},
  "state": {"terms": [
    {"basis": {"1": 0, "2": 0}, "weight": 0.5},
    {"basis": {"1": 1, "2": 1}, "weight": 0.5}
  ]},
  "beable": {"support": ["2"], "computational": true, "value_names": ["up", "down"]},
  "observable": {"support": ["1"], "pauli": "z"}
}"#;

/// `(0.6|0⟩ + 0.8i|1⟩) ⊗ |0⟩`: a single branch.
const PRODUCT: &str = r#"{
  "schema": 1,
  "layout": {"labels": ["1", "2"]},
  "state": {"terms": [
    {"basis": {"1": 0, "2": 0}, "amplitude": [0.6, 0.0]},
    {"basis": {"1": 1, "2": 0}, "amplitude": [0.0, 0.8]}
  ]},
  "beable": {"support": ["2"], "computational": true, "value_names": ["up", "down"]},
  "observable": {"support": ["1"], "pauli": "x"}
}"#;

/// One branch of weight 1e-4, which a small ensemble usually misses.
const WEAK_BRANCH: &str = r#"{
  "schema": 1,
  "layout": {"labels": ["1", "2"]},
  "state": {"branches": [
    {"weight": 0.0001, "ket": {"terms": [{"basis": {"1": 0, "2": 0}, "amplitude": [1.0, 0.0]}]}},
    {"weight": 0.9999, "ket": {"terms": [{"basis": {"1": 1, "2": 1}, "amplitude": [1.0, 0.0]}]}}
  ]},
  "beable": {"support": ["2"], "computational": true},
  "observable": {"support": ["1"], "pauli": "z"}
}"#;

const PRESETS: &[(&str, &str)] = &[("bell", BELL), ("product", PRODUCT), ("weak-branch", WEAK_BRANCH)];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> anyhow::Result<Problem> {
    let src = source(name)
        .ok_or_else(|| anyhow::anyhow!("unknown preset `{name}` (available: {})", names().join(", ")))?;
    Ok(parse_problem(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in names() {
            let p = load(name).unwrap();
            assert!(p.observable.is_some(), "{name}");
        }
        assert!(load("nope").is_err());
    }
}
