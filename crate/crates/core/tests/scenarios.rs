use reldec_core::qstate::event_probability;
use reldec_core::scenario::{builtin_names, resolve_scenario, run_scenario, ClaimKind, ScenarioReport, ScenarioSpec};
use reldec_core::{Error, TAU_ALG};

fn run(name: &str) -> ScenarioReport {
    let spec = resolve_scenario(name).unwrap();
    let report = run_scenario(&spec).unwrap();
    for v in report.failed_assertions() {
        eprintln!("{name}: step {} {} expected {} got {}", v.step, v.assertion, v.expected, v.actual);
    }
    report
}

#[test]
fn every_builtin_passes() {
    for name in builtin_names() {
        let r = run(name);
        assert!(r.pass, "{name} failed");
        assert_eq!(r.schema, 1);
        assert!(r.relativity.pass);
        assert!(!r.assertions.is_empty());
    }
}

#[test]
fn measurement_decomposition_and_shift_back() {
    let r = run("measurement");
    let (first, m) = r.measure_steps().next().unwrap();
    assert_eq!(first.split.object, vec!["1"]);
    assert!(m.decomposition.residual <= TAU_ALG);
    assert_eq!(m.decomposition.components.len(), 2);
    assert!(m.theorem.pass && m.frequencies.pass);

    let shift = &r.steps[3];
    assert_eq!(shift.split.object, vec!["1", "2"]);
    assert!(shift.notes.iter().any(|n| n.contains("detached")));

    let (last, _) = r.measure_steps().last().unwrap();
    assert_eq!(last.split.object, vec!["1"]);
    assert_eq!(last.split.subject_beable.as_deref(), Some("pointer"));

    let (_, w) = r.witness_steps().next().unwrap();
    assert!((w.probe_gap.unwrap() - 0.24).abs() < 1e-12);
}

#[test]
fn wigner_relativity() {
    let r = run("wigner");
    let (ms, m) = r.measure_steps().next().unwrap();
    let (ws, w) = r.witness_steps().next().unwrap();
    assert_eq!(ms.split.object, vec!["1"]);
    assert_eq!(m.beable, "friend");
    assert!(m.decomposition.pass && m.theorem.pass);
    assert!(m.decomposition.components.iter().all(|c| (c.purity - 1.0).abs() < TAU_ALG));
    assert_eq!(ws.split.object, vec!["1", "2"]);
    assert_eq!(ws.split.subject, vec!["3"]);
    assert!(w.gap > 0.2);
    assert_ne!(ms.split.tag, ws.split.tag);
    let kinds: Vec<_> = r.relativity.claims.iter().map(|c| (c.kind, c.subject.as_str())).collect();
    assert!(kinds.contains(&(ClaimKind::Decoherence, "friend@2+3")));
    assert!(kinds.contains(&(ClaimKind::Coherence, "wigner@3")));
    assert!(r.relativity.contradictions.is_empty());
}

#[test]
fn cat_alternatives_swap_roles() {
    let a = run("cat-i");
    let b = run("cat-ii");
    let (sa, ma) = a.measure_steps().next().unwrap();
    let (sb, mb) = b.measure_steps().next().unwrap();
    assert_eq!(sa.split.object, vec!["contraption"]);
    assert_eq!(sb.split.object, vec!["cat"]);
    assert!(sa.split.subject.contains(&"cat".to_string()));
    assert!(sb.split.subject.contains(&"contraption".to_string()));
    for (x, y) in ma.weights.iter().zip(&mb.weights) {
        assert!((x - y).abs() < 1e-12);
    }
    // Both weights are the probability of the same event on the shared state.
    let spec = resolve_scenario("cat-i").unwrap();
    let q = spec.beable("consciousness").unwrap().projector(0);
    assert!((event_probability(&spec.psi, q).unwrap() - ma.weights[0]).abs() < 1e-12);
}

#[test]
fn reports_are_reproducible() {
    for name in ["measurement", "zurek"] {
        let spec = resolve_scenario(name).unwrap();
        let a = serde_json::to_string(&run_scenario(&spec).unwrap()).unwrap();
        let b = serde_json::to_string(&run_scenario(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn same_subject_contradiction_is_reported() {
    let text = r#"{
        "schema": 1, "name": "contradiction",
        "layout": {"labels": ["1", "2", "3"]},
        "state": {"terms": [{"basis": {"1": 0, "2": 0, "3": 0}, "weight": 0.5}, {"basis": {"1": 1, "2": 1, "3": 0}, "weight": 0.5}]},
        "beables": {"p": {"support": ["2"], "computational": true}, "e": {"support": ["3"], "computational": true}},
        "observables": {"z": {"support": ["1", "2"], "diagonal": [1, 0, 0, -1]}},
        "sampling": {"shots": 1000, "seed": 1},
        "split": {"object": ["1", "2"]},
        "steps": [
            {"op": "convert", "discussion": "a", "beable": "e"},
            {"op": "witness", "discussion": "a", "branches": "p", "optimize": {"restarts": 2, "steps": 50}},
            {"op": "measure", "discussion": "a", "observable": "z"}
        ]
    }"#;
    let r = run_scenario(&ScenarioSpec::parse(text).unwrap()).unwrap();
    assert_eq!(r.relativity.contradictions.len(), 1);
    assert!(!r.pass);
}

#[test]
fn failing_step_reports_its_index() {
    let text = r#"{
        "schema": 1, "name": "bad",
        "layout": {"labels": ["1", "2"]},
        "state": {"amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]},
        "beables": {"p": {"support": ["2"], "computational": true}},
        "observables": {"z": {"support": ["1"], "pauli": "z"}},
        "sampling": {"shots": 10, "seed": 1},
        "split": {"object": ["1", "2"]},
        "steps": [{"op": "convert", "discussion": "a", "beable": "p"}]
    }"#;
    match run_scenario(&ScenarioSpec::parse(text).unwrap()) {
        Err(Error::Step { index, .. }) => assert_eq!(index, 0),
        other => panic!("expected a step error, got {other:?}"),
    }
}
