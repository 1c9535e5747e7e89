//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary always prints; exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use reldec_core::engine::{build_ensemble, frequency_report, verify_conditional_state_theorem};
use reldec_core::linalg::{self, CMatrix, CVector, C64};
use reldec_core::oracle::{self, random};
use reldec_core::qstate::{
    branch_decompose, conditional_state, conditional_subsystem_state, decohered_mixture, event_probability,
    interference_term, luders_conditioning, partial_trace, reconstruct,
};
use reldec_core::witness::{grid_certificate, optimize_witness, DEFAULT_RESTARTS, DEFAULT_STEPS};
use reldec_core::{
    BeableObservable, DensityOperator, Ket, LocalOperator, Observable, Projector, QuantumState, SubsystemLayout, TAU_BRANCH,
};

struct Outcome {
    pass: bool,
    detail: String,
}

type Check<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn bell() -> Ket {
    let l = SubsystemLayout::qubits(["1", "2"]).unwrap();
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    Ket::new(l, CVector::from_vec(vec![h, z, z, h])).unwrap()
}

fn pointer() -> BeableObservable {
    BeableObservable::computational("2", 2).unwrap()
}

/// The shared random instances of criteria 1–3: layouts up to 4×4×4 with a
/// beable on a random proper subset of the factors.
fn instances() -> Vec<(Ket, BeableObservable)> {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let factors = r.random_range(2..=3);
            let layout = random::layout(&mut r, factors, 4);
            let psi = random::ket(&mut r, &layout);
            let support = random::proper_subset(&mut r, &layout);
            let beable = random::beable(&mut r, &layout, &support);
            (psi, beable)
        })
        .collect()
}

fn criterion_1(inst: &[(Ket, BeableObservable)]) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (psi, beable) in inst {
        let keep = psi.layout().complement(beable.support());
        let reduced = partial_trace(psi, &keep).unwrap();
        let d = reduced.matrix().nrows();
        let mut sum = CMatrix::zeros(d, d);
        for q in beable.projectors() {
            if event_probability(psi, q).unwrap() > TAU_BRANCH {
                let (w, rho) = conditional_subsystem_state(psi, q).unwrap();
                sum += rho.matrix() * C64::new(w, 0.0);
            }
        }
        worst = worst.max(linalg::max_abs_diff(&sum, reduced.matrix()));
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-10 && t <= Duration::from_secs(5),
        format!("max residual {worst:.2e} over {} instances in {}", inst.len(), secs(t)),
    )
}

fn criterion_2(inst: &[(Ket, BeableObservable)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (psi, beable) in inst {
        let keep = psi.layout().complement(beable.support());
        let rho = psi.density();
        for q in beable.projectors() {
            if event_probability(psi, q).unwrap() <= TAU_BRANCH {
                continue;
            }
            let (_, luders) = luders_conditioning(&rho, q).unwrap();
            let traced = partial_trace(&luders, &keep).unwrap();
            let (_, cond) = conditional_subsystem_state(psi, q).unwrap();
            worst = worst.max(linalg::max_abs_diff(traced.matrix(), cond.matrix()));
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn criterion_3(inst: &[(Ket, BeableObservable)]) -> Outcome {
    let (mut recon, mut overlap): (f64, f64) = (0.0, 0.0);
    for (psi, beable) in inst {
        let branches = branch_decompose(psi, beable).unwrap();
        recon = recon.max((reconstruct(&branches).unwrap() - psi.amplitudes()).norm());
        for (i, a) in branches.iter().enumerate() {
            for b in &branches[i + 1..] {
                overlap = overlap.max(a.ket.inner(&b.ket).norm());
            }
        }
    }
    outcome(recon <= 1e-10 && overlap <= 1e-10, format!("reconstruction {recon:.2e}, overlap {overlap:.2e}"))
}

fn criterion_4() -> Outcome {
    let psi = bell();
    let beable = pointer();
    let mut passed = 0;
    let mut slowest = Duration::ZERO;
    for seed in 0..100 {
        let start = Instant::now();
        let ensemble = build_ensemble(&psi, &beable, 100_000, seed).unwrap();
        let report = frequency_report(&ensemble, 3.0);
        slowest = slowest.max(start.elapsed());
        if report.pass && report.counts_conserved() {
            passed += 1;
        }
    }
    outcome(
        passed >= 95 && slowest <= Duration::from_secs(1),
        format!("{passed}/100 seeds pass at z_crit 3, slowest run {}", secs(slowest)),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let report = verify_conditional_state_theorem(&bell(), &pointer(), &Observable::pauli_z("1"), 100_000, 1, 3.0).unwrap();
    let bell_ok = report.pass
        && report.entries.len() == 2
        && report.entries.iter().zip([1.0, -1.0]).all(|(e, target)| match (e.mean, e.stderr) {
            (Some(m), Some(s)) => (m - target).abs() <= (3.0 * s).max(1e-10),
            _ => false,
        });
    let mut r = ChaCha8Rng::seed_from_u64(55);
    let layout = SubsystemLayout::new(["1", "2"], vec![3, 3]).unwrap();
    let s1 = vec!["1".to_string()];
    let s2 = vec!["2".to_string()];
    let mut passed = 0;
    for k in 0..50 {
        let psi = random::ket(&mut r, &layout);
        let beable = random::beable(&mut r, &layout, &s2);
        let c1 = random::hermitian(&mut r, &s1, 3);
        let rep = verify_conditional_state_theorem(&psi, &beable, &c1, 200_000, 1000 + k, 4.0).unwrap();
        if rep.pass {
            passed += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        bell_ok && passed >= 48 && t <= Duration::from_secs(60),
        format!("Bell means {:?}, random 3x3 {passed}/50 at z_crit 4, total {}", report.entries.iter().map(|e| e.mean).collect::<Vec<_>>(), secs(t)),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let opt = optimize_witness(&bell(), &pointer(), DEFAULT_RESTARTS, DEFAULT_STEPS, 0).unwrap();
    let grid = grid_certificate(&bell(), &pointer(), 64).unwrap();
    let product = Ket::basis(SubsystemLayout::qubits(["1", "2"]).unwrap(), &[0, 0]).unwrap();
    let product = Ket::new(
        product.layout().clone(),
        CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]),
    )
    .unwrap();
    let prod = optimize_witness(&product, &pointer(), DEFAULT_RESTARTS, DEFAULT_STEPS, 0).unwrap();
    let prod_grid = grid_certificate(&product, &pointer(), 16).unwrap();

    // Optimizer against the grid on further qubit pairs.
    let mut r = ChaCha8Rng::seed_from_u64(66);
    let layout = SubsystemLayout::qubits(["1", "2"]).unwrap();
    let mut worst_shortfall: f64 = grid - opt.gap;
    for k in 0..4 {
        let psi = random::ket(&mut r, &layout);
        let beable = random::beable(&mut r, &layout, &["2".to_string()]);
        let o = optimize_witness(&psi, &beable, DEFAULT_RESTARTS, DEFAULT_STEPS, k).unwrap();
        let g = grid_certificate(&psi, &beable, 32).unwrap();
        worst_shortfall = worst_shortfall.max(g - o.gap);
    }
    let t = start.elapsed();
    outcome(
        opt.gap >= 0.24
            && grid >= 0.249
            && prod.gap <= 1e-10
            && prod_grid <= 1e-10
            && worst_shortfall <= 1e-3
            && t <= Duration::from_secs(10),
        format!(
            "Bell gap {:.6}, grid {:.6}, product gap {:.1e}, worst optimizer shortfall vs grid {:.1e}, {}",
            opt.gap,
            grid,
            prod.gap,
            worst_shortfall,
            secs(t)
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 1.0;
    let mut n = 0;
    while n < 100 {
        let factors = r.random_range(2..=3);
        let layout = random::layout(&mut r, factors, 3);
        let psi = random::ket(&mut r, &layout);
        let s2 = vec![layout.labels()[factors - 1].clone()];
        let q = random::rank_one(&mut r, &s2, layout.dim_of_set(&s2).unwrap());
        if event_probability(&psi, &q).unwrap() <= 1e-6 {
            continue;
        }
        let (_, rho) = conditional_subsystem_state(&psi, &q).unwrap();
        worst = worst.min(rho.purity());
        n += 1;
    }
    // With three factors the kept side is the joint state of the first two.
    outcome(worst >= 1.0 - 1e-10, format!("min purity {worst:.12} over {n} instances"))
}

fn reldec(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_reldec")).args(args).output().expect("run reldec")
}

fn criterion_8(dir: &Path) -> Outcome {
    let out = dir.join("wigner.json");
    let o = reldec(&["scenario", "--name", "wigner", "--out", out.to_str().unwrap()]);
    if o.status.code() != Some(0) {
        return outcome(false, format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let steps = report["steps"].as_array().unwrap();
    let strs = |v: &Value| v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect::<Vec<_>>();
    let witness = steps.iter().find(|s| {
        s["op"] == "witness" && strs(&s["split"]["object"]) == ["1", "2"] && strs(&s["split"]["subject"]) == ["3"]
    });
    let measure = steps.iter().find(|s| {
        s["op"] == "measure"
            && strs(&s["split"]["object"]) == ["1"]
            && strs(&s["split"]["subject"]).contains(&"2".to_string())
            && s["measure"]["beable"] == "friend"
    });
    let (Some(w), Some(m)) = (witness, measure) else {
        return outcome(false, "missing witness or measure step");
    };
    let gap = w["witness"]["gap"].as_f64().unwrap();
    let decoherence_ok = m["measure"]["decomposition"]["pass"] == true && m["measure"]["theorem"]["pass"] == true;
    let (tw, tm) = (w["split"]["tag"].as_str().unwrap(), m["split"]["tag"].as_str().unwrap());
    let no_contradiction =
        report["relativity"]["pass"] == true && report["relativity"]["contradictions"].as_array().unwrap().is_empty();
    outcome(
        gap > 0.0 && decoherence_ok && tw != tm && no_contradiction,
        format!("gap {gap:.6} under `{tw}`, decoherence check under `{tm}`, no contradiction: {no_contradiction}"),
    )
}

fn criterion_9(dir: &Path) -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["scenario", "--name", "measurement", "--shots", "20000", "--seed", "7"],
        vec!["scenario", "--name", "wigner", "--seed", "3", "--format", "csv"],
        vec!["scenario", "--name", "zurek"],
        vec!["scenario", "--name", "cat-i"],
        vec!["scenario", "--name", "cat-ii"],
        vec!["verify-theorem", "--name", "bell", "--shots", "50000", "--seed", "9"],
        vec!["frequencies", "--name", "bell", "--shots", "50000", "--seed", "9"],
        vec!["witness", "--name", "bell", "--seed", "4", "--certify", "--resolution", "16"],
    ];
    let mut checked = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let mut reference: Option<Vec<u8>> = None;
        for (run, threads) in ["1", "4", "1", "3"].iter().enumerate() {
            let out = dir.join(format!("det-{k}-{run}"));
            let mut args = vec!["--threads", threads];
            args.extend(cmd.iter().copied());
            args.extend(["--out", out.to_str().unwrap()]);
            let o = reldec(&args);
            if !o.status.success() {
                return outcome(false, format!("{cmd:?} exited {:?}", o.status.code()));
            }
            let bytes = std::fs::read(&out).unwrap();
            match &reference {
                None => reference = Some(bytes),
                Some(r) if *r != bytes => {
                    return outcome(false, format!("{cmd:?} differs with --threads {threads}"));
                }
                Some(_) => {}
            }
        }
        checked += 1;
    }
    outcome(true, format!("{checked} commands byte-identical across 4 runs with 1, 3 and 4 threads"))
}

/// Every ordered list of factor dimensions (each ≥ 2) with product ≤ `max`.
fn all_layouts(max: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, remaining: usize, out: &mut Vec<Vec<usize>>) {
        for d in 2..=remaining {
            prefix.push(d);
            out.push(prefix.clone());
            extend(prefix, remaining / d, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), max, &mut out);
    out
}

fn proper_subsets(labels: &[String]) -> Vec<Vec<String>> {
    let n = labels.len();
    (1..(1u32 << n) - 1)
        .map(|mask| (0..n).filter(|k| mask & (1 << k) != 0).map(|k| labels[k].clone()).collect())
        .collect()
}

fn criterion_10() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(1010);
    let layouts = all_layouts(64);
    let mut worst: f64 = 0.0;
    let mut comparisons = 0usize;
    let mut track = |x: f64| {
        worst = worst.max(x);
        comparisons += 1;
    };
    for dims in &layouts {
        let layout = SubsystemLayout::new((0..dims.len()).map(|k| format!("s{k}")), dims.clone()).unwrap();
        let psi = random::ket(&mut r, &layout);
        let rho_psi = oracle::density(&psi);
        let a = random::ket(&mut r, &layout);
        let mixed = DensityOperator::new(layout.clone(), (rho_psi.clone() + oracle::density(&a)) * C64::new(0.5, 0.0)).unwrap();
        for keep in proper_subsets(layout.labels()) {
            track(linalg::max_abs_diff(partial_trace(&psi, &keep).unwrap().matrix(), &oracle::partial_trace(&layout, &rho_psi, &keep)));
            track(linalg::max_abs_diff(
                partial_trace(&mixed, &keep).unwrap().matrix(),
                &oracle::partial_trace(&layout, mixed.matrix(), &keep),
            ));
        }

        let support = if layout.len() == 1 { layout.labels().to_vec() } else { random::proper_subset(&mut r, &layout) };
        let support: Vec<String> = layout.labels().iter().filter(|l| support.contains(l)).cloned().collect();
        let beable = random::beable(&mut r, &layout, &support);
        for (q, w) in beable.projectors().iter().zip(oracle::weights(&psi, &beable)) {
            track((event_probability(&psi, q).unwrap() - w).abs());
        }
        track(linalg::max_abs_diff(
            decohered_mixture(&branch_decompose(&psi, &beable).unwrap()).unwrap().matrix(),
            &oracle::decohered(&psi, &beable),
        ));
        if layout.len() == 1 {
            continue;
        }
        let object = layout.complement(&support);
        let d_obj = layout.dim_of_set(&object).unwrap();
        let c = random::hermitian(&mut r, &object, d_obj);
        for q in beable.projectors() {
            if event_probability(&psi, q).unwrap() <= TAU_BRANCH {
                continue;
            }
            let (_, want) = oracle::conditional(&psi, q.support(), q.matrix(), &object);
            let (_, lit) = conditional_state(&psi, q, &object).unwrap();
            let (_, sub) = conditional_subsystem_state(&psi, q).unwrap();
            track(linalg::max_abs_diff(lit.matrix(), &want));
            track(linalg::max_abs_diff(sub.matrix(), &want));
            let obj_layout = layout.restrict(&object).unwrap();
            let theory = lit.expectation(c.support(), c.matrix()).unwrap().re;
            track((theory - oracle::expectation(&obj_layout, &want, c.support(), c.matrix())).abs());
        }
        let report = verify_conditional_state_theorem(&psi, &beable, &c, 64, 1, 3.0).unwrap();
        for e in report.compared() {
            let q = beable.projector(e.index);
            let (_, want) = oracle::conditional(&psi, q.support(), q.matrix(), &object);
            let obj_layout = layout.restrict(&object).unwrap();
            let o = oracle::expectation(&obj_layout, &want, c.support(), c.matrix());
            track((e.theory.unwrap() - o).abs());
            track((e.theory_direct.unwrap() - o).abs());
        }
        let p1_support = vec![object[0].clone()];
        let p1: Projector = random::rank_one(&mut r, &p1_support, layout.dim_of_set(&p1_support).unwrap());
        let p2 = random::rank_one(&mut r, &support, beable.dim());
        track((interference_term(&psi, &beable, &p1, &p2).unwrap() - oracle::interference(&psi, &beable, &p1, &p2)).abs());
        track((psi.expectation(c.support(), c.matrix()).unwrap().re - oracle::expectation(&layout, &rho_psi, c.support(), c.matrix())).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("{} layouts with total dimension <= 64, {comparisons} comparisons, max deviation {worst:.2e}", layouts.len()),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let inst = instances();
    let criteria: Vec<(&str, Check)> = vec![
        ("decomposition identity", Box::new(|| criterion_1(&inst))),
        ("Luders consistency", Box::new(|| criterion_2(&inst))),
        ("branch reconstruction", Box::new(|| criterion_3(&inst))),
        ("frequency convergence", Box::new(criterion_4)),
        ("conditional subsystem-state theorem", Box::new(criterion_5)),
        ("coherence witness", Box::new(criterion_6)),
        ("Everett reduction", Box::new(criterion_7)),
        ("scenario relativity", Box::new(|| criterion_8(dir.path()))),
        ("determinism", Box::new(|| criterion_9(dir.path()))),
        ("oracle equivalence", Box::new(criterion_10)),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!("criterion {:>2} {:<38} {}  {}", k + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
