//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use thresholdlab::certificate::{q_exact, qf_exact, verify_sandwich};
use thresholdlab::cover::{
    bipartite_lower_bound_experiment, cover_validity_exhaustive, q_upper_bound, ramsey_clique_cover, Validity,
};
use thresholdlab::deviation::moment_check;
use thresholdlab::family::{enumerate_monotone_families, threshold_exact, threshold_monte_carlo};
use thresholdlab::graph::GraphSpec;
use thresholdlab::independence::independence_number;
use thresholdlab::random::{conditional_square_capture, coupling_marginal_test};
use thresholdlab::{rng, Direction, GroundSet, MonotoneFamily, SubsetMask};

use thresholdlab_cli::artifacts::Status;
use thresholdlab_cli::config::{ExperimentConfig, Format};
use thresholdlab_cli::run::{replay, run};

const SEED: u64 = 0x5eed_2026;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config(sub: &str, params: Value, seed: Option<u64>, trials: Option<u64>, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        subcommand: sub.into(),
        params: params.as_object().expect("object").clone(),
        master_seed: seed,
        trials,
        format: Format::Csv,
        output_path: out.to_string_lossy().into_owned(),
    }
}

fn family(n: usize, dir: Direction, sets: &[&[usize]]) -> MonotoneFamily {
    let members = sets
        .iter()
        .map(|s| SubsetMask::from_elements(n, s.iter().copied()).unwrap())
        .collect();
    MonotoneFamily::explicit(GroundSet::new(n).unwrap(), dir, members).unwrap()
}

// 1. p_c ≤ q_f ≤ q for down-sets and q ≤ q_f ≤ p_c for up-sets, on every
//    nontrivial monotone family with N = 3 and N = 4.
fn sandwich_chain() -> Check {
    let mut checked = 0;
    let mut counts = Vec::new();
    for n in [3, 4] {
        for dir in [Direction::Down, Direction::Up] {
            let fams = enumerate_monotone_families(n, dir).map_err(|e| e.to_string())?;
            counts.push(fams.len());
            for f in fams.iter().filter(|f| f.is_nontrivial()) {
                let r = verify_sandwich(f).map_err(|e| e.to_string())?;
                ensure(r.holds, || format!("N = {n} {dir}: p_c = {}, q_f = {}, q = {}", r.p_c, r.q_f, r.q))?;
                checked += 1;
            }
        }
    }
    ensure(counts == [20, 20, 168, 168], || format!("family counts {counts:?}"))?;
    Ok(format!("{checked} nontrivial families (20 and 168 per direction incl. the 2 trivial ones)"))
}

/// `q` by exhaustive search over every certificate family on `N ≤ 3` points.
fn brute_q(f: &MonotoneFamily) -> f64 {
    let n = f.size();
    let dir = f.direction();
    let subsets = 1usize << n;
    let members: Vec<usize> = (0..subsets).filter(|&s| f.contains_bits(s as u64)).collect();
    let covers = |t: usize, s: usize| match dir {
        Direction::Down => s & !t == 0,
        Direction::Up => t & !s == 0,
    };
    let cost = |cert: usize, p: f64| -> f64 {
        (0..subsets)
            .filter(|t| cert >> t & 1 == 1)
            .map(|t| {
                let k = (t as u32).count_ones() as i32;
                match dir {
                    Direction::Up => p.powi(k),
                    Direction::Down => (1.0 - p).powi(n as i32 - k),
                }
            })
            .sum()
    };
    let mut best: Option<f64> = None;
    for cert in 1usize..1 << subsets {
        if !members.iter().all(|&s| (0..subsets).any(|t| cert >> t & 1 == 1 && covers(t, s))) {
            continue;
        }
        // cost is monotone in p; find where it crosses 1/2.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let small = cost(cert, mid) <= 0.5;
            match (dir, small) {
                (Direction::Down, true) | (Direction::Up, false) => hi = mid,
                _ => lo = mid,
            }
        }
        let p = 0.5 * (lo + hi);
        let feasible = match dir {
            Direction::Down => cost(cert, 1.0) <= 0.5,
            Direction::Up => cost(cert, 0.0) <= 0.5,
        };
        if !feasible {
            continue;
        }
        best = Some(match (best, dir) {
            (None, _) => p,
            (Some(b), Direction::Down) => b.min(p),
            (Some(b), Direction::Up) => b.max(p),
        });
    }
    best.expect("some certificate covers")
}

// 2. Worked values. p_c from the closed-form roots of μ_p = 1/2, q from
//    exhaustive certificate search, q_f from the hand-solved covering LPs.
fn worked_values() -> Check {
    let cases = [
        (
            "down-set {∅, {1}, {2}}",
            family(2, Direction::Down, &[&[], &[0], &[1]]),
            // 1 − p² = 1/2; cover by {1}, {2}: 2(1 − p) = 1/2.
            (0.5f64.sqrt(), 0.75, 0.75),
        ),
        (
            "T_3",
            MonotoneFamily::triangle_free(3).unwrap(),
            // 1 − p³ = 1/2; cover by the three 2-edge graphs: 3(1 − p) = 1/2.
            (0.5f64.powf(1.0 / 3.0), 5.0 / 6.0, 5.0 / 6.0),
        ),
        (
            "up-set generated by two singletons",
            family(2, Direction::Up, &[&[0], &[1], &[0, 1]]),
            // 1 − (1 − p)² = 1/2; cover by {1}, {2}: 2p = 1/2.
            (1.0 - 0.5f64.sqrt(), 0.25, 0.25),
        ),
    ];
    let tol = 1e-4;
    let mut lines = Vec::new();
    for (name, f, (pc, qf, q)) in cases {
        let got_pc = threshold_exact(&f, 1e-9).map_err(|e| e.to_string())?.value();
        let got_qf = qf_exact(&f, 1e-9).map_err(|e| e.to_string())?.value();
        let got_q = q_exact(&f, 1e-9).map_err(|e| e.to_string())?.value();
        let oracle_q = brute_q(&f);
        ensure((oracle_q - q).abs() < tol, || format!("{name}: brute-force q = {oracle_q}, hand value {q}"))?;
        for (label, got, want) in [("p_c", got_pc, pc), ("q_f", got_qf, qf), ("q", got_q, q)] {
            ensure((got - want).abs() < tol, || format!("{name}: {label} = {got}, expected {want}"))?;
        }
        lines.push(format!("{name} ({got_pc:.5}, {got_qf:.5}, {got_q:.5})"));
    }
    Ok(lines.join("; "))
}

// 3. n·p_c(T_n) is roughly constant: consecutive ratios within a factor 1.6.
fn linear_threshold_trend() -> Check {
    let mut scaled = Vec::new();
    for n in [8usize, 16, 32, 64] {
        let f = MonotoneFamily::triangle_free(n).map_err(|e| e.to_string())?;
        let t = threshold_monte_carlo(&f, 2000, rng::substream(SEED, n as u64), 0.01 / n as f64)
            .map_err(|e| e.to_string())?;
        scaled.push((n, n as f64 * t.p));
    }
    for w in scaled.windows(2) {
        let r = w[1].1 / w[0].1;
        ensure((1.0 / 1.6..=1.6).contains(&r), || format!("n·p_c {:?} -> {:?}: ratio {r}", w[0], w[1]))?;
    }
    Ok(scaled.iter().map(|(n, v)| format!("n={n}: {v:.3}")).collect::<Vec<_>>().join(", "))
}

// 4. E[exp(ZX/(5pn))] ≤ exp(pm/n) + 3 standard errors.
fn moment_suite() -> Check {
    let n = 64;
    let p = 1.0 / 160.0;
    let mut lines = Vec::new();
    for spec in ["cycle:4", "star:10", "random-bipartite:50:1"] {
        let h = spec.parse::<GraphSpec>().unwrap().build(n).map_err(|e| e.to_string())?;
        let r = moment_check(&h, p, 100_000, rng::substream(SEED, 4)).map_err(|e| e.to_string())?;
        ensure(r.passes && !r.vacuous, || {
            format!("{spec}: estimate {} > bound {} + 3·{}", r.estimate, r.bound, r.std_error)
        })?;
        lines.push(format!("{spec} {:.5} ≤ {:.5}", r.estimate, r.bound));
    }
    Ok(lines.join(", "))
}

// 5. Tail bounds for matchings and stars; vacuous cases must come back with
//    exit status 3, never as a pass.
fn tail_suites(scratch: &Path) -> Check {
    let mut asserted = 0;
    let mut vacuous = 0;
    for sub in ["tail-directed", "tail-undirected"] {
        for kind in ["matching", "star"] {
            for m in [16, 32] {
                let h = format!("{kind}:{m}").parse::<GraphSpec>().unwrap();
                let out = scratch.join(format!("{sub}-{kind}-{m}"));
                let cfg = config(
                    sub,
                    json!({"h": h, "n": 64, "p": 1.0 / 160.0}),
                    Some(SEED),
                    Some(100_000),
                    &out,
                );
                let r = run(&cfg, None).map_err(|e| e.to_string())?;
                let summary: Value =
                    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
                let is_vacuous = summary["facts"]["vacuous"].as_bool().unwrap();
                let bound = summary["quantities"]["bound"]["value"].as_f64().unwrap();
                ensure(is_vacuous == (bound >= 1.0), || format!("{sub} {kind}:{m}: vacuous flag wrong"))?;
                if is_vacuous {
                    ensure(r.status.exit_code() == 3, || format!("{sub} {kind}:{m}: vacuous but exit {}", r.status.exit_code()))?;
                    vacuous += 1;
                } else {
                    ensure(r.status == Status::Pass, || {
                        format!("{sub} {kind}:{m}: estimate {} above bound {bound}", summary["quantities"]["estimate"]["value"])
                    })?;
                    asserted += 1;
                }
            }
        }
    }
    Ok(format!("{asserted} bounds asserted, {vacuous} vacuous cases flagged with exit 3"))
}

// 6. An H-good edge forces every maximal triangle-free subgraph to meet H.
fn hitting_implication(scratch: &Path) -> Check {
    let out = scratch.join("hitting-check");
    let cfg = config("hitting-check", json!({"n": 7}), Some(SEED), Some(1000), &out);
    let r = run(&cfg, None).map_err(|e| e.to_string())?;
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let with_good = summary["quantities"]["pairs_with_good_edges"]["value"].as_f64().unwrap();
    let violations = summary["quantities"]["violations"]["value"].as_f64().unwrap();
    ensure(r.status == Status::Pass && violations == 0.0, || format!("{violations} violations"))?;
    Ok(format!("1000 pairs at n = 7, {with_good} with good edges, 0 violations"))
}

// 7. Coupling: marginals, Δ(D) ≤ Δ(Γ), capture ≥ 1/4 − 4σ per class.
fn coupling() -> Check {
    let (n, p) = (16, 0.1);
    let m = coupling_marginal_test(n, p, 100_000, SEED).map_err(|e| e.to_string())?;
    ensure(m.edge_p_value >= 1e-3 && m.arc_p_value >= 1e-3, || {
        format!("χ² p-values {} and {}", m.edge_p_value, m.arc_p_value)
    })?;
    ensure(m.degree_violations == 0, || format!("{} samples with Δ(D) > Δ(Γ)", m.degree_violations))?;
    let cap = conditional_square_capture(n, p, rng::substream(SEED, 7), 5_000).map_err(|e| e.to_string())?;
    ensure(cap.passes, || format!("capture classes {:?}", cap.classes))?;
    Ok(format!(
        "χ² p = {:.3} / {:.3}, 0 degree violations, min capture {:.3} over {} classes",
        m.edge_p_value,
        m.arc_p_value,
        cap.min_frequency,
        cap.classes.len()
    ))
}

// 8. Cover constructions.
fn cover_suite() -> Check {
    let valid = cover_validity_exhaustive(&ramsey_clique_cover(6, 3).unwrap()).map_err(|e| e.to_string())?;
    ensure(valid.validity == Validity::Valid, || "(6, 3) cover rejected".into())?;
    let invalid = cover_validity_exhaustive(&ramsey_clique_cover(5, 3).unwrap()).map_err(|e| e.to_string())?;
    let w = invalid.witness.ok_or("(5, 3) cover accepted")?;
    let is_c5 = w.edge_count() == 5 && (0..5).all(|v| w.degree(v) == 2) && w.components().len() == 1;
    ensure(is_c5 && independence_number(&w).unwrap() == 2, || format!("witness {w:?} is not C_5"))?;

    // P(G ⊆ H): K_4 minus an edge needs one pair on the same side (1/2);
    // K_8 minus a perfect matching needs four independent pairs (1/16).
    for (spec, n, exact) in [("co-edges:0-1", 4, 0.5), ("co-matching:4", 8, 1.0 / 16.0)] {
        let h = spec.parse::<GraphSpec>().unwrap().build(n).unwrap();
        let r = bipartite_lower_bound_experiment(&h, 200_000, rng::substream(SEED, 8)).map_err(|e| e.to_string())?;
        ensure((r.estimate - exact).abs() <= 3.0 * r.std_error && r.passes, || {
            format!("{spec}: estimate {} vs {exact} (σ = {})", r.estimate, r.std_error)
        })?;
    }

    for (m, n, s, want) in [
        (3u64, 6u64, 20.0, 1.229_626_484_704_645_4),
        (1, 3, 1.0, std::f64::consts::LN_2),
        (10, 6, 20.0, 0.368_887_945_411_393_64),
    ] {
        let b = q_upper_bound(m, n, s).map_err(|e| e.to_string())?.bound;
        ensure((b - want).abs() <= 1e-9, || format!("q bound ({m}, {n}, {s}) = {b}, expected {want}"))?;
    }
    Ok("(6,3) valid, (5,3) fails on C_5, bipartite 1/2 and 1/16 within 3σ, bound arithmetic to 1e-9".into())
}

// 9. Replays are byte-identical at 1, 4 and 8 worker threads.
fn replay_determinism(scratch: &Path) -> Check {
    let runs = [
        ("tail-directed", json!({"h": {"kind": "matching", "edges": 16}}), Some(20_000)),
        ("threshold", json!({"family": {"kind": "builtin", "name": "triangle-free", "n": 12}}), Some(1_000)),
        ("hitting", json!({"h": [{"kind": "star", "leaves": 3}, {"kind": "cycle", "len": 4}]}), Some(300)),
        ("coupling", json!({"n": 10, "capture_trials": 200}), Some(5_000)),
        ("alpha-check", json!({"n": 8, "k": 4, "sampled": true}), Some(2_000)),
        ("sandwich-all", json!({"ground_size": 3}), None),
    ];
    let mut compared = 0;
    for (i, (sub, params, trials)) in runs.into_iter().enumerate() {
        let out = scratch.join(format!("replay-{i}-{sub}"));
        let cfg = config(sub, params, Some(SEED + i as u64), trials, &out);
        run(&cfg, Some(1)).map_err(|e| format!("{sub}: {e}"))?;
        for threads in [1, 4, 8] {
            let rep = replay(&out.join("manifest.txt"), Some(threads)).map_err(|e| format!("{sub} at {threads} threads: {e}"))?;
            compared += rep.files_compared;
        }
    }
    Ok(format!("6 experiments, {compared} data-file comparisons identical"))
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let s = scratch.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("sandwich chain on all monotone families, N = 3, 4", Box::new(sandwich_chain)),
        ("exact worked values", Box::new(worked_values)),
        ("n·p_c(T_n) trend", Box::new(linear_threshold_trend)),
        ("exponential moment suite", Box::new(moment_suite)),
        ("tail suites", Box::new(move || tail_suites(s))),
        ("goodness implies hitting, exhaustive", Box::new(move || hitting_implication(s))),
        ("coupling correctness", Box::new(coupling)),
        ("cover suite", Box::new(cover_suite)),
        ("replay determinism", Box::new(move || replay_determinism(s))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
