//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Takes a few minutes (the sweep dominates).

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use cyclewalk::cycles::{exhaustive_mcb_oracle, minimum_cycle_basis};
use cyclewalk::evolution::{build_dense_unitary, QuantumWalk};
use cyclewalk::graph::{generate_erdos_renyi, generate_watts_strogatz, Family, Graph, GraphRng};
use cyclewalk::hilbert::{self, StateVector};
use cyclewalk::observables::oracle::dense_partial_trace;
use cyclewalk::observables::{microcanonical_distribution, particle_gram, total_variation_distance, Subsystem};
use cyclewalk::runner::{self, EmitFlags, GraphSpec, RunConfig, SweepConfig, SweepRow};

const NORM_TOLERANCE: f64 = 1e-10;
const DENSE_TOLERANCE: f64 = 1e-12;
const TV_TOLERANCE: f64 = 0.05;
const SZ_TOLERANCE: f64 = 0.1;
const PAGE_BAND: (f64, f64) = (0.90, 1.02);
const MEAN_DEVIATION_LIMIT: f64 = 0.05;
const MAX_DEVIATION_LIMIT: f64 = 0.10;
const ENTROPY_TOLERANCE: f64 = 1e-10;

type Check = Result<String, String>;

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).unwrap()
}

fn k3() -> Graph {
    graph(3, &[(0, 1), (0, 2), (1, 2)])
}

fn k4() -> Graph {
    graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

fn c4_chord() -> Graph {
    graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
}

fn k23() -> Graph {
    graph(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
}

fn dimensions() -> Check {
    let ws = generate_watts_strogatz(15, 4, 0.35, 0).map_err(|e| e.to_string())?;
    let ws_dim = hilbert::dimension(&ws).map_err(|e| e.to_string())?;
    let er = (0..1000)
        .filter_map(|seed| generate_erdos_renyi(15, 0.35, seed).ok())
        .find(|g| g.num_edges() == 45)
        .ok_or("no ER-15 instance with 45 edges in 1000 seeds")?;
    let er_dim = hilbert::dimension(&er).map_err(|e| e.to_string())?;
    let detail = format!(
        "WS |E|={} dim={ws_dim}, ER seed {} |E|=45 dim={er_dim}",
        ws.num_edges(),
        er.seed()
    );
    if ws.num_edges() == 30 && ws_dim == 1_966_080 && er_dim == 2_949_120 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unitarity() -> Check {
    let g = generate_erdos_renyi(10, 0.35, 0).map_err(|e| e.to_string())?;
    let mut walk = QuantumWalk::new(&g).map_err(|e| e.to_string())?;
    let mut psi = walk.initial_state();
    let mut worst = (psi.norm() - 1.0).abs();
    for _ in 0..400 {
        walk.step(&mut psi);
        worst = worst.max((psi.norm() - 1.0).abs());
    }
    let detail = format!("ER-10 |E|={}, max |norm - 1| over 400 steps = {worst:.2e}", g.num_edges());
    if worst < NORM_TOLERANCE {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dense_equivalence() -> Check {
    let mut worst_step = 0.0f64;
    let mut worst_unitary = 0.0f64;
    for g in [k3(), k4(), c4_chord(), k23()] {
        let u = build_dense_unitary(&g).map_err(|e| e.to_string())?;
        worst_unitary = worst_unitary.max(u.unitarity_error());
        let mut walk = QuantumWalk::new(&g).map_err(|e| e.to_string())?;
        for seed in 0..10 {
            let psi = StateVector::random(walk.arcs(), seed);
            let expected = u.apply(&psi, walk.arcs()).map_err(|e| e.to_string())?;
            let mut fast = psi;
            walk.step(&mut fast);
            worst_step = worst_step.max(fast.max_abs_diff(&expected));
        }
    }
    let detail = format!("max |U psi - step psi| = {worst_step:.2e}, max |U U^dagger - I| = {worst_unitary:.2e}");
    if worst_step < DENSE_TOLERANCE && worst_unitary < DENSE_TOLERANCE {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_connected_graphs(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = GraphRng::new(seed);
    let mut graphs = Vec::new();
    while graphs.len() < count {
        let n = 3 + rng.below(5) as usize;
        let p = 0.3 + 0.5 * rng.uniform();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.chance(p) {
                    edges.push((u, v));
                }
            }
        }
        if let Ok(g) = Graph::from_edges(n, &edges) {
            if g.is_connected() && g.num_edges() >= n {
                graphs.push(g);
            }
        }
    }
    graphs
}

fn mcb_exactness() -> Check {
    let ring = |n: usize| (0..n).map(|u| (u, (u + 1) % n)).collect::<Vec<_>>();
    let mut wheel = ring(5).iter().map(|&(u, v)| (u + 1, (v % 5) + 1)).collect::<Vec<_>>();
    wheel.extend((1..=5).map(|v| (0, v)));
    let prism = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)];
    let k33 = [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)];
    let cube = [
        (0, 1), (1, 3), (3, 2), (2, 0), (4, 5), (5, 7), (7, 6), (6, 4), (0, 4), (1, 5), (2, 6), (3, 7),
    ];
    let mut graphs = vec![
        k3(),
        k4(),
        c4_chord(),
        k23(),
        graph(5, &ring(5)),
        graph(6, &wheel),
        graph(6, &prism),
        graph(6, &k33),
        graph(8, &cube),
    ];
    let named = graphs.len();
    graphs.extend(random_connected_graphs(60, 2024));
    let mut mismatches = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let fast = minimum_cycle_basis(g).map_err(|e| e.to_string())?.total_length();
        let oracle = exhaustive_mcb_oracle(g).map_err(|e| e.to_string())?.total_length();
        if fast != oracle {
            mismatches.push(format!("graph {i}: {fast} vs {oracle}"));
        }
    }
    let detail = format!("{} graphs ({named} named), {} mismatches", graphs.len(), mismatches.len());
    if mismatches.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}: {}", mismatches.join("; ")))
    }
}

fn entropy_identity() -> Check {
    let mut graphs = Vec::new();
    for n in 3..=4 {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = graph(n, &edges);
            if g.is_connected() && g.degrees().iter().all(|&d| d >= 2) {
                graphs.push(g);
            }
        }
    }
    let mut worst = 0.0f64;
    for g in &graphs {
        let walk = QuantumWalk::new(g).map_err(|e| e.to_string())?;
        for seed in 0..20 {
            let psi = StateVector::random(walk.arcs(), seed);
            let dense = dense_partial_trace(&psi, walk.arcs(), Subsystem::Spin)
                .and_then(|rho| rho.entropy())
                .map_err(|e| e.to_string())?;
            let gram = particle_gram(&psi).entropy().map_err(|e| e.to_string())?;
            worst = worst.max((dense - gram).abs());
        }
    }
    let detail = format!("{} labeled graphs x 20 states, max |S_gram - S_spin| = {worst:.2e}", graphs.len());
    if worst < ENTROPY_TOLERANCE {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn er12_config(threads: usize, out_dir: &std::path::Path) -> RunConfig {
    RunConfig {
        generate: Some(GraphSpec {
            family: Family::ErdosRenyi,
            nodes: 12,
            k: runner::DEFAULT_WS_K,
            p: runner::DEFAULT_ER_P,
            seed: 0,
        }),
        threads: Some(threads),
        out_dir: out_dir.to_path_buf(),
        emit: EmitFlags::default(),
        ..RunConfig::default()
    }
}

struct Er12 {
    microcanonical: Check,
    paramagnetic: Check,
    determinism: Check,
}

fn er12_checks() -> Er12 {
    let fail = |e: String| Er12 {
        microcanonical: Err(e.clone()),
        paramagnetic: Err(e.clone()),
        determinism: Err(e),
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return fail(e.to_string()),
    };
    let (one, many) = (dir.path().join("one"), dir.path().join("many"));
    let record = match runner::simulate(&er12_config(1, &one)) {
        Ok((record, _)) => record,
        Err(e) => return fail(e.to_string()),
    };
    let g = match er12_config(1, &one).load_graph() {
        Ok(g) => g,
        Err(e) => return fail(e.to_string()),
    };

    let microcanonical = match record.mean_positions(200, 400) {
        Some(p) => {
            let tv = total_variation_distance(&p, &microcanonical_distribution(&g));
            let detail = format!("ER-12 |E|={}, TV distance = {tv:.4}", g.num_edges());
            if tv < TV_TOLERANCE {
                Ok(detail)
            } else {
                Err(detail)
            }
        }
        None => Err("no measurements in [200, 400]".into()),
    };
    let paramagnetic = match record.mean_sz(300, 400) {
        Some(sz) => {
            let detail = format!("mean s_z over [300, 400] = {sz:+.4}");
            if sz.abs() < SZ_TOLERANCE {
                Ok(detail)
            } else {
                Err(detail)
            }
        }
        None => Err("no measurements in [300, 400]".into()),
    };
    let threads = 4;
    let determinism = match runner::simulate(&er12_config(threads, &many)) {
        Ok(_) => {
            let mut differing = Vec::new();
            for name in ["timeseries.csv", "summary.json"] {
                let a = fs::read(one.join(name));
                let b = fs::read(many.join(name));
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => differing.push(name),
                }
            }
            if differing.is_empty() {
                Ok(format!("1 vs {threads} threads: timeseries.csv and summary.json identical"))
            } else {
                Err(format!("1 vs {threads} threads differ in {}", differing.join(", ")))
            }
        }
        Err(e) => Err(e.to_string()),
    };
    Er12 {
        microcanonical,
        paramagnetic,
        determinism,
    }
}

fn page_ratio(rows: &[SweepRow]) -> Check {
    let selected: Vec<&SweepRow> = rows.iter().filter(|r| (10..=15).contains(&r.nodes)).collect();
    let mut outside = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in &selected {
        match r.ratio_page {
            Some(q) => {
                lo = lo.min(q);
                hi = hi.max(q);
                if !(PAGE_BAND.0..=PAGE_BAND.1).contains(&q) {
                    outside.push(format!("{}-{} {q:.4}", r.family, r.nodes));
                }
            }
            None => outside.push(format!("{}-{} failed", r.family, r.nodes)),
        }
    }
    let detail = format!("{} runs with |V| in 10..=15, S_s/S_page in [{lo:.4}, {hi:.4}]", selected.len());
    if outside.is_empty() && !selected.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; outside band: {}", outside.join(", ")))
    }
}

fn conjecture(rows: &[SweepRow]) -> Check {
    let stats = runner::compare(rows);
    let detail = format!(
        "{} rows, mean deviation {:.4}, max {:.4} ({}), within 2%: {:.0}%",
        stats.compared,
        stats.mean_rel_deviation,
        stats.max_rel_deviation,
        stats
            .worst
            .as_ref()
            .map_or("-".to_string(), |w| format!("{}-{} seed {}", w.family, w.nodes, w.seed)),
        100.0 * stats.within_two_percent
    );
    if stats.failed == 0
        && stats.compared == rows.len()
        && stats.mean_rel_deviation <= MEAN_DEVIATION_LIMIT
        && stats.max_rel_deviation <= MAX_DEVIATION_LIMIT
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report(failures: &mut usize, id: u32, name: &str, secs: f64, result: Check) {
    match result {
        Ok(detail) => println!("PASS  {id:>2} {name}: {detail} [{secs:.1}s]"),
        Err(detail) => {
            *failures += 1;
            println!("FAIL  {id:>2} {name}: {detail} [{secs:.1}s]");
        }
    }
}

fn main() -> ExitCode {
    let mut failures = 0;

    let t = Instant::now();
    let result = dimensions();
    report(&mut failures, 1, "hilbert dimensions", t.elapsed().as_secs_f64(), result);
    let t = Instant::now();
    let result = unitarity();
    report(&mut failures, 2, "norm preservation", t.elapsed().as_secs_f64(), result);
    let t = Instant::now();
    let result = dense_equivalence();
    report(&mut failures, 3, "dense operator equivalence", t.elapsed().as_secs_f64(), result);
    let t = Instant::now();
    let result = mcb_exactness();
    report(&mut failures, 4, "cycle basis exactness", t.elapsed().as_secs_f64(), result);

    let t = Instant::now();
    let er12 = er12_checks();
    let er12_secs = t.elapsed().as_secs_f64();
    report(&mut failures, 5, "microcanonical position distribution", er12_secs, er12.microcanonical);
    report(&mut failures, 6, "paramagnetic relaxation", er12_secs, er12.paramagnetic);

    let t = Instant::now();
    let sweep = runner::run_sweep(&SweepConfig::default()).map_err(|e| e.to_string());
    let sweep_secs = t.elapsed().as_secs_f64();
    let rows = sweep.as_deref().map_err(Clone::clone);
    report(&mut failures, 7, "page ratio band", sweep_secs, rows.clone().and_then(page_ratio));
    report(&mut failures, 8, "cycle entropy agreement", sweep_secs, rows.and_then(conjecture));

    let t = Instant::now();
    let identity = entropy_identity();
    report(&mut failures, 9, "gram entropy identity", t.elapsed().as_secs_f64(), identity);
    report(&mut failures, 10, "thread-count determinism", er12_secs, er12.determinism);

    println!("{} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
