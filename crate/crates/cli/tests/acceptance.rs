//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::Instant;

use binsc_core::chimera::{embed_complete, HardwareGraph, HardwareMask};
use binsc_core::data::{gen_synthetic, split, SyntheticConfig};
use binsc_core::learn::{grad_dictionary, LearnConfig, Solver, SolverConfig};
use binsc_core::qubo::{build_qubo, solve_exhaustive, solve_sa, AnnealSchedule, Coupling, QuboProblem};
use binsc_core::regress::{evaluate, fit, fit_scaling, sweep_nq, FitConfig, PretrainSource};
use binsc_core::{sc_energy, seed, Dictionary, Sample, SparseCode, SparsityPenalty};
use nalgebra::DMatrix;
use rand::Rng;

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Random dictionary with column norms in `[0.2, 1]`, input and penalty.
fn random_instance(rng: &mut impl Rng, d: usize, n: usize) -> (Dictionary, Vec<f64>, SparsityPenalty) {
    let mut m = DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0));
    for mut c in m.column_iter_mut() {
        let target = rng.random_range(0.2..1.0);
        let norm = c.norm();
        c *= target / norm;
    }
    let x = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
    let lambda = SparsityPenalty::new(rng.random_range(0.0..0.6)).unwrap();
    (Dictionary::new(m).unwrap(), x, lambda)
}

fn random_qubo(rng: &mut impl Rng, n: usize) -> QuboProblem {
    let lin = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let quad: Vec<Coupling> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| Coupling::new(i, j, rng.random_range(-2.0..2.0)))
        .collect();
    QuboProblem::new(lin, quad, rng.random_range(-1.0..1.0)).unwrap()
}

/// Brute-force minimizer of the sparse-coding energy with the same tie
/// rule as the solvers: fewer ones, then lexicographically smallest.
fn brute_force(dict: &Dictionary, x: &[f64], lambda: SparsityPenalty) -> (SparseCode, f64) {
    let n = dict.n_atoms();
    let mut best: Option<(SparseCode, f64)> = None;
    for m in 0..1u64 << n {
        let c = SparseCode::from_mask(m, n);
        let e = sc_energy(dict, x, &c, lambda).unwrap();
        let replace = match &best {
            None => true,
            Some((bc, be)) => {
                let tol = 1e-12 * (1.0 + be.abs());
                e < be - tol || (e <= be + tol && (c.count_ones(), c.bits()) < (bc.count_ones(), bc.bits()))
            }
        };
        if replace {
            best = Some((c, e));
        }
    }
    best.unwrap()
}

fn qubo_equivalence() -> Outcome {
    let mut rng = seed::rng(101);
    let (mut worst, mut argmin_mismatch, mut instances) = (0.0f64, 0, 0);
    while instances < 1000 {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(1..=10);
        let (dict, x, lambda) = random_instance(&mut rng, d, n);
        let q = build_qubo(&dict, &x, lambda).unwrap();
        for m in 0..1u64 << n {
            let c = SparseCode::from_mask(m, n);
            let diff = (q.energy(&c).unwrap() - sc_energy(&dict, &x, &c, lambda).unwrap()).abs();
            worst = worst.max(diff);
        }
        if solve_exhaustive(&q).unwrap().best_code != brute_force(&dict, &x, lambda).0 {
            argmin_mismatch += 1;
        }
        instances += 1;
    }
    check(
        worst < 1e-10 && argmin_mismatch == 0,
        format!("{instances} instances, max |E_qubo - E_sc| = {worst:.2e}, argmin mismatches {argmin_mismatch}"),
    )
}

fn ising_conversion() -> Outcome {
    let mut rng = seed::rng(202);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let q = random_qubo(&mut rng, n);
        let ising = q.to_ising();
        for m in 0..1u64 << n {
            let c = SparseCode::from_mask(m, n);
            let diff = (q.energy(&c).unwrap() - ising.energy(&c.to_spins()).unwrap()).abs();
            worst = worst.max(diff);
        }
    }
    check(worst < 1e-10, format!("200 problems, max pointwise difference {worst:.2e}"))
}

fn batch_energy(m: &DMatrix<f64>, xs: &[Vec<f64>], codes: &[SparseCode]) -> f64 {
    let dict = Dictionary::new(m.clone()).unwrap();
    let zero = SparsityPenalty::new(0.0).unwrap();
    xs.iter().zip(codes).map(|(x, a)| sc_energy(&dict, x, a, zero).unwrap()).sum::<f64>() / xs.len() as f64
}

fn gradient_check() -> Outcome {
    let mut rng = seed::rng(303);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let b = rng.random_range(1..=10);
        // norms at most 0.9 so that perturbed columns stay feasible
        let (dict, _, _) = random_instance(&mut rng, d, n);
        let m = dict.matrix() * 0.9;
        let xs: Vec<Vec<f64>> = (0..b).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let codes: Vec<SparseCode> = (0..b)
            .map(|_| SparseCode::from_bools((0..n).map(|_| rng.random::<bool>()).collect()))
            .collect();
        let dict = Dictionary::new(m.clone()).unwrap();
        let xr: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let cr: Vec<&SparseCode> = codes.iter().collect();
        let g = grad_dictionary(&dict, &xr, &cr).unwrap();
        for i in 0..d {
            for j in 0..n {
                let (mut plus, mut minus) = (m.clone(), m.clone());
                plus[(i, j)] += h;
                minus[(i, j)] -= h;
                let fd = (batch_energy(&plus, &xs, &codes) - batch_energy(&minus, &xs, &codes)) / (2.0 * h);
                worst = worst.max((fd - g[(i, j)]).abs());
            }
        }
    }
    check(worst < 1e-5, format!("100 batches, max |analytic - finite difference| = {worst:.2e}"))
}

fn sa_quality() -> Outcome {
    let mut rng = seed::rng(404);
    let (mut hits, mut worst_excess) = (0, 0.0f64);
    for k in 0..100u64 {
        let (dict, x, lambda) = random_instance(&mut rng, 20, 16);
        let q = build_qubo(&dict, &x, lambda).unwrap();
        let exact = solve_exhaustive(&q).unwrap().best_energy;
        let schedule = AnnealSchedule::auto(&q.to_ising(), 1000, 20, k).unwrap();
        let sa = solve_sa(&q, &schedule).unwrap().best_energy;
        if sa <= exact + 1e-9 * (1.0 + exact.abs()) {
            hits += 1;
        } else {
            let excess = (sa - exact) / exact.abs();
            worst_excess = worst_excess.max(excess);
        }
    }
    check(
        hits >= 95 && worst_excess < 0.02,
        format!("optimum on {hits}/100, worst relative excess {worst_excess:.2e}"),
    )
}

fn embedding_capacity() -> Outcome {
    let full = HardwareGraph::perfect(16, 16).unwrap();
    let k65 = embed_complete(65, &full).is_ok();
    let k66 = embed_complete(66, &full).is_err();
    let mut checked = 0;
    for m in 1..=16 {
        let g = HardwareGraph::perfect(m, m).unwrap();
        for n in 1..=4 * m + 1 {
            let e = embed_complete(n, &g).map_err(|e| format!("K_{n} on {m}x{m}: {e}"))?;
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            e.validate(&g, pairs).map_err(|e| format!("K_{n} on {m}x{m}: {e}"))?;
            checked += 1;
        }
    }
    check(
        k65 && k66,
        format!("K_65 embeds: {k65}, K_66 rejected: {k66}, {checked} embeddings valid"),
    )
}

fn embedded_solve() -> Outcome {
    let mut rng = seed::rng(606);
    let config = SolverConfig::EmbeddedSa {
        sweeps: 200,
        reads: 20,
        beta_range: None,
        chain_strengths: None,
        grid_rows: 2,
        grid_cols: 2,
        mask: HardwareMask::default(),
    };
    let solver = Solver::new(&config, 8).unwrap();
    let mut hits = 0;
    for k in 0..100u64 {
        let (dict, x, lambda) = random_instance(&mut rng, 20, 8);
        let q = build_qubo(&dict, &x, lambda).unwrap();
        let exact = solve_exhaustive(&q).unwrap().best_energy;
        let got = solver.solve(&q, k).unwrap().best_energy;
        if got <= exact + 1e-9 * (1.0 + exact.abs()) {
            hits += 1;
        }
    }
    check(hits >= 90, format!("logical optimum on {hits}/100 (2x2 grid, 10 chain strengths x 20 reads)"))
}

const PUBLISHED: [(f64, f64); 6] = [
    (20.0, 0.41),
    (29.0, 0.375),
    (38.0, 0.319),
    (47.0, 0.29),
    (55.0, 0.273),
    (64.0, 0.254),
];

fn scaling_fit() -> Outcome {
    let start = Instant::now();
    let all = fit_scaling(&PUBLISHED).map_err(|e| e.to_string())?;
    let tail = fit_scaling(&PUBLISHED[1..]).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    check(
        (0.15..=0.21).contains(&all.q_infinity) && (0.20..=0.26).contains(&tail.q_infinity) && elapsed < 1.0,
        format!(
            "Q_inf {:.4} on all points, {:.4} without N_q = 20, {elapsed:.3} s",
            all.q_infinity, tail.q_infinity
        ),
    )
}

fn dataset(s: u64) -> (Vec<Sample>, Vec<Sample>) {
    let samples = gen_synthetic(&SyntheticConfig {
        seed: s,
        ..SyntheticConfig::default()
    })
    .unwrap();
    split(&samples, 0.5, s).unwrap()
}

fn fit_config(s: u64, source: PretrainSource, solver: SolverConfig) -> FitConfig {
    FitConfig {
        n_q: 20,
        pretrain_source: source,
        learn: LearnConfig {
            solver,
            seed: s,
            ..LearnConfig::default()
        },
        ..FitConfig::default()
    }
}

fn q_at_20(s: u64, source: PretrainSource) -> f64 {
    let (train, test) = dataset(s);
    let test_x: Vec<Vec<f64>> = test.iter().map(|t| t.x.clone()).collect();
    let model = fit(&train, &test_x, &fit_config(s, source, SolverConfig::Exhaustive)).unwrap();
    evaluate(&model, &test).unwrap().q_value
}

/// `Q` at `N_q = 20` with the exhaustive solver, per seed, with the default
/// (combined) pre-training and without.
fn runs_at_20() -> &'static (Vec<f64>, Vec<f64>) {
    static RUNS: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let with = SEEDS.iter().map(|&s| q_at_20(s, PretrainSource::Combined)).collect();
        let without = SEEDS.iter().map(|&s| q_at_20(s, PretrainSource::Off)).collect();
        (with, without)
    })
}

fn end_to_end() -> Outcome {
    let q = &runs_at_20().0;
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    check(
        mean < 0.6 && q.iter().all(|&v| v < 1.0),
        format!("Q per seed {}, mean {mean:.4}", fmt(q)),
    )
}

fn nq_trend() -> Outcome {
    let nq = [8, 12, 16, 20];
    let mut per_nq = vec![Vec::new(); nq.len()];
    for &s in &SEEDS {
        let (train, test) = dataset(s);
        let rows = sweep_nq(&train, &test, &nq, &fit_config(s, PretrainSource::Combined, SolverConfig::sa())).unwrap();
        for (k, row) in rows.iter().enumerate() {
            per_nq[k].push(row.q);
        }
    }
    let medians: Vec<f64> = per_nq.iter().map(|v| median(v)).collect();
    check(
        medians.windows(2).all(|w| w[1] <= w[0]),
        format!("median Q at N_q {nq:?}: {}", fmt(&medians)),
    )
}

fn pretraining_ablation() -> Outcome {
    let (with, without) = runs_at_20();
    let (a, b) = (median(with), median(without));
    check(
        a <= b,
        format!("median Q {a:.4} with pre-training, {b:.4} without ({} vs {})", fmt(with), fmt(without)),
    )
}

fn binsc(args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_binsc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn snapshot(path: &Path) -> Vec<u8> {
    if path.is_dir() {
        let mut names: Vec<PathBuf> = fs::read_dir(path).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        names.into_iter().filter(|p| !p.ends_with("manifest.json")).flat_map(|p| fs::read(p).unwrap()).collect()
    } else {
        fs::read(path).unwrap()
    }
}

fn cli_replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |n: &str| d.join(n).to_string_lossy().into_owned();
    binsc(&["gen-data", "--out", &p("data.csv"), "--n-samples", "300", "--d", "6", "--latent-dim", "2", "--seed", "9"])?;
    binsc(&["split", "--input", &p("data.csv"), "--train-out", &p("train.csv"), "--test-out", &p("test.csv")])?;
    binsc(&["fit", "--train", &p("train.csv"), "--test", &p("test.csv"), "--out", &p("model"), "--nq", "8", "--solver", "sa", "--sweeps", "100", "--max-iters", "3"])?;
    binsc(&["predict", "--model", &p("model"), "--input", &p("test.csv"), "--out", &p("pred.csv")])?;
    binsc(&["eval", "--predictions", &p("pred.csv"), "--truth", &p("test.csv"), "--out", &p("report.json"), "--histogram", &p("hist.csv")])?;
    binsc(&["sweep", "--train", &p("train.csv"), "--test", &p("test.csv"), "--out", &p("sweep.csv"), "--nq", "4,6,8", "--solver", "exhaustive", "--max-iters", "3"])?;
    binsc(&["fit-scaling", "--input", &p("sweep.csv"), "--out", &p("fit.json"), "--curve", &p("curve.csv")])?;

    // Later stages read earlier outputs, so replay from the last stage back.
    let stages: [(&str, &[&str]); 7] = [
        ("fit.json.manifest.json", &["fit.json", "curve.csv"]),
        ("sweep.csv.manifest.json", &["sweep.csv"]),
        ("report.json.manifest.json", &["report.json", "hist.csv"]),
        ("pred.csv.manifest.json", &["pred.csv"]),
        ("model/manifest.json", &["model"]),
        ("train.csv.manifest.json", &["train.csv", "test.csv"]),
        ("data.csv.manifest.json", &["data.csv"]),
    ];
    let saved = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut replayed = 0;
    for (k, (manifest, outputs)) in stages.iter().enumerate() {
        let copy = saved.path().join(format!("{k}.json"));
        fs::copy(d.join(manifest), &copy).map_err(|e| e.to_string())?;
        let paths: Vec<PathBuf> = outputs.iter().map(|o| d.join(o)).collect();
        let before: Vec<Vec<u8>> = paths.iter().map(|o| snapshot(o)).collect();
        for o in &paths {
            if o.is_dir() {
                fs::remove_dir_all(o).map_err(|e| e.to_string())?;
            } else {
                fs::remove_file(o).map_err(|e| e.to_string())?;
            }
        }
        binsc(&["replay", copy.to_str().unwrap()])?;
        let after: Vec<Vec<u8>> = paths.iter().map(|o| snapshot(o)).collect();
        if before != after {
            return Err(format!("replaying {manifest} changed its outputs"));
        }
        replayed += 1;
    }
    check(replayed == stages.len(), format!("{replayed} commands replayed byte-identically"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("qubo equivalence", qubo_equivalence),
        ("ising conversion", ising_conversion),
        ("gradient check", gradient_check),
        ("sa quality", sa_quality),
        ("embedding capacity", embedding_capacity),
        ("embedded solve", embedded_solve),
        ("scaling fit", scaling_fit),
        ("end-to-end regression", end_to_end),
        ("n_q trend", nq_trend),
        ("pre-training ablation", pretraining_ablation),
        ("cli replay", cli_replay),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {detail} ({secs:.1} s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
