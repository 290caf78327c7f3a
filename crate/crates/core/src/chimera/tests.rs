use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::code::SparseCode;
use crate::qubo::{solve_sa, AnnealSchedule, Coupling, IsingProblem, QuboProblem};

fn xi(v: f64) -> ChainStrength {
    ChainStrength::new(v).unwrap()
}

fn random_ising(n: usize, seed: u64) -> IsingProblem {
    let mut rng = crate::seed::rng(seed);
    let h = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let j: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| Coupling::new(i, j, rng.random_range(-1.0..1.0)))
        .collect();
    IsingProblem::new(h, j, rng.random_range(-1.0..1.0)).unwrap()
}

#[test]
fn single_chain_bias_split() {
    let g = HardwareGraph::perfect(1, 1).unwrap();
    let e = Embedding::new(vec![vec![0, 4]]).unwrap();
    let logical = IsingProblem::new(vec![1.0], [], 0.0).unwrap();
    let phys = embed_ising(&logical, &e, xi(2.0), &g).unwrap();
    assert_eq!(phys.qubits, vec![0, 4]);
    assert_eq!(phys.problem.h(), &[0.5, 0.5]);
    assert_eq!(phys.problem.couplings(), &[Coupling::new(0, 1, -2.0)]);
    assert_eq!(phys.intra_chain_couplers, 1);
}

#[test]
fn singleton_embedding_is_identity() {
    let g = HardwareGraph::perfect(1, 1).unwrap();
    // vertical 1 couples to horizontals 4 and 6
    let e = Embedding::singletons(&[1, 4, 6]).unwrap();
    let logical = IsingProblem::new(
        vec![0.3, -0.1, 0.7],
        [Coupling::new(0, 1, 0.25), Coupling::new(0, 2, -0.5)],
        1.5,
    )
    .unwrap();
    let phys = embed_ising(&logical, &e, xi(3.0), &g).unwrap();
    assert_eq!(phys.problem, logical);
    assert_eq!(phys.intra_chain_couplers, 0);
}

#[test]
fn embedding_mismatch_is_reported() {
    let g = HardwareGraph::perfect(1, 1).unwrap();
    let logical = IsingProblem::new(vec![0.0; 2], [Coupling::new(0, 1, 1.0)], 0.0).unwrap();
    // both vertical: no coupler between the chains
    let e = Embedding::singletons(&[0, 1]).unwrap();
    assert!(matches!(embed_ising(&logical, &e, xi(1.0), &g), Err(crate::Error::EmbeddingMismatch(_))));
    let e = Embedding::singletons(&[0]).unwrap();
    assert!(matches!(embed_ising(&logical, &e, xi(1.0), &g), Err(crate::Error::EmbeddingMismatch(_))));
}

#[test]
fn majority_vote() {
    let e = Embedding::new(vec![vec![0, 4, 12], vec![1, 5]]).unwrap();
    let mut spins = vec![1i8; 16];
    assert_eq!(unembed(&spins, &e), vec![1, 1]);
    spins[4] = -1;
    assert_eq!(unembed(&spins, &e), vec![1, 1]);
    spins[5] = -1;
    assert_eq!(unembed(&spins, &e), vec![1, -1]);
}

#[test]
fn chain_strength_validation() {
    assert!(ChainStrength::new(0.0).is_err());
    assert!(ChainStrength::new(-1.0).is_err());
    let d = default_chain_strengths(&IsingProblem::new(vec![0.2, -0.4], [Coupling::new(0, 1, 0.1)], 0.0).unwrap());
    assert_eq!(d.len(), 10);
    assert!((d[0].value() - 0.2).abs() < 1e-15);
    assert!((d[9].value() - 2.0).abs() < 1e-12);
    assert!(d.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn singleton_chains_reproduce_plain_annealing() {
    let g = HardwareGraph::perfect(1, 1).unwrap();
    let e = Embedding::singletons(&[0, 4, 5]).unwrap();
    let qubo = QuboProblem::new(
        vec![0.4, -0.6, 0.2],
        [Coupling::new(0, 1, -0.3), Coupling::new(0, 2, 0.8)],
        0.1,
    )
    .unwrap();
    let ising = qubo.to_ising();
    let strengths = [xi(0.5), xi(1.0), xi(2.0)];
    let per_xi = AnnealSchedule::new(30, 0.2, 5.0, 4, 77).unwrap();
    let embedded = solve_embedded(&ising, &e, &g, &strengths, &per_xi).unwrap();
    let flat = solve_sa(&qubo, &AnnealSchedule { reads: 12, ..per_xi }).unwrap();
    assert_eq!(embedded.result.reads_taken, 12);
    assert_eq!(embedded.result.best_code, flat.best_code);
    assert!((embedded.result.best_energy - flat.best_energy).abs() < 1e-12);
    for (a, b) in embedded.result.all_energies.iter().zip(&flat.all_energies) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn huge_chain_strength_leaves_no_breaks() {
    let g = HardwareGraph::perfect(2, 2).unwrap();
    let e = embed_complete(8, &g).unwrap();
    for seed in 0..5 {
        let ising = random_ising(8, seed);
        let s = AnnealSchedule::auto(&ising, 200, 20, seed).unwrap();
        let r = solve_embedded(&ising, &e, &g, &[xi(1e3)], &s).unwrap();
        assert_eq!(r.chain_breaks[0].broken_chains, 0, "seed {seed}");
    }
}

#[test]
fn embedded_solve_finds_small_ground_states() {
    let g = HardwareGraph::perfect(2, 2).unwrap();
    let e = embed_complete(8, &g).unwrap();
    let mut hits = 0;
    for seed in 0..20 {
        let ising = random_ising(8, 1000 + seed);
        let strengths = [xi(0.5), xi(1.0), xi(2.0), xi(4.0)];
        let s = AnnealSchedule::auto(&ising, 200, 10, seed).unwrap();
        let r = solve_embedded(&ising, &e, &g, &strengths, &s).unwrap();
        // logical QUBO with the same energy landscape for the exact answer
        let mut best = f64::INFINITY;
        for m in 0..256u64 {
            best = best.min(ising.energy(&SparseCode::from_mask(m, 8).to_spins()).unwrap());
        }
        assert!(r.result.best_energy >= best - 1e-9);
        if (r.result.best_energy - best).abs() < 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 18, "{hits}/20");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aligned_assignments_keep_logical_energy(n in 1usize..=9, seed in any::<u64>(), strength in 0.01f64..50.0, mask in any::<u64>()) {
        let size = if n <= 5 { 1 } else { 2 };
        let g = HardwareGraph::perfect(size, size).unwrap();
        let e = embed_complete(n, &g).unwrap();
        let logical = random_ising(n, seed);
        let phys = embed_ising(&logical, &e, xi(strength), &g).unwrap();
        let spins = SparseCode::from_mask(mask, n).to_spins();
        let physical: Vec<i8> = phys.chain_of.iter().map(|&c| spins[c]).collect();
        let expected = logical.energy(&spins).unwrap() - strength * phys.intra_chain_couplers as f64;
        prop_assert!((phys.problem.energy(&physical).unwrap() - expected).abs() < 1e-9);
        let (back, broken) = phys.unembed(&physical, n);
        prop_assert_eq!(broken, 0);
        prop_assert_eq!(&back, &spins);
        let mut hw = vec![-1i8; g.sites()];
        for (&q, &s) in phys.qubits.iter().zip(&physical) {
            hw[q] = s;
        }
        prop_assert_eq!(unembed(&hw, &e), spins);
    }
}
