mod common;

use common::{brute_force_optimum, normal_instance, value};
use corrclust_core::solver::{refine_klj, solve, solve_exact, solve_gaec};
use corrclust_core::synth::{make_planted_partition, sample_logits, NoiseModel, PlantedSpec};
use corrclust_core::{LogitMatrix, Partition, SolverConfig};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

#[test]
fn three_element_examples_match_enumeration() {
    // f01 = +2, f02 = -1, f12 = +2
    let m = LogitMatrix::new(3, vec![2.0, -1.0, 2.0]).unwrap();
    assert_eq!(brute_force_optimum(&m), 3.0);
    assert_eq!(solve_gaec(&m), Partition::single_cluster(3));
    assert_eq!(value(&m, &solve_exact(&m, 14).unwrap()), 3.0);

    // f01 = -5, f02 = -5, f12 = +3
    let m = LogitMatrix::new(3, vec![-5.0, -5.0, 3.0]).unwrap();
    assert_eq!(brute_force_optimum(&m), 3.0);
    let p = refine_klj(&m, &Partition::from_labels(&[0, 0, 1]), &SolverConfig::default());
    assert!(value(&m, &p) >= 3.0);
}

#[test]
fn four_element_example_matches_enumeration() {
    let m = LogitMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 1.0 } else { -2.0 }).unwrap();
    assert_eq!(common::all_partitions(4).len(), 15);
    assert_eq!(brute_force_optimum(&m), 2.0);
    let p = solve(&m, &SolverConfig::default());
    assert_eq!(p.clusters(), vec![vec![0, 1], vec![2, 3]]);
    assert_eq!(value(&m, &p), 2.0);
}

#[test]
fn exact_matches_brute_force() {
    for seed in 0..60 {
        let n = 1 + (seed as usize % 8);
        let m = normal_instance(n, 2.0, seed);
        let p = solve_exact(&m, 14).unwrap();
        assert!((value(&m, &p) - brute_force_optimum(&m)).abs() < TOL, "seed {seed}");
    }
}

#[test]
fn noiseless_planted_instance_is_recovered() {
    let truth = make_planted_partition(&PlantedSpec::uniform(10, 20, 0)).unwrap();
    let m = sample_logits(&truth, &NoiseModel::symmetric(2.0, 0.0), 1).unwrap();
    assert_eq!(m.threshold(), truth.to_labeling());
    assert_eq!(solve(&m, &SolverConfig::default()), truth);
}

#[test]
fn solution_is_locally_stable() {
    let cfg = SolverConfig::default();
    for seed in 0..20 {
        let m = normal_instance(30, 2.0, 100 + seed);
        let p = solve(&m, &cfg);
        let again = refine_klj(&m, &p, &cfg);
        assert_eq!(again, p, "seed {seed}");
    }
}

#[test]
fn scaling_keeps_exact_optimum() {
    for seed in 0..40 {
        let m = normal_instance(7, 2.0, 500 + seed);
        let p = solve_exact(&m, 14).unwrap();
        for c in [0.5, 2.0, 4.0] {
            let scaled = LogitMatrix::from_fn(7, |i, j| c * m.get(i, j)).unwrap();
            assert_eq!(solve_exact(&scaled, 14).unwrap(), p, "seed {seed}, c {c}");
        }
        let scaled = LogitMatrix::from_fn(7, |i, j| 3.0 * m.get(i, j)).unwrap();
        let q = solve_exact(&scaled, 14).unwrap();
        assert!((value(&m, &q) - value(&m, &p)).abs() < TOL);
    }
}

#[test]
fn oracle_agreement_report() {
    // Equality frequency is informative only; the bound below is the contract.
    let cfg = SolverConfig::default();
    let mut equal = 0;
    for seed in 0..200u64 {
        let n = 4 + (seed as usize % 5);
        let m = normal_instance(n, 2.0, 10_000 + seed);
        let exact = value(&m, &solve_exact(&m, 14).unwrap());
        let local = value(&m, &solve(&m, &cfg));
        if exact > 0.0 {
            assert!(local >= 0.95 * exact - TOL, "seed {seed}: {local} vs {exact}");
        }
        if (exact - local).abs() < TOL {
            equal += 1;
        }
    }
    println!("solve() reached the exact optimum on {equal}/200 instances");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn monotone_chain(n in 1usize..9, seed in any::<u64>(), sigma in 0.5f64..4.0) {
        let m = normal_instance(n, sigma, seed);
        let cfg = SolverConfig::default();
        let gaec = solve_gaec(&m);
        let local = solve(&m, &cfg);
        let exact = solve_exact(&m, 14).unwrap();
        prop_assert!(local.to_labeling().is_consistent());
        prop_assert!(value(&m, &gaec) >= 0.0);
        prop_assert!(value(&m, &local) >= value(&m, &gaec) - TOL);
        prop_assert!(value(&m, &exact) >= value(&m, &local) - TOL);
    }

    #[test]
    fn refinement_never_worsens_any_start(n in 2usize..25, seed in any::<u64>(), k in 1usize..6) {
        let m = normal_instance(n, 2.0, seed);
        let labels: Vec<usize> = (0..n).map(|e| (e * 7 + seed as usize) % k).collect();
        let start = Partition::from_labels(&labels);
        let p = refine_klj(&m, &start, &SolverConfig::default());
        prop_assert!(value(&m, &p) >= value(&m, &start) - TOL);
    }

    #[test]
    fn deterministic(n in 2usize..40, seed in any::<u64>()) {
        let m = normal_instance(n, 2.0, seed);
        let cfg = SolverConfig::default();
        prop_assert_eq!(solve(&m, &cfg), solve(&m, &cfg));
    }
}
