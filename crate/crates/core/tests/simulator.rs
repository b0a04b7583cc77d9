mod common;

use common::{random_ergodic, random_rates, random_weights};
use mcgap::chain::{detailed_balance_residual, stationarity_residual};
use mcgap::path_stats::count_transitions;
use mcgap::simulator::{
    birth_death_chain, random_walk_on_weighted_graph, run_coverage, sample_path, ChainModel,
    CoverageConfig, Start, MODEL_TOL,
};
use mcgap::{Error, EstimateOptions};

#[test]
fn birth_death_chains_are_reversible() {
    for seed in 0..20 {
        let (up, down) = random_rates(8, seed);
        let m = birth_death_chain(8, &up, &down).unwrap();
        assert!(detailed_balance_residual(&m.p, &m.pi) <= 1e-12);
        assert!(stationarity_residual(&m.p, &m.pi) <= 1e-12);
    }
}

#[test]
fn weighted_graph_walk_is_stationary() {
    let m = random_walk_on_weighted_graph(&random_weights(10, 42)).unwrap();
    assert!(stationarity_residual(&m.p, &m.pi) <= 1e-12);
    assert!(detailed_balance_residual(&m.p, &m.pi) <= 1e-12);
}

#[test]
fn empirical_transition_frequencies() {
    let m = birth_death_chain(5, &[0.3, 0.25, 0.4, 0.2], &[0.2, 0.35, 0.3, 0.45]).unwrap();
    let path = sample_path(&m, 1_000_000, 5, Start::State(0)).unwrap();
    let c = count_transitions(&path);
    for i in 0..5 {
        for j in 0..5 {
            let freq = c.pair(i, j) as f64 / c.visits()[i] as f64;
            assert!((freq - m.p.get(i, j)).abs() < 0.01, "({i},{j})");
        }
    }
}

#[test]
fn sensitivity_is_at_most_d_over_gap() {
    for seed in 0..30 {
        let (up, down) = random_rates(6, seed);
        let m = birth_death_chain(6, &up, &down).unwrap();
        assert!(m.kappa().unwrap() <= 6.0 / m.gap);
        let g = random_walk_on_weighted_graph(&random_weights(7, seed)).unwrap();
        assert!(g.kappa().unwrap() <= 7.0 / g.gap);
    }
}

#[test]
fn sampling_is_seed_deterministic() {
    let m = birth_death_chain(3, &[0.3, 0.3], &[0.3, 0.3]).unwrap();
    let a = sample_path(&m, 5000, 17, Start::Stationary).unwrap();
    let b = sample_path(&m, 5000, 17, Start::Stationary).unwrap();
    let c = sample_path(&m, 5000, 18, Start::Stationary).unwrap();
    assert_eq!(a.states(), b.states());
    assert_ne!(a.states(), c.states());
}

#[test]
fn nonreversible_matrix_is_rejected_unless_allowed() {
    let p = random_ergodic(4, 3);
    let err = ChainModel::from_matrix(p.clone(), true, MODEL_TOL).unwrap_err();
    assert!(matches!(err, Error::NotReversible(_)));
    let m = ChainModel::from_matrix(p, false, MODEL_TOL).unwrap();
    assert!(!m.reversible);
}

#[test]
fn coverage_ignores_thread_count() {
    let m = birth_death_chain(3, &[0.3, 0.2], &[0.25, 0.35]).unwrap();
    let cfg = |jobs| CoverageConfig {
        n: 2000,
        delta: 0.1,
        trials: 12,
        master_seed: 99,
        start: Start::Stationary,
        jobs,
        options: EstimateOptions::default(),
    };
    let a = run_coverage(&m, &cfg(1)).unwrap();
    let b = run_coverage(&m, &cfg(4)).unwrap();
    assert_eq!(a.results, b.results);
    assert_eq!(a.pi.successes, b.pi.successes);
}
