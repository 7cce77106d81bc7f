mod common;

use common::{jacobi_lambda_max, random_psd, random_subset, rng, unit_vector};
use nalgebra::DVector;
use proptest::prelude::*;
use spca::linalg::principal_submatrix;
use spca::rounding::{
    greedy_diagonal_init, multi_round, round_once, rounding_probabilities, sample_support,
    RoundingContext, RoundingProbabilities,
};
use spca::sdp::{solve_spca_sdp, CgalConfig};
use spca::SymmetricMatrix;

/// Direct evaluation of the sampling probabilities from their definition.
fn probability_oracle(a: &SymmetricMatrix, w: &SymmetricMatrix, k: usize) -> Vec<f64> {
    let d = a.dim();
    let roots: Vec<f64> = (0..d).map(|i| w.get(i, i).max(0.0).sqrt()).collect();
    let ssr: f64 = roots.iter().sum();
    let tr: f64 = (0..d).map(|i| a.get(i, i)).sum();
    let kf = k as f64;
    (0..d)
        .map(|i| (2.0 / 3.0 * kf * roots[i] / ssr + kf * a.get(i, i) / (12.0 * tr)).min(1.0))
        .collect()
}

fn sparse_unit(d: usize, k: usize, seed: u64) -> DVector<f64> {
    let mut r = rng(seed);
    let s = random_subset(d, k, &mut r);
    let u = unit_vector(k, &mut r);
    let mut v = DVector::zeros(d);
    for (pos, &i) in s.iter().enumerate() {
        v[i] = u[pos];
    }
    v
}

#[test]
fn probability_examples() {
    let a = SymmetricMatrix::identity(2);
    let w = SymmetricMatrix::identity(2).scaled(0.5);
    let p = rounding_probabilities(&a, &w, 1).unwrap();
    for x in &p.p {
        assert!((x - 0.375).abs() < 1e-15);
    }

    let a = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 1.0]).unwrap();
    let w = SymmetricMatrix::from_diagonal(&[0.25, 0.5, 0.25]).unwrap();
    let p = rounding_probabilities(&a, &w, 1).unwrap();
    let oracle = probability_oracle(&a, &w, 1);
    assert!((p.p[1] - oracle[1]).abs() < 1e-15);
    assert!((p.p[1] - 0.3178).abs() < 5e-5);

    let mut e1 = DVector::zeros(4);
    e1[0] = 1.0;
    let w = SymmetricMatrix::outer(&e1).unwrap();
    let a = random_psd(4, 4, 1);
    assert_eq!(rounding_probabilities(&a, &w, 2).unwrap().p[0], 1.0);
}

#[test]
fn probabilities_match_oracle_on_cgal_output() {
    for seed in 0..10 {
        let a = random_psd(9, 9, seed);
        let w = solve_spca_sdp(&a, 3, &CgalConfig::default()).unwrap().w;
        let p = rounding_probabilities(&a, &w, 3).unwrap();
        for (x, o) in p.p.iter().zip(probability_oracle(&a, &w, 3)) {
            assert!((x - o).abs() <= 1e-14);
        }
    }
}

#[test]
fn support_size_monte_carlo() {
    let p = RoundingProbabilities {
        p: vec![0.375, 0.375],
        k: 1,
        source_trace_a: 2.0,
        source_ssr: 2f64.sqrt(),
    };
    let n = 100_000;
    let total: usize = (0..n).map(|t| sample_support(&p, 2024, t).len()).sum();
    let mean = total as f64 / n as f64;
    assert!((mean - 0.75).abs() <= 0.01, "mean {mean}");
}

#[test]
fn sampling_is_reproducible_and_stream_separated() {
    let a = random_psd(20, 20, 4);
    let w = solve_spca_sdp(&a, 4, &CgalConfig::default()).unwrap().w;
    let p = rounding_probabilities(&a, &w, 4).unwrap();
    assert_eq!(sample_support(&p, 9, 3), sample_support(&p, 9, 3));
    let distinct: std::collections::HashSet<Vec<usize>> =
        (0..50).map(|t| sample_support(&p, 9, t)).collect();
    assert!(distinct.len() > 1);
}

#[test]
fn sparse_spike_is_recovered_exactly() {
    for seed in 0..20 {
        let v = sparse_unit(10, 3, seed);
        let a = SymmetricMatrix::outer(&v).unwrap();
        for n in [0, 10, 200] {
            let out = multi_round(&a, &a, 3, n, seed).unwrap();
            assert!(
                (out.best.objective - 1.0).abs() < 1e-12,
                "seed {seed} n {n}"
            );
        }
    }
}

#[test]
fn greedy_init_on_rank_one_w_uses_its_support() {
    for seed in 0..20 {
        let v = sparse_unit(12, 4, 100 + seed);
        let w = SymmetricMatrix::outer(&v).unwrap();
        let a = random_psd(12, 12, seed);
        let g = greedy_diagonal_init(&a, &w, 4).unwrap();
        let supp: Vec<usize> = (0..12).filter(|&i| v[i] != 0.0).collect();
        assert_eq!(g.support, supp);
        let block = principal_submatrix(&a, &supp).unwrap();
        let top = jacobi_lambda_max(&block);
        assert!((g.objective - top).abs() <= 1e-10 * top);
    }
}

#[test]
fn rounded_solutions_are_consistent() {
    for seed in 0..10 {
        let a = random_psd(10, 10, seed);
        let w = solve_spca_sdp(&a, 3, &CgalConfig::default()).unwrap().w;
        let sol = round_once(&a, &w, 3, seed).unwrap();
        let z = sol.z_vector();
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!((a.quad_form(&z) - sol.objective).abs() <= 1e-10 * sol.objective.abs().max(1.0));
        assert!(sol.support.len() <= 3 || !sol.feasible);
        for i in 0..10 {
            if !sol.support.contains(&i) {
                assert_eq!(z[i], 0.0);
            }
        }
    }
}

#[test]
fn multi_round_best_is_the_argmax() {
    let a = random_psd(10, 10, 5);
    let w = solve_spca_sdp(&a, 3, &CgalConfig::default()).unwrap().w;
    let out = multi_round(&a, &w, 3, 400, 11).unwrap();
    let best_trial = out
        .trial_objectives
        .iter()
        .flatten()
        .fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    assert_eq!(out.best.objective, best_trial.max(out.greedy_objective));
    assert!(out.best.feasible);
    let ctx = RoundingContext::new(&a, &w, 3).unwrap();
    for (t, o) in out.trial_objectives.iter().enumerate().take(30) {
        let sol = ctx.round_trial(11, t).unwrap();
        assert_eq!(*o, sol.feasible.then_some(sol.objective));
    }
}

proptest! {
    #[test]
    fn probability_budget(seed in 0u64..100_000, d in 2usize..30, kfrac in 0.0f64..1.0) {
        let k = 1 + ((d - 1) as f64 * kfrac) as usize;
        let a = random_psd(d, 1 + (seed % 7) as usize, seed);
        let mut r = rng(seed ^ 0x5eed);
        let rank = 1 + (seed % 4) as usize;
        let g = common::gaussian(rank, d, &mut r);
        let w = SymmetricMatrix::gram(&g).unwrap();
        let w = w.scaled(1.0 / w.trace());
        let p = rounding_probabilities(&a, &w, k).unwrap();
        let sum: f64 = p.p.iter().sum();
        prop_assert!(sum <= 0.75 * k as f64 * (1.0 + 4.0 * f64::EPSILON), "sum {sum} k {k}");
        prop_assert!(p.p.iter().all(|x| (0.0..=1.0).contains(x)));
    }
}
