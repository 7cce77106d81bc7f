mod common;

use common::{gaussian, oracle_opt_psd, random_psd, random_subset, rng, unit_vector};
use nalgebra::DVector;
use proptest::prelude::*;
use spca::baselines::{
    brute_force_opt, chan, greedy, local_search, low_rank_spannogram, run_baseline, Baseline,
};
use spca::SymmetricMatrix;

#[test]
fn brute_force_agrees_with_independent_enumeration() {
    for seed in 0..30 {
        let d = 5 + (seed % 5) as usize;
        let k = 1 + (seed % 4) as usize;
        let a = random_psd(d, d, seed);
        let bf = brute_force_opt(&a, k).unwrap();
        let oracle = oracle_opt_psd(&a, k);
        assert!(
            (bf.objective - oracle).abs() <= 1e-10 * oracle,
            "seed {seed}"
        );
        assert!(bf.support.len() <= k);
    }
}

#[test]
fn brute_force_examples() {
    let a = SymmetricMatrix::from_row_slice(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
    let r = brute_force_opt(&a, 1).unwrap();
    assert_eq!((r.objective, r.support), (2.0, vec![0]));
    let r = brute_force_opt(&a, 2).unwrap();
    assert!((r.objective - 3.0).abs() < 1e-12);
    assert_eq!(r.support, vec![0, 1]);
    let r = brute_force_opt(&SymmetricMatrix::identity(5), 3).unwrap();
    assert_eq!((r.objective, r.support), (1.0, vec![0]));
}

#[test]
fn approximation_guarantees_hold() {
    for seed in 0..60 {
        let a = random_psd(10, 10, 500 + seed);
        let k = 2 + (seed % 3) as usize;
        let opt = oracle_opt_psd(&a, k);
        let kf = k as f64;
        let g = greedy(&a, k).unwrap().solution.objective;
        let l = local_search(&a, k).unwrap().solution.objective;
        let c = chan(&a, k).unwrap().solution.objective;
        assert!(g >= opt / kf, "greedy seed {seed}");
        assert!(l >= g - 1e-12 * g, "local search below greedy, seed {seed}");
        assert!(c >= opt / kf.sqrt(), "chan seed {seed}");
        for v in [g, l, c] {
            assert!(v <= opt * (1.0 + 1e-12));
        }
    }
}

#[test]
fn chan_half_of_optimum_at_k4() {
    for seed in 0..40 {
        let a = random_psd(10, 10, 900 + seed);
        let opt = oracle_opt_psd(&a, 4);
        assert!(chan(&a, 4).unwrap().solution.objective >= opt / 2.0);
    }
}

#[test]
fn local_search_strictly_improves_on_some_instance() {
    // Search small instances for a greedy gap that local search closes.
    let mut found = None;
    for seed in 0..400 {
        let a = random_psd(6, 2, seed);
        let g = greedy(&a, 3).unwrap().solution.objective;
        let opt = oracle_opt_psd(&a, 3);
        if g < opt * (1.0 - 1e-6) {
            let l = local_search(&a, 3).unwrap().solution.objective;
            if l > g * (1.0 + 1e-9) {
                found = Some((seed, g, l, opt));
                break;
            }
        }
    }
    let (seed, g, l, opt) = found.expect("no instance with a greedy gap found");
    assert!(l > g && l <= opt * (1.0 + 1e-12), "seed {seed}");
}

#[test]
fn spannogram_is_exact_on_rank_two() {
    for seed in 0..40 {
        let mut r = rng(seed);
        let g = gaussian(2, 8, &mut r);
        let a = SymmetricMatrix::gram(&g).unwrap();
        let opt = oracle_opt_psd(&a, 3);
        let s = low_rank_spannogram(&a, 3, 2).unwrap().solution.objective;
        assert!(
            (s - opt).abs() <= 1e-9 * opt.max(1.0),
            "seed {seed}: {s} vs {opt}"
        );
    }
}

#[test]
fn sparse_spikes_are_recovered_by_every_baseline() {
    for seed in 0..20 {
        let mut r = rng(seed);
        let s = random_subset(9, 3, &mut r);
        let u = unit_vector(3, &mut r);
        let mut v = DVector::zeros(9);
        for (p, &i) in s.iter().enumerate() {
            v[i] = u[p];
        }
        let a = SymmetricMatrix::outer(&v).unwrap();
        for b in Baseline::ALL {
            let res = run_baseline(b, &a, 3).unwrap();
            assert!(
                (res.solution.objective - 1.0).abs() < 1e-10,
                "{b:?} seed {seed}"
            );
        }
        let m1 = low_rank_spannogram(&a, 4, 1).unwrap();
        assert!(s.iter().all(|i| m1.solution.support.contains(i)));
    }
}

#[test]
fn diagonal_examples() {
    let a = SymmetricMatrix::from_diagonal(&[3.0, 2.0, 1.0]).unwrap();
    let g = greedy(&a, 2).unwrap().solution;
    assert_eq!((g.objective, g.support.clone()), (3.0, vec![0, 1]));
    assert_eq!(local_search(&a, 2).unwrap().solution.objective, 3.0);
    let c = chan(&a, 1).unwrap().solution;
    assert_eq!((c.objective, c.support), (3.0, vec![0]));
    let z = SymmetricMatrix::from_diagonal(&[3.0, 2.0, 0.0]).unwrap();
    let s = low_rank_spannogram(&z, 2, 2).unwrap().solution;
    assert_eq!(s.objective, 3.0);
    assert_eq!(s.support, vec![0, 1]);
}

#[test]
fn invalid_arguments() {
    let a = random_psd(4, 4, 0);
    assert!(greedy(&a, 0).is_err());
    assert!(greedy(&a, 5).is_err());
    assert!(low_rank_spannogram(&a, 2, 3).is_err());
    assert!(brute_force_opt(&random_psd(60, 60, 0), 30).is_err());
    assert!("nonsense".parse::<Baseline>().is_err());
    assert_eq!(
        "local-search".parse::<Baseline>().unwrap(),
        Baseline::LocalSearch
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_search_never_below_greedy(seed in 0u64..1_000_000, d in 3usize..14, n in 1usize..14) {
        let a = random_psd(d, n, seed);
        let k = 1 + (seed as usize % d);
        let g = greedy(&a, k).unwrap().solution.objective;
        let l = local_search(&a, k).unwrap().solution.objective;
        prop_assert!(l >= g - 1e-12 * g.abs().max(1.0));
    }
}
