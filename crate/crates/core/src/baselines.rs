//! Polynomial-time comparison algorithms and an exact brute-force oracle.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    full_eigendecomposition, top_eigpair, top_of_block, SymmetricMatrix, DEFAULT_EIG_TOL,
};
use crate::rounding::SparseSolution;

/// Largest number of supports [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Greedy,
    LocalSearch,
    Chan,
    LowRank,
}

impl Baseline {
    pub const ALL: [Baseline; 4] = [
        Baseline::Greedy,
        Baseline::LocalSearch,
        Baseline::Chan,
        Baseline::LowRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Greedy => "greedy",
            Baseline::LocalSearch => "local_search",
            Baseline::Chan => "chan",
            Baseline::LowRank => "low_rank",
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Baseline::Greedy),
            "local_search" | "local-search" => Ok(Baseline::LocalSearch),
            "chan" => Ok(Baseline::Chan),
            "low_rank" | "low-rank" | "spannogram" => Ok(Baseline::LowRank),
            other => Err(Error::InvalidArgument(format!(
                "unknown baseline {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub algorithm: Baseline,
    pub solution: SparseSolution,
    pub elapsed: Duration,
}

fn check_k(a: &SymmetricMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.dim() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            a.dim()
        )));
    }
    Ok(())
}

fn block_value(a: &SymmetricMatrix, s: &[usize]) -> Result<f64> {
    Ok(top_of_block(a, s)?.0)
}

fn with_index(s: &[usize], j: usize) -> Vec<usize> {
    let mut t = s.to_vec();
    let pos = t.partition_point(|&x| x < j);
    t.insert(pos, j);
    t
}

/// Indices of the `k` largest `|x_i|`, ties to the smaller index, sorted.
fn top_k_abs(x: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

fn argmax_diagonal(a: &SymmetricMatrix) -> usize {
    let diag = a.diagonal();
    let mut best = 0;
    for (i, &v) in diag.iter().enumerate() {
        if v > diag[best] {
            best = i;
        }
    }
    best
}

fn timed(
    algorithm: Baseline,
    f: impl FnOnce() -> Result<SparseSolution>,
) -> Result<BaselineResult> {
    let start = Instant::now();
    let solution = f()?;
    Ok(BaselineResult {
        algorithm,
        solution,
        elapsed: start.elapsed(),
    })
}

pub fn run_baseline(algorithm: Baseline, a: &SymmetricMatrix, k: usize) -> Result<BaselineResult> {
    match algorithm {
        Baseline::Greedy => greedy(a, k),
        Baseline::LocalSearch => local_search(a, k),
        Baseline::Chan => chan(a, k),
        Baseline::LowRank => low_rank_spannogram(a, k, 2),
    }
}

fn greedy_support(a: &SymmetricMatrix, k: usize) -> Result<Vec<usize>> {
    let mut s: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let candidates: Vec<usize> = (0..a.dim())
            .filter(|j| s.binary_search(j).is_err())
            .collect();
        let values: Vec<f64> = candidates
            .par_iter()
            .map(|&j| block_value(a, &with_index(&s, j)))
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (pos, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = pos;
            }
        }
        s = with_index(&s, candidates[best]);
    }
    Ok(s)
}

/// Forward selection: grow the support one index at a time, each time
/// adding the index that maximizes `λ_max(A_{S,S})`.
pub fn greedy(a: &SymmetricMatrix, k: usize) -> Result<BaselineResult> {
    check_k(a, k)?;
    timed(Baseline::Greedy, || {
        let s = greedy_support(a, k)?;
        SparseSolution::from_block(a, s, k, None)
    })
}

/// Best-improving swaps starting from the greedy support.
pub fn local_search(a: &SymmetricMatrix, k: usize) -> Result<BaselineResult> {
    check_k(a, k)?;
    timed(Baseline::LocalSearch, || {
        let d = a.dim();
        let mut s = greedy_support(a, k)?;
        let mut value = block_value(a, &s)?;
        let budget = 100 * d * k;
        for _ in 0..budget {
            let swaps: Vec<(usize, usize)> = (0..k)
                .flat_map(|pos| (0..d).map(move |j| (pos, j)))
                .filter(|&(_, j)| s.binary_search(&j).is_err())
                .collect();
            let values: Vec<f64> = swaps
                .par_iter()
                .map(|&(pos, j)| {
                    let mut t = s.clone();
                    t.remove(pos);
                    block_value(a, &with_index(&t, j))
                })
                .collect::<Result<_>>()?;
            let mut best: Option<usize> = None;
            for (idx, &v) in values.iter().enumerate() {
                if best.map_or(true, |b| v > values[b]) {
                    best = Some(idx);
                }
            }
            match best {
                Some(b) if values[b] > value + 1e-10 * value.abs() => {
                    let (pos, j) = swaps[b];
                    s.remove(pos);
                    s = with_index(&s, j);
                    value = values[b];
                }
                _ => break,
            }
        }
        SparseSolution::from_block(a, s, k, None)
    })
}

/// Best of: the largest diagonal entry; the top-k support of `v₁(A)`; and,
/// for every row `i`, the support of the `k` largest `|A_ij|`.
pub fn chan(a: &SymmetricMatrix, k: usize) -> Result<BaselineResult> {
    check_k(a, k)?;
    timed(Baseline::Chan, || {
        let d = a.dim();
        let v1 = top_eigpair(a, DEFAULT_EIG_TOL, 0)?.vector;
        let mut candidates: Vec<Vec<usize>> =
            vec![vec![argmax_diagonal(a)], top_k_abs(v1.as_slice(), k)];
        for i in 0..d {
            let row: Vec<f64> = (0..d).map(|j| a.get(i, j)).collect();
            candidates.push(top_k_abs(&row, k));
        }
        let values: Vec<f64> = candidates
            .par_iter()
            .map(|s| block_value(a, s))
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (idx, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = idx;
            }
        }
        SparseSolution::from_block(a, candidates.swap_remove(best), k, None)
    })
}

/// Angles in `[0, π)` where `a·cosθ + b·sinθ = 0`.
fn zero_angle(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 && b == 0.0 {
        return None;
    }
    let mut theta = (-a).atan2(b);
    if theta < 0.0 {
        theta += std::f64::consts::PI;
    }
    if theta >= std::f64::consts::PI {
        theta -= std::f64::consts::PI;
    }
    Some(theta)
}

fn spannogram_supports(p: &DVector<f64>, q: &DVector<f64>, k: usize) -> BTreeSet<Vec<usize>> {
    let d = p.len();
    let mut angles: Vec<f64> = (0..d)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::with_capacity(2 * (d - i));
            out.extend(zero_angle(p[i], q[i]));
            for j in (i + 1)..d {
                out.extend(zero_angle(p[i] - p[j], q[i] - q[j]));
                out.extend(zero_angle(p[i] + p[j], q[i] + q[j]));
            }
            out
        })
        .collect();
    angles.par_sort_by(f64::total_cmp);
    angles.dedup();

    let pi = std::f64::consts::PI;
    let mut probes: Vec<f64> = angles.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    match (angles.first(), angles.last()) {
        (Some(&first), Some(&last)) => probes.push((0.5 * (last + first + pi)) % pi),
        _ => probes.push(0.0),
    }
    probes
        .par_iter()
        .map(|&theta| {
            let (c, s) = (theta.cos(), theta.sin());
            let v: Vec<f64> = (0..d).map(|i| c * p[i] + s * q[i]).collect();
            top_k_abs(&v, k)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Low-rank (spannogram) method on the rank-`m` truncation of `A`, `m ∈ {1, 2}`.
///
/// Candidate supports are scored on the full matrix.
pub fn low_rank_spannogram(a: &SymmetricMatrix, k: usize, m: usize) -> Result<BaselineResult> {
    check_k(a, k)?;
    if !(m == 1 || m == 2) {
        return Err(Error::InvalidArgument(format!(
            "spannogram rank must be 1 or 2, got {m}"
        )));
    }
    timed(Baseline::LowRank, || {
        let d = a.dim();
        let (l1, v1, l2, v2) = if m == 1 || d == 1 {
            let top = top_eigpair(a, DEFAULT_EIG_TOL, 0)?;
            (top.value, top.vector, 0.0, DVector::zeros(d))
        } else {
            let pairs = full_eigendecomposition(a)?;
            (
                pairs[0].value,
                pairs[0].vector.clone(),
                pairs[1].value,
                pairs[1].vector.clone(),
            )
        };
        if l1 <= 0.0 {
            return SparseSolution::from_block(a, vec![argmax_diagonal(a)], k, None);
        }
        let candidates: Vec<Vec<usize>> = if m == 1 {
            vec![top_k_abs(v1.as_slice(), k)]
        } else {
            let p = v1 * l1.sqrt();
            let q = v2 * l2.max(0.0).sqrt();
            spannogram_supports(&p, &q, k).into_iter().collect()
        };
        let values: Vec<f64> = candidates
            .par_iter()
            .map(|s| block_value(a, s))
            .collect::<Result<_>>()?;
        let mut best = 0;
        for (idx, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = idx;
            }
        }
        SparseSolution::from_block(a, candidates[best].clone(), k, None)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub objective: f64,
    pub support: Vec<usize>,
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact optimum over all supports of size `1..=k`.
///
/// Sizes are visited in increasing order and supports lexicographically; a
/// later support replaces the incumbent only on a strict improvement.
pub fn brute_force_opt(a: &SymmetricMatrix, k: usize) -> Result<BruteForce> {
    check_k(a, k)?;
    let d = a.dim();
    let count: u128 = (1..=k).map(|s| binomial(d, s)).sum();
    if count > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded {
            count,
            limit: BRUTE_FORCE_GUARD,
        });
    }
    let mut best: Option<BruteForce> = None;
    for size in 1..=k {
        for s in (0..d).combinations(size) {
            let v = block_value(a, &s)?;
            if best
                .as_ref()
                .map_or(true, |b| v > b.objective + 1e-12 * b.objective.abs())
            {
                best = Some(BruteForce {
                    objective: v,
                    support: s,
                });
            }
        }
    }
    Ok(best.expect("k >= 1 yields at least one support"))
}
