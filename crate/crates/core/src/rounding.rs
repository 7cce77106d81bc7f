//! Randomized rounding of an SDP solution into k-sparse unit vectors.
//!
//! A single trial samples a support with independent Bernoulli draws whose
//! probabilities mix `√W_ii` with the diagonal of `A`, pads the support with
//! the largest remaining `W_ii` when `A` is PSD and the sample is short, and
//! returns the top eigenvector of the resulting principal block. The
//! multi-trial driver keeps the best feasible candidate and always includes
//! the deterministic top-k-diagonal initializer.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_psd, top_of_block, SymmetricMatrix};

/// Diagonal entries of `W` down to this value are clamped to zero.
pub const DIAG_CLAMP: f64 = -1e-12;
/// Relative tolerance of the PSD test gating the padding step.
pub const PSD_GATE_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingProbabilities {
    pub p: Vec<f64>,
    pub k: usize,
    pub source_trace_a: f64,
    /// `Σ √W_ii`.
    pub source_ssr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    pub z: Vec<f64>,
    pub support: Vec<usize>,
    pub k: usize,
    pub objective: f64,
    pub feasible: bool,
    /// `None` for the greedy diagonal initializer.
    pub trial_id: Option<usize>,
}

impl SparseSolution {
    pub fn from_block(
        a: &SymmetricMatrix,
        support: Vec<usize>,
        k: usize,
        trial_id: Option<usize>,
    ) -> Result<Self> {
        if support.is_empty() {
            return Ok(Self::infeasible_empty(a.dim(), k, trial_id));
        }
        let (_, z) = top_of_block(a, &support)?;
        let objective = a.quad_form(&z);
        let feasible = support.len() <= k && (z.norm() - 1.0).abs() <= 1e-10;
        Ok(Self {
            z: z.iter().copied().collect(),
            support,
            k,
            objective,
            feasible,
            trial_id,
        })
    }

    fn infeasible_empty(d: usize, k: usize, trial_id: Option<usize>) -> Self {
        Self {
            z: vec![0.0; d],
            support: Vec::new(),
            k,
            objective: 0.0,
            feasible: false,
            trial_id,
        }
    }

    pub fn z_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.z)
    }
}

fn check_dims(a: &SymmetricMatrix, w: &SymmetricMatrix) -> Result<()> {
    if a.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: w.dim(),
        });
    }
    Ok(())
}

fn clamped_diagonal(w: &SymmetricMatrix) -> Result<Vec<f64>> {
    w.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if x < DIAG_CLAMP {
                Err(Error::InvalidArgument(format!(
                    "W[{i}][{i}] = {x} is negative"
                )))
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

pub fn rounding_probabilities(
    a: &SymmetricMatrix,
    w: &SymmetricMatrix,
    k: usize,
) -> Result<RoundingProbabilities> {
    check_dims(a, w)?;
    let tr = a.trace();
    if !(tr > 0.0) {
        return Err(Error::NonPositiveTrace(tr));
    }
    let roots: Vec<f64> = clamped_diagonal(w)?.into_iter().map(f64::sqrt).collect();
    let ssr: f64 = roots.iter().sum();
    if ssr == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let kf = k as f64;
    let p = roots
        .iter()
        .zip(a.diagonal())
        .map(|(ai, aii)| (2.0 / 3.0 * kf * ai / ssr + kf / 12.0 * aii / tr).min(1.0))
        .collect();
    Ok(RoundingProbabilities {
        p,
        k,
        source_trace_a: tr,
        source_ssr: ssr,
    })
}

/// Draws `S = {i : u_i < p_i}` with `u_i` taken in index order from the
/// ChaCha8 stream `trial` of `seed`.
pub fn sample_support(p: &RoundingProbabilities, seed: u64, trial: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    p.p.iter()
        .enumerate()
        .filter_map(|(i, &pi)| {
            let u: f64 = rng.random();
            (u < pi).then_some(i)
        })
        .collect()
}

/// Indices of the `count` largest entries of `values` outside `exclude`,
/// ties going to the smaller index.
fn top_indices(values: &[f64], count: usize, exclude: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len())
        .filter(|i| exclude.binary_search(i).is_err())
        .collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    idx.truncate(count);
    idx
}

/// Shared state for repeated trials on one `(A, W, k)`.
#[derive(Debug, Clone)]
pub struct RoundingContext<'a> {
    a: &'a SymmetricMatrix,
    w_diag: Vec<f64>,
    k: usize,
    probabilities: RoundingProbabilities,
    a_is_psd: bool,
}

impl<'a> RoundingContext<'a> {
    pub fn new(a: &'a SymmetricMatrix, w: &SymmetricMatrix, k: usize) -> Result<Self> {
        let probabilities = rounding_probabilities(a, w, k)?;
        Ok(Self {
            a,
            w_diag: clamped_diagonal(w)?,
            k,
            probabilities,
            a_is_psd: is_psd(a, PSD_GATE_REL),
        })
    }

    /// Replaces the sampling probabilities, keeping everything else.
    pub fn with_probabilities(mut self, p: Vec<f64>) -> Result<Self> {
        if p.len() != self.a.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.a.dim(),
                found: p.len(),
            });
        }
        self.probabilities.p = p;
        Ok(self)
    }

    pub fn probabilities(&self) -> &RoundingProbabilities {
        &self.probabilities
    }

    pub fn a_is_psd(&self) -> bool {
        self.a_is_psd
    }

    pub fn round_trial(&self, seed: u64, trial: usize) -> Result<SparseSolution> {
        let mut s = sample_support(&self.probabilities, seed, trial);
        if self.a_is_psd && s.len() < self.k {
            let pad = top_indices(&self.w_diag, self.k - s.len(), &s);
            s.extend(pad);
            s.sort_unstable();
        }
        SparseSolution::from_block(self.a, s, self.k, Some(trial))
    }

    pub fn greedy(&self) -> Result<SparseSolution> {
        let mut s = top_indices(&self.w_diag, self.k, &[]);
        s.sort_unstable();
        SparseSolution::from_block(self.a, s, self.k, None)
    }
}

/// One trial of the rounding procedure (trial index 0 of `seed`).
pub fn round_once(
    a: &SymmetricMatrix,
    w: &SymmetricMatrix,
    k: usize,
    seed: u64,
) -> Result<SparseSolution> {
    RoundingContext::new(a, w, k)?.round_trial(seed, 0)
}

/// Top-k diagonal entries of `W` as the support.
pub fn greedy_diagonal_init(
    a: &SymmetricMatrix,
    w: &SymmetricMatrix,
    k: usize,
) -> Result<SparseSolution> {
    check_dims(a, w)?;
    if k == 0 || k > a.dim() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            a.dim()
        )));
    }
    let mut s = top_indices(&clamped_diagonal(w)?, k, &[]);
    s.sort_unstable();
    SparseSolution::from_block(a, s, k, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRoundOutcome {
    pub best: SparseSolution,
    pub greedy_objective: f64,
    /// Objective of every trial, `None` where the trial was infeasible.
    pub trial_objectives: Vec<Option<f64>>,
}

impl MultiRoundOutcome {
    pub fn feasible_trials(&self) -> usize {
        self.trial_objectives.iter().filter(|o| o.is_some()).count()
    }
}

/// Greedy initializer plus `n` independent rounding trials, run in parallel.
///
/// Returns the best feasible candidate; ties go to the greedy solution and
/// then to the lowest trial index.
pub fn multi_round(
    a: &SymmetricMatrix,
    w: &SymmetricMatrix,
    k: usize,
    n: usize,
    seed: u64,
) -> Result<MultiRoundOutcome> {
    let ctx = RoundingContext::new(a, w, k)?;
    multi_round_with(&ctx, n, seed)
}

pub fn multi_round_with(
    ctx: &RoundingContext<'_>,
    n: usize,
    seed: u64,
) -> Result<MultiRoundOutcome> {
    let greedy = ctx.greedy()?;
    let trial_objectives: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|t| {
            let sol = ctx.round_trial(seed, t)?;
            Ok(sol.feasible.then_some(sol.objective))
        })
        .collect::<Result<_>>()?;

    let mut best_obj = greedy.objective;
    let mut best_trial = None;
    for (t, obj) in trial_objectives.iter().enumerate() {
        if let Some(o) = *obj {
            if o > best_obj {
                best_obj = o;
                best_trial = Some(t);
            }
        }
    }
    let greedy_objective = greedy.objective;
    let best = match best_trial {
        Some(t) => ctx.round_trial(seed, t)?,
        None => greedy,
    };
    Ok(MultiRoundOutcome {
        best,
        greedy_objective,
        trial_objectives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_examples() {
        let a = SymmetricMatrix::identity(2);
        let w = SymmetricMatrix::identity(2).scaled(0.5);
        let p = rounding_probabilities(&a, &w, 1).unwrap();
        assert!((p.p[0] - 0.375).abs() < 1e-15);
        assert!((p.p[1] - 0.375).abs() < 1e-15);

        let a = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 1.0]).unwrap();
        let w = SymmetricMatrix::from_diagonal(&[0.25, 0.5, 0.25]).unwrap();
        let p = rounding_probabilities(&a, &w, 1).unwrap();
        let h = 0.5f64.sqrt();
        let expected = 2.0 / 3.0 * h / (1.0 + h) + 1.0 / 12.0 * 0.5;
        assert!((p.p[1] - expected).abs() < 1e-15);
        assert!((p.p[1] - 0.3178).abs() < 1e-4);
    }

    #[test]
    fn probability_errors() {
        let w = SymmetricMatrix::identity(2).scaled(0.5);
        let a = SymmetricMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            rounding_probabilities(&a, &w, 1),
            Err(Error::NonPositiveTrace(_))
        ));
        let z = SymmetricMatrix::zeros(2);
        assert!(matches!(
            rounding_probabilities(&SymmetricMatrix::identity(2), &z, 1),
            Err(Error::ZeroDiagonal)
        ));
    }

    #[test]
    fn saturated_and_degenerate_sampling() {
        let probs = |p: Vec<f64>| RoundingProbabilities {
            p,
            k: 2,
            source_trace_a: 1.0,
            source_ssr: 1.0,
        };
        let p = probs(vec![1.0, 1.0, 0.0, 0.0]);
        for t in 0..50 {
            assert_eq!(sample_support(&p, 7, t), vec![0, 1]);
        }
        let p = probs(vec![0.0; 4]);
        assert!(sample_support(&p, 7, 0).is_empty());
    }

    #[test]
    fn deterministic_path() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let w = SymmetricMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let sol = round_once(&a, &w, 1, 0).unwrap();
        assert_eq!(sol.support, vec![0]);
        assert!((sol.objective - 3.0).abs() < 1e-12);
        assert!(sol.feasible);
    }

    #[test]
    fn padding_with_zero_probabilities() {
        let a = SymmetricMatrix::from_lower_fn(5, |i, j| if i == j { 2.0 } else { 0.3 }).unwrap();
        let w = SymmetricMatrix::from_diagonal(&[0.1, 0.3, 0.05, 0.4, 0.15]).unwrap();
        let ctx = RoundingContext::new(&a, &w, 2)
            .unwrap()
            .with_probabilities(vec![0.0; 5])
            .unwrap();
        let sol = ctx.round_trial(1, 0).unwrap();
        assert_eq!(sol.support, vec![1, 3]);
        assert!((sol.objective - 2.3).abs() < 1e-12);
    }

    #[test]
    fn indefinite_oversized_is_infeasible() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, -1.0, 1.0]).unwrap();
        let w = SymmetricMatrix::identity(3).scaled(1.0 / 3.0);
        let ctx = RoundingContext::new(&a, &w, 1)
            .unwrap()
            .with_probabilities(vec![1.0; 3])
            .unwrap();
        assert!(!ctx.a_is_psd());
        let sol = ctx.round_trial(0, 0).unwrap();
        assert_eq!(sol.support.len(), 3);
        assert!(!sol.feasible);

        let ctx = RoundingContext::new(&a, &w, 1)
            .unwrap()
            .with_probabilities(vec![0.0; 3])
            .unwrap();
        let sol = ctx.round_trial(0, 0).unwrap();
        assert!(sol.support.is_empty() && !sol.feasible);
    }

    #[test]
    fn greedy_examples() {
        let a = SymmetricMatrix::identity(3);
        let w = SymmetricMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let g = greedy_diagonal_init(&a, &w, 2).unwrap();
        assert_eq!(g.support, vec![0, 1]);
        assert!((g.objective - 1.0).abs() < 1e-12);
        assert!(g.feasible && g.trial_id.is_none());

        let w = SymmetricMatrix::identity(3).scaled(1.0 / 3.0);
        assert_eq!(greedy_diagonal_init(&a, &w, 1).unwrap().support, vec![0]);
    }

    #[test]
    fn zero_trials_is_greedy() {
        let a = SymmetricMatrix::from_lower_fn(4, |i, j| if i == j { 1.0 + i as f64 } else { 0.2 })
            .unwrap();
        let w = SymmetricMatrix::identity(4).scaled(0.25);
        let out = multi_round(&a, &w, 2, 0, 42).unwrap();
        assert_eq!(out.best, greedy_diagonal_init(&a, &w, 2).unwrap());
        assert!(out.trial_objectives.is_empty());
    }
}
