//! Adversarially perturbed spiked covariance model.
//!
//! Data are `A = (B + M)ᵀ(B + M)` where the rows of `B` are i.i.d. with
//! covariance `Σ = λ₂I + gap·vvᵀ` and a k-sparse spike `v`, and `M` is a
//! perturbation whose columns have Euclidean norm at most `b`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::brute_force_opt;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, matrix_norm, matrix_sqrt, NormKind, SymmetricMatrix};
use crate::rounding::greedy_diagonal_init;
use crate::sdp::{solve_spca_sdp, CgalConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// `±1` entries.
    RademacherScaled,
    /// Uniform on `[−√3, √3]`.
    UniformScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    Zero,
    /// Every column equals `(b/√n)·1`.
    ConstantColumn,
    /// Gaussian entries scaled so that the largest column norm is `b`.
    RandomBounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    /// Sub-Gaussian parameter of the rows; equals the variance only for Gaussian noise.
    pub sigma2: f64,
    /// Eigenvalue of `Σ` on the complement of the spike.
    pub lambda2: f64,
    /// `λ₁ − λ₂`.
    pub spike_gap: f64,
    /// Lower bound `a` on the nonzero entries of `v`.
    pub spike_floor: f64,
    /// Column-norm budget `b` of the perturbation.
    pub perturbation_column_bound: f64,
    pub noise_kind: NoiseKind,
    pub perturbation_kind: PerturbationKind,
}

impl ModelSpec {
    /// Flat spike, unit base variance, Gaussian noise and no perturbation.
    pub fn new(d: usize, k: usize, n: usize, spike_gap: f64) -> Self {
        Self {
            d,
            k,
            n,
            sigma2: 1.0,
            lambda2: 1.0,
            spike_gap,
            spike_floor: 1.0 / (k as f64).sqrt(),
            perturbation_column_bound: 0.0,
            noise_kind: NoiseKind::Gaussian,
            perturbation_kind: PerturbationKind::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.d == 0 || self.k == 0 || self.k > self.d {
            return bad(format!(
                "need 1 <= k <= d, got k = {}, d = {}",
                self.k, self.d
            ));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if !(self.spike_gap > 0.0) {
            return bad(format!(
                "spike gap must be positive, got {}",
                self.spike_gap
            ));
        }
        if !(self.lambda2 >= 0.0) || !(self.sigma2 > 0.0) {
            return bad("lambda2 must be nonnegative and sigma2 positive".into());
        }
        if !(self.perturbation_column_bound >= 0.0) {
            return bad("perturbation column bound must be nonnegative".into());
        }
        let flat = 1.0 / (self.k as f64).sqrt();
        if !(self.spike_floor > 0.0) || self.spike_floor > flat * (1.0 + 1e-12) {
            return bad(format!(
                "spike floor {} is not achievable by a flat {}-sparse unit spike (max {flat})",
                self.spike_floor, self.k
            ));
        }
        Ok(())
    }

    pub fn spike(&self) -> DVector<f64> {
        let flat = 1.0 / (self.k as f64).sqrt();
        DVector::from_fn(self.d, |i, _| if i < self.k { flat } else { 0.0 })
    }

    pub fn sigma(&self) -> SymmetricMatrix {
        let v = self.spike();
        let outer = SymmetricMatrix::outer(&v).expect("finite spike");
        outer.scaled(self.spike_gap).shifted(self.lambda2)
    }

    /// `max_i Σ_ii`.
    pub fn max_sigma_diag(&self) -> f64 {
        self.lambda2 + self.spike_gap / self.k as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInstance {
    pub a: SymmetricMatrix,
    pub b: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub sigma: SymmetricMatrix,
    pub v: DVector<f64>,
    pub spec: ModelSpec,
    pub seed: u64,
}

fn draw_noise(kind: NoiseKind, rng: &mut ChaCha8Rng) -> f64 {
    match kind {
        NoiseKind::Gaussian => StandardNormal.sample(rng),
        NoiseKind::RademacherScaled => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        NoiseKind::UniformScaled => rng.random_range(-3f64.sqrt()..3f64.sqrt()),
    }
}

pub fn gen_model(spec: &ModelSpec, seed: u64) -> Result<ModelInstance> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = spec.sigma();
    let root = matrix_sqrt(&sigma)?;
    let g = DMatrix::from_fn(n, d, |_, _| draw_noise(spec.noise_kind, &mut rng));
    let b = g * root.as_matrix();

    let bound = spec.perturbation_column_bound;
    let m = match spec.perturbation_kind {
        PerturbationKind::Zero => DMatrix::zeros(n, d),
        PerturbationKind::ConstantColumn => DMatrix::from_element(n, d, bound / (n as f64).sqrt()),
        PerturbationKind::RandomBounded => {
            let raw = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
            let max_col = raw.column_iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
            if max_col > 0.0 {
                raw * (bound / max_col)
            } else {
                raw
            }
        }
    };
    let a = SymmetricMatrix::gram(&(&b + &m))?;
    Ok(ModelInstance {
        a,
        b,
        m,
        sigma,
        v: spec.spike(),
        spec: spec.clone(),
        seed,
    })
}

/// Largest column norm of `M`.
pub fn column_norm_bound(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `E = A − nΣ` and `‖E‖_∞`.
pub fn error_decomposition(inst: &ModelInstance) -> (SymmetricMatrix, f64) {
    let e = inst.a.sub(&inst.sigma.scaled(inst.spec.n as f64));
    let norm = matrix_norm(&e, NormKind::EntryInf);
    (e, norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NStarParams {
    pub d: f64,
    pub k: f64,
    pub sigma2: f64,
    pub b: f64,
    pub max_sigma_diag: f64,
    pub gap: f64,
    pub a: f64,
    pub c_star: f64,
}

impl NStarParams {
    pub fn from_spec(spec: &ModelSpec, c_star: f64) -> Self {
        Self {
            d: spec.d as f64,
            k: spec.k as f64,
            sigma2: spec.sigma2,
            b: spec.perturbation_column_bound,
            max_sigma_diag: spec.max_sigma_diag(),
            gap: spec.spike_gap,
            a: spec.spike_floor,
            c_star,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NStar {
    pub sample_term: f64,
    pub floor_term: f64,
    pub log_term: f64,
    pub value: f64,
}

/// Sample-size threshold `n*`; `c_star` is the caller's calibration of the
/// unspecified absolute constant.
pub fn n_star(p: &NStarParams) -> NStar {
    let NStarParams {
        d,
        k,
        sigma2,
        b,
        max_sigma_diag,
        gap,
        a,
        c_star,
    } = *p;
    let log_d = d.ln();
    let b2 = b * b;
    let sample_term = c_star
        * ((k * k * sigma2 * sigma2 * log_d + b2 * k * k * (sigma2 + max_sigma_diag))
            / (gap * gap * a.powi(4))
            + k * b2 / (gap * a * a));
    let floor_term = 4.0 / (a * a);
    NStar {
        sample_term,
        floor_term,
        log_term: log_d,
        value: sample_term.max(floor_term).max(log_d),
    }
}

pub fn n_star_for_spec(spec: &ModelSpec, c_star: f64) -> NStar {
    n_star(&NStarParams::from_spec(spec, c_star))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    pub inf_dist: f64,
    pub frob_dist: f64,
    pub support_recovered: bool,
    pub a_half_pass: bool,
}

/// Distances from `W` to `vvᵀ`, with `a = min_{v_i ≠ 0} |v_i|`.
pub fn recovery_metrics(w: &SymmetricMatrix, v: &DVector<f64>) -> Result<RecoveryMetrics> {
    if w.dim() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: v.len(),
        });
    }
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "spike must be a unit vector, norm {}",
            v.norm()
        )));
    }
    let a = v
        .iter()
        .filter(|x| **x != 0.0)
        .map(|x| x.abs())
        .fold(f64::INFINITY, f64::min);
    let diff = w.as_matrix() - v * v.transpose();
    let inf_dist = diff.amax();
    let half = a * a / 2.0;
    let support_recovered = (0..v.len()).all(|i| (w.get(i, i) > half) == (v[i] != 0.0));
    Ok(RecoveryMetrics {
        inf_dist,
        frob_dist: diff.norm(),
        support_recovered,
        a_half_pass: inf_dist <= half,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// `‖A − BᵀB‖_∞`.
    pub a_val: f64,
    pub eigengap: f64,
    pub bound: f64,
    /// Allowance for an inexact `W` (suboptimality and ℓ1 excess).
    pub slack: f64,
    pub distance: f64,
    pub pass: bool,
}

/// Checks `‖W − vvᵀ‖_F ≤ c + √c + slack` with `c = 2·a·k/(λ₁ − λ₂)`.
///
/// For an optimal `W` the slack is zero. For an approximate `W` with trace
/// one, `sdp_gap = max(0, vᵀAv − tr(AW))` and `r = max(0, ‖W‖₁ − k)` enter
/// the curvature argument as an extra constant term `e = 2(sdp_gap + a·r)/gap`
/// in `x² ≤ c·x + c + e`, which gives `x ≤ c + √c + √e`.
pub fn deterministic_robustness_check(
    a: &SymmetricMatrix,
    btb: &SymmetricMatrix,
    v: &DVector<f64>,
    k: usize,
    w: &SymmetricMatrix,
    sdp_gap: f64,
) -> Result<RobustnessReport> {
    let d = a.dim();
    for (dim, _) in [(btb.dim(), 0), (w.dim(), 1), (v.len(), 2)] {
        if dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            });
        }
    }
    let a_val = matrix_norm(&a.sub(btb), NormKind::EntryInf);
    let spec = eigenvalues(btb)?;
    let eigengap = if d >= 2 {
        spec[0] - spec[1]
    } else {
        f64::INFINITY
    };
    if !(eigengap > 1e-12 * spec[0].abs().max(1.0)) {
        return Err(Error::ZeroEigengap { value: spec[0] });
    }
    let kf = k as f64;
    let c = 2.0 * a_val * kf / eigengap;
    let bound = c + c.sqrt();
    let excess = (matrix_norm(w, NormKind::EntryL1) - kf).max(0.0);
    let slack = (2.0 * (sdp_gap.max(0.0) + a_val * excess) / eigengap).sqrt();
    let distance = (w.as_matrix() - v * v.transpose()).norm();
    Ok(RobustnessReport {
        a_val,
        eigengap,
        bound,
        slack,
        distance,
        pass: distance <= bound + slack + 1e-10,
    })
}

/// Ratio threshold `1 + 2/(8√l − 1)`.
pub fn ratio_threshold(l: f64) -> f64 {
    1.0 + 2.0 / (8.0 * l.sqrt() - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTrial {
    pub seed: u64,
    pub opt: f64,
    pub objective: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub l: f64,
    pub n: usize,
    pub threshold: f64,
    pub trials: Vec<RatioTrial>,
    pub pass_fraction: f64,
}

/// Runs the greedy diagonal initializer on CGAL solutions of model
/// instances drawn with `n = ⌈l·n*⌉` and compares against the exact optimum.
pub fn ratio_experiment(
    spec: &ModelSpec,
    l: f64,
    trials: usize,
    seed: u64,
    c_star: f64,
    cgal: &CgalConfig,
) -> Result<RatioSummary> {
    if !(l >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "l must be at least 1, got {l}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let n = (l * n_star_for_spec(spec, c_star).value).ceil() as usize;
    let spec = ModelSpec { n, ..spec.clone() };
    spec.validate()?;
    let threshold = ratio_threshold(l);
    let results: Vec<RatioTrial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial_seed = seed.wrapping_add(t);
            let inst = gen_model(&spec, trial_seed)?;
            let opt = brute_force_opt(&inst.a, spec.k)?.objective;
            let sdp = solve_spca_sdp(&inst.a, spec.k, cgal)?;
            let objective = greedy_diagonal_init(&inst.a, &sdp.w, spec.k)?.objective;
            let ratio = opt / objective;
            Ok(RatioTrial {
                seed: trial_seed,
                opt,
                objective,
                ratio,
                pass: ratio <= threshold,
            })
        })
        .collect::<Result<_>>()?;
    let pass_fraction = results.iter().filter(|r| r.pass).count() as f64 / trials as f64;
    Ok(RatioSummary {
        l,
        n,
        threshold,
        trials: results,
        pass_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_star_hand_value() {
        let p = NStarParams {
            d: std::f64::consts::E,
            k: 1.0,
            sigma2: 1.0,
            b: 0.0,
            max_sigma_diag: 2.0,
            gap: 1.0,
            a: 1.0,
            c_star: 1.0,
        };
        let r = n_star(&p);
        assert!((r.sample_term - 1.0).abs() < 1e-12);
        assert_eq!(r.value, 4.0);
    }

    #[test]
    fn thresholds() {
        assert!((ratio_threshold(1.0) - 9.0 / 7.0).abs() < 1e-15);
        assert!((ratio_threshold(4.0) - 17.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn recovery_examples() {
        let mut v = DVector::zeros(4);
        v[0] = 0.6;
        v[2] = 0.8;
        let w = SymmetricMatrix::outer(&v).unwrap();
        let r = recovery_metrics(&w, &v).unwrap();
        assert_eq!(
            (r.inf_dist, r.frob_dist, r.support_recovered, r.a_half_pass),
            (0.0, 0.0, true, true)
        );

        let d = 5;
        let mut e1 = DVector::zeros(d);
        e1[0] = 1.0;
        let w = SymmetricMatrix::identity(d).scaled(1.0 / d as f64);
        let r = recovery_metrics(&w, &e1).unwrap();
        assert!((r.inf_dist - (1.0 - 1.0 / d as f64)).abs() < 1e-15);
        assert!(!r.a_half_pass);
    }

    #[test]
    fn floor_above_flat_is_rejected() {
        let mut spec = ModelSpec::new(10, 4, 20, 1.0);
        spec.spike_floor = 0.6;
        assert!(gen_model(&spec, 0).is_err());
    }

    #[test]
    fn zero_error_passes_robustness() {
        let spec = ModelSpec::new(6, 2, 10, 1.0);
        let v = spec.spike();
        let btb = spec.sigma();
        let w = SymmetricMatrix::outer(&v).unwrap();
        let r = deterministic_robustness_check(&btb, &btb, &v, 2, &w, 0.0).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.distance < 1e-15 && r.pass);
    }
}
