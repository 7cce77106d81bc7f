//! Conditional-gradient augmented Lagrangian (CGAL) solver for
//!
//! ```text
//! maximize tr(AW)  subject to  tr(W) = 1,  ‖W‖₁ ≤ k,  W ⪰ 0.
//! ```
//!
//! The spectrahedron `{W ⪰ 0, tr W = 1}` is handled by the linear
//! minimization oracle (a top eigenvector), and the entrywise ℓ1 ball is the
//! side constraint handled by the augmented Lagrangian with a quadratic
//! penalty. Internally the objective is scaled by `1/‖A‖₂` so that the
//! penalty schedule does not depend on the units of `A`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    matrix_norm, min_eigenvalue, project_l1_ball_in_place, top_eigpair, NormKind, SymmetricMatrix,
    DEFAULT_EIG_TOL,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgalConfig {
    pub iterations: usize,
    pub lambda0: f64,
    pub seed: u64,
    /// Bound on the Frobenius norm of the dual iterate, in units of the
    /// scaled problem. `None` means `100 · ‖A‖_F / ‖A‖₂`.
    pub dual_norm_cap: Option<f64>,
    pub lmo_tol: f64,
}

impl Default for CgalConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            lambda0: 1.0,
            seed: 42,
            dual_norm_cap: None,
            lmo_tol: DEFAULT_EIG_TOL,
        }
    }
}

impl CgalConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        Self {
            iterations,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidArgument(
                "iterations must be at least 1".into(),
            ));
        }
        if !(self.lambda0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda0 must be positive, got {}",
                self.lambda0
            )));
        }
        if let Some(cap) = self.dual_norm_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "dual_norm_cap must be positive, got {cap}"
                )));
            }
        }
        if !(self.lmo_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lmo_tol must be positive, got {}",
                self.lmo_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub w: SymmetricMatrix,
    pub objective: f64,
    pub trace_residual: f64,
    pub l1_residual: f64,
    pub iterations_run: usize,
    /// Number of rank-one atoms in `W`, capped at `d`.
    pub rank_bound: usize,
}

/// `(|tr W − 1|, max(0, ‖W‖₁ − k), λ_min(W))`.
pub fn feasibility_residuals(w: &SymmetricMatrix, k: usize) -> (f64, f64, f64) {
    let trace_residual = (w.trace() - 1.0).abs();
    let l1_residual = (matrix_norm(w, NormKind::EntryL1) - k as f64).max(0.0);
    let lmin = if w.dim() == 0 {
        0.0
    } else {
        match min_eigenvalue(w, DEFAULT_EIG_TOL, 0) {
            Ok(v) => v,
            Err(Error::NoConvergence { value, .. }) => -value,
            Err(_) => f64::NAN,
        }
    };
    (trace_residual, l1_residual, lmin)
}

/// `k · max_i A_ii`, an upper bound on `tr(AW)` over the feasible set when `A ⪰ 0`.
pub fn holder_upper_bound(a: &SymmetricMatrix, k: usize) -> Result<f64> {
    let diag = a.diagonal();
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(k as f64 * diag.iter().copied().fold(0.0, f64::max))
}

fn project_k(x: &DMatrix<f64>, k: f64) -> DMatrix<f64> {
    let mut p = x.clone();
    project_l1_ball_in_place(p.as_mut_slice(), k);
    p
}

/// Runs CGAL for exactly `cfg.iterations` iterations from the zero matrix.
pub fn solve_spca_sdp(a: &SymmetricMatrix, k: usize, cfg: &CgalConfig) -> Result<SdpSolution> {
    cfg.validate()?;
    let d = a.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={d}, got {k}"
        )));
    }
    let scale = matrix_norm(a, NormKind::Spectral);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let a_bar = a.as_matrix() / scale;
    let cap = cfg
        .dual_norm_cap
        .unwrap_or_else(|| 100.0 * a_bar.norm().max(f64::MIN_POSITIVE));
    let kf = k as f64;
    let lambda0 = cfg.lambda0;

    let mut w = DMatrix::<f64>::zeros(d, d);
    let mut y = DMatrix::<f64>::zeros(d, d);

    for t in 1..=cfg.iterations {
        let tf = t as f64;
        let beta = lambda0 * (tf + 1.0).sqrt();
        let eta = 2.0 / (tf + 1.0);

        let shifted = &w + &y / beta;
        let p = project_k(&shifted, kf);
        // Gradient of the augmented Lagrangian at W.
        let g = -&a_bar + &y + (&w - p) * beta;
        let neg_g = SymmetricMatrix::from_symmetric_unchecked(symmetrize(-g));
        let h = match top_eigpair(&neg_g, cfg.lmo_tol, cfg.seed.wrapping_add(t as u64)) {
            Ok(pair) => pair.vector,
            Err(source) => {
                let objective = a.as_matrix().dot(&w);
                return Err(Error::Lmo {
                    iteration: t,
                    objective,
                    source: Box::new(source),
                });
            }
        };
        w *= 1.0 - eta;
        w.ger(eta, &h, &h, 1.0);

        let beta_next = lambda0 * (tf + 2.0).sqrt();
        let shifted = &w + &y / beta_next;
        let r = &w - project_k(&shifted, kf);
        let r2 = r.norm_squared();
        let gamma = if r2 > 0.0 {
            lambda0.min(4.0 * lambda0 / ((tf + 1.0).powf(1.5) * r2))
        } else {
            lambda0
        };
        let y_new = &y + r * gamma;
        if y_new.norm() <= cap {
            y = y_new;
        }
    }

    let w = SymmetricMatrix::from_symmetric_unchecked(symmetrize(w));
    let objective = a.frobenius_dot(&w);
    let (trace_residual, l1_residual, _) = feasibility_residuals(&w, k);
    Ok(SdpSolution {
        w,
        objective,
        trace_residual,
        l1_residual,
        iterations_run: cfg.iterations,
        rank_bound: cfg.iterations.min(d),
    })
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}
