//! Symmetric eigensolvers.
//!
//! Small and medium matrices go through a dense symmetric eigendecomposition.
//! Above [`DENSE_DISPATCH_DIM`] the top eigenpair is found with a Lanczos
//! iteration that keeps the Krylov basis fully reorthogonalized and restarts
//! from the current Ritz vector when the basis budget runs out.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Largest dimension handled by the dense path of [`top_eigpair`].
pub const DENSE_DISPATCH_DIM: usize = 400;
/// Default cap for [`full_eigendecomposition`].
pub const DENSE_CAP: usize = 4096;
/// Default residual tolerance for top eigenpairs.
pub const DEFAULT_EIG_TOL: f64 = 1e-9;

const LANCZOS_MAX_BASIS: usize = 96;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector; its first nonzero component is positive.
    pub vector: DVector<f64>,
}

/// Flips `v` so that its first nonzero component is positive.
pub fn fix_sign(v: &mut DVector<f64>) {
    let scale = v.amax();
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
}

/// All eigenpairs, sorted by decreasing eigenvalue.
pub fn full_eigendecomposition(m: &SymmetricMatrix) -> Result<Vec<EigenPair>> {
    full_eigendecomposition_with_cap(m, DENSE_CAP)
}

pub fn full_eigendecomposition_with_cap(m: &SymmetricMatrix, cap: usize) -> Result<Vec<EigenPair>> {
    let d = m.dim();
    if d > cap {
        return Err(Error::DenseCapExceeded { dim: d, cap });
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let eig = dense_eigen(m.as_matrix().clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    Ok(order
        .into_iter()
        .map(|i| {
            let mut vector = eig.eigenvectors.column(i).into_owned();
            let n = vector.norm();
            vector /= n;
            fix_sign(&mut vector);
            EigenPair {
                value: eig.eigenvalues[i],
                vector,
            }
        })
        .collect())
}

/// Eigenvalues only, descending.
pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let d = m.dim();
    if d > DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            dim: d,
            cap: DENSE_CAP,
        });
    }
    let mut vals: Vec<f64> = m
        .as_matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    if vals.iter().any(|x| !x.is_finite()) {
        vals = jacobi_eigen(m.as_matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Dense symmetric eigendecomposition. The implicit QR iteration can return
/// NaN on finite input whose entries span a huge dynamic range (entries near
/// 1e-60 next to O(1) ones show up in late solver iterates); cyclic Jacobi
/// takes over in that case.
fn dense_eigen(m: DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    if m.iter().all(|x| x.is_finite()) {
        let eig = SymmetricEigen::new(m.clone());
        if eig
            .eigenvalues
            .iter()
            .chain(eig.eigenvectors.iter())
            .all(|x| x.is_finite())
        {
            return eig;
        }
    }
    jacobi_eigen(m)
}

/// Cyclic Jacobi rotations; slow but unconditionally stable.
fn jacobi_eigen(mut a: DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * a.norm_squared() || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for r in 0..n {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * x - s * y;
                    a[(r, q)] = s * x + c * y;
                }
                for r in 0..n {
                    let (x, y) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * x - s * y;
                    a[(q, r)] = s * x + c * y;
                }
                for r in 0..n {
                    let (x, y) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * x - s * y;
                    v[(r, q)] = s * x + c * y;
                }
            }
        }
    }
    SymmetricEigen {
        eigenvalues: a.diagonal(),
        eigenvectors: v,
    }
}

fn residual(m: &SymmetricMatrix, value: f64, v: &DVector<f64>) -> f64 {
    (m.mul_vec(v) - v * value).norm()
}

/// Algebraically largest eigenvalue with a unit eigenvector.
///
/// The residual `‖Mv − λv‖` is at most `tol · max(1, ‖M‖)`, with `‖M‖`
/// estimated from the computed spectrum.
pub fn top_eigpair(m: &SymmetricMatrix, tol: f64, seed: u64) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let d = m.dim();
    if d == 0 {
        return Err(Error::EmptyIndexSet);
    }
    if d <= DENSE_DISPATCH_DIM {
        let pairs = full_eigendecomposition(m)?;
        let scale = pairs.iter().map(|p| p.value.abs()).fold(1.0_f64, f64::max);
        let top = pairs.into_iter().next().expect("nonempty spectrum");
        let r = residual(m, top.value, &top.vector);
        if r > tol * scale {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: r,
                value: top.value,
            });
        }
        Ok(top)
    } else {
        lanczos_top_eigpair(m, tol, seed)
    }
}

/// Smallest eigenvalue, via the top eigenpair of `−M`.
pub fn min_eigenvalue(m: &SymmetricMatrix, tol: f64, seed: u64) -> Result<f64> {
    Ok(-top_eigpair(&m.neg(), tol, seed)?.value)
}

/// `max |λ_i(M)|`.
pub fn spectral_norm(m: &SymmetricMatrix) -> f64 {
    let top = |x: &SymmetricMatrix| match top_eigpair(x, DEFAULT_EIG_TOL, 0) {
        Ok(p) => p.value,
        Err(Error::NoConvergence { value, .. }) => value,
        Err(_) => 0.0,
    };
    if m.dim() == 0 {
        return 0.0;
    }
    top(m).abs().max(top(&m.neg()).abs())
}

/// PSD test with relative tolerance: `λ_min(M) ≥ −rel_tol · ‖M‖₂`.
pub fn is_psd(m: &SymmetricMatrix, rel_tol: f64) -> bool {
    if m.dim() == 0 {
        return true;
    }
    let scale = spectral_norm(m);
    match min_eigenvalue(m, DEFAULT_EIG_TOL, 0) {
        Ok(lmin) => lmin >= -rel_tol * scale,
        Err(_) => false,
    }
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let v: DVector<f64> = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
    let n = v.norm();
    v / n
}

struct CycleOutcome {
    value: f64,
    vector: DVector<f64>,
    residual: f64,
    scale: f64,
}

fn lanczos_cycle(
    m: &SymmetricMatrix,
    start: &DVector<f64>,
    max_basis: usize,
    tol: f64,
    matvecs: &mut usize,
    cap: usize,
) -> CycleOutcome {
    let mut basis: Vec<DVector<f64>> = vec![start.clone()];
    let mut alpha: Vec<f64> = Vec::with_capacity(max_basis);
    let mut beta: Vec<f64> = Vec::with_capacity(max_basis);

    loop {
        let j = alpha.len();
        let q = &basis[j];
        let mut w = m.mul_vec(q);
        *matvecs += 1;
        let a = q.dot(&w);
        w.axpy(-a, q, 1.0);
        if j > 0 {
            w.axpy(-beta[j - 1], &basis[j - 1], 1.0);
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        alpha.push(a);
        let b = w.norm();

        let size = alpha.len();
        let mut t = DMatrix::zeros(size, size);
        for i in 0..size {
            t[(i, i)] = alpha[i];
            if i + 1 < size {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = dense_eigen(t);
        let (imax, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty tridiagonal");
        let scale = eig
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .fold(1.0_f64, f64::max);
        let estimate = b * eig.eigenvectors[(size - 1, imax)].abs();
        let exhausted = size >= max_basis || *matvecs >= cap || b <= 1e-14 * scale;

        if estimate <= 0.5 * tol * scale || exhausted {
            let y = eig.eigenvectors.column(imax);
            let mut x = DVector::zeros(m.dim());
            for (i, qi) in basis.iter().enumerate() {
                x.axpy(y[i], qi, 1.0);
            }
            let n = x.norm();
            x /= n;
            let r = residual(m, theta, &x);
            *matvecs += 1;
            if r <= tol * scale || exhausted {
                return CycleOutcome {
                    value: theta,
                    vector: x,
                    residual: r,
                    scale,
                };
            }
        }
        beta.push(b);
        basis.push(w / b);
    }
}

/// Randomized-start Lanczos for the algebraically largest eigenpair.
///
/// The total number of matrix-vector products is capped at `10·d`. A cycle
/// whose residual fails to halve counts as stagnation; the first stagnation
/// triggers a restart from a fresh random vector, the second is an error.
pub fn lanczos_top_eigpair(m: &SymmetricMatrix, tol: f64, seed: u64) -> Result<EigenPair> {
    let d = m.dim();
    if d == 0 {
        return Err(Error::EmptyIndexSet);
    }
    if d == 1 {
        return Ok(EigenPair {
            value: m.get(0, 0),
            vector: DVector::from_element(1, 1.0),
        });
    }
    let cap = 10 * d;
    let max_basis = d.min(LANCZOS_MAX_BASIS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = random_unit(d, &mut rng);
    let mut matvecs = 0usize;
    let mut prev_residual = f64::INFINITY;
    let mut fresh_restart_used = false;
    let mut best: Option<CycleOutcome> = None;

    loop {
        let out = lanczos_cycle(m, &start, max_basis, tol, &mut matvecs, cap);
        let converged = out.residual <= tol * out.scale;
        let r = out.residual;
        let next_start = out.vector.clone();
        if best.as_ref().map_or(true, |b| out.residual < b.residual) {
            best = Some(out);
        }
        if converged {
            let b = best.expect("set above");
            let mut vector = b.vector;
            fix_sign(&mut vector);
            return Ok(EigenPair {
                value: b.value,
                vector,
            });
        }
        let stalled = r > 0.5 * prev_residual;
        if matvecs >= cap || (stalled && fresh_restart_used) {
            let b = best.expect("set above");
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: b.residual,
                value: b.value,
            });
        }
        if stalled {
            fresh_restart_used = true;
            start = random_unit(d, &mut rng);
        } else {
            start = next_start;
        }
        prev_residual = r;
    }
}
