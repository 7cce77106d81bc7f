//! Checks for structural properties of the relaxation: the SSR quantity and
//! its upper bounds, sufficient conditions for a rank-one optimum, KKT
//! certificates, and the curvature inequality around a top eigenspace.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, full_eigendecomposition, matrix_norm, principal_submatrix, validate_index_set,
    NormKind, SymmetricMatrix,
};

/// Allowed deviation of `tr(W)` from one before [`ssr_report`] refuses the input.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues above `RANK_REL · λ₁` count toward the rank estimate.
pub const RANK_REL: f64 = 1e-10;
pub const DEFAULT_KKT_TOL: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(value: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            pass: value <= bound + 1e-10 * bound.max(1.0),
        }
    }
}

/// Geometric-decay fit of the spectrum of `W`. The constant in front of the
/// bound is unknown, so only the observed ratio is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub q: f64,
    /// `SSR / √(k · ln d / ln(1/q))`.
    pub observed_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsrReport {
    pub ssr: f64,
    pub c0: f64,
    pub dsupp_size: usize,
    pub rank_estimate: usize,
    /// `SSR ≤ √|DSupp(W)|`.
    pub diag_support_bound: BoundCheck,
    /// `SSR ≤ √(rank · k)`, evaluated only when `‖W‖₁ ≤ k`.
    pub rank_bound: Option<BoundCheck>,
    pub decay: Option<DecayFit>,
}

/// SSR statistics of a PSD matrix with unit trace.
///
/// A trace within [`TRACE_TOL`] of one is rescaled to exactly one.
pub fn ssr_report(w: &SymmetricMatrix, k: usize) -> Result<SsrReport> {
    let tr = w.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceViolation { trace: tr });
    }
    let w = w.scaled(1.0 / tr);
    let diag = w.diagonal();
    let ssr: f64 = diag.iter().map(|x| x.max(0.0).sqrt()).sum();
    let dsupp_size = diag.iter().filter(|&&x| x > 0.0).count();
    let kf = k as f64;

    let spectrum = eigenvalues(&w)?;
    let l1 = spectrum.first().copied().unwrap_or(0.0);
    let significant: Vec<f64> = spectrum
        .into_iter()
        .filter(|&x| x > RANK_REL * l1)
        .collect();
    let rank_estimate = significant.len();

    let rank_bound = (matrix_norm(&w, NormKind::EntryL1) <= kf * (1.0 + 1e-12))
        .then(|| BoundCheck::new(ssr, (rank_estimate as f64 * kf).sqrt()));

    let d = w.dim() as f64;
    let decay = if rank_estimate >= 2 && d > 1.0 {
        let q = significant
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| (x / l1).powf(1.0 / i as f64))
            .fold(0.0_f64, f64::max);
        (q < 1.0 && q > 0.0).then(|| DecayFit {
            q,
            observed_ratio: ssr / (kf * d.ln() / (1.0 / q).ln()).sqrt(),
        })
    } else {
        None
    };

    Ok(SsrReport {
        ssr,
        c0: ssr / kf.sqrt(),
        dsupp_size,
        rank_estimate,
        diag_support_bound: BoundCheck::new(ssr, (dsupp_size as f64).sqrt()),
        rank_bound,
        decay,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseEigvecCheck {
    pub pass: bool,
    pub l1: f64,
    pub multiplicity: usize,
    pub vector: Vec<f64>,
}

/// Largest eigenspace dimension searched over sign patterns.
pub const SIGN_SEARCH_MAX: usize = 12;

/// Whether `A` has a top eigenvector with `‖v‖₁ ≤ √k`.
///
/// For a repeated top eigenvalue of multiplicity `r ≤ 12` with orthonormal
/// basis `N`, every `N y / √r` with `y ∈ {±1}^r` is tried.
pub fn check_sparse_top_eigvec(a: &SymmetricMatrix, k: usize) -> Result<SparseEigvecCheck> {
    let pairs = full_eigendecomposition(a)?;
    if pairs.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let top = pairs[0].value;
    let tol = 1e-10 * top.abs().max(1.0);
    let r = pairs.iter().take_while(|p| top - p.value <= tol).count();
    let mut best = pairs[0].vector.clone();
    if (2..=SIGN_SEARCH_MAX).contains(&r) {
        let scale = 1.0 / (r as f64).sqrt();
        // y₁ = +1 without loss of generality.
        for mask in 0..(1u32 << (r - 1)) {
            let mut x = pairs[0].vector.clone();
            for (j, p) in pairs.iter().enumerate().take(r).skip(1) {
                let sign = if mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
                x.axpy(sign, &p.vector, 1.0);
            }
            x *= scale;
            if x.lp_norm(1) < best.lp_norm(1) {
                best = x;
            }
        }
    }
    let l1 = best.lp_norm(1);
    Ok(SparseEigvecCheck {
        pass: l1 <= (k as f64).sqrt() + 1e-10,
        l1,
        multiplicity: r,
        vector: best.iter().copied().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktCertificate {
    pub w_star: Vec<f64>,
    pub lambda_star: f64,
    pub mu_star: f64,
    pub z_star: SymmetricMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    /// Signed slack; nonnegative means satisfied.
    pub margin: f64,
    pub pass: bool,
}

impl Condition {
    fn at_most(value: f64, limit: f64) -> Self {
        Self {
            margin: limit - value,
            pass: value <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub unit_norm: Condition,
    pub l1_budget: Condition,
    pub mu_nonnegative: Condition,
    pub z_range: Condition,
    pub sign_consistency: Condition,
    pub dual_psd: Condition,
    pub slackness_mu: Condition,
    pub stationarity: Condition,
    /// Second-smallest eigenvalue of `λ*I − A + μ*Z*`.
    pub second_smallest_eigenvalue: f64,
    pub unique: bool,
    pub pass: bool,
}

/// Checks primal feasibility, dual feasibility and complementary slackness
/// of a rank-one candidate `w* w*ᵀ`.
///
/// Vector conditions use `tol` directly; conditions on matrices use
/// `tol · max(1, ‖A‖₂)`.
pub fn verify_kkt(
    a: &SymmetricMatrix,
    k: usize,
    cert: &KktCertificate,
    tol: f64,
) -> Result<KktReport> {
    let d = a.dim();
    if cert.w_star.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: cert.w_star.len(),
        });
    }
    if cert.z_star.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: cert.z_star.dim(),
        });
    }
    let mtol = tol * matrix_norm(a, NormKind::Spectral).max(1.0);
    let w = DVector::from_column_slice(&cert.w_star);
    let sqrt_k = (k as f64).sqrt();
    let l1 = w.lp_norm(1);

    let unit_norm = Condition::at_most((w.norm() - 1.0).abs(), tol);
    let l1_budget = Condition::at_most(l1 - sqrt_k, tol);
    let mu_nonnegative = Condition::at_most(-cert.mu_star, tol);
    let z_range = Condition::at_most(cert.z_star.as_matrix().amax() - 1.0, tol);

    let sign = |x: f64| if x.abs() <= tol { 0.0 } else { x.signum() };
    let mut sign_err = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let (si, sj) = (sign(w[i]), sign(w[j]));
            if si != 0.0 && sj != 0.0 {
                sign_err = sign_err.max((cert.z_star.get(i, j) - si * sj).abs());
            }
        }
    }
    let sign_consistency = Condition::at_most(sign_err, tol);

    let m = a
        .neg()
        .add(&cert.z_star.scaled(cert.mu_star))
        .shifted(cert.lambda_star);
    let spectrum = eigenvalues(&m)?;
    let smallest = *spectrum.last().expect("nonempty");
    let second = if d >= 2 {
        spectrum[d - 2]
    } else {
        f64::INFINITY
    };
    let dual_psd = Condition::at_most(-smallest, mtol);
    let slackness_mu = Condition::at_most((cert.mu_star * (l1 - sqrt_k)).abs(), mtol);
    let stationarity = Condition::at_most(m.mul_vec(&w).norm(), mtol);

    let pass = [
        &unit_norm,
        &l1_budget,
        &mu_nonnegative,
        &z_range,
        &sign_consistency,
        &dual_psd,
        &slackness_mu,
        &stationarity,
    ]
    .iter()
    .all(|c| c.pass);
    Ok(KktReport {
        unit_norm,
        l1_budget,
        mu_nonnegative,
        z_range,
        sign_consistency,
        dual_psd,
        slackness_mu,
        stationarity,
        second_smallest_eigenvalue: second,
        unique: second > mtol,
        pass,
    })
}

fn l1_over_l2(x: &DVector<f64>) -> f64 {
    x.lp_norm(1) / x.norm()
}

/// Bisection for a decreasing function crossing `target` on `[lo, hi]`,
/// with `f(lo) > target ≥ f(hi)`.
fn bisect_decreasing(mut lo: f64, mut hi: f64, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Window for `min_{i∈T} |u_i|` under which `λI + uuᵀ` has a unique rank-one
/// relaxation optimum, for unit `u` with `m = ‖u‖₁` and `|T| = ‖u‖₀`.
pub fn rank_one_window(m: f64, support: usize, k: usize) -> (f64, f64) {
    let t = support as f64;
    let kf = k as f64;
    let r = (kf * (t - m * m) / (t - kf)).max(0.0).sqrt();
    ((m - r) / t, (m + r) / t)
}

/// Builds `A = shift·I + uuᵀ` together with a KKT certificate for its
/// rank-one relaxation optimum.
pub fn build_rank_one_instance(
    u: &[f64],
    k: usize,
    lambda_shift: f64,
) -> Result<(SymmetricMatrix, KktCertificate)> {
    if !(lambda_shift >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shift must be nonnegative, got {lambda_shift}"
        )));
    }
    let u = DVector::from_column_slice(u);
    let norm = u.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument(
            "u must be a nonzero finite vector".into(),
        ));
    }
    let u = u / norm;
    let d = u.len();
    let m = u.lp_norm(1);
    let sqrt_k = (k as f64).sqrt();
    if m <= sqrt_k {
        return Err(Error::WindowViolated(format!(
            "m = {m} does not exceed sqrt(k) = {sqrt_k}"
        )));
    }
    let support: Vec<usize> = (0..d).filter(|&i| u[i] != 0.0).collect();
    let min_abs = support
        .iter()
        .map(|&i| u[i].abs())
        .fold(f64::INFINITY, f64::min);
    let (lower, upper) = rank_one_window(m, support.len(), k);
    if !(lower < min_abs) {
        return Err(Error::WindowViolated(format!(
            "lower bound: min |u_i| = {min_abs} is not above {lower}"
        )));
    }
    if !(min_abs < upper) {
        return Err(Error::WindowViolated(format!(
            "upper bound: min |u_i| = {min_abs} is not below {upper}"
        )));
    }

    let s = u
        .map(f64::signum)
        .zip_map(&u, |sg, x| if x == 0.0 { 0.0 } else { sg });
    let w_of = |t: f64| &u - &s * t;
    let ratio = |t: f64| l1_over_l2(&w_of(t));
    if ratio(min_abs) > sqrt_k {
        return Err(Error::Bracketing(format!(
            "l1/l2 ratio {} at t = {min_abs} is still above sqrt(k)",
            ratio(min_abs)
        )));
    }
    let t_star = bisect_decreasing(0.0, min_abs, sqrt_k, ratio);
    let w = w_of(t_star);
    let alpha = w.norm();
    let w = w / alpha;
    let uw = u.dot(&w);
    let cert = KktCertificate {
        w_star: w.iter().copied().collect(),
        lambda_star: alpha * uw + lambda_shift,
        mu_star: t_star * uw / w.lp_norm(1),
        z_star: SymmetricMatrix::outer(&s)?,
    };
    let a = SymmetricMatrix::outer(&u)?.shifted(lambda_shift);
    let report = verify_kkt(&a, k, &cert, DEFAULT_KKT_TOL)?;
    if !report.pass {
        return Err(Error::CertificateRejected(format!("{report:?}")));
    }
    Ok((a, cert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub support: Vec<usize>,
    pub d_const: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Sufficient eigengap; margin is `lhs − rhs` of the inequality.
    pub a1: Condition,
    /// Uniform contraction, verified on the grid only.
    pub a2: Condition,
    /// Small entries outside `S`.
    pub a3: Condition,
    pub grid_verified: bool,
    pub lambda_star: Option<f64>,
    pub grid_size: usize,
    pub certificate: Option<KktCertificate>,
}

/// Evaluates the three assumptions for a rank-one optimum supported on `S`.
pub fn check_assumptions_a123(
    a: &SymmetricMatrix,
    s: &[usize],
    k: usize,
    gamma: f64,
    grid_size: usize,
) -> Result<AssumptionReport> {
    validate_index_set(s, a.dim())?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if s.len() < 2 || grid_size < 2 {
        return Err(Error::InvalidArgument(
            "need |S| >= 2 and grid_size >= 2".into(),
        ));
    }
    let block = principal_submatrix(a, s)?;
    let pairs = full_eigendecomposition(&block)?;
    let n = s.len();
    let (l1, l2) = (pairs[0].value, pairs[1].value);
    if l1 - l2 <= 1e-12 * l1.abs().max(1.0) {
        return Err(Error::ZeroEigengap { value: l1 });
    }
    let v1 = &pairs[0].vector;
    if let Some(j) = (0..n).find(|&j| v1[j].abs() <= 1e-10) {
        return Err(Error::InvalidArgument(format!(
            "top eigenvector of A_SS vanishes at index {}; its support differs from S",
            s[j]
        )));
    }
    let sign = v1.map(f64::signum);
    let alphas: Vec<f64> = pairs.iter().map(|p| sign.dot(&p.vector)).collect();
    let v1_l1 = v1.lp_norm(1);
    let kf = k as f64;
    let sqrt_k = kf.sqrt();
    let tail: f64 = alphas[1..].iter().map(|x| x * x).sum();
    let d_const = ((4.0 * v1_l1.powi(4) - kf * v1_l1 * v1_l1) / (kf * tail)).sqrt();

    let lhs = (1.0 - d_const / (1.0 - gamma) * (kf * n as f64).sqrt() / (v1_l1 * v1_l1)) * l1;
    let rhs = (d_const + 1.0) * l2;
    let a1 = Condition {
        margin: lhs - rhs,
        pass: v1_l1 > sqrt_k && lhs >= rhs,
    };

    let lo = l1 / (d_const + 1.0);
    let grid: Vec<f64> = (0..grid_size)
        .map(|g| lo + (l1 - lo) * g as f64 / (grid_size - 1) as f64)
        .collect();
    let mut a2_margin = f64::INFINITY;
    for &lam in &grid {
        for j in 0..n {
            let mut sum = 0.0;
            for i in 1..n {
                sum += (l1 - lam) / (pairs[i].value - lam) * alphas[i] * pairs[i].vector[j];
            }
            let m = gamma * v1_l1 * v1[j].abs() - sum.abs();
            a2_margin = a2_margin.min(if m.is_nan() { f64::NEG_INFINITY } else { m });
        }
    }
    let a2 = Condition {
        margin: a2_margin,
        pass: a2_margin >= 0.0,
    };

    // R(λ) = ‖(A_SS − λI)⁻¹ s‖₁ / ‖(A_SS − λI)⁻¹ s‖₂ through the eigensystem.
    let resolvent = |lam: f64| -> DVector<f64> {
        let mut x = DVector::zeros(n);
        for (p, &al) in pairs.iter().zip(&alphas) {
            x.axpy(al / (p.value - lam), &p.vector, 1.0);
        }
        x
    };
    let r_of = |lam: f64| l1_over_l2(&resolvent(lam));

    let step = (l1 - lo) / grid_size as f64;
    let mut delta = 0.0;
    for g in 1..=grid_size {
        let lam = l1 - step * g as f64;
        if r_of(lam) >= sqrt_k {
            delta = step * g as f64;
        } else {
            break;
        }
    }

    let off_max = (0..a.dim())
        .flat_map(|i| (0..a.dim()).map(move |j| (i, j)))
        .filter(|&(i, j)| s.binary_search(&i).is_err() || s.binary_search(&j).is_err())
        .map(|(i, j)| a.get(i, j).abs())
        .fold(0.0_f64, f64::max);
    let a3 = Condition::at_most(off_max, delta / (2.0 * sqrt_k * v1_l1 * v1_l1));

    // Root of R(λ) = √k below λ₁: walk down from λ₁ until R drops to √k,
    // staying above λ₂ where R is continuous.
    let floor = l2.max(lo.min(l1));
    let mut bracket = None;
    let probes = 4 * grid_size;
    let mut prev = l1;
    for g in 1..=probes {
        let lam = l1 - (l1 - floor) * g as f64 / probes as f64;
        if lam <= l2 {
            break;
        }
        if r_of(lam) <= sqrt_k {
            bracket = Some((lam, prev));
            break;
        }
        prev = lam;
    }
    let lambda_star = bracket.map(|(lo_b, hi_b)| {
        // R is large near λ₁ and small at lo_b; bisect on −R to reuse the helper.
        bisect_decreasing(lo_b, hi_b, -sqrt_k, |lam| -r_of(lam))
    });

    let certificate = lambda_star.map(|lam| {
        let x = resolvent(lam);
        let xn = x.norm();
        let d = a.dim();
        let mut w = vec![0.0; d];
        for (pos, &i) in s.iter().enumerate() {
            w[i] = x[pos] / xn;
        }
        let mu = 1.0 / (sqrt_k * xn);
        let z = DMatrix::from_fn(d, d, |i, j| {
            match (s.binary_search(&i), s.binary_search(&j)) {
                (Ok(pi), Ok(pj)) => sign[pi] * sign[pj],
                _ => a.get(i, j) / mu,
            }
        });
        KktCertificate {
            w_star: w,
            lambda_star: lam,
            mu_star: mu,
            z_star: SymmetricMatrix::new(z).expect("symmetric by construction"),
        }
    });

    Ok(AssumptionReport {
        support: s.to_vec(),
        d_const,
        gamma,
        delta,
        a1,
        a2,
        a3,
        grid_verified: true,
        lambda_star,
        grid_size,
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub eigengap: f64,
    pub pass: bool,
}

/// Compares `‖P − F‖²_F` with `(2/δ)·tr(B(P − F))`, where `P` projects onto
/// the top-`l` eigenspace of `B` and `δ = λ_l − λ_{l+1}`.
pub fn curvature_gap_check(
    b: &SymmetricMatrix,
    l: usize,
    f: &SymmetricMatrix,
) -> Result<CurvatureCheck> {
    let d = b.dim();
    if f.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    if l == 0 || l >= d {
        return Err(Error::InvalidArgument(format!(
            "l must lie in 1..{d}, got {l}"
        )));
    }
    let f_spec = eigenvalues(f)?;
    if f_spec[0] > 1.0 + 1e-10 || f_spec[d - 1] < -1e-10 {
        return Err(Error::InvalidArgument(format!(
            "F must satisfy 0 <= F <= I, spectrum spans [{}, {}]",
            f_spec[d - 1],
            f_spec[0]
        )));
    }
    if (f.trace() - l as f64).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "tr(F) = {} differs from l = {l}",
            f.trace()
        )));
    }
    let pairs = full_eigendecomposition(b)?;
    let eigengap = pairs[l - 1].value - pairs[l].value;
    if eigengap <= 1e-12 * pairs[0].value.abs().max(1.0) {
        return Err(Error::ZeroEigengap {
            value: pairs[l].value,
        });
    }
    let mut p = DMatrix::zeros(d, d);
    for pair in &pairs[..l] {
        p.ger(1.0, &pair.vector, &pair.vector, 1.0);
    }
    let diff = p - f.as_matrix();
    let lhs = diff.norm_squared();
    let rhs = 2.0 / eigengap * b.as_matrix().dot(&diff);
    Ok(CurvatureCheck {
        lhs,
        rhs,
        eigengap,
        pass: lhs <= rhs + 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    #[test]
    fn ssr_examples() {
        let w = SymmetricMatrix::outer(&e(5, 0)).unwrap();
        let r = ssr_report(&w, 4).unwrap();
        assert_eq!(r.ssr, 1.0);
        assert_eq!(r.c0, 0.5);
        assert_eq!(r.dsupp_size, 1);
        assert_eq!(r.diag_support_bound.bound, 1.0);
        assert!(r.diag_support_bound.pass);

        let w = SymmetricMatrix::identity(16).scaled(1.0 / 16.0);
        let r = ssr_report(&w, 4).unwrap();
        assert!((r.ssr - 4.0).abs() < 1e-12);
        assert!((r.c0 - 2.0).abs() < 1e-12);
        assert_eq!(r.rank_estimate, 16);
        let rb = r.rank_bound.unwrap();
        assert_eq!(rb.bound, 8.0);
        assert!(rb.pass);

        let w = SymmetricMatrix::identity(3);
        assert!(matches!(
            ssr_report(&w, 1),
            Err(Error::TraceViolation { .. })
        ));
    }

    #[test]
    fn sparse_top_eigvec_examples() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let c = check_sparse_top_eigvec(&a, 1).unwrap();
        assert!(c.pass);
        assert!((c.l1 - 1.0).abs() < 1e-12);

        let v = e(3, 0) + e(3, 1);
        let a = SymmetricMatrix::outer(&v).unwrap();
        let c = check_sparse_top_eigvec(&a, 1).unwrap();
        assert!(!c.pass);
        assert!((c.l1 - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rank_one_examples() {
        let (a, cert) = build_rank_one_instance(&[0.9, 0.7, 0.6, 0.5], 3, 0.0).unwrap();
        let rep = verify_kkt(&a, 3, &cert, 1e-8).unwrap();
        assert!(rep.pass && rep.unique);

        assert!(matches!(
            build_rank_one_instance(&[0.5, 0.5, 0.5, 0.5], 3, 0.0),
            Err(Error::WindowViolated(_))
        ));
        assert!(matches!(
            build_rank_one_instance(&[1.0, 0.0, 0.0], 1, 0.0),
            Err(Error::WindowViolated(_))
        ));
    }

    #[test]
    fn perturbed_mu_fails() {
        let (a, mut cert) = build_rank_one_instance(&[0.9, 0.7, 0.6, 0.5], 3, 0.5).unwrap();
        cert.mu_star += 0.1;
        let rep = verify_kkt(&a, 3, &cert, 1e-8).unwrap();
        assert!(!rep.stationarity.pass);
        assert!(!rep.pass);
    }

    #[test]
    fn curvature_examples() {
        let b = SymmetricMatrix::from_diagonal(&[2.0, 1.0]).unwrap();
        let c = curvature_gap_check(&b, 1, &SymmetricMatrix::outer(&e(2, 0)).unwrap()).unwrap();
        assert_eq!((c.lhs, c.rhs, c.pass), (0.0, 0.0, true));
        let c = curvature_gap_check(&b, 1, &SymmetricMatrix::outer(&e(2, 1)).unwrap()).unwrap();
        assert!((c.lhs - 2.0).abs() < 1e-12 && (c.rhs - 2.0).abs() < 1e-12 && c.pass);
        let c = curvature_gap_check(&b, 1, &SymmetricMatrix::identity(2).scaled(0.5)).unwrap();
        assert!((c.lhs - 0.5).abs() < 1e-12 && (c.rhs - 1.0).abs() < 1e-12 && c.pass);

        let flat = SymmetricMatrix::identity(2);
        assert!(matches!(
            curvature_gap_check(&flat, 1, &SymmetricMatrix::outer(&e(2, 0)).unwrap()),
            Err(Error::ZeroEigengap { .. })
        ));
    }

    #[test]
    fn assumptions_reject_identity() {
        let a = SymmetricMatrix::identity(4);
        assert!(matches!(
            check_assumptions_a123(&a, &[0, 1, 2, 3], 2, 0.5, 64),
            Err(Error::ZeroEigengap { .. })
        ));
    }
}
