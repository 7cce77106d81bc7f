mod eigen;
mod matrix;
mod ops;
mod projection;

pub use eigen::{
    eigenvalues, fix_sign, full_eigendecomposition, full_eigendecomposition_with_cap, is_psd,
    lanczos_top_eigpair, min_eigenvalue, spectral_norm, top_eigpair, EigenPair, DEFAULT_EIG_TOL,
    DENSE_CAP, DENSE_DISPATCH_DIM,
};
pub use matrix::{SymmetricMatrix, SYMMETRY_TOL};
pub use ops::{
    embed, matrix_norm, matrix_sqrt, principal_submatrix, validate_index_set, NormKind,
    PSD_CLAMP_REL,
};
pub use projection::{project_l1_ball, project_l1_ball_in_place};

/// `λ_max(A_{S,S})` with its unit eigenvector embedded in `R^d`.
pub fn top_of_block(
    a: &SymmetricMatrix,
    s: &[usize],
) -> crate::Result<(f64, nalgebra::DVector<f64>)> {
    let sub = principal_submatrix(a, s)?;
    let p = top_eigpair(&sub, DEFAULT_EIG_TOL, 0)?;
    Ok((p.value, embed(&p.vector, s, a.dim())))
}
