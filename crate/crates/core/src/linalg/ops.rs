use nalgebra::{DMatrix, DVector};

use super::eigen::{full_eigendecomposition, spectral_norm};
use super::matrix::SymmetricMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of magnitude at most `PSD_CLAMP_REL · ‖W‖₂` are treated as zero.
pub const PSD_CLAMP_REL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    EntryL1,
    EntryInf,
    Frobenius,
    Spectral,
}

pub fn matrix_norm(m: &SymmetricMatrix, kind: NormKind) -> f64 {
    let a = m.as_matrix();
    match kind {
        NormKind::EntryL1 => a.iter().map(|x| x.abs()).sum(),
        NormKind::EntryInf => a.amax(),
        NormKind::Frobenius => a.norm(),
        NormKind::Spectral => spectral_norm(m),
    }
}

/// Principal square root of a PSD matrix.
pub fn matrix_sqrt(w: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let pairs = full_eigendecomposition(w)?;
    let d = w.dim();
    if d == 0 {
        return Ok(SymmetricMatrix::zeros(0));
    }
    let scale = pairs.iter().map(|p| p.value.abs()).fold(0.0_f64, f64::max);
    let min = pairs.last().map(|p| p.value).unwrap_or(0.0);
    if min < -PSD_CLAMP_REL * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let mut y = DMatrix::zeros(d, d);
    for p in &pairs {
        if p.value > PSD_CLAMP_REL * scale {
            let s = p.value.sqrt();
            y.ger(s, &p.vector, &p.vector, 1.0);
        }
    }
    let y = (&y + y.transpose()) * 0.5;
    Ok(SymmetricMatrix::from_symmetric_unchecked(y))
}

/// Checks that `s` is a nonempty, strictly increasing list of indices below `dim`.
pub fn validate_index_set(s: &[usize], dim: usize) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    for (pos, &i) in s.iter().enumerate() {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        if pos > 0 && s[pos - 1] >= i {
            return Err(Error::UnsortedOrDuplicateIndex { index: i });
        }
    }
    Ok(())
}

/// `M_{S,S}` for a 0-based ascending index set `S`.
pub fn principal_submatrix(m: &SymmetricMatrix, s: &[usize]) -> Result<SymmetricMatrix> {
    validate_index_set(s, m.dim())?;
    let a = m.as_matrix();
    let sub = DMatrix::from_fn(s.len(), s.len(), |i, j| a[(s[i], s[j])]);
    Ok(SymmetricMatrix::from_symmetric_unchecked(sub))
}

/// Embeds `y` (indexed by `s`) into a zero vector of length `dim`.
pub fn embed(y: &DVector<f64>, s: &[usize], dim: usize) -> DVector<f64> {
    let mut z = DVector::zeros(dim);
    for (pos, &i) in s.iter().enumerate() {
        z[i] = y[pos];
    }
    z
}
