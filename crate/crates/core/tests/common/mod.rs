#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use spca::SymmetricMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `GᵀG` for an `n × d` Gaussian `G`; PSD with rank `min(n, d)`.
pub fn random_psd(d: usize, n: usize, seed: u64) -> SymmetricMatrix {
    SymmetricMatrix::gram(&gaussian(n, d, &mut rng(seed))).unwrap()
}

pub fn random_symmetric(d: usize, seed: u64) -> SymmetricMatrix {
    let g = gaussian(d, d, &mut rng(seed));
    SymmetricMatrix::new((&g + g.transpose()) * 0.5).unwrap()
}

pub fn unit_vector(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let v: DVector<f64> = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
    v.normalize()
}

pub fn random_subset(d: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..size {
        let j = rng.random_range(i..d);
        idx.swap(i, j);
    }
    let mut s = idx[..size].to_vec();
    s.sort_unstable();
    s
}

/// Cyclic Jacobi eigenvalue iteration on a plain row-major copy; shares no
/// code with the library. Returns eigenvalues descending with eigenvectors
/// as columns.
pub fn jacobi_eigen(m: &SymmetricMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for r in 0..n {
                    let (vrp, vrq) = (v[r][p], v[r][q]);
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|r| v[r][i]).collect())
        .collect();
    (values, vectors)
}

pub fn jacobi_lambda_max(m: &SymmetricMatrix) -> f64 {
    jacobi_eigen(m).0[0]
}

/// Exhaustive support search with the Jacobi oracle; supports of size exactly
/// `min(k, d)` suffice for PSD inputs.
pub fn oracle_opt_psd(a: &SymmetricMatrix, k: usize) -> f64 {
    let d = a.dim();
    let size = k.min(d);
    let mut best = f64::NEG_INFINITY;
    let mut idx: Vec<usize> = (0..size).collect();
    'outer: loop {
        let sub = SymmetricMatrix::from_lower_fn(size, |i, j| a.get(idx[i], idx[j])).unwrap();
        best = best.max(jacobi_lambda_max(&sub));
        let mut i = size;
        while i > 0 {
            i -= 1;
            if idx[i] < i + d - size {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return best;
    }
}

pub fn e(d: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[i] = 1.0;
    v
}
