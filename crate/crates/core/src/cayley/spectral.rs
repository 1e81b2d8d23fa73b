use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::CayleyGraph;
use crate::error::{Error, Result};

/// Hard cap on the Krylov dimension.
const MAX_LANCZOS_STEPS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    /// Second-smallest eigenvalue of the normalized Laplacian `I - A/d`.
    pub lambda1: f64,
    /// Second-largest adjacency eigenvalue, `d·(1 - λ₁)`.
    pub mu2: f64,
    pub iterations: usize,
    /// Ritz residual bound on `|λ₁ - computed|`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn deflate(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

/// Largest Ritz value of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta`, and the last entry of its unit eigenvector.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (best, theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (i, v))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors[(k - 1, best)])
}

/// `λ₁` of the normalized Laplacian by Lanczos on `A/d` with full
/// reorthogonalization, deflated against constants and started from the
/// identity's indicator. Deterministic.
pub fn spectral_gap(g: &CayleyGraph, tol: f64) -> Result<SpectralGap> {
    let n = g.order();
    if n < 2 {
        return Err(Error::InvalidInput("spectral gap needs at least two vertices".into()));
    }
    let d = g.degree() as f64;
    let max_steps = (n - 1).min(MAX_LANCZOS_STEPS);
    let mut q = vec![0.0; n];
    q[0] = 1.0;
    deflate(&mut q);
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut next_check = 8usize;
    let residual = loop {
        let j = basis.len() - 1;
        let qj = &basis[j];
        let mut w = vec![0.0; n];
        for (u, wu) in w.iter_mut().enumerate() {
            *wu = g.neighbors(u).iter().map(|&v| qj[v as usize]).sum::<f64>() / d;
        }
        deflate(&mut w);
        let a = dot(qj, &w);
        alpha.push(a);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for qi in &basis {
                let c = dot(qi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let steps = alpha.len();
        // The Krylov space of a vertex-transitive graph is exhausted after as
        // many steps as there are distinct nontrivial eigenvalues.
        let breakdown = b < 1e-10;
        if breakdown || steps >= max_steps || steps >= next_check {
            let (theta, y_last) = top_ritz(&alpha, &beta);
            let residual = (b * y_last).abs();
            if residual <= tol || breakdown {
                return Ok(SpectralGap {
                    lambda1: 1.0 - theta,
                    mu2: d * theta,
                    iterations: steps,
                    residual,
                });
            }
            if steps >= max_steps {
                break residual;
            }
            next_check = (next_check + 4).max(next_check * 5 / 4);
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    };
    Err(Error::Convergence { iterations: alpha.len(), residual })
}

/// `λ₁` from a dense symmetric eigendecomposition of `A/d`; `O(n³)`, for
/// cross-checking small graphs.
pub fn dense_spectral_gap(g: &CayleyGraph) -> Result<f64> {
    let n = g.order();
    if n < 2 {
        return Err(Error::InvalidInput("spectral gap needs at least two vertices".into()));
    }
    if n > DENSE_MAX_ORDER {
        return Err(Error::Budget { what: "dense eigendecomposition".into(), needed: n as u64, limit: DENSE_MAX_ORDER as u64 });
    }
    let d = g.degree() as f64;
    let a = DMatrix::from_row_slice(n, n, &g.dense_adjacency()) / d;
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(1.0 - ev[1])
}

/// Largest order accepted by `dense_spectral_gap`.
pub const DENSE_MAX_ORDER: usize = 2000;
