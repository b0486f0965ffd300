//! Small dense helpers shared by the kernel, regularizer and solver modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest absolute asymmetry `|m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Rejects non-square input and input whose asymmetry exceeds `1e-12`
/// relative to the largest entry (floored at 1).
pub fn ensure_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let deviation = asymmetry(m);
    if deviation > 1e-12 * scale {
        return Err(Error::Asymmetric { deviation });
    }
    Ok(())
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
pub struct SortedEigen {
    pub values: DVector<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<f64>,
}

pub fn sorted_eigen(m: &DMatrix<f64>) -> SortedEigen {
    let n = m.nrows();
    if n == 0 {
        return SortedEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SortedEigen { values, vectors }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Minimum-norm solution of `m x = rhs` for symmetric PSD `m`, dropping
/// eigenvalues below `rel_tol * λ_max`.
pub fn psd_pseudo_solve(m: &DMatrix<f64>, rhs: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    let eig = sorted_eigen(m);
    let n = m.nrows();
    let lambda_max = eig.values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = rel_tol * lambda_max;
    let mut x = DVector::zeros(n);
    for k in 0..n {
        let lam = eig.values[k];
        if lam > cutoff {
            let q = eig.vectors.column(k);
            let coef = q.dot(rhs) / lam;
            x.axpy(coef, &q, 1.0);
        }
    }
    x
}
