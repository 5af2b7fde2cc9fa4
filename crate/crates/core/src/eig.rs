//! Dense Hermitian eigensolvers, ascending eigenvalue order.

use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::{CMatrix, C64};

fn failed(n: usize) -> Error {
    Error::Convergence {
        residual: f64::INFINITY,
        tolerance: n as f64 * f64::EPSILON,
    }
}

/// Eigenvalues ascending, eigenvectors as matching columns.
pub(crate) fn real_symmetric(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| failed(n))?;
    let (s, u) = (evd.S(), evd.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let values = order.iter().map(|&k| s[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| u[(i, order[k])]);
    Ok((values, vectors))
}

/// Complex Hermitian counterpart of [`real_symmetric`].
pub(crate) fn hermitian(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let a = Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| failed(n))?;
    let (s, u) = (evd.S(), evd.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].re.total_cmp(&s[y].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| {
        let z = u[(i, order[k])];
        C64::new(z.re, z.im)
    });
    Ok((values, vectors))
}
