//! Dense complex linear algebra for the 2^n-dimensional spin Hilbert space.
//!
//! Everything here operates on square `Array2<C64>` matrices. The only
//! nontrivial routine is [`eigh`], a thin wrapper over LAPACK's divide and
//! conquer Hermitian eigensolver; the propagation loop in [`crate::dynamics`]
//! calls it once per time step, so it is the hot path of the whole simulator.

use ndarray::{Array1, Array2, ShapeBuilder};
use num_complex::Complex64;
use std::os::raw::c_char;
use thiserror::Error;

/// Complex double, the scalar type of all matrices in this crate.
pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigensolver failed, LAPACK zheevd info = {0}")]
    EigFailed(i32),
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns the eigenvalues in ascending order and the unitary whose column
/// `j` is the eigenvector of eigenvalue `j`. Only the lower triangle of `m`
/// is referenced.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>), LinalgError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    let n = rows;
    // LAPACK wants column-major storage; iterating the transpose in row
    // order produces exactly that.
    let mut a: Vec<C64> = m.t().iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let lwork = (2 * n + n * n) as i32;
    let lrwork = (1 + 5 * n + 2 * n * n) as i32;
    let liwork = (3 + 5 * n) as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    let mut rwork = vec![0.0f64; lrwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    let mut info = 0i32;
    let n_i32 = n as i32;
    unsafe {
        lapack_sys::zheevd_(
            &(b'V' as c_char),
            &(b'L' as c_char),
            &n_i32,
            a.as_mut_ptr() as *mut _,
            &n_i32,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(LinalgError::EigFailed(info));
    }
    let vecs = Array2::from_shape_vec((n, n).f(), a).expect("eigenvector buffer has n*n entries");
    Ok((Array1::from(w), vecs))
}

/// Conjugate transpose.
pub fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Matrix trace.
pub fn trace(m: &Array2<C64>) -> C64 {
    m.diag().sum()
}

/// Largest entry magnitude.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Induced infinity norm (maximum absolute row sum).
pub fn inf_norm(m: &Array2<C64>) -> f64 {
    m.rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖U†U − 1‖∞, zero for an exactly unitary matrix.
pub fn unitarity_defect(u: &Array2<C64>) -> f64 {
    let mut g = adjoint(u).dot(u);
    for i in 0..g.nrows() {
        g[(i, i)] -= C64::new(1.0, 0.0);
    }
    inf_norm(&g)
}

/// ‖M − M†‖∞, zero for an exactly Hermitian matrix.
pub fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    inf_norm(&(m - &adjoint(m)))
}
