use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense complex matrix used for operators, effects, and Kraus elements.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector used for amplitude storage.
pub type CVector = DVector<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Kronecker product with the left factor most significant.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Frobenius inner product `tr(a† b)`.
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `m − m†` in absolute value.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_residual(m) <= tol
}

pub fn is_psd(m: &CMatrix, tol: f64) -> bool {
    is_hermitian(m, tol) && min_eigenvalue(m) >= -tol
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - identity(n))) <= tol
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// Returns the real eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors. The input is symmetrized first so that callers
/// may pass matrices carrying roundoff-level Hermiticity error.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(m.is_square(), "hermitian_eigen requires a square matrix");
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.last().copied().unwrap_or(f64::NAN)
}

/// Positive-semidefinite square root of a Hermitian PSD matrix.
///
/// Eigenvalues within roundoff below zero are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    apply_spectral(&values, &vectors, |lambda| lambda.max(0.0).sqrt())
}

/// Base-2 matrix logarithm restricted to the support of `m`.
///
/// Eigenvalues at or below `cutoff` are treated as exactly zero and mapped to
/// zero instead of −∞, so the result acts as `log₂` on the support and
/// annihilates the kernel.
pub fn matrix_log2_on_support(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    apply_spectral(&values, &vectors, |lambda| {
        if lambda > cutoff {
            lambda.log2()
        } else {
            0.0
        }
    })
}

fn apply_spectral(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = values.len();
    let mut out = CMatrix::zeros(n, n);
    for (i, &lambda) in values.iter().enumerate() {
        let fl = f(lambda);
        if fl != 0.0 {
            let v = vectors.column(i);
            let proj = v * v.adjoint();
            out += proj.scale(fl);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn eigen_sorts_descending_and_reconstructs() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        let (values, vectors) = hermitian_eigen(&m);
        assert!((values[0] - 2.0).abs() < 1e-12);
        assert!(values[1].abs() < 1e-12);
        let mut rec = CMatrix::zeros(2, 2);
        for (i, &lambda) in values.iter().enumerate() {
            let v = vectors.column(i);
            rec += (v * v.adjoint()).scale(lambda);
        }
        assert!(max_abs(&(rec - m)) < 1e-10);
    }

    #[test]
    fn sqrt_squares_back() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.5), c(1.0, -0.5), c(3.0, 0.0)]);
        let h = &m * m.adjoint();
        let r = psd_sqrt(&h);
        assert!(max_abs(&(&r * &r - h)) < 1e-9);
        assert!(is_psd(&r, 1e-9));
    }

    #[test]
    fn log_on_support_kills_kernel() {
        // rank-1 projector scaled by 4: log2 has a single eigenvalue 2
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let m = (&v * v.adjoint()).scale(4.0);
        let l = matrix_log2_on_support(&m, 1e-10);
        assert!((l[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!(l[(1, 1)].norm() < 1e-12);
    }
}
