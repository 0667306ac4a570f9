use num_complex::Complex64;

use super::linalg::{hermitian_eigen, hermiticity_residual, min_eigenvalue, trace, CMatrix};
use super::{PartyLayout, PureState, QcoreError, TOL};

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: PartyLayout,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(layout: PartyLayout, matrix: CMatrix) -> Result<Self, QcoreError> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QcoreError::ShapeMismatch {
                got_rows: matrix.nrows(),
                got_cols: matrix.ncols(),
                rows: d,
                cols: d,
            });
        }
        let herm = hermiticity_residual(&matrix);
        if herm > TOL {
            return Err(QcoreError::NotHermitian(herm));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(QcoreError::BadTrace(tr.re));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -TOL {
            return Err(QcoreError::NotPositive(min_eig));
        }
        Ok(Self { layout, matrix })
    }

    /// Used internally where validity holds by construction.
    pub(crate) fn new_unchecked(layout: PartyLayout, matrix: CMatrix) -> Self {
        Self { layout, matrix }
    }

    /// Convex mixture `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self, QcoreError> {
        let layout = components
            .first()
            .map(|(_, s)| s.layout().clone())
            .ok_or(QcoreError::EmptyLayout)?;
        let d = layout.total_dim();
        let mut matrix = CMatrix::zeros(d, d);
        for (p, state) in components {
            if state.layout() != &layout {
                return Err(QcoreError::LayoutMismatch(
                    layout.to_string(),
                    state.layout().to_string(),
                ));
            }
            matrix += (state.amplitudes() * state.amplitudes().adjoint()).scale(*p);
        }
        Self::new(layout, matrix)
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.matrix)
    }

    /// Eigenvalues (descending) and matching eigenvector columns.
    pub fn eigendecomposition(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigen(&self.matrix)
    }

    /// Traces out every party not listed in `keep`.
    ///
    /// The kept factors appear in ascending party order; tracing nothing out
    /// returns the operator unchanged.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator, QcoreError> {
        let n = self.layout.num_parties();
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() || kept.iter().any(|&p| p >= n) {
            return Err(QcoreError::BadKeepSet);
        }
        if kept.len() == n {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
        let keep_layout = self.layout.select(&kept)?;
        let dk = keep_layout.total_dim();
        let dt: usize = traced.iter().map(|&p| self.layout.dims()[p]).product();

        // global digits assembled from (kept digits, traced digits)
        let assemble = |kd: &[usize], td: &[usize]| -> usize {
            let mut digits = vec![0; n];
            for (i, &p) in kept.iter().enumerate() {
                digits[p] = kd[i];
            }
            for (i, &p) in traced.iter().enumerate() {
                digits[p] = td[i];
            }
            self.layout.index_of(&digits)
        };
        let traced_layout_dims: Vec<usize> =
            traced.iter().map(|&p| self.layout.dims()[p]).collect();
        let traced_digits: Vec<Vec<usize>> = (0..dt)
            .map(|g| {
                let mut digits = vec![0; traced.len()];
                let mut rem = g;
                for (k, &d) in traced_layout_dims.iter().enumerate().rev() {
                    digits[k] = rem % d;
                    rem /= d;
                }
                digits
            })
            .collect();

        let mut out = CMatrix::zeros(dk, dk);
        for row in 0..dk {
            let row_digits = keep_layout.digits_of(row);
            for col in 0..dk {
                let col_digits = keep_layout.digits_of(col);
                let mut sum = Complex64::new(0.0, 0.0);
                for td in &traced_digits {
                    sum += self.matrix[(assemble(&row_digits, td), assemble(&col_digits, td))];
                }
                out[(row, col)] = sum;
            }
        }
        Ok(DensityOperator::new_unchecked(keep_layout, out))
    }
}
