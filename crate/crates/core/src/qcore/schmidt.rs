use nalgebra::SVD;

use super::linalg::{CMatrix, CVector};
use super::{Bipartition, PartyLayout, PureState, QcoreError, RANK_TOL};

/// Schmidt form of a pure state across a bipartition:
/// `|ψ⟩ = Σ_i c_i |l_i⟩ ⊗ |r_i⟩` with `c_i` nonnegative and descending.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// Orthonormal vectors on the left factor, one per coefficient.
    pub left_vectors: Vec<CVector>,
    /// Orthonormal vectors on the right factor, one per coefficient.
    pub right_vectors: Vec<CVector>,
    left_layout: PartyLayout,
    right_layout: PartyLayout,
}

impl SchmidtDecomposition {
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    /// Rebuilds the state on the (left parties, right parties) ordering.
    pub fn reconstruct(&self) -> PureState {
        let layout = self.left_layout.concat(&self.right_layout);
        let dr = self.right_layout.total_dim();
        let mut amps = CVector::zeros(layout.total_dim());
        for ((c, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            for (a, &la) in l.iter().enumerate() {
                for (b, &rb) in r.iter().enumerate() {
                    amps[a * dr + b] += la * rb * *c;
                }
            }
        }
        PureState::from_vector(layout, amps).expect("Schmidt form reconstructs a unit vector")
    }
}

/// Schmidt decomposition across `cut`, computed by reshaping the permuted
/// amplitude vector into a left×right coefficient matrix and taking its SVD.
pub fn schmidt_decomposition(
    state: &PureState,
    cut: &Bipartition,
) -> Result<SchmidtDecomposition, QcoreError> {
    if cut.layout() != state.layout() {
        return Err(QcoreError::LayoutMismatch(
            state.layout().to_string(),
            cut.layout().to_string(),
        ));
    }
    let left = cut.left();
    let right = cut.right();
    let order: Vec<usize> = left.iter().chain(right.iter()).copied().collect();
    let permuted = state.permute_parties(&order)?;
    let left_layout = state.layout().select(&left)?;
    let right_layout = state.layout().select(&right)?;
    let (dl, dr) = (left_layout.total_dim(), right_layout.total_dim());

    let coeff = CMatrix::from_fn(dl, dr, |a, b| permuted.amplitudes()[a * dr + b]);
    let svd = SVD::new(coeff, true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");

    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("singular values are finite")
    });

    let mut coefficients = Vec::with_capacity(k);
    let mut left_vectors = Vec::with_capacity(k);
    let mut right_vectors = Vec::with_capacity(k);
    for &i in &order {
        coefficients.push(svd.singular_values[i]);
        left_vectors.push(u.column(i).into_owned());
        // M = U Σ V†, so the right Schmidt vector is row i of V† read as a ket
        right_vectors.push(v_t.row(i).transpose());
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        left_layout,
        right_layout,
    })
}

pub fn schmidt_rank(state: &PureState, cut: &Bipartition, tol: f64) -> Result<usize, QcoreError> {
    Ok(schmidt_decomposition(state, cut)?.rank(tol))
}

/// True iff the state has Schmidt rank 1 across every single-party cut.
///
/// Single-party states are product by convention.
pub fn is_fully_product(state: &PureState) -> bool {
    let n = state.layout().num_parties();
    if n == 1 {
        return true;
    }
    (0..n).all(|p| {
        let cut = Bipartition::single_party(state.layout(), p).expect("valid cut");
        schmidt_rank(state, &cut, RANK_TOL).expect("cut matches layout") == 1
    })
}
