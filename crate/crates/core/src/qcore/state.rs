use num_complex::Complex64;

use super::linalg::{CMatrix, CVector};
use super::{DensityOperator, PartyLayout, QcoreError, TOL};

/// A normalized pure state over a [`PartyLayout`].
///
/// Amplitudes are stored against the layout's row-major global index, party 0
/// most significant. Equality of states is amplitude-wise; no global-phase
/// quotient is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: PartyLayout,
    amplitudes: CVector,
}

impl PureState {
    /// Builds a state from raw amplitudes, checking length and normalization.
    pub fn new(layout: PartyLayout, amplitudes: Vec<Complex64>) -> Result<Self, QcoreError> {
        Self::from_vector(layout, CVector::from_vec(amplitudes))
    }

    pub fn from_vector(layout: PartyLayout, amplitudes: CVector) -> Result<Self, QcoreError> {
        let expected = layout.total_dim();
        if amplitudes.len() != expected {
            return Err(QcoreError::LengthMismatch {
                got: amplitudes.len(),
                expected,
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(QcoreError::NotNormalized { norm, tol: TOL });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Normalizes the given amplitudes and builds the state.
    pub fn normalized(layout: PartyLayout, amplitudes: CVector) -> Result<Self, QcoreError> {
        let norm = amplitudes.norm();
        if norm <= TOL {
            return Err(QcoreError::NotNormalized { norm, tol: TOL });
        }
        Self::from_vector(layout, amplitudes.unscale(norm))
    }

    /// Computational basis state `|i_0 i_1 … i_{n-1}⟩`.
    pub fn basis(layout: PartyLayout, digits: &[usize]) -> Result<Self, QcoreError> {
        if digits.len() != layout.num_parties() {
            return Err(QcoreError::LengthMismatch {
                got: digits.len(),
                expected: layout.num_parties(),
            });
        }
        for (p, (&i, &d)) in digits.iter().zip(layout.dims()).enumerate() {
            if i >= d {
                return Err(QcoreError::PartyOutOfRange {
                    party: p,
                    parties: d,
                });
            }
        }
        let mut amps = CVector::zeros(layout.total_dim());
        amps[layout.index_of(digits)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout,
            amplitudes: amps,
        })
    }

    /// Basis state addressed by its global index.
    pub fn basis_index(layout: PartyLayout, index: usize) -> Result<Self, QcoreError> {
        let d = layout.total_dim();
        if index >= d {
            return Err(QcoreError::LengthMismatch {
                got: index,
                expected: d,
            });
        }
        let mut amps = CVector::zeros(d);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout,
            amplitudes: amps,
        })
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Density operator `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityOperator {
        let m: CMatrix = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator::new_unchecked(self.layout.clone(), m)
    }

    /// Entrywise distance `max_i |a_i − b_i|`.
    pub fn max_amplitude_distance(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &PureState, tol: f64) -> bool {
        self.layout == other.layout && self.max_amplitude_distance(other) <= tol
    }

    /// Reorders the parties so that new party `m` is old party `order[m]`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<PureState, QcoreError> {
        let n = self.layout.num_parties();
        let mut seen = vec![false; n];
        for &p in order {
            if p >= n || seen[p] {
                return Err(QcoreError::BadPermutation(order.to_vec()));
            }
            seen[p] = true;
        }
        if order.len() != n {
            return Err(QcoreError::BadPermutation(order.to_vec()));
        }
        let new_layout = self.layout.select(order)?;
        let mut amps = CVector::zeros(self.amplitudes.len());
        for g in 0..self.amplitudes.len() {
            let digits = self.layout.digits_of(g);
            let new_digits: Vec<usize> = order.iter().map(|&p| digits[p]).collect();
            amps[new_layout.index_of(&new_digits)] = self.amplitudes[g];
        }
        Ok(PureState {
            layout: new_layout,
            amplitudes: amps,
        })
    }
}

/// Tensor product: the result lives on the concatenated layout and its
/// amplitudes are the Kronecker product of the inputs'.
pub fn tensor(a: &PureState, b: &PureState) -> PureState {
    let layout = a.layout().concat(b.layout());
    let mut amps = CVector::zeros(layout.total_dim());
    let nb = b.amplitudes().len();
    for (i, &ai) in a.amplitudes().iter().enumerate() {
        for (j, &bj) in b.amplitudes().iter().enumerate() {
            amps[i * nb + j] = ai * bj;
        }
    }
    PureState {
        layout,
        amplitudes: amps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::named::{named_state, NamedState};

    fn qubit(a0: f64, a1: f64) -> PureState {
        let layout = PartyLayout::new(vec![2]).unwrap();
        PureState::normalized(
            layout,
            CVector::from_vec(vec![Complex64::new(a0, 0.0), Complex64::new(a1, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn tensor_of_basis_states_is_basis_state() {
        let zero = qubit(1.0, 0.0);
        let one = qubit(0.0, 1.0);
        let prod = tensor(&zero, &one);
        assert_eq!(prod.layout().dims(), &[2, 2]);
        // |01⟩ sits at global index 1
        assert!((prod.amplitudes()[1].re - 1.0).abs() < 1e-15);
        assert!((prod.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_preserves_norm() {
        let a = qubit(0.6, 0.8);
        let b = qubit(0.8, -0.6);
        assert!((tensor(&a, &b).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let layout = PartyLayout::new(vec![2]).unwrap();
        let err = PureState::new(
            layout,
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        assert!(matches!(err, Err(QcoreError::NotNormalized { .. })));
    }

    #[test]
    fn permute_swaps_bell_components() {
        let layout = PartyLayout::new(vec![2, 2]).unwrap();
        let psi_plus = named_state(NamedState::PsiPlus, &layout).unwrap();
        let swapped = psi_plus.permute_parties(&[1, 0]).unwrap();
        // ψ+ is symmetric under swapping the parties
        assert!(swapped.approx_eq(&psi_plus, 1e-12));

        let zero_one = PureState::basis(layout, &[0, 1]).unwrap();
        let one_zero = zero_one.permute_parties(&[1, 0]).unwrap();
        assert!((one_zero.amplitudes()[2].re - 1.0).abs() < 1e-15);
    }
}
