use std::fmt;

use num_complex::Complex64;

use super::linalg::CVector;
use super::state::tensor;
use super::{PartyLayout, PureState, QcoreError};

/// States referenced throughout the crate by name rather than by amplitude
/// list. Conventions are bit-exact: φ± = (|00⟩ ± |11⟩)/√2 and
/// ψ± = (|01⟩ ± |10⟩)/√2 on a pair of qubits, ψ4 = (|01⟩ − |10⟩ + |22⟩)/√3 on
/// a pair of qutrits, and η1..η4 are the four Bell states embedded on levels
/// {0,1} of a qutrit pair with η5 = |22⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
    /// Computational basis state by global index.
    Basis(usize),
    Psi4,
    /// η1..η5, indexed from 1.
    Eta(usize),
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::PhiPlus => write!(f, "phi_plus"),
            NamedState::PhiMinus => write!(f, "phi_minus"),
            NamedState::PsiPlus => write!(f, "psi_plus"),
            NamedState::PsiMinus => write!(f, "psi_minus"),
            NamedState::Basis(i) => write!(f, "basis({i})"),
            NamedState::Psi4 => write!(f, "psi4"),
            NamedState::Eta(k) => write!(f, "eta({k})"),
        }
    }
}

fn sparse_state(layout: PartyLayout, entries: &[(usize, f64)]) -> Result<PureState, QcoreError> {
    let mut amps = CVector::zeros(layout.total_dim());
    for &(index, value) in entries {
        amps[index] = Complex64::new(value, 0.0);
    }
    PureState::from_vector(layout, amps)
}

/// Builds a named state on the given layout.
///
/// Bell states require a (2,2) layout; ψ4 and the η family require (3,3);
/// basis states accept any layout.
pub fn named_state(name: NamedState, layout: &PartyLayout) -> Result<PureState, QcoreError> {
    let incompatible = || QcoreError::IncompatibleLayout {
        name: name.to_string(),
        layout: layout.to_string(),
    };
    let inv_sqrt2 = 0.5_f64.sqrt();
    match name {
        NamedState::PhiPlus | NamedState::PhiMinus | NamedState::PsiPlus | NamedState::PsiMinus => {
            if layout.dims() != [2, 2] {
                return Err(incompatible());
            }
            let entries = match name {
                NamedState::PhiPlus => [(0, inv_sqrt2), (3, inv_sqrt2)],
                NamedState::PhiMinus => [(0, inv_sqrt2), (3, -inv_sqrt2)],
                NamedState::PsiPlus => [(1, inv_sqrt2), (2, inv_sqrt2)],
                NamedState::PsiMinus => [(1, inv_sqrt2), (2, -inv_sqrt2)],
                _ => unreachable!(),
            };
            sparse_state(layout.clone(), &entries)
        }
        NamedState::Basis(index) => PureState::basis_index(layout.clone(), index),
        NamedState::Psi4 => {
            if layout.dims() != [3, 3] {
                return Err(incompatible());
            }
            let inv_sqrt3 = (1.0_f64 / 3.0).sqrt();
            sparse_state(
                layout.clone(),
                &[(1, inv_sqrt3), (3, -inv_sqrt3), (8, inv_sqrt3)],
            )
        }
        NamedState::Eta(k) => {
            if layout.dims() != [3, 3] {
                return Err(incompatible());
            }
            // qutrit-pair indices: |ab⟩ sits at 3a+b
            let entries: &[(usize, f64)] = match k {
                1 => &[(0, inv_sqrt2), (4, inv_sqrt2)],
                2 => &[(0, inv_sqrt2), (4, -inv_sqrt2)],
                3 => &[(1, inv_sqrt2), (3, inv_sqrt2)],
                4 => &[(1, inv_sqrt2), (3, -inv_sqrt2)],
                5 => &[(8, 1.0)],
                _ => return Err(QcoreError::UnknownState(name.to_string())),
            };
            sparse_state(layout.clone(), entries)
        }
    }
}

/// Maximally entangled state pairing consecutive parties (2k, 2k+1):
/// the tensor product over pairs of (1/√d_k) Σ_l |l⟩|l⟩.
///
/// Requires an even number of parties with matching dimensions inside each
/// pair. Across the even-vs-odd party bipartition this is maximally
/// entangled with d_1⋯d_n equal Schmidt coefficients.
pub fn phi_plus(layout: &PartyLayout) -> Result<PureState, QcoreError> {
    let n = layout.num_parties();
    if !n.is_multiple_of(2) {
        return Err(QcoreError::UnpairedLayout { parties: n });
    }
    let mut state: Option<PureState> = None;
    for pair in 0..n / 2 {
        let (left, right) = (layout.dims()[2 * pair], layout.dims()[2 * pair + 1]);
        if left != right {
            return Err(QcoreError::PairDimensionMismatch { pair, left, right });
        }
        let d = left;
        let pair_layout = PartyLayout::new(vec![d, d])?;
        let weight = 1.0 / (d as f64).sqrt();
        let entries: Vec<(usize, f64)> = (0..d).map(|l| (l * d + l, weight)).collect();
        let pair_state = sparse_state(pair_layout, &entries)?;
        state = Some(match state {
            None => pair_state,
            Some(s) => tensor(&s, &pair_state),
        });
    }
    Ok(state.expect("layout has at least one pair"))
}
