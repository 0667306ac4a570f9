//! Effects, POVMs, and Kraus instruments on a single party's factor, with
//! embedding into the global space and Born-rule evaluation.
//!
//! A [`Povm`] captures outcome statistics only; an [`Instrument`] refines it
//! with Kraus operators so post-measurement states can be carried through
//! later protocol rounds. The refinement of choice is the PSD square root
//! `K = √E`, which is observationally equivalent for everything downstream
//! because outcome statistics and orthogonality constraints depend on `K†K`
//! alone.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::qcore::{
    dagger, hermitian_eigen, hermiticity_residual, identity, kron, max_abs, psd_sqrt, CMatrix,
    CVector, PartyLayout, PureState, QcoreError, TOL,
};

/// Branches whose probability is at or below this threshold are treated as
/// never occurring: no post-measurement state is produced for them.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("operator is {got}x{got_cols}, expected square of dimension {expected}")]
    OperatorShape {
        got: usize,
        got_cols: usize,
        expected: usize,
    },
    #[error("effect is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("effect has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("effect has eigenvalue {0} exceeding 1")]
    ExceedsIdentity(f64),
    #[error("POVM must contain at least one effect")]
    EmptyPovm,
    #[error("effects mix dimensions {0} and {1}")]
    MixedDimensions(usize, usize),
    #[error("{kraus} Kraus operators given {labels} labels")]
    LabelCount { kraus: usize, labels: usize },
    #[error("Kraus operators are not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),
}

/// A single measurement effect: a Hermitian PSD operator with spectrum in
/// [0, 1], up to tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    operator: CMatrix,
}

impl Effect {
    pub fn new(operator: CMatrix) -> Result<Self, MeasureError> {
        if operator.nrows() != operator.ncols() {
            return Err(MeasureError::OperatorShape {
                got: operator.nrows(),
                got_cols: operator.ncols(),
                expected: operator.nrows(),
            });
        }
        let residual = hermiticity_residual(&operator);
        if residual > TOL {
            return Err(MeasureError::NotHermitian(residual));
        }
        let (eigenvalues, _) = hermitian_eigen(&operator);
        let max = eigenvalues.first().copied().unwrap_or(0.0);
        let min = eigenvalues.last().copied().unwrap_or(0.0);
        if min < -TOL {
            return Err(MeasureError::NotPositive(min));
        }
        if max > 1.0 + TOL {
            return Err(MeasureError::ExceedsIdentity(max));
        }
        Ok(Effect { operator })
    }

    pub fn dim(&self) -> usize {
        self.operator.nrows()
    }

    pub fn operator(&self) -> &CMatrix {
        &self.operator
    }
}

/// An ordered list of effects intended to sum to the identity.
///
/// Construction checks only shape agreement; completeness and positivity are
/// the business of [`validate_povm`], which reports rather than rejects, so
/// that malformed POVMs can be diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<CMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self, MeasureError> {
        let dim = match effects.first() {
            None => return Err(MeasureError::EmptyPovm),
            Some(e) => e.nrows(),
        };
        for e in &effects {
            if e.nrows() != e.ncols() {
                return Err(MeasureError::OperatorShape {
                    got: e.nrows(),
                    got_cols: e.ncols(),
                    expected: dim,
                });
            }
            if e.nrows() != dim {
                return Err(MeasureError::MixedDimensions(dim, e.nrows()));
            }
        }
        Ok(Povm { effects })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Named invariant that a POVM failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmViolation {
    Hermiticity,
    Positivity,
    EffectExceedsIdentity,
    Completeness,
}

impl std::fmt::Display for PovmViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PovmViolation::Hermiticity => write!(f, "hermiticity"),
            PovmViolation::Positivity => write!(f, "positivity"),
            PovmViolation::EffectExceedsIdentity => write!(f, "effect exceeds identity"),
            PovmViolation::Completeness => write!(f, "completeness"),
        }
    }
}

/// Certificate produced by [`validate_povm`]: the measured residuals plus the
/// list of violated invariants (empty for a valid POVM).
#[derive(Debug, Clone, PartialEq)]
pub struct PovmValidation {
    /// Max Hermiticity residual over effects.
    pub hermiticity_residual: f64,
    /// Min eigenvalue over all effects.
    pub min_eigenvalue: f64,
    /// Max eigenvalue over all effects.
    pub max_eigenvalue: f64,
    /// Max-abs entry of Σ effects − I.
    pub completeness_residual: f64,
    pub violations: Vec<PovmViolation>,
}

impl PovmValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks Hermiticity, positivity, the spectrum bound, and completeness of a
/// POVM, reporting residuals instead of erroring.
pub fn validate_povm(povm: &Povm) -> PovmValidation {
    let dim = povm.dim();
    let mut hermiticity = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    let mut max_eig = f64::NEG_INFINITY;
    let mut sum = CMatrix::zeros(dim, dim);
    for e in povm.effects() {
        hermiticity = hermiticity.max(hermiticity_residual(e));
        let (eigenvalues, _) = hermitian_eigen(e);
        max_eig = max_eig.max(eigenvalues.first().copied().unwrap_or(0.0));
        min_eig = min_eig.min(eigenvalues.last().copied().unwrap_or(0.0));
        sum += e;
    }
    let completeness = max_abs(&(sum - identity(dim)));
    let mut violations = Vec::new();
    if hermiticity > TOL {
        violations.push(PovmViolation::Hermiticity);
    }
    if min_eig < -TOL {
        violations.push(PovmViolation::Positivity);
    }
    if max_eig > 1.0 + TOL {
        violations.push(PovmViolation::EffectExceedsIdentity);
    }
    if completeness > TOL {
        violations.push(PovmViolation::Completeness);
    }
    PovmValidation {
        hermiticity_residual: hermiticity,
        min_eigenvalue: min_eig,
        max_eigenvalue: max_eig,
        completeness_residual: completeness,
        violations,
    }
}

/// Pauli measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// A trace-preserving measurement with labeled outcomes and Kraus operators,
/// so each branch yields a post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    kraus: Vec<CMatrix>,
    labels: Vec<String>,
}

impl Instrument {
    /// Builds an instrument from explicit Kraus operators; requires
    /// Σ K†K = I within tolerance.
    pub fn new(kraus: Vec<CMatrix>, labels: Vec<String>) -> Result<Self, MeasureError> {
        let dim = match kraus.first() {
            None => return Err(MeasureError::EmptyPovm),
            Some(k) => k.nrows(),
        };
        if kraus.len() != labels.len() {
            return Err(MeasureError::LabelCount {
                kraus: kraus.len(),
                labels: labels.len(),
            });
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &kraus {
            if k.nrows() != k.ncols() || k.nrows() != dim {
                return Err(MeasureError::OperatorShape {
                    got: k.nrows(),
                    got_cols: k.ncols(),
                    expected: dim,
                });
            }
            sum += dagger(k) * k;
        }
        let residual = max_abs(&(sum - identity(dim)));
        if residual > TOL {
            return Err(MeasureError::NotTracePreserving(residual));
        }
        Ok(Instrument { kraus, labels })
    }

    /// Kraus refinement of a POVM via the PSD square root of each effect.
    /// The POVM must validate cleanly.
    pub fn from_povm(povm: &Povm, labels: Vec<String>) -> Result<Self, MeasureError> {
        let validation = validate_povm(povm);
        if let Some(v) = validation.violations.first() {
            return Err(match v {
                PovmViolation::Hermiticity => {
                    MeasureError::NotHermitian(validation.hermiticity_residual)
                }
                PovmViolation::Positivity => MeasureError::NotPositive(validation.min_eigenvalue),
                PovmViolation::EffectExceedsIdentity => {
                    MeasureError::ExceedsIdentity(validation.max_eigenvalue)
                }
                PovmViolation::Completeness => {
                    MeasureError::NotTracePreserving(validation.completeness_residual)
                }
            });
        }
        let kraus = povm.effects().iter().map(psd_sqrt).collect();
        Instrument::new(kraus, labels)
    }

    /// Two-outcome projective measurement onto the ±1 eigenspaces of the
    /// named Pauli, with outcome labels "+1" and "-1".
    pub fn pauli(axis: Axis) -> Instrument {
        let half = Complex64::new(0.5, 0.0);
        let sigma = match axis {
            Axis::X => CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ],
            ),
            Axis::Y => CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, -1.0),
                    Complex64::new(0.0, 1.0),
                    Complex64::new(0.0, 0.0),
                ],
            ),
            Axis::Z => CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(-1.0, 0.0),
                ],
            ),
        };
        let plus = (identity(2) + &sigma) * half;
        let minus = (identity(2) - &sigma) * half;
        Instrument::new(vec![plus, minus], vec!["+1".into(), "-1".into()])
            .expect("Pauli eigenprojectors are complete")
    }

    /// Projective instrument clicking on each of the given orthonormal
    /// vectors (labels "p1", "p2", …), with a final "rest" outcome on the
    /// orthogonal complement. The "rest" outcome is omitted when the vectors
    /// already span the space.
    pub fn rank_one_projectors(vectors: &[CVector], dim: usize) -> Result<Self, MeasureError> {
        if vectors.is_empty() {
            return Err(MeasureError::EmptyPovm);
        }
        let mut kraus = Vec::with_capacity(vectors.len() + 1);
        let mut labels = Vec::with_capacity(vectors.len() + 1);
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(MeasureError::OperatorShape {
                    got: v.len(),
                    got_cols: 1,
                    expected: dim,
                });
            }
            let projector = CMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj());
            sum += &projector;
            kraus.push(projector);
            labels.push(format!("p{}", i + 1));
        }
        let rest = identity(dim) - sum;
        if max_abs(&rest) > TOL {
            // the complement carries weight: keep it as an explicit outcome
            kraus.push(psd_sqrt(&rest));
            labels.push("rest".into());
        }
        Instrument::new(kraus, labels)
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Lifts a single-party operator to the full space: I ⊗ … ⊗ op ⊗ … ⊗ I in
/// layout order.
pub fn embed_local(
    op: &CMatrix,
    party: usize,
    layout: &PartyLayout,
) -> Result<CMatrix, MeasureError> {
    let d = layout.dim_of(party)?;
    if op.nrows() != d || op.ncols() != d {
        return Err(MeasureError::OperatorShape {
            got: op.nrows(),
            got_cols: op.ncols(),
            expected: d,
        });
    }
    let pre: usize = layout.dims()[..party].iter().product();
    let post: usize = layout.dims()[party + 1..].iter().product();
    Ok(kron(&kron(&identity(pre), op), &identity(post)))
}

/// Applies a single-party operator to a global amplitude vector without
/// materializing the embedded matrix.
pub fn apply_local(
    op: &CMatrix,
    party: usize,
    layout: &PartyLayout,
    amplitudes: &CVector,
) -> Result<CVector, MeasureError> {
    let d = layout.dim_of(party)?;
    if op.nrows() != d || op.ncols() != d {
        return Err(MeasureError::OperatorShape {
            got: op.nrows(),
            got_cols: op.ncols(),
            expected: d,
        });
    }
    let pre: usize = layout.dims()[..party].iter().product();
    let post: usize = layout.dims()[party + 1..].iter().product();
    let mut out = CVector::zeros(amplitudes.len());
    for a in 0..pre {
        for c in 0..post {
            let base = a * d * post + c;
            for i in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    acc += op[(i, j)] * amplitudes[base + j * post];
                }
                out[base + i * post] = acc;
            }
        }
    }
    Ok(out)
}

/// One outcome of a Born-rule evaluation: its label, its probability, and the
/// normalized post-measurement state (absent for branches at or below
/// [`PRUNE_TOL`]).
#[derive(Debug, Clone)]
pub struct BornBranch {
    pub label: String,
    pub probability: f64,
    pub post_state: Option<PureState>,
}

/// Evaluates an instrument at one party of a pure state: for each Kraus
/// operator K, probability ‖embed(K)|ψ⟩‖² and post state embed(K)|ψ⟩/√p.
/// Probabilities sum to 1 within tolerance by trace preservation.
pub fn born_probabilities(
    instrument: &Instrument,
    party: usize,
    state: &PureState,
) -> Result<Vec<BornBranch>, MeasureError> {
    let mut branches = Vec::with_capacity(instrument.len());
    for (k, label) in instrument.kraus().iter().zip(instrument.labels()) {
        let unnormalized = apply_local(k, party, state.layout(), state.amplitudes())?;
        let probability = unnormalized.norm_squared();
        let post_state = if probability > PRUNE_TOL {
            let scaled = unnormalized / Complex64::new(probability.sqrt(), 0.0);
            Some(
                PureState::from_vector(state.layout().clone(), scaled)
                    .expect("normalized post-measurement state"),
            )
        } else {
            None
        };
        branches.push(BornBranch {
            label: label.clone(),
            probability,
            post_state,
        });
    }
    Ok(branches)
}

/// Real f64 matrix helper for tests and constraint assembly.
pub fn real_matrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{named_state, NamedState};

    fn qubit_pair() -> PartyLayout {
        PartyLayout::qubits(2).unwrap()
    }

    #[test]
    fn embed_sigma_z_at_party_zero() {
        let z = Instrument::pauli(Axis::Z);
        let sigma_z = z.kraus()[0].clone() - z.kraus()[1].clone();
        let embedded = embed_local(&sigma_z, 0, &qubit_pair()).unwrap();
        let want = [1.0, 1.0, -1.0, -1.0];
        for (i, w) in want.iter().enumerate() {
            assert!((embedded[(i, i)].re - w).abs() < 1e-12);
        }
        assert!(
            max_abs(&(embedded.clone() - CMatrix::from_diagonal(&embedded.diagonal()))) < 1e-12
        );
    }

    #[test]
    fn embedded_operator_agrees_with_strided_application() {
        let layout = PartyLayout::new(vec![2, 3, 2]).unwrap();
        let op = CMatrix::from_fn(3, 3, |r, c| {
            Complex64::new((r + 2 * c) as f64, r as f64 - 1.0)
        });
        let embedded = embed_local(&op, 1, &layout).unwrap();
        let amps = CVector::from_fn(12, |i, _| {
            Complex64::new(1.0 / (i as f64 + 1.0), 0.3 * i as f64)
        });
        let via_matrix = &embedded * &amps;
        let via_stride = apply_local(&op, 1, &layout, &amps).unwrap();
        assert!((via_matrix - via_stride).norm() < 1e-12);
    }

    #[test]
    fn projective_z_on_bell_state() {
        let bell = named_state(NamedState::PhiPlus, &qubit_pair()).unwrap();
        let branches = born_probabilities(&Instrument::pauli(Axis::Z), 0, &bell).unwrap();
        assert_eq!(branches.len(), 2);
        for branch in &branches {
            assert!((branch.probability - 0.5).abs() < 1e-12);
        }
        let post = branches[0].post_state.as_ref().unwrap();
        let zero_zero = PureState::basis(qubit_pair(), &[0, 0]).unwrap();
        assert!(post.inner(&zero_zero).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn level_two_projector_on_psi4() {
        let layout = PartyLayout::new(vec![3, 3]).unwrap();
        let psi4 = named_state(NamedState::Psi4, &layout).unwrap();
        let e2 = CVector::from_fn(3, |i, _| {
            Complex64::new(if i == 2 { 1.0 } else { 0.0 }, 0.0)
        });
        let instrument = Instrument::rank_one_projectors(&[e2], 3).unwrap();
        let branches = born_probabilities(&instrument, 0, &psi4).unwrap();
        assert_eq!(branches[0].label, "p1");
        assert!((branches[0].probability - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(branches[1].label, "rest");
        assert!((branches[1].probability - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn born_probabilities_sum_to_one() {
        let layout = PartyLayout::new(vec![3, 3]).unwrap();
        let psi4 = named_state(NamedState::Psi4, &layout).unwrap();
        for party in 0..2 {
            let e0 = CVector::from_fn(3, |i, _| {
                Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)
            });
            let instrument = Instrument::rank_one_projectors(&[e0], 3).unwrap();
            let total: f64 = born_probabilities(&instrument, party, &psi4)
                .unwrap()
                .iter()
                .map(|b| b.probability)
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_povm_reports_completeness_violation() {
        let effects = vec![identity(2) * Complex64::new(0.6, 0.0); 2];
        let povm = Povm::new(effects).unwrap();
        let validation = validate_povm(&povm);
        assert!(!validation.is_valid());
        assert_eq!(validation.violations, vec![PovmViolation::Completeness]);
        assert!((validation.completeness_residual - 0.2).abs() < 1e-12);
    }

    #[test]
    fn singleton_identity_povm_is_valid() {
        let povm = Povm::new(vec![identity(3)]).unwrap();
        assert!(validate_povm(&povm).is_valid());
    }

    #[test]
    fn from_povm_square_roots_effects() {
        let z = Instrument::pauli(Axis::Z);
        let povm = Povm::new(vec![z.kraus()[0].clone(), z.kraus()[1].clone()]).unwrap();
        let instrument = Instrument::from_povm(&povm, vec!["a".into(), "b".into()]).unwrap();
        // projectors are their own square roots
        assert!(max_abs(&(instrument.kraus()[0].clone() - z.kraus()[0].clone())) < 1e-12);
    }

    #[test]
    fn pauli_instruments_are_complete_projectors() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let instrument = Instrument::pauli(axis);
            let sum: CMatrix = instrument
                .kraus()
                .iter()
                .map(|k| dagger(k) * k)
                .fold(CMatrix::zeros(2, 2), |acc, m| acc + m);
            assert!(max_abs(&(sum - identity(2))) < 1e-12);
            for k in instrument.kraus() {
                assert!(max_abs(&(k * k - k.clone())) < 1e-12);
            }
        }
    }
}
