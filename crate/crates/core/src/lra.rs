//! Authentication analysis: verifying protocols against a question set,
//! constructive strategies for Bell and product scenarios, the first-round
//! orthogonality constraint space, the reduction from authentication to
//! conclusive discrimination, and the complete-basis classification.
//!
//! The no-go side (complete-basis classification) is imported as a theorem:
//! a complete orthonormal basis with no fully product member admits no
//! partial authentication. Deciding the same question by protocol search is
//! out of scope, so the classifier answers `inconclusive` whenever the
//! theorem's completeness precondition fails.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::locc::{answer_distribution, Answer, AnswerDistribution, LoccError, ProtocolTree};
use crate::measure::{apply_local, Axis, Instrument, MeasureError};
use crate::qcore::{
    is_fully_product, named_state, CMatrix, NamedState, PartyLayout, PureState, QcoreError, TOL,
};

/// Singular values of the constraint system at or below this fraction of the
/// largest one are treated as zero when extracting the nullspace.
const NULLSPACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LraError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Locc(#[from] LoccError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("scenario must contain at least one state")]
    EmptyScenario,
    #[error("states {i} and {j} are not orthogonal (|overlap| = {overlap:.3e})")]
    NotOrthogonal { i: usize, j: usize, overlap: f64 },
    #[error("question {question} out of range for {count} states")]
    QuestionOutOfRange { question: usize, count: usize },
    #[error("strategy covers {got} questions, scenario has {expected}")]
    MissingQuestions { got: usize, expected: usize },
    #[error("state {question} is not fully product")]
    NotFullyProduct { question: usize },
    #[error("protocol does not authenticate question {question}")]
    NotAuthenticated { question: usize },
}

/// A question set: pairwise orthogonal states on a shared layout. Question k
/// asks "is the shared state number k?" and must be answered with bit 1 on
/// that state and bit 0 on every other member.
#[derive(Debug, Clone)]
pub struct LraScenario {
    layout: PartyLayout,
    states: Vec<PureState>,
}

impl LraScenario {
    pub fn new(states: Vec<PureState>) -> Result<Self, LraError> {
        let layout = match states.first() {
            None => return Err(LraError::EmptyScenario),
            Some(s) => s.layout().clone(),
        };
        for s in &states {
            if s.layout() != &layout {
                return Err(
                    QcoreError::LayoutMismatch(layout.to_string(), s.layout().to_string()).into(),
                );
            }
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let overlap = states[i].inner(&states[j]).norm();
                if overlap >= TOL {
                    return Err(LraError::NotOrthogonal { i, j, overlap });
                }
            }
        }
        Ok(LraScenario { layout, states })
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn state(&self, question: usize) -> Result<&PureState, LraError> {
        self.states
            .get(question)
            .ok_or(LraError::QuestionOutOfRange {
                question,
                count: self.states.len(),
            })
    }
}

/// One protocol tree per question, indexed like the scenario's states.
#[derive(Debug, Clone)]
pub struct Strategy {
    trees: Vec<ProtocolTree>,
}

impl Strategy {
    pub fn new(trees: Vec<ProtocolTree>) -> Strategy {
        Strategy { trees }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree(&self, question: usize) -> Result<&ProtocolTree, LraError> {
        self.trees
            .get(question)
            .ok_or(LraError::QuestionOutOfRange {
                question,
                count: self.trees.len(),
            })
    }
}

/// Classification outcome attached to analysis reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    CompleteLraVerified,
    /// The listed (0-based) questions are authenticatable.
    PartialLra(Vec<usize>),
    NoPartialLraByTheorem3,
    TrivialConstraintSpace,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::CompleteLraVerified => write!(f, "complete_lra_verified"),
            VerdictKind::PartialLra(_) => write!(f, "partial_lra"),
            VerdictKind::NoPartialLraByTheorem3 => write!(f, "no_partial_lra_by_theorem3"),
            VerdictKind::TrivialConstraintSpace => write!(f, "trivial_constraint_space"),
            VerdictKind::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Evidence for one question: the probability of answering 1 on every
/// scenario state, and whether that pattern authenticates the target.
#[derive(Debug, Clone)]
pub struct AuthenticationReport {
    pub question: usize,
    /// P(answer = 1 | state j) for each scenario state j.
    pub answer_one_probabilities: Vec<f64>,
    pub verified: bool,
}

impl AuthenticationReport {
    pub fn target_probability(&self) -> f64 {
        self.answer_one_probabilities[self.question]
    }

    /// Largest false-positive probability over the non-target states.
    pub fn max_off_target(&self) -> f64 {
        self.answer_one_probabilities
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.question)
            .map(|(_, &p)| p)
            .fold(0.0, f64::max)
    }

    pub fn kind(&self) -> VerdictKind {
        if self.verified {
            VerdictKind::PartialLra(vec![self.question])
        } else {
            VerdictKind::Inconclusive
        }
    }
}

/// Checks that `tree` answers question `question` perfectly: probability of
/// bit 1 is ≥ 1 − tol on the target state and ≤ tol on every other member.
pub fn verify_authentication(
    scenario: &LraScenario,
    question: usize,
    tree: &ProtocolTree,
) -> Result<AuthenticationReport, LraError> {
    scenario.state(question)?;
    let one = Answer::Bit(1);
    let mut probabilities = Vec::with_capacity(scenario.len());
    for state in scenario.states() {
        probabilities.push(answer_distribution(tree, state)?.probability(&one));
    }
    let verified = probabilities[question] >= 1.0 - TOL
        && probabilities
            .iter()
            .enumerate()
            .all(|(j, &p)| j == question || p <= TOL);
    Ok(AuthenticationReport {
        question,
        answer_one_probabilities: probabilities,
        verified,
    })
}

/// Per-question evidence for a full strategy.
#[derive(Debug, Clone)]
pub struct CompleteLraReport {
    pub checks: Vec<AuthenticationReport>,
    pub verified: bool,
}

impl CompleteLraReport {
    pub fn kind(&self) -> VerdictKind {
        if self.verified {
            VerdictKind::CompleteLraVerified
        } else {
            let authenticated: Vec<usize> = self
                .checks
                .iter()
                .filter(|c| c.verified)
                .map(|c| c.question)
                .collect();
            if authenticated.is_empty() {
                VerdictKind::Inconclusive
            } else {
                VerdictKind::PartialLra(authenticated)
            }
        }
    }
}

/// Runs [`verify_authentication`] for every question of the strategy.
pub fn verify_complete_lra(
    scenario: &LraScenario,
    strategy: &Strategy,
) -> Result<CompleteLraReport, LraError> {
    if strategy.len() != scenario.len() {
        return Err(LraError::MissingQuestions {
            got: strategy.len(),
            expected: scenario.len(),
        });
    }
    let mut checks = Vec::with_capacity(scenario.len());
    for question in 0..scenario.len() {
        checks.push(verify_authentication(
            scenario,
            question,
            strategy.tree(question)?,
        )?);
    }
    let verified = checks.iter().all(|c| c.verified);
    Ok(CompleteLraReport { checks, verified })
}

/// Two-round tree in which both qubit parties measure the same Pauli and the
/// answer is `anti_answer` exactly when the outcomes are anticorrelated.
pub fn pauli_correlation_tree(axis: Axis, anti_answer: u8) -> ProtocolTree {
    let corr_answer = 1 - anti_answer;
    let second_round = |first_outcome: usize| {
        let (on_plus, on_minus) = if first_outcome == 0 {
            (corr_answer, anti_answer)
        } else {
            (anti_answer, corr_answer)
        };
        ProtocolTree::node(
            1,
            Instrument::pauli(axis),
            vec![ProtocolTree::bit(on_plus), ProtocolTree::bit(on_minus)],
        )
    };
    ProtocolTree::node(
        0,
        Instrument::pauli(axis),
        vec![second_round(0), second_round(1)],
    )
}

/// The three-Bell-state scenario {φ+, φ−, ψ+} on a qubit pair.
pub fn bell_scenario() -> LraScenario {
    let layout = PartyLayout::qubits(2).expect("two qubits");
    let states = [
        NamedState::PhiPlus,
        NamedState::PhiMinus,
        NamedState::PsiPlus,
    ]
    .iter()
    .map(|&name| named_state(name, &layout).expect("Bell state on qubit pair"))
    .collect();
    LraScenario::new(states).expect("Bell states are orthonormal")
}

/// The Pauli strategy for [`bell_scenario`]: question k has both parties
/// measure the axis whose correlations single out state k (y for φ+, x for
/// φ−, z for ψ+), answering 1 exactly on anticorrelated outcomes.
pub fn bell_strategy() -> Strategy {
    Strategy::new(vec![
        pauli_correlation_tree(Axis::Y, 1),
        pauli_correlation_tree(Axis::X, 1),
        pauli_correlation_tree(Axis::Z, 1),
    ])
}

/// Sequential local-projector protocol authenticating a fully product member:
/// party p measures {|ξ_p⟩⟨ξ_p|, rest} where ξ_p is its local factor; the
/// answer is 1 exactly when every projector clicks.
pub fn product_authentication_protocol(
    scenario: &LraScenario,
    question: usize,
) -> Result<ProtocolTree, LraError> {
    let state = scenario.state(question)?;
    if !is_fully_product(state) {
        return Err(LraError::NotFullyProduct { question });
    }
    let layout = scenario.layout();
    let mut tree = ProtocolTree::bit(1);
    for party in (0..layout.num_parties()).rev() {
        let reduced = state.density().partial_trace(&[party])?;
        let (eigenvalues, eigenvectors) = reduced.eigendecomposition();
        debug_assert!(
            eigenvalues[0] > 1.0 - 1e-9,
            "product member has pure marginals"
        );
        let local = eigenvectors.column(0).into_owned();
        let instrument = Instrument::rank_one_projectors(&[local], layout.dim_of(party)?)?;
        tree = ProtocolTree::node(party, instrument, vec![tree, ProtocolTree::bit(0)]);
    }
    Ok(tree)
}

/// Orthonormal Frobenius basis of the Hermitian d×d matrices: the d
/// diagonal units, then (E_ij + E_ji)/√2 and i(E_ij − E_ji)/√2 for i<j.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        basis.push(m);
    }
    let w = Complex64::new(0.5_f64.sqrt(), 0.0);
    for i in 0..d {
        for j in i + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(i, j)] = w;
            sym[(j, i)] = w;
            basis.push(sym);
            let mut asym = CMatrix::zeros(d, d);
            asym[(i, j)] = Complex64::new(0.0, 0.5_f64.sqrt());
            asym[(j, i)] = Complex64::new(0.0, -(0.5_f64.sqrt()));
            basis.push(asym);
        }
    }
    basis
}

/// Solution space of the first-round orthogonality constraints at one party.
#[derive(Debug, Clone)]
pub struct ConstraintSpace {
    pub question: usize,
    pub party: usize,
    /// Orthonormal (Frobenius) Hermitian basis of the solution space.
    pub basis: Vec<CMatrix>,
    pub dimension: usize,
    /// True iff the space is exactly span{I}.
    pub trivial: bool,
    /// Distance of the normalized identity from the solution span.
    pub identity_residual: f64,
    /// Largest constraint violation over the returned basis.
    pub max_constraint_residual: f64,
}

impl ConstraintSpace {
    pub fn kind(&self) -> VerdictKind {
        if self.trivial {
            VerdictKind::TrivialConstraintSpace
        } else {
            VerdictKind::Inconclusive
        }
    }
}

/// Computes the real-linear space of Hermitian operators H at `party` with
/// ⟨ψ_j| embed(H, party) |ψ_k⟩ = 0 for every j ≠ k.
///
/// A first measurement effect must lie in this space (its square-root Kraus
/// operator must keep the target orthogonal to the rest of the set), so a
/// trivial space (span{I} only) certifies that no informative first round
/// at this party exists.
pub fn orthogonality_constraint_space(
    scenario: &LraScenario,
    question: usize,
    party: usize,
) -> Result<ConstraintSpace, LraError> {
    let target = scenario.state(question)?;
    let layout = scenario.layout();
    let d = layout.dim_of(party)?;
    let basis = hermitian_basis(d);

    // real constraint matrix: two rows (Re, Im) per non-target state
    let others: Vec<usize> = (0..scenario.len()).filter(|&j| j != question).collect();
    let coefficient = |j: usize, m: usize| -> Result<Complex64, LraError> {
        let moved = apply_local(&basis[m], party, layout, target.amplitudes())?;
        Ok(scenario.states()[j].amplitudes().dotc(&moved))
    };

    let solution_coords: Vec<Vec<f64>> = if others.is_empty() {
        (0..d * d)
            .map(|m| (0..d * d).map(|i| if i == m { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        let mut a = DMatrix::<f64>::zeros(2 * others.len(), d * d);
        for (row, &j) in others.iter().enumerate() {
            for m in 0..d * d {
                let c = coefficient(j, m)?;
                a[(2 * row, m)] = c.re;
                a[(2 * row + 1, m)] = c.im;
            }
        }
        real_nullspace(&a, NULLSPACE_TOL)
    };

    let solution_basis: Vec<CMatrix> = solution_coords
        .iter()
        .map(|coords| {
            coords
                .iter()
                .zip(&basis)
                .fold(CMatrix::zeros(d, d), |acc, (&c, b)| {
                    acc + b * Complex64::new(c, 0.0)
                })
        })
        .collect();

    // residual of each basis element against the original constraints
    let mut max_constraint_residual = 0.0_f64;
    for h in &solution_basis {
        for &j in &others {
            let moved = apply_local(h, party, layout, target.amplitudes())?;
            max_constraint_residual =
                max_constraint_residual.max(scenario.states()[j].amplitudes().dotc(&moved).norm());
        }
    }

    // identity in normalized coordinates: 1/√d on each diagonal basis element
    let identity_coords: Vec<f64> = (0..d * d)
        .map(|m| if m < d { 1.0 / (d as f64).sqrt() } else { 0.0 })
        .collect();
    let mut projection = vec![0.0; d * d];
    for coords in &solution_coords {
        let weight: f64 = coords
            .iter()
            .zip(&identity_coords)
            .map(|(a, b)| a * b)
            .sum();
        for (p, &c) in projection.iter_mut().zip(coords) {
            *p += weight * c;
        }
    }
    let identity_residual = identity_coords
        .iter()
        .zip(&projection)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let dimension = solution_basis.len();
    let trivial = dimension == 1 && {
        let h = &solution_basis[0];
        let mean = crate::qcore::trace(h) / Complex64::new(d as f64, 0.0);
        let off = h - crate::qcore::identity(d) * mean;
        crate::qcore::max_abs(&off) < 1e-8
    };

    Ok(ConstraintSpace {
        question,
        party,
        basis: solution_basis,
        dimension,
        trivial,
        identity_residual,
        max_constraint_residual,
    })
}

/// Orthonormal basis of the nullspace of a real matrix, via the symmetric
/// eigendecomposition of AᵀA. `tol` is relative to the largest singular
/// value.
fn real_nullspace(a: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let gram = a.transpose() * a;
    let eigen = nalgebra::SymmetricEigen::new(gram);
    let max_sq = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff_sq = (tol * tol) * max_sq.max(1.0);
    let mut vectors = Vec::new();
    for (i, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda <= cutoff_sq {
            vectors.push(eigen.eigenvectors.column(i).iter().cloned().collect());
        }
    }
    vectors
}

/// The authentication tree relabeled for conclusive discrimination, plus the
/// probabilities certifying the reduction.
#[derive(Debug, Clone)]
pub struct ConclusiveReduction {
    pub tree: ProtocolTree,
    pub label: String,
    /// P(label | target) · 1/N under the uniform prior.
    pub success_probability: f64,
    /// Largest P(label | non-target state): must be ~0 (never mislabels).
    pub mislabel_probability: f64,
}

/// Converts a verified authentication protocol for question k into a
/// conclusive (never-wrong) discrimination protocol: answer 1 becomes the
/// target label, everything else becomes "inconclusive". Under the uniform
/// prior the success probability is exactly 1/N.
pub fn lra_to_conclusive(
    scenario: &LraScenario,
    question: usize,
    tree: &ProtocolTree,
    label: impl Into<String>,
) -> Result<ConclusiveReduction, LraError> {
    let report = verify_authentication(scenario, question, tree)?;
    if !report.verified {
        return Err(LraError::NotAuthenticated { question });
    }
    let label = label.into();
    let target = Answer::Label(label.clone());
    let relabeled = tree.map_answers(&|answer| match answer {
        Answer::Bit(1) => target.clone(),
        _ => Answer::Inconclusive,
    });

    let n = scenario.len() as f64;
    let mut success_probability = 0.0;
    let mut mislabel_probability = 0.0_f64;
    for (j, state) in scenario.states().iter().enumerate() {
        let p = answer_distribution(&relabeled, state)?.probability(&target);
        if j == question {
            success_probability = p / n;
        } else {
            mislabel_probability = mislabel_probability.max(p);
        }
    }
    Ok(ConclusiveReduction {
        tree: relabeled,
        label,
        success_probability,
        mislabel_probability,
    })
}

/// Theorem-level classification of a scenario that may form a complete basis.
#[derive(Debug, Clone)]
pub struct BasisClassification {
    pub states: usize,
    pub dimension: usize,
    /// 0-based indices of fully product members.
    pub product_members: Vec<usize>,
    pub kind: VerdictKind,
}

/// Classifies a scenario against the complete-basis no-go: if the set is a
/// complete orthonormal basis (N = D) with no fully product member, no
/// question is locally answerable; if product members exist, exactly those
/// are authenticatable; if N < D the criterion does not apply.
pub fn classify_complete_basis(scenario: &LraScenario) -> BasisClassification {
    let states = scenario.len();
    let dimension = scenario.layout().total_dim();
    let product_members: Vec<usize> = scenario
        .states()
        .iter()
        .enumerate()
        .filter(|(_, s)| is_fully_product(s))
        .map(|(i, _)| i)
        .collect();
    let kind = if states < dimension {
        VerdictKind::Inconclusive
    } else if product_members.is_empty() {
        VerdictKind::NoPartialLraByTheorem3
    } else {
        VerdictKind::PartialLra(product_members.clone())
    };
    BasisClassification {
        states,
        dimension,
        product_members,
        kind,
    }
}

/// Returns the distribution of every question tree on every scenario state;
/// convenience for reports.
pub fn strategy_distributions(
    scenario: &LraScenario,
    strategy: &Strategy,
) -> Result<Vec<Vec<AnswerDistribution>>, LraError> {
    let mut all = Vec::with_capacity(strategy.len());
    for question in 0..strategy.len() {
        let tree = strategy.tree(question)?;
        let mut per_state = Vec::with_capacity(scenario.len());
        for state in scenario.states() {
            per_state.push(answer_distribution(tree, state)?);
        }
        all.push(per_state);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::max_abs;

    fn three_state_product_scenario() -> LraScenario {
        // {φ+, φ−, |01⟩}: the product member blocks the other questions
        let layout = PartyLayout::qubits(2).unwrap();
        LraScenario::new(vec![
            named_state(NamedState::PhiPlus, &layout).unwrap(),
            named_state(NamedState::PhiMinus, &layout).unwrap(),
            PureState::basis(layout, &[0, 1]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_non_orthogonal_sets() {
        let layout = PartyLayout::qubits(2).unwrap();
        let result = LraScenario::new(vec![
            named_state(NamedState::PhiPlus, &layout).unwrap(),
            PureState::basis(layout, &[0, 0]).unwrap(),
        ]);
        assert!(matches!(
            result,
            Err(LraError::NotOrthogonal { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn bell_strategy_authenticates_every_question() {
        let scenario = bell_scenario();
        let report = verify_complete_lra(&scenario, &bell_strategy()).unwrap();
        assert!(report.verified);
        assert_eq!(report.kind(), VerdictKind::CompleteLraVerified);
        for check in &report.checks {
            assert!(check.target_probability() > 1.0 - 1e-12);
            assert!(check.max_off_target() < 1e-12);
        }
    }

    #[test]
    fn zz_tree_fails_the_wrong_question() {
        let scenario = bell_scenario();
        let zz = pauli_correlation_tree(Axis::Z, 1);
        let report = verify_authentication(&scenario, 0, &zz).unwrap();
        assert!(!report.verified);
        // it answers 1 on ψ+ (question 2), not on φ+
        assert!(report.answer_one_probabilities[2] > 1.0 - 1e-12);
    }

    #[test]
    fn leaf_one_only_authenticates_singletons() {
        let layout = PartyLayout::qubits(2).unwrap();
        let singleton =
            LraScenario::new(vec![named_state(NamedState::PhiPlus, &layout).unwrap()]).unwrap();
        let report = verify_authentication(&singleton, 0, &ProtocolTree::bit(1)).unwrap();
        assert!(report.verified);

        let report = verify_authentication(&bell_scenario(), 0, &ProtocolTree::bit(1)).unwrap();
        assert!(!report.verified);
    }

    #[test]
    fn product_protocol_authenticates_the_product_member() {
        let scenario = three_state_product_scenario();
        let tree = product_authentication_protocol(&scenario, 2).unwrap();
        let report = verify_authentication(&scenario, 2, &tree).unwrap();
        assert!(report.verified);
        assert!(report.target_probability() > 1.0 - 1e-12);
        assert!(report.max_off_target() < 1e-12);
    }

    #[test]
    fn product_protocol_rejects_entangled_targets() {
        let scenario = three_state_product_scenario();
        assert!(matches!(
            product_authentication_protocol(&scenario, 0),
            Err(LraError::NotFullyProduct { question: 0 })
        ));
    }

    #[test]
    fn constraint_space_is_trivial_next_to_a_product_state() {
        let scenario = three_state_product_scenario();
        for party in 0..2 {
            let space = orthogonality_constraint_space(&scenario, 0, party).unwrap();
            assert_eq!(space.dimension, 1);
            assert!(space.trivial);
            assert!(space.identity_residual < 1e-9);
            assert!(space.max_constraint_residual < 1e-9);
            assert_eq!(space.kind(), VerdictKind::TrivialConstraintSpace);
        }
    }

    #[test]
    fn constraint_space_of_bell_scenario_has_room() {
        let scenario = bell_scenario();
        let space = orthogonality_constraint_space(&scenario, 0, 0).unwrap();
        assert_eq!(space.dimension, 2);
        assert!(!space.trivial);
        assert!(space.identity_residual < 1e-9);
        // the second direction is σ_y: its projection onto the returned span
        // must reproduce it exactly
        let sigma_y = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let projected = space.basis.iter().fold(CMatrix::zeros(2, 2), |acc, b| {
            let weight = crate::qcore::frobenius_inner(b, &sigma_y);
            acc + b * weight
        });
        assert!(max_abs(&(projected - sigma_y)) < 1e-9);
    }

    #[test]
    fn unconstrained_space_is_all_hermitians() {
        let layout = PartyLayout::qubits(2).unwrap();
        let singleton =
            LraScenario::new(vec![named_state(NamedState::PhiPlus, &layout).unwrap()]).unwrap();
        let space = orthogonality_constraint_space(&singleton, 0, 0).unwrap();
        assert_eq!(space.dimension, 4);
        assert!(!space.trivial);
    }

    #[test]
    fn conclusive_reduction_reaches_one_over_n() {
        let scenario = bell_scenario();
        let tree = pauli_correlation_tree(Axis::Y, 1);
        let reduction = lra_to_conclusive(&scenario, 0, &tree, "phi_plus").unwrap();
        assert!((reduction.success_probability - 1.0 / 3.0).abs() < 1e-12);
        assert!(reduction.mislabel_probability < 1e-12);
    }

    #[test]
    fn conclusive_reduction_requires_authentication() {
        let scenario = bell_scenario();
        let wrong = pauli_correlation_tree(Axis::Z, 1);
        assert!(matches!(
            lra_to_conclusive(&scenario, 0, &wrong, "phi_plus"),
            Err(LraError::NotAuthenticated { question: 0 })
        ));
    }

    #[test]
    fn classification_covers_all_three_regimes() {
        let layout = PartyLayout::qubits(2).unwrap();
        let bell_basis = LraScenario::new(
            [
                NamedState::PhiPlus,
                NamedState::PhiMinus,
                NamedState::PsiPlus,
                NamedState::PsiMinus,
            ]
            .iter()
            .map(|&n| named_state(n, &layout).unwrap())
            .collect(),
        )
        .unwrap();
        assert_eq!(
            classify_complete_basis(&bell_basis).kind,
            VerdictKind::NoPartialLraByTheorem3
        );

        let computational = LraScenario::new(
            (0..4)
                .map(|i| PureState::basis_index(layout.clone(), i).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(
            classify_complete_basis(&computational).kind,
            VerdictKind::PartialLra(vec![0, 1, 2, 3])
        );

        assert_eq!(
            classify_complete_basis(&bell_scenario()).kind,
            VerdictKind::Inconclusive
        );
    }

    #[test]
    fn hermitian_basis_is_frobenius_orthonormal() {
        for d in [2, 3] {
            let basis = hermitian_basis(d);
            assert_eq!(basis.len(), d * d);
            for (i, a) in basis.iter().enumerate() {
                assert!(max_abs(&(a - crate::qcore::dagger(a))) < 1e-12);
                for (j, b) in basis.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    let inner = crate::qcore::frobenius_inner(a, b);
                    assert!((inner.re - want).abs() < 1e-12 && inner.im.abs() < 1e-12);
                }
            }
        }
    }
}
