//! Finite-round adaptive LOCC protocols as outcome-branching trees, with
//! exact simulation producing answer distributions and transcripts.
//!
//! Classical communication is implicit in the branching: every child subtree
//! may condition on the full outcome history, which captures fully adaptive
//! finite-round LOCC. Branches whose probability falls below
//! [`PRUNE_TOL`](crate::measure::PRUNE_TOL) are dropped; the dropped mass is
//! accounted in [`Simulation::pruned_mass`] so callers can audit it.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::measure::{born_probabilities, Instrument, MeasureError};
use crate::qcore::{CVector, DensityOperator, PartyLayout, PureState, TOL};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LoccError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("node has {children} children for {outcomes} instrument outcomes")]
    BranchCount { children: usize, outcomes: usize },
    #[error("tree addresses parties of {tree} but the state has layout {state}")]
    LayoutMismatch { tree: String, state: String },
}

/// Terminal answer of a protocol: the authentication bit, a state label for
/// conclusive discrimination, or an explicit "don't know".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Answer {
    Bit(u8),
    Label(String),
    Inconclusive,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Bit(b) => write!(f, "{b}"),
            Answer::Label(s) => write!(f, "label:{s}"),
            Answer::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A finite-round LOCC protocol: leaves carry answers, nodes measure one
/// party and branch per outcome (children in instrument label order).
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolTree {
    Leaf(Answer),
    Node {
        party: usize,
        instrument: Instrument,
        children: Vec<ProtocolTree>,
    },
}

impl ProtocolTree {
    pub fn answer(answer: Answer) -> ProtocolTree {
        ProtocolTree::Leaf(answer)
    }

    pub fn bit(bit: u8) -> ProtocolTree {
        ProtocolTree::Leaf(Answer::Bit(bit))
    }

    pub fn label(label: impl Into<String>) -> ProtocolTree {
        ProtocolTree::Leaf(Answer::Label(label.into()))
    }

    pub fn inconclusive() -> ProtocolTree {
        ProtocolTree::Leaf(Answer::Inconclusive)
    }

    pub fn node(party: usize, instrument: Instrument, children: Vec<ProtocolTree>) -> ProtocolTree {
        ProtocolTree::Node {
            party,
            instrument,
            children,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolTree::Leaf(_) => 0,
            ProtocolTree::Node { children, .. } => {
                1 + children.iter().map(ProtocolTree::depth).max().unwrap_or(0)
            }
        }
    }

    /// Rewrites every leaf answer through `f`, keeping the tree shape.
    pub fn map_answers(&self, f: &impl Fn(&Answer) -> Answer) -> ProtocolTree {
        match self {
            ProtocolTree::Leaf(a) => ProtocolTree::Leaf(f(a)),
            ProtocolTree::Node {
                party,
                instrument,
                children,
            } => ProtocolTree::Node {
                party: *party,
                instrument: instrument.clone(),
                children: children.iter().map(|c| c.map_answers(f)).collect(),
            },
        }
    }
}

/// One root-to-leaf run: the measured (party, outcome label) sequence, the
/// answer reached, and the probability of taking exactly this path.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub steps: Vec<(usize, String)>,
    pub answer: Answer,
    pub probability: f64,
}

/// Probability of each terminal answer; sums to 1 within tolerance (up to
/// audited pruned mass).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnswerDistribution {
    probabilities: BTreeMap<Answer, f64>,
}

impl AnswerDistribution {
    pub fn probability(&self, answer: &Answer) -> f64 {
        self.probabilities.get(answer).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Answer, f64)> {
        self.probabilities.iter().map(|(a, &p)| (a, p))
    }

    fn add(&mut self, answer: &Answer, probability: f64) {
        *self.probabilities.entry(answer.clone()).or_insert(0.0) += probability;
    }

    fn scaled_into(&self, weight: f64, target: &mut AnswerDistribution) {
        for (answer, p) in self.iter() {
            target.add(answer, weight * p);
        }
    }
}

/// Full simulation output: the answer distribution, every surviving
/// transcript (left-to-right leaf order), and the audited pruned mass.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub distribution: AnswerDistribution,
    pub transcripts: Vec<Transcript>,
    pub pruned_mass: f64,
}

/// Exact recursive Born-rule evaluation of a protocol tree on a pure state.
pub fn simulate(tree: &ProtocolTree, state: &PureState) -> Result<Simulation, LoccError> {
    check_layout(tree, state.layout())?;
    let mut simulation = Simulation {
        distribution: AnswerDistribution::default(),
        transcripts: Vec::new(),
        pruned_mass: 0.0,
    };
    let mut prefix = Vec::new();
    recurse(tree, state, 1.0, &mut prefix, &mut simulation)?;
    Ok(simulation)
}

fn recurse(
    tree: &ProtocolTree,
    state: &PureState,
    weight: f64,
    prefix: &mut Vec<(usize, String)>,
    simulation: &mut Simulation,
) -> Result<(), LoccError> {
    match tree {
        ProtocolTree::Leaf(answer) => {
            simulation.distribution.add(answer, weight);
            simulation.transcripts.push(Transcript {
                steps: prefix.clone(),
                answer: answer.clone(),
                probability: weight,
            });
            Ok(())
        }
        ProtocolTree::Node {
            party,
            instrument,
            children,
        } => {
            if children.len() != instrument.len() {
                return Err(LoccError::BranchCount {
                    children: children.len(),
                    outcomes: instrument.len(),
                });
            }
            let branches = born_probabilities(instrument, *party, state)?;
            for (branch, child) in branches.iter().zip(children) {
                match &branch.post_state {
                    None => simulation.pruned_mass += weight * branch.probability,
                    Some(post) => {
                        prefix.push((*party, branch.label.clone()));
                        recurse(child, post, weight * branch.probability, prefix, simulation)?;
                        prefix.pop();
                    }
                }
            }
            Ok(())
        }
    }
}

/// The answer distribution alone; see [`simulate`] for transcripts.
pub fn answer_distribution(
    tree: &ProtocolTree,
    state: &PureState,
) -> Result<AnswerDistribution, LoccError> {
    Ok(simulate(tree, state)?.distribution)
}

/// Probability of one terminal answer (0 if the answer never occurs).
pub fn answer_probability(
    tree: &ProtocolTree,
    state: &PureState,
    answer: &Answer,
) -> Result<f64, LoccError> {
    Ok(answer_distribution(tree, state)?.probability(answer))
}

/// Simulates a mixed state by linearity over its eigendecomposition.
pub fn simulate_density(
    tree: &ProtocolTree,
    rho: &DensityOperator,
) -> Result<AnswerDistribution, LoccError> {
    let (eigenvalues, eigenvectors) = rho.eigendecomposition();
    let mut distribution = AnswerDistribution::default();
    for (i, &weight) in eigenvalues.iter().enumerate() {
        if weight <= crate::measure::PRUNE_TOL {
            continue;
        }
        let column: CVector = eigenvectors.column(i).into_owned();
        let component = PureState::normalized(rho.layout().clone(), column)
            .expect("eigenvector of a density operator is a state");
        answer_distribution(tree, &component)?.scaled_into(weight, &mut distribution);
    }
    Ok(distribution)
}

/// Structural defect found by [`validate_locc_structure`].
#[derive(Debug, Clone, PartialEq)]
pub enum StructureViolation {
    /// Node measures a party outside the layout.
    PartyOutOfRange { party: usize, parties: usize },
    /// Instrument dimension differs from the measured party's dimension.
    Dimension {
        party: usize,
        instrument_dim: usize,
        party_dim: usize,
    },
    /// Child count differs from the instrument's outcome count.
    BranchCount {
        party: usize,
        children: usize,
        outcomes: usize,
    },
    /// Instrument fails trace preservation at the stated residual.
    Completeness { party: usize, residual: f64 },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::PartyOutOfRange { party, parties } => {
                write!(f, "party {party} out of range for {parties} parties")
            }
            StructureViolation::Dimension {
                party,
                instrument_dim,
                party_dim,
            } => write!(
                f,
                "dimension: instrument acts on {instrument_dim} levels but party {party} has {party_dim}"
            ),
            StructureViolation::BranchCount {
                party,
                children,
                outcomes,
            } => write!(
                f,
                "branch count: node at party {party} has {children} children for {outcomes} outcomes"
            ),
            StructureViolation::Completeness { party, residual } => write!(
                f,
                "completeness: instrument at party {party} misses trace preservation by {residual:.3e}"
            ),
        }
    }
}

/// Certificate from [`validate_locc_structure`]: tree shape statistics plus
/// any violations (empty means the tree is structurally valid).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureValidation {
    pub depth: usize,
    pub leaves: usize,
    pub violations: Vec<StructureViolation>,
}

impl StructureValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks party ranges, instrument/party dimension agreement, branch counts,
/// and instrument completeness over the whole tree. Reports, never errors.
pub fn validate_locc_structure(tree: &ProtocolTree, layout: &PartyLayout) -> StructureValidation {
    let mut validation = StructureValidation {
        depth: tree.depth(),
        leaves: 0,
        violations: Vec::new(),
    };
    walk(tree, layout, &mut validation);
    validation
}

fn walk(tree: &ProtocolTree, layout: &PartyLayout, validation: &mut StructureValidation) {
    match tree {
        ProtocolTree::Leaf(_) => validation.leaves += 1,
        ProtocolTree::Node {
            party,
            instrument,
            children,
        } => {
            match layout.dim_of(*party) {
                Err(_) => validation
                    .violations
                    .push(StructureViolation::PartyOutOfRange {
                        party: *party,
                        parties: layout.num_parties(),
                    }),
                Ok(d) => {
                    if instrument.dim() != d {
                        validation.violations.push(StructureViolation::Dimension {
                            party: *party,
                            instrument_dim: instrument.dim(),
                            party_dim: d,
                        });
                    }
                }
            }
            if children.len() != instrument.len() {
                validation.violations.push(StructureViolation::BranchCount {
                    party: *party,
                    children: children.len(),
                    outcomes: instrument.len(),
                });
            }
            let completeness = completeness_residual(instrument);
            if completeness > TOL {
                validation
                    .violations
                    .push(StructureViolation::Completeness {
                        party: *party,
                        residual: completeness,
                    });
            }
            for child in children {
                walk(child, layout, validation);
            }
        }
    }
}

fn completeness_residual(instrument: &Instrument) -> f64 {
    use crate::qcore::{dagger, identity, max_abs, CMatrix};
    let dim = instrument.dim();
    let sum = instrument
        .kraus()
        .iter()
        .map(|k| dagger(k) * k)
        .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    max_abs(&(sum - identity(dim)))
}

fn check_layout(tree: &ProtocolTree, layout: &PartyLayout) -> Result<(), LoccError> {
    let validation = validate_locc_structure(tree, layout);
    for v in &validation.violations {
        match v {
            StructureViolation::PartyOutOfRange { .. } | StructureViolation::Dimension { .. } => {
                return Err(LoccError::LayoutMismatch {
                    tree: v.to_string(),
                    state: layout.to_string(),
                })
            }
            _ => {}
        }
    }
    Ok(())
}
