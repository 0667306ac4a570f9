//! The scenario text format and its analysis surface: a line-oriented
//! declaration language for party layouts, states, protocol trees, and
//! analysis directives, together with JSON-ready reports.
//!
//! A file consists of:
//!
//! ```text
//! parties 2 2
//!
//! state e1 = bell:phi+
//! state e2 = bell:phi-
//! state e3 = bell:psi+
//!
//! protocol yy {
//!   measure party=0 instrument=pauli:y {
//!     outcome +1 {
//!       measure party=1 instrument=pauli:y {
//!         outcome +1 { answer 1 }
//!         outcome -1 { answer 0 }
//!       }
//!     }
//!     outcome -1 {
//!       measure party=1 instrument=pauli:y {
//!         outcome +1 { answer 0 }
//!         outcome -1 { answer 1 }
//!       }
//!     }
//!   }
//! }
//!
//! analyze verify question=1 protocol=yy
//! ```
//!
//! Comments run from `#` to end of line. Complex literals are `re,im`
//! decimal pairs; amplitude lists separate entries with `;`. Question
//! numbers are 1-based at this surface (matching the CLI), party indices
//! 0-based. Parsing is two-phase: [`parse_scenario`] builds the syntactic
//! [`ScenarioFile`] and then validates it semantically (dimensions, norms,
//! orthogonality, protocol structure, directive references), so a returned
//! file always compiles.

mod parse;
mod report;
mod serialize;

pub use parse::parse_scenario;
pub use report::{demo_bell_report, run_directive, AnalysisError};
pub use serialize::{render_report, report_from_json, report_to_json, serialize_scenario};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::locc::{Answer, ProtocolTree};
use crate::lra::{LraError, LraScenario};
use crate::measure::{Axis, Instrument};
use crate::qcore::{named_state, CVector, NamedState, PartyLayout, PureState};
use num_complex::Complex64;

/// A source-located problem: lexical, syntactic, or semantic. Semantic
/// diagnostics point at the start of the offending declaration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line,
            col,
            message: message.into(),
        }
    }
}

/// One line per diagnostic, ready for stderr.
pub fn render_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(Diagnostic::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

/// State constructor exactly as written in a file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateCtor {
    BellPhiPlus,
    BellPhiMinus,
    BellPsiPlus,
    BellPsiMinus,
    /// Computational basis state by flat index.
    Basis(usize),
    Psi4,
    /// Explicit amplitude list over the layout's full space.
    Amps(Vec<Complex64>),
}

impl StateCtor {
    fn build(&self, layout: &PartyLayout) -> Result<PureState, String> {
        let named = |n: NamedState| named_state(n, layout).map_err(|e| e.to_string());
        match self {
            StateCtor::BellPhiPlus => named(NamedState::PhiPlus),
            StateCtor::BellPhiMinus => named(NamedState::PhiMinus),
            StateCtor::BellPsiPlus => named(NamedState::PsiPlus),
            StateCtor::BellPsiMinus => named(NamedState::PsiMinus),
            StateCtor::Basis(i) => named(NamedState::Basis(*i)),
            StateCtor::Psi4 => named(NamedState::Psi4),
            StateCtor::Amps(values) => {
                if values.len() != layout.total_dim() {
                    return Err(format!(
                        "amplitude list has {} entries, layout dimension is {}",
                        values.len(),
                        layout.total_dim()
                    ));
                }
                PureState::new(layout.clone(), values.clone()).map_err(|e| e.to_string())
            }
        }
    }
}

/// Instrument specification as written: a Pauli axis or an explicit list of
/// orthonormal projector vectors (a "rest" outcome covers any remaining
/// subspace).
#[derive(Debug, Clone, PartialEq)]
pub enum InstrumentDecl {
    Pauli(Axis),
    Projectors(Vec<Vec<Complex64>>),
}

/// Protocol tree in surface syntax: outcome branches keep file order and
/// are matched to instrument outcomes by label at compile time.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeDecl {
    Measure {
        party: usize,
        instrument: InstrumentDecl,
        outcomes: Vec<(String, TreeDecl)>,
    },
    Answer(Answer),
}

/// Analysis request. Question numbers are stored as written (1-based).
#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Verify {
        question: usize,
        protocol: String,
    },
    /// Checks every question; `protocols` lists one protocol name per
    /// question, defaulting to all declared protocols in file order.
    Complete {
        protocols: Option<Vec<String>>,
    },
    Nullspace {
        question: usize,
        party: usize,
    },
    Classify,
    Conclusive {
        question: usize,
        protocol: String,
        /// Label emitted on identification; defaults to the state's name.
        label: Option<String>,
    },
    Prop2,
}

/// `parties d1 d2 ...`
#[derive(Debug, Clone)]
pub struct PartiesDecl {
    pub dims: Vec<usize>,
    pub line: usize,
}

/// `state <name> = <ctor>`
#[derive(Debug, Clone)]
pub struct StateDecl {
    pub name: String,
    pub ctor: StateCtor,
    pub line: usize,
}

/// `protocol <name> { ... }`
#[derive(Debug, Clone)]
pub struct ProtocolDecl {
    pub name: String,
    pub tree: TreeDecl,
    pub line: usize,
}

/// `analyze <kind> key=value ...`
#[derive(Debug, Clone)]
pub struct DirectiveDecl {
    pub directive: Directive,
    pub line: usize,
}

// Structural equality ignores source positions, so a serialize/parse round
// trip compares equal even though the lines moved.
impl PartialEq for PartiesDecl {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
    }
}

impl PartialEq for StateDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.ctor == other.ctor
    }
}

impl PartialEq for ProtocolDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.tree == other.tree
    }
}

impl PartialEq for DirectiveDecl {
    fn eq(&self, other: &Self) -> bool {
        self.directive == other.directive
    }
}

/// Syntactic form of a scenario file, in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioFile {
    pub parties: Option<PartiesDecl>,
    pub states: Vec<StateDecl>,
    pub protocols: Vec<ProtocolDecl>,
    pub directives: Vec<DirectiveDecl>,
}

/// Semantically checked scenario: states assembled into an [`LraScenario`],
/// protocol trees built against the layout, directives validated.
#[derive(Debug, Clone)]
pub struct CompiledScenario {
    pub scenario: LraScenario,
    /// Name of each state, by question index.
    pub state_names: Vec<String>,
    pub protocols: Vec<(String, ProtocolTree)>,
    pub directives: Vec<Directive>,
}

impl CompiledScenario {
    pub fn tree(&self, name: &str) -> Option<&ProtocolTree> {
        self.protocols
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }
}

fn semantic(line: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(line, 1, message)
}

fn build_tree(
    decl: &TreeDecl,
    layout: &PartyLayout,
    protocol: &str,
    line: usize,
) -> Result<ProtocolTree, Diagnostic> {
    match decl {
        TreeDecl::Answer(answer) => Ok(ProtocolTree::answer(answer.clone())),
        TreeDecl::Measure {
            party,
            instrument,
            outcomes,
        } => {
            let dim = layout.dim_of(*party).map_err(|_| {
                semantic(
                    line,
                    format!(
                        "protocol `{protocol}`: party {party} out of range (layout has {} parties)",
                        layout.num_parties()
                    ),
                )
            })?;
            let instrument = match instrument {
                InstrumentDecl::Pauli(axis) => {
                    if dim != 2 {
                        return Err(semantic(
                            line,
                            format!(
                                "protocol `{protocol}`: pauli instrument requires a \
                                 2-dimensional party, party {party} has dimension {dim}"
                            ),
                        ));
                    }
                    Instrument::pauli(*axis)
                }
                InstrumentDecl::Projectors(vectors) => {
                    let columns: Vec<CVector> = vectors
                        .iter()
                        .map(|v| CVector::from_iterator(v.len(), v.iter().cloned()))
                        .collect();
                    Instrument::rank_one_projectors(&columns, dim)
                        .map_err(|e| semantic(line, format!("protocol `{protocol}`: {e}")))?
                }
            };
            let mut children: Vec<Option<ProtocolTree>> = vec![None; instrument.len()];
            for (label, sub) in outcomes {
                let Some(index) = instrument.labels().iter().position(|l| l == label) else {
                    return Err(semantic(
                        line,
                        format!(
                            "protocol `{protocol}`: unknown outcome label `{label}` \
                             (instrument outcomes: {})",
                            instrument.labels().join(", ")
                        ),
                    ));
                };
                if children[index].is_some() {
                    return Err(semantic(
                        line,
                        format!("protocol `{protocol}`: duplicate outcome `{label}`"),
                    ));
                }
                children[index] = Some(build_tree(sub, layout, protocol, line)?);
            }
            if let Some(missing) = children.iter().position(Option::is_none) {
                return Err(semantic(
                    line,
                    format!(
                        "protocol `{protocol}`: missing outcome `{}`",
                        instrument.labels()[missing]
                    ),
                ));
            }
            Ok(ProtocolTree::node(
                *party,
                instrument,
                children.into_iter().flatten().collect(),
            ))
        }
    }
}

fn check_directive(
    directive: &Directive,
    questions: usize,
    parties: usize,
    protocol_names: &[&str],
) -> Result<(), String> {
    let check_question = |q: usize| -> Result<(), String> {
        if q == 0 || q > questions {
            Err(format!(
                "question {q} out of range (scenario has {questions} states, numbered from 1)"
            ))
        } else {
            Ok(())
        }
    };
    let check_protocol = |name: &str| -> Result<(), String> {
        if protocol_names.contains(&name) {
            Ok(())
        } else {
            Err(format!("unknown protocol `{name}`"))
        }
    };
    match directive {
        Directive::Verify { question, protocol } => {
            check_question(*question)?;
            check_protocol(protocol)
        }
        Directive::Complete { protocols } => {
            let count = match protocols {
                Some(names) => {
                    for name in names {
                        check_protocol(name)?;
                    }
                    names.len()
                }
                None => protocol_names.len(),
            };
            if count != questions {
                return Err(format!(
                    "complete analysis needs one protocol per question: got {count}, \
                     scenario has {questions} states"
                ));
            }
            Ok(())
        }
        Directive::Nullspace { question, party } => {
            check_question(*question)?;
            if *party >= parties {
                return Err(format!(
                    "party {party} out of range (layout has {parties} parties)"
                ));
            }
            Ok(())
        }
        Directive::Conclusive {
            question, protocol, ..
        } => {
            check_question(*question)?;
            check_protocol(protocol)
        }
        Directive::Classify | Directive::Prop2 => Ok(()),
    }
}

/// Semantic pass over a parsed file: builds every state against the layout,
/// checks mutual orthogonality, assembles protocol trees, and validates
/// directive references. Collects as many diagnostics as it can.
pub fn compile(file: &ScenarioFile) -> Result<CompiledScenario, Vec<Diagnostic>> {
    let Some(parties) = &file.parties else {
        return Err(vec![Diagnostic::new(
            1,
            1,
            "empty scenario: missing `parties` declaration",
        )]);
    };
    let layout = PartyLayout::new(parties.dims.clone()).map_err(|e| {
        vec![semantic(
            parties.line,
            format!("invalid parties declaration: {e}"),
        )]
    })?;

    let mut diagnostics = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut states: Vec<PureState> = Vec::new();
    for decl in &file.states {
        if names.iter().any(|n| n == &decl.name) {
            diagnostics.push(semantic(
                decl.line,
                format!("duplicate state name `{}`", decl.name),
            ));
            continue;
        }
        match decl.ctor.build(&layout) {
            Ok(state) => {
                names.push(decl.name.clone());
                states.push(state);
            }
            Err(message) => diagnostics.push(semantic(
                decl.line,
                format!("state `{}`: {message}", decl.name),
            )),
        }
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }

    let scenario = LraScenario::new(states).map_err(|e| {
        vec![match e {
            LraError::NotOrthogonal { i, j, overlap } => semantic(
                file.states[j].line,
                format!(
                    "states `{}` and `{}` are not orthogonal (overlap {overlap:.3e})",
                    names[i], names[j]
                ),
            ),
            LraError::EmptyScenario => semantic(parties.line, "scenario declares no states"),
            other => semantic(parties.line, other.to_string()),
        }]
    })?;

    let mut protocols: Vec<(String, ProtocolTree)> = Vec::new();
    for decl in &file.protocols {
        if protocols.iter().any(|(n, _)| n == &decl.name) {
            diagnostics.push(semantic(
                decl.line,
                format!("duplicate protocol name `{}`", decl.name),
            ));
            continue;
        }
        match build_tree(&decl.tree, &layout, &decl.name, decl.line) {
            Ok(tree) => protocols.push((decl.name.clone(), tree)),
            Err(diagnostic) => diagnostics.push(diagnostic),
        }
    }

    let declared: Vec<&str> = file.protocols.iter().map(|p| p.name.as_str()).collect();
    let mut directives = Vec::new();
    for decl in &file.directives {
        match check_directive(
            &decl.directive,
            scenario.len(),
            layout.num_parties(),
            &declared,
        ) {
            Ok(()) => directives.push(decl.directive.clone()),
            Err(message) => diagnostics.push(semantic(decl.line, message)),
        }
    }

    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    Ok(CompiledScenario {
        scenario,
        state_names: names,
        protocols,
        directives,
    })
}

/// One analysis outcome with its JSON-ready evidence. Serializes with
/// `analysis` first, the evidence keys in insertion order, and `pass` last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub analysis: String,
    #[serde(flatten)]
    pub evidence: serde_json::Map<String, serde_json::Value>,
    pub pass: bool,
}

/// Full result of a CLI run: the command echo, one verdict per analysis,
/// and the conjunction of their pass flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, verdicts: Vec<Verdict>) -> Report {
        let pass = verdicts.iter().all(|v| v.pass);
        Report {
            command: command.into(),
            verdicts,
            pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_file() -> ScenarioFile {
        parse_scenario(
            "parties 2 2\n\
             state e1 = bell:phi+\n\
             state e2 = bell:phi-\n\
             state e3 = bell:psi+\n",
        )
        .expect("valid file")
    }

    #[test]
    fn compile_builds_the_scenario_in_declaration_order() {
        let compiled = compile(&bell_file()).unwrap();
        assert_eq!(compiled.state_names, ["e1", "e2", "e3"]);
        assert_eq!(compiled.scenario.len(), 3);
        assert_eq!(compiled.scenario.layout().dims(), &[2, 2]);
    }

    #[test]
    fn missing_parties_is_an_empty_scenario_error() {
        let diagnostics = compile(&ScenarioFile::default()).unwrap_err();
        assert!(diagnostics[0].message.contains("empty scenario"));
        assert_eq!(diagnostics[0].line, 1);
    }

    #[test]
    fn duplicate_names_are_rejected_with_lines() {
        let text = "parties 2 2\nstate a = bell:phi+\nstate a = bell:phi-\n";
        let diagnostics = parse_scenario(text).unwrap_err();
        assert_eq!(diagnostics[0].line, 3);
        assert!(diagnostics[0].message.contains("duplicate state name `a`"));
    }

    #[test]
    fn directive_validation_catches_bad_references() {
        let text = "parties 2 2\n\
                    state a = bell:phi+\n\
                    analyze verify question=2 protocol=zz\n";
        let diagnostics = parse_scenario(text).unwrap_err();
        assert_eq!(diagnostics[0].line, 3);
        assert!(diagnostics[0].message.contains("question 2 out of range"));
    }

    #[test]
    fn tree_compilation_checks_outcome_coverage() {
        let text = "parties 2 2\n\
                    state a = bell:phi+\n\
                    protocol p {\n\
                      measure party=0 instrument=pauli:z {\n\
                        outcome +1 { answer 1 }\n\
                      }\n\
                    }\n";
        let diagnostics = parse_scenario(text).unwrap_err();
        assert!(diagnostics[0].message.contains("missing outcome `-1`"));
        assert_eq!(diagnostics[0].line, 3);
    }
}
