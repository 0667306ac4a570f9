//! Executes analysis directives against a compiled scenario and packages
//! the results as verdicts.
//!
//! Every probability and entropy in the evidence is rounded to 12
//! significant digits before it enters the JSON value, so serialized
//! reports are bit-stable. Non-finite values become `null` alongside an
//! explicit flag (the strict relative entropy diverges exactly when
//! `support_violation` is true).

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{CompiledScenario, Directive, Report, Verdict};
use crate::ent::two_copy_bound_report;
use crate::locc::ProtocolTree;
use crate::lra::{
    bell_scenario, bell_strategy, classify_complete_basis, lra_to_conclusive,
    orthogonality_constraint_space, verify_authentication, verify_complete_lra, CompleteLraReport,
    LraError, Strategy,
};
use crate::qcore::{CMatrix, TOL};

/// A directive that cannot run against this scenario. Reference errors
/// (unknown names, out-of-range indices) are usage mistakes; anything else
/// is an analysis failure.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Lra(#[from] LraError),
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error(
        "complete analysis needs one protocol per question: got {got}, scenario has {expected}"
    )]
    ProtocolCount { got: usize, expected: usize },
    #[error("party {party} out of range (layout has {parties} parties)")]
    PartyOutOfRange { party: usize, parties: usize },
}

impl AnalysisError {
    /// True for errors in how the analysis was requested (bad names or
    /// indices), as opposed to failures of the analysis itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            AnalysisError::UnknownProtocol(_)
                | AnalysisError::ProtocolCount { .. }
                | AnalysisError::PartyOutOfRange { .. }
                | AnalysisError::Lra(LraError::QuestionOutOfRange { .. })
        )
    }
}

/// Rounds to 12 significant digits; non-finite values become `null`.
fn sig12(value: f64) -> Value {
    if !value.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{value:.11e}").parse().expect("formatted float");
    Value::from(rounded)
}

fn probabilities_json(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&p| sig12(p)).collect())
}

/// Matrix as rows of `[re, im]` entry pairs.
fn matrix_json(matrix: &CMatrix) -> Value {
    Value::Array(
        (0..matrix.nrows())
            .map(|r| {
                Value::Array(
                    (0..matrix.ncols())
                        .map(|c| {
                            let entry = matrix[(r, c)];
                            Value::Array(vec![sig12(entry.re), sig12(entry.im)])
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn find_tree<'a>(
    compiled: &'a CompiledScenario,
    name: &str,
) -> Result<&'a ProtocolTree, AnalysisError> {
    compiled
        .tree(name)
        .ok_or_else(|| AnalysisError::UnknownProtocol(name.to_string()))
}

/// Converts a 1-based surface question number to the library index.
fn question_index(compiled: &CompiledScenario, question: usize) -> Result<usize, AnalysisError> {
    let count = compiled.scenario.len();
    if question == 0 || question > count {
        return Err(AnalysisError::Lra(LraError::QuestionOutOfRange {
            question,
            count,
        }));
    }
    Ok(question - 1)
}

fn verify_verdict(
    compiled: &CompiledScenario,
    question: usize,
    protocol: &str,
) -> Result<Verdict, AnalysisError> {
    let k = question_index(compiled, question)?;
    let tree = find_tree(compiled, protocol)?;
    let report = verify_authentication(&compiled.scenario, k, tree)?;
    let mut evidence = Map::new();
    evidence.insert("question".into(), json!(question));
    evidence.insert("protocol".into(), json!(protocol));
    evidence.insert("kind".into(), json!(report.kind().to_string()));
    evidence.insert(
        "target_probability".into(),
        sig12(report.target_probability()),
    );
    evidence.insert("max_off_target".into(), sig12(report.max_off_target()));
    evidence.insert(
        "answer_one_probabilities".into(),
        probabilities_json(&report.answer_one_probabilities),
    );
    Ok(Verdict {
        analysis: "verify".into(),
        evidence,
        pass: report.verified,
    })
}

fn complete_evidence(
    report: &CompleteLraReport,
    names: &[String],
    protocols: &[String],
) -> Map<String, Value> {
    let mut evidence = Map::new();
    evidence.insert("protocols".into(), json!(protocols));
    evidence.insert("kind".into(), json!(report.kind().to_string()));
    let questions: Vec<Value> = report
        .checks
        .iter()
        .map(|check| {
            json!({
                "question": check.question + 1,
                "state": names[check.question],
                "protocol": protocols[check.question],
                "target_probability": sig12(check.target_probability()),
                "max_off_target": sig12(check.max_off_target()),
                "verified": check.verified,
            })
        })
        .collect();
    evidence.insert("questions".into(), Value::Array(questions));
    evidence
}

fn complete_verdict(
    compiled: &CompiledScenario,
    protocols: &Option<Vec<String>>,
) -> Result<Verdict, AnalysisError> {
    let names: Vec<String> = match protocols {
        Some(names) => names.clone(),
        None => compiled.protocols.iter().map(|(n, _)| n.clone()).collect(),
    };
    if names.len() != compiled.scenario.len() {
        return Err(AnalysisError::ProtocolCount {
            got: names.len(),
            expected: compiled.scenario.len(),
        });
    }
    let trees: Vec<ProtocolTree> = names
        .iter()
        .map(|name| find_tree(compiled, name).cloned())
        .collect::<Result<_, _>>()?;
    let report = verify_complete_lra(&compiled.scenario, &Strategy::new(trees))?;
    Ok(Verdict {
        analysis: "complete".into(),
        evidence: complete_evidence(&report, &compiled.state_names, &names),
        pass: report.verified,
    })
}

fn nullspace_verdict(
    compiled: &CompiledScenario,
    question: usize,
    party: usize,
) -> Result<Verdict, AnalysisError> {
    let k = question_index(compiled, question)?;
    let parties = compiled.scenario.layout().num_parties();
    if party >= parties {
        return Err(AnalysisError::PartyOutOfRange { party, parties });
    }
    let space = orthogonality_constraint_space(&compiled.scenario, k, party)?;
    let mut evidence = Map::new();
    evidence.insert("question".into(), json!(question));
    evidence.insert("party".into(), json!(party));
    evidence.insert("dimension".into(), json!(space.dimension));
    evidence.insert("trivial".into(), json!(space.trivial));
    evidence.insert("kind".into(), json!(space.kind().to_string()));
    evidence.insert("identity_residual".into(), sig12(space.identity_residual));
    evidence.insert(
        "max_constraint_residual".into(),
        sig12(space.max_constraint_residual),
    );
    evidence.insert(
        "basis".into(),
        Value::Array(space.basis.iter().map(matrix_json).collect()),
    );
    Ok(Verdict {
        analysis: "nullspace".into(),
        evidence,
        pass: true,
    })
}

fn classify_verdict(compiled: &CompiledScenario) -> Verdict {
    let classification = classify_complete_basis(&compiled.scenario);
    let members: Vec<usize> = classification
        .product_members
        .iter()
        .map(|&k| k + 1)
        .collect();
    let member_names: Vec<&String> = classification
        .product_members
        .iter()
        .map(|&k| &compiled.state_names[k])
        .collect();
    let mut evidence = Map::new();
    evidence.insert("states".into(), json!(classification.states));
    evidence.insert("dimension".into(), json!(classification.dimension));
    evidence.insert("kind".into(), json!(classification.kind.to_string()));
    evidence.insert("product_members".into(), json!(members));
    evidence.insert("product_member_names".into(), json!(member_names));
    Verdict {
        analysis: "classify".into(),
        evidence,
        pass: true,
    }
}

fn conclusive_verdict(
    compiled: &CompiledScenario,
    question: usize,
    protocol: &str,
    label: &Option<String>,
) -> Result<Verdict, AnalysisError> {
    let k = question_index(compiled, question)?;
    let tree = find_tree(compiled, protocol)?;
    let label = label
        .clone()
        .unwrap_or_else(|| compiled.state_names[k].clone());
    let auth = verify_authentication(&compiled.scenario, k, tree)?;
    let mut evidence = Map::new();
    evidence.insert("question".into(), json!(question));
    evidence.insert("protocol".into(), json!(protocol));
    evidence.insert("label".into(), json!(label));
    evidence.insert("authenticated".into(), json!(auth.verified));
    if !auth.verified {
        // no reduction exists; report why instead of probabilities
        evidence.insert(
            "target_probability".into(),
            sig12(auth.target_probability()),
        );
        evidence.insert("max_off_target".into(), sig12(auth.max_off_target()));
        return Ok(Verdict {
            analysis: "conclusive".into(),
            evidence,
            pass: false,
        });
    }
    let reduction = lra_to_conclusive(&compiled.scenario, k, tree, &label)?;
    evidence.insert(
        "success_probability".into(),
        sig12(reduction.success_probability),
    );
    evidence.insert(
        "mislabel_probability".into(),
        sig12(reduction.mislabel_probability),
    );
    Ok(Verdict {
        analysis: "conclusive".into(),
        evidence,
        pass: reduction.mislabel_probability <= TOL,
    })
}

fn prop2_verdict() -> Result<Verdict, AnalysisError> {
    let report = two_copy_bound_report()?;
    let mut evidence = Map::new();
    evidence.insert(
        "conclusive_probability".into(),
        sig12(report.conclusive_probability),
    );
    evidence.insert(
        "mislabel_probability".into(),
        sig12(report.mislabel_probability),
    );
    evidence.insert("paper_bound".into(), sig12(report.paper_bound));
    evidence.insert("computed_bound".into(), sig12(report.computed_bound));
    evidence.insert("log3_quarter".into(), sig12(report.log3_quarter));
    evidence.insert(
        "entanglement_entropy".into(),
        sig12(report.entanglement_entropy),
    );
    evidence.insert("support_violation".into(), json!(report.support_violation));
    // the strict quantity diverges exactly when the support is violated
    evidence.insert(
        "strict_relative_entropy".into(),
        if report.support_violation {
            Value::Null
        } else {
            sig12(report.computed_bound)
        },
    );
    evidence.insert(
        "sigma_support_dimension".into(),
        json!(report.sigma_support_dimension),
    );
    let items: Vec<Value> = report
        .items
        .iter()
        .map(|item| {
            json!({
                "label": item.label,
                "value": sig12(item.value),
                "pass": item.pass,
            })
        })
        .collect();
    evidence.insert("items".into(), Value::Array(items));
    Ok(Verdict {
        analysis: "prop2".into(),
        evidence,
        pass: report.pass,
    })
}

/// Runs one directive and packages the outcome. Directives that were
/// validated at compile time cannot fail here; CLI-supplied arguments can.
pub fn run_directive(
    compiled: &CompiledScenario,
    directive: &Directive,
) -> Result<Verdict, AnalysisError> {
    match directive {
        Directive::Verify { question, protocol } => verify_verdict(compiled, *question, protocol),
        Directive::Complete { protocols } => complete_verdict(compiled, protocols),
        Directive::Nullspace { question, party } => nullspace_verdict(compiled, *question, *party),
        Directive::Classify => Ok(classify_verdict(compiled)),
        Directive::Conclusive {
            question,
            protocol,
            label,
        } => conclusive_verdict(compiled, *question, protocol, label),
        Directive::Prop2 => prop2_verdict(),
    }
}

/// Builds the three-Bell-state scenario with its Pauli-correlation strategy
/// and verifies every question.
pub fn demo_bell_report() -> Result<Report, AnalysisError> {
    let scenario = bell_scenario();
    let strategy = bell_strategy();
    let report = verify_complete_lra(&scenario, &strategy)?;
    let names: Vec<String> = ["phi+", "phi-", "psi+"].map(String::from).to_vec();
    let protocols: Vec<String> = ["yy", "xx", "zz"].map(String::from).to_vec();
    let verdict = Verdict {
        analysis: "complete".into(),
        evidence: complete_evidence(&report, &names, &protocols),
        pass: report.verified,
    };
    Ok(Report::new("demo bell", vec![verdict]))
}

#[cfg(test)]
mod tests {
    use super::super::{compile, parse_scenario, report_from_json, report_to_json};
    use super::*;

    const BELL_TEXT: &str = "\
parties 2 2
state e1 = bell:phi+
state e2 = bell:phi-
state e3 = bell:psi+
protocol yy {
  measure party=0 instrument=pauli:y {
    outcome +1 {
      measure party=1 instrument=pauli:y {
        outcome +1 { answer 0 }
        outcome -1 { answer 1 }
      }
    }
    outcome -1 {
      measure party=1 instrument=pauli:y {
        outcome +1 { answer 1 }
        outcome -1 { answer 0 }
      }
    }
  }
}
";

    fn compiled() -> CompiledScenario {
        compile(&parse_scenario(BELL_TEXT).unwrap()).unwrap()
    }

    #[test]
    fn verify_verdict_passes_for_the_matching_question() {
        let c = compiled();
        let verdict = run_directive(
            &c,
            &Directive::Verify {
                question: 1,
                protocol: "yy".into(),
            },
        )
        .unwrap();
        assert!(verdict.pass);
        assert_eq!(verdict.evidence["target_probability"], json!(1.0));
        assert_eq!(verdict.evidence["max_off_target"], json!(0.0));

        let verdict = run_directive(
            &c,
            &Directive::Verify {
                question: 2,
                protocol: "yy".into(),
            },
        )
        .unwrap();
        assert!(!verdict.pass);
    }

    #[test]
    fn usage_errors_are_distinguished() {
        let c = compiled();
        let err = run_directive(
            &c,
            &Directive::Verify {
                question: 9,
                protocol: "yy".into(),
            },
        )
        .unwrap_err();
        assert!(err.is_usage());
        let err = run_directive(
            &c,
            &Directive::Verify {
                question: 1,
                protocol: "nope".into(),
            },
        )
        .unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn conclusive_verdict_reports_one_third_for_the_bell_set() {
        let c = compiled();
        let verdict = run_directive(
            &c,
            &Directive::Conclusive {
                question: 1,
                protocol: "yy".into(),
                label: None,
            },
        )
        .unwrap();
        assert!(verdict.pass);
        assert_eq!(verdict.evidence["label"], json!("e1"));
        let p = verdict.evidence["success_probability"].as_f64().unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn demo_report_passes_and_round_trips_through_json() {
        let report = demo_bell_report().unwrap();
        assert!(report.pass);
        assert_eq!(report.command, "demo bell");
        let json = report_to_json(&report);
        let back = report_from_json(&json).unwrap();
        assert_eq!(report, back);
        // key order is fixed: command, verdicts, pass
        let command_at = json.find("\"command\"").unwrap();
        let verdicts_at = json.find("\"verdicts\"").unwrap();
        let pass_at = json.rfind("\"pass\"").unwrap();
        assert!(command_at < verdicts_at && verdicts_at < pass_at);
    }

    #[test]
    fn prop2_verdict_carries_the_required_keys() {
        let verdict = prop2_verdict().unwrap();
        assert!(verdict.pass);
        for key in [
            "conclusive_probability",
            "paper_bound",
            "computed_bound",
            "log3_quarter",
        ] {
            assert!(verdict.evidence.contains_key(key), "missing {key}");
        }
        let p = verdict.evidence["conclusive_probability"].as_f64().unwrap();
        assert!((p - 1.0 / 12.0).abs() < 1e-9);
        assert_eq!(verdict.evidence["strict_relative_entropy"], Value::Null);
        assert_eq!(verdict.evidence["support_violation"], json!(true));
    }

    #[test]
    fn twelve_significant_digits_are_stable() {
        assert_eq!(sig12(1.0 / 3.0), json!(0.333333333333));
        assert_eq!(sig12(0.0), json!(0.0));
        assert_eq!(sig12(f64::INFINITY), Value::Null);
        let text = serde_json::to_string(&sig12(1.0 / 12.0)).unwrap();
        assert_eq!(text, "0.0833333333333");
    }
}
