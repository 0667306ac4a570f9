//! Serializers: scenario files back to their text form, reports to JSON.
//!
//! `parse(serialize(file))` is structurally the identity: amplitudes are
//! printed with Rust's shortest round-trip float form, so reparsing
//! reproduces each value bit for bit. Reports serialize with a fixed key
//! order (`command`, `verdicts`, `pass`; inside a verdict `analysis` first
//! and `pass` last) so golden output is stable.

use num_complex::Complex64;

use super::{Directive, InstrumentDecl, Report, ScenarioFile, StateCtor, TreeDecl};

fn complex_text(value: &Complex64) -> String {
    format!("{},{}", value.re, value.im)
}

fn complex_list_text(values: &[Complex64]) -> String {
    values
        .iter()
        .map(complex_text)
        .collect::<Vec<_>>()
        .join("; ")
}

fn ctor_text(ctor: &StateCtor) -> String {
    match ctor {
        StateCtor::BellPhiPlus => "bell:phi+".into(),
        StateCtor::BellPhiMinus => "bell:phi-".into(),
        StateCtor::BellPsiPlus => "bell:psi+".into(),
        StateCtor::BellPsiMinus => "bell:psi-".into(),
        StateCtor::Basis(index) => format!("basis:{index}"),
        StateCtor::Psi4 => "psi4".into(),
        StateCtor::Amps(values) => format!("amps [{}]", complex_list_text(values)),
    }
}

fn instrument_text(instrument: &InstrumentDecl) -> String {
    match instrument {
        InstrumentDecl::Pauli(axis) => format!("pauli:{axis}"),
        InstrumentDecl::Projectors(vectors) => {
            let inner = vectors
                .iter()
                .map(|v| format!("[{}]", complex_list_text(v)))
                .collect::<Vec<_>>()
                .join("; ");
            format!("projectors:[{inner}]")
        }
    }
}

fn write_tree(out: &mut String, tree: &TreeDecl, depth: usize) {
    let pad = "  ".repeat(depth);
    match tree {
        TreeDecl::Answer(answer) => {
            out.push_str(&format!("{pad}answer {answer}\n"));
        }
        TreeDecl::Measure {
            party,
            instrument,
            outcomes,
        } => {
            out.push_str(&format!(
                "{pad}measure party={party} instrument={} {{\n",
                instrument_text(instrument)
            ));
            for (label, sub) in outcomes {
                out.push_str(&format!("{pad}  outcome {label} {{\n"));
                write_tree(out, sub, depth + 2);
                out.push_str(&format!("{pad}  }}\n"));
            }
            out.push_str(&format!("{pad}}}\n"));
        }
    }
}

fn directive_text(directive: &Directive) -> String {
    match directive {
        Directive::Verify { question, protocol } => {
            format!("analyze verify question={question} protocol={protocol}")
        }
        Directive::Complete { protocols } => match protocols {
            Some(names) => format!("analyze complete protocols={}", names.join(",")),
            None => "analyze complete".into(),
        },
        Directive::Nullspace { question, party } => {
            format!("analyze nullspace question={question} party={party}")
        }
        Directive::Classify => "analyze classify".into(),
        Directive::Conclusive {
            question,
            protocol,
            label,
        } => match label {
            Some(label) => {
                format!("analyze conclusive question={question} protocol={protocol} label={label}")
            }
            None => format!("analyze conclusive question={question} protocol={protocol}"),
        },
        Directive::Prop2 => "analyze prop2".into(),
    }
}

/// Renders a scenario file in canonical layout: parties, states, protocols,
/// directives, blank lines between sections.
pub fn serialize_scenario(file: &ScenarioFile) -> String {
    let mut out = String::new();
    if let Some(parties) = &file.parties {
        out.push_str("parties");
        for dim in &parties.dims {
            out.push_str(&format!(" {dim}"));
        }
        out.push('\n');
    }
    if !file.states.is_empty() {
        out.push('\n');
        for state in &file.states {
            out.push_str(&format!(
                "state {} = {}\n",
                state.name,
                ctor_text(&state.ctor)
            ));
        }
    }
    for protocol in &file.protocols {
        out.push('\n');
        out.push_str(&format!("protocol {} {{\n", protocol.name));
        write_tree(&mut out, &protocol.tree, 1);
        out.push_str("}\n");
    }
    if !file.directives.is_empty() {
        out.push('\n');
        for directive in &file.directives {
            out.push_str(&directive_text(&directive.directive));
            out.push('\n');
        }
    }
    out
}

/// Pretty JSON with deterministic key order.
pub fn report_to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports contain only JSON-safe values")
}

/// Inverse of [`report_to_json`].
pub fn report_from_json(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

/// Human-readable rendering: one block per verdict, evidence lines
/// indented, compact JSON for composite values.
pub fn render_report(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("command: {}\n", report.command));
    for verdict in &report.verdicts {
        out.push_str(&format!(
            "{}: {}\n",
            verdict.analysis,
            if verdict.pass { "pass" } else { "FAIL" }
        ));
        for (key, value) in &verdict.evidence {
            let rendered =
                serde_json::to_string(value).expect("evidence contains only JSON-safe values");
            out.push_str(&format!("  {key}: {rendered}\n"));
        }
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.pass { "pass" } else { "FAIL" }
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_scenario;
    use super::*;

    #[test]
    fn bell_scenario_round_trips() {
        let text = "parties 2 2\n\
                    state e1 = bell:phi+\n\
                    state e2 = bell:phi-\n\
                    state e3 = bell:psi+\n\
                    protocol zz {\n\
                      measure party=0 instrument=pauli:z {\n\
                        outcome +1 {\n\
                          measure party=1 instrument=pauli:z {\n\
                            outcome +1 { answer 0 }\n\
                            outcome -1 { answer 1 }\n\
                          }\n\
                        }\n\
                        outcome -1 { answer 0 }\n\
                      }\n\
                    }\n\
                    analyze verify question=3 protocol=zz\n\
                    analyze nullspace question=1 party=0\n\
                    analyze classify\n";
        let file = parse_scenario(text).unwrap();
        let reparsed = parse_scenario(&serialize_scenario(&file)).unwrap();
        assert_eq!(file, reparsed);
    }

    #[test]
    fn psi4_and_amps_round_trip_exactly() {
        let half: f64 = 1.0 / 2.0_f64.sqrt();
        let text = format!(
            "parties 3 3\nstate target = psi4\nstate flat = amps [{half},0; 0,0; 0,0; 0,0; \
             {half},0; 0,0; 0,0; 0,0; 0,0]\n"
        );
        let file = parse_scenario(&text).unwrap();
        let reparsed = parse_scenario(&serialize_scenario(&file)).unwrap();
        assert_eq!(file, reparsed);
        match (&file.states[1].ctor, &reparsed.states[1].ctor) {
            (StateCtor::Amps(a), StateCtor::Amps(b)) => {
                for (x, y) in a.iter().zip(b) {
                    assert_eq!(x.re.to_bits(), y.re.to_bits());
                }
            }
            other => panic!("expected amps, got {other:?}"),
        }
    }

    #[test]
    fn directives_round_trip_with_optional_arguments() {
        let text = "parties 2 2\n\
                    state a = bell:phi+\n\
                    state b = bell:phi-\n\
                    protocol p {\n\
                      measure party=0 instrument=pauli:z {\n\
                        outcome +1 { answer 1 }\n\
                        outcome -1 { answer 0 }\n\
                      }\n\
                    }\n\
                    protocol q {\n\
                      measure party=0 instrument=pauli:x {\n\
                        outcome +1 { answer 0 }\n\
                        outcome -1 { answer 1 }\n\
                      }\n\
                    }\n\
                    analyze complete\n\
                    analyze complete protocols=p,q\n\
                    analyze conclusive question=1 protocol=p label=first\n";
        let file = parse_scenario(text).unwrap();
        let reparsed = parse_scenario(&serialize_scenario(&file)).unwrap();
        assert_eq!(file, reparsed);
    }
}
