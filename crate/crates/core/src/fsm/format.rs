//! Document formats for machines and traces.
//!
//! A machine document:
//!
//! ```json
//! { "states": 2, "inputs": ["a"], "outputs": ["0", "1"], "initial": 0,
//!   "delta": [[1], [0]], "lambda": ["0", "1"] }
//! ```
//!
//! A trace document is either a bare list of step records or an object with
//! optional alphabets and a `steps` list. Each step has an `output` and, from
//! the second step on, an optional `input` (the symbol applied before the
//! observation). Symbols may be written as strings or integers.

use serde::{Deserialize, Serialize};

use super::{Alphabet, AlphabetKind, FsmError, Machine, Result, Symbol, Trace, AUTONOMOUS_INPUT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineDoc {
    pub states: usize,
    pub inputs: Vec<Symbol>,
    pub outputs: Vec<Symbol>,
    pub initial: usize,
    pub delta: Vec<Vec<usize>>,
    pub lambda: Vec<Symbol>,
}

impl From<&Machine> for MachineDoc {
    fn from(m: &Machine) -> Self {
        MachineDoc {
            states: m.state_count(),
            inputs: m.inputs().symbols().to_vec(),
            outputs: m.outputs().symbols().to_vec(),
            initial: m.initial(),
            delta: m.transitions().to_vec(),
            lambda: m
                .output_table()
                .iter()
                .map(|&o| m.outputs().symbol(o).clone())
                .collect(),
        }
    }
}

impl TryFrom<MachineDoc> for Machine {
    type Error = FsmError;

    fn try_from(doc: MachineDoc) -> Result<Machine> {
        let inputs = Alphabet::new(doc.inputs, AlphabetKind::Input)?;
        let outputs = Alphabet::new(doc.outputs, AlphabetKind::Output)?;
        if doc.delta.len() != doc.states {
            return Err(FsmError::InvalidMachine(format!(
                "`states` is {} but `delta` has {} rows",
                doc.states,
                doc.delta.len()
            )));
        }
        let lambda = doc
            .lambda
            .iter()
            .map(|s| outputs.lookup(s, AlphabetKind::Output))
            .collect::<Result<_>>()?;
        Machine::new(inputs, outputs, doc.delta, lambda, doc.initial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub output: Symbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceDoc {
    Steps(Vec<Step>),
    Document {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inputs: Option<Vec<Symbol>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outputs: Option<Vec<Symbol>>,
        steps: Vec<Step>,
    },
}

impl TraceDoc {
    /// Parses either document shape, reporting errors against the shape the
    /// text actually has.
    pub fn parse(text: &str) -> serde_json::Result<TraceDoc> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            #[serde(default)]
            inputs: Option<Vec<Symbol>>,
            #[serde(default)]
            outputs: Option<Vec<Symbol>>,
            steps: Vec<Step>,
        }
        if text.trim_start().starts_with('[') {
            serde_json::from_str(text).map(TraceDoc::Steps)
        } else {
            let d: Doc = serde_json::from_str(text)?;
            Ok(TraceDoc::Document {
                inputs: d.inputs,
                outputs: d.outputs,
                steps: d.steps,
            })
        }
    }

    pub fn steps(&self) -> &[Step] {
        match self {
            TraceDoc::Steps(s) | TraceDoc::Document { steps: s, .. } => s,
        }
    }

    /// Builds the trace. Alphabets come from the overrides, then the
    /// document, then the symbols in order of first appearance. Steps with
    /// no inputs at all use the autonomous input symbol.
    pub fn into_trace(
        self,
        input_override: Option<Vec<Symbol>>,
        output_override: Option<Vec<Symbol>>,
    ) -> Result<Trace> {
        let (doc_inputs, doc_outputs, steps) = match self {
            TraceDoc::Steps(steps) => (None, None, steps),
            TraceDoc::Document {
                inputs,
                outputs,
                steps,
            } => (inputs, outputs, steps),
        };
        let Some(first) = steps.first() else {
            return Err(FsmError::InvalidTrace("trace has no steps".into()));
        };
        if first.input.is_some() {
            return Err(FsmError::InvalidTrace(
                "the first step is the initial observation and takes no input".into(),
            ));
        }
        let recorded: Vec<Option<Symbol>> = steps[1..].iter().map(|s| s.input.clone()).collect();
        let inputs: Vec<Symbol> = if recorded.iter().all(Option::is_none) {
            vec![AUTONOMOUS_INPUT.into(); recorded.len()]
        } else if let Some(pos) = recorded.iter().position(Option::is_none) {
            return Err(FsmError::InvalidTrace(format!(
                "step {} has no input while other steps do",
                pos + 1
            )));
        } else {
            recorded.into_iter().flatten().collect()
        };
        let outputs: Vec<Symbol> = steps.into_iter().map(|s| s.output).collect();

        let input_alpha = input_override
            .or(doc_inputs)
            .unwrap_or_else(|| first_appearance(&inputs, AUTONOMOUS_INPUT));
        let output_alpha = output_override
            .or(doc_outputs)
            .unwrap_or_else(|| first_appearance(&outputs, ""));
        Trace::new(
            Alphabet::new(input_alpha, AlphabetKind::Input)?,
            Alphabet::new(output_alpha, AlphabetKind::Output)?,
            &inputs,
            &outputs,
        )
    }
}

impl From<&Trace> for TraceDoc {
    fn from(t: &Trace) -> Self {
        let inputs = t.input_symbols();
        let steps = t
            .output_symbols()
            .into_iter()
            .enumerate()
            .map(|(i, output)| Step {
                output,
                input: i.checked_sub(1).map(|j| inputs[j].clone()),
            })
            .collect();
        TraceDoc::Document {
            inputs: Some(t.input_alphabet().symbols().to_vec()),
            outputs: Some(t.output_alphabet().symbols().to_vec()),
            steps,
        }
    }
}

fn first_appearance(symbols: &[Symbol], fallback: &str) -> Vec<Symbol> {
    let mut seen: Vec<Symbol> = Vec::new();
    for s in symbols {
        if !seen.contains(s) {
            seen.push(s.clone());
        }
    }
    if seen.is_empty() {
        seen.push(fallback.into());
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::fixtures::*;
    use proptest::prelude::*;

    #[test]
    fn parse_bare_steps() {
        let doc: TraceDoc = serde_json::from_str(r#"[{"output": 0}, {"output": 1}]"#).unwrap();
        let t = doc.into_trace(None, None).unwrap();
        assert_eq!(t.outputs(), &[0, 1]);
        assert_eq!(t.input_alphabet(), &unary());
        assert_eq!(t.output_alphabet(), &binary());
    }

    #[test]
    fn parse_document_with_alphabets() {
        let doc: TraceDoc = serde_json::from_str(
            r#"{"outputs": [3, 7], "steps": [{"output": 3}, {"output": 3}, {"output": 3}]}"#,
        )
        .unwrap();
        let t = doc.into_trace(None, None).unwrap();
        assert_eq!(t.output_alphabet(), &Alphabet::of(&["3", "7"]));
    }

    #[test]
    fn overrides_take_precedence() {
        let doc: TraceDoc = serde_json::from_str(r#"[{"output": 0}]"#).unwrap();
        let t = doc.into_trace(None, Some(vec!["0".into(), "1".into()])).unwrap();
        assert_eq!(t.output_alphabet().len(), 2);
    }

    #[test]
    fn malformed_traces() {
        let bad: &[&str] = &[
            r#"[]"#,
            r#"[{"output": 0, "input": "a"}]"#,
            r#"[{"output": 0}, {"output": 1, "input": "a"}, {"output": 0}]"#,
        ];
        for src in bad {
            let doc: TraceDoc = serde_json::from_str(src).unwrap();
            assert!(doc.into_trace(None, None).is_err(), "{src}");
        }
        let err = TraceDoc::parse(r#"[{"outcome": 0}]"#).unwrap_err().to_string();
        assert!(err.contains("outcome"), "{err}");
        let err = TraceDoc::parse(r#"{"step": []}"#).unwrap_err().to_string();
        assert!(err.contains("step"), "{err}");
    }

    #[test]
    fn machine_doc_validation() {
        let doc = MachineDoc {
            states: 2,
            inputs: vec!["a".into()],
            outputs: vec!["0".into(), "1".into()],
            initial: 0,
            delta: vec![vec![1]],
            lambda: vec!["0".into()],
        };
        assert!(Machine::try_from(doc).is_err());
    }

    #[test]
    fn machine_doc_field_names() {
        let v = serde_json::to_value(MachineDoc::from(&toggle())).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "states": 2, "inputs": ["a"], "outputs": ["0", "1"], "initial": 0,
                "delta": [[1], [0]], "lambda": ["0", "1"]
            })
        );
    }

    fn arb_machine() -> impl Strategy<Value = Machine> {
        (1usize..5, 1usize..3, 1usize..4).prop_flat_map(|(n, k, o)| {
            (
                proptest::collection::vec(proptest::collection::vec(0..n, k), n),
                proptest::collection::vec(0..o, n),
                0..n,
            )
                .prop_map(move |(delta, lambda, initial)| {
                    let inputs: Vec<Symbol> = (0..k).map(|i| Symbol::new(format!("i{i}"))).collect();
                    let outputs: Vec<Symbol> = (0..o as i64).map(Symbol::from).collect();
                    Machine::new(
                        Alphabet::new(inputs, AlphabetKind::Input).unwrap(),
                        Alphabet::new(outputs, AlphabetKind::Output).unwrap(),
                        delta,
                        lambda,
                        initial,
                    )
                    .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn machine_doc_roundtrip(m in arb_machine()) {
            let text = serde_json::to_string(&MachineDoc::from(&m)).unwrap();
            let back: MachineDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(Machine::try_from(back).unwrap(), m);
        }

        #[test]
        fn trace_doc_roundtrip(outs in proptest::collection::vec(0i64..3, 1..8)) {
            let syms: Vec<Symbol> = outs.iter().map(|&x| Symbol::from(x)).collect();
            let alpha = Alphabet::of(&["0", "1", "2"]);
            let t = Trace::autonomous(alpha, &syms).unwrap();
            let text = serde_json::to_string(&TraceDoc::from(&t)).unwrap();
            let back: TraceDoc = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back.into_trace(None, None).unwrap(), t);
        }
    }
}
