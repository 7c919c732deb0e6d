use super::{Alphabet, AlphabetKind, FsmError, Machine, Result, Symbol};

/// Input symbol used when a trace records outcomes without declared inputs.
pub const AUTONOMOUS_INPUT: &str = "a";

/// A finite record `k_1 … k_N` of output symbols, with the `N - 1` inputs
/// applied between successive observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    input_alphabet: Alphabet,
    output_alphabet: Alphabet,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl Trace {
    pub fn new(
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        inputs: &[Symbol],
        outputs: &[Symbol],
    ) -> Result<Self> {
        if outputs.is_empty() {
            return Err(FsmError::InvalidTrace("a trace needs at least one output".into()));
        }
        if inputs.len() + 1 != outputs.len() {
            return Err(FsmError::InvalidTrace(format!(
                "{} outputs need {} inputs, got {}",
                outputs.len(),
                outputs.len() - 1,
                inputs.len()
            )));
        }
        let inputs = inputs
            .iter()
            .map(|s| input_alphabet.lookup(s, AlphabetKind::Input))
            .collect::<Result<_>>()?;
        let outputs = outputs
            .iter()
            .map(|s| output_alphabet.lookup(s, AlphabetKind::Output))
            .collect::<Result<_>>()?;
        Ok(Trace {
            input_alphabet,
            output_alphabet,
            inputs,
            outputs,
        })
    }

    /// A trace over the single input symbol [`AUTONOMOUS_INPUT`].
    pub fn autonomous(output_alphabet: Alphabet, outputs: &[Symbol]) -> Result<Self> {
        let input: Symbol = AUTONOMOUS_INPUT.into();
        let inputs = vec![input.clone(); outputs.len().saturating_sub(1)];
        Trace::new(
            Alphabet::new(vec![input], AlphabetKind::Input)?,
            output_alphabet,
            &inputs,
            outputs,
        )
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn input_symbols(&self) -> Vec<Symbol> {
        self.inputs.iter().map(|&i| self.input_alphabet.symbol(i).clone()).collect()
    }

    pub fn output_symbols(&self) -> Vec<Symbol> {
        self.outputs.iter().map(|&o| self.output_alphabet.symbol(o).clone()).collect()
    }
}

/// True iff the machine, started at its initial state and fed the trace's
/// inputs, emits exactly the trace's outputs.
pub fn consistent(machine: &Machine, trace: &Trace) -> Result<bool> {
    let word = trace
        .input_symbols()
        .iter()
        .map(|s| machine.inputs().lookup(s, AlphabetKind::Input))
        .collect::<Result<Vec<_>>>()?;
    let expected = trace
        .output_symbols()
        .iter()
        .map(|s| machine.outputs().lookup(s, AlphabetKind::Output))
        .collect::<Result<Vec<_>>>()?;
    Ok(machine.run(&word)? == expected)
}

/// The chain machine that takes the record literally: one state per position,
/// state `i` emits `k_{i+1}` and steps to `i + 1` on the recorded input.
/// Inputs that were not recorded at a position leave the state unchanged, and
/// the final state self-loops.
pub fn trace_to_fsm(trace: &Trace) -> Machine {
    chain_machine(trace, None)
}

/// Chain machine, optionally terminated by one extra state with the given
/// output that the final chain state enters under every input.
pub(super) fn chain_machine(trace: &Trace, tail_output: Option<usize>) -> Machine {
    let n = trace.len();
    let width = trace.input_alphabet.len();
    let mut delta: Vec<Vec<usize>> = (0..n).map(|s| vec![s; width]).collect();
    for (s, &i) in trace.inputs.iter().enumerate() {
        delta[s][i] = s + 1;
    }
    let mut lambda = trace.outputs.clone();
    if let Some(out) = tail_output {
        delta[n - 1] = vec![n; width];
        delta.push(vec![n; width]);
        lambda.push(out);
    }
    Machine::from_parts_unchecked(
        trace.input_alphabet.clone(),
        trace.output_alphabet.clone(),
        delta,
        lambda,
        0,
    )
}
