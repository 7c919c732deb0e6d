use super::trace::chain_machine;
use super::{consistent, distinguishing_experiment, minimize, Experiment, FsmError, Machine};
use super::{Result, Trace};

/// Two record-identical but experimentally distinguishable machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPair {
    pub machine_a: Machine,
    pub machine_b: Machine,
    pub separating: Experiment,
}

/// Builds a pair of inequivalent machines that both reproduce `trace`.
///
/// `machine_a` is the minimized chain machine with a self-looping final
/// state. `machine_b` extends the chain with one fresh state, entered from
/// the last position under every input, whose output is the first symbol of
/// the output alphabet that differs from the last recorded output.
pub fn witness_moore(trace: &Trace) -> Result<WitnessPair> {
    let alphabet = trace.output_alphabet();
    if alphabet.len() < 2 {
        return Err(FsmError::DegenerateOutputAlphabet(alphabet.clone()));
    }
    let last = *trace.outputs().last().expect("traces are nonempty");
    let divergent = (0..alphabet.len()).find(|&o| o != last).expect("two symbols");

    let machine_a = minimize(&chain_machine(trace, None));
    let machine_b = minimize(&chain_machine(trace, Some(divergent)));
    let separating = distinguishing_experiment(&machine_a, &machine_b)?
        .expect("chain and extended chain differ after the last record");

    debug_assert!(consistent(&machine_a, trace)? && consistent(&machine_b, trace)?);
    Ok(WitnessPair {
        machine_a,
        machine_b,
        separating,
    })
}
