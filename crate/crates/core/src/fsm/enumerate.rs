use super::minimize::{equivalence_blocks, is_bfs_numbered};
use super::{FsmError, Machine, Result, Trace};

/// Every behaviorally distinct machine with at most `max_states` states that
/// reproduces the trace, each given as its minimized canonical form, sorted
/// by [`Machine::encoding`]. An empty list means the bound is too small.
///
/// Each behavior has exactly one minimal canonical representative, so the
/// search walks transition tables that are already breadth-first numbered,
/// fixes the outputs the trace forces along its path, and keeps the
/// completions whose states are pairwise inequivalent.
pub fn enumerate_consistent(trace: &Trace, max_states: usize) -> Result<Vec<Machine>> {
    if max_states == 0 {
        return Err(FsmError::ZeroStateBound);
    }
    let width = trace.input_alphabet().len();
    let outputs = trace.output_alphabet().len();
    let mut found = Vec::new();

    for n in 1..=max_states {
        let mut cells = vec![0usize; n * width];
        loop {
            let delta: Vec<Vec<usize>> = cells.chunks(width).map(<[usize]>::to_vec).collect();
            if is_bfs_numbered(&delta) {
                if let Some(forced) = forced_outputs(&delta, trace) {
                    complete_outputs(&delta, &forced, outputs, |lambda| {
                        let (_, blocks) = equivalence_blocks(&delta, lambda);
                        if blocks == n {
                            found.push(Machine::from_parts_unchecked(
                                trace.input_alphabet().clone(),
                                trace.output_alphabet().clone(),
                                delta.clone(),
                                lambda.to_vec(),
                                0,
                            ));
                        }
                    });
                }
            }
            if !advance(&mut cells, n) {
                break;
            }
        }
    }

    found.sort_by_key(Machine::encoding);
    Ok(found)
}

/// Outputs pinned by walking the trace through `delta` from state 0, or
/// `None` if the walk demands two different outputs from one state.
fn forced_outputs(delta: &[Vec<usize>], trace: &Trace) -> Option<Vec<Option<usize>>> {
    let mut forced = vec![None; delta.len()];
    let mut state = 0;
    let mut outputs = trace.outputs().iter();
    let first = *outputs.next()?;
    forced[state] = Some(first);
    for (&input, &out) in trace.inputs().iter().zip(outputs) {
        state = delta[state][input];
        match forced[state] {
            Some(o) if o != out => return None,
            _ => forced[state] = Some(out),
        }
    }
    Some(forced)
}

fn complete_outputs(
    delta: &[Vec<usize>],
    forced: &[Option<usize>],
    outputs: usize,
    mut visit: impl FnMut(&[usize]),
) {
    let free: Vec<usize> = (0..delta.len()).filter(|&s| forced[s].is_none()).collect();
    let mut lambda: Vec<usize> = forced.iter().map(|o| o.unwrap_or(0)).collect();
    let mut digits = vec![0usize; free.len()];
    loop {
        for (&s, &d) in free.iter().zip(&digits) {
            lambda[s] = d;
        }
        visit(&lambda);
        if !advance(&mut digits, outputs) {
            return;
        }
    }
}

/// Odometer increment in base `radix`; false once it wraps around.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::fixtures::*;
    use crate::fsm::{consistent, equivalent, minimize, Alphabet, Symbol};

    fn trace(alpha: Alphabet, v: &[i64]) -> Trace {
        let syms: Vec<Symbol> = v.iter().map(|&x| Symbol::from(x)).collect();
        Trace::autonomous(alpha, &syms).unwrap()
    }

    #[test]
    fn repeater_and_absorber() {
        let found = enumerate_consistent(&trace(binary(), &[0, 1]), 2).unwrap();
        let absorber =
            Machine::new(unary(), binary(), vec![vec![1], vec![1]], vec![0, 1], 0).unwrap();
        assert_eq!(found, vec![toggle(), absorber]);
    }

    #[test]
    fn single_symbol_alphabet_has_one_machine() {
        let found = enumerate_consistent(&trace(Alphabet::of(&["0"]), &[0]), 1).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].output_table(), &[0]);
    }

    #[test]
    fn constant_one_is_excluded() {
        let found = enumerate_consistent(&trace(binary(), &[0]), 1).unwrap();
        assert_eq!(found, vec![constant(0)]);
    }

    #[test]
    fn too_small_bound_is_empty() {
        assert!(enumerate_consistent(&trace(binary(), &[0, 1]), 1).unwrap().is_empty());
        assert_eq!(
            enumerate_consistent(&trace(binary(), &[0]), 0),
            Err(FsmError::ZeroStateBound)
        );
    }

    #[test]
    fn results_are_minimal_consistent_and_distinct() {
        let t = trace(Alphabet::of(&["0", "1", "2"]), &[0, 2, 0]);
        let found = enumerate_consistent(&t, 4).unwrap();
        assert!(!found.is_empty());
        for (i, m) in found.iter().enumerate() {
            assert!(consistent(m, &t).unwrap());
            assert_eq!(&minimize(m), m);
            for other in &found[..i] {
                assert!(!equivalent(m, other).unwrap());
            }
        }
        let keys: Vec<_> = found.iter().map(Machine::encoding).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn odometer() {
        let mut d = vec![0, 0];
        let mut seen = 1;
        while advance(&mut d, 3) {
            seen += 1;
        }
        assert_eq!(seen, 9);
        assert_eq!(d, vec![0, 0]);
    }
}
