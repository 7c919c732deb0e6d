use std::collections::{BTreeMap, VecDeque};

use super::Machine;

/// Drops unreachable states and renumbers the rest in breadth-first order
/// from the initial state, visiting inputs in alphabet order. Isomorphic
/// machines (after trimming) get identical canonical forms.
pub fn canonical_form(machine: &Machine) -> Machine {
    let order = bfs_order(machine);
    let mut rename = vec![usize::MAX; machine.state_count()];
    for (new, &old) in order.iter().enumerate() {
        rename[old] = new;
    }
    let delta = order
        .iter()
        .map(|&s| machine.delta[s].iter().map(|&t| rename[t]).collect())
        .collect();
    let lambda = order.iter().map(|&s| machine.lambda[s]).collect();
    Machine::from_parts_unchecked(
        machine.inputs.clone(),
        machine.outputs.clone(),
        delta,
        lambda,
        0,
    )
}

fn bfs_order(machine: &Machine) -> Vec<usize> {
    let mut seen = vec![false; machine.state_count()];
    let mut order = Vec::with_capacity(machine.state_count());
    let mut queue = VecDeque::from([machine.initial]);
    seen[machine.initial] = true;
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for &t in &machine.delta[s] {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    order
}

/// True iff every state is reachable and states are already numbered in
/// breadth-first order from an initial state of 0.
pub(super) fn is_bfs_numbered(delta: &[Vec<usize>]) -> bool {
    // BFS numbering holds iff the first occurrence of each new state in the
    // row-major scan is exactly the next unused number.
    let mut next = 1;
    for (s, row) in delta.iter().enumerate() {
        if s >= next {
            return false;
        }
        for &t in row {
            if t > next {
                return false;
            }
            if t == next {
                next += 1;
            }
        }
    }
    next == delta.len()
}

/// Moore's partition refinement: returns the block of each state and the
/// number of blocks. States share a block iff they are output-equivalent.
pub(super) fn equivalence_blocks(delta: &[Vec<usize>], lambda: &[usize]) -> (Vec<usize>, usize) {
    let mut block = renumber(lambda.iter().map(|&o| vec![o]));
    let mut count = block.iter().max().map_or(0, |m| m + 1);
    loop {
        let refined = renumber((0..delta.len()).map(|s| {
            let mut sig = Vec::with_capacity(delta[s].len() + 1);
            sig.push(block[s]);
            sig.extend(delta[s].iter().map(|&t| block[t]));
            sig
        }));
        let refined_count = refined.iter().max().map_or(0, |m| m + 1);
        block = refined;
        if refined_count == count {
            return (block, count);
        }
        count = refined_count;
    }
}

fn renumber(signatures: impl Iterator<Item = Vec<usize>>) -> Vec<usize> {
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    signatures
        .map(|sig| {
            let next = ids.len();
            *ids.entry(sig).or_insert(next)
        })
        .collect()
}

/// The minimal machine equivalent to `machine`, in canonical form.
pub fn minimize(machine: &Machine) -> Machine {
    let trimmed = canonical_form(machine);
    let (block, count) = equivalence_blocks(&trimmed.delta, &trimmed.lambda);
    let mut delta = vec![Vec::new(); count];
    let mut lambda = vec![0; count];
    for s in 0..trimmed.state_count() {
        let b = block[s];
        if delta[b].is_empty() {
            delta[b] = trimmed.delta[s].iter().map(|&t| block[t]).collect();
            lambda[b] = trimmed.lambda[s];
        }
    }
    let quotient = Machine::from_parts_unchecked(
        trimmed.inputs.clone(),
        trimmed.outputs.clone(),
        delta,
        lambda,
        block[trimmed.initial],
    );
    canonical_form(&quotient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsm::equivalent;
    use crate::fsm::fixtures::*;
    use crate::fsm::Alphabet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_machine(rng: &mut ChaCha8Rng, max_states: usize) -> Machine {
        let n = rng.random_range(1..=max_states);
        let inputs = if rng.random_bool(0.5) { unary() } else { Alphabet::of(&["a", "b"]) };
        let delta = (0..n)
            .map(|_| (0..inputs.len()).map(|_| rng.random_range(0..n)).collect())
            .collect();
        let lambda = (0..n).map(|_| rng.random_range(0..2)).collect();
        let initial = rng.random_range(0..n);
        Machine::new(inputs, binary(), delta, lambda, initial).unwrap()
    }

    #[test]
    fn two_equal_output_states_collapse() {
        let m = Machine::new(unary(), binary(), vec![vec![1], vec![0]], vec![0, 0], 0).unwrap();
        assert_eq!(minimize(&m), constant(0));
    }

    #[test]
    fn toggle_is_already_minimal() {
        assert_eq!(minimize(&toggle()), toggle());
    }

    #[test]
    fn unrolled_toggle_minimizes_to_toggle() {
        let min = minimize(&toggle_unrolled());
        assert_eq!(min, toggle());
        assert!(equivalent(&min, &toggle_unrolled()).unwrap());
    }

    #[test]
    fn canonical_form_drops_unreachable_state() {
        let m = Machine::new(
            unary(),
            binary(),
            vec![vec![1], vec![0], vec![2]],
            vec![0, 1, 1],
            0,
        )
        .unwrap();
        assert_eq!(canonical_form(&m), toggle());
    }

    #[test]
    fn canonical_form_renumbers_reversed_toggle() {
        let reversed =
            Machine::new(unary(), binary(), vec![vec![1], vec![0]], vec![1, 0], 1).unwrap();
        let c = canonical_form(&reversed);
        assert_eq!(c.initial(), 0);
        assert_eq!(c, toggle());
    }

    #[test]
    fn canonical_form_idempotent_on_random_machines() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_machine(&mut rng, 6);
            let c = canonical_form(&m);
            assert_eq!(canonical_form(&c), c);
            assert!(is_bfs_numbered(&c.delta));
        }
    }

    #[test]
    fn bfs_numbering_detection() {
        assert!(is_bfs_numbered(&[vec![1], vec![0]]));
        assert!(is_bfs_numbered(&[vec![0]]));
        assert!(!is_bfs_numbered(&[vec![0], vec![1]]));
        assert!(!is_bfs_numbered(&[vec![2], vec![0], vec![1]]));
        assert!(is_bfs_numbered(&[vec![0, 1], vec![2, 1], vec![0, 0]]));
    }

    #[test]
    fn minimize_preserves_behavior_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = random_machine(&mut rng, 6);
            let min = minimize(&m);
            assert!(min.state_count() <= m.state_count());
            assert!(equivalent(&m, &min).unwrap());
            assert_eq!(minimize(&min), min);
        }
    }
}
