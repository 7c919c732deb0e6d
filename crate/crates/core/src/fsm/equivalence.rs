use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{FsmError, Machine, Result};

/// A multiple experiment: each word runs on a fresh copy of the machine
/// started at its initial state. The empty word observes only the initial
/// output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Experiment {
    words: Vec<Vec<usize>>,
}

impl Experiment {
    pub fn new(words: Vec<Vec<usize>>) -> Result<Self> {
        if words.is_empty() {
            return Err(FsmError::InvalidMachine(
                "an experiment needs at least one word".into(),
            ));
        }
        Ok(Experiment { words })
    }

    pub fn single(word: Vec<usize>) -> Self {
        Experiment { words: vec![word] }
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Output sequences of `machine`, one per word.
    pub fn outcome(&self, machine: &Machine) -> Result<Vec<Vec<usize>>> {
        self.words.iter().map(|w| machine.run(w)).collect()
    }

    /// True iff the two machines produce different records on this experiment.
    pub fn separates(&self, a: &Machine, b: &Machine) -> Result<bool> {
        Ok(self.outcome(a)? != self.outcome(b)?)
    }
}

/// Breadth-first search over reachable state pairs of the product machine.
/// Returns the shortest word (lexicographically least in input order among
/// the shortest) whose runs disagree, or `None` when the machines agree on
/// every word.
/// Back-pointer to the predecessor pair and the input that led here.
type Parent = Option<((usize, usize), usize)>;

fn first_disagreement(a: &Machine, b: &Machine) -> Result<Option<Vec<usize>>> {
    if !a.same_alphabets(b) {
        return Err(FsmError::AlphabetMismatch);
    }
    let start = (a.initial(), b.initial());
    let mut parent: HashMap<(usize, usize), Parent> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(pair @ (p, q)) = queue.pop_front() {
        if a.output(p) != b.output(q) {
            let mut word = Vec::new();
            let mut cur = pair;
            while let Some((prev, input)) = parent[&cur] {
                word.push(input);
                cur = prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for i in 0..a.inputs().len() {
            let succ = (a.next(p, i), b.next(q, i));
            if let Entry::Vacant(slot) = parent.entry(succ) {
                slot.insert(Some((pair, i)));
                queue.push_back(succ);
            }
        }
    }
    Ok(None)
}

/// True iff `a` and `b` emit identical output sequences on every input word.
pub fn equivalent(a: &Machine, b: &Machine) -> Result<bool> {
    Ok(first_disagreement(a, b)?.is_none())
}

/// A minimal-length single-word experiment separating `a` from `b`, or
/// `None` iff they are equivalent.
pub fn distinguishing_experiment(a: &Machine, b: &Machine) -> Result<Option<Experiment>> {
    Ok(first_disagreement(a, b)?.map(Experiment::single))
}
