//! Deterministic Moore machines over finite symbol alphabets.
//!
//! States and symbols are addressed by index internally; [`Alphabet`] maps
//! between indices and the [`Symbol`]s that appear in serialized documents.

mod enumerate;
mod equivalence;
pub mod format;
mod minimize;
mod trace;
mod witness;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use enumerate::enumerate_consistent;
pub use equivalence::{distinguishing_experiment, equivalent, Experiment};
pub use minimize::{canonical_form, minimize};
pub use trace::{consistent, trace_to_fsm, Trace, AUTONOMOUS_INPUT};
pub use witness::{witness_moore, WitnessPair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FsmError {
    #[error("symbol `{symbol}` is not in the {kind} alphabet")]
    UnknownSymbol { symbol: Symbol, kind: AlphabetKind },
    #[error("input index {0} is outside the input alphabet")]
    InputOutOfRange(usize),
    #[error("machines do not share input and output alphabets")]
    AlphabetMismatch,
    #[error("{0} alphabet is empty")]
    EmptyAlphabet(AlphabetKind),
    #[error("symbol `{symbol}` appears twice in the {kind} alphabet")]
    DuplicateSymbol { symbol: Symbol, kind: AlphabetKind },
    #[error("invalid machine: {0}")]
    InvalidMachine(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error(
        "output alphabet {0} has a single symbol; every machine over it is equivalent, \
         so no distinguishable alternative exists"
    )]
    DegenerateOutputAlphabet(Alphabet),
    #[error("state bound must be at least 1")]
    ZeroStateBound,
}

pub type Result<T, E = FsmError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetKind {
    Input,
    Output,
}

impl fmt::Display for AlphabetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetKind::Input => f.write_str("input"),
            AlphabetKind::Output => f.write_str("output"),
        }
    }
}

/// A recorded symbol. Documents may spell symbols as strings or integers;
/// both map to the same textual symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(s: impl Into<String>) -> Self {
        Symbol(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol(s.to_owned())
    }
}

impl From<i64> for Symbol {
    fn from(v: i64) -> Self {
        Symbol(v.to_string())
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Symbol::from(v),
            Raw::Str(s) => Symbol(s),
        })
    }
}

/// An ordered set of symbols. Order matters: it fixes tie-breaking in
/// experiment search and the choice of divergent outputs in witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Alphabet(Vec<Symbol>);

impl Alphabet {
    pub fn new(symbols: Vec<Symbol>, kind: AlphabetKind) -> Result<Self> {
        if symbols.is_empty() {
            return Err(FsmError::EmptyAlphabet(kind));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(FsmError::DuplicateSymbol {
                    symbol: s.clone(),
                    kind,
                });
            }
        }
        Ok(Alphabet(symbols))
    }

    /// Convenience constructor for tests and literals; panics on an invalid set.
    pub fn of<S: Into<Symbol> + Clone>(symbols: &[S]) -> Self {
        let symbols = symbols.iter().cloned().map(Into::into).collect();
        Alphabet::new(symbols, AlphabetKind::Input).expect("valid alphabet literal")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn symbol(&self, index: usize) -> &Symbol {
        &self.0[index]
    }

    pub fn index_of(&self, symbol: &Symbol) -> Option<usize> {
        self.0.iter().position(|s| s == symbol)
    }

    pub(crate) fn lookup(&self, symbol: &Symbol, kind: AlphabetKind) -> Result<usize> {
        self.index_of(symbol).ok_or_else(|| FsmError::UnknownSymbol {
            symbol: symbol.clone(),
            kind,
        })
    }

    /// Renders an input word as a string; single-character alphabets give
    /// words like `aa`, others are joined with spaces.
    pub fn render_word(&self, word: &[usize]) -> String {
        let compact = self.0.iter().all(|s| s.0.chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&i| self.0[i].as_str()).collect();
        if compact {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// A deterministic Moore machine: the output is a function of the current
/// state and is emitted on entry, including at the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Machine {
    inputs: Alphabet,
    outputs: Alphabet,
    delta: Vec<Vec<usize>>,
    lambda: Vec<usize>,
    initial: usize,
}

impl Machine {
    /// `delta[s][i]` is the successor of state `s` under input index `i`;
    /// `lambda[s]` is the output index of state `s`.
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        delta: Vec<Vec<usize>>,
        lambda: Vec<usize>,
        initial: usize,
    ) -> Result<Self> {
        let n = delta.len();
        if n == 0 {
            return Err(FsmError::InvalidMachine("machine needs at least one state".into()));
        }
        if lambda.len() != n {
            return Err(FsmError::InvalidMachine(format!(
                "{n} transition rows but {} outputs",
                lambda.len()
            )));
        }
        if initial >= n {
            return Err(FsmError::InvalidMachine(format!(
                "initial state {initial} out of range for {n} states"
            )));
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != inputs.len() {
                return Err(FsmError::InvalidMachine(format!(
                    "state {s} has {} transitions, expected {}",
                    row.len(),
                    inputs.len()
                )));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(FsmError::InvalidMachine(format!(
                    "state {s} transitions to {t}, outside [0, {n})"
                )));
            }
        }
        if let Some((s, &o)) = lambda.iter().enumerate().find(|(_, &o)| o >= outputs.len()) {
            return Err(FsmError::InvalidMachine(format!(
                "state {s} outputs index {o}, outside the output alphabet"
            )));
        }
        Ok(Machine {
            inputs,
            outputs,
            delta,
            lambda,
            initial,
        })
    }

    pub(crate) fn from_parts_unchecked(
        inputs: Alphabet,
        outputs: Alphabet,
        delta: Vec<Vec<usize>>,
        lambda: Vec<usize>,
        initial: usize,
    ) -> Self {
        debug_assert!(Machine::new(
            inputs.clone(),
            outputs.clone(),
            delta.clone(),
            lambda.clone(),
            initial
        )
        .is_ok());
        Machine {
            inputs,
            outputs,
            delta,
            lambda,
            initial,
        }
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn next(&self, state: usize, input: usize) -> usize {
        self.delta[state][input]
    }

    pub fn output(&self, state: usize) -> usize {
        self.lambda[state]
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.delta
    }

    pub fn output_table(&self) -> &[usize] {
        &self.lambda
    }

    pub fn same_alphabets(&self, other: &Machine) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs
    }

    /// Runs `word` from the initial state, returning `word.len() + 1` output
    /// indices: the initial output, then one per reached state.
    pub fn run(&self, word: &[usize]) -> Result<Vec<usize>> {
        let mut state = self.initial;
        let mut out = Vec::with_capacity(word.len() + 1);
        out.push(self.lambda[state]);
        for &i in word {
            if i >= self.inputs.len() {
                return Err(FsmError::InputOutOfRange(i));
            }
            state = self.delta[state][i];
            out.push(self.lambda[state]);
        }
        Ok(out)
    }

    pub fn run_symbols(&self, word: &[Symbol]) -> Result<Vec<Symbol>> {
        let word = word
            .iter()
            .map(|s| self.inputs.lookup(s, AlphabetKind::Input))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .run(&word)?
            .into_iter()
            .map(|o| self.outputs.symbol(o).clone())
            .collect())
    }

    /// Flat key used to order machines: state count, initial state, the
    /// transition table row-major, then the output table.
    pub fn encoding(&self) -> Vec<usize> {
        let mut key = Vec::with_capacity(2 + self.delta.len() * (self.inputs.len() + 1));
        key.push(self.delta.len());
        key.push(self.initial);
        key.extend(self.delta.iter().flatten());
        key.extend(&self.lambda);
        key
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn unary() -> Alphabet {
        Alphabet::of(&["a"])
    }

    pub fn binary() -> Alphabet {
        Alphabet::of(&["0", "1"])
    }

    pub fn constant(output: usize) -> Machine {
        Machine::new(unary(), binary(), vec![vec![0]], vec![output], 0).unwrap()
    }

    pub fn toggle() -> Machine {
        Machine::new(unary(), binary(), vec![vec![1], vec![0]], vec![0, 1], 0).unwrap()
    }

    /// The toggle unrolled over four states: 0,1,0,1,...
    pub fn toggle_unrolled() -> Machine {
        Machine::new(
            unary(),
            binary(),
            vec![vec![1], vec![2], vec![3], vec![0]],
            vec![0, 1, 0, 1],
            0,
        )
        .unwrap()
    }
}
