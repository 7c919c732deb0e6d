//! Machine-identification limits for finitely observed systems, and desk-scale
//! demonstrations of the quantum no-go results that share their structure.
//!
//! - [`fsm`]: Moore machines, minimization, equivalence, consistent-machine
//!   enumeration and witness construction for finite traces.
//! - [`quantum`]: dense finite-dimensional states, effects, POVMs, Born rule,
//!   tensor products and partial traces.
//! - [`observation`]: observers as finite POVM sets, exchange symmetry checks
//!   and a deterministic count-rate detector model.
//! - [`nogo`]: CHSH with an exhaustive local bound, the Peres-Mermin square,
//!   and the no-cloning overlap gap.
//! - [`cli`]: report generation behind the `moore-nogo` binary.

pub mod cli;
pub mod fsm;
pub mod nogo;
pub mod observation;
pub mod quantum;
