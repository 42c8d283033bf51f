//! Boolean functions: truth tables, shared-input depth-2 circuits, layered
//! AC0 circuits and promise checks.

pub mod circuit;
pub mod format;
pub mod layered;
pub mod promise;
pub mod truth_table;

pub use circuit::{with_complements, AndGate, Evaluator, SharedInputCircuit, TopFunction};
pub use layered::{peel_bottom, GateKind, LayeredCircuit, Literal, Peeled, Residual};
pub use promise::{check_promise, PromiseBounds, PromiseMode, Violation};
pub use truth_table::{decode, encode, NamedFunction, TruthTable, MAX_ARITY};
