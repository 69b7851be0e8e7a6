//! A laboratory for branch-based versus branch-avoiding graph algorithms.
//!
//! The crate implements label-propagation connected components and top-down
//! BFS in two variants each: a conventional one that branches on data-
//! dependent comparisons, and a branch-avoiding one that replaces those
//! branches with conditional moves at the cost of extra stores. Every
//! data-dependent branch site is simulated against a 2-bit saturating
//! predictor, so runs report exact branch, misprediction, load, and store
//! counts alongside wall-clock timing, and the measured mispredictions can
//! be checked against the closed-form bounds of the predictor model.
//!
//! Modules:
//! - [`graph`]: CSR graphs, METIS and edge-list ingestion, G(n, m)
//!   generation, diameter.
//! - [`predictor`]: the 2-bit automaton, its Markov-chain form, and expected
//!   misprediction formulas with a brute-force oracle.
//! - [`tracer`]: per-site predictor simulation and operation counters.
//! - [`cc`], [`bfs`]: the instrumented algorithms.
//! - [`analysis`]: misprediction bounds, per-iteration tables, correlations.
//! - [`lemmas`]: the verification suite behind `branchlab verify-lemmas`.
//! - [`report`], [`cli`]: report documents and the command-line front end.

pub mod analysis;
pub mod bfs;
pub mod cc;
pub mod cli;
pub mod graph;
pub mod lemmas;
pub mod predictor;
pub mod report;
pub mod tracer;

pub use graph::{Graph, GraphError};
pub use predictor::{PredictorState, TakenConvention};
pub use tracer::{NullRecorder, Recorder, TraceRecorder, TraceSnapshot};
