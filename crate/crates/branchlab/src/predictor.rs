//! The 2-bit saturating branch predictor: exact automaton stepping, the
//! Markov-chain view of the same automaton, and closed-form expected
//! misprediction counts for single branches and simple counted loops.
//!
//! The automaton has four states. The two taken states predict "taken", the
//! other two predict "not taken". A resolved outcome moves the state one step
//! toward the matching strong state, saturating at the ends.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when validating that distribution entries sum to 1.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PredictorError {
    #[error("taken probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { value: f64 },
    #[error("distribution entry {value} at position {position} is negative or non-finite")]
    BadProbabilityEntry { position: usize, value: f64 },
    #[error("distribution entries sum to {sum}, expected 1 within {DISTRIBUTION_TOLERANCE}")]
    NotNormalized { sum: f64 },
}

/// One of the four predictor states, ordered weakest-not-taken-first to match
/// the row-vector convention `[s̄, w̄, w, s]` used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredictorState {
    StronglyNotTaken,
    WeaklyNotTaken,
    WeaklyTaken,
    StronglyTaken,
}

impl PredictorState {
    pub const ALL: [PredictorState; 4] = [
        PredictorState::StronglyNotTaken,
        PredictorState::WeaklyNotTaken,
        PredictorState::WeaklyTaken,
        PredictorState::StronglyTaken,
    ];

    /// Position of this state in the `[s̄, w̄, w, s]` ordering.
    pub fn index(self) -> usize {
        match self {
            PredictorState::StronglyNotTaken => 0,
            PredictorState::WeaklyNotTaken => 1,
            PredictorState::WeaklyTaken => 2,
            PredictorState::StronglyTaken => 3,
        }
    }

    /// True iff this state predicts the branch will be taken.
    pub fn predicts_taken(self) -> bool {
        matches!(
            self,
            PredictorState::WeaklyTaken | PredictorState::StronglyTaken
        )
    }

    /// Short name used by CLI flags and reports.
    pub fn short_name(self) -> &'static str {
        match self {
            PredictorState::StronglyNotTaken => "snt",
            PredictorState::WeaklyNotTaken => "wnt",
            PredictorState::WeaklyTaken => "wt",
            PredictorState::StronglyTaken => "st",
        }
    }
}

/// Advances the automaton by one resolved outcome.
///
/// Returns the successor state and whether the prediction made *before* the
/// outcome was resolved turns out to be wrong.
pub fn step(state: PredictorState, taken: bool) -> (PredictorState, bool) {
    use PredictorState::*;
    let mispredicted = state.predicts_taken() != taken;
    let next = match (state, taken) {
        (StronglyNotTaken, false) => StronglyNotTaken,
        (StronglyNotTaken, true) => WeaklyNotTaken,
        (WeaklyNotTaken, false) => StronglyNotTaken,
        (WeaklyNotTaken, true) => WeaklyTaken,
        (WeaklyTaken, false) => WeaklyNotTaken,
        (WeaklyTaken, true) => StronglyTaken,
        (StronglyTaken, false) => WeaklyTaken,
        (StronglyTaken, true) => StronglyTaken,
    };
    (next, mispredicted)
}

/// Probability row-vector `[s̄, w̄, w, s]` over the four predictor states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDistribution {
    entries: [f64; 4],
}

impl StateDistribution {
    /// Validates entries: nonnegative, finite, summing to 1 within
    /// [`DISTRIBUTION_TOLERANCE`].
    pub fn new(entries: [f64; 4]) -> Result<Self, PredictorError> {
        for (position, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(PredictorError::BadProbabilityEntry { position, value });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(PredictorError::NotNormalized { sum });
        }
        Ok(StateDistribution { entries })
    }

    /// All four states equally likely.
    pub fn uniform() -> Self {
        StateDistribution {
            entries: [0.25; 4],
        }
    }

    /// All probability mass on a single state.
    pub fn pure(state: PredictorState) -> Self {
        let mut entries = [0.0; 4];
        entries[state.index()] = 1.0;
        StateDistribution { entries }
    }

    pub fn entries(&self) -> [f64; 4] {
        self.entries
    }

    pub fn probability_of(&self, state: PredictorState) -> f64 {
        self.entries[state.index()]
    }

    /// Probability that the predictor currently predicts "taken": `w + s`.
    pub fn taken_mass(&self) -> f64 {
        self.entries[2] + self.entries[3]
    }

    fn from_raw(entries: [f64; 4]) -> Self {
        StateDistribution { entries }
    }
}

/// The 4×4 transition matrix `G_b` of the automaton viewed as a Markov chain,
/// for a branch taken with probability `b` independent of predictor state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: [[f64; 4]; 4],
}

impl TransitionMatrix {
    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.rows
    }

    /// Right-multiplies a state row-vector: `q = p · G_b`.
    pub fn apply(&self, p: StateDistribution) -> StateDistribution {
        let v = p.entries();
        let mut q = [0.0; 4];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                q[j] += v[i] * g;
            }
        }
        StateDistribution::from_raw(q)
    }
}

/// Builds `G_b`. Row `i`, column `j` is the probability of moving from state
/// `i` to state `j` once the outcome is resolved; each row has exactly the
/// two nonzero entries given by the automaton's taken / not-taken edges.
pub fn transition_matrix(taken_probability: f64) -> Result<TransitionMatrix, PredictorError> {
    let b = taken_probability;
    if !(0.0..=1.0).contains(&b) || b.is_nan() {
        return Err(PredictorError::ProbabilityOutOfRange { value: b });
    }
    let mut rows = [[0.0; 4]; 4];
    for state in PredictorState::ALL {
        let i = state.index();
        let (on_taken, _) = step(state, true);
        let (on_not_taken, _) = step(state, false);
        rows[i][on_taken.index()] += b;
        rows[i][on_not_taken.index()] += 1.0 - b;
    }
    Ok(TransitionMatrix { rows })
}

/// Evolves `p` through `steps` resolved outcomes, each taken with
/// probability `b`: returns `p · (G_b)^steps`.
pub fn evolve(
    p: StateDistribution,
    taken_probability: f64,
    steps: u64,
) -> Result<StateDistribution, PredictorError> {
    let matrix = transition_matrix(taken_probability)?;
    let mut q = p;
    for _ in 0..steps {
        q = matrix.apply(q);
    }
    Ok(q)
}

/// Expected mispredictions for a single execution of one conditional branch.
///
/// With prior `p` and taken probability `b`, the prediction is correct with
/// probability `C_b(p) = (w+s)·b + [1-(w+s)]·(1-b)`, so the expected number
/// of mispredictions is `1 - C_b(p)`.
pub fn expected_mispredict_single(
    p: StateDistribution,
    taken_probability: f64,
) -> Result<f64, PredictorError> {
    let b = taken_probability;
    if !(0.0..=1.0).contains(&b) || b.is_nan() {
        return Err(PredictorError::ProbabilityOutOfRange { value: b });
    }
    let taken_mass = p.taken_mass();
    let correct = taken_mass * b + (1.0 - taken_mass) * (1.0 - b);
    Ok(1.0 - correct)
}

/// Expected mispredictions charged to the termination test of a simple
/// counted loop that runs its body exactly `trip_count` times, under the
/// taken-on-exit convention (the branch is taken only when the loop exits).
///
/// Piecewise in the trip count:
/// `1-(w+s)` for 0 iterations, `1+w` for 1, and `1+w+2s` for 2 or more.
pub fn expected_mispredict_loop(p: StateDistribution, trip_count: u64) -> f64 {
    let [_, _, w, s] = p.entries();
    match trip_count {
        0 => 1.0 - (w + s),
        1 => 1.0 + w,
        _ => 1.0 + w + 2.0 * s,
    }
}

/// Which machine branch direction corresponds to continuing the loop.
///
/// The mapping between a source condition and the branch direction is a
/// codegen choice, so loop analyses take it explicitly. `TakenOnContinue`
/// means the branch is taken on every iteration and falls through on exit;
/// `TakenOnExit` is the mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TakenConvention {
    TakenOnContinue,
    TakenOnExit,
}

/// Outcome of stepping a predictor through one full simple-loop execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopRun {
    pub mispredictions: u64,
    pub final_state: PredictorState,
}

/// Steps the automaton through the deterministic outcome sequence of a
/// simple counted loop: `trip_count` continue outcomes followed by one exit.
pub fn simulate_simple_loop(
    initial: PredictorState,
    trip_count: u64,
    convention: TakenConvention,
) -> LoopRun {
    let continue_outcome = matches!(convention, TakenConvention::TakenOnContinue);
    let mut state = initial;
    let mut mispredictions = 0;
    for _ in 0..trip_count {
        let (next, missed) = step(state, continue_outcome);
        state = next;
        mispredictions += missed as u64;
    }
    let (next, missed) = step(state, !continue_outcome);
    LoopRun {
        mispredictions: mispredictions + missed as u64,
        final_state: next,
    }
}

/// Exact misprediction count for one simple-loop execution; the brute-force
/// oracle behind the loop lemmas and the closed-form expectation.
pub fn brute_force_loop_misses(
    initial: PredictorState,
    trip_count: u64,
    convention: TakenConvention,
) -> u64 {
    simulate_simple_loop(initial, trip_count, convention).mispredictions
}
