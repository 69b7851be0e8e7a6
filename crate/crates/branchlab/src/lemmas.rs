//! Exhaustive verification of the predictor model's loop facts: the
//! automaton table, the simple-loop misprediction ranges, the nested-loop
//! bound, and the closed-form expectations against the brute-force oracle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::predictor::{
    brute_force_loop_misses, evolve, expected_mispredict_loop, expected_mispredict_single,
    simulate_simple_loop, step, transition_matrix, PredictorState, StateDistribution,
    TakenConvention,
};

/// Result of one verification row.
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub detail: String,
}

impl LemmaCheck {
    fn exact(name: &'static str, passed: bool, detail: String) -> Self {
        LemmaCheck {
            name,
            passed,
            max_deviation: if passed { 0.0 } else { f64::INFINITY },
            detail,
        }
    }
}

pub fn all_passed(checks: &[LemmaCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

const LOOP_SWEEP_MAX: u64 = 60;

fn check_transition_table() -> LemmaCheck {
    use PredictorState::*;
    let expected = [
        ((StronglyNotTaken, true), (WeaklyNotTaken, true)),
        ((StronglyNotTaken, false), (StronglyNotTaken, false)),
        ((WeaklyNotTaken, true), (WeaklyTaken, true)),
        ((WeaklyNotTaken, false), (StronglyNotTaken, false)),
        ((WeaklyTaken, true), (StronglyTaken, false)),
        ((WeaklyTaken, false), (WeaklyNotTaken, true)),
        ((StronglyTaken, true), (StronglyTaken, false)),
        ((StronglyTaken, false), (WeaklyTaken, true)),
    ];
    let passed = expected
        .iter()
        .all(|&((state, outcome), want)| step(state, outcome) == want);
    LemmaCheck::exact(
        "fsa-transition-table",
        passed,
        "all 8 (state, outcome) transitions".into(),
    )
}

fn check_matrix_shift_structure() -> LemmaCheck {
    let samples = [
        StateDistribution::uniform(),
        StateDistribution::new([0.1, 0.2, 0.3, 0.4]).unwrap(),
        StateDistribution::pure(PredictorState::StronglyTaken),
    ];
    let g0 = transition_matrix(0.0).unwrap();
    let g1 = transition_matrix(1.0).unwrap();
    let mut max_deviation: f64 = 0.0;
    for p in samples {
        let [snt, wnt, wt, st] = p.entries();
        let toward_not_taken = g0.apply(p).entries();
        let toward_taken = g1.apply(p).entries();
        let want_not_taken = [snt + wnt, wt, st, 0.0];
        let want_taken = [0.0, snt, wnt, wt + st];
        for i in 0..4 {
            max_deviation = max_deviation
                .max((toward_not_taken[i] - want_not_taken[i]).abs())
                .max((toward_taken[i] - want_taken[i]).abs());
        }
        // Three all-not-taken steps saturate the chain.
        let saturated = evolve(p, 0.0, 3).unwrap().entries();
        let want = [1.0, 0.0, 0.0, 0.0];
        for i in 0..4 {
            max_deviation = max_deviation.max((saturated[i] - want[i]).abs());
        }
    }
    LemmaCheck {
        name: "matrix-shift-structure",
        passed: max_deviation <= 1e-12,
        max_deviation,
        detail: "p*G0, p*G1 closed forms and G0^3 saturation".into(),
    }
}

fn check_loop_final_state() -> LemmaCheck {
    let mut passed = true;
    for initial in PredictorState::ALL {
        for n in 3..=LOOP_SWEEP_MAX {
            let run = simulate_simple_loop(initial, n, TakenConvention::TakenOnContinue);
            passed &= run.final_state == PredictorState::WeaklyTaken;
        }
    }
    LemmaCheck::exact(
        "lemma1-final-state-weakly-taken",
        passed,
        format!("n in 3..={LOOP_SWEEP_MAX}, all 4 initial states"),
    )
}

fn check_loop_miss_range(
    name: &'static str,
    trip_counts: impl Iterator<Item = u64> + Clone,
    low: u64,
    high: u64,
) -> LemmaCheck {
    let mut passed = true;
    let mut seen_low = u64::MAX;
    let mut seen_high = 0;
    for initial in PredictorState::ALL {
        for n in trip_counts.clone() {
            let misses =
                brute_force_loop_misses(initial, n, TakenConvention::TakenOnContinue);
            seen_low = seen_low.min(misses);
            seen_high = seen_high.max(misses);
            passed &= (low..=high).contains(&misses);
        }
    }
    LemmaCheck::exact(
        name,
        passed,
        format!("observed misses in [{seen_low}, {seen_high}], required [{low}, {high}]"),
    )
}

fn check_loop_n0_states() -> LemmaCheck {
    // A zero-trip loop steps the predictor once toward not-taken: it can
    // never end strongly taken and never moves toward taken.
    let mut passed = true;
    for initial in PredictorState::ALL {
        let run = simulate_simple_loop(initial, 0, TakenConvention::TakenOnContinue);
        passed &= run.final_state != PredictorState::StronglyTaken;
        passed &= run.final_state.index() <= initial.index();
    }
    LemmaCheck::exact(
        "lemma-n0-moves-toward-not-taken",
        passed,
        "final state after n=0, all 4 initial states".into(),
    )
}

fn check_loop_n2_final_states() -> LemmaCheck {
    let mut passed = true;
    for initial in PredictorState::ALL {
        let run = simulate_simple_loop(initial, 2, TakenConvention::TakenOnContinue);
        passed &= matches!(
            run.final_state,
            PredictorState::WeaklyTaken | PredictorState::WeaklyNotTaken
        );
    }
    LemmaCheck::exact(
        "lemma-n2-ends-in-weak-state",
        passed,
        "final state after n=2, all 4 initial states".into(),
    )
}

fn check_nested_loop_k1000() -> LemmaCheck {
    let k = 1000u64;
    let mut passed = true;
    let mut details = Vec::new();
    for initial in PredictorState::ALL {
        // First execution has n >= 3; every later one n >= 1.
        let mut state = initial;
        let mut total = 0;
        for execution in 0..k {
            let n = if execution == 0 {
                5
            } else {
                1 + (execution % 4)
            };
            let run = simulate_simple_loop(state, n, TakenConvention::TakenOnContinue);
            total += run.mispredictions;
            state = run.final_state;
        }
        passed &= (k..=k + 2).contains(&total);
        details.push(format!("{}:{}", initial.short_name(), total));
    }
    LemmaCheck::exact(
        "lemma3-corollary1-k1000",
        passed,
        format!(
            "totals per initial state {{{}}}, required [{k}, {}]",
            details.join(" "),
            k + 2
        ),
    )
}

fn random_distribution(rng: &mut impl Rng) -> StateDistribution {
    loop {
        let raw: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        let sum: f64 = raw.iter().sum();
        if sum == 0.0 {
            continue;
        }
        let normalized = [raw[0] / sum, raw[1] / sum, raw[2] / sum, raw[3] / sum];
        if let Ok(p) = StateDistribution::new(normalized) {
            return p;
        }
    }
}

fn check_loop_expectation_closed_form(seed: u64) -> LemmaCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_distribution(&mut rng);
        for n in 0..=10 {
            let weighted: f64 = PredictorState::ALL
                .iter()
                .map(|&s| {
                    p.probability_of(s)
                        * brute_force_loop_misses(s, n, TakenConvention::TakenOnExit) as f64
                })
                .sum();
            let closed = expected_mispredict_loop(p, n);
            max_deviation = max_deviation.max((weighted - closed).abs());
        }
    }
    LemmaCheck {
        name: "loop-expectation-closed-form",
        passed: max_deviation <= 1e-12,
        max_deviation,
        detail: "1000 random priors, n in 0..=10, vs state-enumeration average".into(),
    }
}

fn check_loop_expectation_uniform_prior() -> LemmaCheck {
    let p = StateDistribution::uniform();
    let values = [
        expected_mispredict_loop(p, 0),
        expected_mispredict_loop(p, 1),
        expected_mispredict_loop(p, 2),
    ];
    let want = [0.5, 1.25, 1.75];
    let max_deviation = values
        .iter()
        .zip(want)
        .map(|(v, w)| (v - w).abs())
        .fold(0.0, f64::max);
    LemmaCheck {
        name: "loop-expectation-uniform-prior",
        passed: max_deviation == 0.0,
        max_deviation,
        detail: format!(
            "M_0 = {}, M_1 = {}, M_2 = {}",
            values[0], values[1], values[2]
        ),
    }
}

fn check_single_branch_expectation() -> LemmaCheck {
    let mut max_deviation: f64 = 0.0;
    let uniform = StateDistribution::uniform();
    for b in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let m = expected_mispredict_single(uniform, b).unwrap();
        max_deviation = max_deviation.max((m - 0.5).abs());
    }
    let taken_prior = StateDistribution::new([0.0, 0.0, 0.4, 0.6]).unwrap();
    for b in [0.0, 0.3, 0.9] {
        let m = expected_mispredict_single(taken_prior, b).unwrap();
        max_deviation = max_deviation.max((m - (1.0 - b)).abs());
    }
    LemmaCheck {
        name: "single-branch-expectation",
        passed: max_deviation <= 1e-12,
        max_deviation,
        detail: "uniform prior independent of b; taken prior gives 1-b".into(),
    }
}

/// Runs every verification row. The seed drives only the random-prior sweep.
pub fn run_lemma_checks(seed: u64) -> Vec<LemmaCheck> {
    vec![
        check_transition_table(),
        check_matrix_shift_structure(),
        check_loop_final_state(),
        check_loop_miss_range("lemma2-miss-range-n-ge-3", 3..=LOOP_SWEEP_MAX, 1, 3),
        check_nested_loop_k1000(),
        check_loop_miss_range("lemma-n0-miss-range", 0..=0, 0, 1),
        check_loop_n0_states(),
        check_loop_miss_range("lemma-n1-miss-range", 1..=1, 1, 2),
        check_loop_miss_range("lemma-n2-miss-range", 2..=2, 1, 3),
        check_loop_n2_final_states(),
        check_single_branch_expectation(),
        check_loop_expectation_closed_form(seed),
        check_loop_expectation_uniform_prior(),
    ]
}
