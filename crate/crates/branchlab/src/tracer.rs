//! Trace-driven predictor simulation and operation counting.
//!
//! Each static conditional branch in an instrumented algorithm registers a
//! site; the recorder keeps one persistent 2-bit predictor state per site,
//! never evicted. Loads, stores, conditional moves, and arithmetic updates
//! are counted globally at the algorithm-semantics level.
//!
//! Counted branches are exactly the source-level conditional tests of the
//! instrumented algorithms; the unconditional back-edge at the bottom of a
//! loop is never counted. The branch counter models retired conditional
//! branches, not dispatched ones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::predictor::{step, PredictorState};

/// Handle to a registered branch site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteId(usize);

/// Sink for the events an instrumented algorithm reports.
///
/// [`TraceRecorder`] simulates the predictor and counts everything;
/// [`NullRecorder`] ignores everything, so timing runs pay no
/// instrumentation cost beyond inlined no-ops.
pub trait Recorder {
    fn register_site(&mut self, label: &str) -> SiteId;
    /// Feeds one resolved branch outcome to the site's simulated predictor.
    fn record_branch(&mut self, site: SiteId, taken: bool);
    fn record_load(&mut self, count: u64);
    fn record_store(&mut self, count: u64);
    fn record_cmov(&mut self, count: u64);
    fn record_arith(&mut self, count: u64);
    fn snapshot(&self) -> TraceSnapshot;
}

#[derive(Debug, Clone)]
struct SiteState {
    label: String,
    state: PredictorState,
    evaluations: u64,
    taken: u64,
    mispredictions: u64,
}

/// Simulating recorder: one 2-bit predictor per registered site plus global
/// operation counters.
#[derive(Debug, Clone)]
pub struct TraceRecorder {
    initial_state: PredictorState,
    sites: Vec<SiteState>,
    loads: u64,
    stores: u64,
    conditional_moves: u64,
    arithmetic_updates: u64,
}

impl TraceRecorder {
    /// Every site starts in `initial_state` when first registered.
    pub fn new(initial_state: PredictorState) -> Self {
        TraceRecorder {
            initial_state,
            sites: Vec::new(),
            loads: 0,
            stores: 0,
            conditional_moves: 0,
            arithmetic_updates: 0,
        }
    }

    pub fn initial_state(&self) -> PredictorState {
        self.initial_state
    }
}

impl Default for TraceRecorder {
    fn default() -> Self {
        TraceRecorder::new(PredictorState::WeaklyNotTaken)
    }
}

impl Recorder for TraceRecorder {
    fn register_site(&mut self, label: &str) -> SiteId {
        assert!(
            self.sites.iter().all(|s| s.label != label),
            "branch site label {label:?} registered twice"
        );
        self.sites.push(SiteState {
            label: label.to_string(),
            state: self.initial_state,
            evaluations: 0,
            taken: 0,
            mispredictions: 0,
        });
        SiteId(self.sites.len() - 1)
    }

    fn record_branch(&mut self, site: SiteId, taken: bool) {
        let site = self
            .sites
            .get_mut(site.0)
            .unwrap_or_else(|| panic!("unknown branch site id {}", site.0));
        let (next, mispredicted) = step(site.state, taken);
        site.state = next;
        site.evaluations += 1;
        site.taken += taken as u64;
        site.mispredictions += mispredicted as u64;
    }

    fn record_load(&mut self, count: u64) {
        self.loads += count;
    }

    fn record_store(&mut self, count: u64) {
        self.stores += count;
    }

    fn record_cmov(&mut self, count: u64) {
        self.conditional_moves += count;
    }

    fn record_arith(&mut self, count: u64) {
        self.arithmetic_updates += count;
    }

    fn snapshot(&self) -> TraceSnapshot {
        TraceSnapshot {
            sites: self
                .sites
                .iter()
                .map(|s| SiteSnapshot {
                    label: s.label.clone(),
                    evaluations: s.evaluations,
                    taken: s.taken,
                    mispredictions: s.mispredictions,
                })
                .collect(),
            loads: self.loads,
            stores: self.stores,
            conditional_moves: self.conditional_moves,
            arithmetic_updates: self.arithmetic_updates,
        }
    }
}

/// Recorder that drops every event. Used for timing passes.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullRecorder;

impl Recorder for NullRecorder {
    fn register_site(&mut self, _label: &str) -> SiteId {
        SiteId(0)
    }
    fn record_branch(&mut self, _site: SiteId, _taken: bool) {}
    fn record_load(&mut self, _count: u64) {}
    fn record_store(&mut self, _count: u64) {}
    fn record_cmov(&mut self, _count: u64) {}
    fn record_arith(&mut self, _count: u64) {}
    fn snapshot(&self) -> TraceSnapshot {
        TraceSnapshot::default()
    }
}

/// Immutable per-site counters at one point of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSnapshot {
    pub label: String,
    pub evaluations: u64,
    pub taken: u64,
    pub mispredictions: u64,
}

/// Immutable view of all counters at one point of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSnapshot {
    pub sites: Vec<SiteSnapshot>,
    pub loads: u64,
    pub stores: u64,
    pub conditional_moves: u64,
    pub arithmetic_updates: u64,
}

impl TraceSnapshot {
    pub fn site(&self, label: &str) -> Option<&SiteSnapshot> {
        self.sites.iter().find(|s| s.label == label)
    }

    pub fn total_evaluations(&self) -> u64 {
        self.sites.iter().map(|s| s.evaluations).sum()
    }

    pub fn total_taken(&self) -> u64 {
        self.sites.iter().map(|s| s.taken).sum()
    }

    pub fn total_mispredictions(&self) -> u64 {
        self.sites.iter().map(|s| s.mispredictions).sum()
    }

    /// Component-wise difference against an earlier snapshot of the same
    /// recorder. Sites registered after `earlier` was taken contribute their
    /// full counts.
    pub fn delta_since(&self, earlier: &TraceSnapshot) -> TraceSnapshot {
        let sites = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, s)| match earlier.sites.get(i) {
                Some(e) => {
                    debug_assert_eq!(e.label, s.label, "snapshot site order changed");
                    SiteSnapshot {
                        label: s.label.clone(),
                        evaluations: s.evaluations - e.evaluations,
                        taken: s.taken - e.taken,
                        mispredictions: s.mispredictions - e.mispredictions,
                    }
                }
                None => s.clone(),
            })
            .collect();
        TraceSnapshot {
            sites,
            loads: self.loads - earlier.loads,
            stores: self.stores - earlier.stores,
            conditional_moves: self.conditional_moves - earlier.conditional_moves,
            arithmetic_updates: self.arithmetic_updates - earlier.arithmetic_updates,
        }
    }

    /// True iff every counter of `self` is >= the matching counter of `other`.
    pub fn dominates(&self, other: &TraceSnapshot) -> bool {
        if self.loads < other.loads
            || self.stores < other.stores
            || self.conditional_moves < other.conditional_moves
            || self.arithmetic_updates < other.arithmetic_updates
            || self.sites.len() < other.sites.len()
        {
            return false;
        }
        other.sites.iter().enumerate().all(|(i, e)| {
            let s = &self.sites[i];
            s.label == e.label
                && s.evaluations >= e.evaluations
                && s.taken >= e.taken
                && s.mispredictions >= e.mispredictions
        })
    }

    /// JSON document with per-site records keyed by label.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct SiteView {
            evaluations: u64,
            taken: u64,
            mispredictions: u64,
        }
        #[derive(Serialize)]
        struct View<'a> {
            sites: BTreeMap<&'a str, SiteView>,
            loads: u64,
            stores: u64,
            conditional_moves: u64,
            arithmetic_updates: u64,
        }
        let view = View {
            sites: self
                .sites
                .iter()
                .map(|s| {
                    (
                        s.label.as_str(),
                        SiteView {
                            evaluations: s.evaluations,
                            taken: s.taken,
                            mispredictions: s.mispredictions,
                        },
                    )
                })
                .collect(),
            loads: self.loads,
            stores: self.stores,
            conditional_moves: self.conditional_moves,
            arithmetic_updates: self.arithmetic_updates,
        };
        serde_json::to_string_pretty(&view).expect("snapshot serialization cannot fail")
    }

    /// One CSV row per site: `label,evaluations,taken,mispredictions`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.sites
            .iter()
            .map(|s| {
                format!(
                    "{},{},{},{}",
                    s.label, s.evaluations, s.taken, s.mispredictions
                )
            })
            .collect()
    }
}
