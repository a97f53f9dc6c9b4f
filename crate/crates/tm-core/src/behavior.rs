//! Behavior derivation: occurrences, the chronology-of-events graph, and
//! the P/A duration table. All three are pure projections of a finished
//! [`Trace`].

use crate::dynamics::{Firing, PAState, Trace};
use crate::model::{EventId, Polarity};

/// A maximal run of actuality for one event: Actual at every slot of
/// `start..=end`, Potential just outside where those slots exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub event: EventId,
    pub start: u32,
    pub end: u32,
}

impl Occurrence {
    pub fn covers(&self, slot: u32) -> bool {
        self.start <= slot && slot <= self.end
    }

    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Causal,
    Chronological,
}

/// An edge between occurrences. Causal edges carry the firing that
/// justifies them: a positive firing begins the target occurrence, a
/// negative firing ends it (the recorded potentialization, the paper's
/// "NE" reading of an event).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
    pub firing: Option<Firing>,
}

/// Occurrences connected by causal and chronological edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviorGraph {
    pub occurrences: Vec<Occurrence>,
    pub edges: Vec<BehaviorEdge>,
}

/// One row of the duration table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaRow {
    pub event: String,
    pub cells: Vec<PAState>,
}

/// The per-event, per-slot +/− matrix, rows in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaTable {
    pub horizon: u32,
    pub rows: Vec<PaRow>,
}

/// Maximal actuality runs, ordered by (start, event declaration order).
pub fn derive_occurrences(trace: &Trace) -> Vec<Occurrence> {
    let mut occurrences = Vec::new();
    for (idx, _) in trace.events.iter().enumerate() {
        let event = EventId::from_index(idx);
        let mut run_start: Option<u32> = None;
        for slot_state in &trace.slots {
            let actual = slot_state.state(event) == PAState::Actual;
            match (actual, run_start) {
                (true, None) => run_start = Some(slot_state.slot),
                (false, Some(start)) => {
                    occurrences.push(Occurrence {
                        event,
                        start,
                        end: slot_state.slot - 1,
                    });
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(start) = run_start {
            occurrences.push(Occurrence {
                event,
                start,
                end: trace.horizon,
            });
        }
    }
    occurrences.sort_by_key(|o| (o.start, o.event));
    occurrences
}

/// Builds the behavior graph. A causal edge exists where a recorded
/// firing begins (positive) or ends (negative) the target occurrence
/// while the source occurrence covers the firing slot; chronological
/// edges link back-to-back occurrences whose start no positive firing
/// explains.
pub fn derive_behavior(trace: &Trace) -> BehaviorGraph {
    let occurrences = derive_occurrences(trace);
    let mut edges = Vec::new();
    let mut explained = vec![false; occurrences.len()];

    for firing in &trace.firings {
        let src = occurrences
            .iter()
            .position(|o| o.event == firing.src_event && o.covers(firing.slot));
        let dst = occurrences.iter().position(|o| {
            o.event == firing.dst_event
                && match firing.polarity {
                    Polarity::Positive => o.start == firing.slot + 1,
                    Polarity::Negative => o.end == firing.slot,
                }
        });
        if let (Some(src), Some(dst)) = (src, dst) {
            if firing.polarity == Polarity::Positive {
                explained[dst] = true;
            }
            edges.push(BehaviorEdge {
                src,
                dst,
                kind: EdgeKind::Causal,
                firing: Some(firing.clone()),
            });
        }
    }

    for (dst, occurrence) in occurrences.iter().enumerate() {
        if explained[dst] || occurrence.start == 1 {
            continue;
        }
        for (src, candidate) in occurrences.iter().enumerate() {
            if candidate.end + 1 == occurrence.start {
                edges.push(BehaviorEdge {
                    src,
                    dst,
                    kind: EdgeKind::Chronological,
                    firing: None,
                });
            }
        }
    }

    BehaviorGraph {
        occurrences,
        edges,
    }
}

/// Projects the trace onto the duration table, one row per event.
pub fn emit_pa_table(trace: &Trace) -> PaTable {
    let rows = trace
        .events
        .iter()
        .enumerate()
        .map(|(idx, key)| PaRow {
            event: key.clone(),
            cells: trace
                .slots
                .iter()
                .map(|s| s.state(EventId::from_index(idx)))
                .collect(),
        })
        .collect();
    PaTable {
        horizon: trace.horizon,
        rows,
    }
}

/// Reconstructs occurrences from a table row by scanning for maximal
/// `+` runs. Used to cross-check `derive_occurrences`.
pub fn occurrences_from_table(table: &PaTable) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for (idx, row) in table.rows.iter().enumerate() {
        let mut start: Option<u32> = None;
        for (i, &cell) in row.cells.iter().enumerate() {
            let slot = (i + 1) as u32;
            match (cell, start) {
                (PAState::Actual, None) => start = Some(slot),
                (PAState::Potential, Some(s)) => {
                    out.push(Occurrence {
                        event: EventId::from_index(idx),
                        start: s,
                        end: slot - 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push(Occurrence {
                event: EventId::from_index(idx),
                start: s,
                end: table.horizon,
            });
        }
    }
    out.sort_by_key(|o| (o.start, o.event));
    out
}
