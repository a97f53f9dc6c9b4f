//! Canonical trace persistence: `tm-trace/1`, a JSON document with
//! alphabetically ordered keys and `+`/`-` glyph strings for the per-slot
//! assignments. `load_trace(save_trace(t))` reproduces `t` exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tm_core::dynamics::{Firing, PAState, SlotState, Trace};
use tm_core::model::{ArcId, EventId, NeAlias, Polarity};

pub const FORMAT: &str = "tm-trace/1";

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("malformed trace file at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid trace file: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct FiringFile {
    arc: u32,
    dst: String,
    polarity: char,
    slot: u32,
    src: String,
}

#[derive(Serialize, Deserialize)]
struct AliasFile {
    dst: String,
    name: String,
    src: String,
}

#[derive(Serialize, Deserialize)]
struct SlotFile {
    assignment: String,
    persists: Vec<String>,
    slot: u32,
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    events: Vec<String>,
    firings: Vec<FiringFile>,
    format: String,
    horizon: u32,
    model: String,
    ne_aliases: Vec<AliasFile>,
    scenario: String,
    slots: Vec<SlotFile>,
}

fn polarity_glyph(p: Polarity) -> char {
    match p {
        Polarity::Positive => '+',
        Polarity::Negative => '-',
    }
}

/// Serializes a trace to its canonical text form.
pub fn save_trace(trace: &Trace) -> String {
    let file = TraceFile {
        events: trace.events.clone(),
        firings: trace
            .firings
            .iter()
            .map(|f| FiringFile {
                arc: f.arc.index() as u32,
                dst: trace.event_key(f.dst_event).to_string(),
                polarity: polarity_glyph(f.polarity),
                slot: f.slot,
                src: trace.event_key(f.src_event).to_string(),
            })
            .collect(),
        format: FORMAT.to_string(),
        horizon: trace.horizon,
        model: trace.model.clone(),
        ne_aliases: trace
            .ne_aliases
            .iter()
            .map(|a| AliasFile {
                dst: trace.event_key(a.dst_event).to_string(),
                name: a.name.clone(),
                src: trace.event_key(a.src_event).to_string(),
            })
            .collect(),
        scenario: trace.scenario.clone(),
        slots: trace
            .slots
            .iter()
            .map(|s| SlotFile {
                assignment: s.assignment().iter().map(|a| a.glyph()).collect(),
                persists: trace
                    .events
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| s.persists(EventId::from_index(*i)))
                    .map(|(_, k)| k.clone())
                    .collect(),
                slot: s.slot,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("trace serializes");
    text.push('\n');
    text
}

fn event_index(events: &[String], key: &str) -> Result<EventId, TraceIoError> {
    events
        .iter()
        .position(|e| e == key)
        .map(EventId::from_index)
        .ok_or_else(|| TraceIoError::Invalid(format!("unknown event key `{key}`")))
}

/// Parses canonical trace text back into a [`Trace`].
pub fn load_trace(text: &str) -> Result<Trace, TraceIoError> {
    let file: TraceFile = serde_json::from_str(text).map_err(|e| TraceIoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.format != FORMAT {
        return Err(TraceIoError::Invalid(format!(
            "unsupported format `{}` (expected `{FORMAT}`)",
            file.format
        )));
    }
    if file.slots.len() != file.horizon as usize {
        return Err(TraceIoError::Invalid(format!(
            "horizon {} does not match {} recorded slots",
            file.horizon,
            file.slots.len()
        )));
    }
    let mut slots = Vec::with_capacity(file.slots.len());
    for (i, slot) in file.slots.iter().enumerate() {
        if slot.slot != (i + 1) as u32 {
            return Err(TraceIoError::Invalid(format!(
                "slot {} recorded out of order (expected {})",
                slot.slot,
                i + 1
            )));
        }
        if slot.assignment.chars().count() != file.events.len() {
            return Err(TraceIoError::Invalid(format!(
                "slot {} assignment covers {} events, expected {}",
                slot.slot,
                slot.assignment.chars().count(),
                file.events.len()
            )));
        }
        let assignment: Vec<PAState> = slot
            .assignment
            .chars()
            .map(|c| {
                PAState::from_glyph(c)
                    .ok_or_else(|| TraceIoError::Invalid(format!("bad assignment glyph `{c}`")))
            })
            .collect::<Result<_, _>>()?;
        let mut persists = vec![false; file.events.len()];
        for key in &slot.persists {
            persists[event_index(&file.events, key)?.index()] = true;
        }
        slots.push(SlotState::new(slot.slot, assignment, persists));
    }
    let firings = file
        .firings
        .iter()
        .map(|f| {
            Ok(Firing {
                slot: f.slot,
                arc: ArcId::from_index(f.arc as usize),
                src_event: event_index(&file.events, &f.src)?,
                dst_event: event_index(&file.events, &f.dst)?,
                polarity: match f.polarity {
                    '+' => Polarity::Positive,
                    '-' => Polarity::Negative,
                    other => {
                        return Err(TraceIoError::Invalid(format!(
                            "bad polarity glyph `{other}`"
                        )))
                    }
                },
            })
        })
        .collect::<Result<Vec<_>, TraceIoError>>()?;
    let ne_aliases = file
        .ne_aliases
        .iter()
        .map(|a| {
            Ok(NeAlias {
                name: a.name.clone(),
                src_event: event_index(&file.events, &a.src)?,
                dst_event: event_index(&file.events, &a.dst)?,
            })
        })
        .collect::<Result<Vec<_>, TraceIoError>>()?;
    Ok(Trace {
        model: file.model,
        scenario: file.scenario,
        horizon: file.horizon,
        events: file.events,
        ne_aliases,
        slots,
        firings,
    })
}
