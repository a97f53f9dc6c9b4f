//! The actuality engine.
//!
//! Every event of a model is, at every slot, exactly Potential or Actual.
//! There is no third state and no negation: stopping an event is a
//! transition back to Potential (its region reverts to the static level),
//! and "negative events" exist only as recorded potentializations.
//!
//! A step from slot t to slot t+1 applies, in order:
//!
//! 1. decay — every Actual event not persisting becomes Potential;
//! 2. follow — every target of a positive event-level trigger whose
//!    source was Actual at t becomes Actual (trigger latency is exactly
//!    one slot);
//! 3. the scenario directives bound to slot t+1;
//! 4. negative triggers — every target of a negative event-level trigger
//!    whose source was Actual at t becomes Potential and stops
//!    persisting. Negative outcomes override everything else in the slot.
//!
//! A [`Firing`] is recorded only when the transition it caused is
//! observable between t and t+1, stamped with the cause slot t; a trigger
//! into an event that already holds the target state leaves no record.

use thiserror::Error;

use crate::dsl::{Directive, ScenarioScript, Verb};
use crate::model::{ArcClass, ArcId, EventId, EventKind, NeAlias, Polarity, StaticModel};

/// The only two states an event ever occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PAState {
    Potential,
    Actual,
}

impl PAState {
    /// The table glyph: `-` for potentiality, `+` for actuality.
    pub fn glyph(self) -> char {
        match self {
            PAState::Potential => '-',
            PAState::Actual => '+',
        }
    }

    pub fn from_glyph(c: char) -> Option<PAState> {
        match c {
            '-' => Some(PAState::Potential),
            '+' => Some(PAState::Actual),
            _ => None,
        }
    }
}

/// Total P/A assignment for one slot, plus the set of persisting events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotState {
    pub slot: u32,
    assignment: Vec<PAState>,
    persists: Vec<bool>,
}

impl SlotState {
    pub fn new(slot: u32, assignment: Vec<PAState>, persists: Vec<bool>) -> Self {
        assert_eq!(assignment.len(), persists.len());
        SlotState {
            slot,
            assignment,
            persists,
        }
    }

    pub fn state(&self, event: EventId) -> PAState {
        self.assignment[event.index()]
    }

    pub fn persists(&self, event: EventId) -> bool {
        self.persists[event.index()]
    }

    pub fn assignment(&self) -> &[PAState] {
        &self.assignment
    }

    pub fn persisting(&self) -> impl Iterator<Item = EventId> + '_ {
        self.persists
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| EventId::from_index(i))
    }

    pub fn is_fully_potential(&self) -> bool {
        self.assignment.iter().all(|&s| s == PAState::Potential)
    }
}

/// One trigger arc lifted to the event level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventArc {
    pub arc: ArcId,
    pub src: EventId,
    pub dst: EventId,
    pub polarity: Polarity,
}

/// The event-level trigger relation of a model. Arcs with an endpoint in
/// no declared event region are dormant: present statically, invisible to
/// the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventLinks {
    pub links: Vec<EventArc>,
    pub dormant: Vec<ArcId>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error(
        "trigger arc {arc} endpoint `{endpoint}` lies in several event regions ({}); \
         disambiguate with an `as SRC -> DST` annotation",
        candidates.join(", ")
    )]
    AmbiguousLift {
        arc: ArcId,
        endpoint: String,
        candidates: Vec<String>,
    },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("slot {slot} lies outside 1..={horizon}")]
    SlotOutOfRange { slot: u32, horizon: u32 },
}

/// Lifts every trigger arc to the pair of events its endpoints belong
/// to. An explicit lift annotation wins; otherwise both endpoints must
/// belong to at most one region each.
pub fn event_trigger_links(model: &StaticModel) -> Result<EventLinks, LiftError> {
    let mut links = Vec::new();
    let mut dormant = Vec::new();
    for arc in model.arcs() {
        let polarity = match arc.class {
            ArcClass::Flow => continue,
            ArcClass::Trigger(p) => p,
        };
        if let Some((src, dst)) = arc.lift_hint {
            links.push(EventArc {
                arc: arc.id,
                src,
                dst,
                polarity,
            });
            continue;
        }
        let src_events: Vec<EventId> = model
            .events()
            .iter()
            .filter(|e| e.region.contains_node(arc.src))
            .map(|e| e.id)
            .collect();
        let dst_events: Vec<EventId> = model
            .events()
            .iter()
            .filter(|e| e.region.contains_node(arc.dst))
            .map(|e| e.id)
            .collect();
        if src_events.is_empty() || dst_events.is_empty() {
            dormant.push(arc.id);
            continue;
        }
        for (endpoint, candidates) in [(arc.src, &src_events), (arc.dst, &dst_events)] {
            if candidates.len() > 1 {
                return Err(LiftError::AmbiguousLift {
                    arc: arc.id,
                    endpoint: model.action_path(endpoint),
                    candidates: candidates
                        .iter()
                        .map(|&e| model.event(e).key.clone())
                        .collect(),
                });
            }
        }
        links.push(EventArc {
            arc: arc.id,
            src: src_events[0],
            dst: dst_events[0],
            polarity,
        });
    }
    Ok(EventLinks { links, dormant })
}

/// One recorded trigger application, stamped with the slot whose state
/// caused it; the effect shows at `slot + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Firing {
    pub slot: u32,
    pub arc: ArcId,
    pub src_event: EventId,
    pub dst_event: EventId,
    pub polarity: Polarity,
}

/// A finished run: per-slot assignments plus the causal firing log.
/// Traces are self-contained — event ids index the `events` list — so
/// they survive serialization without the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub model: String,
    pub scenario: String,
    pub horizon: u32,
    pub events: Vec<String>,
    pub ne_aliases: Vec<NeAlias>,
    pub slots: Vec<SlotState>,
    pub firings: Vec<Firing>,
}

impl Trace {
    pub fn event_key(&self, event: EventId) -> &str {
        &self.events[event.index()]
    }

    /// The ne alias registered for a negative firing, if any.
    pub fn alias_for(&self, firing: &Firing) -> Option<&NeAlias> {
        if firing.polarity != Polarity::Negative {
            return None;
        }
        self.ne_aliases
            .iter()
            .find(|a| a.src_event == firing.src_event && a.dst_event == firing.dst_event)
    }
}

/// The stepping machine for one frozen model.
pub struct Engine<'m> {
    model: &'m StaticModel,
    links: EventLinks,
}

impl<'m> Engine<'m> {
    pub fn new(model: &'m StaticModel) -> Result<Self, LiftError> {
        Ok(Engine {
            model,
            links: event_trigger_links(model)?,
        })
    }

    pub fn links(&self) -> &EventLinks {
        &self.links
    }

    /// Slot 1 before any directive: full potentiality.
    pub fn initial_slot(&self) -> SlotState {
        let n = self.model.events().len();
        SlotState::new(1, vec![PAState::Potential; n], vec![false; n])
    }

    fn apply_directive(&self, d: &Directive, assignment: &mut [PAState], persists: &mut [bool]) {
        let i = d.event.index();
        match d.verb {
            Verb::Actualize => {
                assignment[i] = PAState::Actual;
                if d.persist || self.model.event(d.event).kind == EventKind::Instance {
                    persists[i] = true;
                }
            }
            Verb::Potentialize => {
                assignment[i] = PAState::Potential;
                persists[i] = false;
            }
        }
    }

    /// Applies slot-1 directives to the initial state in place.
    pub fn apply_initial_directives<'a>(
        &self,
        state: &mut SlotState,
        directives: impl Iterator<Item = &'a Directive>,
    ) {
        let SlotState {
            assignment,
            persists,
            ..
        } = state;
        for d in directives {
            self.apply_directive(d, assignment, persists);
        }
    }

    /// Computes slot t+1 from slot t plus the directives bound to t+1.
    pub fn step(&self, current: &SlotState, directives: &[&Directive]) -> (SlotState, Vec<Firing>) {
        let n = self.model.events().len();
        debug_assert_eq!(current.assignment.len(), n);
        let mut next = current.assignment.clone();
        let mut persists = current.persists.clone();

        for i in 0..n {
            if next[i] == PAState::Actual && !persists[i] {
                next[i] = PAState::Potential;
            }
        }
        for link in &self.links.links {
            if link.polarity == Polarity::Positive
                && current.state(link.src) == PAState::Actual
            {
                next[link.dst.index()] = PAState::Actual;
                if self.model.event(link.dst).kind == EventKind::Instance {
                    persists[link.dst.index()] = true;
                }
            }
        }
        for d in directives {
            self.apply_directive(d, &mut next, &mut persists);
        }
        for link in &self.links.links {
            if link.polarity == Polarity::Negative
                && current.state(link.src) == PAState::Actual
            {
                next[link.dst.index()] = PAState::Potential;
                persists[link.dst.index()] = false;
            }
        }

        let mut firings = Vec::new();
        for link in &self.links.links {
            if current.state(link.src) != PAState::Actual {
                continue;
            }
            let was = current.state(link.dst);
            let now = next[link.dst.index()];
            let observable = match link.polarity {
                Polarity::Positive => was == PAState::Potential && now == PAState::Actual,
                Polarity::Negative => was == PAState::Actual && now == PAState::Potential,
            };
            if observable {
                firings.push(Firing {
                    slot: current.slot,
                    arc: link.arc,
                    src_event: link.src,
                    dst_event: link.dst,
                    polarity: link.polarity,
                });
            }
        }
        (SlotState::new(current.slot + 1, next, persists), firings)
    }
}

/// Runs a validated scenario to its horizon. Slot 1 starts at full
/// potentiality, then slot-1 directives apply; stepping is pure, so
/// identical inputs always produce identical traces.
pub fn run_scenario(model: &StaticModel, script: &ScenarioScript) -> Result<Trace, LiftError> {
    let engine = Engine::new(model)?;
    let mut slots = Vec::with_capacity(script.slots as usize);
    let mut firings = Vec::new();

    let mut current = engine.initial_slot();
    engine.apply_initial_directives(&mut current, script.at_slot(1));
    slots.push(current.clone());

    for t in 2..=script.slots {
        let dirs: Vec<&Directive> = script.at_slot(t).collect();
        let (next, mut fired) = engine.step(&current, &dirs);
        firings.append(&mut fired);
        slots.push(next.clone());
        current = next;
    }

    Ok(Trace {
        model: model.name().to_string(),
        scenario: script.name.clone(),
        horizon: script.slots,
        events: model.events().iter().map(|e| e.key.clone()).collect(),
        ne_aliases: model.ne_aliases().to_vec(),
        slots,
        firings,
    })
}

/// True when every event is Potential at the given slot of the trace.
pub fn is_full_potentiality(trace: &Trace, slot: u32) -> Result<bool, TraceError> {
    if slot < 1 || slot > trace.horizon {
        return Err(TraceError::SlotOutOfRange {
            slot,
            horizon: trace.horizon,
        });
    }
    Ok(trace.slots[(slot - 1) as usize].is_fully_potential())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_model, parse_scenario};
    use crate::model::{ActionKind, ModelBuilder};

    const BULB: &str = "\
model bulb
thimac Current { action create; action process : flows; action release; action transfer }
thimac Bulb { action create; action transfer; action receive }
thimac Light { action create }
flow Current.create -> Current.process
flow Current.process -> Current.release
flow Current.release -> Current.transfer
flow Current.transfer -> Bulb.transfer
flow Bulb.transfer -> Bulb.receive
trigger Current.process -> Light.create
instance E1 \"A bulb exists\" { Bulb.create }
event E2 \"Current flows\" { Current.create, Current.process, Current.release, Current.transfer, Bulb.transfer, Bulb.receive }
event E3 \"Light is created\" { Light.create }
";

    const BULB_SCENARIO: &str = "\
slots 7
at 1 actualize E1 persist
at 2 actualize E2 persist
at 5 potentialize E2
";

    fn bulb_trace() -> Trace {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let script = parse_scenario(BULB_SCENARIO, &model, "bulb_on_off.tms", None).unwrap();
        run_scenario(&model, &script).unwrap()
    }

    fn row(trace: &Trace, key: &str) -> String {
        let idx = trace.events.iter().position(|e| e == key).unwrap();
        trace
            .slots
            .iter()
            .map(|s| s.assignment()[idx].glyph())
            .collect()
    }

    /// The durations table for the bulb, frozen from the three rows the
    /// run must reproduce: the instance persists throughout, the current
    /// spans slots 2..=4, the light follows one slot behind.
    #[test]
    fn bulb_reproduces_duration_table() {
        let trace = bulb_trace();
        assert_eq!(row(&trace, "E1"), "+++++++");
        assert_eq!(row(&trace, "E2"), "-+++---");
        assert_eq!(row(&trace, "E3"), "--+++--");
    }

    #[test]
    fn bulb_trigger_lifts_to_e2_e3() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let links = event_trigger_links(&model).unwrap();
        assert_eq!(links.links.len(), 1);
        assert!(links.dormant.is_empty());
        let link = links.links[0];
        assert_eq!(model.event(link.src).key, "E2");
        assert_eq!(model.event(link.dst).key, "E3");
        assert_eq!(link.polarity, Polarity::Positive);
    }

    #[test]
    fn bulb_firing_log_records_one_observable_actualization() {
        let trace = bulb_trace();
        // E2 is Actual at 2..4, but E3 observably turns Actual only once.
        assert_eq!(trace.firings.len(), 1);
        let f = &trace.firings[0];
        assert_eq!(f.slot, 2);
        assert_eq!(trace.event_key(f.src_event), "E2");
        assert_eq!(trace.event_key(f.dst_event), "E3");
        assert_eq!(f.polarity, Polarity::Positive);
    }

    #[test]
    fn full_potentiality_checks() {
        let trace = bulb_trace();
        // Slot 3 has E1, E2, E3 all Actual.
        assert_eq!(is_full_potentiality(&trace, 3), Ok(false));
        assert_eq!(is_full_potentiality(&trace, 1), Ok(false)); // E1 is Actual
        assert!(matches!(
            is_full_potentiality(&trace, 9),
            Err(TraceError::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            is_full_potentiality(&trace, 0),
            Err(TraceError::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_scenario_stays_fully_potential_with_no_firings() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let script = parse_scenario("slots 5\n", &model, "idle.tms", None).unwrap();
        let trace = run_scenario(&model, &script).unwrap();
        assert!(trace.firings.is_empty());
        for slot in 1..=5 {
            assert_eq!(is_full_potentiality(&trace, slot), Ok(true));
        }
    }

    #[test]
    fn potentialize_is_idempotent() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let engine = Engine::new(&model).unwrap();
        let e2 = model.event_by_key("E2").unwrap().id;
        let current = engine.initial_slot();
        let once = Directive {
            slot: 2,
            verb: Verb::Potentialize,
            event: e2,
            persist: false,
        };
        let (next_once, f1) = engine.step(&current, &[&once]);
        let (next_twice, f2) = engine.step(&current, &[&once, &once]);
        assert_eq!(next_once, next_twice);
        assert!(f1.is_empty() && f2.is_empty());
        assert_eq!(next_once.state(e2), PAState::Potential);
    }

    #[test]
    fn negative_overrides_positive_in_same_slot() {
        // door-open keeps itself actual and heat tries to keep itself
        // actual through a positive self-lift, but the negative trigger
        // from the door wins.
        let src = "\
model m
thimac Door { action process : open }
thimac Heat { action create; action process }
flow Heat.create -> Heat.process
trigger Heat.process -> Heat.create
negtrigger Door.process -> Heat.process
event D \"door open\" { Door.process }
event H \"heating\" { Heat.create, Heat.process }
";
        let model = parse_model(src, "m.tm").unwrap();
        let script = parse_scenario(
            "slots 5\nat 2 actualize H\nat 3 actualize D persist\n",
            &model,
            "s.tms",
            None,
        )
        .unwrap();
        let trace = run_scenario(&model, &script).unwrap();
        let h = model.event_by_key("H").unwrap().id;
        let d = model.event_by_key("D").unwrap().id;
        // H self-sustains at slot 3, D turns Actual at 3, then the
        // negative trigger potentializes H at 4 despite the self-lift.
        assert_eq!(trace.slots[2].state(h), PAState::Actual);
        assert_eq!(trace.slots[3].state(h), PAState::Potential);
        assert_eq!(trace.slots[3].state(d), PAState::Actual);
        let neg: Vec<_> = trace
            .firings
            .iter()
            .filter(|f| f.polarity == Polarity::Negative)
            .collect();
        assert_eq!(neg.len(), 1);
        assert_eq!(neg[0].slot, 3);
        assert_eq!(neg[0].src_event, d);
        assert_eq!(neg[0].dst_event, h);
    }

    #[test]
    fn trigger_into_already_actual_event_leaves_no_record() {
        let src = "\
model m
thimac A { action process }
thimac B { action process }
trigger A.process -> B.process
event EA \"a\" { A.process }
event EB \"b\" { B.process }
";
        let model = parse_model(src, "m.tm").unwrap();
        let script = parse_scenario(
            "slots 4\nat 1 actualize EB persist\nat 2 actualize EA persist\n",
            &model,
            "s.tms",
            None,
        )
        .unwrap();
        let trace = run_scenario(&model, &script).unwrap();
        // EB is already Actual whenever the trigger could raise it.
        assert!(trace.firings.is_empty());
        let eb = model.event_by_key("EB").unwrap().id;
        assert!(trace.slots.iter().skip(0).all(|s| s.state(eb) == PAState::Actual));
    }

    #[test]
    fn dormant_arcs_are_reported() {
        let src = "\
model m
thimac A { action process }
thimac Gate { action process }
trigger A.process -> Gate.process
event EA \"a\" { A.process }
";
        let model = parse_model(src, "m.tm").unwrap();
        let links = event_trigger_links(&model).unwrap();
        assert!(links.links.is_empty());
        assert_eq!(links.dormant.len(), 1);
    }

    #[test]
    fn overlapping_regions_need_a_lift_annotation() {
        let src = "\
model m
thimac A { action create; action process }
thimac B { action create }
flow A.create -> A.process
trigger A.process -> B.create
event E1 \"narrow\" { A.process }
event E2 \"wide\" { A.create, A.process }
event E3 \"b\" { B.create }
";
        let model = parse_model(src, "m.tm").unwrap();
        let err = event_trigger_links(&model).unwrap_err();
        assert!(matches!(err, LiftError::AmbiguousLift { .. }));

        let annotated = src.replace(
            "trigger A.process -> B.create",
            "trigger A.process -> B.create as E1 -> E3",
        );
        let model = parse_model(&annotated, "m.tm").unwrap();
        let links = event_trigger_links(&model).unwrap();
        assert_eq!(links.links.len(), 1);
        assert_eq!(model.event(links.links[0].src).key, "E1");
    }

    /// Latency law: through a chain of k positive triggers from a
    /// persist-actualized source, the k-th event first turns Actual
    /// exactly k slots after the source.
    #[test]
    fn trigger_chains_have_unit_latency_per_link() {
        for k in 1..=6usize {
            let mut b = ModelBuilder::new("chain");
            let mut nodes = Vec::new();
            for i in 0..=k {
                let t = b.add_thimac(&format!("T{i}"), None).unwrap();
                nodes.push(b.add_action(t, ActionKind::Process, None).unwrap());
            }
            for w in nodes.windows(2) {
                b.connect_trigger(w[0], w[1], Polarity::Positive).unwrap();
            }
            let mut events = Vec::new();
            for (i, &n) in nodes.iter().enumerate() {
                events.push(
                    b.define_event_induced(&format!("E{i}"), "link", &[n], EventKind::Event)
                        .unwrap(),
                );
            }
            let model = b.freeze();
            let engine = Engine::new(&model).unwrap();
            let start = 2u32;
            let mut state = engine.initial_slot();
            let dir = Directive {
                slot: start,
                verb: Verb::Actualize,
                event: events[0],
                persist: true,
            };
            let mut first_actual = vec![None; events.len()];
            for t in 2..=(start + k as u32 + 2) {
                let dirs: Vec<&Directive> = if t == start { vec![&dir] } else { vec![] };
                let (next, _) = engine.step(&state, &dirs);
                for (i, &e) in events.iter().enumerate() {
                    if next.state(e) == PAState::Actual && first_actual[i].is_none() {
                        first_actual[i] = Some(t);
                    }
                }
                state = next;
            }
            for (i, first) in first_actual.iter().enumerate() {
                assert_eq!(*first, Some(start + i as u32), "chain length {k}, link {i}");
            }
        }
    }

    #[test]
    fn run_is_deterministic() {
        let a = bulb_trace();
        let b = bulb_trace();
        assert_eq!(a, b);
    }

    #[test]
    fn reversion_leaves_the_static_model_untouched() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let before = crate::dsl::write_model(&model);
        let script = parse_scenario(BULB_SCENARIO, &model, "s.tms", None).unwrap();
        let _ = run_scenario(&model, &script).unwrap();
        assert_eq!(crate::dsl::write_model(&model), before);
    }
}
