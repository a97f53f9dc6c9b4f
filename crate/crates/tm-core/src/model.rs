//! The thimac metamodel: thimacs, the five generic actions, flow and
//! trigger arcs, regions, and event definitions.
//!
//! Models are assembled through [`ModelBuilder`], which enforces
//! referential integrity at every step, then sealed with
//! [`ModelBuilder::freeze`] into an immutable [`StaticModel`]. A frozen
//! model carries no time component whatsoever; actuality is the business
//! of [`crate::dynamics`].

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::diag::SourceSpan;

/// The five generic machine actions. Arrive and accept are merged into
/// receive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Create,
        ActionKind::Process,
        ActionKind::Release,
        ActionKind::Transfer,
        ActionKind::Receive,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::Create => "create",
            ActionKind::Process => "process",
            ActionKind::Release => "release",
            ActionKind::Transfer => "transfer",
            ActionKind::Receive => "receive",
        }
    }

    pub fn from_keyword(word: &str) -> Option<ActionKind> {
        Self::ALL.iter().copied().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident, $prefix:literal) => {
        $(#[$doc])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub(crate) u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }

            pub fn from_index(index: usize) -> Self {
                $name(index as u32)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// Identifier of a thimac within one model.
    ThimacId,
    "t"
);
id_type!(
    /// Identifier of an action node within one model.
    ActionId,
    "a"
);
id_type!(
    /// Identifier of a flow or trigger arc within one model.
    ArcId,
    "r"
);
id_type!(
    /// Identifier of an event definition within one model.
    EventId,
    "e"
);

/// A thing/machine. Thimacs nest: the containment relation is a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thimac {
    pub id: ThimacId,
    pub name: String,
    pub parent: Option<ThimacId>,
    pub children: Vec<ThimacId>,
    pub actions: Vec<ActionId>,
}

/// One generic action owned by a thimac. The optional label disambiguates
/// several same-kind actions of one owner ("time reaches one minute").
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionNode {
    pub id: ActionId,
    pub owner: ThimacId,
    pub kind: ActionKind,
    pub label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcClass {
    Flow,
    Trigger(Polarity),
}

impl ArcClass {
    pub fn is_flow(self) -> bool {
        matches!(self, ArcClass::Flow)
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            ArcClass::Flow => None,
            ArcClass::Trigger(p) => Some(p),
        }
    }
}

/// A flow or trigger arc between two action nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: ArcId,
    pub src: ActionId,
    pub dst: ActionId,
    pub class: ArcClass,
    /// Explicit event-level lift for trigger arcs whose endpoints sit in
    /// overlapping event regions (resolves `AmbiguousLift`).
    pub lift_hint: Option<(EventId, EventId)>,
}

/// A well-formed subdiagram of the static model: a node set plus an
/// arc set closed over arc endpoints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Region {
    pub nodes: BTreeSet<ActionId>,
    pub arcs: BTreeSet<ArcId>,
}

impl Region {
    pub fn contains_node(&self, id: ActionId) -> bool {
        self.nodes.contains(&id)
    }
}

/// Whether an event definition is an ordinary event or an instance (an
/// extended event asserting a particular thimac's existence).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Event,
    Instance,
}

/// A named region that the dynamics engine can actualize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDef {
    pub id: EventId,
    pub key: String,
    pub label: String,
    pub region: Region,
    pub kind: EventKind,
}

/// A display alias for the potentialization recorded by one negative
/// event-level trigger, e.g. `E7 = neg(E6 -> E3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeAlias {
    pub name: String,
    pub src_event: EventId,
    pub dst_event: EventId,
}

/// Source positions for declarations, kept out of model equality so that
/// reparsing serialized text yields an equal model.
#[derive(Clone, Debug, Default)]
pub struct SpanTable {
    pub thimacs: Vec<Option<SourceSpan>>,
    pub actions: Vec<Option<SourceSpan>>,
    pub arcs: Vec<Option<SourceSpan>>,
    pub events: Vec<Option<SourceSpan>>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown parent thimac {0}")]
    UnknownParent(ThimacId),
    #[error("duplicate name `{name}` among children of the same parent")]
    DuplicateName { name: String },
    #[error("unknown owner thimac {0}")]
    UnknownOwner(ThimacId),
    #[error("duplicate action `{kind}`{} on thimac `{thimac}`", label_suffix(.label))]
    DuplicateAction {
        thimac: String,
        kind: ActionKind,
        label: Option<String>,
    },
    #[error("unknown action node {0}")]
    UnknownEndpoint(ActionId),
    #[error("illegal flow adjacency {src} -> {dst}")]
    IllegalFlowAdjacency { src: ActionKind, dst: ActionKind },
    #[error("a trigger may not connect an action to itself")]
    SelfTrigger,
    #[error("event region has no nodes")]
    EmptyRegion,
    #[error("region references unknown node {0}")]
    UnknownNode(ActionId),
    #[error("region references unknown arc {0}")]
    UnknownArc(ArcId),
    #[error("region arc {arc} has an endpoint outside the region's node set")]
    DanglingArcEndpoint { arc: ArcId },
    #[error("duplicate event id `{key}`")]
    DuplicateEvent { key: String },
    #[error("unknown event {0}")]
    UnknownEvent(EventId),
    #[error("lift hint names event `{event}` which does not contain the arc endpoint")]
    LiftHintOutsideRegion { event: String },
    #[error("arc {0} is not a trigger")]
    NotATrigger(ArcId),
}

fn label_suffix(label: &Option<String>) -> String {
    match label {
        Some(l) => format!(" : \"{l}\""),
        None => String::new(),
    }
}

/// Legal (src, dst) kind pairs for flow arcs. Transfer -> Transfer is
/// additionally restricted to distinct owner thimacs at connect time.
pub fn flow_allowed(src: ActionKind, dst: ActionKind) -> bool {
    use ActionKind::*;
    matches!(
        (src, dst),
        (Create, Process)
            | (Create, Release)
            | (Receive, Process)
            | (Receive, Release)
            | (Process, Release)
            | (Process, Create)
            | (Release, Transfer)
            | (Transfer, Transfer)
            | (Transfer, Receive)
    )
}

/// An immutable, timeless potentiality graph.
///
/// Equality is canonical-form equality: two models compare equal when
/// their canonical serializations coincide, which makes
/// `parse(serialize(m)) == m` hold regardless of internal id numbering.
#[derive(Clone, Debug)]
pub struct StaticModel {
    pub(crate) name: String,
    pub(crate) thimacs: Vec<Thimac>,
    pub(crate) actions: Vec<ActionNode>,
    pub(crate) arcs: Vec<Arc>,
    pub(crate) events: Vec<EventDef>,
    pub(crate) ne_aliases: Vec<NeAlias>,
    pub(crate) spans: SpanTable,
}

impl PartialEq for StaticModel {
    fn eq(&self, other: &Self) -> bool {
        crate::dsl::write_model(self) == crate::dsl::write_model(other)
    }
}

impl Eq for StaticModel {}

impl StaticModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn thimacs(&self) -> &[Thimac] {
        &self.thimacs
    }

    pub fn thimac(&self, id: ThimacId) -> &Thimac {
        &self.thimacs[id.index()]
    }

    pub fn roots(&self) -> impl Iterator<Item = &Thimac> {
        self.thimacs.iter().filter(|t| t.parent.is_none())
    }

    pub fn actions(&self) -> &[ActionNode] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &ActionNode {
        &self.actions[id.index()]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn events(&self) -> &[EventDef] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> &EventDef {
        &self.events[id.index()]
    }

    pub fn event_by_key(&self, key: &str) -> Option<&EventDef> {
        self.events.iter().find(|e| e.key == key)
    }

    pub fn ne_aliases(&self) -> &[NeAlias] {
        &self.ne_aliases
    }

    pub fn spans(&self) -> &SpanTable {
        &self.spans
    }

    /// Dotted path of a thimac from its root, e.g. `Machine.Washing`.
    pub fn thimac_path(&self, id: ThimacId) -> String {
        let mut parts = Vec::new();
        let mut cur = Some(id);
        while let Some(t) = cur {
            let thimac = self.thimac(t);
            parts.push(thimac.name.clone());
            cur = thimac.parent;
        }
        parts.reverse();
        parts.join(".")
    }

    /// Dotted path of an action including a label qualifier whenever the
    /// node carries a label, e.g. `Oven.Door.process:open`.
    pub fn action_path(&self, id: ActionId) -> String {
        let node = self.action(id);
        let mut path = self.thimac_path(node.owner);
        path.push('.');
        path.push_str(node.kind.keyword());
        if let Some(label) = &node.label {
            path.push(':');
            if crate::dsl::is_bare_ident(label) {
                path.push_str(label);
            } else {
                path.push('"');
                path.push_str(label);
                path.push('"');
            }
        }
        path
    }

    /// All arcs of the model whose endpoints both lie in `nodes`.
    pub fn induced_arcs(&self, nodes: &BTreeSet<ActionId>) -> BTreeSet<ArcId> {
        self.arcs
            .iter()
            .filter(|a| nodes.contains(&a.src) && nodes.contains(&a.dst))
            .map(|a| a.id)
            .collect()
    }

    /// Undirected adjacency over the union of flow and trigger arcs,
    /// indexed by action id. Used for region connectivity.
    pub fn undirected_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![BTreeSet::new(); self.actions.len()];
        for arc in &self.arcs {
            if arc.src != arc.dst {
                adj[arc.src.index()].insert(arc.dst.0);
                adj[arc.dst.index()].insert(arc.src.0);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// True when `nodes` is connected under the undirected arc union.
    /// Singletons are connected; the empty set is not.
    pub fn is_connected(&self, nodes: &BTreeSet<ActionId>) -> bool {
        let Some(&start) = nodes.iter().next() else {
            return false;
        };
        let adj = self.undirected_adjacency();
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(n) = stack.pop() {
            for &m in &adj[n.index()] {
                let m = ActionId(m);
                if nodes.contains(&m) && seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen.len() == nodes.len()
    }
}

/// Incremental constructor for [`StaticModel`]. Every mutation validates
/// referential integrity before registering anything.
#[derive(Clone, Debug)]
pub struct ModelBuilder {
    model: StaticModel,
}

impl ModelBuilder {
    pub fn new(name: &str) -> Self {
        ModelBuilder {
            model: StaticModel {
                name: name.to_string(),
                thimacs: Vec::new(),
                actions: Vec::new(),
                arcs: Vec::new(),
                events: Vec::new(),
                ne_aliases: Vec::new(),
                spans: SpanTable::default(),
            },
        }
    }

    /// Read access to the model under construction.
    pub fn model(&self) -> &StaticModel {
        &self.model
    }

    pub fn set_name(&mut self, name: &str) {
        self.model.name = name.to_string();
    }

    pub fn add_thimac(
        &mut self,
        name: &str,
        parent: Option<ThimacId>,
    ) -> Result<ThimacId, ModelError> {
        if let Some(p) = parent {
            if p.index() >= self.model.thimacs.len() {
                return Err(ModelError::UnknownParent(p));
            }
        }
        let sibling_clash = self
            .model
            .thimacs
            .iter()
            .any(|t| t.parent == parent && t.name == name);
        if sibling_clash {
            return Err(ModelError::DuplicateName {
                name: name.to_string(),
            });
        }
        let id = ThimacId(self.model.thimacs.len() as u32);
        self.model.thimacs.push(Thimac {
            id,
            name: name.to_string(),
            parent,
            children: Vec::new(),
            actions: Vec::new(),
        });
        self.model.spans.thimacs.push(None);
        if let Some(p) = parent {
            self.model.thimacs[p.index()].children.push(id);
        }
        Ok(id)
    }

    pub fn add_action(
        &mut self,
        owner: ThimacId,
        kind: ActionKind,
        label: Option<&str>,
    ) -> Result<ActionId, ModelError> {
        if owner.index() >= self.model.thimacs.len() {
            return Err(ModelError::UnknownOwner(owner));
        }
        let clash = self.model.thimacs[owner.index()]
            .actions
            .iter()
            .map(|a| &self.model.actions[a.index()])
            .any(|a| a.kind == kind && a.label.as_deref() == label);
        if clash {
            return Err(ModelError::DuplicateAction {
                thimac: self.model.thimac_path(owner),
                kind,
                label: label.map(str::to_string),
            });
        }
        let id = ActionId(self.model.actions.len() as u32);
        self.model.actions.push(ActionNode {
            id,
            owner,
            kind,
            label: label.map(str::to_string),
        });
        self.model.spans.actions.push(None);
        self.model.thimacs[owner.index()].actions.push(id);
        Ok(id)
    }

    fn check_endpoints(&self, src: ActionId, dst: ActionId) -> Result<(), ModelError> {
        for id in [src, dst] {
            if id.index() >= self.model.actions.len() {
                return Err(ModelError::UnknownEndpoint(id));
            }
        }
        Ok(())
    }

    /// Registers an arc. Connecting the same (src, dst, class) triple
    /// twice is idempotent and returns the existing arc.
    pub fn connect(
        &mut self,
        src: ActionId,
        dst: ActionId,
        class: ArcClass,
    ) -> Result<ArcId, ModelError> {
        self.check_endpoints(src, dst)?;
        if let Some(existing) = self
            .model
            .arcs
            .iter()
            .find(|a| a.src == src && a.dst == dst && a.class == class)
        {
            return Ok(existing.id);
        }
        match class {
            ArcClass::Flow => {
                let (s, d) = (&self.model.actions[src.index()], &self.model.actions[dst.index()]);
                if !flow_allowed(s.kind, d.kind) {
                    return Err(ModelError::IllegalFlowAdjacency {
                        src: s.kind,
                        dst: d.kind,
                    });
                }
                // Transfer -> Transfer only crosses a thimac boundary.
                if s.kind == ActionKind::Transfer
                    && d.kind == ActionKind::Transfer
                    && s.owner == d.owner
                {
                    return Err(ModelError::IllegalFlowAdjacency {
                        src: s.kind,
                        dst: d.kind,
                    });
                }
            }
            ArcClass::Trigger(_) => {
                if src == dst {
                    return Err(ModelError::SelfTrigger);
                }
            }
        }
        Ok(self.push_arc(src, dst, class))
    }

    pub fn connect_flow(&mut self, src: ActionId, dst: ActionId) -> Result<ArcId, ModelError> {
        self.connect(src, dst, ArcClass::Flow)
    }

    pub fn connect_trigger(
        &mut self,
        src: ActionId,
        dst: ActionId,
        polarity: Polarity,
    ) -> Result<ArcId, ModelError> {
        self.connect(src, dst, ArcClass::Trigger(polarity))
    }

    /// Registers a flow arc without the adjacency check. Intended for
    /// importers of foreign data; the validator reports such arcs via V2.
    pub fn connect_flow_unchecked(
        &mut self,
        src: ActionId,
        dst: ActionId,
    ) -> Result<ArcId, ModelError> {
        self.check_endpoints(src, dst)?;
        Ok(self.push_arc(src, dst, ArcClass::Flow))
    }

    fn push_arc(&mut self, src: ActionId, dst: ActionId, class: ArcClass) -> ArcId {
        let id = ArcId(self.model.arcs.len() as u32);
        self.model.arcs.push(Arc {
            id,
            src,
            dst,
            class,
            lift_hint: None,
        });
        self.model.spans.arcs.push(None);
        id
    }

    /// Pins the event-level lift of a trigger arc (the `as E6 -> E3`
    /// annotation). Both events must contain the respective endpoint.
    pub fn set_lift_hint(
        &mut self,
        arc: ArcId,
        src_event: EventId,
        dst_event: EventId,
    ) -> Result<(), ModelError> {
        if arc.index() >= self.model.arcs.len() {
            return Err(ModelError::UnknownArc(arc));
        }
        if self.model.arcs[arc.index()].class.is_flow() {
            return Err(ModelError::NotATrigger(arc));
        }
        for ev in [src_event, dst_event] {
            if ev.index() >= self.model.events.len() {
                return Err(ModelError::UnknownEvent(ev));
            }
        }
        let (src, dst) = {
            let a = &self.model.arcs[arc.index()];
            (a.src, a.dst)
        };
        for (ev, endpoint) in [(src_event, src), (dst_event, dst)] {
            if !self.model.events[ev.index()].region.contains_node(endpoint) {
                return Err(ModelError::LiftHintOutsideRegion {
                    event: self.model.events[ev.index()].key.clone(),
                });
            }
        }
        self.model.arcs[arc.index()].lift_hint = Some((src_event, dst_event));
        Ok(())
    }

    /// Registers an event over an explicit node and arc set. The arc set
    /// must be endpoint-closed over the node set.
    pub fn define_event(
        &mut self,
        key: &str,
        label: &str,
        nodes: &[ActionId],
        arcs: &[ArcId],
        kind: EventKind,
    ) -> Result<EventId, ModelError> {
        if nodes.is_empty() {
            return Err(ModelError::EmptyRegion);
        }
        if self.model.events.iter().any(|e| e.key == key) {
            return Err(ModelError::DuplicateEvent {
                key: key.to_string(),
            });
        }
        let mut node_set = BTreeSet::new();
        for &n in nodes {
            if n.index() >= self.model.actions.len() {
                return Err(ModelError::UnknownNode(n));
            }
            node_set.insert(n);
        }
        let mut arc_set = BTreeSet::new();
        for &a in arcs {
            if a.index() >= self.model.arcs.len() {
                return Err(ModelError::UnknownArc(a));
            }
            let arc = &self.model.arcs[a.index()];
            if !node_set.contains(&arc.src) || !node_set.contains(&arc.dst) {
                return Err(ModelError::DanglingArcEndpoint { arc: a });
            }
            arc_set.insert(a);
        }
        let id = EventId(self.model.events.len() as u32);
        self.model.events.push(EventDef {
            id,
            key: key.to_string(),
            label: label.to_string(),
            region: Region {
                nodes: node_set,
                arcs: arc_set,
            },
            kind,
        });
        self.model.spans.events.push(None);
        Ok(id)
    }

    /// Registers an event whose arc set is the full induced subdiagram of
    /// the given nodes.
    pub fn define_event_induced(
        &mut self,
        key: &str,
        label: &str,
        nodes: &[ActionId],
        kind: EventKind,
    ) -> Result<EventId, ModelError> {
        let node_set: BTreeSet<ActionId> = nodes.iter().copied().collect();
        let arcs: Vec<ArcId> = self.model.induced_arcs(&node_set).into_iter().collect();
        self.define_event(key, label, nodes, &arcs, kind)
    }

    pub fn add_ne_alias(
        &mut self,
        name: &str,
        src_event: EventId,
        dst_event: EventId,
    ) -> Result<(), ModelError> {
        for ev in [src_event, dst_event] {
            if ev.index() >= self.model.events.len() {
                return Err(ModelError::UnknownEvent(ev));
            }
        }
        let clash = self.model.ne_aliases.iter().any(|a| a.name == name)
            || self.model.events.iter().any(|e| e.key == name);
        if clash {
            return Err(ModelError::DuplicateName {
                name: name.to_string(),
            });
        }
        self.model.ne_aliases.push(NeAlias {
            name: name.to_string(),
            src_event,
            dst_event,
        });
        Ok(())
    }

    pub fn set_thimac_span(&mut self, id: ThimacId, span: SourceSpan) {
        self.model.spans.thimacs[id.index()] = Some(span);
    }

    pub fn set_action_span(&mut self, id: ActionId, span: SourceSpan) {
        self.model.spans.actions[id.index()] = Some(span);
    }

    pub fn set_arc_span(&mut self, id: ArcId, span: SourceSpan) {
        self.model.spans.arcs[id.index()] = Some(span);
    }

    pub fn set_event_span(&mut self, id: EventId, span: SourceSpan) {
        self.model.spans.events[id.index()] = Some(span);
    }

    /// Seals the model. All invariants were enforced incrementally, so
    /// this is a plain move.
    pub fn freeze(self) -> StaticModel {
        self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_thimacs() -> (ModelBuilder, ThimacId, ThimacId) {
        let mut b = ModelBuilder::new("m");
        let a = b.add_thimac("A", None).unwrap();
        let c = b.add_thimac("B", None).unwrap();
        (b, a, c)
    }

    #[test]
    fn add_root_and_child_thimacs() {
        let mut b = ModelBuilder::new("oven");
        let oven = b.add_thimac("Oven", None).unwrap();
        let heat = b.add_thimac("Heat", Some(oven)).unwrap();
        assert_eq!(b.model().thimac(heat).parent, Some(oven));
        assert_eq!(b.model().thimac_path(heat), "Oven.Heat");
    }

    #[test]
    fn duplicate_sibling_name_rejected() {
        let mut b = ModelBuilder::new("oven");
        let oven = b.add_thimac("Oven", None).unwrap();
        b.add_thimac("Heat", Some(oven)).unwrap();
        let err = b.add_thimac("Heat", Some(oven)).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateName { .. }));
        // Same name under a different parent is fine.
        b.add_thimac("Heat", None).unwrap();
    }

    #[test]
    fn unknown_parent_rejected() {
        let mut b = ModelBuilder::new("m");
        let err = b.add_thimac("X", Some(ThimacId(7))).unwrap_err();
        assert_eq!(err, ModelError::UnknownParent(ThimacId(7)));
    }

    #[test]
    fn add_action_requires_owner() {
        let mut b = ModelBuilder::new("m");
        let err = b
            .add_action(ThimacId(0), ActionKind::Process, None)
            .unwrap_err();
        assert_eq!(err, ModelError::UnknownOwner(ThimacId(0)));
    }

    #[test]
    fn duplicate_action_triple_rejected() {
        let (mut b, a, _) = two_thimacs();
        b.add_action(a, ActionKind::Process, Some("x")).unwrap();
        b.add_action(a, ActionKind::Process, Some("y")).unwrap();
        b.add_action(a, ActionKind::Process, None).unwrap();
        let err = b.add_action(a, ActionKind::Process, Some("x")).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateAction { .. }));
    }

    #[test]
    fn flow_adjacency_enforced() {
        let (mut b, a, c) = two_thimacs();
        let create = b.add_action(a, ActionKind::Create, None).unwrap();
        let receive = b.add_action(c, ActionKind::Receive, None).unwrap();
        let err = b.connect_flow(create, receive).unwrap_err();
        assert_eq!(
            err,
            ModelError::IllegalFlowAdjacency {
                src: ActionKind::Create,
                dst: ActionKind::Receive
            }
        );
    }

    #[test]
    fn transfer_transfer_crosses_boundaries_only() {
        let (mut b, a, c) = two_thimacs();
        let t1 = b.add_action(a, ActionKind::Transfer, Some("out")).unwrap();
        let t2 = b.add_action(a, ActionKind::Transfer, Some("in")).unwrap();
        let t3 = b.add_action(c, ActionKind::Transfer, None).unwrap();
        assert!(b.connect_flow(t1, t3).is_ok());
        let err = b.connect_flow(t1, t2).unwrap_err();
        assert!(matches!(err, ModelError::IllegalFlowAdjacency { .. }));
    }

    #[test]
    fn self_trigger_rejected() {
        let (mut b, a, _) = two_thimacs();
        let p = b.add_action(a, ActionKind::Process, None).unwrap();
        let err = b.connect_trigger(p, p, Polarity::Positive).unwrap_err();
        assert_eq!(err, ModelError::SelfTrigger);
    }

    #[test]
    fn triggers_ignore_flow_adjacency() {
        let (mut b, a, c) = two_thimacs();
        let create = b.add_action(a, ActionKind::Create, None).unwrap();
        let receive = b.add_action(c, ActionKind::Receive, None).unwrap();
        assert!(b.connect_trigger(create, receive, Polarity::Negative).is_ok());
    }

    #[test]
    fn define_event_checks_region() {
        let (mut b, a, c) = two_thimacs();
        let create = b.add_action(a, ActionKind::Create, None).unwrap();
        let process = b.add_action(c, ActionKind::Process, None).unwrap();
        let arc = b.connect_flow(create, process).unwrap();

        let err = b
            .define_event("E0", "empty", &[], &[], EventKind::Event)
            .unwrap_err();
        assert_eq!(err, ModelError::EmptyRegion);

        let err = b
            .define_event("E0", "dangling", &[create], &[arc], EventKind::Event)
            .unwrap_err();
        assert_eq!(err, ModelError::DanglingArcEndpoint { arc });

        let err = b
            .define_event("E0", "ghost", &[ActionId(99)], &[], EventKind::Event)
            .unwrap_err();
        assert_eq!(err, ModelError::UnknownNode(ActionId(99)));

        let id = b
            .define_event("E0", "ok", &[create, process], &[arc], EventKind::Event)
            .unwrap();
        let err = b
            .define_event("E0", "dup", &[create], &[], EventKind::Event)
            .unwrap_err();
        assert_eq!(
            err,
            ModelError::DuplicateEvent {
                key: "E0".to_string()
            }
        );
        assert_eq!(b.model().event(id).region.nodes.len(), 2);
    }

    #[test]
    fn induced_event_picks_up_arcs() {
        let (mut b, a, c) = two_thimacs();
        let create = b.add_action(a, ActionKind::Create, None).unwrap();
        let process = b.add_action(c, ActionKind::Process, None).unwrap();
        let arc = b.connect_flow(create, process).unwrap();
        let ev = b
            .define_event_induced("E1", "both", &[create, process], EventKind::Event)
            .unwrap();
        assert!(b.model().event(ev).region.arcs.contains(&arc));
    }

    #[test]
    fn forest_terminates_for_every_thimac() {
        let mut b = ModelBuilder::new("deep");
        let mut parent = None;
        for i in 0..16 {
            parent = Some(b.add_thimac(&format!("T{i}"), parent).unwrap());
        }
        let model = b.freeze();
        for t in model.thimacs() {
            let mut hops = 0;
            let mut cur = t.parent;
            while let Some(p) = cur {
                cur = model.thimac(p).parent;
                hops += 1;
                assert!(hops <= model.thimacs().len(), "parent chain does not terminate");
            }
        }
    }

    #[test]
    fn connectivity_on_undirected_union() {
        let (mut b, a, c) = two_thimacs();
        let create = b.add_action(a, ActionKind::Create, None).unwrap();
        let process = b.add_action(c, ActionKind::Process, None).unwrap();
        let lone = b.add_action(c, ActionKind::Release, None).unwrap();
        b.connect_trigger(create, process, Polarity::Positive).unwrap();
        let m = b.freeze();
        let connected: BTreeSet<_> = [create, process].into_iter().collect();
        let split: BTreeSet<_> = [create, lone].into_iter().collect();
        assert!(m.is_connected(&connected));
        assert!(!m.is_connected(&split));
        assert!(!m.is_connected(&BTreeSet::new()));
    }
}
