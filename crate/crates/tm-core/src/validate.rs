//! Well-formedness rules beyond referential integrity.
//!
//! Rules run in a fixed order and findings are reported in declaration
//! order within each rule, so validating the same model always yields the
//! same report.
//!
//! - V1 (warning): a thimac that appears as a flowing thing must be
//!   creatable — it owns a Create node or has a transfer chain in from
//!   outside.
//! - V2 (error): every flow arc satisfies the kind adjacency table.
//! - V3 (warning): a trigger connects two actions of one thimac.
//! - V4 (error): every declared event region is well formed and connected
//!   under the undirected arc union.
//! - V5 (error): thimac containment is a forest.
//! - V6 (error): event ids are unique and every instance region contains
//!   a Create node; ne aliases must name a realizable potentialization
//!   (warning otherwise).
//!
//! Strict mode upgrades V1 and V3 to errors.

use crate::diag::{codes, Diagnostic, Severity, SourceSpan};
use crate::model::{
    ActionKind, ArcClass, Polarity, StaticModel, ThimacId,
};

/// Outcome of [`validate`]: `ok` is true exactly when no finding has
/// error severity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub ok: bool,
}

pub fn validate(model: &StaticModel) -> ValidationReport {
    validate_with(model, false)
}

pub fn validate_with(model: &StaticModel, strict: bool) -> ValidationReport {
    let mut diagnostics = Vec::new();
    rule_v1(model, strict, &mut diagnostics);
    rule_v2(model, &mut diagnostics);
    rule_v3(model, strict, &mut diagnostics);
    rule_v4(model, &mut diagnostics);
    rule_v5(model, &mut diagnostics);
    rule_v6(model, &mut diagnostics);
    let ok = !diagnostics.iter().any(Diagnostic::is_error);
    ValidationReport { diagnostics, ok }
}

fn fallback_span(model: &StaticModel) -> SourceSpan {
    SourceSpan::new(format!("<{}>", model.name()), 1, 1)
}

fn thimac_span(model: &StaticModel, id: ThimacId) -> SourceSpan {
    model.spans().thimacs[id.index()]
        .clone()
        .unwrap_or_else(|| fallback_span(model))
}

fn upgraded(strict: bool) -> Severity {
    if strict {
        Severity::Error
    } else {
        Severity::Warning
    }
}

fn rule_v1(model: &StaticModel, strict: bool, out: &mut Vec<Diagnostic>) {
    for thimac in model.thimacs() {
        let mut flows = false;
        let mut has_create = false;
        let mut transfer_in = false;
        for &a in &thimac.actions {
            if model.action(a).kind == ActionKind::Create {
                has_create = true;
            }
        }
        for arc in model.arcs() {
            if arc.class != ArcClass::Flow {
                continue;
            }
            let (src, dst) = (model.action(arc.src), model.action(arc.dst));
            if dst.owner == thimac.id && dst.kind == ActionKind::Receive {
                flows = true;
            }
            if src.owner == thimac.id && src.kind == ActionKind::Release {
                flows = true;
            }
            if dst.owner == thimac.id && dst.kind == ActionKind::Transfer && src.owner != thimac.id
            {
                transfer_in = true;
            }
        }
        if flows && !has_create && !transfer_in {
            out.push(Diagnostic {
                severity: upgraded(strict),
                code: codes::V1_NEVER_CREATED,
                message: format!(
                    "V1: thimac `{}` flows as a thing but is never created \
                     (no create action and no incoming transfer)",
                    model.thimac_path(thimac.id)
                ),
                span: thimac_span(model, thimac.id),
            });
        }
    }
}

fn rule_v2(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    for arc in model.arcs() {
        if arc.class != ArcClass::Flow {
            continue;
        }
        let (src, dst) = (model.action(arc.src), model.action(arc.dst));
        let legal = crate::model::flow_allowed(src.kind, dst.kind)
            && !(src.kind == ActionKind::Transfer
                && dst.kind == ActionKind::Transfer
                && src.owner == dst.owner);
        if !legal {
            out.push(Diagnostic::error(
                codes::V2_ILLEGAL_FLOW,
                format!(
                    "V2: illegal flow adjacency {} -> {} ({} -> {})",
                    src.kind,
                    dst.kind,
                    model.action_path(arc.src),
                    model.action_path(arc.dst)
                ),
                model.spans().arcs[arc.id.index()]
                    .clone()
                    .unwrap_or_else(|| fallback_span(model)),
            ));
        }
    }
}

fn rule_v3(model: &StaticModel, strict: bool, out: &mut Vec<Diagnostic>) {
    for arc in model.arcs() {
        if !matches!(arc.class, ArcClass::Trigger(_)) {
            continue;
        }
        let (src, dst) = (model.action(arc.src), model.action(arc.dst));
        if src.owner == dst.owner {
            out.push(Diagnostic {
                severity: upgraded(strict),
                code: codes::V3_INTRA_THIMAC_TRIGGER,
                message: format!(
                    "V3: trigger {} -> {} stays inside thimac `{}`",
                    model.action_path(arc.src),
                    model.action_path(arc.dst),
                    model.thimac_path(src.owner)
                ),
                span: model.spans().arcs[arc.id.index()]
                    .clone()
                    .unwrap_or_else(|| fallback_span(model)),
            });
        }
    }
}

fn rule_v4(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    for event in model.events() {
        let span = model.spans().events[event.id.index()]
            .clone()
            .unwrap_or_else(|| fallback_span(model));
        if event.region.nodes.is_empty() {
            out.push(Diagnostic::error(
                codes::V4_MALFORMED_REGION,
                format!("V4: region of `{}` is empty", event.key),
                span,
            ));
            continue;
        }
        let mut closed = true;
        for &a in &event.region.arcs {
            let arc = model.arc(a);
            if !event.region.nodes.contains(&arc.src) || !event.region.nodes.contains(&arc.dst) {
                closed = false;
            }
        }
        if !closed {
            out.push(Diagnostic::error(
                codes::V4_MALFORMED_REGION,
                format!(
                    "V4: region of `{}` has an arc with an endpoint outside its node set",
                    event.key
                ),
                span,
            ));
            continue;
        }
        if !region_connected(model, event) {
            out.push(Diagnostic::error(
                codes::V4_MALFORMED_REGION,
                format!(
                    "V4: region of `{}` is not connected under its own arcs",
                    event.key
                ),
                span,
            ));
        }
    }
}

/// Connectivity over the region's *own* arc set: a `without` clause can
/// split a region even though the full model would keep it connected.
fn region_connected(model: &StaticModel, event: &crate::model::EventDef) -> bool {
    use std::collections::BTreeSet;
    let nodes = &event.region.nodes;
    let Some(&start) = nodes.iter().next() else {
        return false;
    };
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        for &a in &event.region.arcs {
            let arc = model.arc(a);
            for (x, y) in [(arc.src, arc.dst), (arc.dst, arc.src)] {
                if x == n && nodes.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == nodes.len()
}

fn rule_v5(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    for thimac in model.thimacs() {
        let mut hops = 0usize;
        let mut cur = thimac.parent;
        let mut cyclic = false;
        while let Some(p) = cur {
            if p == thimac.id || hops > model.thimacs().len() {
                cyclic = true;
                break;
            }
            cur = model.thimac(p).parent;
            hops += 1;
        }
        if cyclic {
            out.push(Diagnostic::error(
                codes::V5_CONTAINMENT_CYCLE,
                format!(
                    "V5: containment of `{}` revisits itself",
                    thimac.name
                ),
                thimac_span(model, thimac.id),
            ));
        }
    }
}

fn rule_v6(model: &StaticModel, out: &mut Vec<Diagnostic>) {
    for (i, event) in model.events().iter().enumerate() {
        let span = model.spans().events[event.id.index()]
            .clone()
            .unwrap_or_else(|| fallback_span(model));
        if model.events()[..i].iter().any(|e| e.key == event.key) {
            out.push(Diagnostic::error(
                codes::V6_EVENT_WIRING,
                format!("V6: duplicate event id `{}`", event.key),
                span.clone(),
            ));
        }
        if event.kind == crate::model::EventKind::Instance {
            let has_create = event
                .region
                .nodes
                .iter()
                .any(|&n| model.action(n).kind == ActionKind::Create);
            if !has_create {
                out.push(Diagnostic::error(
                    codes::V6_EVENT_WIRING,
                    format!(
                        "V6: instance `{}` asserts existence but its region has no create node",
                        event.key
                    ),
                    span,
                ));
            }
        }
    }
    for alias in model.ne_aliases() {
        let src_region = &model.event(alias.src_event).region;
        let dst_region = &model.event(alias.dst_event).region;
        let realizable = model.arcs().iter().any(|arc| {
            arc.class == ArcClass::Trigger(Polarity::Negative)
                && src_region.contains_node(arc.src)
                && dst_region.contains_node(arc.dst)
        });
        if !realizable {
            out.push(Diagnostic::warning(
                codes::DANGLING_NE_ALIAS,
                format!(
                    "ne alias `{}` maps {} -> {} but no negative trigger connects those regions",
                    alias.name,
                    model.event(alias.src_event).key,
                    model.event(alias.dst_event).key
                ),
                fallback_span(model),
            ));
        }
    }
}
