//! Canonical serializer for [`StaticModel`].
//!
//! The emitted text is the model's canonical form: declaration order is
//! preserved for everything order matters for (thimacs, actions, arcs,
//! events), while region node lists are emitted sorted by path so the
//! output is independent of internal id numbering. Reparsing the output
//! yields an equal model.

use std::collections::BTreeSet;

use crate::model::{ActionId, ArcClass, ArcId, EventKind, Polarity, StaticModel};

use super::lexer::is_bare_ident;

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

fn name_or_quoted(s: &str) -> String {
    if is_bare_ident(s) {
        s.to_string()
    } else {
        quoted(s)
    }
}

fn arc_keyword(class: ArcClass) -> &'static str {
    match class {
        ArcClass::Flow => "flow",
        ArcClass::Trigger(Polarity::Positive) => "trigger",
        ArcClass::Trigger(Polarity::Negative) => "negtrigger",
    }
}

/// Serializes a model to canonical `.tm` text.
pub fn write_model(model: &StaticModel) -> String {
    let mut out = String::new();
    out.push_str("model ");
    out.push_str(&name_or_quoted(model.name()));
    out.push('\n');

    if !model.thimacs().is_empty() {
        out.push('\n');
    }
    for thimac in model.thimacs() {
        out.push_str("thimac ");
        out.push_str(&model.thimac_path(thimac.id));
        if thimac.actions.is_empty() {
            out.push('\n');
            continue;
        }
        out.push_str(" {\n");
        for &action in &thimac.actions {
            let node = model.action(action);
            out.push_str("  action ");
            out.push_str(node.kind.keyword());
            if let Some(label) = &node.label {
                out.push_str(" : ");
                out.push_str(&quoted(label));
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }

    if !model.arcs().is_empty() {
        out.push('\n');
    }
    for arc in model.arcs() {
        out.push_str(arc_keyword(arc.class));
        out.push(' ');
        out.push_str(&model.action_path(arc.src));
        out.push_str(" -> ");
        out.push_str(&model.action_path(arc.dst));
        if let Some((src_ev, dst_ev)) = arc.lift_hint {
            out.push_str(" as ");
            out.push_str(&model.event(src_ev).key);
            out.push_str(" -> ");
            out.push_str(&model.event(dst_ev).key);
        }
        out.push('\n');
    }

    if !model.events().is_empty() {
        out.push('\n');
    }
    for event in model.events() {
        out.push_str(match event.kind {
            EventKind::Event => "event ",
            EventKind::Instance => "instance ",
        });
        out.push_str(&event.key);
        out.push(' ');
        out.push_str(&quoted(&event.label));
        out.push_str(" { ");
        let mut paths: Vec<String> = event
            .region
            .nodes
            .iter()
            .map(|&n| model.action_path(n))
            .collect();
        paths.sort();
        out.push_str(&paths.join(", "));
        let removed = removed_arcs(model, &event.region.nodes, &event.region.arcs);
        for arc in removed {
            let a = model.arc(arc);
            out.push_str("; without ");
            out.push_str(arc_keyword(a.class));
            out.push(' ');
            out.push_str(&model.action_path(a.src));
            out.push_str(" -> ");
            out.push_str(&model.action_path(a.dst));
        }
        out.push_str(" }\n");
    }

    if !model.ne_aliases().is_empty() {
        out.push('\n');
    }
    for alias in model.ne_aliases() {
        out.push_str("ne ");
        out.push_str(&alias.name);
        out.push_str(" = neg(");
        out.push_str(&model.event(alias.src_event).key);
        out.push_str(" -> ");
        out.push_str(&model.event(alias.dst_event).key);
        out.push_str(")\n");
    }

    out
}

/// Arcs of the induced subdiagram that the stored region excludes,
/// ordered deterministically by the serialized clause text.
fn removed_arcs(
    model: &StaticModel,
    nodes: &BTreeSet<ActionId>,
    stored: &BTreeSet<ArcId>,
) -> Vec<ArcId> {
    let mut removed: Vec<ArcId> = model
        .induced_arcs(nodes)
        .into_iter()
        .filter(|a| !stored.contains(a))
        .collect();
    removed.sort_by_key(|&a| {
        let arc = model.arc(a);
        (
            arc_keyword(arc.class),
            model.action_path(arc.src),
            model.action_path(arc.dst),
        )
    });
    removed
}
