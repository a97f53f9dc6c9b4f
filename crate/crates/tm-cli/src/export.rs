//! Graph-description (dot-compatible) exports of static models, slot
//! states, and behavior graphs. All exports are byte-deterministic:
//! ordering follows declaration order throughout.

use std::fmt::Write;

use tm_core::behavior::{BehaviorGraph, EdgeKind};
use tm_core::dynamics::{SlotState, Trace};
use tm_core::model::{ArcClass, Polarity, ThimacId};
use tm_core::StaticModel;

fn node_label(model: &StaticModel, action: tm_core::model::ActionId) -> String {
    let node = model.action(action);
    match &node.label {
        Some(l) => format!("{}: {}", node.kind, l),
        None => node.kind.to_string(),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn write_cluster(out: &mut String, model: &StaticModel, thimac: ThimacId, depth: usize) {
    let pad = "  ".repeat(depth);
    let t = model.thimac(thimac);
    writeln!(
        out,
        "{pad}subgraph \"cluster_{}\" {{",
        escape(&model.thimac_path(thimac))
    )
    .unwrap();
    writeln!(out, "{pad}  label=\"{}\";", escape(&t.name)).unwrap();
    for &action in &t.actions {
        writeln!(
            out,
            "{pad}  \"a{}\" [label=\"{}\"];",
            action.index(),
            escape(&node_label(model, action))
        )
        .unwrap();
    }
    for &child in &t.children {
        write_cluster(out, model, child, depth + 1);
    }
    writeln!(out, "{pad}}}").unwrap();
}

fn write_body(out: &mut String, model: &StaticModel) {
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box fontsize=10];").unwrap();
    for root in model.roots() {
        write_cluster(out, model, root.id, 1);
    }
    for arc in model.arcs() {
        let attrs = match arc.class {
            ArcClass::Flow => "",
            ArcClass::Trigger(Polarity::Positive) => " [style=dashed]",
            ArcClass::Trigger(Polarity::Negative) => " [style=bold]",
        };
        writeln!(
            out,
            "  \"a{}\" -> \"a{}\"{attrs};",
            arc.src.index(),
            arc.dst.index()
        )
        .unwrap();
    }
}

/// The static model: thimacs as nested clusters, flows solid, positive
/// triggers dashed, negative triggers bold.
pub fn export_static(model: &StaticModel) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(model.name())).unwrap();
    write_body(&mut out, model);
    out.push_str("}\n");
    out
}

/// The static export plus one region box per Actual event of the given
/// slot. Boxes are marker comments with the member nodes doubled up
/// (`peripheries=2`), since regions may overlap thimac clusters.
pub fn export_dynamic(model: &StaticModel, slot: &SlotState) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(model.name())).unwrap();
    write_body(&mut out, model);
    if slot.is_fully_potential() {
        writeln!(out, "  label=\"slot {} (full potentiality)\";", slot.slot).unwrap();
    } else {
        writeln!(out, "  label=\"slot {}\";", slot.slot).unwrap();
        let mut boxed = std::collections::BTreeSet::new();
        for event in model.events() {
            if slot.state(event.id) != tm_core::dynamics::PAState::Actual {
                continue;
            }
            let nodes: Vec<String> = event
                .region
                .nodes
                .iter()
                .map(|n| format!("a{}", n.index()))
                .collect();
            writeln!(out, "  // box {}: {}", event.key, nodes.join(" ")).unwrap();
            boxed.extend(event.region.nodes.iter().copied());
        }
        for node in boxed {
            writeln!(out, "  \"a{}\" [peripheries=2];", node.index()).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// The behavior graph: occurrences as nodes, causal edges labeled with
/// their firing slot (negative ones bold, labeled with the recorded
/// potentialization), chronological edges dotted.
pub fn export_behavior(trace: &Trace, graph: &BehaviorGraph) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "digraph \"{}.{}\" {{",
        escape(&trace.model),
        escape(&trace.scenario)
    )
    .unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box fontsize=10];").unwrap();
    for (i, occurrence) in graph.occurrences.iter().enumerate() {
        writeln!(
            out,
            "  \"o{i}\" [label=\"{} [{},{}]\"];",
            escape(trace.event_key(occurrence.event)),
            occurrence.start,
            occurrence.end
        )
        .unwrap();
    }
    for edge in &graph.edges {
        match edge.kind {
            EdgeKind::Causal => {
                let firing = edge.firing.as_ref().expect("causal edges carry firings");
                if firing.polarity == Polarity::Negative {
                    let ne = format!("N{}", trace.event_key(firing.dst_event));
                    let label = match trace.alias_for(firing) {
                        Some(alias) => format!("{} ({ne}) slot {}", alias.name, firing.slot),
                        None => format!("{ne} slot {}", firing.slot),
                    };
                    writeln!(
                        out,
                        "  \"o{}\" -> \"o{}\" [style=bold label=\"{}\"];",
                        edge.src,
                        edge.dst,
                        escape(&label)
                    )
                    .unwrap();
                } else {
                    writeln!(
                        out,
                        "  \"o{}\" -> \"o{}\" [label=\"slot {}\"];",
                        edge.src, edge.dst, firing.slot
                    )
                    .unwrap();
                }
            }
            EdgeKind::Chronological => {
                writeln!(out, "  \"o{}\" -> \"o{}\" [style=dotted];", edge.src, edge.dst)
                    .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}
