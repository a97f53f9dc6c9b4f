//! Property suites over randomly built models: canonical round-tripping,
//! parser determinism, and agreement of the parallel and sequential
//! region enumerators.

use proptest::prelude::*;

use tm_core::dsl::{parse_model, write_model};
use tm_core::model::{ActionKind, EventKind, ModelBuilder, Polarity, StaticModel};
use tm_core::regions::{enumerate_regions_par, enumerate_regions_seq, DEFAULT_CAP};

/// One construction step. Indices are taken modulo whatever exists when
/// the op is applied; ops that violate an invariant are simply dropped,
/// so every recipe builds a valid model.
#[derive(Debug, Clone)]
enum Op {
    Thimac { name: u8, parent: Option<u8> },
    Action { owner: u8, kind: u8, label: Option<u8> },
    Flow { src: u8, dst: u8 },
    Trigger { src: u8, dst: u8, negative: bool },
    Event { nodes: Vec<u8>, drop_arcs: Vec<u8>, instance: bool },
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0u8..24, proptest::option::of(0u8..8))
            .prop_map(|(name, parent)| Op::Thimac { name, parent }),
        (any::<u8>(), 0u8..5, proptest::option::of(0u8..4))
            .prop_map(|(owner, kind, label)| Op::Action { owner, kind, label }),
        (any::<u8>(), any::<u8>()).prop_map(|(src, dst)| Op::Flow { src, dst }),
        (any::<u8>(), any::<u8>(), any::<bool>())
            .prop_map(|(src, dst, negative)| Op::Trigger { src, dst, negative }),
        (
            proptest::collection::vec(any::<u8>(), 1..6),
            proptest::collection::vec(any::<u8>(), 0..3),
            any::<bool>()
        )
            .prop_map(|(nodes, drop_arcs, instance)| Op::Event {
                nodes,
                drop_arcs,
                instance
            }),
    ]
}

fn build(ops: &[Op]) -> StaticModel {
    let mut b = ModelBuilder::new("generated");
    let mut thimacs = Vec::new();
    let mut actions = Vec::new();
    let mut arcs = Vec::new();
    let mut event_count = 0usize;
    for op in ops {
        match op {
            Op::Thimac { name, parent } => {
                let parent = parent.and_then(|p| {
                    if thimacs.is_empty() {
                        None
                    } else {
                        Some(thimacs[p as usize % thimacs.len()])
                    }
                });
                if let Ok(id) = b.add_thimac(&format!("T{name}"), parent) {
                    thimacs.push(id);
                }
            }
            Op::Action { owner, kind, label } => {
                if thimacs.is_empty() {
                    continue;
                }
                let owner = thimacs[*owner as usize % thimacs.len()];
                let kind = ActionKind::ALL[*kind as usize % 5];
                let label = label.map(|l| format!("l{l}"));
                if let Ok(id) = b.add_action(owner, kind, label.as_deref()) {
                    actions.push(id);
                }
            }
            Op::Flow { src, dst } => {
                if actions.is_empty() {
                    continue;
                }
                let src = actions[*src as usize % actions.len()];
                let dst = actions[*dst as usize % actions.len()];
                if let Ok(id) = b.connect_flow(src, dst) {
                    arcs.push(id);
                }
            }
            Op::Trigger { src, dst, negative } => {
                if actions.is_empty() {
                    continue;
                }
                let src = actions[*src as usize % actions.len()];
                let dst = actions[*dst as usize % actions.len()];
                let polarity = if *negative {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                };
                if let Ok(id) = b.connect_trigger(src, dst, polarity) {
                    arcs.push(id);
                }
            }
            Op::Event {
                nodes,
                drop_arcs,
                instance,
            } => {
                if actions.is_empty() {
                    continue;
                }
                let nodes: Vec<_> = nodes
                    .iter()
                    .map(|&n| actions[n as usize % actions.len()])
                    .collect();
                let node_set: std::collections::BTreeSet<_> = nodes.iter().copied().collect();
                let mut induced: Vec<_> =
                    b.model().induced_arcs(&node_set).into_iter().collect();
                for d in drop_arcs {
                    if induced.is_empty() {
                        break;
                    }
                    induced.remove(*d as usize % induced.len());
                }
                let kind = if *instance {
                    EventKind::Instance
                } else {
                    EventKind::Event
                };
                let key = format!("E{event_count}");
                if b.define_event(&key, "generated event", &nodes, &induced, kind)
                    .is_ok()
                {
                    event_count += 1;
                }
            }
        }
    }
    b.freeze()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn serialized_models_reparse_to_equal_models(ops in proptest::collection::vec(op_strategy(), 0..60)) {
        let model = build(&ops);
        let text = write_model(&model);
        let reparsed = parse_model(&text, "generated.tm")
            .expect("canonical text parses cleanly");
        prop_assert_eq!(&model, &reparsed);
        // Serialization is a fixpoint after one round.
        prop_assert_eq!(write_model(&reparsed), text);
    }

    #[test]
    fn parsing_is_a_pure_function(ops in proptest::collection::vec(op_strategy(), 0..40)) {
        let text = write_model(&build(&ops));
        let a = parse_model(&text, "x.tm");
        let b = parse_model(&text, "x.tm");
        match (a, b) {
            (Ok(ma), Ok(mb)) => prop_assert_eq!(ma, mb),
            (Err(ea), Err(eb)) => prop_assert_eq!(ea, eb),
            _ => prop_assert!(false, "parse nondeterminism"),
        }
    }

    #[test]
    fn parallel_and_sequential_enumeration_agree(
        ops in proptest::collection::vec(op_strategy(), 0..40),
        max_nodes in 1usize..5,
    ) {
        let model = build(&ops);
        let seq = enumerate_regions_seq(&model, max_nodes, DEFAULT_CAP);
        let par = enumerate_regions_par(&model, max_nodes, DEFAULT_CAP);
        prop_assert_eq!(seq, par);
    }
}
