//! Textual frontend: the `.tm` model language and `.tms` scenario
//! language, plus the canonical serializer used for round-tripping.

mod lexer;
mod parser;
mod scenario;
mod writer;

pub use lexer::is_bare_ident;
pub use parser::{parse_model, resolve_path, PathError};
pub use scenario::{parse_scenario, Directive, ScenarioScript, Verb};
pub use writer::write_model;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::codes;
    use crate::model::{ActionKind, ArcClass, EventKind, Polarity};

    const BULB: &str = r#"
# Electrical current generates light.
model bulb

thimac Current {
  action create
  action process : "flows"
  action release
  action transfer
}
thimac Bulb {
  action create
  action transfer
  action receive
}
thimac Light {
  action create
}

flow Current.create -> Current.process
flow Current.process -> Current.release
flow Current.release -> Current.transfer
flow Current.transfer -> Bulb.transfer
flow Bulb.transfer -> Bulb.receive

trigger Current.process -> Light.create

instance E1 "A bulb exists" { Bulb.create }
event E2 "Current flows" {
  Current.create, Current.process, Current.release, Current.transfer,
  Bulb.transfer, Bulb.receive
}
event E3 "Light is created" { Light.create }
"#;

    #[test]
    fn parses_bulb_fixture_structure() {
        let model = parse_model(BULB, "bulb.tm").expect("bulb parses");
        let names: Vec<&str> = model.roots().map(|t| t.name.as_str()).collect();
        assert_eq!(names, vec!["Current", "Bulb", "Light"]);
        assert_eq!(model.events().len(), 3);
        assert_eq!(model.event_by_key("E1").unwrap().kind, EventKind::Instance);
        // One trigger, into Light.create.
        let triggers: Vec<_> = model
            .arcs()
            .iter()
            .filter(|a| matches!(a.class, ArcClass::Trigger(_)))
            .collect();
        assert_eq!(triggers.len(), 1);
        let light_create = resolve_path(&model, "Light.create").unwrap();
        assert_eq!(triggers[0].dst, light_create);
        // The flow Current.transfer -> Bulb.transfer crosses the boundary.
        let cross = model.arcs().iter().any(|a| {
            a.class == ArcClass::Flow
                && model.action(a.src).kind == ActionKind::Transfer
                && model.action(a.dst).kind == ActionKind::Transfer
        });
        assert!(cross);
    }

    #[test]
    fn empty_file_yields_empty_model_named_after_stem() {
        let model = parse_model("", "fixtures/lamp.tm").expect("empty model");
        assert_eq!(model.name(), "lamp");
        assert!(model.thimacs().is_empty());
        assert!(model.events().is_empty());
    }

    #[test]
    fn unknown_reference_in_flow_reports_tm0002_at_arc_span() {
        let src = "thimac A { action create }\nflow A.create -> B.receive\n";
        let errs = parse_model(src, "x.tm").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].code, codes::UNKNOWN_REF);
        assert_eq!(errs[0].span.line, 2);
    }

    #[test]
    fn illegal_flow_adjacency_reports_tm0003() {
        let src = "thimac A { action create; action receive }\n\
                   thimac B { action create }\n\
                   flow A.create -> A.receive\n";
        let errs = parse_model(src, "x.tm").unwrap_err();
        assert!(errs.iter().any(|d| d.code == codes::ILLEGAL_FLOW));
    }

    #[test]
    fn duplicate_thimac_reports_tm0004() {
        let src = "thimac A\nthimac A\n";
        let errs = parse_model(src, "x.tm").unwrap_err();
        assert_eq!(errs[0].code, codes::DUPLICATE_NAME);
    }

    #[test]
    fn self_trigger_reports_tm0006() {
        let src = "thimac A { action process }\ntrigger A.process -> A.process\n";
        let errs = parse_model(src, "x.tm").unwrap_err();
        assert_eq!(errs[0].code, codes::SELF_TRIGGER);
    }

    #[test]
    fn dotted_thimac_declaration_attaches_under_parent() {
        let src = "thimac Machine\nthimac Machine.Washing { action create }\n";
        let model = parse_model(src, "x.tm").unwrap();
        let washing = model
            .thimacs()
            .iter()
            .find(|t| t.name == "Washing")
            .unwrap();
        assert_eq!(model.thimac_path(washing.id), "Machine.Washing");
    }

    #[test]
    fn region_without_clause_removes_arc() {
        let src = "thimac A { action create; action process }\n\
                   flow A.create -> A.process\n\
                   trigger A.create -> A.process\n\
                   event E1 \"both\" { A.create, A.process }\n\
                   event E2 \"no flow\" { A.create, A.process; without flow A.create -> A.process }\n";
        let model = parse_model(src, "x.tm").unwrap();
        assert_eq!(model.event_by_key("E1").unwrap().region.arcs.len(), 2);
        assert_eq!(model.event_by_key("E2").unwrap().region.arcs.len(), 1);
    }

    #[test]
    fn without_clause_on_absent_arc_is_an_error() {
        let src = "thimac A { action create; action process }\n\
                   event E1 \"x\" { A.create; without flow A.create -> A.process }\n";
        let errs = parse_model(src, "x.tm").unwrap_err();
        assert!(errs.iter().any(|d| d.code == codes::UNKNOWN_REF));
    }

    #[test]
    fn resolve_path_examples() {
        let src = "thimac Oven {\n\
                     thimac Heat { action process : cook; action process : warm }\n\
                     action process : \"times out\"\n\
                   }\n";
        let model = parse_model(src, "x.tm").unwrap();
        let cook = resolve_path(&model, "Oven.Heat.process:cook").unwrap();
        assert_eq!(model.action(cook).label.as_deref(), Some("cook"));
        let err = resolve_path(&model, "Oven.Heat.process").unwrap_err();
        assert!(matches!(err, PathError::Ambiguous { .. }));
        let unique = resolve_path(&model, "Oven.process").unwrap();
        assert_eq!(model.action(unique).label.as_deref(), Some("times out"));
        assert!(matches!(
            resolve_path(&model, "Oven.Grill.process"),
            Err(PathError::Unknown(_))
        ));
    }

    #[test]
    fn parse_is_deterministic() {
        let a = parse_model(BULB, "bulb.tm").unwrap();
        let b = parse_model(BULB, "bulb.tm").unwrap();
        assert_eq!(a, b);
        assert_eq!(write_model(&a), write_model(&b));
    }

    #[test]
    fn round_trip_preserves_model() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let text = write_model(&model);
        let reparsed = parse_model(&text, "bulb.tm").expect("canonical text reparses");
        assert_eq!(model, reparsed);
        assert_eq!(text, write_model(&reparsed));
    }

    #[test]
    fn lift_annotation_round_trips() {
        let src = "thimac A { action create; action process }\n\
                   thimac B { action create }\n\
                   trigger A.process -> B.create as E1 -> E2\n\
                   event E1 \"a\" { A.create, A.process }\n\
                   event E2 \"b\" { B.create }\n\
                   ne N2 = neg(E1 -> E2)\n";
        let model = parse_model(src, "x.tm").unwrap();
        let arc = model
            .arcs()
            .iter()
            .find(|a| a.class == ArcClass::Trigger(Polarity::Positive))
            .unwrap();
        let (s, d) = arc.lift_hint.expect("hint stored");
        assert_eq!(model.event(s).key, "E1");
        assert_eq!(model.event(d).key, "E2");
        assert_eq!(model.ne_aliases().len(), 1);
        let reparsed = parse_model(&write_model(&model), "x.tm").unwrap();
        assert_eq!(model, reparsed);
    }

    #[test]
    fn scenario_parses_sorted_directives() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let text = "slots 7; at 1 actualize E1 persist; at 2 actualize E2; at 5 potentialize E2";
        let script = parse_scenario(text, &model, "bulb_on_off.tms", None).unwrap();
        assert_eq!(script.slots, 7);
        assert_eq!(script.directives.len(), 3);
        assert_eq!(script.name, "bulb_on_off");
        assert!(script.directives.windows(2).all(|w| w[0].slot <= w[1].slot));
        assert!(script.directives[0].persist);
        assert_eq!(script.directives[2].verb, Verb::Potentialize);
    }

    #[test]
    fn scenario_slot_out_of_horizon_is_tm0103() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let errs = parse_scenario("slots 7\nat 9 actualize E2\n", &model, "s.tms", None).unwrap_err();
        assert_eq!(errs[0].code, codes::SLOT_OUT_OF_HORIZON);
    }

    #[test]
    fn scenario_persist_on_potentialize_is_tm0104() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let errs =
            parse_scenario("slots 7\nat 2 potentialize E2 persist\n", &model, "s.tms", None)
                .unwrap_err();
        assert_eq!(errs[0].code, codes::PERSIST_ON_POTENTIALIZE);
    }

    #[test]
    fn scenario_unknown_event_is_tm0102() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let errs = parse_scenario("slots 3\nat 1 actualize E9\n", &model, "s.tms", None).unwrap_err();
        assert_eq!(errs[0].code, codes::UNKNOWN_EVENT);
    }

    #[test]
    fn scenario_override_slots_rebounds_directives() {
        let model = parse_model(BULB, "bulb.tm").unwrap();
        let ok = parse_scenario("slots 3\nat 5 actualize E2\n", &model, "s.tms", Some(9));
        assert!(ok.is_ok());
        let err = parse_scenario("slots 9\nat 5 actualize E2\n", &model, "s.tms", Some(3));
        assert!(err.is_err());
    }
}
