//! Parser for `.tms` scenario files: a horizon plus actualize /
//! potentialize directives bound to slots.

use std::path::Path;

use crate::diag::{codes, Diagnostic, SourceSpan};
use crate::model::{EventId, StaticModel};

use super::lexer::{lex, Tok, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Actualize,
    Potentialize,
}

/// One scenario stimulus: at `slot`, actualize or potentialize `event`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directive {
    pub slot: u32,
    pub verb: Verb,
    pub event: EventId,
    pub persist: bool,
}

/// A validated scenario: directives are sorted by slot, stable within
/// one slot by file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioScript {
    pub name: String,
    pub slots: u32,
    pub directives: Vec<Directive>,
}

impl ScenarioScript {
    /// Directives that apply at `slot`, in file order.
    pub fn at_slot(&self, slot: u32) -> impl Iterator<Item = &Directive> {
        self.directives.iter().filter(move |d| d.slot == slot)
    }
}

/// Parses a scenario against a frozen model. `override_slots`, when
/// given, replaces the declared horizon before bounds are checked.
pub fn parse_scenario(
    text: &str,
    model: &StaticModel,
    origin: &str,
    override_slots: Option<u32>,
) -> Result<ScenarioScript, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(text, origin);
    let name = Path::new(origin)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());

    let mut declared_slots: Option<(u32, SourceSpan)> = None;
    let mut raw: Vec<(Directive, SourceSpan)> = Vec::new();

    let mut pos = 0usize;
    let peek = |pos: usize| -> &Tok { &toks[pos].tok };
    let span_of = |t: &Token| SourceSpan::new(origin, t.line, t.column);

    while pos < toks.len() {
        while matches!(peek(pos), Tok::Newline | Tok::Semi) {
            pos += 1;
        }
        if matches!(peek(pos), Tok::Eof) {
            break;
        }
        let stmt_span = span_of(&toks[pos]);
        let recover = |pos: &mut usize| {
            while !matches!(peek(*pos), Tok::Newline | Tok::Semi | Tok::Eof) {
                *pos += 1;
            }
        };
        match peek(pos).clone() {
            Tok::Ident(word) if word == "slots" => {
                pos += 1;
                match peek(pos).clone() {
                    Tok::Int(n) => {
                        pos += 1;
                        if n == 0 {
                            diags.push(Diagnostic::error(
                                codes::SCENARIO_SYNTAX,
                                "horizon must be at least 1",
                                stmt_span,
                            ));
                        } else if declared_slots.is_some() {
                            diags.push(Diagnostic::error(
                                codes::SCENARIO_SYNTAX,
                                "duplicate `slots` declaration",
                                stmt_span,
                            ));
                        } else {
                            declared_slots = Some((n as u32, stmt_span));
                        }
                    }
                    other => {
                        diags.push(Diagnostic::error(
                            codes::SCENARIO_SYNTAX,
                            format!("expected slot count, found {}", other.describe()),
                            span_of(&toks[pos]),
                        ));
                        recover(&mut pos);
                    }
                }
            }
            Tok::Ident(word) if word == "at" => {
                pos += 1;
                let slot = match peek(pos).clone() {
                    Tok::Int(n) => {
                        pos += 1;
                        n as u32
                    }
                    other => {
                        diags.push(Diagnostic::error(
                            codes::SCENARIO_SYNTAX,
                            format!("expected slot number, found {}", other.describe()),
                            span_of(&toks[pos]),
                        ));
                        recover(&mut pos);
                        continue;
                    }
                };
                let verb = match peek(pos).clone() {
                    Tok::Ident(v) if v == "actualize" => {
                        pos += 1;
                        Verb::Actualize
                    }
                    Tok::Ident(v) if v == "potentialize" => {
                        pos += 1;
                        Verb::Potentialize
                    }
                    other => {
                        diags.push(Diagnostic::error(
                            codes::SCENARIO_SYNTAX,
                            format!(
                                "expected `actualize` or `potentialize`, found {}",
                                other.describe()
                            ),
                            span_of(&toks[pos]),
                        ));
                        recover(&mut pos);
                        continue;
                    }
                };
                let (event_key, event_span) = match peek(pos).clone() {
                    Tok::Ident(k) => {
                        let s = span_of(&toks[pos]);
                        pos += 1;
                        (k, s)
                    }
                    other => {
                        diags.push(Diagnostic::error(
                            codes::SCENARIO_SYNTAX,
                            format!("expected event id, found {}", other.describe()),
                            span_of(&toks[pos]),
                        ));
                        recover(&mut pos);
                        continue;
                    }
                };
                let mut persist = false;
                if let Tok::Ident(w) = peek(pos) {
                    if w == "persist" {
                        let persist_span = span_of(&toks[pos]);
                        pos += 1;
                        if verb == Verb::Potentialize {
                            diags.push(Diagnostic::error(
                                codes::PERSIST_ON_POTENTIALIZE,
                                "`persist` is only valid with `actualize`",
                                persist_span,
                            ));
                            recover(&mut pos);
                            continue;
                        }
                        persist = true;
                    }
                }
                let Some(event) = model.event_by_key(&event_key).map(|e| e.id) else {
                    diags.push(Diagnostic::error(
                        codes::UNKNOWN_EVENT,
                        format!("unknown event id `{event_key}`"),
                        event_span,
                    ));
                    recover(&mut pos);
                    continue;
                };
                raw.push((
                    Directive {
                        slot,
                        verb,
                        event,
                        persist,
                    },
                    stmt_span,
                ));
            }
            other => {
                diags.push(Diagnostic::error(
                    codes::SCENARIO_SYNTAX,
                    format!("expected `slots` or `at`, found {}", other.describe()),
                    stmt_span,
                ));
                recover(&mut pos);
            }
        }
        match peek(pos) {
            Tok::Newline | Tok::Semi | Tok::Eof => {}
            other => {
                diags.push(Diagnostic::error(
                    codes::SCENARIO_SYNTAX,
                    format!("expected end of statement, found {}", other.describe()),
                    span_of(&toks[pos]),
                ));
                recover(&mut pos);
            }
        }
    }

    let slots = match (override_slots, declared_slots) {
        (Some(n), _) => n,
        (None, Some((n, _))) => n,
        (None, None) => {
            diags.push(Diagnostic::error(
                codes::SCENARIO_SYNTAX,
                "scenario declares no `slots` horizon",
                SourceSpan::new(origin, 1, 1),
            ));
            0
        }
    };
    if slots > 0 {
        for (d, span) in &raw {
            if d.slot < 1 || d.slot > slots {
                diags.push(Diagnostic::error(
                    codes::SLOT_OUT_OF_HORIZON,
                    format!("slot {} lies outside horizon 1..={}", d.slot, slots),
                    span.clone(),
                ));
            }
        }
    }

    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    let mut directives: Vec<Directive> = raw.into_iter().map(|(d, _)| d).collect();
    directives.sort_by_key(|d| d.slot);
    Ok(ScenarioScript {
        name,
        slots,
        directives,
    })
}
