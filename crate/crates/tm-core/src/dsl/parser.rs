//! Recursive-descent parser for `.tm` model files.
//!
//! Parsing is two-phase: thimac, action, and arc declarations are applied
//! immediately; event regions, lift annotations, and ne aliases are
//! resolved after the whole file has been read, so regions always see the
//! complete arc set when computing their induced subdiagram.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::diag::{codes, Diagnostic, SourceSpan};
use crate::model::{
    ActionId, ActionKind, ArcClass, ArcId, EventKind, ModelBuilder, ModelError, Polarity,
    StaticModel, ThimacId,
};

use super::lexer::{lex, Tok, Token};

/// A dotted, optionally label-qualified action path as written in source.
#[derive(Clone, Debug)]
pub struct RawPath {
    pub segments: Vec<String>,
    pub label: Option<String>,
    pub span: SourceSpan,
}

impl RawPath {
    fn render(&self) -> String {
        let mut s = self.segments.join(".");
        if let Some(l) = &self.label {
            s.push(':');
            s.push_str(l);
        }
        s
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("unknown path `{0}`")]
    Unknown(String),
    #[error("ambiguous path `{path}`; candidates: {}", candidates.join(", "))]
    Ambiguous {
        path: String,
        candidates: Vec<String>,
    },
    #[error("malformed path `{0}`: expected Thimac(.Subthimac)*.action[:label]")]
    Malformed(String),
}

impl PathError {
    pub fn code(&self) -> &'static str {
        match self {
            PathError::Ambiguous { .. } => codes::AMBIGUOUS_PATH,
            _ => codes::UNKNOWN_REF,
        }
    }
}

/// Resolves a dotted name such as `Oven.Heat.process:cook` to its action
/// node. Resolution is deterministic: thimac segments first, then the
/// action kind, then the optional label qualifier.
pub fn resolve_path(model: &StaticModel, path: &str) -> Result<ActionId, PathError> {
    let raw = parse_path_string(path).ok_or_else(|| PathError::Malformed(path.to_string()))?;
    resolve_raw(model, &raw.0, raw.1.as_deref()).map_err(|e| e.1)
}

fn parse_path_string(path: &str) -> Option<(Vec<String>, Option<String>)> {
    let (body, label) = match path.find(':') {
        Some(i) => {
            let label = path[i + 1..].trim();
            let label = label.strip_prefix('"').and_then(|l| l.strip_suffix('"')).unwrap_or(label);
            (&path[..i], Some(label.to_string()))
        }
        None => (path, None),
    };
    let segments: Vec<String> = body.split('.').map(|s| s.trim().to_string()).collect();
    if segments.len() < 2 || segments.iter().any(|s| s.is_empty()) {
        return None;
    }
    Some((segments, label))
}

fn resolve_raw(
    model: &StaticModel,
    segments: &[String],
    label: Option<&str>,
) -> Result<ActionId, (bool, PathError)> {
    let rendered = {
        let mut s = segments.join(".");
        if let Some(l) = label {
            s.push(':');
            s.push_str(l);
        }
        s
    };
    if segments.len() < 2 {
        return Err((false, PathError::Malformed(rendered)));
    }
    let mut cur: Option<ThimacId> = None;
    for name in &segments[..segments.len() - 1] {
        let next = model
            .thimacs()
            .iter()
            .find(|t| t.parent == cur && t.name == *name)
            .map(|t| t.id);
        match next {
            Some(id) => cur = Some(id),
            None => return Err((false, PathError::Unknown(rendered))),
        }
    }
    let owner = cur.expect("at least one thimac segment");
    let kind = match ActionKind::from_keyword(&segments[segments.len() - 1]) {
        Some(k) => k,
        None => return Err((false, PathError::Unknown(rendered))),
    };
    let candidates: Vec<ActionId> = model
        .thimac(owner)
        .actions
        .iter()
        .copied()
        .filter(|a| model.action(*a).kind == kind)
        .collect();
    match label {
        Some(l) => candidates
            .into_iter()
            .find(|a| model.action(*a).label.as_deref() == Some(l))
            .ok_or((false, PathError::Unknown(rendered))),
        None => {
            // A bare path names the unlabeled node when one exists; the
            // label is part of an action's identity.
            if let Some(&exact) = candidates
                .iter()
                .find(|a| model.action(**a).label.is_none())
            {
                return Ok(exact);
            }
            match candidates.len() {
                0 => Err((false, PathError::Unknown(rendered))),
                1 => Ok(candidates[0]),
                _ => Err((
                    true,
                    PathError::Ambiguous {
                        path: rendered,
                        candidates: candidates
                            .iter()
                            .map(|a| model.action_path(*a))
                            .collect(),
                    },
                )),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ArcFilter {
    Any,
    Flow,
    Trigger,
    NegTrigger,
}

impl ArcFilter {
    fn matches(self, class: ArcClass) -> bool {
        match self {
            ArcFilter::Any => true,
            ArcFilter::Flow => class == ArcClass::Flow,
            ArcFilter::Trigger => class == ArcClass::Trigger(Polarity::Positive),
            ArcFilter::NegTrigger => class == ArcClass::Trigger(Polarity::Negative),
        }
    }
}

struct PendingEvent {
    key: String,
    label: String,
    kind: EventKind,
    nodes: Vec<RawPath>,
    without: Vec<(ArcFilter, RawPath, RawPath, SourceSpan)>,
    span: SourceSpan,
}

struct PendingHint {
    arc: ArcId,
    src_key: String,
    dst_key: String,
    span: SourceSpan,
}

struct PendingAlias {
    name: String,
    src_key: String,
    dst_key: String,
    span: SourceSpan,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    builder: ModelBuilder,
    diags: Vec<Diagnostic>,
    events: Vec<PendingEvent>,
    hints: Vec<PendingHint>,
    aliases: Vec<PendingAlias>,
    saw_model_stmt: bool,
}

/// Parses `.tm` source into a frozen [`StaticModel`]. On failure the
/// error list holds at least one diagnostic with a source position.
pub fn parse_model(text: &str, origin: &str) -> Result<StaticModel, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(text, origin);
    let stem = Path::new(origin)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".to_string());
    let mut parser = Parser {
        toks,
        pos: 0,
        file: origin.to_string(),
        builder: ModelBuilder::new(&stem),
        diags: Vec::new(),
        events: Vec::new(),
        hints: Vec::new(),
        aliases: Vec::new(),
        saw_model_stmt: false,
    };
    parser.run();
    diags.append(&mut parser.diags);
    if diags.iter().any(Diagnostic::is_error) {
        Err(diags)
    } else {
        Ok(parser.builder.freeze())
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> SourceSpan {
        let t = &self.toks[self.pos];
        SourceSpan::new(&self.file, t.line, t.column)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&mut self, code: &'static str, message: impl Into<String>) {
        let span = self.here();
        self.diags.push(Diagnostic::error(code, message, span));
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Semi) {
            self.bump();
        }
    }

    /// After an error: skip to the next plausible statement boundary.
    fn recover(&mut self) {
        loop {
            match self.peek() {
                Tok::Newline | Tok::Semi => {
                    self.bump();
                    return;
                }
                Tok::RBrace | Tok::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn expect_ident(&mut self, what: &str) -> Option<(String, SourceSpan)> {
        let span = self.here();
        match self.peek() {
            Tok::Ident(_) => {
                let Tok::Ident(s) = self.bump().tok else {
                    unreachable!()
                };
                Some((s, span))
            }
            other => {
                let found = other.describe();
                self.error_here(codes::SYNTAX, format!("expected {what}, found {found}"));
                None
            }
        }
    }

    fn expect_tok(&mut self, tok: Tok, what: &str) -> bool {
        if self.eat(&tok) {
            true
        } else {
            let found = self.peek().describe();
            self.error_here(codes::SYNTAX, format!("expected {what}, found {found}"));
            false
        }
    }

    fn end_statement(&mut self) {
        match self.peek() {
            Tok::Newline | Tok::Semi | Tok::RBrace | Tok::Eof => {}
            other => {
                let found = other.describe();
                self.error_here(
                    codes::SYNTAX,
                    format!("expected end of statement, found {found}"),
                );
                self.recover();
            }
        }
    }

    fn run(&mut self) {
        loop {
            self.skip_separators();
            let span = self.here();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Ident(word) => {
                    self.bump();
                    match word.as_str() {
                        "model" => self.parse_model_stmt(span),
                        "thimac" => self.parse_thimac_stmt(),
                        "flow" => self.parse_flow_stmt(span),
                        "trigger" => self.parse_trigger_stmt(span, Polarity::Positive),
                        "negtrigger" => self.parse_trigger_stmt(span, Polarity::Negative),
                        "event" => self.parse_event_stmt(span, EventKind::Event),
                        "instance" => self.parse_event_stmt(span, EventKind::Instance),
                        "ne" => self.parse_ne_stmt(span),
                        other => {
                            self.diags.push(Diagnostic::error(
                                codes::SYNTAX,
                                format!("unknown declaration `{other}`"),
                                span,
                            ));
                            self.recover();
                        }
                    }
                }
                other => {
                    let found = other.describe();
                    self.error_here(codes::SYNTAX, format!("expected a declaration, found {found}"));
                    self.recover();
                }
            }
        }
        self.resolve_pending();
    }

    fn parse_model_stmt(&mut self, span: SourceSpan) {
        let name = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                s
            }
            Tok::Str(s) => {
                self.bump();
                s
            }
            other => {
                let found = other.describe();
                self.error_here(codes::SYNTAX, format!("expected model name, found {found}"));
                self.recover();
                return;
            }
        };
        if self.saw_model_stmt {
            self.diags.push(Diagnostic::error(
                codes::SYNTAX,
                "duplicate `model` declaration",
                span,
            ));
        } else {
            self.saw_model_stmt = true;
            self.builder.set_name(&name);
        }
        self.end_statement();
    }

    /// `thimac A.B.C { ... }` attaches C under A.B; bare `thimac X` (or a
    /// braced body) declares a root or nested thimac.
    fn parse_thimac_stmt(&mut self) {
        let Some((first, first_span)) = self.expect_ident("thimac name") else {
            self.recover();
            return;
        };
        let mut segments = vec![(first, first_span)];
        while self.eat(&Tok::Dot) {
            match self.expect_ident("thimac name") {
                Some(seg) => segments.push(seg),
                None => {
                    self.recover();
                    return;
                }
            }
        }
        let mut parent: Option<ThimacId> = None;
        for (name, span) in &segments[..segments.len() - 1] {
            let found = self
                .builder
                .model()
                .thimacs()
                .iter()
                .find(|t| t.parent == parent && t.name == *name)
                .map(|t| t.id);
            match found {
                Some(id) => parent = Some(id),
                None => {
                    self.diags.push(Diagnostic::error(
                        codes::UNKNOWN_REF,
                        format!("unknown thimac `{name}`"),
                        span.clone(),
                    ));
                    self.recover();
                    return;
                }
            }
        }
        let (leaf, leaf_span) = segments.last().unwrap().clone();
        let id = match self.builder.add_thimac(&leaf, parent) {
            Ok(id) => {
                self.builder.set_thimac_span(id, leaf_span);
                id
            }
            Err(ModelError::DuplicateName { name }) => {
                self.diags.push(Diagnostic::error(
                    codes::DUPLICATE_NAME,
                    format!("duplicate thimac name `{name}`"),
                    leaf_span,
                ));
                self.recover();
                return;
            }
            Err(e) => {
                self.diags
                    .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), leaf_span));
                self.recover();
                return;
            }
        };
        if self.eat(&Tok::LBrace) {
            self.parse_thimac_body(id);
        }
        self.end_statement();
    }

    fn parse_thimac_body(&mut self, owner: ThimacId) {
        loop {
            self.skip_separators();
            let span = self.here();
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    return;
                }
                Tok::Eof => {
                    self.error_here(codes::SYNTAX, "unclosed `{` in thimac body");
                    return;
                }
                Tok::Ident(word) => {
                    self.bump();
                    match word.as_str() {
                        "action" => self.parse_action_stmt(owner, span),
                        "thimac" => {
                            let Some((name, name_span)) = self.expect_ident("thimac name") else {
                                self.recover();
                                continue;
                            };
                            match self.builder.add_thimac(&name, Some(owner)) {
                                Ok(id) => {
                                    self.builder.set_thimac_span(id, name_span);
                                    if self.eat(&Tok::LBrace) {
                                        self.parse_thimac_body(id);
                                    }
                                }
                                Err(ModelError::DuplicateName { name }) => {
                                    self.diags.push(Diagnostic::error(
                                        codes::DUPLICATE_NAME,
                                        format!("duplicate thimac name `{name}`"),
                                        name_span,
                                    ));
                                    self.recover();
                                }
                                Err(e) => {
                                    self.diags.push(Diagnostic::error(
                                        codes::UNKNOWN_REF,
                                        e.to_string(),
                                        name_span,
                                    ));
                                    self.recover();
                                }
                            }
                        }
                        other => {
                            self.diags.push(Diagnostic::error(
                                codes::SYNTAX,
                                format!("expected `action` or `thimac`, found `{other}`"),
                                span,
                            ));
                            self.recover();
                        }
                    }
                }
                other => {
                    let found = other.describe();
                    self.error_here(
                        codes::SYNTAX,
                        format!("expected `action` or `thimac`, found {found}"),
                    );
                    self.recover();
                }
            }
        }
    }

    fn parse_action_stmt(&mut self, owner: ThimacId, span: SourceSpan) {
        let Some((kind_word, kind_span)) = self.expect_ident("action kind") else {
            self.recover();
            return;
        };
        let Some(kind) = ActionKind::from_keyword(&kind_word) else {
            self.diags.push(Diagnostic::error(
                codes::SYNTAX,
                format!(
                    "unknown action kind `{kind_word}` (expected create, process, release, transfer or receive)"
                ),
                kind_span,
            ));
            self.recover();
            return;
        };
        let label = if self.eat(&Tok::Colon) {
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    Some(s)
                }
                Tok::Ident(s) => {
                    self.bump();
                    Some(s)
                }
                other => {
                    let found = other.describe();
                    self.error_here(codes::SYNTAX, format!("expected action label, found {found}"));
                    self.recover();
                    return;
                }
            }
        } else {
            None
        };
        match self.builder.add_action(owner, kind, label.as_deref()) {
            Ok(id) => self.builder.set_action_span(id, span),
            Err(e @ ModelError::DuplicateAction { .. }) => {
                self.diags
                    .push(Diagnostic::error(codes::DUPLICATE_NAME, e.to_string(), span));
            }
            Err(e) => {
                self.diags
                    .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), span));
            }
        }
    }

    fn parse_path(&mut self) -> Option<RawPath> {
        let span = self.here();
        let Some((first, _)) = self.expect_ident("a dotted action path") else {
            return None;
        };
        let mut segments = vec![first];
        while self.eat(&Tok::Dot) {
            let (seg, _) = self.expect_ident("path segment")?;
            segments.push(seg);
        }
        let label = if self.eat(&Tok::Colon) {
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    Some(s)
                }
                Tok::Ident(s) => {
                    self.bump();
                    Some(s)
                }
                other => {
                    let found = other.describe();
                    self.error_here(codes::SYNTAX, format!("expected label qualifier, found {found}"));
                    return None;
                }
            }
        } else {
            None
        };
        Some(RawPath {
            segments,
            label,
            span,
        })
    }

    fn resolve_path_now(&mut self, raw: &RawPath) -> Option<ActionId> {
        match resolve_raw(self.builder.model(), &raw.segments, raw.label.as_deref()) {
            Ok(id) => Some(id),
            Err((_, e)) => {
                self.diags
                    .push(Diagnostic::error(e.code(), e.to_string(), raw.span.clone()));
                None
            }
        }
    }

    fn parse_flow_stmt(&mut self, span: SourceSpan) {
        let Some(src) = self.parse_path() else {
            self.recover();
            return;
        };
        if !self.expect_tok(Tok::Arrow, "`->`") {
            self.recover();
            return;
        }
        let Some(dst) = self.parse_path() else {
            self.recover();
            return;
        };
        let (Some(src_id), Some(dst_id)) = (self.resolve_path_now(&src), self.resolve_path_now(&dst))
        else {
            self.end_statement();
            return;
        };
        match self.builder.connect_flow(src_id, dst_id) {
            Ok(id) => self.builder.set_arc_span(id, span),
            Err(e @ ModelError::IllegalFlowAdjacency { .. }) => {
                self.diags
                    .push(Diagnostic::error(codes::ILLEGAL_FLOW, e.to_string(), span));
            }
            Err(e) => {
                self.diags
                    .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), span));
            }
        }
        self.end_statement();
    }

    fn parse_trigger_stmt(&mut self, span: SourceSpan, polarity: Polarity) {
        let Some(src) = self.parse_path() else {
            self.recover();
            return;
        };
        if !self.expect_tok(Tok::Arrow, "`->`") {
            self.recover();
            return;
        }
        let Some(dst) = self.parse_path() else {
            self.recover();
            return;
        };
        let mut hint: Option<(String, String, SourceSpan)> = None;
        if let Tok::Ident(word) = self.peek() {
            if word == "as" {
                let as_span = self.here();
                self.bump();
                let Some((src_key, _)) = self.expect_ident("event id") else {
                    self.recover();
                    return;
                };
                if !self.expect_tok(Tok::Arrow, "`->`") {
                    self.recover();
                    return;
                }
                let Some((dst_key, _)) = self.expect_ident("event id") else {
                    self.recover();
                    return;
                };
                hint = Some((src_key, dst_key, as_span));
            }
        }
        let (Some(src_id), Some(dst_id)) = (self.resolve_path_now(&src), self.resolve_path_now(&dst))
        else {
            self.end_statement();
            return;
        };
        match self.builder.connect_trigger(src_id, dst_id, polarity) {
            Ok(id) => {
                self.builder.set_arc_span(id, span);
                if let Some((src_key, dst_key, hint_span)) = hint {
                    self.hints.push(PendingHint {
                        arc: id,
                        src_key,
                        dst_key,
                        span: hint_span,
                    });
                }
            }
            Err(e @ ModelError::SelfTrigger) => {
                self.diags
                    .push(Diagnostic::error(codes::SELF_TRIGGER, e.to_string(), span));
            }
            Err(e) => {
                self.diags
                    .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), span));
            }
        }
        self.end_statement();
    }

    fn parse_event_stmt(&mut self, span: SourceSpan, kind: EventKind) {
        let Some((key, _)) = self.expect_ident("event id") else {
            self.recover();
            return;
        };
        let label = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            other => {
                let found = other.describe();
                self.error_here(codes::SYNTAX, format!("expected event label string, found {found}"));
                self.recover();
                return;
            }
        };
        if !self.expect_tok(Tok::LBrace, "`{`") {
            self.recover();
            return;
        }
        let mut nodes = Vec::new();
        let mut without = Vec::new();
        loop {
            self.skip_separators();
            while self.eat(&Tok::Comma) {
                self.skip_separators();
            }
            match self.peek().clone() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    self.error_here(codes::SYNTAX, "unclosed `{` in event region");
                    break;
                }
                Tok::Ident(word) if word == "without" => {
                    let w_span = self.here();
                    self.bump();
                    let filter = match self.peek().clone() {
                        Tok::Ident(k) => match k.as_str() {
                            "arc" => {
                                self.bump();
                                ArcFilter::Any
                            }
                            "flow" => {
                                self.bump();
                                ArcFilter::Flow
                            }
                            "trigger" => {
                                self.bump();
                                ArcFilter::Trigger
                            }
                            "negtrigger" => {
                                self.bump();
                                ArcFilter::NegTrigger
                            }
                            _ => ArcFilter::Any,
                        },
                        _ => ArcFilter::Any,
                    };
                    let Some(src) = self.parse_path() else {
                        self.recover();
                        continue;
                    };
                    if !self.expect_tok(Tok::Arrow, "`->`") {
                        self.recover();
                        continue;
                    }
                    let Some(dst) = self.parse_path() else {
                        self.recover();
                        continue;
                    };
                    without.push((filter, src, dst, w_span));
                }
                Tok::Ident(_) => {
                    if let Some(p) = self.parse_path() {
                        nodes.push(p);
                    } else {
                        self.recover();
                    }
                }
                other => {
                    let found = other.describe();
                    self.error_here(
                        codes::SYNTAX,
                        format!("expected an action path or `without`, found {found}"),
                    );
                    self.recover();
                }
            }
        }
        self.events.push(PendingEvent {
            key,
            label,
            kind,
            nodes,
            without,
            span,
        });
        self.end_statement();
    }

    fn parse_ne_stmt(&mut self, span: SourceSpan) {
        let Some((name, _)) = self.expect_ident("alias id") else {
            self.recover();
            return;
        };
        if !self.expect_tok(Tok::Eq, "`=`") {
            self.recover();
            return;
        }
        match self.expect_ident("`neg`") {
            Some((kw, kw_span)) if kw == "neg" => {
                let _ = kw_span;
            }
            _ => {
                self.recover();
                return;
            }
        }
        if !self.expect_tok(Tok::LParen, "`(`") {
            self.recover();
            return;
        }
        let Some((src_key, _)) = self.expect_ident("event id") else {
            self.recover();
            return;
        };
        if !self.expect_tok(Tok::Arrow, "`->`") {
            self.recover();
            return;
        }
        let Some((dst_key, _)) = self.expect_ident("event id") else {
            self.recover();
            return;
        };
        if !self.expect_tok(Tok::RParen, "`)`") {
            self.recover();
            return;
        }
        self.aliases.push(PendingAlias {
            name,
            src_key,
            dst_key,
            span,
        });
        self.end_statement();
    }

    /// Phase two: events, lift annotations, and aliases against the full
    /// declaration set.
    fn resolve_pending(&mut self) {
        let events = std::mem::take(&mut self.events);
        for ev in events {
            let mut node_set: BTreeSet<ActionId> = BTreeSet::new();
            let mut broken = false;
            for raw in &ev.nodes {
                match self.resolve_path_now(raw) {
                    Some(id) => {
                        node_set.insert(id);
                    }
                    None => broken = true,
                }
            }
            if broken {
                continue;
            }
            if node_set.is_empty() {
                self.diags.push(Diagnostic::error(
                    codes::SYNTAX,
                    format!("event `{}` must list at least one node", ev.key),
                    ev.span,
                ));
                continue;
            }
            let mut arcs = self.builder.model().induced_arcs(&node_set);
            for (filter, src, dst, w_span) in &ev.without {
                let (Some(src_id), Some(dst_id)) =
                    (self.resolve_path_now(src), self.resolve_path_now(dst))
                else {
                    broken = true;
                    continue;
                };
                let matching: Vec<ArcId> = arcs
                    .iter()
                    .copied()
                    .filter(|a| {
                        let arc = self.builder.model().arc(*a);
                        arc.src == src_id && arc.dst == dst_id && filter.matches(arc.class)
                    })
                    .collect();
                if matching.is_empty() {
                    self.diags.push(Diagnostic::error(
                        codes::UNKNOWN_REF,
                        format!(
                            "no arc {} -> {} inside the region of `{}`",
                            src.render(),
                            dst.render(),
                            ev.key
                        ),
                        w_span.clone(),
                    ));
                    broken = true;
                } else {
                    for a in matching {
                        arcs.remove(&a);
                    }
                }
            }
            if broken {
                continue;
            }
            let nodes: Vec<ActionId> = node_set.into_iter().collect();
            let arcs: Vec<ArcId> = arcs.into_iter().collect();
            match self
                .builder
                .define_event(&ev.key, &ev.label, &nodes, &arcs, ev.kind)
            {
                Ok(id) => self.builder.set_event_span(id, ev.span),
                Err(e @ ModelError::DuplicateEvent { .. }) => {
                    self.diags
                        .push(Diagnostic::error(codes::DUPLICATE_NAME, e.to_string(), ev.span));
                }
                Err(e) => {
                    self.diags
                        .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), ev.span));
                }
            }
        }

        let hints = std::mem::take(&mut self.hints);
        for hint in hints {
            let src = self.builder.model().event_by_key(&hint.src_key).map(|e| e.id);
            let dst = self.builder.model().event_by_key(&hint.dst_key).map(|e| e.id);
            let (Some(src), Some(dst)) = (src, dst) else {
                let missing = if src.is_none() {
                    &hint.src_key
                } else {
                    &hint.dst_key
                };
                self.diags.push(Diagnostic::error(
                    codes::UNKNOWN_REF,
                    format!("unknown event `{missing}` in lift annotation"),
                    hint.span,
                ));
                continue;
            };
            if let Err(e) = self.builder.set_lift_hint(hint.arc, src, dst) {
                self.diags
                    .push(Diagnostic::error(codes::UNKNOWN_REF, e.to_string(), hint.span));
            }
        }

        let aliases = std::mem::take(&mut self.aliases);
        for alias in aliases {
            let src = self.builder.model().event_by_key(&alias.src_key).map(|e| e.id);
            let dst = self.builder.model().event_by_key(&alias.dst_key).map(|e| e.id);
            let (Some(src), Some(dst)) = (src, dst) else {
                let missing = if src.is_none() {
                    &alias.src_key
                } else {
                    &alias.dst_key
                };
                self.diags.push(Diagnostic::error(
                    codes::UNKNOWN_REF,
                    format!("unknown event `{missing}` in ne alias"),
                    alias.span,
                ));
                continue;
            };
            if let Err(e) = self.builder.add_ne_alias(&alias.name, src, dst) {
                self.diags
                    .push(Diagnostic::error(codes::DUPLICATE_NAME, e.to_string(), alias.span));
            }
        }
    }
}
