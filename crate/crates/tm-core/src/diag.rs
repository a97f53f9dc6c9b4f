//! Diagnostics shared by the parser and the validator.

use std::fmt;

/// 1-based position of a declaration inside a source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: u32, column: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// Stable diagnostic codes. Parser codes are TM00xx, scenario codes
/// TM01xx, validator codes TM02xx.
pub mod codes {
    pub const SYNTAX: &str = "TM0001";
    pub const UNKNOWN_REF: &str = "TM0002";
    pub const ILLEGAL_FLOW: &str = "TM0003";
    pub const DUPLICATE_NAME: &str = "TM0004";
    pub const AMBIGUOUS_PATH: &str = "TM0005";
    pub const SELF_TRIGGER: &str = "TM0006";

    pub const SCENARIO_SYNTAX: &str = "TM0101";
    pub const UNKNOWN_EVENT: &str = "TM0102";
    pub const SLOT_OUT_OF_HORIZON: &str = "TM0103";
    pub const PERSIST_ON_POTENTIALIZE: &str = "TM0104";
    pub const DANGLING_NE_ALIAS: &str = "TM0106";

    pub const V1_NEVER_CREATED: &str = "TM0201";
    pub const V2_ILLEGAL_FLOW: &str = "TM0202";
    pub const V3_INTRA_THIMAC_TRIGGER: &str = "TM0203";
    pub const V4_MALFORMED_REGION: &str = "TM0204";
    pub const V5_CONTAINMENT_CYCLE: &str = "TM0205";
    pub const V6_EVENT_WIRING: &str = "TM0206";
}

/// One finding, carrying a stable code and a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: &'static str, message: impl Into<String>, span: SourceSpan) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{kind}[{}]: {}\n  --> {}",
            self.code, self.message, self.span
        )
    }
}
