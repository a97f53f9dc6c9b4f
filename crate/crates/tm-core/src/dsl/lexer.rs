//! Tokenizer for `.tm` model files and `.tms` scenario files.
//!
//! Newlines are significant (statement separators) and surface as
//! [`Tok::Newline`]; `#` starts a comment running to end of line.

use crate::diag::{codes, Diagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    Eq,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Colon => "`:`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::Arrow => "`->`".to_string(),
            Tok::Eq => "`=`".to_string(),
            Tok::Newline => "end of line".to_string(),
            Tok::Eof => "end of file".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
}

pub fn is_bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Tokenizes `text`, reporting every malformed construct as its own
/// diagnostic and carrying on.
pub fn lex(text: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut line: u32 = 1;
    let mut column: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr) => {
            toks.push(Token {
                tok: $tok,
                line: $line,
                column: $col,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        match c {
            '\n' => {
                chars.next();
                push!(Tok::Newline, tline, tcol);
                line += 1;
                column = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '{' => {
                chars.next();
                column += 1;
                push!(Tok::LBrace, tline, tcol);
            }
            '}' => {
                chars.next();
                column += 1;
                push!(Tok::RBrace, tline, tcol);
            }
            '(' => {
                chars.next();
                column += 1;
                push!(Tok::LParen, tline, tcol);
            }
            ')' => {
                chars.next();
                column += 1;
                push!(Tok::RParen, tline, tcol);
            }
            ',' => {
                chars.next();
                column += 1;
                push!(Tok::Comma, tline, tcol);
            }
            ';' => {
                chars.next();
                column += 1;
                push!(Tok::Semi, tline, tcol);
            }
            ':' => {
                chars.next();
                column += 1;
                push!(Tok::Colon, tline, tcol);
            }
            '.' => {
                chars.next();
                column += 1;
                push!(Tok::Dot, tline, tcol);
            }
            '=' => {
                chars.next();
                column += 1;
                push!(Tok::Eq, tline, tcol);
            }
            '-' => {
                chars.next();
                column += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    column += 1;
                    push!(Tok::Arrow, tline, tcol);
                } else {
                    diags.push(Diagnostic::error(
                        codes::SYNTAX,
                        "expected `->`",
                        SourceSpan::new(file, tline, tcol),
                    ));
                }
            }
            '"' => {
                chars.next();
                column += 1;
                let mut value = String::new();
                let mut closed = false;
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => {
                            if let Some(&esc) = chars.peek() {
                                chars.next();
                                column += 1;
                                match esc {
                                    '"' => value.push('"'),
                                    '\\' => value.push('\\'),
                                    other => {
                                        value.push('\\');
                                        value.push(other);
                                    }
                                }
                            }
                        }
                        other => value.push(other),
                    }
                }
                if !closed {
                    diags.push(Diagnostic::error(
                        codes::SYNTAX,
                        "unterminated string literal",
                        SourceSpan::new(file, tline, tcol),
                    ));
                }
                push!(Tok::Str(value), tline, tcol);
            }
            c if c.is_ascii_digit() => {
                let mut value: u64 = 0;
                while let Some(&c) = chars.peek() {
                    if let Some(d) = c.to_digit(10) {
                        chars.next();
                        column += 1;
                        value = value.saturating_mul(10).saturating_add(d as u64);
                    } else {
                        break;
                    }
                }
                push!(Tok::Int(value), tline, tcol);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(word), tline, tcol);
            }
            other => {
                chars.next();
                column += 1;
                diags.push(Diagnostic::error(
                    codes::SYNTAX,
                    format!("unexpected character `{other}`"),
                    SourceSpan::new(file, tline, tcol),
                ));
            }
        }
    }
    push!(Tok::Eof, line, column);
    (toks, diags)
}
