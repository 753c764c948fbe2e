//! Tokenizer for the C subset.
//!
//! Comments and preprocessor lines are dropped. Every token remembers its
//! byte span so that opaque statements can be re-rendered from source.

use crate::syntax::Loc;

use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str,
    Char,
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
    pub start: usize,
    pub end: usize,
}

const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "(", ")", "{", "}", "[", "]", ";", ",", ":", "?", "=", "<", ">", "+", "-", "*", "/",
    "%", "&", "|", "^", "!", "~", ".",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1u32, 0usize);
    let mut at_line_start = true;
    while i < bytes.len() {
        let c = bytes[i];
        let loc = Loc::new(line, (src[line_start..i].chars().count() + 1) as u32);
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                at_line_start = true;
                continue;
            }
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'#' if at_line_start => {
                // preprocessor line, with backslash continuations
                while i < bytes.len() && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' && bytes.get(i + 1) == Some(&b'\n') {
                        i += 1;
                        line += 1;
                        line_start = i + 1;
                    }
                    i += 1;
                }
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let Some(end) = src[i + 2..].find("*/") else {
                    return Err(FrontendError::Syntax { loc, expected: "`*/`".into(), found: "end of file".into() });
                };
                for (k, b) in bytes[i..i + 2 + end].iter().enumerate() {
                    if *b == b'\n' {
                        line += 1;
                        line_start = i + k + 1;
                    }
                }
                i += end + 4;
                continue;
            }
            _ => {}
        }
        at_line_start = false;
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Int(parse_int(&src[start..i]).ok_or_else(|| FrontendError::Syntax {
                loc,
                expected: "an integer literal".into(),
                found: format!("`{}`", &src[start..i]),
            })?)
        } else if c == b'"' || c == b'\'' {
            i += 1;
            while i < bytes.len() && bytes[i] != c {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                if bytes.get(i) == Some(&b'\n') {
                    break;
                }
                i += 1;
            }
            if i >= bytes.len() || bytes[i] != c {
                return Err(FrontendError::Syntax {
                    loc,
                    expected: "a closing quote".into(),
                    found: "end of line".into(),
                });
            }
            i += 1;
            if c == b'"' {
                Tok::Str
            } else {
                Tok::Char
            }
        } else if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            i += p.len();
            Tok::Punct(p)
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(FrontendError::Syntax { loc, expected: "a token".into(), found: format!("`{ch}`") });
        };
        out.push(Token { tok, loc, start, end: i });
    }
    let loc = Loc::new(line, (src[line_start..].chars().count() + 1) as u32);
    out.push(Token { tok: Tok::Eof, loc, start: src.len(), end: src.len() });
    Ok(out)
}

/// Decimal, hex (`0x`) or octal (leading `0`) literals with optional
/// `u`/`l` suffixes.
fn parse_int(text: &str) -> Option<i64> {
    let digits = text.trim_end_matches(['u', 'U', 'l', 'L']);
    let (radix, body) = if let Some(h) = digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        (16, h)
    } else if digits.len() > 1 && digits.starts_with('0') {
        (8, &digits[1..])
    } else {
        (10, digits)
    };
    i64::from_str_radix(body, radix).ok()
}
