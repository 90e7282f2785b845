//! Tokenizer for the `.rcp` modelling language.

use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Ident(String),
    Int(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    ColonEq,
    Semi,
    Comma,
    Dot,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    Arrow,
    Pipe,
    Amp,
    Bang,
    Plus,
    Minus,
    Prime,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub start: usize,
    pub end: usize,
}

pub fn line_col(text: &str, offset: usize) -> (u32, u32) {
    let mut line = 1u32;
    let mut col = 1u32;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = match c {
            '{' => TokKind::LBrace,
            '}' => TokKind::RBrace,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '[' => TokKind::LBracket,
            ']' => TokKind::RBracket,
            ';' => TokKind::Semi,
            ',' => TokKind::Comma,
            '.' => TokKind::Dot,
            '=' => TokKind::Eq,
            '|' => TokKind::Pipe,
            '&' => TokKind::Amp,
            '+' => TokKind::Plus,
            '\'' => TokKind::Prime,
            ':' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    TokKind::ColonEq
                } else {
                    TokKind::Colon
                }
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    TokKind::Ne
                } else {
                    TokKind::Bang
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    TokKind::Le
                } else {
                    TokKind::Lt
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    TokKind::Ge
                } else {
                    TokKind::Gt
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    TokKind::Arrow
                } else {
                    TokKind::Minus
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < bytes.len()
                    && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let word = text[i..j].to_string();
                i = j - 1;
                TokKind::Ident(word)
            }
            _ if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    j += 1;
                }
                let word = text[i..j].to_string();
                i = j - 1;
                TokKind::Int(word)
            }
            _ => {
                let (line, col) = line_col(text, i);
                return Err(Diagnostic {
                    message: format!("unexpected character {c:?}"),
                    line,
                    col,
                });
            }
        };
        i += 1;
        tokens.push(Token { kind, start, end: i });
    }
    tokens.push(Token { kind: TokKind::Eof, start: text.len(), end: text.len() });
    Ok(tokens)
}
