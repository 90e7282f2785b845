//! Textual frontend: the `.rcp` modelling DSL, with positioned diagnostics
//! and a canonical printer.

pub mod ast;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod print;

use std::fmt;
use std::path::PathBuf;

use crate::ltol::Formula;
use crate::model::SystemDef;

pub use print::{expr_to_string, print_formula, print_system};

/// A positioned error message (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

/// A parsed model file: the system plus its named properties.
#[derive(Debug, Clone)]
pub struct SourceModel {
    pub path: Option<PathBuf>,
    pub text: String,
    pub system: SystemDef,
    pub properties: Vec<(String, Formula)>,
}

impl SourceModel {
    pub fn property(&self, name: &str) -> Option<&Formula> {
        self.properties.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

/// Parses a model file into a system and its properties.
pub fn parse_model(text: &str) -> Result<SourceModel, Vec<Diagnostic>> {
    let tokens = lexer::lex(text).map_err(|d| vec![d])?;
    let mut parser = parser::Parser::new(text, &tokens);
    let file = parser.parse_file().map_err(|d| vec![d])?;

    let mut lowerer = lower::Lowerer::new(text);
    let Some(system) = lowerer.lower_system(&file.system) else {
        return Err(lowerer.diagnostics);
    };
    let mut properties = Vec::new();
    for prop in &file.properties {
        if properties.iter().any(|(n, _)| n == &prop.name) {
            lowerer.diagnostics.push(Diagnostic {
                message: format!("duplicate property {}", prop.name),
                line: lexer::line_col(text, prop.span.0).0,
                col: lexer::line_col(text, prop.span.0).1,
            });
            continue;
        }
        if let Some(f) = lowerer.lower_formula(&prop.formula, &system) {
            properties.push((prop.name.clone(), f));
        }
    }
    if !lowerer.diagnostics.is_empty() {
        return Err(lowerer.diagnostics);
    }
    Ok(SourceModel { path: None, text: text.to_string(), system, properties })
}

/// Parses a single formula against an already-elaborated system, compiling
/// the full-negation surface syntax to positive normal form.
pub fn parse_formula(text: &str, sys: &SystemDef) -> Result<Formula, Vec<Diagnostic>> {
    let tokens = lexer::lex(text).map_err(|d| vec![d])?;
    let mut parser = parser::Parser::new(text, &tokens);
    let ast = parser.parse_formula().map_err(|d| vec![d])?;
    if !parser.at_eof() {
        let (line, col) = lexer::line_col(text, parser.offset());
        return Err(vec![Diagnostic { message: "trailing input after formula".into(), line, col }]);
    }
    let mut lowerer = lower::Lowerer::new(text);
    match lowerer.lower_formula(&ast, sys) {
        Some(f) if lowerer.diagnostics.is_empty() => Ok(f),
        _ => Err(lowerer.diagnostics),
    }
}
