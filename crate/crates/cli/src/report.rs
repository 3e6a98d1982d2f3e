//! Documents emitted by the CLI and the exit codes that go with them.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use codeserve::format::ParseError;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    InputError = 1,
    /// a definitive negative answer
    Negative = 2,
    BudgetExceeded = 3,
}

#[derive(Debug)]
pub enum Body {
    Json(Value),
    Csv(String),
}

#[derive(Debug)]
pub struct Report {
    pub exit: Exit,
    pub body: Body,
    /// printed on stderr
    pub message: Option<String>,
}

impl Report {
    pub fn ok(doc: Value) -> Self {
        Self { exit: Exit::Success, body: Body::Json(with_schema(doc)), message: None }
    }

    pub fn csv(text: String) -> Self {
        Self { exit: Exit::Success, body: Body::Csv(text), message: None }
    }

    pub fn negative(doc: Value) -> Self {
        Self { exit: Exit::Negative, body: Body::Json(with_schema(doc)), message: None }
    }

    pub fn budget(limit: u64) -> Self {
        let message = format!("search budget of {limit} nodes exceeded");
        Self {
            exit: Exit::BudgetExceeded,
            body: Body::Json(with_schema(json!({"error": "budget_exceeded", "limit": limit, "message": message}))),
            message: Some(message),
        }
    }

    pub fn input(kind: &str, message: impl Into<String>, extra: Value) -> Self {
        let message = message.into();
        let mut doc = json!({"error": kind, "message": message});
        if let (Value::Object(m), Value::Object(e)) = (&mut doc, extra) {
            m.extend(e);
        }
        Self { exit: Exit::InputError, body: Body::Json(with_schema(doc)), message: Some(message) }
    }

    pub fn parse(file: &Path, e: &ParseError) -> Self {
        Self::input(
            "parse",
            format!("{}: {e}", file.display()),
            json!({"file": file.display().to_string(), "line": e.line, "column": e.column}),
        )
    }

    /// Writes the body to `output` (standard output if absent) and the
    /// message to standard error.
    pub fn emit(&self, output: Option<&Path>) -> io::Result<()> {
        let text = match &self.body {
            Body::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
                s.push('\n');
                s
            }
            Body::Csv(s) => s.clone(),
        };
        match output {
            Some(p) => fs::write(p, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        if let Some(m) = &self.message {
            eprintln!("error: {m}");
        }
        Ok(())
    }
}

fn with_schema(doc: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), Value::String(SCHEMA.into()));
    match doc {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}
