//! Reports: an ordered tree of values rendered as JSON or LaTeX. Expressions
//! carry both their canonical string and their LaTeX rendering.

use serde_json::{Map, Value as Json};
use varitri_core::expr::{latex, print};
use varitri_core::forms::BiForm;
use varitri_core::jetalg::{DiffPoly, JetContext};
use varitri_core::tricomplex::BettiTable;

pub const TOOL: &str = concat!("varitri ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Text(String),
    Expr { text: String, latex: String },
    List(Vec<Value>),
    Record(Vec<(String, Value)>),
}

impl Value {
    pub fn expr(ctx: &JetContext, p: &DiffPoly) -> Value {
        Value::Expr {
            text: print(ctx, p),
            latex: latex(ctx, p),
        }
    }

    pub fn form(ctx: &JetContext, w: &BiForm) -> Value {
        Value::expr(ctx, w.poly())
    }

    pub fn exprs(ctx: &JetContext, ps: &[DiffPoly]) -> Value {
        Value::List(ps.iter().map(|p| Value::expr(ctx, p)).collect())
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn int(n: impl TryInto<i64>) -> Value {
        Value::Int(n.try_into().unwrap_or(i64::MAX))
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Bool(b) => Json::Bool(*b),
            Value::Int(n) => Json::from(*n),
            Value::Text(s) => Json::String(s.clone()),
            Value::Expr { text, .. } => Json::String(text.clone()),
            Value::List(items) => Json::Array(items.iter().map(Value::to_json).collect()),
            Value::Record(fields) => {
                let mut m = Map::new();
                for (k, v) in fields {
                    m.insert(k.clone(), v.to_json());
                }
                Json::Object(m)
            }
        }
    }
}

/// Builder for a record value.
#[derive(Default, Clone, Debug, PartialEq)]
pub struct Record(Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, key: &str, v: Value) -> Self {
        self.0.push((key.to_string(), v));
        self
    }

    pub fn push(&mut self, key: &str, v: Value) {
        self.0.push((key.to_string(), v));
    }

    pub fn build(self) -> Value {
        Value::Record(self.0)
    }
}

/// Outcome of a command, mapped onto the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Done,
    Holds,
    Fails,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Done => "done",
            Status::Holds => "holds",
            Status::Fails => "fails",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Fails => 1,
            _ => 0,
        }
    }

    pub fn of(holds: bool) -> Status {
        if holds {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub body: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, status: Status, body: Record) -> Self {
        Report {
            command: command.to_string(),
            status,
            body: body.0,
        }
    }

    fn header(&self) -> Vec<(String, Value)> {
        vec![
            ("tool".into(), Value::text(TOOL)),
            ("command".into(), Value::text(self.command.clone())),
            ("status".into(), Value::text(self.status.name())),
        ]
    }

    pub fn to_json(&self) -> Json {
        let mut all = self.header();
        all.extend(self.body.iter().cloned());
        Value::Record(all).to_json()
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_latex(&self) -> String {
        let mut out = String::from("\\begin{description}\n");
        for (k, v) in self.header().iter().chain(self.body.iter()) {
            latex_item(&mut out, k, v, 1);
        }
        out.push_str("\\end{description}\n");
        out
    }
}

fn escape(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            '_' | '%' | '&' | '#' | '$' | '{' | '}' => {
                out.push('\\');
                out.push(ch);
            }
            '\\' => out.push_str("\\textbackslash{}"),
            '^' => out.push_str("\\^{}"),
            '~' => out.push_str("\\~{}"),
            _ => out.push(ch),
        }
    }
    out
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Bool(b) => Some(b.to_string()),
        Value::Int(n) => Some(n.to_string()),
        Value::Text(s) => Some(escape(s)),
        Value::Expr { latex, .. } => Some(format!("${latex}$")),
        _ => None,
    }
}

fn latex_item(out: &mut String, key: &str, v: &Value, level: usize) {
    let pad = "  ".repeat(level);
    match inline(v) {
        Some(s) => out.push_str(&format!("{pad}\\item[{}] {s}\n", escape(key))),
        None => {
            out.push_str(&format!("{pad}\\item[{}]\n{pad}\\begin{{description}}\n", escape(key)));
            match v {
                Value::List(items) if items.is_empty() => out.push_str(&format!("{pad}  \\item[] (none)\n")),
                Value::List(items) => {
                    for (i, item) in items.iter().enumerate() {
                        latex_item(out, &(i + 1).to_string(), item, level + 1);
                    }
                }
                Value::Record(fields) => {
                    for (k, item) in fields {
                        latex_item(out, k, item, level + 1);
                    }
                }
                _ => unreachable!("scalars render inline"),
            }
            out.push_str(&format!("{pad}\\end{{description}}\n"));
        }
    }
}

pub fn betti_table(t: &BettiTable) -> Value {
    let opt = |x: Option<i64>| x.map_or(Value::text("*"), Value::Int);
    let entries = t
        .entries
        .iter()
        .map(|e| {
            Record::new()
                .with(
                    "strand",
                    Record::new()
                        .with("p", opt(e.strand.p.map(|v| v as i64)))
                        .with("q", opt(e.strand.q.map(|v| v as i64)))
                        .with("gh", opt(e.strand.gh.map(i64::from)))
                        .build(),
                )
                .with("degree", Value::Int(e.degree))
                .with("dim", Value::int(e.dim))
                .with("rank_in", Value::int(e.rank_in))
                .with("rank_out", Value::int(e.rank_out))
                .with("betti", Value::int(e.betti))
                .with("certified", Value::Bool(e.certified))
                .build()
        })
        .collect();
    Record::new()
        .with("differential", Value::text(t.differential))
        .with(
            "budgets",
            Value::List(t.budgets.iter().map(|&b| Value::int(b)).collect()),
        )
        .with("weight_lowering", Value::Bool(t.weight_lowering))
        .with("window_cut", Value::Bool(t.window_cut))
        .with("entries", Value::List(entries))
        .build()
}
