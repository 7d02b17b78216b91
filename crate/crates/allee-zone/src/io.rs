//! Output formats. JSON documents have sorted keys and floats rounded to 12
//! significant digits; CSV files carry the parameters as `#` comment lines
//! above the header and print floats as shortest round-trip decimals.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde_json::{Map, Number, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const SIG_DIGITS: usize = 12;

/// `x` rounded to 12 significant digits, or `null` when not finite.
pub fn rounded(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
    Number::from_f64(r).map_or(Value::Null, Value::Number)
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => rounded(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_all).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

/// Run parameters, embedded in every output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_owned(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    fn to_value(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
    }
}

/// A single JSON object `{command, params, result, version}` followed by a
/// newline.
pub fn json_document(command: &str, params: &Params, result: Value) -> String {
    let mut doc = Map::new();
    doc.insert("command".into(), command.into());
    doc.insert("params".into(), params.to_value());
    doc.insert("result".into(), result);
    doc.insert("version".into(), VERSION.into());
    let mut s = serde_json::to_string_pretty(&round_all(Value::Object(doc))).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Num(x) if x.is_finite() => format!("{x}"),
            Self::Num(x) => format!("{x}").to_lowercase(),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Self::Empty, Self::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

/// Rows of a CSV table together with extra `# key=value` notes written after
/// the parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), ..Self::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_owned(), value.to_string()));
    }
}

fn comment_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |x| format!("{x}")),
        other => other.to_string(),
    }
}

pub fn write_csv<W: Write>(out: W, command: &str, params: &Params, table: &Table) -> io::Result<()> {
    let mut out = out;
    writeln!(out, "# command={command}")?;
    writeln!(out, "# version={VERSION}")?;
    for (k, v) in &params.0 {
        writeln!(out, "# {k}={}", comment_value(v))?;
    }
    for (k, v) in &table.notes {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()
}

pub fn csv_string(command: &str, params: &Params, table: &Table) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, command, params, table).expect("writing to memory");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}
