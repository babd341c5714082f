//! Report assembly and rendering. JSON keys come out sorted, so output is
//! byte-stable for a fixed input.

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug)]
pub enum Format {
    Json,
    Csv,
}

/// JSON number, or `"inf"` / `"nan"` where JSON has none.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Text form used in CSV cells.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub struct Report {
    fields: Map<String, Value>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, input: Value) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), Value::String(command.into()));
        fields.insert("input".into(), input);
        fields.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        Report { fields, header: Vec::new(), rows: Vec::new() }
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.fields.insert(key.into(), v);
    }

    pub fn rows(&mut self, header: Vec<String>, rows: Vec<Vec<String>>) {
        self.header = header;
        self.rows = rows;
    }

    pub fn push_row(&mut self, mut row: Vec<String>) {
        row.resize(self.header.len().max(row.len()), String::new());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&Value::Object(self.fields.clone())).expect("json");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
                w.write_record(&self.header).expect("csv");
                for r in &self.rows {
                    w.write_record(r).expect("csv");
                }
                String::from_utf8(w.into_inner().expect("csv")).expect("utf8")
            }
        }
    }
}
