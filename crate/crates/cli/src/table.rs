//! Tabular output: CSV sections or a JSON object of row arrays.

use serde_json::{Map, Number, Value};
use std::io;

#[derive(Clone, Debug)]
pub enum Cell {
    Str(String),
    Float(f64),
    Int(i64),
    Bool(bool),
    /// Exact rational as `p/q`.
    Exact(String),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}
impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}
impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map_or(Cell::Empty, Into::into)
    }
}

/// C's `%.17g`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    } else {
        trim(&format!("{x:.*}", (16 - exp) as usize))
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Str(s) | Cell::Exact(s) => s.clone(),
            Cell::Float(x) => g17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Str(s) | Cell::Exact(s) => Value::String(s.clone()),
            Cell::Float(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &[&'static str]) -> Self {
        Table { name, headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// CSV sections are separated by one blank line; JSON maps section names to row objects.
pub fn render(tables: &[Table], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            for (j, t) in tables.iter().enumerate() {
                if j > 0 {
                    out.push(b'\n');
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&t.headers)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(Cell::text))?;
                }
                out.extend(w.into_inner().map_err(|e| e.into_error())?);
            }
            Ok(out)
        }
        Format::Json => {
            let mut obj = Map::new();
            for t in tables {
                let rows = t
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            t.headers.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                obj.insert(t.name.to_string(), Value::Array(rows));
            }
            let mut out = serde_json::to_vec_pretty(&Value::Object(obj))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
