//! CSV and JSON rendering. Numbers go out in scientific notation with nine
//! significant digits and `\n` line endings so that reruns are byte-identical.

use serde::Serialize;
use serde_json::{json, Value as Json};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => sci(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Nine significant digits, scientific.
pub fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// A header block of `# key value` lines followed by the rows.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Csv { columns: columns.iter().map(|c| c.to_string()).collect(), ..Csv::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut head = String::new();
        for (k, v) in &self.meta {
            head.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output");
        head + &body
    }

    /// Rows as objects keyed by column name.
    pub fn to_json(&self) -> Json {
        let meta: serde_json::Map<String, Json> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Json> =
                    self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect();
                Json::Object(obj)
            })
            .collect();
        json!({ "meta": meta, "rows": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sci(707066.05031), "7.07066050e5");
        assert_eq!(sci(-1.0e-10), "-1.00000000e-10");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["k", "value"]);
        c.meta("table", "T9");
        c.push(vec![0usize.into(), 0.5.into()]);
        c.push(vec![1usize.into(), Cell::Text("a,b".into())]);
        assert_eq!(c.render(), "# table: T9\nk,value\n0,5.00000000e-1\n1,\"a,b\"\n");
        let j = c.to_json();
        assert_eq!(j["rows"][0]["value"], json!(0.5));
        assert_eq!(j["meta"]["table"], json!("T9"));
    }
}
