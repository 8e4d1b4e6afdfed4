//! Row-oriented command output and its CSV / JSON encodings.

use std::io::{Read, Write};

use serde_json::{Map, Number, Value};

use crate::CliError;

/// Bumped whenever a column is renamed, removed or reordered.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Replaces the row encoding in JSON output when set.
    pub json: Option<Value>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self::from_columns(command, columns.iter().map(|c| c.to_string()).collect())
    }

    pub fn from_columns(command: &str, columns: Vec<String>) -> Self {
        Table {
            schema: format!("orientcov/{command}/v{SCHEMA_VERSION}"),
            columns,
            rows: Vec::new(),
            json: None,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// `# schema=...` line, header row, data rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        writeln!(out, "# schema={}", self.schema)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let body = match &self.json {
            Some(v) => v.clone(),
            None => Value::Array(
                self.rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .cloned()
                            .zip(row.iter().map(|c| cell(c)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect(),
            ),
        };
        let mut top = Map::new();
        top.insert("schema".into(), Value::String(self.schema.clone()));
        top.insert("rows".into(), body);
        Value::Object(top)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(std::io::Error::from)?;
        writeln!(out)?;
        Ok(())
    }

    /// Parses the CSV produced by [`Table::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Table, CliError> {
        let mut text = String::new();
        std::io::BufReader::new(input).read_to_string(&mut text)?;
        let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
        let schema = first
            .strip_prefix("# schema=")
            .ok_or_else(|| CliError::Usage("missing schema line".into()))?
            .trim()
            .to_string();
        let mut r = csv::Reader::from_reader(rest.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Table {
            schema,
            columns,
            rows,
            json: None,
        })
    }
}

/// Integers and plain decimals become JSON numbers; fractions stay strings.
fn cell(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = s.parse::<i64>() {
        return Value::Number(i.into());
    }
    if let Ok(b) = s.parse::<bool>() {
        return Value::Bool(b);
    }
    match s.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) if !s.contains('/') => Value::Number(n),
        _ => Value::String(s.to_string()),
    }
}
