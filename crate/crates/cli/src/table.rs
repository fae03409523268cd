//! Typed column tables written as CSV (with `#` metadata lines) or columnar JSON.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    /// NaN marks a missing value.
    Float(Vec<f64>),
    Int(Vec<i64>),
    Text(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Self::Float(v) => v.len(),
            Self::Int(v) => v.len(),
            Self::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn type_name(&self) -> &'static str {
        match self {
            Self::Float(_) => "float",
            Self::Int(_) => "int",
            Self::Text(_) => "text",
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Self::Float(v) => format_float(v[row]),
            Self::Int(v) => v[row].to_string(),
            Self::Text(v) => v[row].clone(),
        }
    }

    fn empty_of(type_name: &str) -> Option<Self> {
        match type_name {
            "float" => Some(Self::Float(Vec::new())),
            "int" => Some(Self::Int(Vec::new())),
            "text" => Some(Self::Text(Vec::new())),
            _ => None,
        }
    }

    fn push_cell(&mut self, cell: &str) -> Result<(), String> {
        match self {
            Self::Float(v) => v.push(if cell.is_empty() { f64::NAN } else { cell.parse().map_err(|_| format!("bad float {cell:?}"))? }),
            Self::Int(v) => v.push(cell.parse().map_err(|_| format!("bad integer {cell:?}"))?),
            Self::Text(v) => v.push(cell.to_string()),
        }
        Ok(())
    }
}

/// 17 significant digits; missing values are empty cells.
fn format_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    names: Vec<String>,
    columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a column; all columns must have equal length.
    pub fn with(mut self, name: &str, column: Column) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), column.len(), "column '{name}' breaks the table shape");
        }
        self.names.push(name.to_string());
        self.columns.push(column);
        self
    }

    pub fn float(self, name: &str, values: Vec<f64>) -> Self {
        self.with(name, Column::Float(values))
    }

    pub fn int(self, name: &str, values: Vec<i64>) -> Self {
        self.with(name, Column::Int(values))
    }

    pub fn text(self, name: &str, values: Vec<String>) -> Self {
        self.with(name, Column::Text(values))
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names.iter().position(|n| n == name).map(|k| &self.columns[k])
    }

    /// Appends the rows of `other`, which must have the same columns.
    pub fn append(&mut self, other: ResultTable) {
        if self.names.is_empty() {
            self.names = other.names;
            self.columns = other.columns;
            return;
        }
        assert_eq!(self.names, other.names, "appending tables with different columns");
        for (a, b) in self.columns.iter_mut().zip(other.columns) {
            match (a, b) {
                (Column::Float(x), Column::Float(y)) => x.extend(y),
                (Column::Int(x), Column::Int(y)) => x.extend(y),
                (Column::Text(x), Column::Text(y)) => x.extend(y),
                _ => panic!("appending columns of different types"),
            }
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let result = match format {
            Format::Csv => self.write_csv(&mut out),
            Format::Json => self.write_json(&mut out),
        };
        result.and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
    }

    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let types: Vec<&str> = self.columns.iter().map(Column::type_name).collect();
        writeln!(out, "# types: {}", types.join(","))?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.names)?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| c.cell(r)))?;
        }
        w.flush()
    }

    fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        let columns: Vec<Value> = self
            .names
            .iter()
            .zip(&self.columns)
            .map(|(name, c)| {
                let values = match c {
                    Column::Float(v) => json!(v.iter().map(|x| if x.is_nan() { None } else { Some(*x) }).collect::<Vec<_>>()),
                    Column::Int(v) => json!(v),
                    Column::Text(v) => json!(v),
                };
                json!({ "name": name, "type": c.type_name(), "values": values })
            })
            .collect();
        let doc = json!({ "metadata": self.metadata, "columns": columns });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }

    pub fn read(path: &Path, format: Format) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let malformed = |reason: String| CliError::Table { path: path.to_path_buf(), reason };
        match format {
            Format::Csv => Self::read_csv(BufReader::new(file)).map_err(malformed),
            Format::Json => Self::read_json(BufReader::new(file)).map_err(malformed),
        }
    }

    fn read_csv(mut input: impl BufRead) -> Result<Self, String> {
        let mut table = ResultTable::new();
        let mut types = None;
        let mut line = String::new();
        let mut rest = Vec::new();
        loop {
            line.clear();
            if input.read_line(&mut line).map_err(|e| e.to_string())? == 0 {
                break;
            }
            let Some(meta) = line.strip_prefix("# ") else {
                rest.extend_from_slice(line.as_bytes());
                break;
            };
            let (k, v) = meta.trim_end_matches('\n').split_once(": ").ok_or("metadata line without ': '")?;
            if k == "types" {
                types = Some(v.split(',').map(str::to_string).collect::<Vec<_>>());
            } else {
                table.metadata.insert(k.to_string(), v.to_string());
            }
        }
        input.read_to_end(&mut rest).map_err(|e| e.to_string())?;
        let types = types.ok_or("missing '# types:' line")?;
        let mut reader = csv::ReaderBuilder::new().from_reader(rest.as_slice());
        let names: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
        if names.len() != types.len() {
            return Err("header and type line disagree".into());
        }
        let mut columns = types
            .iter()
            .map(|t| Column::empty_of(t).ok_or(format!("unknown column type {t:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            for (c, cell) in columns.iter_mut().zip(record.iter()) {
                c.push_cell(cell)?;
            }
        }
        table.names = names;
        table.columns = columns;
        Ok(table)
    }

    fn read_json(input: impl BufRead) -> Result<Self, String> {
        let doc: Value = serde_json::from_reader(input).map_err(|e| e.to_string())?;
        let mut table = ResultTable::new();
        for (k, v) in doc["metadata"].as_object().ok_or("missing metadata")? {
            table.metadata.insert(k.clone(), v.as_str().ok_or("non-string metadata")?.to_string());
        }
        for c in doc["columns"].as_array().ok_or("missing columns")? {
            let name = c["name"].as_str().ok_or("column without name")?;
            let values = c["values"].as_array().ok_or("column without values")?;
            let column = match c["type"].as_str() {
                Some("float") => Column::Float(values.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect()),
                Some("int") => Column::Int(values.iter().map(|v| v.as_i64().ok_or("bad integer")).collect::<Result<_, _>>()?),
                Some("text") => Column::Text(
                    values.iter().map(|v| v.as_str().map(str::to_string).ok_or("bad text")).collect::<Result<_, _>>()?,
                ),
                other => return Err(format!("unknown column type {other:?}")),
            };
            table.names.push(name.to_string());
            table.columns.push(column);
        }
        Ok(table)
    }

    /// Bitwise equality of all cells and metadata; NaN equals NaN.
    pub fn same_values(&self, other: &ResultTable) -> bool {
        self.names == other.names
            && self.metadata == other.metadata
            && self.columns.iter().zip(&other.columns).all(|(a, b)| match (a, b) {
                (Column::Float(x), Column::Float(y)) => {
                    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits() || (p.is_nan() && q.is_nan()))
                }
                _ => a == b,
            })
    }
}
