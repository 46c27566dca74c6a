//! Run reports and their byte-stable CSV/JSON rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tropica_core::{Extended, Scalar, Subset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One table cell. Floats and rationals are carried as their rendered text.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i128),
    Bool(bool),
    Null,
}

impl Cell {
    pub fn num<T: Scalar>(x: &T) -> Cell {
        Cell::Text(x.render())
    }

    pub fn float(x: f64) -> Cell {
        Cell::Text(x.render())
    }

    pub fn ext<T: Scalar>(x: &Extended<T>) -> Cell {
        Cell::Text(x.render())
    }

    /// 1-based labels separated by spaces; `{}` for the empty set.
    pub fn set(s: &Subset) -> Cell {
        Cell::Text(set_text(s))
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn int(x: impl Into<i128>) -> Cell {
        Cell::Int(x.into())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Text(s) => csv_escape(s),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn set_text(s: &Subset) -> String {
    if s.is_empty() {
        "{}".to_string()
    } else {
        s.to_labels().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::to_csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Canonical record of what a run consumed; hashed into the report.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    entries: BTreeMap<String, String>,
}

impl Inputs {
    pub fn add(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(k.as_bytes());
            h.update([0]);
            h.update(v.as_bytes());
            h.update([0]);
        }
        h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub subcommand: String,
    pub inputs_digest: String,
    /// The first table is the primary one (CSV `--out` target).
    pub tables: Vec<(String, Table)>,
    pub assertions: Vec<Assertion>,
}

impl RunReport {
    pub fn new(subcommand: &str, inputs: &Inputs) -> Self {
        RunReport {
            subcommand: subcommand.to_string(),
            inputs_digest: inputs.digest(),
            tables: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.push((name.to_string(), table));
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion { name: name.into(), pass, detail: detail.into() });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    fn assertion_table(&self) -> Table {
        let mut t = Table::new(&["name", "pass", "detail"]);
        for a in &self.assertions {
            t.push(vec![Cell::text(&a.name), a.pass.into(), Cell::text(&a.detail)]);
        }
        t
    }

    pub fn to_json(&self) -> String {
        let tables: serde_json::Map<String, Value> =
            self.tables.iter().map(|(name, t)| (name.clone(), t.to_json())).collect();
        let assertions: Vec<Value> = self
            .assertions
            .iter()
            .map(|a| json!({"name": a.name, "pass": a.pass, "detail": a.detail}))
            .collect();
        let v = json!({
            "version": tropica_core::schema::SCHEMA_VERSION,
            "subcommand": self.subcommand,
            "inputs_digest": self.inputs_digest,
            "tables": tables,
            "assertions": assertions,
        });
        // serde_json's default map is a BTreeMap, so keys come out sorted.
        let mut out = serde_json::to_string_pretty(&v).expect("report serialises");
        out.push('\n');
        out
    }

    /// Every table as `# name` followed by its CSV body, separated by blank lines.
    pub fn to_csv_stream(&self) -> String {
        let mut parts: Vec<String> =
            self.tables.iter().map(|(name, t)| format!("# {name}\n{}", t.to_csv())).collect();
        parts.push(format!("# assertions\n{}", self.assertion_table().to_csv()));
        parts.join("\n")
    }

    /// Writes the report and returns the paths written.
    ///
    /// CSV: the primary table goes to `path`, every other table to
    /// `<stem>.<table>.csv`, and the assertions to `<stem>.assertions.csv`.
    pub fn emit(&self, format: Format, path: &Path) -> Result<Vec<PathBuf>> {
        let mut files: Vec<(PathBuf, String)> = Vec::new();
        match format {
            Format::Json => files.push((path.to_path_buf(), self.to_json())),
            Format::Csv => {
                let stem = path.with_extension("");
                let sibling = |name: &str| PathBuf::from(format!("{}.{name}.csv", stem.display()));
                let mut tables = self.tables.iter();
                if let Some((_, primary)) = tables.next() {
                    files.push((path.to_path_buf(), primary.to_csv()));
                }
                for (name, t) in tables {
                    files.push((sibling(name), t.to_csv()));
                }
                files.push((sibling("assertions"), self.assertion_table().to_csv()));
            }
        }
        for (p, body) in &files {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, body).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
