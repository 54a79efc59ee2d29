//! Text reports with a JSON mirror, and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value as Json};

use crate::error::CliError;

/// Scientific notation used in every text artifact.
pub fn e12(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.12e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Nums(Vec<f64>),
    Missing,
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Num(v) => e12(*v),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Nums(v) => v.iter().map(|x| e12(*x)).collect::<Vec<_>>().join(" "),
            Value::Missing => "none".to_string(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(v) => json!(v),
            Value::Int(v) => json!(v),
            Value::Text(s) => json!(s),
            Value::Bool(b) => json!(b),
            Value::Nums(v) => json!(v),
            Value::Missing => Json::Null,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Missing, Value::Num)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A mathematical condition or hypothesis fails.
    Fails,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, Value)>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Section { name: name.to_string(), entries: Vec::new() }
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }
}

/// A report: command, resolved configuration and result sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: String,
    pub status: Status,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str, config: String) -> Self {
        Report { command: command.to_string(), config, status: Status::Ok, sections: Vec::new() }
    }

    pub fn section(&mut self, name: &str) -> &mut Section {
        self.sections.push(Section::new(name));
        self.sections.last_mut().unwrap()
    }

    pub fn fail(&mut self) {
        self.status = Status::Fails;
    }

    fn status_name(&self) -> &'static str {
        match self.status {
            Status::Ok => "ok",
            Status::Fails => "fails",
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("flatsol report\ncommand = {}\nstatus = {}\n\n[config]\n", self.command, self.status_name());
        s.push_str(&self.config);
        for sec in &self.sections {
            s.push_str(&format!("\n[{}]\n", sec.name));
            for (k, v) in &sec.entries {
                s.push_str(&format!("{k} = {}\n", v.text()));
            }
        }
        s
    }

    pub fn to_json(&self) -> Json {
        let mut sections = Map::new();
        for sec in &self.sections {
            let body: Map<String, Json> = sec.entries.iter().map(|(k, v)| (k.clone(), v.json())).collect();
            sections.insert(sec.name.clone(), Json::Object(body));
        }
        json!({
            "command": self.command,
            "status": self.status_name(),
            "config": self.config,
            "sections": sections,
        })
    }

    /// Writes `<stem>.report` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, CliError> {
        let text = dir.join(format!("{stem}.report"));
        write_file(&text, &self.to_text())?;
        let js = dir.join(format!("{stem}.json"));
        let mut body = serde_json::to_string_pretty(&self.to_json()).expect("report values serialise");
        body.push('\n');
        write_file(&js, &body)?;
        Ok(vec![text, js])
    }
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes a CSV with a header row; numbers use [`e12`].
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(Cell::text).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    write_file(path, &s)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => e12(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn nums(v: &[f64]) -> Vec<Cell> {
    v.iter().map(|x| Cell::Num(*x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_fixed() {
        assert_eq!(e12(1.0), "1.000000000000e0");
        assert_eq!(e12(-0.5), "-5.000000000000e-1");
        assert_eq!(e12(f64::NAN), "nan");
    }

    #[test]
    fn text_and_json_carry_the_same_entries() {
        let mut r = Report::new("check", "rho = 0.1\n".to_string());
        r.section("conditions").put("balance", "holds").put("margin", 0.25).put("r0", None::<f64>);
        r.fail();
        let t = r.to_text();
        assert!(t.contains("status = fails"));
        assert!(t.contains("[config]\nrho = 0.1\n"));
        assert!(t.contains("margin = 2.500000000000e-1"));
        assert!(t.contains("r0 = none"));
        let j = r.to_json();
        assert_eq!(j["sections"]["conditions"]["margin"], json!(0.25));
        assert_eq!(j["sections"]["conditions"]["r0"], Json::Null);
        assert_eq!(j["status"], json!("fails"));
    }
}
