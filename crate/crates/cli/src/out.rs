use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use selfsim_core::{Error, Result};

/// Values of one output record.
#[derive(Debug, Clone)]
pub enum V {
    I(i128),
    F(f64),
    S(String),
}

impl V {
    fn table(&self) -> String {
        match self {
            V::I(i) => i.to_string(),
            V::F(f) => format!("{f:.6}"),
            V::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            V::I(i) => i64::try_from(*i).map(Value::from).unwrap_or_else(|_| Value::String(i.to_string())),
            V::F(f) => serde_json::Number::from_f64(*f).map(Value::Number).unwrap_or(Value::Null),
            V::S(s) => Value::String(s.clone()),
        }
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(impl From<$t> for V { fn from(v: $t) -> V { V::I(v as i128) } })*};
}
from_int!(u8, u32, u64, usize, i64, u128);

impl From<f64> for V {
    fn from(v: f64) -> V {
        V::F(v)
    }
}

impl From<&str> for V {
    fn from(v: &str) -> V {
        V::S(v.to_string())
    }
}

impl From<String> for V {
    fn from(v: String) -> V {
        V::S(v)
    }
}

impl From<bool> for V {
    fn from(v: bool) -> V {
        V::S(if v { "true" } else { "false" }.into())
    }
}

/// Collected stdout. Table mode: `label v1 v2 …` per fact, headed columns for
/// tables. Record mode: one JSON object per line.
pub struct Out {
    records: bool,
    text: String,
    header: Option<(String, Vec<String>)>,
}

impl Out {
    pub fn new(records: bool) -> Out {
        Out { records, text: String::new(), header: None }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn fact(&mut self, label: &str, fields: &[(&str, V)]) {
        if self.records {
            let mut m = Map::new();
            m.insert("record".into(), Value::String(label.into()));
            for (k, v) in fields {
                m.insert((*k).into(), v.json());
            }
            let _ = writeln!(self.text, "{}", Value::Object(m));
        } else {
            let vals: Vec<String> = fields.iter().map(|(_, v)| v.table()).collect();
            if vals.is_empty() {
                let _ = writeln!(self.text, "{label}");
            } else {
                let _ = writeln!(self.text, "{label} {}", vals.join(" "));
            }
        }
    }

    /// Starts a table; the header is printed in table mode only.
    pub fn table(&mut self, name: &str, columns: &[&str]) {
        let cols: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        if !self.records {
            let _ = writeln!(self.text, "{}", cols.join(" "));
        }
        self.header = Some((name.to_string(), cols));
    }

    pub fn row(&mut self, values: Vec<V>) {
        let (name, cols) = self.header.clone().expect("row outside a table");
        if self.records {
            let mut m = Map::new();
            m.insert("record".into(), Value::String(name));
            for (c, v) in cols.iter().zip(&values) {
                m.insert(c.clone(), v.json());
            }
            let _ = writeln!(self.text, "{}", Value::Object(m));
        } else {
            let vals: Vec<String> = values.iter().map(V::table).collect();
            let _ = writeln!(self.text, "{}", vals.join(" "));
        }
    }

    /// Raw block (patches, tile sets); in record mode wrapped as a string.
    pub fn block(&mut self, label: &str, body: &str) {
        if self.records {
            let _ = writeln!(self.text, "{}", json!({ "record": label, "text": body }));
        } else {
            self.text.push_str(body);
            if !body.ends_with('\n') {
                self.text.push('\n');
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Settings shared by all subcommands, plus the inputs read so far.
pub struct Run {
    pub budget: Option<u64>,
    pub seed: u64,
    pub jobs: usize,
    pub inputs: Vec<InputDigest>,
}

impl Run {
    pub fn budget_or(&self, default: u64) -> u64 {
        self.budget.unwrap_or(default)
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|_| Error::Input(format!("{} is not UTF-8", path.display())))
    }

    pub fn write(&self, path: &Path, text: &str) -> Result<()> {
        std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Serialize)]
pub struct Manifest {
    subcommand: String,
    parameters: Value,
    inputs: Vec<InputDigest>,
    budget: Option<u64>,
    seed: u64,
    jobs: usize,
    exit_code: u8,
    summary: String,
    output_sha256: String,
}

impl Manifest {
    pub fn new(name: &str, params: &impl Serialize, run: &Run, code: u8, summary: String, output: &str) -> Manifest {
        Manifest {
            subcommand: name.to_string(),
            parameters: serde_json::to_value(params).unwrap_or(Value::Null),
            inputs: run.inputs.clone(),
            budget: run.budget,
            seed: run.seed,
            jobs: run.jobs,
            exit_code: code,
            summary,
            output_sha256: hex::encode(Sha256::digest(output.as_bytes())),
        }
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut s = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        s.push('\n');
        std::fs::write(path, s)
    }
}
