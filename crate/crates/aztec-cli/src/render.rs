use crate::config::{CliError, CliResult, Format, RunConfig};
use aztec::numerics::{rational_to_string, to_f64, GaussianRational, Matrix, Rational};
use aztec::weights::Coord;
use serde_json::{json, Value};
use std::io::Write;

/// Exact strings by default, rounded decimals with `--float`.
#[derive(Clone, Copy, Debug)]
pub struct Renderer {
    pub float: bool,
    pub precision: usize,
}

impl Renderer {
    pub fn new(cfg: &RunConfig) -> Self {
        Renderer { float: cfg.common.float, precision: cfg.common.precision }
    }

    pub fn float(&self, v: f64) -> Value {
        let rounded: f64 = format!("{:.*e}", self.precision, v).parse().unwrap_or(v);
        json!(rounded)
    }

    pub fn rational(&self, r: &Rational) -> Value {
        if self.float {
            self.float(to_f64(r))
        } else {
            json!(rational_to_string(r))
        }
    }

    pub fn gaussian(&self, g: &GaussianRational) -> Value {
        if !self.float {
            return json!(g.to_string());
        }
        if g.is_real() {
            self.rational(&g.re)
        } else {
            json!({ "re": self.rational(&g.re), "im": self.rational(&g.im) })
        }
    }

    pub fn cell(&self, v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Object(m) => format!("{}{:+}i", m["re"], m["im"].as_f64().unwrap_or(f64::NAN)),
            other => other.to_string(),
        }
    }

    pub fn matrix<T>(&self, m: &Matrix<T>, f: impl Fn(&T) -> Value) -> Vec<Vec<Value>>
    where
        T: aztec::numerics::Field,
    {
        m.to_rows().iter().map(|r| r.iter().map(&f).collect()).collect()
    }

    pub fn labeled<T>(&self, m: &Matrix<T>, rows: &[Coord], cols: &[Coord], f: impl Fn(&T) -> Value) -> Value
    where
        T: aztec::numerics::Field,
    {
        json!({ "rows": rows, "cols": cols, "entries": self.matrix(m, f) })
    }

    /// Table form of a labeled matrix: one line per row label.
    pub fn labeled_table<T>(&self, m: &Matrix<T>, rows: &[Coord], cols: &[Coord], f: impl Fn(&T) -> Value) -> Table
    where
        T: aztec::numerics::Field,
    {
        let lab = |c: &Coord| format!("({},{})", c.0, c.1);
        let mut header = vec![String::new()];
        header.extend(cols.iter().map(lab));
        let body = rows
            .iter()
            .zip(self.matrix(m, f))
            .map(|(r, vals)| std::iter::once(lab(r)).chain(vals.iter().map(|v| self.cell(v))).collect())
            .collect();
        Table { header, rows: body }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io { path: None, message: e.to_string() };
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io { path: None, message: e.to_string() })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// What a command produces: the JSON result and its tabular form.
pub struct Artifact {
    pub result: Value,
    pub table: Table,
}

pub fn manifest(cfg: &RunConfig) -> Value {
    let mut m = serde_json::to_value(cfg).expect("serializable config");
    m["tool"] = json!({ "name": "aztec", "version": env!("CARGO_PKG_VERSION") });
    m
}

/// Writes the artifact to `--out` or stdout. CSV output puts the manifest
/// next to the file, or on stderr when writing to stdout.
pub fn emit(cfg: &RunConfig, art: &Artifact) -> CliResult<()> {
    let manifest = manifest(cfg);
    let (body, side) = match cfg.common.format {
        Format::Json => {
            let v = json!({ "manifest": manifest, "result": art.result });
            (serde_json::to_string_pretty(&v).expect("serializable") + "\n", None)
        }
        Format::Csv => (art.table.to_csv()?, Some(serde_json::to_string_pretty(&manifest).expect("serializable") + "\n")),
    };
    match &cfg.common.out {
        Some(path) => {
            let io = |e: std::io::Error, p: &std::path::Path| CliError::Io { path: Some(p.to_path_buf()), message: e.to_string() };
            std::fs::write(path, body).map_err(|e| io(e, path))?;
            if let Some(m) = side {
                let mut name = path.as_os_str().to_owned();
                name.push(".manifest.json");
                let mp = std::path::PathBuf::from(name);
                std::fs::write(&mp, m).map_err(|e| io(e, &mp))?;
            }
        }
        None => {
            let io = |e: std::io::Error| CliError::Io { path: None, message: e.to_string() };
            std::io::stdout().lock().write_all(body.as_bytes()).map_err(io)?;
            if let Some(m) = side {
                std::io::stderr().lock().write_all(m.as_bytes()).map_err(io)?;
            }
        }
    }
    Ok(())
}
