//! CSV and metadata-sidecar writing.
//!
//! Complex values are always split into `re_*` / `im_*` columns, floats are
//! printed in shortest round-trip form, and rows are emitted in input order,
//! so identical inputs produce byte-identical files regardless of the worker
//! count. The sidecar lives next to the CSV as `<out>.meta.json` and carries
//! the resolved configuration, solver parameters, timings and every warning
//! the numerical layers raised.

use num_complex::Complex64;
use rectroom::types::Admittance;
use rectroom::{Config, RoomSpec, SolverParams};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct CsvDoc {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

pub fn complex_cols(v: Complex64) -> [String; 2] {
    [fmt_f64(v.re), fmt_f64(v.im)]
}

/// Destination for a document: a file plus sidecar, or stdout.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Self { out }
    }

    pub fn write(&self, csv: &CsvDoc, sidecar: &Sidecar) -> std::io::Result<()> {
        let body = csv.to_string();
        match &self.out {
            Some(path) => {
                std::fs::write(path, body)?;
                let meta = path.with_extension(match path.extension() {
                    Some(e) => format!("{}.meta.json", e.to_string_lossy()),
                    None => "meta.json".into(),
                });
                std::fs::write(&meta, sidecar.to_json_string())?;
            }
            None => {
                std::io::stdout().write_all(body.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// Metadata accumulated during a run.
pub struct Sidecar {
    fields: Map<String, Value>,
    warnings: Vec<String>,
    started: std::time::Instant,
}

impl Sidecar {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        Self {
            fields,
            warnings: Vec::new(),
            started: std::time::Instant::now(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn warn_all(&mut self, warnings: &[String]) {
        self.warnings.extend_from_slice(warnings);
    }

    pub fn record_config(&mut self, path: &Path, config: &Config) {
        self.set("config_path", json!(path.display().to_string()));
        self.set("config", room_json(&config.room));
        self.set("solver_params", params_json(&config.params));
        self.set(
            "room_hash",
            json!(format!("{:016x}", rectroom::greens::room_hash(&config.room))),
        );
    }

    pub fn to_json_string(&self) -> String {
        let mut fields = self.fields.clone();
        fields.insert("warnings".into(), json!(self.warnings));
        fields.insert(
            "elapsed_ms".into(),
            json!(self.started.elapsed().as_millis() as u64),
        );
        serde_json::to_string_pretty(&Value::Object(fields)).expect("serializable")
    }
}

fn admittance_json(adm: &Admittance) -> Value {
    match adm {
        Admittance::Constant(b) => json!({ "beta": [b.re, b.im] }),
        Admittance::Table(t) => {
            let rows = t.rows();
            json!({
                "table_rows": rows.len(),
                "f_min_hz": rows[0].0,
                "f_max_hz": rows[rows.len() - 1].0,
            })
        }
    }
}

pub fn room_json(room: &RoomSpec) -> Value {
    json!({
        "speed_of_sound": room.speed_of_sound,
        "axes": room
            .axes
            .iter()
            .map(|a| {
                json!({
                    "length": a.length,
                    "beta_minus": admittance_json(&a.beta_minus),
                    "beta_plus": admittance_json(&a.beta_plus),
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn params_json(p: &SolverParams) -> Value {
    json!({
        "n_max": p.n_max,
        "n_newton": p.n_newton,
        "alpha_newton": p.alpha_newton,
        "eps_newton": p.eps_newton,
        "dedup_tol": p.dedup_tol,
        "zero_tol": p.zero_tol,
    })
}
