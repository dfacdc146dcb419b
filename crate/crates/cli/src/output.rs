use std::io::Write;
use std::path::{Path, PathBuf};

use hscaler::CodeUnits;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Output directory of one run. Every CSV gets a `.meta.json` sidecar.
pub struct OutputDir {
    root: PathBuf,
    command: &'static str,
    config_sha256: String,
    seed: Option<u64>,
    units: CodeUnits,
    quiet: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Shortest round-trip scientific notation.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

impl OutputDir {
    pub fn new(
        root: PathBuf,
        command: &'static str,
        config_bytes: &[u8],
        seed: Option<u64>,
        units: CodeUnits,
        quiet: bool,
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(&root).map_err(|source| CliError::Io { path: root.clone(), source })?;
        Ok(OutputDir { root, command, config_sha256: sha256_hex(config_bytes), seed, units, quiet })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn log(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn atomic_write(&self, rel: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(rel);
        let dir = path.parent().unwrap_or(&self.root).to_path_buf();
        let io = |source| CliError::Io { path: path.clone(), source };
        std::fs::create_dir_all(&dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
        tmp.write_all(bytes).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(&path).map_err(|e| io(e.error))?;
        Ok(path)
    }

    pub fn write_json(&self, rel: &str, value: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        self.atomic_write(rel, text.as_bytes())
    }

    /// Writes `rel` with a header row and its sidecar `rel.meta.json`, which
    /// merges `extra` into the common metadata.
    pub fn write_csv<I>(&self, rel: &str, header: &[&str], rows: I, extra: Value) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut n_rows = 0usize;
        let csv_err = |e: csv::Error| CliError::Io { path: self.root.join(rel), source: e.into() };
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
            n_rows += 1;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io { path: self.root.join(rel), source: e.into_error() })?;
        let path = self.atomic_write(rel, &bytes)?;

        let mut meta = json!({
            "file": rel,
            "command": self.command,
            "config_sha256": self.config_sha256,
            "columns": header,
            "rows": n_rows,
            "units": self.units_json(),
        });
        if let Some(seed) = self.seed {
            meta["seed"] = json!(seed);
        }
        if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
            m.extend(e);
        }
        self.write_json(&format!("{rel}.meta.json"), &meta)?;
        Ok(path)
    }

    fn units_json(&self) -> Value {
        let u = &self.units;
        json!({
            "physical": "t, q, p, omega2 in the units of the spec (mass, hbar, t_f)",
            "code": "s = t/t_f, Q = q/l, P = p l/hbar, Omega^2 = t_f^2 omega^2, with l = sqrt(hbar t_f/m)",
            "mass": u.mass,
            "hbar": u.hbar,
            "t_f": u.t_f,
            "length_unit_l": u.length(),
            "momentum_unit": u.momentum(),
        })
    }
}
