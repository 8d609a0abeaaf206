//! Study output files: commented CSV tables and a JSON summary.
//!
//! CSV files open with `#`-prefixed metadata lines (schema tag, generator id,
//! seed) so a rerun with the same inputs is bitwise comparable. Floats are
//! written with Rust's shortest round-trip formatting, which is
//! deterministic. The JSON summary uses serde_json's sorted object keys; its
//! only non-reproducible field is `runtime_seconds`.

use crate::rng::GENERATOR_ID;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const SCHEMA_TAG: &str = "plmc-lab csv v1";

/// Shortest round-trip decimal form of `v` (CSV cell format).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub struct CsvFile {
    out: BufWriter<File>,
}

impl CsvFile {
    /// Creates the file and writes the schema and generator metadata lines.
    pub fn create(path: &Path, seed: u64) -> io::Result<CsvFile> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "# {SCHEMA_TAG}")?;
        writeln!(out, "# generator={GENERATOR_ID} seed={seed}")?;
        Ok(CsvFile { out })
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "# {text}")
    }

    pub fn header<S: AsRef<str>>(&mut self, columns: &[S]) -> io::Result<()> {
        let cols: Vec<&str> = columns.iter().map(|c| c.as_ref()).collect();
        writeln!(self.out, "{}", cols.join(","))
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// Output directory of one study run.
#[derive(Debug, Clone)]
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<OutputDir> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(OutputDir { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, seed: u64) -> io::Result<CsvFile> {
        CsvFile::create(&self.path(name), seed)
    }

    pub fn write_text(&self, name: &str, text: &str) -> io::Result<()> {
        std::fs::write(self.path(name), text)
    }

    /// Writes `summary.json` (pretty, sorted keys, trailing newline).
    pub fn write_summary(&self, summary: &Value) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(summary)?;
        text.push('\n');
        std::fs::write(self.path("summary.json"), text)
    }
}

/// Shared summary skeleton; studies add their results under `"results"`.
pub fn summary_base(command: &str, seed: u64, config_echo: Value) -> Value {
    json!({
        "tool": "plmc-lab",
        "schema": 1,
        "command": command,
        "generator": GENERATOR_ID,
        "seed": seed,
        "config": config_echo,
    })
}
