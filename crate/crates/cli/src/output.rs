use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use spherewave_core::io::write_table;

/// Where a command's result goes: a file (paired with a manifest) or stdout.
pub struct Sink {
    path: Option<PathBuf>,
    pub json: bool,
}

impl Sink {
    pub fn new(out: &str, json: bool) -> Self {
        Self { path: if out == "-" { None } else { Some(PathBuf::from(out)) }, json }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.path {
            None => Box::new(BufWriter::new(io::stdout().lock())),
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
        })
    }

    /// CSV table, or an array of row objects under `--json`.
    pub fn table(&self, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut w = self.writer()?;
        if self.json {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().map(|h| h.to_string()).zip(r.iter().map(|v| json_number(*v))).collect())
                .collect();
            serde_json::to_writer_pretty(&mut w, &objs)?;
            writeln!(w)?;
        } else {
            write_table(&mut w, header, rows)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn value<T: Serialize>(&self, v: &T) -> Result<()> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, v)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'a str,
    pub params: serde_json::Value,
    pub seed: u64,
    pub version: &'static str,
    pub wall_seconds: f64,
}

/// Writes `<output>.manifest.json` next to a file output; stdout outputs
/// have no manifest.
pub fn write_manifest<P: Serialize>(sink: &Sink, subcommand: &str, params: &P, seed: u64, start: Instant) -> Result<()> {
    let Some(path) = sink.path() else { return Ok(()) };
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    let manifest = RunManifest {
        subcommand,
        params: serde_json::to_value(params)?,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let f = File::create(&name).with_context(|| format!("cannot create {}", PathBuf::from(&name).display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
