use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Cli, CliError};

/// Everything needed to rerun a command.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    pub seed: u64,
    pub precision_bits: u32,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

pub struct Output<'a> {
    cli: &'a Cli,
    started: Instant,
}

impl<'a> Output<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        Self {
            cli,
            started: Instant::now(),
        }
    }

    /// Seconds since start, rounded to milliseconds; `None` under
    /// `--no-timing`.
    pub fn elapsed(&self) -> Option<f64> {
        if self.cli.global.no_timing {
            return None;
        }
        Some((self.started.elapsed().as_secs_f64() * 1e3).round() / 1e3)
    }

    pub fn manifest(&self) -> RunManifest {
        let flags = serde_json::to_value(self.cli).unwrap_or(Value::Null);
        let subcommand = match flags.get("command") {
            Some(Value::Object(m)) => m.keys().next().cloned(),
            Some(Value::String(s)) => Some(s.clone()),
            _ => None,
        }
        .unwrap_or_default();
        RunManifest {
            subcommand,
            flags,
            seed: self.cli.global.seed,
            precision_bits: self.cli.global.bits,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: self.elapsed(),
        }
    }

    fn write_main(&self, text: &str) -> Result<(), CliError> {
        match &self.cli.global.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// Writes a JSON report with the manifest appended under `"manifest"`.
    pub fn json(&self, report: impl Serialize) -> Result<(), CliError> {
        let mut value = serde_json::to_value(report).map_err(io_error)?;
        let manifest = serde_json::to_value(self.manifest()).map_err(io_error)?;
        match &mut value {
            Value::Object(m) => {
                m.insert("manifest".into(), manifest);
            }
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other.take());
                m.insert("manifest".into(), manifest);
                value = Value::Object(m);
            }
        }
        self.write_main(&(pretty(&value)? + "\n"))
    }

    /// Writes CSV rows under `header`. The sidecar (manifest plus `extra`)
    /// goes to `<out>.json`, or to standard error when writing to stdout.
    pub fn csv(&self, header: &str, rows: &[String], extra: Option<Value>) -> Result<(), CliError> {
        let mut text = String::with_capacity(rows.len() * 32);
        text.push_str(header);
        text.push('\n');
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        self.write_main(&text)?;

        let mut side = match extra {
            Some(Value::Object(m)) => m,
            _ => Map::new(),
        };
        side.insert(
            "manifest".into(),
            serde_json::to_value(self.manifest()).map_err(io_error)?,
        );
        let side = pretty(&Value::Object(side))? + "\n";
        match &self.cli.global.out {
            Some(path) => fs::write(sidecar_path(path), side)?,
            None => std::io::stderr().write_all(side.as_bytes())?,
        }
        Ok(())
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn pretty(v: &Value) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(io_error)
}

fn io_error(e: serde_json::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
