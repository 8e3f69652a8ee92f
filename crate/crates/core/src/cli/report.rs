use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// JSON envelope written by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    /// Arguments as given, minus the thread count (results do not depend on it).
    pub command: Vec<String>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
    pub result: Value,
    pub artifacts: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: Option<u64>, result: Value) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            timing_ms: None,
            result,
            artifacts: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, out: Option<&Path>) -> Result<()> {
        let text = self.to_json();
        match out {
            Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            }),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                // A closed pipe is not worth an error exit.
                let _ = stdout.write_all(text.as_bytes());
                Ok(())
            }
        }
    }
}

/// Echo of the arguments after the program name with `--threads` removed.
pub fn command_echo(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--threads" {
            it.next();
        } else if !a.starts_with("--threads=") {
            out.push(a);
        }
    }
    out
}
