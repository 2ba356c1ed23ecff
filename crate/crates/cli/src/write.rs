//! Atomic output-file writers.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Write `content` to `dir/name` via a temp file and rename, so a crashed
/// run never leaves a half-written output.
pub fn write_atomic(dir: &Path, name: &str, content: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    fs::write(&tmp, content)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Assemble a CSV from a header line and row formatter.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[f64]) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&format!("{f:.12e}"));
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
