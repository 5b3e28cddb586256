//! CSV and provenance writers shared by the experiment pipelines.
//!
//! Every CSV starts with a `# schema: <name> v<version>` comment line followed
//! by the header row. Each output file `x.csv` gets a sibling
//! `x.csv.provenance.json` describing how it was produced.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Buffered CSV file with a schema comment and header row already written.
pub struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    pub fn create(path: impl AsRef<Path>, schema: &str, header: &[&str]) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "# schema: {schema} v{SCHEMA_VERSION}")
            .and_then(|_| writeln!(out, "{}", header.join(",")))
            .map_err(|e| Error::io(&path, e))?;
        Ok(CsvFile { path, out })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.out.write_all(b",").map_err(|e| Error::io(&self.path, e))?;
            }
            self.out
                .write_all(escape(f.as_ref()).as_bytes())
                .map_err(|e| Error::io(&self.path, e))?;
            first = false;
        }
        self.out.write_all(b"\n").map_err(|e| Error::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// Quotes a field when it contains a separator, quote or newline.
pub fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn provenance_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    output.with_file_name(name)
}

#[derive(Serialize)]
struct Provenance<'a, T: Serialize> {
    command: &'a str,
    output: String,
    tool: &'static str,
    version: &'static str,
    schema_version: u32,
    config: &'a T,
}

/// Writes the provenance record for `output` and returns its path.
pub fn write_provenance<T: Serialize>(output: &Path, command: &str, config: &T) -> Result<PathBuf> {
    let record = Provenance {
        command,
        output: output
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config,
    };
    let path = provenance_path(output);
    write_json(&path, &record)?;
    Ok(path)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
