use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

/// Writes into a temp file next to `path`, then renames it over `path`, so a
/// failed or interrupted run never leaves a truncated output behind.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> epps_core::Result<()>,
{
    let dir = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Failure::Runtime(format!("{}: {e}", path.display()));
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        w.flush().map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// Fully resolved configuration; feeding it back via `--config` repeats the run.
    pub config: Value,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputFile>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

/// Collects written files for the manifest.
pub struct OutDir {
    root: PathBuf,
    pub outputs: Vec<OutputFile>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::Runtime(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn write<F>(&mut self, name: &str, rows: usize, body: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut dyn Write) -> epps_core::Result<()>,
    {
        write_atomic(&self.root.join(name), body)?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            rows,
        });
        Ok(())
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<(), Failure> {
        manifest.outputs = self.outputs;
        manifest.finished_at = now();
        let path = self.root.join("manifest.json");
        write_atomic(&path, |w| {
            serde_json::to_writer_pretty(&mut *w, &manifest)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_write_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let r = write_atomic(&path, |w| {
            w.write_all(b"partial")?;
            Err(epps_core::Error::EmptySeries)
        });
        assert!(matches!(r, Err(Failure::Runtime(_))));
        assert!(!path.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

        write_atomic(&path, |w| Ok(w.write_all(b"ok")?)).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "ok");
    }
}
