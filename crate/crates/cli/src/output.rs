//! Artifact writing and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `path` through a sibling temp file and a rename, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Serializes rows as CSV with a header, '.' decimals and '\n' endings.
pub fn csv_bytes<T: Serialize>(rows: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))
}

pub fn json_bytes<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_sha256: String,
    pub code_version: String,
    pub threads: usize,
    pub tolerance_profile: String,
    pub outputs: Vec<OutputEntry>,
    pub timings: Vec<Timing>,
}

/// Collects artifacts for one run and writes them under `dir`, or only
/// records their checksums when there is no directory.
pub struct RunWriter {
    dir: Option<PathBuf>,
    outputs: Vec<OutputEntry>,
    timings: Vec<Timing>,
    clock: Instant,
}

impl RunWriter {
    pub fn new(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(RunWriter { dir: Some(dir.to_path_buf()), outputs: Vec::new(), timings: Vec::new(), clock: Instant::now() })
    }

    pub fn in_memory() -> Self {
        RunWriter { dir: None, outputs: Vec::new(), timings: Vec::new(), clock: Instant::now() }
    }

    pub fn outputs(&self) -> &[OutputEntry] {
        &self.outputs
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        if let Some(dir) = &self.dir {
            write_atomic(&dir.join(name), bytes)?;
        }
        self.outputs.push(OutputEntry { path: name.into(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> anyhow::Result<()> {
        self.write(name, &csv_bytes(rows)?)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        self.write(name, &json_bytes(value)?)
    }

    /// Records the time since the previous mark.
    pub fn mark(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(Timing { stage: stage.into(), seconds: (now - self.clock).as_secs_f64() });
        self.clock = now;
    }

    pub fn finish(self, subcommand: &str, config_json: &str, threads: usize, profile: &str) -> anyhow::Result<RunManifest> {
        let manifest = RunManifest {
            subcommand: subcommand.into(),
            config_sha256: sha256_hex(config_json.as_bytes()),
            code_version: env!("CARGO_PKG_VERSION").into(),
            threads,
            tolerance_profile: profile.into(),
            outputs: self.outputs,
            timings: self.timings,
        };
        if let Some(dir) = &self.dir {
            write_atomic(&dir.join("manifest.json"), &json_bytes(&manifest)?)?;
        }
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn csv_has_header_and_unix_newlines() {
        #[derive(Serialize)]
        struct R {
            t_s: f64,
            z: f64,
        }
        let b = csv_bytes(&[R { t_s: 0.5, z: -1.0 }]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "t_s,z\n0.5,-1.0\n");
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = RunWriter::new(dir.path()).unwrap();
        w.write("a.txt", b"hello").unwrap();
        let m = w.finish("test", "{}", 1, "strict").unwrap();
        assert_eq!(m.outputs[0].sha256, sha256_hex(b"hello"));
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        assert_eq!(names.len(), 2, "{names:?}");
        assert!(names.iter().all(|n| !n.contains(".tmp")));
    }
}
