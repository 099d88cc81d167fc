use std::io::Write;
use std::path::{Path, PathBuf};

use motif_shap::{Error, Result, FORMAT_VERSION};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Written next to every output as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub format_version: &'static str,
    pub subcommand: &'a str,
    /// Arguments as given; rerunning `motif-shap <argv...>` reproduces the output.
    pub argv: &'a [String],
    /// Fully resolved configuration including defaults.
    pub config: &'a serde_json::Value,
    pub inputs: &'a [InputDigest],
    pub seed: Option<u64>,
    pub timestamp: String,
}

/// Tracks the inputs a command reads so every output can carry a manifest.
pub struct Context<'a> {
    pub argv: &'a [String],
    pub subcommand: &'static str,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    inputs: Vec<InputDigest>,
}

impl<'a> Context<'a> {
    pub fn new(argv: &'a [String], subcommand: &'static str, config: serde_json::Value) -> Self {
        Context {
            argv,
            subcommand,
            config,
            seed: None,
            inputs: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = motif_shap::io::read_to_string(path)?;
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    /// Atomically writes `content` to `path` followed by its manifest.
    pub fn write(&self, path: &Path, content: &str) -> Result<()> {
        write_atomic(path, content)?;
        let manifest = RunManifest {
            tool: "motif-shap",
            version: env!("CARGO_PKG_VERSION"),
            format_version: FORMAT_VERSION,
            subcommand: self.subcommand,
            argv: self.argv,
            config: &self.config,
            inputs: &self.inputs,
            seed: self.seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
        text.push('\n');
        write_atomic(&manifest_path(path), &text)
    }

    pub fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        text.push('\n');
        self.write(path, &text)
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
