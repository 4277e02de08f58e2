use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::Manifest;

/// Parsed config plus the provenance written at the top of every output.
pub struct Resolved<C> {
    pub config: C,
    pub hash: String,
    /// Directory relative paths inside the config resolve against.
    pub base: PathBuf,
}

impl<C: Serialize> Resolved<C> {
    fn new(config: C, base: PathBuf) -> Result<Self, CliError> {
        // hash the config with every default filled in, so equivalent files agree
        let canonical = serde_json::to_vec(&config).map_err(|e| CliError::Config(e.to_string()))?;
        let hash = format!("{:x}", Sha256::digest(&canonical));
        Ok(Self { config, hash, base })
    }

    pub fn header(&self, command: &str, seed: u64) -> Vec<String> {
        vec![
            format!("layersep {} {command}", env!("CARGO_PKG_VERSION")),
            format!("config_sha256 {}", self.hash),
            format!("seed {seed}"),
        ]
    }
}

pub fn load<C: Serialize + DeserializeOwned>(m: &Manifest) -> Result<Resolved<C>, CliError> {
    let path = m
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <path> is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let config = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Resolved::new(config, base)
}

/// Like [`load`], falling back to `C::default()` without `--config`.
pub fn load_or_default<C: Serialize + DeserializeOwned + Default>(m: &Manifest) -> Result<Resolved<C>, CliError> {
    match m.config {
        Some(_) => load(m),
        None => Resolved::new(C::default(), PathBuf::from(".")),
    }
}

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let f = fs::File::create(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

/// Writes `value` as pretty JSON with the header under a `"provenance"` key.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, header: &[String], value: &T) -> Result<(), CliError> {
    let mut doc = serde_json::to_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    if let serde_json::Value::Object(map) = &mut doc {
        map.insert("provenance".into(), serde_json::json!(header));
    }
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| CliError::Config(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Round-trip formatting used in every CSV cell.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}
