use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Collects output files under one directory. In dry-run mode nothing is written.
pub struct Outputs {
    dir: PathBuf,
    dry_run: bool,
}

impl Outputs {
    pub fn new(dir: &Path, dry_run: bool) -> Self {
        Self {
            dir: dir.to_path_buf(),
            dry_run,
        }
    }

    pub fn text(&self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if self.dry_run {
            println!("dry run: would write {}", path.display());
            return Ok(());
        }
        fs::create_dir_all(&self.dir)
            .and_then(|()| fs::write(&path, content))
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.text(name, &to_json(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize") + "\n"
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_slice(&read_file(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
