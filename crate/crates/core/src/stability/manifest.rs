use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sampler::rng::RNG_SCHEME;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to rerun a command: arguments, resolved configuration,
/// lattice hash and versions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub spec_hash: Option<String>,
    pub crate_version: String,
    pub rng_scheme: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, args: Vec<String>, config: serde_json::Value, spec_hash: Option<String>) -> Self {
        Self {
            command: command.into(),
            args,
            config,
            spec_hash,
            crate_version: env!("CARGO_PKG_VERSION").into(),
            rng_scheme: RNG_SCHEME.into(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join(MANIFEST_FILE))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}
