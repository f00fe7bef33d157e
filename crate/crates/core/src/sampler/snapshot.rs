use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layer::FieldLayer;
use super::rng::RNG_SCHEME;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub spec_hash: String,
    pub spec: LatticeSpec,
    pub seed: u64,
    pub scale: usize,
    pub n_values: usize,
    pub encoding: String,
    pub rng: String,
}

/// Writes `<stem>.bin` (little-endian f64) and `<stem>.json`.
pub fn write_snapshot(layer: &FieldLayer, dir: &Path, stem: &str) -> Result<()> {
    let header = SnapshotHeader {
        spec_hash: layer.spec.canonical_hash(),
        spec: layer.spec.clone(),
        seed: layer.seed,
        scale: layer.h,
        n_values: layer.values.len(),
        encoding: "f64-le".into(),
        rng: RNG_SCHEME.into(),
    };
    std::fs::create_dir_all(dir)?;
    let mut bin = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.bin")))?);
    for v in &layer.values {
        bin.write_all(&v.to_le_bytes())?;
    }
    bin.flush()?;
    std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

pub fn read_snapshot(dir: &Path, stem: &str) -> Result<FieldLayer> {
    let header: SnapshotHeader =
        serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    let spec = header.spec.validated()?;
    if spec.canonical_hash() != header.spec_hash {
        return Err(Error::InvalidArgument("snapshot spec hash mismatch".into()));
    }
    let mut raw = Vec::new();
    std::fs::File::open(dir.join(format!("{stem}.bin")))?.read_to_end(&mut raw)?;
    if raw.len() != 8 * header.n_values {
        return Err(Error::InvalidArgument("snapshot length mismatch".into()));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(FieldLayer { h: header.scale, seed: header.seed, spec, values })
}
