//! CSV export and an on-disk binary cache for kernel tables.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::propagator::{Band, PropagatorKernel};
use super::spec::LatticeSpec;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"PHI4KRN1";

/// Writes `d0,..,d{dim-1},value` rows, one per displacement, minimal-image signed.
pub fn write_kernel_csv<T: Real>(kernel: &PropagatorKernel<T>, out: impl Write) -> Result<()> {
    let mut w = BufWriter::new(out);
    let spec = &kernel.spec;
    let header: Vec<String> = (0..spec.dim).map(|k| format!("d{k}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (i, v) in kernel.values().iter().enumerate() {
        let disp: Vec<String> = spec.signed_displacement(i).iter().map(|c| c.to_string()).collect();
        writeln!(w, "{},{:e}", disp.join(","), v.as_f64())?;
    }
    w.flush()?;
    Ok(())
}

fn band_tag(band: Band) -> String {
    match band {
        Band::Cumulative(h) => format!("cum{h}"),
        Band::Single(h) => format!("band{h}"),
    }
}

/// Directory of kernel tables keyed by the lattice hash and band.
#[derive(Clone, Debug)]
pub struct KernelCache {
    dir: PathBuf,
}

impl KernelCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, spec: &LatticeSpec, band: Band) -> PathBuf {
        self.dir.join(format!("{}-{}.bin", spec.canonical_hash(), band_tag(band)))
    }

    pub fn store<T: Real>(&self, kernel: &PropagatorKernel<T>) -> Result<PathBuf> {
        let path = self.path_for(&kernel.spec, kernel.band);
        let mut w = BufWriter::new(fs::File::create(&path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(kernel.values().len() as u64).to_le_bytes())?;
        for v in kernel.weights().iter().chain(kernel.values()) {
            w.write_all(&v.as_f64().to_le_bytes())?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn load<T: Real>(&self, spec: &LatticeSpec, band: Band) -> Result<Option<PropagatorKernel<T>>> {
        let path = self.path_for(spec, band);
        if !path.exists() {
            return Ok(None);
        }
        read_table(&path, spec, band).map(Some)
    }

    /// Loads the kernel if cached, otherwise builds and stores it.
    pub fn get_or_build<T: Real>(
        &self,
        spec: &LatticeSpec,
        band: Band,
        build: impl FnOnce() -> Result<PropagatorKernel<T>>,
    ) -> Result<PropagatorKernel<T>> {
        if let Some(k) = self.load(spec, band)? {
            return Ok(k);
        }
        let k = build()?;
        self.store(&k)?;
        Ok(k)
    }
}

fn read_table<T: Real>(path: &Path, spec: &LatticeSpec, band: Band) -> Result<PropagatorKernel<T>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = || Error::InvalidArgument(format!("corrupt kernel cache file {}", path.display()));
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad());
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if n != spec.n_sites() || bytes.len() != 16 + 16 * n {
        return Err(bad());
    }
    let nums: Vec<T> = bytes[16..]
        .chunks_exact(8)
        .map(|c| T::of(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    let (w, v) = nums.split_at(n);
    Ok(PropagatorKernel::from_parts(spec, band, w.to_vec(), v.to_vec()))
}
