//! Eigendecompositions stored as little-endian binaries keyed by a model hash.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use ethspec::linalg::Spectrum;
use faer::Mat;
use sha2::{Digest, Sha256};

use crate::error::CliError;

const MAGIC: &[u8; 8] = b"ETHSPEC1";

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: Option<PathBuf>,
}

impl SpectrumCache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.spec", sha256_hex(key))))
    }

    /// Cached spectrum for `key`, or `compute()` stored under it.
    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<Spectrum, CliError>,
    ) -> Result<Spectrum, CliError> {
        let Some(path) = self.path(key) else {
            return compute();
        };
        if path.exists() {
            if let Ok(s) = read_spectrum(&path) {
                return Ok(s);
            }
        }
        let spectrum = compute()?;
        let dir = path.parent().expect("cache file has a parent");
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        // write then rename so readers never see a partial file
        let tmp = path.with_extension("tmp");
        write_spectrum(&tmp, &spectrum)?;
        std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
        Ok(spectrum)
    }
}

fn write_spectrum(path: &Path, s: &Spectrum) -> Result<(), CliError> {
    let io = |e| CliError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    out.write_all(MAGIC).map_err(io)?;
    out.write_all(&(s.dim() as u64).to_le_bytes()).map_err(io)?;
    for v in s.evals() {
        out.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    let u = s.evecs();
    for j in 0..s.dim() {
        for v in u.col(j).iter() {
            out.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

fn read_spectrum(path: &Path) -> Result<Spectrum, CliError> {
    let io = |e| CliError::io(path, e);
    let mut input = BufReader::new(File::open(path).map_err(io)?);
    let mut head = [0u8; 16];
    input.read_exact(&mut head).map_err(io)?;
    if &head[..8] != MAGIC {
        return Err(CliError::Table { path: path.to_path_buf(), reason: "not a spectrum cache file".into() });
    }
    let n = u64::from_le_bytes(head[8..].try_into().expect("8 bytes")) as usize;
    let mut buf = [0u8; 8];
    let mut next = || -> Result<f64, CliError> {
        input.read_exact(&mut buf).map_err(io)?;
        Ok(f64::from_le_bytes(buf))
    };
    let evals = (0..n).map(|_| next()).collect::<Result<Vec<_>, _>>()?;
    let mut evecs = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            evecs[(i, j)] = next()?;
        }
    }
    Spectrum::from_parts(evals, evecs).map_err(CliError::from)
}
