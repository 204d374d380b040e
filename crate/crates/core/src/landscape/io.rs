//! Binary landscape files (`.nkl`).
//!
//! Layout, little-endian throughout:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `NKLS` |
//! | 2 | format version (`1`) |
//! | 2 | `n` |
//! | 2 | `k` |
//! | 8 | generation seed |
//! | 4 | generator id ([`crate::rng::GENERATOR_ID`]) |
//! | 8·N·2^(K+1) | contribution tables as `f64`, site-major |
//! | 4 | CRC-32 (IEEE) of the table bytes |
//!
//! Tables are stored explicitly so a file can be consumed without
//! reproducing the generator.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::NkLandscape;
use crate::error::{Error, Result};
use crate::rng::GENERATOR_ID;

pub const MAGIC: [u8; 4] = *b"NKLS";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 22;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("not a landscape file (magic {found:?})")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported landscape format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u16, supported: u16 },

    #[error("truncated landscape file: expected {expected} bytes of {section}, found {found}")]
    Truncated {
        section: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("unexpected data after checksum")]
    TrailingData,

    #[error("invalid landscape contents: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Header fields of a landscape file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FileHeader {
    pub version: u16,
    pub n: u16,
    pub k: u16,
    pub seed: u64,
    pub generator_id: u32,
}

pub fn save_landscape<W: Write>(l: &NkLandscape, mut sink: W) -> io::Result<()> {
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    header.extend_from_slice(&(l.n() as u16).to_le_bytes());
    header.extend_from_slice(&(l.k() as u16).to_le_bytes());
    header.extend_from_slice(&l.seed().to_le_bytes());
    header.extend_from_slice(&GENERATOR_ID.to_le_bytes());
    sink.write_all(&header)?;

    let mut payload = Vec::with_capacity(l.tables().len() * 8);
    for v in l.tables() {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    sink.write_all(&payload)?;
    sink.write_all(&crc32fast::hash(&payload).to_le_bytes())?;
    sink.flush()
}

/// Fill `buf` as far as the source allows; returns bytes read.
fn read_up_to<R: Read>(source: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match source.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(read) => filled += read,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

fn read_exact_section<R: Read>(source: &mut R, len: usize, section: &'static str) -> Result<Vec<u8>, LoadError> {
    let mut buf = vec![0u8; len];
    let found = read_up_to(source, &mut buf)?;
    if found < len {
        return Err(LoadError::Truncated {
            section,
            expected: len,
            found,
        });
    }
    Ok(buf)
}

pub fn read_header<R: Read>(source: &mut R) -> Result<FileHeader, LoadError> {
    let mut magic = [0u8; 4];
    let found = read_up_to(source, &mut magic)?;
    if found < 4 {
        return Err(LoadError::Truncated {
            section: "header",
            expected: HEADER_LEN,
            found,
        });
    }
    if magic != MAGIC {
        return Err(LoadError::BadMagic { found: magic });
    }
    let rest = read_exact_section(source, HEADER_LEN - 4, "header")?;
    let u16_at = |i: usize| u16::from_le_bytes([rest[i], rest[i + 1]]);
    let header = FileHeader {
        version: u16_at(0),
        n: u16_at(2),
        k: u16_at(4),
        seed: u64::from_le_bytes(rest[6..14].try_into().unwrap()),
        generator_id: u32::from_le_bytes(rest[14..18].try_into().unwrap()),
    };
    if header.version != FORMAT_VERSION {
        return Err(LoadError::UnsupportedVersion {
            found: header.version,
            supported: FORMAT_VERSION,
        });
    }
    Ok(header)
}

/// Read a landscape. Nothing is returned unless the whole file validates.
pub fn load_landscape<R: Read>(mut source: R) -> Result<NkLandscape, LoadError> {
    let header = read_header(&mut source)?;
    let (n, k) = (header.n as usize, header.k as usize);
    if k >= n || k > 20 {
        return Err(LoadError::Invalid(format!("bad dimensions n={n}, k={k}")));
    }
    let entries = n << (k + 1);
    let payload = read_exact_section(&mut source, entries * 8, "tables")?;
    let footer = read_exact_section(&mut source, 4, "checksum")?;
    let stored = u32::from_le_bytes(footer[..].try_into().unwrap());
    let computed = crc32fast::hash(&payload);
    if stored != computed {
        return Err(LoadError::Checksum { stored, computed });
    }
    let mut extra = [0u8; 1];
    if read_up_to(&mut source, &mut extra)? != 0 {
        return Err(LoadError::TrailingData);
    }

    let tables: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    NkLandscape::from_tables(n, k, header.seed, tables).map_err(|e| LoadError::Invalid(e.to_string()))
}

pub fn save_to_path(l: &NkLandscape, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    save_landscape(l, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_from_path(path: &Path) -> Result<NkLandscape> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_landscape(BufReader::new(file)).map_err(|e| match e {
        LoadError::Io(source) => Error::io(path, source),
        other => Error::Malformed {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}
