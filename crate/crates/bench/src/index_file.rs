//! Binary persistence of a [`DirectIndex`].
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field |
//! |---|---|---|
//! | 0 | 8 | magic `FBSIDX1\0` |
//! | 8 | 2 | version (`1`) |
//! | 10 | 1 | precision, 0 single, 1 double |
//! | 11 | 1 | index width in bits |
//! | 12 | 1 | gap `q` |
//! | 13 | 3 | reserved, zero |
//! | 16 | 8 | `N` |
//! | 24 | 8 | `R` |
//! | 32 | 8 | raw bits of `H` |
//! | 40 | 8 | raw bits of `X_0` |
//! | 48 | 4(R+1) | table entries, `u32` each |
//! | end-4 | 4 | CRC-32 of the table bytes |
//!
//! `f32` values occupy the low 32 bits of their 8-byte slot.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use fastsearch_core::{DirectIndex, Error as CoreError, Precision, Real};

pub const MAGIC: [u8; 8] = *b"FBSIDX1\0";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 48;

#[derive(Debug, thiserror::Error)]
pub enum IndexFileError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index file version {found} (expected {VERSION})")]
    VersionMismatch { found: u16 },
    #[error("file truncated: {found} bytes, expected {expected}")]
    TruncatedFile { expected: u64, found: u64 },
    #[error("table checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("stored precision is {found}, requested {wanted}")]
    PrecisionMismatch { found: &'static str, wanted: &'static str },
    #[error("malformed index: {0}")]
    Malformed(String),
}

impl From<CoreError> for IndexFileError {
    fn from(e: CoreError) -> Self {
        IndexFileError::Malformed(e.to_string())
    }
}

/// An index read from disk, in whichever precision it was stored.
#[derive(Clone, Debug, PartialEq)]
pub enum StoredIndex {
    Single(DirectIndex<f32>),
    Double(DirectIndex<f64>),
}

impl StoredIndex {
    pub fn precision(&self) -> Precision {
        match self {
            StoredIndex::Single(_) => Precision::Single,
            StoredIndex::Double(_) => Precision::Double,
        }
    }

    pub fn into_single(self) -> Result<DirectIndex<f32>, IndexFileError> {
        match self {
            StoredIndex::Single(i) => Ok(i),
            StoredIndex::Double(_) => Err(mismatch(Precision::Double, Precision::Single)),
        }
    }

    pub fn into_double(self) -> Result<DirectIndex<f64>, IndexFileError> {
        match self {
            StoredIndex::Double(i) => Ok(i),
            StoredIndex::Single(_) => Err(mismatch(Precision::Single, Precision::Double)),
        }
    }
}

fn mismatch(found: Precision, wanted: Precision) -> IndexFileError {
    IndexFileError::PrecisionMismatch { found: found.name(), wanted: wanted.name() }
}

fn precision_code(p: Precision) -> u8 {
    match p {
        Precision::Single => 0,
        Precision::Double => 1,
    }
}

pub fn encode_index<T: Real>(idx: &DirectIndex<T>) -> Vec<u8> {
    let table = idx.table();
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 * table.len() + 4);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(precision_code(T::PRECISION));
    buf.push(idx.qbits());
    buf.push(idx.gap());
    buf.extend_from_slice(&[0; 3]);
    buf.extend_from_slice(&(idx.intervals() as u64).to_le_bytes());
    buf.extend_from_slice(&idx.r().to_le_bytes());
    buf.extend_from_slice(&idx.h().to_bits_u64().to_le_bytes());
    buf.extend_from_slice(&idx.x0().to_bits_u64().to_le_bytes());
    for &k in table {
        buf.extend_from_slice(&k.to_le_bytes());
    }
    let crc = crc32fast::hash(&buf[HEADER_LEN..]);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Header fields and checksum-verified table of an index file.
struct Raw {
    precision: u8,
    qbits: u8,
    gap: u8,
    n: usize,
    h_bits: u64,
    x0_bits: u64,
    table: Vec<u32>,
}

fn parse(bytes: &[u8]) -> Result<Raw, IndexFileError> {
    let found = bytes.len() as u64;
    if bytes.len() < MAGIC.len() {
        return Err(IndexFileError::TruncatedFile { expected: HEADER_LEN as u64 + 4, found });
    }
    if bytes[..8] != MAGIC {
        return Err(IndexFileError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(IndexFileError::TruncatedFile { expected: HEADER_LEN as u64 + 4, found });
    }
    let version = u16::from_le_bytes([bytes[8], bytes[9]]);
    if version != VERSION {
        return Err(IndexFileError::VersionMismatch { found: version });
    }
    if bytes[13..16] != [0; 3] {
        return Err(IndexFileError::Malformed("reserved bytes are not zero".into()));
    }
    let r = u64_at(bytes, 24);
    let expected = r
        .checked_add(1)
        .and_then(|e| e.checked_mul(4))
        .and_then(|p| p.checked_add(HEADER_LEN as u64 + 4))
        .ok_or_else(|| IndexFileError::Malformed("bucket count overflows".into()))?;
    match found.cmp(&expected) {
        Ordering::Less => return Err(IndexFileError::TruncatedFile { expected, found }),
        Ordering::Greater => return Err(IndexFileError::Malformed("trailing bytes after checksum".into())),
        Ordering::Equal => {}
    }
    let payload = &bytes[HEADER_LEN..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().expect("4 bytes"));
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(IndexFileError::ChecksumMismatch { stored, computed });
    }
    let n =
        usize::try_from(u64_at(bytes, 16)).map_err(|_| IndexFileError::Malformed("N does not fit in memory".into()))?;
    Ok(Raw {
        precision: bytes[10],
        qbits: bytes[11],
        gap: bytes[12],
        n,
        h_bits: u64_at(bytes, 32),
        x0_bits: u64_at(bytes, 40),
        table: payload.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes"))).collect(),
    })
}

fn precision_of(code: u8) -> Result<Precision, IndexFileError> {
    match code {
        0 => Ok(Precision::Single),
        1 => Ok(Precision::Double),
        other => Err(IndexFileError::Malformed(format!("unknown precision code {other}"))),
    }
}

pub fn decode_index(bytes: &[u8]) -> Result<StoredIndex, IndexFileError> {
    let raw = parse(bytes)?;
    match precision_of(raw.precision)? {
        Precision::Single => Ok(StoredIndex::Single(assemble(raw)?)),
        Precision::Double => Ok(StoredIndex::Double(assemble(raw)?)),
    }
}

/// Like [`decode_index`] but requires the stored precision to be `T`'s.
pub fn decode_index_as<T: Real>(bytes: &[u8]) -> Result<DirectIndex<T>, IndexFileError> {
    let raw = parse(bytes)?;
    let found = precision_of(raw.precision)?;
    if found != T::PRECISION {
        return Err(mismatch(found, T::PRECISION));
    }
    assemble(raw)
}

fn assemble<T: Real>(raw: Raw) -> Result<DirectIndex<T>, IndexFileError> {
    let bits = |b| T::from_bits_u64(b).ok_or_else(|| IndexFileError::Malformed("value bits exceed precision".into()));
    Ok(DirectIndex::from_parts(bits(raw.x0_bits)?, bits(raw.h_bits)?, raw.gap, raw.qbits, raw.n, raw.table)?)
}

/// Writes `idx` to `path`, returning the file size in bytes.
pub fn save_index<T: Real>(idx: &DirectIndex<T>, path: impl AsRef<Path>) -> Result<u64, IndexFileError> {
    let bytes = encode_index(idx);
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

pub fn load_index(path: impl AsRef<Path>) -> Result<StoredIndex, IndexFileError> {
    decode_index(&fs::read(path)?)
}

pub fn load_index_as<T: Real>(path: impl AsRef<Path>) -> Result<DirectIndex<T>, IndexFileError> {
    decode_index_as(&fs::read(path)?)
}
