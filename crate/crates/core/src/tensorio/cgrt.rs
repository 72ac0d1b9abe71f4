use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::cgr::{CgrGrid, NormalizedCgr, PairedTensor, MAX_CGR_K};
use crate::dataset::Label;

pub const MAGIC: &[u8; 4] = b"CGRT";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 20;
/// Label byte plus id length.
const SAMPLE_PREFIX: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dtype {
    /// 32-bit unsigned counts.
    Counts = 0,
    /// 32-bit floats in `[0, 1]`.
    Normalized = 1,
}

impl Dtype {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Dtype::Counts),
            1 => Some(Dtype::Normalized),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CgrtValues {
    Counts(Vec<u32>),
    Normalized(Vec<f32>),
}

impl CgrtValues {
    pub fn dtype(&self) -> Dtype {
        match self {
            CgrtValues::Counts(_) => Dtype::Counts,
            CgrtValues::Normalized(_) => Dtype::Normalized,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CgrtValues::Counts(v) => v.len(),
            CgrtValues::Normalized(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One sample: channels laid out one after another, each y-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CgrtSample {
    pub label: Label,
    pub id: String,
    pub values: CgrtValues,
}

impl CgrtSample {
    pub fn from_paired(id: impl Into<String>, t: &PairedTensor) -> Self {
        let mut v = Vec::with_capacity(2 * t.channel_a.values().len());
        v.extend_from_slice(t.channel_a.values());
        v.extend_from_slice(t.channel_b.values());
        Self {
            label: t.label,
            id: id.into(),
            values: CgrtValues::Normalized(v),
        }
    }

    pub fn from_counts(id: impl Into<String>, label: Label, grid: &CgrGrid) -> Self {
        Self {
            label,
            id: id.into(),
            values: CgrtValues::Counts(grid.counts().to_vec()),
        }
    }

    pub fn from_normalized(id: impl Into<String>, label: Label, grid: &NormalizedCgr) -> Self {
        Self {
            label,
            id: id.into(),
            values: CgrtValues::Normalized(grid.values().to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgrtFile {
    pub dtype: Dtype,
    pub k: u8,
    pub channels: u8,
    pub samples: Vec<CgrtSample>,
}

impl CgrtFile {
    pub fn new(dtype: Dtype, k: u8, channels: u8) -> Self {
        Self {
            dtype,
            k,
            channels,
            samples: Vec::new(),
        }
    }

    /// Values per sample: `channels * 4^k`.
    pub fn sample_values(&self) -> usize {
        self.channels as usize * (1usize << (2 * self.k as u32))
    }
}

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("not a CGRT file")]
    NotCgrt,
    #[error("unsupported CGRT version {0} (this build reads version {VERSION})")]
    UnsupportedVersion(u16),
    #[error("unknown dtype code {0}")]
    BadDtype(u8),
    #[error("k = {0} is outside 1..={MAX_CGR_K}")]
    BadK(u8),
    #[error("channel count {0} is outside 1..=2")]
    BadChannels(u8),
    #[error("truncated CGRT data: expected at least {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },
    #[error("header padding bytes must be zero")]
    BadPadding,
    #[error("{0} unexpected bytes after the last sample")]
    TrailingBytes(u64),
    #[error("sample {sample}: label byte {byte} is neither 0 nor 1")]
    BadLabel { sample: u64, byte: u8 },
    #[error("sample {sample}: id is not valid UTF-8")]
    BadId { sample: u64 },
    #[error("sample {sample} ({id:?}): {message}")]
    Heterogeneous {
        sample: usize,
        id: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn check_shape(dtype: u8, k: u8, channels: u8) -> Result<Dtype, TensorError> {
    let dtype = Dtype::from_byte(dtype).ok_or(TensorError::BadDtype(dtype))?;
    if !(1..=MAX_CGR_K).contains(&k) {
        return Err(TensorError::BadK(k));
    }
    if !(1..=2).contains(&channels) {
        return Err(TensorError::BadChannels(channels));
    }
    Ok(dtype)
}

/// Exact size of a file with the given shape and sample id lengths (bytes).
pub fn file_size(k: u8, channels: u8, id_lens: impl IntoIterator<Item = usize>) -> u64 {
    let body = channels as u64 * (1u64 << (2 * k as u32)) * 4;
    HEADER_LEN as u64
        + id_lens
            .into_iter()
            .map(|n| SAMPLE_PREFIX as u64 + n as u64 + body)
            .sum::<u64>()
}

/// Serialize; every sample must match the file's dtype and shape.
pub fn encode_cgrt(file: &CgrtFile) -> Result<Vec<u8>, TensorError> {
    check_shape(file.dtype as u8, file.k, file.channels)?;
    let per = file.sample_values();
    for (i, s) in file.samples.iter().enumerate() {
        let bad = |message: String| TensorError::Heterogeneous {
            sample: i,
            id: s.id.clone(),
            message,
        };
        if s.values.dtype() != file.dtype {
            return Err(bad(format!(
                "dtype {:?} in a {:?} file",
                s.values.dtype(),
                file.dtype
            )));
        }
        if s.values.len() != per {
            return Err(bad(format!("{} values, expected {per}", s.values.len())));
        }
        if s.id.len() > u16::MAX as usize {
            return Err(bad(format!(
                "id is {} bytes, at most {} allowed",
                s.id.len(),
                u16::MAX
            )));
        }
    }
    let size = file_size(
        file.k,
        file.channels,
        file.samples.iter().map(|s| s.id.len()),
    );
    let mut out = Vec::with_capacity(size as usize);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&[file.dtype as u8, file.k, file.channels, 0, 0, 0]);
    out.extend_from_slice(&(file.samples.len() as u64).to_le_bytes());
    for s in &file.samples {
        out.push(s.label.to_byte());
        out.extend_from_slice(&(s.id.len() as u16).to_le_bytes());
        out.extend_from_slice(s.id.as_bytes());
        match &s.values {
            CgrtValues::Counts(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            CgrtValues::Normalized(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }
    debug_assert_eq!(out.len() as u64, size);
    Ok(out)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], TensorError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or(TensorError::Truncated {
                expected: self.pos as u64 + n as u64,
                actual: self.data.len() as u64,
            })?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }
}

/// Parse a CGRT image. Sample storage grows only as bytes are actually
/// present, so a lying header cannot force a large allocation.
pub fn decode_cgrt(data: &[u8]) -> Result<CgrtFile, TensorError> {
    if data.len() < MAGIC.len() || &data[..4] != MAGIC {
        return Err(TensorError::NotCgrt);
    }
    let mut cur = Cursor { data, pos: 4 };
    let h = cur.take(HEADER_LEN - 4)?;
    let version = u16::from_le_bytes([h[0], h[1]]);
    if version != VERSION {
        return Err(TensorError::UnsupportedVersion(version));
    }
    let (k, channels) = (h[3], h[4]);
    let dtype = check_shape(h[2], k, channels)?;
    if h[5..8] != [0, 0, 0] {
        return Err(TensorError::BadPadding);
    }
    let n_samples = u64::from_le_bytes(h[8..16].try_into().expect("8 bytes"));
    let mut file = CgrtFile::new(dtype, k, channels);
    let body_bytes = file.sample_values() * 4;

    for i in 0..n_samples {
        let label_byte = cur.take(1)?[0];
        let label = Label::from_byte(label_byte).ok_or(TensorError::BadLabel {
            sample: i,
            byte: label_byte,
        })?;
        let id_len = cur.take(2)?;
        let id_len = u16::from_le_bytes([id_len[0], id_len[1]]) as usize;
        let id = std::str::from_utf8(cur.take(id_len)?)
            .map_err(|_| TensorError::BadId { sample: i })?
            .to_string();
        let raw = cur.take(body_bytes)?;
        let words = raw.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]);
        let values = match dtype {
            Dtype::Counts => CgrtValues::Counts(words.map(u32::from_le_bytes).collect()),
            Dtype::Normalized => CgrtValues::Normalized(words.map(f32::from_le_bytes).collect()),
        };
        file.samples.push(CgrtSample { label, id, values });
    }
    let rest = data.len() - cur.pos;
    if rest > 0 {
        return Err(TensorError::TrailingBytes(rest as u64));
    }
    Ok(file)
}

pub fn write_cgrt(path: &Path, file: &CgrtFile) -> Result<(), TensorError> {
    let bytes = encode_cgrt(file)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_cgrt(path: &Path) -> Result<CgrtFile, TensorError> {
    decode_cgrt(&fs::read(path)?)
}
