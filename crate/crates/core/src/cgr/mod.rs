//! Chaos game representation grids.
//!
//! The four nucleotides sit on the corners of the unit square:
//! A (0,0), C (0,1), G (1,1), T (1,0). Playing the chaos game from the centre,
//! each nucleotide moves the point halfway to its corner,
//! `p_n = (p_{n-1} + c_n) / 2`, so after `n` steps
//!
//! ```text
//! p_n = c_n / 2 + c_{n-1} / 4 + ... + c_1 / 2^n + p_0 / 2^n
//! ```
//!
//! Scaling by `2^k` and flooring keeps the last `k` corners as binary digits,
//! the most recent one in the highest place. A k-mer's cell therefore has
//! the last character's corner bit as its most significant bit, and the
//! character at position `p` (0-based) contributes `bit * 2^p`.
//!
//! Grids are stored y-major with the origin bottom-left: the cell `(x, y)`
//! lives at index `y * side + x`.

mod render;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::Label;
use crate::sequence::nucleotide_code;

pub use render::{
    parse_pgm, write_diff, write_grid_csv, write_pgm, GridFormat, Pgm, PgmError, PGM_MAXVAL,
};

/// Largest k accepted by the library; the pipeline restricts itself to 4..=7.
pub const MAX_CGR_K: u8 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum CgrError {
    #[error("k must be in 1..={MAX_CGR_K}, got {0}")]
    BadK(usize),
    #[error("invalid nucleotide {ch:?} at position {position}")]
    InvalidCharacter { ch: char, position: usize },
    #[error("sequence of length {len} is shorter than k = {k}")]
    TooShort { len: usize, k: usize },
    #[error("sequence of length {0} is too long for 32-bit cell counts")]
    TooLong(usize),
    #[error("grids have different k ({0} and {1})")]
    KMismatch(u8, u8),
    #[error("expected {expected} cells, got {len}")]
    CellCount { len: usize, expected: usize },
    #[error("cell value {0} is outside [0, 1]")]
    ValueOutOfRange(f32),
    #[error("no sequences to combine")]
    Empty,
    #[error("cell ({x}, {y}) is outside a {side}x{side} grid")]
    OutOfRange { x: u32, y: u32, side: u32 },
}

fn check_k(k: usize) -> Result<u8, CgrError> {
    if (1..=MAX_CGR_K as usize).contains(&k) {
        Ok(k as u8)
    } else {
        Err(CgrError::BadK(k))
    }
}

#[inline]
fn corner(code: u8) -> (u32, u32) {
    let code = code as u32;
    (code >> 1, (code ^ (code >> 1)) & 1)
}

/// Cell of a k-mer (`k = kmer.len()`) in a `2^k` square grid.
pub fn kmer_cell(kmer: &[u8]) -> Result<(u32, u32), CgrError> {
    check_k(kmer.len())?;
    let (mut x, mut y) = (0u32, 0u32);
    for (p, &b) in kmer.iter().enumerate() {
        let code = nucleotide_code(b).ok_or(CgrError::InvalidCharacter {
            ch: b as char,
            position: p + 1,
        })?;
        let (bx, by) = corner(code);
        x |= bx << p;
        y |= by << p;
    }
    Ok((x, y))
}

/// Inverse of [`kmer_cell`].
pub fn cell_to_kmer(x: u32, y: u32, k: usize) -> Result<String, CgrError> {
    let k8 = check_k(k)?;
    let side = 1u32 << k8;
    if x >= side || y >= side {
        return Err(CgrError::OutOfRange { x, y, side });
    }
    Ok((0..k)
        .map(|p| match ((x >> p) & 1, (y >> p) & 1) {
            (0, 0) => 'A',
            (0, _) => 'C',
            (_, 1) => 'G',
            _ => 'T',
        })
        .collect())
}

/// k-mer counts on a `2^k` square grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CgrGrid {
    k: u8,
    counts: Vec<u32>,
    /// Windows that contained a non-ACGT character.
    pub skipped: u64,
}

impl CgrGrid {
    pub fn zeros(k: usize) -> Result<Self, CgrError> {
        let k = check_k(k)?;
        Ok(Self {
            k,
            counts: vec![0; 1 << (2 * k as u32)],
            skipped: 0,
        })
    }

    /// Build from y-major counts; `counts.len()` must be `4^k`.
    pub fn from_counts(k: usize, counts: Vec<u32>, skipped: u64) -> Result<Self, CgrError> {
        let k = check_k(k)?;
        let cells = 1usize << (2 * k as u32);
        if counts.len() != cells {
            return Err(CgrError::CellCount {
                len: counts.len(),
                expected: cells,
            });
        }
        Ok(Self { k, counts, skipped })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn side(&self) -> usize {
        1 << self.k
    }

    /// y-major counts.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.counts[y * self.side() + x]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Non-zero cells as `((x, y), count)`, y-major.
    pub fn nonzero(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        let side = self.side();
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| ((i % side, i / side), c))
    }
}

/// Count every length-k window of `seq`. Windows holding anything other than
/// A/C/G/T (either case) are counted in `skipped` instead.
pub fn encode(seq: &[u8], k: usize) -> Result<CgrGrid, CgrError> {
    let mut grid = CgrGrid::zeros(k)?;
    if seq.len() < k {
        return Err(CgrError::TooShort { len: seq.len(), k });
    }
    if seq.len() > u32::MAX as usize {
        return Err(CgrError::TooLong(seq.len()));
    }
    let top = k as u32 - 1;
    let side_bits = grid.k as u32;
    let (mut x, mut y) = (0u32, 0u32);
    let mut run = 0usize;
    for (i, &b) in seq.iter().enumerate() {
        match nucleotide_code(b) {
            Some(code) => {
                let (bx, by) = corner(code);
                x = (x >> 1) | (bx << top);
                y = (y >> 1) | (by << top);
                run += 1;
            }
            None => run = 0,
        }
        if i + 1 >= k {
            if run >= k {
                grid.counts[((y << side_bits) | x) as usize] += 1;
            } else {
                grid.skipped += 1;
            }
        }
    }
    Ok(grid)
}

/// [`encode`] over many sequences in parallel; results keep input order.
pub fn encode_many<S: AsRef<[u8]> + Sync>(seqs: &[S], k: usize) -> Vec<Result<CgrGrid, CgrError>> {
    seqs.par_iter().map(|s| encode(s.as_ref(), k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide by the largest cell.
    #[default]
    Max,
    /// Divide by the total, giving frequencies.
    Sum,
}

/// Grid of values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCgr {
    k: u8,
    values: Vec<f32>,
}

impl NormalizedCgr {
    /// Build from y-major values; each must be finite and in `[0, 1]`.
    pub fn from_values(k: usize, values: Vec<f32>) -> Result<Self, CgrError> {
        let k = check_k(k)?;
        let cells = 1usize << (2 * k as u32);
        if values.len() != cells {
            return Err(CgrError::CellCount {
                len: values.len(),
                expected: cells,
            });
        }
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CgrError::ValueOutOfRange(bad));
        }
        Ok(Self { k, values })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn side(&self) -> usize {
        1 << self.k
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.side() + x]
    }
}

fn scale(
    k: u8,
    counts: impl ExactSizeIterator<Item = u64> + Clone,
    how: Normalization,
) -> NormalizedCgr {
    let denom = match how {
        Normalization::Max => counts.clone().max().unwrap_or(0),
        Normalization::Sum => counts.clone().sum(),
    };
    let values = if denom == 0 {
        vec![0.0; counts.len()]
    } else {
        let d = denom as f64;
        counts.map(|c| (c as f64 / d) as f32).collect()
    };
    NormalizedCgr { k, values }
}

/// Divide every cell by the grid's maximum; an all-zero grid stays zero.
pub fn normalize(grid: &CgrGrid) -> NormalizedCgr {
    normalize_with(grid, Normalization::Max)
}

pub fn normalize_with(grid: &CgrGrid, how: Normalization) -> NormalizedCgr {
    scale(grid.k, grid.counts.iter().map(|&c| c as u64), how)
}

/// Two channels in argument order plus a label.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedTensor {
    pub channel_a: NormalizedCgr,
    pub channel_b: NormalizedCgr,
    pub label: Label,
}

impl PairedTensor {
    pub fn k(&self) -> u8 {
        self.channel_a.k
    }

    pub fn swapped(&self) -> Self {
        Self {
            channel_a: self.channel_b.clone(),
            channel_b: self.channel_a.clone(),
            label: self.label,
        }
    }
}

pub fn stack_pair(
    a: NormalizedCgr,
    b: NormalizedCgr,
    label: Label,
) -> Result<PairedTensor, CgrError> {
    if a.k != b.k {
        return Err(CgrError::KMismatch(a.k, b.k));
    }
    Ok(PairedTensor {
        channel_a: a,
        channel_b: b,
        label,
    })
}

/// Sum the count grids of all sequences, then normalize.
pub fn combine_genome<S: AsRef<[u8]> + Sync>(
    seqs: &[S],
    k: usize,
    how: Normalization,
) -> Result<NormalizedCgr, CgrError> {
    if seqs.is_empty() {
        return Err(CgrError::Empty);
    }
    let k8 = check_k(k)?;
    let cells = 1usize << (2 * k8 as u32);
    let mut sum = vec![0u64; cells];
    for grid in encode_many(seqs, k) {
        for (s, &c) in sum.iter_mut().zip(grid?.counts.iter()) {
            *s += c as u64;
        }
    }
    Ok(scale(k8, sum.into_iter(), how))
}

/// Signed cell-wise difference of two normalized grids, in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffGrid {
    k: u8,
    values: Vec<f32>,
}

impl DiffGrid {
    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn side(&self) -> usize {
        1 << self.k
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.values[y * self.side() + x]
    }

    /// `max(v, 0)` per cell.
    pub fn positive_part(&self) -> NormalizedCgr {
        NormalizedCgr {
            k: self.k,
            values: self.values.iter().map(|v| v.max(0.0)).collect(),
        }
    }

    /// `max(-v, 0)` per cell.
    pub fn negative_part(&self) -> NormalizedCgr {
        NormalizedCgr {
            k: self.k,
            values: self.values.iter().map(|v| (-v).max(0.0)).collect(),
        }
    }
}

/// `host - pathogen`; positive cells are over-represented in the host.
pub fn diff_grids(host: &NormalizedCgr, pathogen: &NormalizedCgr) -> Result<DiffGrid, CgrError> {
    if host.k != pathogen.k {
        return Err(CgrError::KMismatch(host.k, pathogen.k));
    }
    Ok(DiffGrid {
        k: host.k,
        values: host
            .values
            .iter()
            .zip(&pathogen.values)
            .map(|(h, p)| h - p)
            .collect(),
    })
}
