use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::nucleotide_code;

pub const MAX_KMER: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KmerError {
    #[error("k must be in 1..={max}, got {k}")]
    BadK { k: usize, max: usize },
    #[error("sequence of length {len} is shorter than k = {k}")]
    TooShort { len: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KmerCounts {
    pub k: usize,
    pub counts: BTreeMap<String, u64>,
    /// Windows that contained a base other than A/C/G/T.
    pub skipped: u64,
}

impl KmerCounts {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, kmer: &str) -> u64 {
        self.counts.get(kmer).copied().unwrap_or(0)
    }
}

/// Count k-mers over all `len - k + 1` sliding windows.
pub fn kmer_counts(seq: &str, k: usize) -> Result<KmerCounts, KmerError> {
    if k == 0 || k > MAX_KMER {
        return Err(KmerError::BadK { k, max: MAX_KMER });
    }
    let bytes = seq.as_bytes();
    if bytes.len() < k {
        return Err(KmerError::TooShort {
            len: bytes.len(),
            k,
        });
    }
    let mask = (1u32 << (2 * k)) - 1;
    let mut packed = HashMap::<u32, u64>::new();
    let mut code = 0u32;
    let mut run = 0usize;
    let mut skipped = 0u64;
    for (i, &b) in bytes.iter().enumerate() {
        match nucleotide_code(b) {
            Some(c) => {
                code = ((code << 2) | u32::from(c)) & mask;
                run += 1;
            }
            None => run = 0,
        }
        if i + 1 >= k {
            if run >= k {
                *packed.entry(code).or_default() += 1;
            } else {
                skipped += 1;
            }
        }
    }
    let counts = packed
        .into_iter()
        .map(|(code, n)| (unpack(code, k), n))
        .collect();
    Ok(KmerCounts { k, counts, skipped })
}

fn unpack(code: u32, k: usize) -> String {
    (0..k)
        .rev()
        .map(|i| ['A', 'C', 'G', 'T'][((code >> (2 * i)) & 3) as usize])
        .collect()
}
