use std::collections::BTreeMap;

use thiserror::Error;

use super::nucleotide_code;

/// NCBI translation table 1, bases in TCAG order.
const STANDARD_TCAG: &[u8; 64] =
    b"FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG";

pub type Codon = [u8; 3];

const BASES: [u8; 4] = *b"ACGT";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("coding sequence length {0} is not a multiple of 3")]
    Length(usize),
    #[error("codon {codon:?} at position {position} contains a non-ACGT base")]
    AmbiguousCodon { codon: String, position: usize },
    #[error("translation table must have 64 amino-acid letters, got {0}")]
    BadTable(usize),
}

/// Codon to amino-acid map with its inverse synonym sets.
#[derive(Debug, Clone)]
pub struct CodonTable {
    /// Indexed by 2-bit codes A=0 C=1 G=2 T=3, first base most significant.
    amino: [u8; 64],
    synonyms: BTreeMap<u8, Vec<Codon>>,
}

/// Result of translating one coding sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub protein: String,
    /// Codon indices of stop codons before the final codon.
    pub internal_stops: Vec<usize>,
}

impl Translation {
    pub fn has_internal_stop(&self) -> bool {
        !self.internal_stops.is_empty()
    }
}

fn tcag_index(b: u8) -> usize {
    match b {
        b'T' => 0,
        b'C' => 1,
        b'A' => 2,
        _ => 3,
    }
}

impl CodonTable {
    /// The standard genetic code.
    pub fn standard() -> Self {
        Self::from_ncbi(STANDARD_TCAG).expect("standard table is well formed")
    }

    /// Build from a 64-letter amino-acid string in NCBI's TCAG ordering
    /// (the `AAs` line of an NCBI genetic-code definition).
    pub fn from_ncbi(aas: &[u8]) -> Result<Self, TranslateError> {
        if aas.len() != 64 {
            return Err(TranslateError::BadTable(aas.len()));
        }
        let mut amino = [0u8; 64];
        let mut synonyms: BTreeMap<u8, Vec<Codon>> = BTreeMap::new();
        for (i, &b1) in BASES.iter().enumerate() {
            for (j, &b2) in BASES.iter().enumerate() {
                for (k, &b3) in BASES.iter().enumerate() {
                    let aa = aas[16 * tcag_index(b1) + 4 * tcag_index(b2) + tcag_index(b3)];
                    amino[16 * i + 4 * j + k] = aa;
                    synonyms.entry(aa).or_default().push([b1, b2, b3]);
                }
            }
        }
        Ok(Self { amino, synonyms })
    }

    fn code(codon: &[u8]) -> Option<usize> {
        let a = nucleotide_code(codon[0])?;
        let b = nucleotide_code(codon[1])?;
        let c = nucleotide_code(codon[2])?;
        Some(16 * a as usize + 4 * b as usize + c as usize)
    }

    /// Amino-acid letter for a codon, `'*'` for stops; `None` when the codon
    /// holds anything but A/C/G/T.
    pub fn amino_acid(&self, codon: &[u8]) -> Option<u8> {
        if codon.len() != 3 {
            return None;
        }
        Self::code(codon).map(|i| self.amino[i])
    }

    /// All codons coding the same amino acid as `codon`, itself included, in
    /// lexicographic order.
    pub fn synonyms(&self, codon: &[u8]) -> Option<&[Codon]> {
        let aa = self.amino_acid(codon)?;
        self.synonyms.get(&aa).map(Vec::as_slice)
    }

    pub fn synonyms_of_amino_acid(&self, aa: u8) -> Option<&[Codon]> {
        self.synonyms.get(&aa).map(Vec::as_slice)
    }

    pub fn amino_acids(&self) -> impl Iterator<Item = (u8, &[Codon])> {
        self.synonyms.iter().map(|(aa, c)| (*aa, c.as_slice()))
    }

    pub fn stop_codons(&self) -> &[Codon] {
        self.synonyms_of_amino_acid(b'*').unwrap_or(&[])
    }

    /// Translate a coding sequence. A trailing stop codon becomes `'*'`;
    /// internal stops are translated too and flagged on the result.
    pub fn translate(&self, cds: &str) -> Result<Translation, TranslateError> {
        let bytes = cds.as_bytes();
        if !bytes.len().is_multiple_of(3) {
            return Err(TranslateError::Length(bytes.len()));
        }
        let n_codons = bytes.len() / 3;
        let mut protein = String::with_capacity(n_codons);
        let mut internal_stops = Vec::new();
        for (i, codon) in bytes.chunks_exact(3).enumerate() {
            let aa = self
                .amino_acid(codon)
                .ok_or_else(|| TranslateError::AmbiguousCodon {
                    codon: String::from_utf8_lossy(codon).into_owned(),
                    position: 3 * i + 1,
                })?;
            if aa == b'*' && i + 1 < n_codons {
                internal_stops.push(i);
            }
            protein.push(aa as char);
        }
        Ok(Translation {
            protein,
            internal_stops,
        })
    }
}

impl Default for CodonTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// Translate with the standard code.
pub fn translate_cds(cds: &str, table: &CodonTable) -> Result<Translation, TranslateError> {
    table.translate(cds)
}
