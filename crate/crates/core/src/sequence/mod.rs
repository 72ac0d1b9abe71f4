//! Sequence and interaction inputs.
//!
//! Coding sequences arrive as FASTA with optional `key=value` annotations in
//! the header, plus an optional metadata sidecar TSV that overrides them.
//! Interactions arrive as a tab-separated table of gene id pairs.

mod codon;
mod fasta;
mod kmer;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use codon::{translate_cds, Codon, CodonTable, TranslateError, Translation};
pub use fasta::{parse_fasta, write_fasta, FastaError};
pub use kmer::{kmer_counts, KmerCounts, KmerError, MAX_KMER};
pub use table::tsv_lines;
pub use table::{
    apply_metadata, parse_interactions, parse_metadata, write_interactions, MetadataEntry,
    TableError,
};

/// Which side of a host/pathogen interaction a gene comes from.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Host,
    Pathogen,
    #[default]
    Unspecified,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Host => "host",
            Role::Pathogen => "pathogen",
            Role::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "host" => Ok(Role::Host),
            "pathogen" => Ok(Role::Pathogen),
            "unspecified" | "" => Ok(Role::Unspecified),
            other => Err(format!(
                "unknown role {other:?} (expected host, pathogen or unspecified)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Superkingdom {
    Bacteria,
    Eukaryota,
    Viruses,
    Archaea,
    Unknown,
}

impl Superkingdom {
    pub fn as_str(self) -> &'static str {
        match self {
            Superkingdom::Bacteria => "bacteria",
            Superkingdom::Eukaryota => "eukaryota",
            Superkingdom::Viruses => "viruses",
            Superkingdom::Archaea => "archaea",
            Superkingdom::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Superkingdom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Superkingdom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bacteria" => Ok(Superkingdom::Bacteria),
            "eukaryota" => Ok(Superkingdom::Eukaryota),
            "viruses" => Ok(Superkingdom::Viruses),
            "archaea" => Ok(Superkingdom::Archaea),
            "unknown" | "" => Ok(Superkingdom::Unknown),
            other => Err(format!("unknown superkingdom {other:?}")),
        }
    }
}

/// One gene: its coding sequence plus organism metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub id: String,
    pub organism: Option<String>,
    pub superkingdom: Option<Superkingdom>,
    pub role: Role,
    /// Uppercase IUPAC nucleotides.
    pub cds: String,
}

impl SequenceRecord {
    pub fn new(id: impl Into<String>, cds: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            organism: None,
            superkingdom: None,
            role: Role::Unspecified,
            cds: cds.into().to_ascii_uppercase(),
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn with_organism(mut self, organism: impl Into<String>) -> Self {
        self.organism = Some(organism.into());
        self
    }

    pub fn len(&self) -> usize {
        self.cds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cds.is_empty()
    }
}

/// A known interaction between two genes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub gene_a: String,
    pub gene_b: String,
    pub evidence: String,
}

impl InteractionRecord {
    pub fn new(gene_a: impl Into<String>, gene_b: impl Into<String>) -> Self {
        Self {
            gene_a: gene_a.into(),
            gene_b: gene_b.into(),
            evidence: String::new(),
        }
    }
}

/// IUPAC nucleotide codes accepted in stored sequences.
pub fn is_iupac(b: u8) -> bool {
    matches!(
        b.to_ascii_uppercase(),
        b'A' | b'C'
            | b'G'
            | b'T'
            | b'U'
            | b'R'
            | b'Y'
            | b'S'
            | b'W'
            | b'K'
            | b'M'
            | b'B'
            | b'D'
            | b'H'
            | b'V'
            | b'N'
    )
}

/// 2-bit code for an unambiguous nucleotide: A=0, C=1, G=2, T=3.
#[inline]
pub fn nucleotide_code(b: u8) -> Option<u8> {
    match b {
        b'A' | b'a' => Some(0),
        b'C' | b'c' => Some(1),
        b'G' | b'g' => Some(2),
        b'T' | b't' => Some(3),
        _ => None,
    }
}

/// Look up records by id.
pub fn index_by_id(records: &[SequenceRecord]) -> std::collections::HashMap<&str, &SequenceRecord> {
    records.iter().map(|r| (r.id.as_str(), r)).collect()
}
