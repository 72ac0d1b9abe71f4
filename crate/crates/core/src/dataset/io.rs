use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::LabeledPair;
use crate::sequence::{tsv_lines, TableError};

#[derive(Debug, Error)]
pub enum PairsFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Pairs as `gene_a<TAB>gene_b<TAB>label<TAB>source[<TAB>parent]`; the parent
/// column is written only for augmented pairs.
pub fn write_pairs_tsv<W: Write>(mut out: W, pairs: &[LabeledPair]) -> io::Result<()> {
    writeln!(out, "#gene_a\tgene_b\tlabel\tsource\tparent")?;
    for p in pairs {
        write!(out, "{}\t{}\t{}\t{}", p.gene_a, p.gene_b, p.label, p.source)?;
        if let Some(parent) = &p.parent {
            write!(out, "\t{parent}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_pairs_tsv<R: BufRead>(reader: R) -> Result<Vec<LabeledPair>, PairsFileError> {
    let mut out = Vec::new();
    for row in tsv_lines(reader) {
        let (line, f) = row?;
        let bad = |message: String| PairsFileError::Malformed { line, message };
        if !(4..=5).contains(&f.len()) || f[0].is_empty() || f[1].is_empty() {
            return Err(bad(
                "expected gene_a<TAB>gene_b<TAB>label<TAB>source[<TAB>parent]".into(),
            ));
        }
        out.push(LabeledPair {
            gene_a: f[0].clone(),
            gene_b: f[1].clone(),
            label: f[2].parse().map_err(bad)?,
            source: f[3].parse().map_err(bad)?,
            parent: f.get(4).filter(|s| !s.is_empty()).cloned(),
        });
    }
    Ok(out)
}
