use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{InteractionRecord, Role, SequenceRecord, Superkingdom};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate metadata for id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Data lines of a tab-separated file: `(line number, fields)`, skipping
/// blank and `#` comment lines.
pub fn tsv_lines<R: BufRead>(
    mut reader: R,
) -> impl Iterator<Item = Result<(usize, Vec<String>), TableError>> {
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    std::iter::from_fn(move || loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Err(e) => return Some(Err(e.into())),
            Ok(0) => return None,
            Ok(_) => {}
        }
        line_no += 1;
        let Ok(text) = std::str::from_utf8(&buf) else {
            return Some(Err(TableError::Malformed {
                line: line_no,
                message: "not valid UTF-8".into(),
            }));
        };
        let text = text.trim_end_matches(['\n', '\r']);
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let fields = text.split('\t').map(|f| f.trim().to_string()).collect();
        return Some(Ok((line_no, fields)));
    })
}

/// Parse an interaction table: `gene_a<TAB>gene_b[<TAB>evidence]`.
pub fn parse_interactions<R: BufRead>(reader: R) -> Result<Vec<InteractionRecord>, TableError> {
    let mut out = Vec::new();
    for row in tsv_lines(reader) {
        let (line, fields) = row?;
        if fields.len() < 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(TableError::Malformed {
                line,
                message: "expected gene_a<TAB>gene_b[<TAB>evidence]".into(),
            });
        }
        if fields.len() > 3 {
            return Err(TableError::Malformed {
                line,
                message: format!("expected at most 3 columns, found {}", fields.len()),
            });
        }
        out.push(InteractionRecord {
            gene_a: fields[0].clone(),
            gene_b: fields[1].clone(),
            evidence: fields.get(2).cloned().unwrap_or_default(),
        });
    }
    Ok(out)
}

pub fn write_interactions<W: Write>(mut out: W, rows: &[InteractionRecord]) -> io::Result<()> {
    for r in rows {
        writeln!(out, "{}\t{}\t{}", r.gene_a, r.gene_b, r.evidence)?;
    }
    Ok(())
}

/// One row of the metadata sidecar; empty cells are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetadataEntry {
    pub organism: Option<String>,
    pub role: Option<Role>,
    pub superkingdom: Option<Superkingdom>,
}

/// Parse the metadata sidecar: `id<TAB>organism<TAB>role<TAB>superkingdom`.
/// Trailing columns may be omitted. A first row whose id cell is `id` is a
/// header and is skipped.
pub fn parse_metadata<R: BufRead>(reader: R) -> Result<HashMap<String, MetadataEntry>, TableError> {
    let mut out = HashMap::new();
    let mut first = true;
    for row in tsv_lines(reader) {
        let (line, fields) = row?;
        if std::mem::take(&mut first) && fields[0].eq_ignore_ascii_case("id") {
            continue;
        }
        if fields[0].is_empty() || fields.len() > 4 {
            return Err(TableError::Malformed {
                line,
                message: "expected id<TAB>organism<TAB>role<TAB>superkingdom".into(),
            });
        }
        let bad = |message: String| TableError::Malformed { line, message };
        let cell = |i: usize| fields.get(i).filter(|s| !s.is_empty());
        let entry = MetadataEntry {
            organism: cell(1).cloned(),
            role: cell(2).map(|s| s.parse()).transpose().map_err(bad)?,
            superkingdom: cell(3).map(|s| s.parse()).transpose().map_err(bad)?,
        };
        let id = fields[0].clone();
        if out.contains_key(&id) {
            return Err(TableError::DuplicateId { id, line });
        }
        out.insert(id, entry);
    }
    Ok(out)
}

/// Overlay sidecar metadata on parsed records. Non-empty sidecar cells win
/// over header annotations. Returns the number of records touched.
pub fn apply_metadata(
    records: &mut [SequenceRecord],
    meta: &HashMap<String, MetadataEntry>,
) -> usize {
    let mut touched = 0;
    for r in records.iter_mut() {
        let Some(m) = meta.get(&r.id) else { continue };
        touched += 1;
        if let Some(org) = &m.organism {
            r.organism = Some(org.clone());
        }
        if let Some(role) = m.role {
            r.role = role;
        }
        if let Some(sk) = m.superkingdom {
            r.superkingdom = Some(sk);
        }
    }
    touched
}
