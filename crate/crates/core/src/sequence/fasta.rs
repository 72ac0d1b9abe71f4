use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{is_iupac, Role, SequenceRecord, Superkingdom};

#[derive(Debug, Error)]
pub enum FastaError {
    #[error("line {line}: sequence data before the first '>' header")]
    MissingHeader { line: usize },
    #[error("line {line}: header has no identifier")]
    EmptyId { line: usize },
    #[error("line {line}: duplicate sequence id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("record {id:?} (header on line {line}) has an empty sequence")]
    EmptySequence { id: String, line: usize },
    #[error("line {line}: invalid character {ch:?} in record {id:?} at position {position}")]
    InvalidCharacter {
        id: String,
        ch: char,
        position: usize,
        line: usize,
    },
    #[error("line {line}: bad header annotation: {message}")]
    BadAnnotation { line: usize, message: String },
    #[error("line {line}: not valid UTF-8")]
    InvalidUtf8 { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Pending {
    record: SequenceRecord,
    line: usize,
}

/// Parse FASTA text into records.
///
/// Headers look like `>id key=value key="value with spaces" ...`; the keys
/// `organism`, `role` and `superkingdom` are recognised and anything else is
/// ignored. Sequence lines are concatenated with all whitespace removed and
/// uppercased. Positions in errors are 1-based within the record's sequence.
pub fn parse_fasta<R: BufRead>(mut reader: R) -> Result<Vec<SequenceRecord>, FastaError> {
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut current: Option<Pending> = None;
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = trim_newline(&buf);
        if let Some(header) = line.strip_prefix(b">") {
            if let Some(done) = current.take() {
                records.push(finish(done)?);
            }
            let header = std::str::from_utf8(header)
                .map_err(|_| FastaError::InvalidUtf8 { line: line_no })?;
            let record = parse_header(header, line_no)?;
            if !seen.insert(record.id.clone()) {
                return Err(FastaError::DuplicateId {
                    id: record.id,
                    line: line_no,
                });
            }
            current = Some(Pending {
                record,
                line: line_no,
            });
        } else {
            let Some(pending) = current.as_mut() else {
                if line.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                return Err(FastaError::MissingHeader { line: line_no });
            };
            for &b in line {
                if b.is_ascii_whitespace() {
                    continue;
                }
                if !is_iupac(b) {
                    let ch = if b.is_ascii() {
                        b as char
                    } else {
                        char::REPLACEMENT_CHARACTER
                    };
                    return Err(FastaError::InvalidCharacter {
                        id: pending.record.id.clone(),
                        ch,
                        position: pending.record.cds.len() + 1,
                        line: line_no,
                    });
                }
                pending.record.cds.push(b.to_ascii_uppercase() as char);
            }
        }
    }
    if let Some(done) = current.take() {
        records.push(finish(done)?);
    }
    Ok(records)
}

fn finish(pending: Pending) -> Result<SequenceRecord, FastaError> {
    if pending.record.cds.is_empty() {
        return Err(FastaError::EmptySequence {
            id: pending.record.id,
            line: pending.line,
        });
    }
    Ok(pending.record)
}

fn trim_newline(buf: &[u8]) -> &[u8] {
    let mut end = buf.len();
    while end > 0 && (buf[end - 1] == b'\n' || buf[end - 1] == b'\r') {
        end -= 1;
    }
    &buf[..end]
}

fn parse_header(header: &str, line: usize) -> Result<SequenceRecord, FastaError> {
    let header = header.trim_end();
    let (id, rest) = match header.find(char::is_whitespace) {
        Some(i) => (&header[..i], &header[i..]),
        None => (header, ""),
    };
    if id.is_empty() {
        return Err(FastaError::EmptyId { line });
    }
    let mut record = SequenceRecord {
        id: id.to_string(),
        organism: None,
        superkingdom: None,
        role: Role::Unspecified,
        cds: String::new(),
    };
    for (key, value) in annotations(rest, line)? {
        let bad = |message: String| FastaError::BadAnnotation { line, message };
        match key.as_str() {
            "organism" if !value.is_empty() => record.organism = Some(value),
            "role" => record.role = value.parse().map_err(bad)?,
            "superkingdom" => {
                let sk: Superkingdom = value.parse().map_err(bad)?;
                record.superkingdom = Some(sk);
            }
            _ => {}
        }
    }
    Ok(record)
}

/// Split header text into `key=value` pairs; values may be double-quoted.
/// Tokens without `=` are free description and are skipped.
fn annotations(text: &str, line: usize) -> Result<Vec<(String, String)>, FastaError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_none() {
            break;
        }
        let mut key = String::new();
        while let Some(&c) = chars.peek() {
            if c == '=' || c.is_whitespace() {
                break;
            }
            key.push(c);
            chars.next();
        }
        if chars.peek() != Some(&'=') {
            continue;
        }
        chars.next();
        let mut value = String::new();
        if chars.peek() == Some(&'"') {
            chars.next();
            let mut closed = false;
            for c in chars.by_ref() {
                if c == '"' {
                    closed = true;
                    break;
                }
                value.push(c);
            }
            if !closed {
                return Err(FastaError::BadAnnotation {
                    line,
                    message: format!("unterminated quote in value of {key:?}"),
                });
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                value.push(c);
                chars.next();
            }
        }
        out.push((key.to_ascii_lowercase(), value));
    }
    Ok(out)
}

/// Write records as FASTA, one sequence line per record.
pub fn write_fasta<W: Write>(mut out: W, records: &[SequenceRecord]) -> io::Result<()> {
    for r in records {
        write!(out, ">{}", r.id)?;
        if let Some(org) = &r.organism {
            if org.chars().any(char::is_whitespace) {
                write!(out, " organism=\"{org}\"")?;
            } else {
                write!(out, " organism={org}")?;
            }
        }
        if r.role != Role::Unspecified {
            write!(out, " role={}", r.role)?;
        }
        if let Some(sk) = r.superkingdom {
            write!(out, " superkingdom={sk}")?;
        }
        writeln!(out)?;
        writeln!(out, "{}", r.cds)?;
    }
    Ok(())
}
