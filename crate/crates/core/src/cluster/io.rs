use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{Cluster, ClusterId};
use crate::sequence::TableError;

#[derive(Debug, Error)]
pub enum ClusterFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("cluster {cluster} (line {line}) has no representative marked with '*'")]
    NoRepresentative { cluster: ClusterId, line: usize },
    #[error("cluster {cluster} (line {line}) has no members")]
    EmptyCluster { cluster: ClusterId, line: usize },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> ClusterFileError {
    ClusterFileError::Malformed {
        line,
        message: message.into(),
    }
}

struct Open {
    cluster: Cluster,
    has_rep: bool,
    line: usize,
}

fn close(open: Open) -> Result<Cluster, ClusterFileError> {
    if open.cluster.member_ids.is_empty() {
        return Err(ClusterFileError::EmptyCluster {
            cluster: open.cluster.cluster_id,
            line: open.line,
        });
    }
    if !open.has_rep {
        return Err(ClusterFileError::NoRepresentative {
            cluster: open.cluster.cluster_id,
            line: open.line,
        });
    }
    Ok(open.cluster)
}

/// Parse a CD-HIT `.clstr` cluster file.
///
/// ```text
/// >Cluster 0
/// 0   12nt, >g1... *
/// 1   10nt, >g2... at +/90.00%
/// ```
pub fn parse_clstr<R: BufRead>(mut reader: R) -> Result<Vec<Cluster>, ClusterFileError> {
    let mut out = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut seen_members = HashSet::new();
    let mut open: Option<Open> = None;
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf)
            .map_err(|_| malformed(line_no, "not valid UTF-8"))?
            .trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('>') {
            if let Some(done) = open.take() {
                out.push(close(done)?);
            }
            let number = rest
                .strip_prefix("Cluster")
                .map(str::trim)
                .and_then(|n| n.parse::<u32>().ok())
                .ok_or_else(|| {
                    malformed(line_no, format!("expected '>Cluster N', found {line:?}"))
                })?;
            let id = ClusterId(number);
            if !seen_ids.insert(id) {
                return Err(malformed(line_no, format!("cluster {id} appears twice")));
            }
            open = Some(Open {
                cluster: Cluster {
                    cluster_id: id,
                    member_ids: Vec::new(),
                    representative_id: String::new(),
                },
                has_rep: false,
                line: line_no,
            });
            continue;
        }
        let Some(current) = open.as_mut() else {
            return Err(malformed(
                line_no,
                "member line before any '>Cluster' header",
            ));
        };
        let (member, is_rep) = parse_member(line, line_no)?;
        if !seen_members.insert(member.clone()) {
            return Err(malformed(
                line_no,
                format!("sequence {member:?} listed twice"),
            ));
        }
        if is_rep {
            if current.has_rep {
                return Err(malformed(line_no, "second representative in one cluster"));
            }
            current.has_rep = true;
            current.cluster.representative_id = member.clone();
        }
        current.cluster.member_ids.push(member);
    }
    if let Some(done) = open.take() {
        out.push(close(done)?);
    }
    Ok(out)
}

fn parse_member(line: &str, line_no: usize) -> Result<(String, bool), ClusterFileError> {
    let (_, body) = line
        .split_once('\t')
        .ok_or_else(|| malformed(line_no, "member line has no tab after the index"))?;
    let (_, after) = body
        .split_once(", >")
        .ok_or_else(|| malformed(line_no, "member line has no ', >' before the id"))?;
    let end = after
        .rfind("...")
        .ok_or_else(|| malformed(line_no, "member id is not terminated by '...'"))?;
    let id = &after[..end];
    if id.is_empty() {
        return Err(malformed(line_no, "empty member id"));
    }
    if id.chars().any(char::is_whitespace) {
        return Err(malformed(
            line_no,
            format!("member id {id:?} contains whitespace"),
        ));
    }
    let tail = after[end + 3..].trim();
    let is_rep = if tail == "*" {
        true
    } else if tail.starts_with("at") {
        false
    } else {
        return Err(malformed(
            line_no,
            format!("expected '*' or 'at ...' after id, found {tail:?}"),
        ));
    };
    Ok((id.to_string(), is_rep))
}

/// Write clusters as `cluster_id<TAB>member_id<TAB>is_representative`.
pub fn write_cluster_tsv<W: Write>(mut out: W, clusters: &[Cluster]) -> io::Result<()> {
    writeln!(out, "#cluster_id\tmember_id\tis_representative")?;
    for c in clusters {
        for m in &c.member_ids {
            let rep = u8::from(*m == c.representative_id);
            writeln!(out, "{}\t{}\t{}", c.cluster_id, m, rep)?;
        }
    }
    Ok(())
}

pub fn read_cluster_tsv<R: BufRead>(reader: R) -> Result<Vec<Cluster>, ClusterFileError> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut pos: HashMap<ClusterId, usize> = HashMap::new();
    let mut reps: Vec<Option<usize>> = Vec::new();
    let mut first_line: Vec<usize> = Vec::new();
    let mut members = HashSet::new();
    for row in crate::sequence::tsv_lines(reader) {
        let (line, fields) = row?;
        if fields.len() != 3 {
            return Err(malformed(
                line,
                "expected cluster_id<TAB>member_id<TAB>is_representative",
            ));
        }
        let id = fields[0]
            .parse::<u32>()
            .map(ClusterId)
            .map_err(|_| malformed(line, format!("bad cluster id {:?}", fields[0])))?;
        let is_rep = match fields[2].as_str() {
            "1" => true,
            "0" => false,
            other => {
                return Err(malformed(
                    line,
                    format!("is_representative must be 0 or 1, got {other:?}"),
                ))
            }
        };
        if fields[1].is_empty() {
            return Err(malformed(line, "empty member id"));
        }
        if !members.insert(fields[1].clone()) {
            return Err(malformed(
                line,
                format!("sequence {:?} listed twice", fields[1]),
            ));
        }
        let p = *pos.entry(id).or_insert_with(|| {
            out.push(Cluster {
                cluster_id: id,
                member_ids: Vec::new(),
                representative_id: String::new(),
            });
            reps.push(None);
            first_line.push(line);
            out.len() - 1
        });
        if is_rep {
            if reps[p].is_some() {
                return Err(malformed(
                    line,
                    format!("cluster {id} has two representatives"),
                ));
            }
            reps[p] = Some(line);
            out[p].representative_id = fields[1].clone();
        }
        out[p].member_ids.push(fields[1].clone());
    }
    for (p, c) in out.iter().enumerate() {
        if reps[p].is_none() {
            return Err(ClusterFileError::NoRepresentative {
                cluster: c.cluster_id,
                line: first_line[p],
            });
        }
    }
    Ok(out)
}
