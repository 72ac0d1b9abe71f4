//! Settings resolution: command-line flag, then `GRANDCGR_*` environment
//! variable (both handled by clap), then config file, then default.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use grandcgr::augment::SubstitutionMode;
use grandcgr::cgr::{GridFormat, Normalization, MAX_CGR_K};
use grandcgr::cluster::check_threshold;
use grandcgr::dataset::{Fractions, NegativePool};
use grandcgr::grand::DegreeOneOrder;

use crate::args::*;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CountOrWord {
    Count(u64),
    Word(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FractionsValue {
    List(Vec<f64>),
    Text(String),
}

/// Keys mirror the long flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub fasta: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub clstr: Option<PathBuf>,
    pub interactions: Option<PathBuf>,
    pub deterministic: Option<bool>,
    pub negatives: Option<CountOrWord>,
    pub pool: Option<String>,
    pub allow_reuse: Option<bool>,
    pub stratify: Option<bool>,
    pub fractions: Option<FractionsValue>,
    pub augment_n: Option<u32>,
    pub exclude_self: Option<bool>,
    pub k: Option<usize>,
    pub allow_any_k: Option<bool>,
    pub normalization: Option<String>,
    pub neighbors: Option<usize>,
    pub naive_seeds: Option<usize>,
    pub format: Option<String>,
}

impl ConfigFile {
    /// Load a config file. Relative paths inside it are taken relative to the
    /// file's own directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io_at(path, e))?;
        let mut cfg: ConfigFile = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.out,
            &mut cfg.fasta,
            &mut cfg.metadata,
            &mut cfg.clstr,
            &mut cfg.interactions,
        ] {
            if let Some(p) = p.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }
}

pub const DEFAULT_OUT: &str = "grandcgr-out";
pub const DEFAULT_THRESHOLD: f64 = 0.8;
pub const DEFAULT_K: usize = 4;
pub const DEFAULT_AUGMENT_N: u32 = 10;
pub const DEFAULT_NAIVE_SEEDS: usize = 1000;

#[derive(Debug, Clone)]
pub struct Common {
    pub out: PathBuf,
    pub seed: u64,
}

pub fn common(a: &CommonArgs, c: &ConfigFile) -> Common {
    Common {
        out: a
            .out
            .clone()
            .or(c.out.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        seed: a.seed.or(c.seed).unwrap_or(0),
    }
}

#[derive(Debug, Clone)]
pub struct Input {
    pub fasta: PathBuf,
    pub metadata: Option<PathBuf>,
}

pub fn input(a: &InputArgs, c: &ConfigFile) -> Result<Input> {
    Ok(Input {
        fasta: a
            .fasta
            .clone()
            .or(c.fasta.clone())
            .ok_or_else(|| CliError::Usage("--fasta is required".into()))?,
        metadata: a.metadata.clone().or(c.metadata.clone()),
    })
}

#[derive(Debug, Clone)]
pub struct ClusterCfg {
    pub threshold: f64,
    pub clstr: Option<PathBuf>,
}

pub fn cluster(a: &ClusterArgs, c: &ConfigFile) -> Result<ClusterCfg> {
    let threshold = a.threshold.or(c.threshold).unwrap_or(DEFAULT_THRESHOLD);
    check_threshold(threshold).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(ClusterCfg {
        threshold,
        clstr: a.clstr.clone().or(c.clstr.clone()),
    })
}

pub fn interactions(a: &InteractionArgs, c: &ConfigFile) -> Result<PathBuf> {
    a.interactions
        .clone()
        .or(c.interactions.clone())
        .ok_or_else(|| CliError::Usage("--interactions is required".into()))
}

pub fn reduce(a: &ReduceArgs, c: &ConfigFile) -> DegreeOneOrder {
    if a.deterministic.or(c.deterministic).unwrap_or(false) {
        DegreeOneOrder::Ascending
    } else {
        DegreeOneOrder::Random
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeCount {
    MatchPositives,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct NegativeCfg {
    pub count: NegativeCount,
    pub pool: NegativePool,
    pub allow_reuse: bool,
    pub stratify: bool,
}

fn parse_count(s: &str) -> Result<NegativeCount> {
    if s.eq_ignore_ascii_case("match") {
        return Ok(NegativeCount::MatchPositives);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(NegativeCount::Fixed(n)),
        _ => Err(CliError::Usage(format!(
            "--negatives must be a positive count or `match`, got {s:?}"
        ))),
    }
}

pub fn negatives(a: &NegativeArgs, c: &ConfigFile) -> Result<NegativeCfg> {
    let count = match (&a.negatives, &c.negatives) {
        (Some(s), _) => parse_count(s)?,
        (None, Some(CountOrWord::Count(n))) => parse_count(&n.to_string())?,
        (None, Some(CountOrWord::Word(w))) => parse_count(w)?,
        (None, None) => NegativeCount::MatchPositives,
    };
    let pool = match a.pool.clone().or(c.pool.clone()).as_deref() {
        None | Some("freed") => NegativePool::Freed,
        Some("all") => NegativePool::All,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--pool must be `freed` or `all`, got {other:?}"
            )))
        }
    };
    Ok(NegativeCfg {
        count,
        pool,
        allow_reuse: a.allow_reuse.or(c.allow_reuse).unwrap_or(false),
        stratify: a.stratify.or(c.stratify).unwrap_or(false),
    })
}

pub fn split(a: &SplitArgs, c: &ConfigFile) -> Result<Fractions> {
    let f = match (&a.fractions, &c.fractions) {
        (Some(s), _) | (None, Some(FractionsValue::Text(s))) => {
            s.parse::<Fractions>().map_err(CliError::Usage)?
        }
        (None, Some(FractionsValue::List(v))) => match v[..] {
            [train, validation, test] => Fractions {
                train,
                validation,
                test,
            },
            _ => {
                return Err(CliError::Usage(
                    "fractions needs exactly three values".into(),
                ))
            }
        },
        (None, None) => Fractions::default(),
    };
    f.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(f)
}

#[derive(Debug, Clone, Copy)]
pub struct AugmentCfg {
    pub n: u32,
    pub mode: SubstitutionMode,
}

pub fn augment(a: &AugmentArgs, c: &ConfigFile) -> AugmentCfg {
    AugmentCfg {
        n: a.augment_n.or(c.augment_n).unwrap_or(DEFAULT_AUGMENT_N),
        mode: if a.exclude_self.or(c.exclude_self).unwrap_or(false) {
            SubstitutionMode::ExcludeSelf
        } else {
            SubstitutionMode::IncludeSelf
        },
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EncodeCfg {
    pub k: usize,
    pub normalization: Normalization,
}

pub fn encode(a: &EncodeArgs, c: &ConfigFile) -> Result<EncodeCfg> {
    let k = a.k.or(c.k).unwrap_or(DEFAULT_K);
    let any = a.allow_any_k.or(c.allow_any_k).unwrap_or(false);
    if any {
        if !(1..=MAX_CGR_K as usize).contains(&k) {
            return Err(CliError::Usage(format!(
                "k must be in 1..={MAX_CGR_K}, got {k}"
            )));
        }
    } else if !(4..=7).contains(&k) {
        return Err(CliError::Usage(format!(
            "k must be in 4..=7 (use --allow-any-k for others), got {k}"
        )));
    }
    let normalization = match a
        .normalization
        .clone()
        .or(c.normalization.clone())
        .as_deref()
    {
        None | Some("max") => Normalization::Max,
        Some("sum") => Normalization::Sum,
        Some(other) => {
            return Err(CliError::Usage(format!(
                "--normalization must be `max` or `sum`, got {other:?}"
            )))
        }
    };
    Ok(EncodeCfg { k, normalization })
}

pub fn audit(a: &AuditArgs, c: &ConfigFile) -> Result<usize> {
    let k = a
        .neighbors
        .or(c.neighbors)
        .unwrap_or(grandcgr::audit::DEFAULT_NEIGHBORS);
    if k == 0 {
        return Err(CliError::Usage("--neighbors must be at least 1".into()));
    }
    Ok(k)
}

pub fn stats(a: &StatsArgs, c: &ConfigFile) -> Result<usize> {
    let n = a
        .naive_seeds
        .or(c.naive_seeds)
        .unwrap_or(DEFAULT_NAIVE_SEEDS);
    if n == 0 {
        return Err(CliError::Usage("--naive-seeds must be at least 1".into()));
    }
    Ok(n)
}

pub fn format(a: &RenderArgs, c: &ConfigFile) -> Result<GridFormat> {
    a.format
        .clone()
        .or(c.format.clone())
        .map(|f| f.parse().map_err(CliError::Usage))
        .transpose()
        .map(Option::unwrap_or_default)
}
