//! One function per pipeline stage. Stages talk to each other only through
//! files in the output directory, so any stage can be rerun or replaced.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use grandcgr::audit::bias_report;
use grandcgr::augment::{augment_pairs, AugmentOptions};
use grandcgr::cgr::{
    combine_genome, diff_grids, encode, normalize_with, stack_pair, write_diff, write_grid_csv,
    write_pgm, GridFormat, NormalizedCgr,
};
use grandcgr::cluster::{
    greedy_cluster, parse_clstr, read_cluster_tsv, write_cluster_tsv, Cluster,
};
use grandcgr::dataset::{
    generate_negatives, negative_pool, read_pairs_tsv, realize_positives, split_dataset,
    write_pairs_tsv, LabeledPair, NegativeOptions, Split, SplitManifest,
};
use grandcgr::grand::{
    build_graph, grand_reduce, read_edge_tsv, read_matching_tsv, retention_report, write_edge_tsv,
    write_matching_tsv, DegreeOneOrder, Matching, Topology,
};
use grandcgr::rng::{derive_seed, stage_seed};
use grandcgr::sequence::{
    apply_metadata, parse_fasta, parse_interactions, parse_metadata, write_fasta, CodonTable,
    InteractionRecord, SequenceRecord,
};
use grandcgr::tensorio::{
    encode_cgrt, sha256_hex, write_manifest, CgrtFile, CgrtSample, Dtype, FileDigest, RunManifest,
};

use crate::config::{AugmentCfg, ClusterCfg, Common, EncodeCfg, Input, NegativeCfg, NegativeCount};
use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CLUSTERS: &str = "clusters.tsv";
pub const SEQUENCES: &str = "sequences.fasta";
pub const GRAPH: &str = "graph.tsv";
pub const MATCHING: &str = "matching.tsv";
pub const POSITIVES: &str = "positives.tsv";
pub const PAIRS: &str = "pairs.tsv";
pub const SPLIT: &str = "split.json";
pub const AUGMENTED: &str = "augmented.tsv";
pub const AUGMENTED_FASTA: &str = "augmented.fasta";
pub const AUGMENT_SKIPPED: &str = "augment_skipped.tsv";
pub const BIAS_REPORT: &str = "bias_report.json";
pub const RETENTION: &str = "retention.json";
pub const MANIFEST: &str = "manifest.json";

/// RFC 3339 UTC time, from `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> String {
    use time::format_description::well_known::Rfc3339;
    use time::OffsetDateTime;
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|s| OffsetDateTime::from_unix_timestamp(s).ok())
        .unwrap_or_else(OffsetDateTime::now_utc);
    t.format(&Rfc3339).unwrap_or_default()
}

/// Bookkeeping for one stage run: reads and writes go through it so the
/// manifest records every file with its digest.
pub struct Stage {
    out: PathBuf,
    seed: u64,
    manifest: RunManifest,
}

impl Stage {
    pub fn new(name: &str, common: &Common) -> Result<Self> {
        fs::create_dir_all(&common.out).map_err(|e| CliError::io_at(&common.out, e))?;
        let seed = stage_seed(common.seed, name);
        let mut manifest = RunManifest::new(name, TOOL_VERSION);
        manifest.created_at = timestamp();
        manifest.seeds.insert("base".into(), common.seed);
        manifest.seeds.insert(name.into(), seed);
        Ok(Self {
            out: common.out.clone(),
            seed,
            manifest,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn label(&self, path: &Path) -> String {
        path.strip_prefix(&self.out)
            .unwrap_or(path)
            .display()
            .to_string()
    }

    /// Read an input file and record its digest under `key`.
    pub fn read(&mut self, key: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| CliError::io_at(path, e))?;
        self.manifest.inputs.insert(
            key.into(),
            FileDigest {
                path: self.label(path),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(bytes)
    }

    /// Read a file of the output directory written by an earlier stage.
    pub fn read_artifact(&mut self, name: &str) -> Result<Vec<u8>> {
        let path = self.path(name);
        if !path.exists() {
            return Err(CliError::io_at(
                &path,
                "missing; run the stage that produces it first",
            ));
        }
        self.read(name, &path)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| CliError::io_at(&path, e))?;
        self.manifest.outputs.insert(
            name.into(),
            FileDigest {
                path: name.into(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            },
        );
        Ok(())
    }

    pub fn count(&mut self, key: &str, n: usize) {
        self.manifest.counts.insert(key.into(), n as u64);
    }

    pub fn param(&mut self, key: &str, v: serde_json::Value) {
        self.manifest.parameters.insert(key.into(), v);
    }

    pub fn finish(self) -> Result<RunManifest> {
        let path = self
            .out
            .join(format!("{}.manifest.json", self.manifest.stage));
        write_manifest(&path, &self.manifest).map_err(|e| CliError::io_at(&path, e))?;
        Ok(self.manifest)
    }
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn read_records(stage: &mut Stage, key: &str, path: &Path) -> Result<Vec<SequenceRecord>> {
    let bytes = stage.read(key, path)?;
    parse_fasta(bytes.as_slice()).map_err(|e| CliError::data_at(path, e))
}

fn read_artifact_records(stage: &mut Stage, name: &str) -> Result<Vec<SequenceRecord>> {
    let path = stage.path(name);
    read_records(stage, name, &path)
}

fn read_clusters(stage: &mut Stage) -> Result<Vec<Cluster>> {
    let bytes = stage.read_artifact(CLUSTERS)?;
    read_cluster_tsv(bytes.as_slice()).map_err(|e| CliError::data_at(&stage.path(CLUSTERS), e))
}

fn read_interactions(stage: &mut Stage, path: &Path) -> Result<Vec<InteractionRecord>> {
    let bytes = stage.read("interactions", path)?;
    parse_interactions(bytes.as_slice()).map_err(|e| CliError::data_at(path, e))
}

fn read_pairs(stage: &mut Stage, name: &str) -> Result<Vec<LabeledPair>> {
    let bytes = stage.read_artifact(name)?;
    read_pairs_tsv(bytes.as_slice()).map_err(|e| CliError::data_at(&stage.path(name), e))
}

fn read_matching(stage: &mut Stage) -> Result<Matching> {
    let bytes = stage.read_artifact(MATCHING)?;
    read_matching_tsv(bytes.as_slice()).map_err(|e| CliError::data_at(&stage.path(MATCHING), e))
}

fn read_split(stage: &mut Stage) -> Result<SplitManifest> {
    let bytes = stage.read_artifact(SPLIT)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::data_at(&stage.path(SPLIT), e))
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

pub fn cluster(common: &Common, input: &Input, cfg: &ClusterCfg) -> Result<RunManifest> {
    let mut st = Stage::new("cluster", common)?;
    let mut records = read_records(&mut st, "fasta", &input.fasta)?;
    if let Some(meta_path) = &input.metadata {
        let bytes = st.read("metadata", meta_path)?;
        let meta = parse_metadata(bytes.as_slice()).map_err(|e| CliError::data_at(meta_path, e))?;
        let touched = apply_metadata(&mut records, &meta);
        st.count("metadata_rows_applied", touched);
    }
    let clusters = match &cfg.clstr {
        Some(path) => {
            let bytes = st.read("clstr", path)?;
            let clusters = parse_clstr(bytes.as_slice()).map_err(|e| CliError::data_at(path, e))?;
            let known: HashSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
            if let Some(m) = clusters
                .iter()
                .flat_map(|c| &c.member_ids)
                .find(|m| !known.contains(m.as_str()))
            {
                return Err(CliError::data_at(
                    path,
                    format!("cluster member {m:?} has no sequence in the FASTA input"),
                ));
            }
            let members: HashSet<&str> = clusters
                .iter()
                .flat_map(|c| &c.member_ids)
                .map(String::as_str)
                .collect();
            st.count("unclustered_sequences", known.difference(&members).count());
            st.param("cluster_source", json!("clstr"));
            clusters
        }
        None => {
            st.manifest.threshold = Some(cfg.threshold);
            st.param("cluster_source", json!("greedy"));
            greedy_cluster(&records, cfg.threshold).map_err(|e| CliError::Data(e.to_string()))?
        }
    };
    st.count("sequences", records.len());
    st.count("clusters", clusters.len());
    st.write(CLUSTERS, &to_bytes(|b| write_cluster_tsv(b, &clusters)))?;
    st.write(SEQUENCES, &to_bytes(|b| write_fasta(b, &records)))?;
    st.finish()
}

pub fn reduce(common: &Common, interactions: &Path, order: DegreeOneOrder) -> Result<RunManifest> {
    let mut st = Stage::new("reduce", common)?;
    let clusters = read_clusters(&mut st)?;
    let ints = read_interactions(&mut st, interactions)?;
    let (graph, report) =
        build_graph(&ints, &clusters).map_err(|e| CliError::Data(e.to_string()))?;
    if !report.unknown_genes.is_empty() {
        let genes: std::collections::BTreeSet<&str> = report
            .unknown_genes
            .iter()
            .map(|(_, g)| g.as_str())
            .collect();
        let shown: Vec<&str> = genes.iter().take(5).copied().collect();
        eprintln!(
            "warning: {} interactions skipped; {} genes have no sequence (e.g. {})",
            report.skipped_interactions,
            genes.len(),
            shown.join(", ")
        );
        st.count("genes_without_sequence", genes.len());
    }
    let matching = grand_reduce(&graph, st.seed(), order);
    let positives = realize_positives(&matching, &graph, derive_seed(st.seed(), &[1]))
        .map_err(|e| CliError::Data(e.to_string()))?;

    st.param(
        "degree_one_order",
        json!(format!("{order:?}").to_lowercase()),
    );
    st.count("interactions", ints.len());
    st.count("nodes", graph.n_nodes());
    st.count("edges", graph.n_edges());
    st.count("self_edges_dropped", graph.dropped_self_edges);
    st.count("skipped_interactions", report.skipped_interactions);
    st.count("retained_pairs", matching.len());
    st.count("freed_clusters", matching.freed_clusters.len());
    st.count("positives", positives.len());
    st.write(GRAPH, &to_bytes(|b| write_edge_tsv(b, &graph)))?;
    st.write(MATCHING, &to_bytes(|b| write_matching_tsv(b, &matching)))?;
    st.write(POSITIVES, &to_bytes(|b| write_pairs_tsv(b, &positives)))?;
    st.finish()
}

pub fn negatives(common: &Common, interactions: &Path, cfg: &NegativeCfg) -> Result<RunManifest> {
    let mut st = Stage::new("negatives", common)?;
    let clusters = read_clusters(&mut st)?;
    let matching = read_matching(&mut st)?;
    let positives = read_pairs(&mut st, POSITIVES)?;
    let records = read_artifact_records(&mut st, SEQUENCES)?;
    let ints = read_interactions(&mut st, interactions)?;

    let count = match cfg.count {
        NegativeCount::MatchPositives if positives.is_empty() => {
            return Err(CliError::Data(
                "no positive pairs to match with negatives".into(),
            ))
        }
        NegativeCount::MatchPositives => positives.len(),
        NegativeCount::Fixed(n) => n,
    };
    let pool = negative_pool(&matching, &clusters, cfg.pool);
    let opts = NegativeOptions {
        count,
        seed: st.seed(),
        stratify: cfg.stratify,
        allow_reuse: cfg.allow_reuse,
    };
    let negatives = generate_negatives(&pool, &clusters, &records, &ints, &opts)
        .map_err(|e| CliError::Data(e.to_string()))?;

    st.param("pool", json!(cfg.pool));
    st.param("stratify", json!(cfg.stratify));
    st.param("allow_reuse", json!(cfg.allow_reuse));
    st.count("pool_clusters", pool.len());
    st.count("positives", positives.len());
    st.count("negatives", negatives.len());
    let pairs: Vec<LabeledPair> = positives.into_iter().chain(negatives).collect();
    st.write(PAIRS, &to_bytes(|b| write_pairs_tsv(b, &pairs)))?;
    st.finish()
}

fn membership(split: &SplitManifest) -> BTreeMap<String, Vec<String>> {
    Split::ALL
        .iter()
        .map(|&s| (s.to_string(), split.ids(s).to_vec()))
        .collect()
}

pub fn split(common: &Common, fractions: grandcgr::dataset::Fractions) -> Result<RunManifest> {
    let mut st = Stage::new("split", common)?;
    let pairs = read_pairs(&mut st, PAIRS)?;
    let mut manifest =
        split_dataset(&pairs, fractions, st.seed()).map_err(|e| CliError::Data(e.to_string()))?;
    let pairs_digest = st.manifest.inputs[PAIRS].sha256.clone();
    manifest
        .provenance
        .insert("pairs_sha256".into(), pairs_digest);
    st.param("fractions", json!(fractions));
    for s in Split::ALL {
        st.count(s.as_str(), manifest.ids(s).len());
    }
    st.manifest.splits = Some(membership(&manifest));
    st.write(SPLIT, &json_bytes(&manifest))?;
    st.finish()
}

pub fn augment(common: &Common, cfg: &AugmentCfg) -> Result<RunManifest> {
    let mut st = Stage::new("augment", common)?;
    let pairs = read_pairs(&mut st, PAIRS)?;
    let split = read_split(&mut st)?;
    let records = read_artifact_records(&mut st, SEQUENCES)?;
    let train: Vec<LabeledPair> = pairs
        .into_iter()
        .filter(|p| split.split_of(&p.pair_id()) == Some(Split::Train))
        .collect();
    let report = if cfg.n == 0 {
        Default::default()
    } else {
        let opts = AugmentOptions {
            n_per_pair: cfg.n,
            seed: st.seed(),
            mode: cfg.mode,
        };
        augment_pairs(&train, &records, &CodonTable::standard(), &opts)
            .map_err(|e| CliError::Data(e.to_string()))?
    };
    if !report.skipped.is_empty() {
        eprintln!(
            "warning: {} training pairs not augmented (see {AUGMENT_SKIPPED})",
            report.skipped.len()
        );
    }
    let labeled: Vec<LabeledPair> = report.pairs.iter().map(|p| p.to_labeled()).collect();
    let synth: Vec<SequenceRecord> = report
        .pairs
        .iter()
        .flat_map(|p| [p.record_a.clone(), p.record_b.clone()])
        .collect();
    let mut skipped = String::from("#pair_id\treason\n");
    for s in &report.skipped {
        skipped.push_str(&format!("{}\t{}\n", s.pair_id, s.reason));
    }
    st.param("replicates_per_pair", json!(cfg.n));
    st.param("substitution", json!(cfg.mode));
    st.count("train_pairs", train.len());
    st.count("augmented_pairs", labeled.len());
    st.count("skipped_augmentations", report.skipped.len());
    st.write(AUGMENTED, &to_bytes(|b| write_pairs_tsv(b, &labeled)))?;
    st.write(AUGMENTED_FASTA, &to_bytes(|b| write_fasta(b, &synth)))?;
    st.write(AUGMENT_SKIPPED, skipped.as_bytes())?;
    st.finish()
}

pub fn encode_splits(common: &Common, cfg: &EncodeCfg) -> Result<RunManifest> {
    let mut st = Stage::new("encode", common)?;
    let pairs = read_pairs(&mut st, PAIRS)?;
    let split = read_split(&mut st)?;
    let mut records = read_artifact_records(&mut st, SEQUENCES)?;
    let mut augmented = Vec::new();
    if st.path(AUGMENTED).exists() {
        augmented = read_pairs(&mut st, AUGMENTED)?;
        if st.path(AUGMENTED_FASTA).exists() {
            records.extend(read_artifact_records(&mut st, AUGMENTED_FASTA)?);
        }
    }
    let by_pair: HashMap<String, &LabeledPair> = pairs.iter().map(|p| (p.pair_id(), p)).collect();
    let mut per_split: BTreeMap<Split, Vec<&LabeledPair>> = BTreeMap::new();
    for s in Split::ALL {
        let list = split
            .ids(s)
            .iter()
            .map(|id| {
                by_pair.get(id).copied().ok_or_else(|| {
                    CliError::data_at(&st.path(SPLIT), format!("pair {id:?} is not in {PAIRS}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_split.insert(s, list);
    }
    for a in &augmented {
        let parent = a.parent.as_deref().unwrap_or("");
        if split.split_of(parent) != Some(Split::Train) {
            return Err(CliError::data_at(
                &st.path(AUGMENTED),
                format!(
                    "synthetic pair {} comes from {parent:?}, which is not a training pair",
                    a.pair_id()
                ),
            ));
        }
        per_split.get_mut(&Split::Train).expect("train").push(a);
    }

    let seqs: HashMap<&str, &str> = records
        .iter()
        .map(|r| (r.id.as_str(), r.cds.as_str()))
        .collect();
    let mut genes: Vec<&str> = per_split
        .values()
        .flatten()
        .flat_map(|p| [p.gene_a.as_str(), p.gene_b.as_str()])
        .collect();
    genes.sort_unstable();
    genes.dedup();
    if let Some(g) = genes.iter().find(|g| !seqs.contains_key(*g)) {
        return Err(CliError::Data(format!(
            "gene {g:?} has no sequence in {SEQUENCES} or {AUGMENTED_FASTA}"
        )));
    }
    let grids: Vec<(&str, NormalizedCgr, u64)> = genes
        .par_iter()
        .map(|&g| {
            let grid = encode(seqs[g].as_bytes(), cfg.k)
                .map_err(|e| CliError::Data(format!("gene {g:?}: {e}")))?;
            Ok((g, normalize_with(&grid, cfg.normalization), grid.skipped))
        })
        .collect::<Result<_>>()?;
    let skipped_windows: u64 = grids.iter().map(|g| g.2).sum();
    let grids: HashMap<&str, NormalizedCgr> = grids.into_iter().map(|(g, n, _)| (g, n)).collect();

    for (s, list) in &per_split {
        let mut file = CgrtFile::new(Dtype::Normalized, cfg.k as u8, 2);
        for p in list {
            let t = stack_pair(
                grids[p.gene_a.as_str()].clone(),
                grids[p.gene_b.as_str()].clone(),
                p.label,
            )
            .expect("all grids share k");
            file.samples.push(CgrtSample::from_paired(p.pair_id(), &t));
        }
        let bytes = encode_cgrt(&file).map_err(|e| CliError::Data(e.to_string()))?;
        st.count(&format!("{s}_samples"), list.len());
        st.write(&format!("{s}.cgrt"), &bytes)?;
    }
    st.manifest.k = Some(cfg.k as u8);
    st.param(
        "normalization",
        json!(format!("{:?}", cfg.normalization).to_lowercase()),
    );
    st.count("genes_encoded", genes.len());
    st.count("augmented_pairs", augmented.len());
    st.manifest
        .counts
        .insert("skipped_windows".into(), skipped_windows);
    st.finish()
}

pub fn audit(common: &Common, neighbors: usize) -> Result<RunManifest> {
    let mut st = Stage::new("audit", common)?;
    let pairs = read_pairs(&mut st, PAIRS)?;
    let split = read_split(&mut st)?;
    let records = read_artifact_records(&mut st, SEQUENCES)?;
    let report = bias_report(&pairs, &records, &split, neighbors)
        .map_err(|e| CliError::Data(e.to_string()))?;
    if report.warn {
        eprintln!(
            "WARN: organism identity alone predicts labels with accuracy {:.4} (> {})",
            report.accuracy, report.warn_threshold
        );
    }
    st.param("neighbors", json!(neighbors));
    st.param("masked_accuracy", json!(report.accuracy));
    st.param("warn", json!(report.warn));
    st.count("organisms", report.vocabulary_size);
    st.write(BIAS_REPORT, &json_bytes(&report))?;
    st.finish()
}

pub fn stats(common: &Common, naive_seeds: usize) -> Result<RunManifest> {
    let mut st = Stage::new("stats", common)?;
    let clusters = read_clusters(&mut st)?;
    let graph_bytes = st.read_artifact(GRAPH)?;
    let (_, rows) =
        read_edge_tsv(graph_bytes.as_slice()).map_err(|e| CliError::data_at(&st.path(GRAPH), e))?;
    // the edge list omits isolated clusters
    let topology = Topology::new(
        clusters.iter().map(|c| c.cluster_id),
        rows.iter().map(|&(a, b, _)| (a, b)),
    );
    let matching = read_matching(&mut st)?;
    matching
        .validate(&topology)
        .map_err(|e| CliError::data_at(&st.path(MATCHING), e))?;
    let seeds: Vec<u64> = (0..naive_seeds as u64)
        .map(|i| derive_seed(st.seed(), &[i]))
        .collect();
    let report = retention_report(&topology, &matching, &seeds)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let bytes = json_bytes(&report);
    print!("{}", String::from_utf8_lossy(&bytes));
    st.param("naive_seeds", json!(naive_seeds));
    st.count("grand_pairs", report.grand_pairs);
    st.write(RETENTION, &bytes)?;
    st.finish()
}

pub fn render(
    fasta: &Path,
    organism: Option<&str>,
    minus: Option<(&Path, Option<&str>)>,
    output: &Path,
    format: GridFormat,
    cfg: &EncodeCfg,
) -> Result<()> {
    let load = |path: &Path, organism: Option<&str>| -> Result<NormalizedCgr> {
        let bytes = fs::read(path).map_err(|e| CliError::io_at(path, e))?;
        let records = parse_fasta(bytes.as_slice()).map_err(|e| CliError::data_at(path, e))?;
        let seqs: Vec<&[u8]> = records
            .iter()
            .filter(|r| organism.is_none() || r.organism.as_deref() == organism)
            .map(|r| r.cds.as_bytes())
            .collect();
        if seqs.is_empty() {
            return Err(CliError::data_at(
                path,
                format!("no sequences match organism {organism:?}"),
            ));
        }
        combine_genome(&seqs, cfg.k, cfg.normalization).map_err(|e| CliError::data_at(path, e))
    };
    let io = |e: std::io::Error| CliError::io_at(output, e);
    let host = load(fasta, organism)?;
    match minus {
        Some((path, org)) => {
            let diff =
                diff_grids(&host, &load(path, org)?).map_err(|e| CliError::Data(e.to_string()))?;
            for p in write_diff(output, &diff).map_err(io)? {
                println!("{}", p.display());
            }
        }
        None => {
            let bytes = match format {
                GridFormat::Pgm => to_bytes(|b| write_pgm(b, &host)),
                GridFormat::Csv => to_bytes(|b| write_grid_csv(b, host.side(), host.values())),
            };
            fs::write(output, bytes).map_err(io)?;
            println!("{}", output.display());
        }
    }
    Ok(())
}

/// Fold stage manifests into the run manifest.
pub fn merge(stages: &[RunManifest]) -> RunManifest {
    let mut m = RunManifest::new("pipeline", TOOL_VERSION);
    m.created_at = timestamp();
    for s in stages {
        m.seeds.extend(s.seeds.clone());
        m.threshold = m.threshold.or(s.threshold);
        m.k = m.k.or(s.k);
        for (key, d) in &s.inputs {
            // artifacts of earlier stages are outputs, not inputs, of the run
            if !stages.iter().any(|o| o.outputs.contains_key(key)) {
                m.inputs.insert(key.clone(), d.clone());
            }
        }
        m.outputs.extend(s.outputs.clone());
        for (k, v) in &s.counts {
            m.counts.insert(format!("{}.{k}", s.stage), *v);
        }
        for (k, v) in &s.parameters {
            m.parameters.insert(format!("{}.{k}", s.stage), v.clone());
        }
        if s.splits.is_some() {
            m.splits = s.splits.clone();
        }
    }
    m
}
