use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "grandcgr",
    version,
    about = "Build non-redundant host/pathogen interaction datasets as CGR tensors"
)]
pub struct Cli {
    /// TOML file whose keys are flag names; flags and environment win over it.
    #[arg(long, global = true, env = "GRANDCGR_CONFIG")]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, env = "GRANDCGR_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster sequences by nucleotide identity, or import a .clstr file.
    Cluster {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
    },
    /// Build the cluster graph and reduce it to a matching (GRAND).
    Reduce {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        interactions: InteractionArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// Sample negative pairs and write the labelled pairs table.
    Negatives {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        interactions: InteractionArgs,
        #[command(flatten)]
        negatives: NegativeArgs,
    },
    /// Split labelled pairs into train, validation and test.
    Split {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Add synonymous-substitution replicates of the training pairs.
    Augment {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        augment: AugmentArgs,
    },
    /// Encode every split as a two-channel CGRT tensor file.
    Encode {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        encode: EncodeArgs,
    },
    /// Species-masking bias audit with a nearest-neighbour probe.
    Audit {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        audit: AuditArgs,
    },
    /// Render a combined CGR, or the difference of two, as PGM or CSV.
    Render(RenderArgs),
    /// Compare GRAND retention with the naive baseline over many seeds.
    Stats {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Run cluster, reduce, negatives, split, augment, encode, audit and stats.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        interactions: InteractionArgs,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[command(flatten)]
        negatives: NegativeArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        augment: AugmentArgs,
        #[command(flatten)]
        encode: EncodeArgs,
        #[command(flatten)]
        audit: AuditArgs,
        #[command(flatten)]
        stats: StatsArgs,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Directory holding stage artifacts.
    #[arg(long, env = "GRANDCGR_OUT")]
    pub out: Option<PathBuf>,
    /// Base seed; each stage derives its own from it.
    #[arg(long, env = "GRANDCGR_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct InputArgs {
    /// Coding sequences (FASTA, optional organism=/role=/superkingdom= annotations).
    #[arg(long, env = "GRANDCGR_FASTA")]
    pub fasta: Option<PathBuf>,
    /// Sidecar TSV: id, organism, role, superkingdom.
    #[arg(long, env = "GRANDCGR_METADATA")]
    pub metadata: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ClusterArgs {
    /// Identity threshold in [0.5, 1].
    #[arg(long, env = "GRANDCGR_THRESHOLD")]
    pub threshold: Option<f64>,
    /// Use clusters from an external .clstr file instead of clustering.
    #[arg(long, env = "GRANDCGR_CLSTR")]
    pub clstr: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct InteractionArgs {
    /// Known interactions: gene_a, gene_b, evidence (tab-separated).
    #[arg(long, env = "GRANDCGR_INTERACTIONS")]
    pub interactions: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ReduceArgs {
    /// Visit degree-one clusters in ascending id order instead of at random.
    #[arg(long, env = "GRANDCGR_DETERMINISTIC", num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct NegativeArgs {
    /// Number of negatives, or `match` for one per positive.
    #[arg(long, env = "GRANDCGR_NEGATIVES")]
    pub negatives: Option<String>,
    /// Clusters to draw from: `freed` or `all`.
    #[arg(long, env = "GRANDCGR_POOL")]
    pub pool: Option<String>,
    /// Let a cluster appear in several negatives.
    #[arg(long, env = "GRANDCGR_ALLOW_REUSE", num_args = 0..=1, default_missing_value = "true")]
    pub allow_reuse: Option<bool>,
    /// Pair host clusters with pathogen clusters.
    #[arg(long, env = "GRANDCGR_STRATIFY", num_args = 0..=1, default_missing_value = "true")]
    pub stratify: Option<bool>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SplitArgs {
    /// train,validation,test fractions.
    #[arg(long, env = "GRANDCGR_FRACTIONS")]
    pub fractions: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct AugmentArgs {
    /// Synthetic replicates per training pair (0 disables).
    #[arg(long, env = "GRANDCGR_AUGMENT_N")]
    pub augment_n: Option<u32>,
    /// Never redraw a codon as itself.
    #[arg(long, env = "GRANDCGR_EXCLUDE_SELF", num_args = 0..=1, default_missing_value = "true")]
    pub exclude_self: Option<bool>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct EncodeArgs {
    /// k-mer length; 4 to 7 unless --allow-any-k.
    #[arg(long, env = "GRANDCGR_K")]
    pub k: Option<usize>,
    /// Accept any k from 1 to 12.
    #[arg(long, env = "GRANDCGR_ALLOW_ANY_K", num_args = 0..=1, default_missing_value = "true")]
    pub allow_any_k: Option<bool>,
    /// Per-image normalization: `max` or `sum`.
    #[arg(long, env = "GRANDCGR_NORMALIZATION")]
    pub normalization: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct AuditArgs {
    /// Neighbours consulted by the masked classifier.
    #[arg(long, env = "GRANDCGR_NEIGHBORS")]
    pub neighbors: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct StatsArgs {
    /// Naive-baseline runs to compare against.
    #[arg(long, env = "GRANDCGR_NAIVE_SEEDS")]
    pub naive_seeds: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct RenderArgs {
    /// Sequences to combine.
    #[arg(long, env = "GRANDCGR_FASTA")]
    pub fasta: Option<PathBuf>,
    /// Keep only sequences of this organism.
    #[arg(long)]
    pub organism: Option<String>,
    /// Sequences to subtract; renders a difference grid.
    #[arg(long)]
    pub minus_fasta: Option<PathBuf>,
    /// Organism to subtract (from --minus-fasta, or --fasta when absent).
    #[arg(long)]
    pub minus_organism: Option<String>,
    /// Output file, or file stem for a difference grid.
    #[arg(long)]
    pub output: PathBuf,
    /// `pgm` or `csv`.
    #[arg(long)]
    pub format: Option<String>,
    #[command(flatten)]
    pub encode: EncodeArgs,
}
