//! Command-line definitions.
//!
//! Flags are optional at parse time so a `--config` file can supply them;
//! flags always win over config-file entries. Defaults are applied during
//! resolution, after the file has had its say.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use overlap_core::types::LanguageTag;

#[derive(Parser)]
#[command(
    name = "overlapctl",
    version,
    about = "Controlled vocabulary-overlap manipulation for bilingual tokenization experiments",
    after_help = "Set RUST_LOG=info (or debug) for verbose progress on stderr."
)]
pub struct Cli {
    /// Key-value config file (`key = value` lines); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Vocabulary sizes and overlap metrics for a corpus pair
    Stats(StatsArgs),
    /// Remap token indices under an overlap setting
    Remap(RemapArgs),
    /// Invert a remapped corpus back to base indices
    Invert(InvertArgs),
    /// Rank shared tokens by cross-lingual similarity and split the overlap
    Partition(PartitionArgs),
    /// Oracle accuracy per layer against cognate gold labels
    Layersweep(LayersweepArgs),
    /// Embedding-similarity analysis over high/low/control sets
    Analyze(AnalyzeArgs),
    /// McNemar test between two correctness vectors
    Mcnemar(McnemarArgs),
    /// Generate a deterministic synthetic corpus pair with dumps and labels
    Synth(SynthArgs),
    /// Byte- and character-per-token compression rates
    Compress(CompressArgs),
}

#[derive(Args)]
pub struct StatsArgs {
    /// L1 pre-tokenized corpus (one document per line, decimal ids)
    #[arg(long)]
    pub c1: Option<PathBuf>,
    /// L2 pre-tokenized corpus
    #[arg(long)]
    pub c2: Option<PathBuf>,
    /// Overlap setting: full, high, low or none [default: full]
    #[arg(long)]
    pub setting: Option<String>,
    /// Partition file (required for high/low)
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Base vocabulary size N; ids are validated against it when given
    #[arg(long)]
    pub base_size: Option<u32>,
    /// Comma-separated special token ids shared under every setting
    #[arg(long)]
    pub special_tokens: Option<String>,
    /// Report format: json, csv or tsv [default: json]
    #[arg(long)]
    pub format: Option<String>,
    /// Output file [default: stdout]
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RemapArgs {
    #[arg(long)]
    pub c1: Option<PathBuf>,
    #[arg(long)]
    pub c2: Option<PathBuf>,
    /// Overlap setting: full, high, low or none [default: full]
    #[arg(long)]
    pub setting: Option<String>,
    /// Partition file (required for high/low)
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Base vocabulary size N (required; offsets are +N)
    #[arg(long)]
    pub base_size: Option<u32>,
    /// Comma-separated special token ids shared under every setting
    #[arg(long)]
    pub special_tokens: Option<String>,
    /// Directory for c1_remapped.txt, c2_remapped.txt, remap_table.tsv and
    /// dense_index.tsv
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct InvertArgs {
    /// Remapped corpus to invert
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// remap_table.tsv produced by the remap command
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Language of the corpus: L1 or L2
    #[arg(long)]
    pub lang: Option<LanguageTag>,
    /// Output stream file
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub c1: Option<PathBuf>,
    #[arg(long)]
    pub c2: Option<PathBuf>,
    /// Embedding dump (JSON Lines)
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Layer to use when the dump holds several
    #[arg(long)]
    pub layer: Option<u32>,
    /// Minimum occurrences in both corpora for a token to be scored
    /// [default: 100]
    #[arg(long)]
    pub min_occ: Option<u64>,
    /// Occurrences pooled per (token, language) [default: 100]
    #[arg(long)]
    pub cap: Option<usize>,
    /// Directory for ranking.tsv and partition.tsv
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct LayersweepArgs {
    /// Embedding dump file(s); layers from all files are merged
    #[arg(long)]
    pub dump: Vec<PathBuf>,
    /// Gold labels: TSV token_id<TAB>{cognate|noncognate}
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Occurrences pooled per (token, language) [default: 100]
    #[arg(long)]
    pub cap: Option<usize>,
    /// Report format: json, csv or tsv [default: json]
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Ranking file produced by the partition command
    #[arg(long)]
    pub ranking: Option<PathBuf>,
    #[arg(long)]
    pub c1: Option<PathBuf>,
    #[arg(long)]
    pub c2: Option<PathBuf>,
    /// Trained-model embedding dump at the analysis layer
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Layer to use when the dump holds several
    #[arg(long)]
    pub layer: Option<u32>,
    /// Pairs per analysis set [default: 500]
    #[arg(long, short)]
    pub k: Option<usize>,
    /// Seed for the control-pair sample [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bonferroni family size m (required; never inferred)
    #[arg(long)]
    pub bonferroni_m: Option<u32>,
    /// Occurrences pooled per (token, language) [default: 100]
    #[arg(long)]
    pub cap: Option<usize>,
    /// Use the pooled-variance Student t-test instead of Welch
    #[arg(long)]
    pub equal_var: bool,
    /// Report format: json or csv [default: json]
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct McnemarArgs {
    /// First correctness vector (one 0/1 per line)
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Second correctness vector over the same instances
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Largest discordant-pair total handled by the exact binomial test
    /// [default: 25]
    #[arg(long)]
    pub exact_max: Option<u64>,
    /// Report format: json, csv or tsv [default: json]
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Base vocabulary size [default: 400]
    #[arg(long)]
    pub vocab_size: Option<u32>,
    /// Documents per language [default: 200]
    #[arg(long)]
    pub docs_per_language: Option<usize>,
    /// Tokens per document [default: 40]
    #[arg(long)]
    pub doc_length: Option<usize>,
    /// Fraction of shared tokens planted as cognates [default: 0.5]
    #[arg(long)]
    pub cognate_fraction: Option<f64>,
    /// Seed for corpora, labels and dumps [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding dimension [default: 16]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Occurrence vectors per (token, language, layer) [default: 8]
    #[arg(long)]
    pub occurrences: Option<usize>,
    /// Per-occurrence Gaussian noise sigma [default: 0.1]
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Layers to emit, e.g. `1-12` or `1,5,6` [default: planted layer only]
    #[arg(long)]
    pub layers: Option<String>,
    /// Layer carrying the planted geometry [default: 5]
    #[arg(long)]
    pub planted_layer: Option<u32>,
    /// Directory for c1.txt, c2.txt, gold.tsv, dump.jsonl and manifest.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompressArgs {
    /// Raw UTF-8 text file
    #[arg(long)]
    pub text: Option<PathBuf>,
    /// Token stream of the same text
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    /// Report format: json, csv or tsv [default: json]
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}
