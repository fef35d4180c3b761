//! Subcommand implementations.
//!
//! Every command is a pure function of its resolved configuration and input
//! files: reports embed a provenance block (tool version, config digest,
//! input digests) and reruns produce byte-identical outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::warn;
use serde::Serialize;

use overlap_core::corpus::{extract_language_vocab, load_pretokenized, TokenizedCorpus};
use overlap_core::embed::{
    build_ranking, layer_sweep, partition_overlap, read_gold, write_dump, write_gold, DumpSet,
    EmbeddingDump, SimilarityRanking,
};
use overlap_core::remap::{
    apply_remap, build_remap, dense_index, native_overlap, RemapTableFile,
};
use overlap_core::stats::{
    build_analysis_sets, compression_rates, discordant_counts, effective_size, iou_from_sizes,
    mcnemar_with_threshold, similarity_analysis, text_counts, ExcludedPair, McNemarResult,
    SetSimilarities, StatResult, TTestKind,
};
use overlap_core::synth::{
    generate_synthetic_pair, planted_dump, PlantedDumpConfig, SyntheticConfig,
};
use overlap_core::types::{LanguageTag, OverlapPartition, OverlapSetting, TokenId, Vocabulary};

use crate::cli::{
    AnalyzeArgs, CompressArgs, InvertArgs, LayersweepArgs, McnemarArgs, PartitionArgs, RemapArgs,
    StatsArgs, SynthArgs,
};
use crate::config::FileConfig;
use crate::output::{
    emit, fixed6, tabular_report, to_json_bytes, write_atomic, Provenance, ReportFormat,
};
use crate::partition_io;

fn load_corpus(path: &Path, language: LanguageTag, bound: Option<u32>) -> Result<TokenizedCorpus> {
    load_pretokenized(path, language, bound)
        .with_context(|| format!("loading corpus {}", path.display()))
}

fn resolve_format(cfg: &mut FileConfig, flag: Option<&String>) -> Result<ReportFormat> {
    match cfg.string("format", flag) {
        Some(raw) => raw.parse(),
        None => Ok(ReportFormat::Json),
    }
}

fn resolve_setting(cfg: &mut FileConfig, flag: Option<&String>) -> Result<OverlapSetting> {
    let raw = cfg
        .string("setting", flag)
        .unwrap_or_else(|| "full".to_string());
    Ok(raw.parse::<OverlapSetting>()?)
}

/// Partition for a setting: the file when given, otherwise the native
/// overlap with everything unscored (enough for `full` and `none`).
fn resolve_partition(
    setting: OverlapSetting,
    partition_path: Option<&Path>,
    v1: &Vocabulary,
    v2: &Vocabulary,
) -> Result<OverlapPartition> {
    match partition_path {
        Some(path) => {
            let partition = partition_io::load(path)?;
            let native = native_overlap(v1, v2);
            if partition.native() != native.native() {
                bail!(
                    "partition {} covers {} tokens but the corpora share {}",
                    path.display(),
                    partition.native().len(),
                    native.native().len()
                );
            }
            Ok(partition)
        }
        None => {
            if matches!(setting, OverlapSetting::HighSim | OverlapSetting::LowSim) {
                bail!("setting {setting} requires --partition (produced by the partition command)");
            }
            Ok(native_overlap(v1, v2))
        }
    }
}

// ---------------------------------------------------------------------------
// stats

#[derive(Serialize)]
struct StatsReport {
    provenance: Provenance,
    setting: OverlapSetting,
    v1: u64,
    v2: u64,
    native_overlap: u64,
    overlap: u64,
    n_eff: u64,
    iou_pct: f64,
    f1_pct: f64,
    f2_pct: f64,
}

pub fn stats(args: &StatsArgs, cfg: &mut FileConfig) -> Result<()> {
    let c1_path = cfg.require_path("c1", args.c1.as_ref())?;
    let c2_path = cfg.require_path("c2", args.c2.as_ref())?;
    let setting = resolve_setting(cfg, args.setting.as_ref())?;
    let base_size = cfg.parsed("base_size", args.base_size)?;
    let special = cfg.token_set("special_tokens", args.special_tokens.as_ref())?;
    let partition_path = cfg.path("partition", args.partition.as_ref());
    let format = resolve_format(cfg, args.format.as_ref())?;
    let out = cfg.path("out", args.out.as_ref());

    let c1 = load_corpus(&c1_path, LanguageTag::L1, base_size)?;
    let c2 = load_corpus(&c2_path, LanguageTag::L2, base_size)?;
    if c1.total_tokens() == 0 || c2.total_tokens() == 0 {
        bail!("frequency-weighted overlap is undefined for an empty corpus");
    }
    let v1 = extract_language_vocab(&c1);
    let v2 = extract_language_vocab(&c2);
    let partition = resolve_partition(setting, partition_path.as_deref(), &v1, &v2)?;
    let mut shared = partition.shared_for(setting)?;
    shared.extend(special.iter().copied().filter(|id| partition.native().contains(id)));

    let n_eff = effective_size(v1.len() as u64, v2.len() as u64, shared.len() as u64);
    let iou = iou_from_sizes(shared.len() as u64, n_eff);
    let shared_count1: u64 = shared.iter().map(|id| v1.count(*id)).sum();
    let shared_count2: u64 = shared.iter().map(|id| v2.count(*id)).sum();
    let f1 = shared_count1 as f64 / c1.total_tokens() as f64;
    let f2 = shared_count2 as f64 / c2.total_tokens() as f64;

    let mut inputs = vec![c1_path.as_path(), c2_path.as_path()];
    if let Some(p) = &partition_path {
        inputs.push(p.as_path());
    }
    let provenance = Provenance::new(&cfg.resolved_canonical(), &inputs)?;
    let report = StatsReport {
        provenance,
        setting,
        v1: v1.len() as u64,
        v2: v2.len() as u64,
        native_overlap: partition.native().len() as u64,
        overlap: shared.len() as u64,
        n_eff,
        iou_pct: iou * 100.0,
        f1_pct: f1 * 100.0,
        f2_pct: f2 * 100.0,
    };
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(&report)?,
        tabular => {
            let header = ["v1", "v2", "overlap", "n_eff", "iou_pct", "f1_pct", "f2_pct"];
            let row = vec![
                report.v1.to_string(),
                report.v2.to_string(),
                report.overlap.to_string(),
                report.n_eff.to_string(),
                fixed6(report.iou_pct),
                fixed6(report.f1_pct),
                fixed6(report.f2_pct),
            ];
            tabular_report(&report.provenance, tabular, &header, &row).into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)
}

// ---------------------------------------------------------------------------
// remap

pub fn remap(args: &RemapArgs, cfg: &mut FileConfig) -> Result<()> {
    let c1_path = cfg.require_path("c1", args.c1.as_ref())?;
    let c2_path = cfg.require_path("c2", args.c2.as_ref())?;
    let setting = resolve_setting(cfg, args.setting.as_ref())?;
    let base_size: u32 = cfg.require_parsed("base_size", args.base_size)?;
    let special = cfg.token_set("special_tokens", args.special_tokens.as_ref())?;
    let partition_path = cfg.path("partition", args.partition.as_ref());
    let out_dir = cfg.require_path("out_dir", args.out_dir.as_ref())?;

    let c1 = load_corpus(&c1_path, LanguageTag::L1, Some(base_size))?;
    let c2 = load_corpus(&c2_path, LanguageTag::L2, Some(base_size))?;
    let v1 = extract_language_vocab(&c1);
    let v2 = extract_language_vocab(&c2);
    let partition = resolve_partition(setting, partition_path.as_deref(), &v1, &v2)?;
    let table = build_remap(&v1, &v2, &partition, setting, base_size, &special)?;

    let r1 = apply_remap(&table, &c1)?;
    let r2 = apply_remap(&table, &c2)?;

    write_atomic(&out_dir.join("c1_remapped.txt"), &r1.to_stream_bytes())?;
    write_atomic(&out_dir.join("c2_remapped.txt"), &r2.to_stream_bytes())?;

    let mut table_bytes = Vec::new();
    RemapTableFile::from_table(&table).write(&mut table_bytes)?;
    write_atomic(&out_dir.join("remap_table.tsv"), &table_bytes)?;

    let mut dense = String::new();
    for (id, dense_id) in dense_index(&table) {
        let _ = writeln!(dense, "{id}\t{dense_id}");
    }
    write_atomic(&out_dir.join("dense_index.tsv"), dense.as_bytes())?;

    log::info!(
        "remapped under setting {}: shared {} of {} native tokens, effective size {}",
        setting,
        table.plan().shared().len(),
        table.native().len(),
        table.plan().effective_size()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// invert

pub fn invert(args: &InvertArgs, cfg: &mut FileConfig) -> Result<()> {
    let corpus_path = cfg.require_path("corpus", args.corpus.as_ref())?;
    let table_path = cfg.require_path("table", args.table.as_ref())?;
    let lang: LanguageTag = cfg.require_parsed("lang", args.lang)?;
    let out = cfg.require_path("out", args.out.as_ref())?;

    let table = RemapTableFile::load(&table_path)?;
    let corpus = load_corpus(&corpus_path, lang, Some(2 * table.base_size))?;
    let inverted = table.invert_corpus(&corpus)?;
    write_atomic(&out, &inverted.to_stream_bytes())
}

// ---------------------------------------------------------------------------
// partition

fn select_layer<'a>(dumps: &'a DumpSet, layer: Option<u32>) -> Result<&'a EmbeddingDump> {
    match layer {
        Some(layer) => dumps
            .layer(layer)
            .ok_or_else(|| anyhow!("the dump has no layer {layer}")),
        None => Ok(dumps.single_layer()?),
    }
}

pub fn partition(args: &PartitionArgs, cfg: &mut FileConfig) -> Result<()> {
    let c1_path = cfg.require_path("c1", args.c1.as_ref())?;
    let c2_path = cfg.require_path("c2", args.c2.as_ref())?;
    let dump_path = cfg.require_path("dump", args.dump.as_ref())?;
    let layer = cfg.parsed("layer", args.layer)?;
    let min_occ: u64 = cfg.parsed_or("min_occ", args.min_occ, 100)?;
    let cap: usize = cfg.parsed_or("cap", args.cap, 100)?;
    let out_dir = cfg.require_path("out_dir", args.out_dir.as_ref())?;

    let c1 = load_corpus(&c1_path, LanguageTag::L1, None)?;
    let c2 = load_corpus(&c2_path, LanguageTag::L2, None)?;
    let v1 = extract_language_vocab(&c1);
    let v2 = extract_language_vocab(&c2);
    let native = native_overlap(&v1, &v2);
    let (scorable, below_min) =
        overlap_core::embed::filter_scorable(native.native(), &v1, &v2, min_occ);

    let dumps = DumpSet::load(&dump_path)?;
    let dump = select_layer(&dumps, layer)?;
    let (ranking, missing) = build_ranking(dump, &scorable, cap)?;
    if !missing.is_empty() {
        warn!(
            "{} scorable tokens lack dump occurrences and stay unscored",
            missing.len()
        );
    }
    let partition = partition_overlap(&ranking, native.native())?;
    if ranking.len() == 1 {
        warn!("only one scored token: the low-similarity half is empty");
    }

    let provenance = Provenance::new(
        &cfg.resolved_canonical(),
        &[c1_path.as_path(), c2_path.as_path(), dump_path.as_path()],
    )?;
    let mut ranking_out = provenance.comment_lines();
    let _ = writeln!(ranking_out, "# layer={}", dump.layer());
    let _ = writeln!(
        ranking_out,
        "# scored={} below_min_occ={} missing_in_dump={}",
        ranking.len(),
        below_min.len(),
        missing.len()
    );
    let mut ranking_rows = Vec::new();
    ranking.write_tsv(&mut ranking_rows)?;
    ranking_out.push_str(std::str::from_utf8(&ranking_rows).expect("ranking rows are ascii"));
    write_atomic(&out_dir.join("ranking.tsv"), ranking_out.as_bytes())?;

    let partition_out = partition_io::render(&partition, &provenance.comment_lines());
    write_atomic(&out_dir.join("partition.tsv"), partition_out.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// layersweep

#[derive(Serialize)]
struct LayerRow {
    layer: u32,
    accuracy: f64,
}

#[derive(Serialize)]
struct LayersweepReport {
    provenance: Provenance,
    best_layer: u32,
    degenerate_labels: bool,
    excluded: Vec<TokenId>,
    rows: Vec<LayerRow>,
}

pub fn layersweep(args: &LayersweepArgs, cfg: &mut FileConfig) -> Result<()> {
    let gold_path = cfg.require_path("gold", args.gold.as_ref())?;
    let cap: usize = cfg.parsed_or("cap", args.cap, 100)?;
    let format = resolve_format(cfg, args.format.as_ref())?;
    let out = cfg.path("out", args.out.as_ref());
    let dump_paths: Vec<PathBuf> = if args.dump.is_empty() {
        vec![cfg.require_path("dump", None)?]
    } else {
        for (i, p) in args.dump.iter().enumerate() {
            cfg.string(&format!("dump_{i}"), Some(&p.display().to_string()));
        }
        args.dump.clone()
    };

    let gold = read_gold(&gold_path)?;
    let mut dumps = DumpSet::default();
    for path in &dump_paths {
        dumps = dumps.merge(DumpSet::load(path)?)?;
    }
    let sweep = layer_sweep(&dumps, &gold, cap)?;
    if !sweep.excluded.is_empty() {
        warn!(
            "{} gold tokens are missing from some layer and were excluded",
            sweep.excluded.len()
        );
    }
    if sweep.degenerate_labels {
        warn!("gold labels contain a single class; oracle accuracy is degenerate");
    }

    let mut inputs: Vec<&Path> = vec![gold_path.as_path()];
    inputs.extend(dump_paths.iter().map(|p| p.as_path()));
    let provenance = Provenance::new(&cfg.resolved_canonical(), &inputs)?;
    let report = LayersweepReport {
        provenance,
        best_layer: sweep.best_layer,
        degenerate_labels: sweep.degenerate_labels,
        excluded: sweep.excluded.clone(),
        rows: sweep
            .rows
            .iter()
            .map(|(layer, accuracy)| LayerRow {
                layer: *layer,
                accuracy: *accuracy,
            })
            .collect(),
    };
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(&report)?,
        tabular => {
            let sep = tabular.separator();
            let mut text = report.provenance.comment_lines();
            let _ = writeln!(text, "# best_layer={}", report.best_layer);
            if report.degenerate_labels {
                let _ = writeln!(text, "# warning: gold labels contain a single class");
            }
            if !report.excluded.is_empty() {
                let ids: Vec<String> =
                    report.excluded.iter().map(|t| t.to_string()).collect();
                let _ = writeln!(text, "# excluded={}", ids.join(","));
            }
            let _ = writeln!(text, "layer{sep}accuracy");
            for row in &report.rows {
                let _ = writeln!(text, "{}{sep}{}", row.layer, fixed6(row.accuracy));
            }
            text.into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct SetReport {
    n: usize,
    mean: Option<f64>,
    similarities: Vec<f64>,
    excluded: Vec<ExcludedPair>,
}

impl SetReport {
    fn from_similarities(set: &SetSimilarities) -> Self {
        SetReport {
            n: set.similarities.len(),
            mean: if set.similarities.is_empty() {
                None
            } else {
                Some(set.mean())
            },
            similarities: set.similarities.clone(),
            excluded: set.excluded.clone(),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    provenance: Provenance,
    k: usize,
    layer: u32,
    cap: usize,
    bonferroni_m: u32,
    test: TTestKind,
    high: SetReport,
    low: SetReport,
    control: SetReport,
    stats: StatResult,
}

pub fn analyze(args: &AnalyzeArgs, cfg: &mut FileConfig) -> Result<()> {
    let ranking_path = cfg.require_path("ranking", args.ranking.as_ref())?;
    let c1_path = cfg.require_path("c1", args.c1.as_ref())?;
    let c2_path = cfg.require_path("c2", args.c2.as_ref())?;
    let dump_path = cfg.require_path("dump", args.dump.as_ref())?;
    let layer = cfg.parsed("layer", args.layer)?;
    let k: usize = cfg.parsed_or("k", args.k, 500)?;
    let seed: u64 = cfg.parsed_or("seed", args.seed, 0)?;
    let bonferroni_m: u32 = cfg.require_parsed("bonferroni_m", args.bonferroni_m)?;
    let cap: usize = cfg.parsed_or("cap", args.cap, 100)?;
    let equal_var = cfg.parsed_or("equal_var", args.equal_var.then_some(true), false)?;
    let format = resolve_format(cfg, args.format.as_ref())?;
    let out = cfg.path("out", args.out.as_ref());
    let kind = if equal_var {
        TTestKind::Pooled
    } else {
        TTestKind::Welch
    };

    let ranking = SimilarityRanking::read_tsv(&ranking_path)?;
    let c1 = load_corpus(&c1_path, LanguageTag::L1, None)?;
    let c2 = load_corpus(&c2_path, LanguageTag::L2, None)?;
    let v1 = extract_language_vocab(&c1);
    let v2 = extract_language_vocab(&c2);
    let native = native_overlap(&v1, &v2);
    let sets = build_analysis_sets(&ranking, &v1, &v2, &native, k, seed)?;

    let dumps = DumpSet::load(&dump_path)?;
    let dump = select_layer(&dumps, layer)?;
    let outcome = similarity_analysis(&sets, dump, cap, bonferroni_m, kind)?;
    let excluded_total =
        outcome.high.excluded.len() + outcome.low.excluded.len() + outcome.control.excluded.len();
    if excluded_total > 0 {
        warn!("{excluded_total} pairs lack dump coverage; see the exclusions report");
    }

    let provenance = Provenance::new(
        &cfg.resolved_canonical(),
        &[
            ranking_path.as_path(),
            c1_path.as_path(),
            c2_path.as_path(),
            dump_path.as_path(),
        ],
    )?;
    let report = AnalyzeReport {
        provenance,
        k,
        layer: dump.layer(),
        cap,
        bonferroni_m,
        test: kind,
        high: SetReport::from_similarities(&outcome.high),
        low: SetReport::from_similarities(&outcome.low),
        control: SetReport::from_similarities(&outcome.control),
        stats: outcome.stats.clone(),
    };
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(&report)?,
        tabular => {
            let header = [
                "n_high",
                "n_low",
                "n_control",
                "high_mean",
                "low_mean",
                "control_mean",
                "t",
                "df",
                "p_raw",
                "p_adjusted",
                "d",
            ];
            let mean_or_nan = |m: Option<f64>| fixed6(m.unwrap_or(f64::NAN));
            let row = vec![
                report.high.n.to_string(),
                report.low.n.to_string(),
                report.control.n.to_string(),
                mean_or_nan(report.high.mean),
                mean_or_nan(report.low.mean),
                mean_or_nan(report.control.mean),
                fixed6(report.stats.t),
                fixed6(report.stats.df),
                fixed6(report.stats.p_raw),
                fixed6(report.stats.p_adjusted),
                fixed6(report.stats.d),
            ];
            tabular_report(&report.provenance, tabular, &header, &row).into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)
}

// ---------------------------------------------------------------------------
// mcnemar

fn read_correctness(path: &Path) -> Result<Vec<bool>> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading correctness vector {}", path.display()))?;
    let mut out = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "0" => out.push(false),
            "1" => out.push(true),
            other => bail!(
                "{}:{}: expected 0 or 1, found {other:?}",
                path.display(),
                idx + 1
            ),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct McnemarReport {
    provenance: Provenance,
    n_instances: usize,
    #[serde(flatten)]
    result: McNemarResult,
}

pub fn mcnemar(args: &McnemarArgs, cfg: &mut FileConfig) -> Result<()> {
    let a_path = cfg.require_path("a", args.a.as_ref())?;
    let b_path = cfg.require_path("b", args.b.as_ref())?;
    let exact_max: u64 = cfg.parsed_or("exact_max", args.exact_max, 25)?;
    let format = resolve_format(cfg, args.format.as_ref())?;
    let out = cfg.path("out", args.out.as_ref());

    let a = read_correctness(&a_path)?;
    let b = read_correctness(&b_path)?;
    let (only_a, only_b) = discordant_counts(&a, &b)?;
    let result = mcnemar_with_threshold(only_a, only_b, exact_max);
    if result.zero_discordance {
        warn!("the two runs never disagree; p = 1 by definition");
    }

    let provenance =
        Provenance::new(&cfg.resolved_canonical(), &[a_path.as_path(), b_path.as_path()])?;
    let report = McnemarReport {
        provenance,
        n_instances: a.len(),
        result,
    };
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(&report)?,
        tabular => {
            let header = ["n_instances", "b", "c", "p", "method", "zero_discordance"];
            let row = vec![
                report.n_instances.to_string(),
                report.result.b.to_string(),
                report.result.c.to_string(),
                fixed6(report.result.p),
                format!("{:?}", report.result.method).to_lowercase(),
                report.result.zero_discordance.to_string(),
            ];
            tabular_report(&report.provenance, tabular, &header, &row).into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)
}

// ---------------------------------------------------------------------------
// synth

#[derive(Serialize)]
struct SynthManifest {
    tool_version: &'static str,
    config_digest: String,
    resolved: BTreeMap<String, String>,
    outputs: Vec<String>,
}

pub fn synth(args: &SynthArgs, cfg: &mut FileConfig) -> Result<()> {
    let vocab_size: u32 = cfg.parsed_or("vocab_size", args.vocab_size, 400)?;
    let docs_per_language: usize = cfg.parsed_or("docs_per_language", args.docs_per_language, 200)?;
    let doc_length: usize = cfg.parsed_or("doc_length", args.doc_length, 40)?;
    let cognate_fraction: f64 = cfg.parsed_or("cognate_fraction", args.cognate_fraction, 0.5)?;
    let seed: u64 = cfg.parsed_or("seed", args.seed, 0)?;
    let dim: usize = cfg.parsed_or("dim", args.dim, 16)?;
    let occurrences: usize = cfg.parsed_or("occurrences", args.occurrences, 8)?;
    let noise_sigma: f64 = cfg.parsed_or("noise_sigma", args.noise_sigma, 0.1)?;
    let planted_layer: u32 = cfg.parsed_or("planted_layer", args.planted_layer, 5)?;
    let layers = cfg
        .layer_list("layers", args.layers.as_ref())?
        .unwrap_or_else(|| vec![planted_layer]);
    let out_dir = cfg.require_path("out_dir", args.out_dir.as_ref())?;

    let pair = generate_synthetic_pair(&SyntheticConfig {
        vocab_size,
        docs_per_language,
        doc_length,
        cognate_fraction,
        seed,
    })?;
    let records = planted_dump(
        &pair.gold,
        &PlantedDumpConfig {
            dim,
            occurrences,
            noise_sigma,
            layers,
            planted_layer,
            seed,
        },
    )?;

    write_atomic(&out_dir.join("c1.txt"), &pair.c1.to_stream_bytes())?;
    write_atomic(&out_dir.join("c2.txt"), &pair.c2.to_stream_bytes())?;

    let mut gold_bytes = Vec::new();
    write_gold(&pair.gold, &mut gold_bytes)?;
    write_atomic(&out_dir.join("gold.tsv"), &gold_bytes)?;

    let mut dump_bytes = Vec::new();
    write_dump(&records, &mut dump_bytes)?;
    write_atomic(&out_dir.join("dump.jsonl"), &dump_bytes)?;

    let resolved = cfg.resolved_canonical();
    let manifest = SynthManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_digest: crate::output::sha256_hex(resolved.as_bytes()),
        resolved: resolved
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        outputs: vec![
            "c1.txt".into(),
            "c2.txt".into(),
            "gold.tsv".into(),
            "dump.jsonl".into(),
        ],
    };
    write_atomic(&out_dir.join("manifest.json"), &to_json_bytes(&manifest)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// compress

#[derive(Serialize)]
struct CompressReport {
    provenance: Provenance,
    bytes: u64,
    chars: u64,
    tokens: u64,
    bytes_per_token: f64,
    chars_per_token: f64,
}

pub fn compress(args: &CompressArgs, cfg: &mut FileConfig) -> Result<()> {
    let text_path = cfg.require_path("text", args.text.as_ref())?;
    let tokens_path = cfg.require_path("tokens", args.tokens.as_ref())?;
    let format = resolve_format(cfg, args.format.as_ref())?;
    let out = cfg.path("out", args.out.as_ref());

    let text = std::fs::read_to_string(&text_path)
        .with_context(|| format!("reading text {}", text_path.display()))?;
    let (bytes_count, chars_count) = text_counts(&text);
    let corpus = load_corpus(&tokens_path, LanguageTag::L1, None)?;
    let (bpt, cpt) = compression_rates(bytes_count, chars_count, corpus.total_tokens())?;

    let provenance = Provenance::new(
        &cfg.resolved_canonical(),
        &[text_path.as_path(), tokens_path.as_path()],
    )?;
    let report = CompressReport {
        provenance,
        bytes: bytes_count,
        chars: chars_count,
        tokens: corpus.total_tokens(),
        bytes_per_token: bpt,
        chars_per_token: cpt,
    };
    let bytes = match format {
        ReportFormat::Json => to_json_bytes(&report)?,
        tabular => {
            let header = ["bytes", "chars", "tokens", "bytes_per_token", "chars_per_token"];
            let row = vec![
                report.bytes.to_string(),
                report.chars.to_string(),
                report.tokens.to_string(),
                fixed6(report.bytes_per_token),
                fixed6(report.chars_per_token),
            ];
            tabular_report(&report.provenance, tabular, &header, &row).into_bytes()
        }
    };
    emit(out.as_deref(), &bytes)
}
