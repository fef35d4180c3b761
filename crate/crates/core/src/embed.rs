//! Contextual-embedding dumps, mean-pooled static embeddings, cross-lingual
//! similarity ranking, overlap partitioning and the layer-selection sweep.
//!
//! Dumps arrive as JSON Lines, one record per token occurrence:
//! `{"token": <id>, "lang": "L1"|"L2", "layer": <int>, "vec": [<float>, ...]}`.
//! Token ids in dumps are base-tokenizer ids; the `lang` field tells the two
//! sides apart. The dump file order is authoritative: pooling consumes the
//! first `cap` occurrences in file order, so a dump fully determines every
//! downstream score.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{LanguageTag, OverlapPartition, TokenId, Vocabulary};

/// One occurrence of a token in one language at one layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceRecord {
    pub token: TokenId,
    pub lang: LanguageTag,
    pub layer: u32,
    pub vec: Vec<f64>,
}

/// All occurrences of one layer, keyed by `(language, token)`.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingDump {
    layer: u32,
    dim: usize,
    occurrences: HashMap<(LanguageTag, TokenId), Vec<Vec<f64>>>,
}

impl EmbeddingDump {
    pub fn layer(&self) -> u32 {
        self.layer
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn occurrences(&self, language: LanguageTag, token: TokenId) -> Option<&[Vec<f64>]> {
        self.occurrences
            .get(&(language, token))
            .map(|v| v.as_slice())
    }

    pub fn has(&self, language: LanguageTag, token: TokenId) -> bool {
        self.occurrences.contains_key(&(language, token))
    }

    pub fn has_both(&self, token: TokenId) -> bool {
        self.has(LanguageTag::L1, token) && self.has(LanguageTag::L2, token)
    }

    /// Tokens that have occurrences for both languages, ascending by id.
    pub fn tokens_in_both(&self) -> BTreeSet<TokenId> {
        self.occurrences
            .keys()
            .filter(|(lang, token)| {
                *lang == LanguageTag::L1 && self.has(LanguageTag::L2, *token)
            })
            .map(|(_, token)| *token)
            .collect()
    }
}

/// A dump file split by layer; the vector dimension is fixed per file.
#[derive(Clone, Debug, Default)]
pub struct DumpSet {
    dim: usize,
    layers: BTreeMap<u32, EmbeddingDump>,
}

impl DumpSet {
    pub fn from_records<I>(records: I) -> Result<Self>
    where
        I: IntoIterator<Item = OccurrenceRecord>,
    {
        let mut dim: Option<usize> = None;
        let mut layers: BTreeMap<u32, EmbeddingDump> = BTreeMap::new();
        for (idx, record) in records.into_iter().enumerate() {
            let d = *dim.get_or_insert(record.vec.len());
            if record.vec.len() != d {
                return Err(Error::DumpDimension {
                    record: idx + 1,
                    expected: d,
                    found: record.vec.len(),
                });
            }
            let dump = layers.entry(record.layer).or_insert_with(|| EmbeddingDump {
                layer: record.layer,
                dim: d,
                occurrences: HashMap::new(),
            });
            dump.occurrences
                .entry((record.lang, record.token))
                .or_default()
                .push(record.vec);
        }
        Ok(DumpSet {
            dim: dim.unwrap_or(0),
            layers,
        })
    }

    /// Load a JSON Lines dump. Record numbers in errors are 1-based line
    /// numbers.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.is_empty() {
                continue;
            }
            let record: OccurrenceRecord =
                serde_json::from_str(&line).map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            records.push(record);
        }
        DumpSet::from_records(records)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> impl Iterator<Item = u32> + '_ {
        self.layers.keys().copied()
    }

    pub fn layer(&self, layer: u32) -> Option<&EmbeddingDump> {
        self.layers.get(&layer)
    }

    pub fn layer_dumps(&self) -> &BTreeMap<u32, EmbeddingDump> {
        &self.layers
    }

    /// The unique layer of a single-layer dump.
    pub fn single_layer(&self) -> Result<&EmbeddingDump> {
        if self.layers.len() == 1 {
            Ok(self.layers.values().next().expect("one layer"))
        } else {
            Err(Error::InvalidConfig(format!(
                "expected a single-layer dump, found {} layers (select one with --layer)",
                self.layers.len()
            )))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Merge another dump set into this one. Dimensions must agree; when a
    /// layer appears in both, the other's occurrences are appended after
    /// this set's, so the merge order defines the pooled occurrence order.
    pub fn merge(mut self, other: DumpSet) -> Result<DumpSet> {
        if other.layers.is_empty() {
            return Ok(self);
        }
        if self.layers.is_empty() {
            return Ok(other);
        }
        if self.dim != other.dim {
            return Err(Error::VectorDimension {
                left: self.dim,
                right: other.dim,
            });
        }
        for (layer, dump) in other.layers {
            match self.layers.get_mut(&layer) {
                Some(existing) => {
                    for (key, occurrences) in dump.occurrences {
                        existing
                            .occurrences
                            .entry(key)
                            .or_default()
                            .extend(occurrences);
                    }
                }
                None => {
                    self.layers.insert(layer, dump);
                }
            }
        }
        Ok(self)
    }
}

/// Write records as JSON Lines in the given order.
pub fn write_dump<W: Write>(records: &[OccurrenceRecord], mut w: W) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut w, record)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// The mean of a token's occurrence vectors in one language.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticEmbedding {
    pub token: TokenId,
    pub language: LanguageTag,
    pub vector: Vec<f64>,
    pub n_occurrences: usize,
}

/// Mean-pool the first `cap` occurrences (in dump order) of one token.
pub fn pool_static(
    dump: &EmbeddingDump,
    token: TokenId,
    language: LanguageTag,
    cap: usize,
) -> Result<StaticEmbedding> {
    let occurrences = dump
        .occurrences(language, token)
        .filter(|o| !o.is_empty())
        .ok_or(Error::MissingToken { token, language })?;
    let used = occurrences.len().min(cap.max(1));
    let mut vector = vec![0.0; dump.dim()];
    for occ in &occurrences[..used] {
        for (acc, x) in vector.iter_mut().zip(occ) {
            *acc += x;
        }
    }
    let inv = 1.0 / used as f64;
    for acc in &mut vector {
        *acc *= inv;
    }
    Ok(StaticEmbedding {
        token,
        language,
        vector,
        n_occurrences: used,
    })
}

/// Cosine similarity of two static embeddings.
pub fn score_token(e1: &StaticEmbedding, e2: &StaticEmbedding) -> Result<f64> {
    if e1.vector.len() != e2.vector.len() {
        return Err(Error::VectorDimension {
            left: e1.vector.len(),
            right: e2.vector.len(),
        });
    }
    let mut dot = 0.0;
    let mut norm1 = 0.0;
    let mut norm2 = 0.0;
    for (a, b) in e1.vector.iter().zip(&e2.vector) {
        dot += a * b;
        norm1 += a * a;
        norm2 += b * b;
    }
    if norm1 == 0.0 {
        return Err(Error::ZeroNorm { token: e1.token });
    }
    if norm2 == 0.0 {
        return Err(Error::ZeroNorm { token: e2.token });
    }
    Ok(dot / (norm1.sqrt() * norm2.sqrt()))
}

/// One row of a similarity ranking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankEntry {
    pub token: TokenId,
    pub score: f64,
}

/// Tokens ordered by descending cross-lingual similarity; equal scores are
/// ordered by ascending token id so the ranking is a deterministic total
/// order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimilarityRanking {
    entries: Vec<RankEntry>,
}

impl SimilarityRanking {
    pub fn from_scores(scores: Vec<(TokenId, f64)>) -> Result<Self> {
        for (token, score) in &scores {
            if score.is_nan() {
                return Err(Error::ZeroNorm { token: *token });
            }
        }
        let mut entries: Vec<RankEntry> = scores
            .into_iter()
            .map(|(token, score)| RankEntry { token, score })
            .collect();
        entries.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("NaN scores rejected above")
                .then(a.token.cmp(&b.token))
        });
        Ok(SimilarityRanking { entries })
    }

    /// Build from rows already in ranked order (e.g. a ranking file).
    pub fn from_ordered(entries: Vec<RankEntry>) -> Self {
        SimilarityRanking { entries }
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self, k: usize) -> &[RankEntry] {
        &self.entries[..k.min(self.entries.len())]
    }

    pub fn bottom(&self, k: usize) -> &[RankEntry] {
        let k = k.min(self.entries.len());
        &self.entries[self.entries.len() - k..]
    }

    /// Write `token_id<TAB>score` rows, score with 6 decimal places.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for entry in &self.entries {
            writeln!(w, "{}\t{:.6}", entry.token, entry.score)?;
        }
        Ok(())
    }

    /// Read a ranking file, preserving row order; `#` lines are comments.
    pub fn read_tsv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut entries = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let mut fields = line.split('\t');
            let token = fields
                .next()
                .and_then(|f| f.parse::<u32>().ok())
                .ok_or_else(|| parse_err("malformed token id".into()))?;
            let score = fields
                .next()
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| parse_err("malformed score".into()))?;
            entries.push(RankEntry {
                token: TokenId(token),
                score,
            });
        }
        Ok(SimilarityRanking::from_ordered(entries))
    }
}

fn score_one(dump: &EmbeddingDump, token: TokenId, cap: usize) -> Result<Option<(TokenId, f64)>> {
    if !dump.has_both(token) {
        return Ok(None);
    }
    let e1 = pool_static(dump, token, LanguageTag::L1, cap)?;
    let e2 = pool_static(dump, token, LanguageTag::L2, cap)?;
    Ok(Some((token, score_token(&e1, &e2)?)))
}

/// Pool and score every requested token that has occurrences for both
/// languages; tokens missing on either side are returned separately.
pub fn build_ranking(
    dump: &EmbeddingDump,
    tokens: &BTreeSet<TokenId>,
    cap: usize,
) -> Result<(SimilarityRanking, Vec<TokenId>)> {
    #[cfg(feature = "parallel")]
    return build_ranking_par(dump, tokens, cap);
    #[cfg(not(feature = "parallel"))]
    build_ranking_seq(dump, tokens, cap)
}

pub fn build_ranking_seq(
    dump: &EmbeddingDump,
    tokens: &BTreeSet<TokenId>,
    cap: usize,
) -> Result<(SimilarityRanking, Vec<TokenId>)> {
    let mut scores = Vec::new();
    let mut missing = Vec::new();
    for token in tokens {
        match score_one(dump, *token, cap)? {
            Some(pair) => scores.push(pair),
            None => missing.push(*token),
        }
    }
    Ok((SimilarityRanking::from_scores(scores)?, missing))
}

#[cfg(feature = "parallel")]
pub fn build_ranking_par(
    dump: &EmbeddingDump,
    tokens: &BTreeSet<TokenId>,
    cap: usize,
) -> Result<(SimilarityRanking, Vec<TokenId>)> {
    let tokens: Vec<TokenId> = tokens.iter().copied().collect();
    let results: Vec<(TokenId, Option<(TokenId, f64)>)> = tokens
        .par_iter()
        .map(|token| score_one(dump, *token, cap).map(|s| (*token, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut scores = Vec::new();
    let mut missing = Vec::new();
    for (token, scored) in results {
        match scored {
            Some(pair) => scores.push(pair),
            None => missing.push(token),
        }
    }
    Ok((SimilarityRanking::from_scores(scores)?, missing))
}

/// Split the ranked tokens into a top half and bottom half.
///
/// With `k` scored tokens the high half takes the top `ceil(k/2)` and the
/// low half the remaining `floor(k/2)`; native tokens absent from the
/// ranking are unscored.
pub fn partition_overlap(
    ranking: &SimilarityRanking,
    native: &BTreeSet<TokenId>,
) -> Result<OverlapPartition> {
    if ranking.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot partition the overlap from an empty ranking".into(),
        ));
    }
    for entry in ranking.entries() {
        if !native.contains(&entry.token) {
            return Err(Error::InvalidConfig(format!(
                "ranked token {} is not in the native overlap",
                entry.token
            )));
        }
    }
    let k = ranking.len();
    let hi = k.div_ceil(2);
    let high: BTreeSet<TokenId> = ranking.top(hi).iter().map(|e| e.token).collect();
    let low: BTreeSet<TokenId> = ranking.entries()[hi..].iter().map(|e| e.token).collect();
    let unscored: BTreeSet<TokenId> = native
        .iter()
        .copied()
        .filter(|t| !high.contains(t) && !low.contains(t))
        .collect();
    OverlapPartition::new(native.clone(), high, low, unscored)
}

/// Split the native overlap into tokens eligible for scoring (at least
/// `min_occ` occurrences in both corpora) and the unscored rest.
pub fn filter_scorable(
    native: &BTreeSet<TokenId>,
    v1: &Vocabulary,
    v2: &Vocabulary,
    min_occ: u64,
) -> (BTreeSet<TokenId>, BTreeSet<TokenId>) {
    let mut scorable = BTreeSet::new();
    let mut unscored = BTreeSet::new();
    for token in native {
        if v1.count(*token) >= min_occ && v2.count(*token) >= min_occ {
            scorable.insert(*token);
        } else {
            unscored.insert(*token);
        }
    }
    (scorable, unscored)
}

/// Best classification accuracy over every positional threshold `n` in
/// `[0, k]`: the top `n` ranked tokens are predicted cognates, the rest
/// predicted non-cognates. Ties in score are resolved by the ranking's
/// total order (ascending token id), and thresholds cut between ranked
/// positions, never inside a tie group in any other order.
pub fn best_threshold_accuracy(
    ranking: &SimilarityRanking,
    gold: &BTreeMap<TokenId, bool>,
) -> Result<f64> {
    let k = ranking.len();
    if k == 0 {
        return Err(Error::InvalidConfig(
            "cannot evaluate thresholds on an empty ranking".into(),
        ));
    }
    // n = 0 predicts everything non-cognate
    let mut correct: i64 = ranking
        .entries()
        .iter()
        .filter(|e| !gold.get(&e.token).copied().unwrap_or(false))
        .count() as i64;
    let mut best = correct;
    for entry in ranking.entries() {
        let is_cognate = *gold.get(&entry.token).ok_or_else(|| {
            Error::InvalidConfig(format!("token {} has no gold label", entry.token))
        })?;
        correct += if is_cognate { 1 } else { -1 };
        best = best.max(correct);
    }
    Ok(best as f64 / k as f64)
}

/// Result of the per-layer oracle sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSweep {
    /// `(layer, oracle accuracy)` ascending by layer.
    pub rows: Vec<(u32, f64)>,
    /// Layer with the highest accuracy; ties go to the lowest layer index.
    pub best_layer: u32,
    /// True when the evaluated gold labels contain a single class.
    pub degenerate_labels: bool,
    /// Gold tokens dropped because some layer lacks occurrences for both
    /// languages.
    pub excluded: Vec<TokenId>,
}

/// Rank the gold tokens by cross-lingual similarity at every layer and
/// report each layer's best threshold accuracy.
///
/// Only tokens available (both languages) in every layer are evaluated, so
/// the layers compete on the same token set.
pub fn layer_sweep(
    dumps: &DumpSet,
    gold: &BTreeMap<TokenId, bool>,
    cap: usize,
) -> Result<LayerSweep> {
    if dumps.is_empty() {
        return Err(Error::InvalidConfig("the dump contains no layers".into()));
    }
    let mut eval: BTreeSet<TokenId> = gold.keys().copied().collect();
    for dump in dumps.layer_dumps().values() {
        eval.retain(|token| dump.has_both(*token));
    }
    let excluded: Vec<TokenId> = gold
        .keys()
        .copied()
        .filter(|t| !eval.contains(t))
        .collect();
    if eval.is_empty() {
        return Err(Error::InvalidConfig(
            "no gold tokens are available in every layer".into(),
        ));
    }
    let classes: BTreeSet<bool> = eval.iter().map(|t| gold[t]).collect();
    let degenerate_labels = classes.len() < 2;

    let mut rows = Vec::new();
    let mut best_layer = None;
    let mut best_acc = f64::NEG_INFINITY;
    for (layer, dump) in dumps.layer_dumps() {
        let (ranking, missing) = build_ranking(dump, &eval, cap)?;
        debug_assert!(missing.is_empty(), "eval tokens are present in all layers");
        let accuracy = best_threshold_accuracy(&ranking, gold)?;
        rows.push((*layer, accuracy));
        if accuracy > best_acc {
            best_acc = accuracy;
            best_layer = Some(*layer);
        }
    }
    Ok(LayerSweep {
        rows,
        best_layer: best_layer.expect("at least one layer"),
        degenerate_labels,
        excluded,
    })
}

/// Read a gold-label file: TSV `token_id<TAB>{cognate|noncognate}`.
pub fn read_gold(path: &Path) -> Result<BTreeMap<TokenId, bool>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut gold = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let mut fields = line.split('\t');
        let token = fields
            .next()
            .and_then(|f| f.parse::<u32>().ok())
            .ok_or_else(|| parse_err("malformed token id".into()))?;
        let label = match fields.next() {
            Some("cognate") => true,
            Some("noncognate") => false,
            other => {
                return Err(parse_err(format!(
                    "expected cognate or noncognate, found {other:?}"
                )))
            }
        };
        gold.insert(TokenId(token), label);
    }
    Ok(gold)
}

/// Write gold labels as TSV `token_id<TAB>{cognate|noncognate}`.
pub fn write_gold<W: Write>(gold: &BTreeMap<TokenId, bool>, mut w: W) -> std::io::Result<()> {
    for (token, is_cognate) in gold {
        writeln!(
            w,
            "{token}\t{}",
            if *is_cognate { "cognate" } else { "noncognate" }
        )?;
    }
    Ok(())
}
