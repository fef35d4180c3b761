//! Deterministic desk-scale fixtures: a bilingual corpus pair with planted
//! cognates and false friends, and embedding dumps whose geometry encodes
//! the planted labels.
//!
//! The base id space is split into three blocks: a shared block both
//! languages draw from, and one exclusive block per language. Every shared
//! token carries a gold label; a seeded fraction are cognates. The dump
//! generator gives cognates collinear cross-lingual directions and false
//! friends orthogonal ones, with Gaussian noise on every occurrence, so a
//! similarity ranking over the dump recovers the labels.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::TokenizedCorpus;
use crate::embed::OccurrenceRecord;
use crate::error::{Error, Result};
use crate::types::{LanguageTag, TokenId};

/// Shape of a synthetic corpus pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub vocab_size: u32,
    pub docs_per_language: usize,
    pub doc_length: usize,
    /// Fraction of shared-block tokens labeled cognate, in `[0, 1]`.
    pub cognate_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            vocab_size: 400,
            docs_per_language: 200,
            doc_length: 40,
            cognate_fraction: 0.5,
            seed: 0,
        }
    }
}

/// A generated corpus pair with its gold labels over the shared block.
#[derive(Clone, Debug)]
pub struct SyntheticPair {
    pub c1: TokenizedCorpus,
    pub c2: TokenizedCorpus,
    /// `true` marks a planted cognate; keys cover the whole shared block.
    pub gold: BTreeMap<TokenId, bool>,
    pub shared_block: Range<u32>,
    pub l1_block: Range<u32>,
    pub l2_block: Range<u32>,
}

fn sample_documents(
    rng: &mut ChaCha8Rng,
    allowed: &[TokenId],
    docs: usize,
    doc_length: usize,
) -> Vec<Vec<TokenId>> {
    (0..docs)
        .map(|_| {
            (0..doc_length)
                .map(|_| allowed[rng.random_range(0..allowed.len())])
                .collect()
        })
        .collect()
}

/// Generate two corpora over one base id space plus gold cognate labels.
///
/// The same config always produces byte-identical corpora and labels.
pub fn generate_synthetic_pair(config: &SyntheticConfig) -> Result<SyntheticPair> {
    if config.vocab_size == 0 {
        return Err(Error::InvalidConfig("vocab_size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&config.cognate_fraction) {
        return Err(Error::InvalidConfig(
            "cognate_fraction must be within [0, 1]".into(),
        ));
    }
    let n = config.vocab_size;
    let shared_len = n / 2;
    let exclusive = n - shared_len;
    let l1_len = exclusive / 2;
    let shared_block = 0..shared_len;
    let l1_block = shared_len..shared_len + l1_len;
    let l2_block = shared_len + l1_len..n;
    let draws_needed = config.docs_per_language > 0 && config.doc_length > 0;
    if draws_needed && (shared_block.is_empty() || l1_block.is_empty() || l2_block.is_empty()) {
        return Err(Error::InvalidConfig(format!(
            "vocab_size {n} is too small to split into shared and exclusive blocks"
        )));
    }

    let mut label_rng = ChaCha8Rng::seed_from_u64(config.seed);
    label_rng.set_stream(0);
    let shared_ids: Vec<TokenId> = shared_block.clone().map(TokenId).collect();
    let n_cognates = (config.cognate_fraction * shared_ids.len() as f64).round() as usize;
    let n_cognates = n_cognates.min(shared_ids.len());
    let picked = rand::seq::index::sample(&mut label_rng, shared_ids.len(), n_cognates);
    let mut gold: BTreeMap<TokenId, bool> =
        shared_ids.iter().map(|id| (*id, false)).collect();
    for idx in picked {
        gold.insert(shared_ids[idx], true);
    }

    let allowed1: Vec<TokenId> = shared_block
        .clone()
        .chain(l1_block.clone())
        .map(TokenId)
        .collect();
    let allowed2: Vec<TokenId> = shared_block
        .clone()
        .chain(l2_block.clone())
        .map(TokenId)
        .collect();

    let mut rng1 = ChaCha8Rng::seed_from_u64(config.seed);
    rng1.set_stream(1);
    let mut rng2 = ChaCha8Rng::seed_from_u64(config.seed);
    rng2.set_stream(2);
    let docs1 = sample_documents(&mut rng1, &allowed1, config.docs_per_language, config.doc_length);
    let docs2 = sample_documents(&mut rng2, &allowed2, config.docs_per_language, config.doc_length);

    Ok(SyntheticPair {
        c1: TokenizedCorpus::new(LanguageTag::L1, docs1),
        c2: TokenizedCorpus::new(LanguageTag::L2, docs2),
        gold,
        shared_block,
        l1_block,
        l2_block,
    })
}

/// Shape of a planted embedding dump.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedDumpConfig {
    pub dim: usize,
    /// Occurrence vectors per (token, language, layer).
    pub occurrences: usize,
    /// Standard deviation of the per-occurrence Gaussian noise.
    pub noise_sigma: f64,
    /// Layers to emit, ascending.
    pub layers: Vec<u32>,
    /// The layer that carries the planted geometry; all other layers get
    /// independent random directions per language (no signal).
    pub planted_layer: u32,
    pub seed: u64,
}

impl Default for PlantedDumpConfig {
    fn default() -> Self {
        PlantedDumpConfig {
            dim: 16,
            occurrences: 8,
            noise_sigma: 0.1,
            layers: vec![5],
            planted_layer: 5,
            seed: 0,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn orthogonal_unit(rng: &mut ChaCha8Rng, base: &[f64]) -> Vec<f64> {
    loop {
        let mut v = random_unit(rng, base.len());
        let dot: f64 = v.iter().zip(base).map(|(a, b)| a * b).sum();
        for (x, b) in v.iter_mut().zip(base) {
            *x -= dot * b;
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn noisy(rng: &mut ChaCha8Rng, direction: &[f64], sigma: f64) -> Vec<f64> {
    direction
        .iter()
        .map(|x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Emit dump records whose geometry encodes the gold labels: on the planted
/// layer cognates get the same direction in both languages and false
/// friends orthogonal directions; other layers carry no signal.
///
/// Records are ordered by (layer, token, language, occurrence index), so a
/// config determines the dump bytes exactly.
pub fn planted_dump(
    gold: &BTreeMap<TokenId, bool>,
    config: &PlantedDumpConfig,
) -> Result<Vec<OccurrenceRecord>> {
    if config.dim < 2 {
        return Err(Error::InvalidConfig(
            "planted dumps need dim >= 2 for orthogonal directions".into(),
        ));
    }
    if config.occurrences == 0 {
        return Err(Error::InvalidConfig("occurrences must be positive".into()));
    }
    if config.layers.is_empty() {
        return Err(Error::InvalidConfig("at least one layer is required".into()));
    }
    if !config.layers.contains(&config.planted_layer) {
        return Err(Error::InvalidConfig(format!(
            "planted_layer {} is not among the emitted layers",
            config.planted_layer
        )));
    }
    if config.noise_sigma < 0.0 {
        return Err(Error::InvalidConfig("noise_sigma must be >= 0".into()));
    }
    let mut layers = config.layers.clone();
    layers.sort_unstable();
    layers.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(3);
    let mut records = Vec::new();
    for layer in layers {
        for (token, is_cognate) in gold {
            let dir1 = random_unit(&mut rng, config.dim);
            let dir2 = if layer == config.planted_layer {
                if *is_cognate {
                    dir1.clone()
                } else {
                    orthogonal_unit(&mut rng, &dir1)
                }
            } else {
                random_unit(&mut rng, config.dim)
            };
            for _ in 0..config.occurrences {
                records.push(OccurrenceRecord {
                    token: *token,
                    lang: LanguageTag::L1,
                    layer,
                    vec: noisy(&mut rng, &dir1, config.noise_sigma),
                });
            }
            for _ in 0..config.occurrences {
                records.push(OccurrenceRecord {
                    token: *token,
                    lang: LanguageTag::L2,
                    layer,
                    vec: noisy(&mut rng, &dir2, config.noise_sigma),
                });
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::extract_language_vocab;
    use crate::embed::DumpSet;

    #[test]
    fn fraction_zero_has_no_cognates() {
        let pair = generate_synthetic_pair(&SyntheticConfig {
            cognate_fraction: 0.0,
            ..Default::default()
        })
        .unwrap();
        assert!(pair.gold.values().all(|c| !c));
    }

    #[test]
    fn fraction_one_marks_every_shared_token() {
        let pair = generate_synthetic_pair(&SyntheticConfig {
            cognate_fraction: 1.0,
            ..Default::default()
        })
        .unwrap();
        assert!(!pair.gold.is_empty());
        assert!(pair.gold.values().all(|c| *c));
    }

    #[test]
    fn same_seed_reproduces_everything() {
        let config = SyntheticConfig::default();
        let a = generate_synthetic_pair(&config).unwrap();
        let b = generate_synthetic_pair(&config).unwrap();
        assert_eq!(a.c1, b.c1);
        assert_eq!(a.c2, b.c2);
        assert_eq!(a.gold, b.gold);
    }

    #[test]
    fn zero_vocab_is_invalid() {
        let err = generate_synthetic_pair(&SyntheticConfig {
            vocab_size: 0,
            ..Default::default()
        });
        assert!(matches!(err, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn overlap_is_contained_in_shared_block() {
        let pair = generate_synthetic_pair(&SyntheticConfig::default()).unwrap();
        let v1 = extract_language_vocab(&pair.c1);
        let v2 = extract_language_vocab(&pair.c2);
        for id in v1.ids().filter(|id| v2.contains(*id)) {
            assert!(pair.shared_block.contains(&id.value()));
        }
    }

    #[test]
    fn planted_dump_is_deterministic_and_separable() {
        let gold: BTreeMap<TokenId, bool> =
            (0..20u32).map(|t| (TokenId(t), t % 2 == 0)).collect();
        let config = PlantedDumpConfig::default();
        let a = planted_dump(&gold, &config).unwrap();
        let b = planted_dump(&gold, &config).unwrap();
        assert_eq!(a, b);

        let dumps = DumpSet::from_records(a).unwrap();
        let dump = dumps.single_layer().unwrap();
        let tokens = dump.tokens_in_both();
        let (ranking, missing) = crate::embed::build_ranking(dump, &tokens, 100).unwrap();
        assert!(missing.is_empty());
        // cognates should occupy the top half of the ranking
        let top: Vec<bool> = ranking
            .top(10)
            .iter()
            .map(|e| gold[&e.token])
            .collect();
        assert!(top.iter().all(|c| *c));
    }

    #[test]
    fn planted_dump_validates_config() {
        let gold: BTreeMap<TokenId, bool> = [(TokenId(0), true)].into();
        assert!(planted_dump(
            &gold,
            &PlantedDumpConfig {
                dim: 1,
                ..Default::default()
            }
        )
        .is_err());
        assert!(planted_dump(
            &gold,
            &PlantedDumpConfig {
                planted_layer: 9,
                ..Default::default()
            }
        )
        .is_err());
    }
}
