//! Native-overlap computation and the four-setting token-index remap.
//!
//! A remap keeps every L1 id fixed and moves each contested L2 id — a token
//! in the native overlap that the setting does not share — up by the base
//! vocabulary size `N`, into `[N, 2N)`. Tokens only one language uses keep
//! their ids, so the `full` setting is the identity on both streams while
//! `none` makes the two observed vocabularies disjoint. Either way the
//! number of distinct token identities is `|V1| + |V2| - |shared|`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::corpus::TokenizedCorpus;
use crate::error::{Error, Result};
use crate::types::{LanguageTag, OverlapPartition, OverlapSetting, RemapPlan, TokenId, Vocabulary};

/// Where a remapped id came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    L1,
    L2,
    /// A shared id used by both languages.
    Shared,
}

/// The built remap for one setting: plan plus fast forward/inverse lookups.
#[derive(Clone, Debug)]
pub struct RemapTable {
    plan: RemapPlan,
    native: BTreeSet<TokenId>,
    v1_ids: BTreeSet<TokenId>,
    v2_ids: BTreeSet<TokenId>,
    /// `offset[x]` is true when an L2 occurrence of base id `x` moves to `x + N`.
    offset: Vec<bool>,
}

impl RemapTable {
    pub fn plan(&self) -> &RemapPlan {
        &self.plan
    }

    pub fn native(&self) -> &BTreeSet<TokenId> {
        &self.native
    }

    pub fn v1_ids(&self) -> &BTreeSet<TokenId> {
        &self.v1_ids
    }

    pub fn v2_ids(&self) -> &BTreeSet<TokenId> {
        &self.v2_ids
    }

    pub fn base_size(&self) -> u32 {
        self.plan.base_size()
    }

    /// Map one `(language, id)` pair into the remapped id space.
    pub fn forward(&self, language: LanguageTag, id: TokenId) -> Result<TokenId> {
        let n = self.plan.base_size();
        if id.value() >= n {
            return Err(Error::TokenOutOfRange {
                id: id.value(),
                bound: n,
            });
        }
        match language {
            LanguageTag::L1 => Ok(id),
            LanguageTag::L2 => {
                if self.offset[id.value() as usize] {
                    Ok(TokenId(id.value() + n))
                } else {
                    Ok(id)
                }
            }
        }
    }

    /// Attribute a remapped id back to its origin and base id.
    pub fn inverse(&self, id: TokenId) -> Result<(Origin, TokenId)> {
        let n = self.plan.base_size();
        if id.value() >= 2 * n {
            return Err(Error::TokenOutOfRange {
                id: id.value(),
                bound: 2 * n,
            });
        }
        if id.value() >= n {
            let base = TokenId(id.value() - n);
            if self.offset[base.value() as usize] {
                Ok((Origin::L2, base))
            } else {
                Err(Error::InverseDomain {
                    id: id.value(),
                    language: LanguageTag::L2,
                })
            }
        } else if self.plan.shared().contains(&id) {
            Ok((Origin::Shared, id))
        } else if self.v1_ids.contains(&id) {
            Ok((Origin::L1, id))
        } else if self.v2_ids.contains(&id) {
            Ok((Origin::L2, id))
        } else {
            Err(Error::InverseDomain {
                id: id.value(),
                language: LanguageTag::L1,
            })
        }
    }
}

/// The native overlap `V1 ∩ V2`, returned as a partition with everything
/// still unscored.
pub fn native_overlap(v1: &Vocabulary, v2: &Vocabulary) -> OverlapPartition {
    let native = v1.ids().filter(|id| v2.contains(*id)).collect();
    OverlapPartition::native_only(native)
}

/// Build the remap table for one setting.
///
/// The shared set is the setting's selection from the partition plus any
/// configured special ids present in the native overlap; special tokens are
/// shared under every setting so sequence framing survives the remap.
pub fn build_remap(
    v1: &Vocabulary,
    v2: &Vocabulary,
    partition: &OverlapPartition,
    setting: OverlapSetting,
    base_size: u32,
    special: &BTreeSet<TokenId>,
) -> Result<RemapTable> {
    let v1_ids = v1.id_set();
    let v2_ids = v2.id_set();
    let native: BTreeSet<TokenId> = v1_ids.intersection(&v2_ids).copied().collect();
    if *partition.native() != native {
        return Err(Error::InvalidConfig(format!(
            "partition covers {} native tokens but the vocabularies share {}",
            partition.native().len(),
            native.len()
        )));
    }
    if let Some(max) = v1_ids.iter().chain(v2_ids.iter()).max() {
        if max.value() >= base_size {
            return Err(Error::TokenOutOfRange {
                id: max.value(),
                bound: base_size,
            });
        }
    }
    let mut shared = partition.shared_for(setting)?;
    shared.extend(special.iter().copied().filter(|id| native.contains(id)));
    let plan = RemapPlan::new(
        base_size,
        setting,
        shared,
        v1_ids.len() as u64,
        v2_ids.len() as u64,
    );
    let mut offset = vec![false; base_size as usize];
    for id in &native {
        if !plan.shared().contains(id) {
            offset[id.value() as usize] = true;
        }
    }
    Ok(RemapTable {
        plan,
        native,
        v1_ids,
        v2_ids,
        offset,
    })
}

fn remap_document(table: &RemapTable, language: LanguageTag, doc: &[TokenId]) -> Result<Vec<TokenId>> {
    doc.iter().map(|id| table.forward(language, *id)).collect()
}

/// Apply the remap element-wise; document structure and lengths are
/// unchanged and output order matches input order.
pub fn apply_remap(table: &RemapTable, corpus: &TokenizedCorpus) -> Result<TokenizedCorpus> {
    #[cfg(feature = "parallel")]
    return apply_remap_par(table, corpus);
    #[cfg(not(feature = "parallel"))]
    apply_remap_seq(table, corpus)
}

pub fn apply_remap_seq(table: &RemapTable, corpus: &TokenizedCorpus) -> Result<TokenizedCorpus> {
    let language = corpus.language();
    let documents = corpus
        .documents()
        .iter()
        .map(|doc| remap_document(table, language, doc))
        .collect::<Result<Vec<_>>>()?;
    Ok(TokenizedCorpus::new(language, documents))
}

#[cfg(feature = "parallel")]
pub fn apply_remap_par(table: &RemapTable, corpus: &TokenizedCorpus) -> Result<TokenizedCorpus> {
    let language = corpus.language();
    let documents = corpus
        .documents()
        .par_iter()
        .map(|doc| remap_document(table, language, doc))
        .collect::<Result<Vec<_>>>()?;
    Ok(TokenizedCorpus::new(language, documents))
}

/// Undo a remap on a corpus whose language tag is known.
pub fn invert_remap(table: &RemapTable, corpus: &TokenizedCorpus) -> Result<TokenizedCorpus> {
    let n = table.plan.base_size();
    let language = corpus.language();
    let documents = corpus
        .documents()
        .iter()
        .map(|doc| {
            doc.iter()
                .map(|id| {
                    if id.value() >= 2 * n {
                        return Err(Error::TokenOutOfRange {
                            id: id.value(),
                            bound: 2 * n,
                        });
                    }
                    match language {
                        LanguageTag::L1 => {
                            if id.value() >= n {
                                Err(Error::InverseDomain {
                                    id: id.value(),
                                    language,
                                })
                            } else {
                                Ok(*id)
                            }
                        }
                        LanguageTag::L2 => {
                            if id.value() >= n {
                                let base = TokenId(id.value() - n);
                                if table.offset[base.value() as usize] {
                                    Ok(base)
                                } else {
                                    Err(Error::InverseDomain {
                                        id: id.value(),
                                        language,
                                    })
                                }
                            } else if table.offset[id.value() as usize] {
                                Err(Error::InverseDomain {
                                    id: id.value(),
                                    language,
                                })
                            } else {
                                Ok(*id)
                            }
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TokenizedCorpus::new(language, documents))
}

/// Count the distinct ids across two remapped streams. When every
/// vocabulary token occurs at least once this equals the plan's effective
/// vocabulary size.
pub fn effective_vocab_of_streams(c1: &TokenizedCorpus, c2: &TokenizedCorpus) -> u64 {
    #[cfg(feature = "parallel")]
    return effective_vocab_of_streams_par(c1, c2);
    #[cfg(not(feature = "parallel"))]
    effective_vocab_of_streams_seq(c1, c2)
}

pub fn effective_vocab_of_streams_seq(c1: &TokenizedCorpus, c2: &TokenizedCorpus) -> u64 {
    let mut seen: HashSet<TokenId> = HashSet::new();
    for doc in c1.documents().iter().chain(c2.documents()) {
        seen.extend(doc.iter().copied());
    }
    seen.len() as u64
}

#[cfg(feature = "parallel")]
pub fn effective_vocab_of_streams_par(c1: &TokenizedCorpus, c2: &TokenizedCorpus) -> u64 {
    let seen = c1
        .documents()
        .par_iter()
        .chain(c2.documents().par_iter())
        .fold(HashSet::<TokenId>::new, |mut acc, doc| {
            acc.extend(doc.iter().copied());
            acc
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    seen.len() as u64
}

/// Retain exactly the vocabulary entries whose id occurs in the corpus.
pub fn prune_vocabulary(vocab: &Vocabulary, corpus: &TokenizedCorpus) -> Vocabulary {
    let mut used: HashSet<TokenId> = HashSet::new();
    for doc in corpus.documents() {
        used.extend(doc.iter().copied());
    }
    let counts: BTreeMap<TokenId, u64> = vocab
        .entries()
        .filter(|(id, _)| used.contains(id))
        .map(|(id, e)| (id, e.count))
        .collect();
    // surfaces, when present, are carried over
    let mut pruned = Vocabulary::from_counts(counts);
    let with_surfaces: Vec<(String, TokenId, u64)> = vocab
        .entries()
        .filter(|(id, _)| used.contains(id))
        .filter_map(|(id, e)| e.surface.clone().map(|s| (s, id, e.count)))
        .collect();
    if with_surfaces.len() == pruned.len() {
        if let Ok(v) = Vocabulary::with_surfaces(with_surfaces) {
            pruned = v;
        }
    }
    pruned
}

/// Sorted remapped identity space and its dense re-indexing: the union of
/// both languages' remapped vocabulary ids mapped onto `[0, k)`.
pub fn dense_index(table: &RemapTable) -> Vec<(TokenId, u32)> {
    let mut image: BTreeSet<TokenId> = BTreeSet::new();
    for id in &table.v1_ids {
        image.insert(table.forward(LanguageTag::L1, *id).expect("vocab id in range"));
    }
    for id in &table.v2_ids {
        image.insert(table.forward(LanguageTag::L2, *id).expect("vocab id in range"));
    }
    image
        .into_iter()
        .enumerate()
        .map(|(dense, id)| (id, dense as u32))
        .collect()
}

/// Serialized form of a remap table: per-language `old -> new` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemapTableFile {
    pub base_size: u32,
    pub setting: OverlapSetting,
    pub forward: BTreeMap<(LanguageTag, u32), u32>,
}

impl RemapTableFile {
    pub fn from_table(table: &RemapTable) -> Self {
        let mut forward = BTreeMap::new();
        for id in &table.v1_ids {
            forward.insert((LanguageTag::L1, id.value()), id.value());
        }
        for id in &table.v2_ids {
            let mapped = table
                .forward(LanguageTag::L2, *id)
                .expect("vocab id in range");
            forward.insert((LanguageTag::L2, id.value()), mapped.value());
        }
        RemapTableFile {
            base_size: table.plan.base_size(),
            setting: table.plan.setting(),
            forward,
        }
    }

    /// Write `lang<TAB>old_id<TAB>new_id` rows sorted by (lang, old_id),
    /// preceded by a `#base_size=N setting=<kind>` header.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "#base_size={} setting={}", self.base_size, self.setting)?;
        for ((lang, old), new) in &self.forward {
            writeln!(w, "{lang}\t{old}\t{new}")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut base_size = None;
        let mut setting = None;
        let mut forward = BTreeMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix('#') {
                for field in rest.split_ascii_whitespace() {
                    if let Some(v) = field.strip_prefix("base_size=") {
                        base_size =
                            Some(v.parse::<u32>().map_err(|_| {
                                parse_err(format!("malformed base_size {v:?}"))
                            })?);
                    } else if let Some(v) = field.strip_prefix("setting=") {
                        setting = Some(v.parse::<OverlapSetting>()?);
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(parse_err("expected lang<TAB>old_id<TAB>new_id".into()));
            }
            let lang: LanguageTag = fields[0].parse()?;
            let old: u32 = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("malformed old id {:?}", fields[1])))?;
            let new: u32 = fields[2]
                .parse()
                .map_err(|_| parse_err(format!("malformed new id {:?}", fields[2])))?;
            forward.insert((lang, old), new);
        }
        let base_size = base_size.ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "missing #base_size header".into(),
        })?;
        let setting = setting.ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "missing setting header".into(),
        })?;
        Ok(RemapTableFile {
            base_size,
            setting,
            forward,
        })
    }

    /// Invert a remapped corpus through the serialized rows.
    pub fn invert_corpus(&self, corpus: &TokenizedCorpus) -> Result<TokenizedCorpus> {
        let language = corpus.language();
        let mut inverse: HashMap<u32, u32> = HashMap::new();
        for ((lang, old), new) in &self.forward {
            if *lang == language {
                inverse.insert(*new, *old);
            }
        }
        let documents = corpus
            .documents()
            .iter()
            .map(|doc| {
                doc.iter()
                    .map(|id| {
                        inverse
                            .get(&id.value())
                            .map(|old| TokenId(*old))
                            .ok_or(Error::InverseDomain {
                                id: id.value(),
                                language,
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TokenizedCorpus::new(language, documents))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(ids: &[u32]) -> Vocabulary {
        Vocabulary::from_counts(ids.iter().map(|i| (TokenId(*i), 1)).collect())
    }

    fn corpus(language: LanguageTag, docs: &[&[u32]]) -> TokenizedCorpus {
        TokenizedCorpus::new(
            language,
            docs.iter()
                .map(|d| d.iter().copied().map(TokenId).collect())
                .collect(),
        )
    }

    fn set(ids: &[u32]) -> BTreeSet<TokenId> {
        ids.iter().copied().map(TokenId).collect()
    }

    #[test]
    fn native_overlap_is_intersection() {
        let p = native_overlap(&vocab(&[1, 2, 3]), &vocab(&[2, 3, 4]));
        assert_eq!(*p.native(), set(&[2, 3]));
    }

    #[test]
    fn native_overlap_disjoint_is_empty() {
        let p = native_overlap(&vocab(&[1, 2]), &vocab(&[3, 4]));
        assert!(p.native().is_empty());
    }

    #[test]
    fn forward_follows_case_split() {
        // V1 and V2 share {2, 5}; only 2 stays shared, so the L2 copy of 5
        // moves to 5 + 8 while L1 ids never change.
        let v1 = vocab(&[1, 2, 5]);
        let v2 = vocab(&[2, 3, 5]);
        let partition = OverlapPartition::new(set(&[2, 5]), set(&[2]), set(&[5]), set(&[])).unwrap();
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::HighSim, 8, &set(&[])).unwrap();
        assert_eq!(table.forward(LanguageTag::L2, TokenId(2)).unwrap(), TokenId(2));
        assert_eq!(table.forward(LanguageTag::L2, TokenId(5)).unwrap(), TokenId(13));
        assert_eq!(table.forward(LanguageTag::L1, TokenId(5)).unwrap(), TokenId(5));
        assert_eq!(table.plan().effective_size(), 3 + 3 - 1);
    }

    #[test]
    fn forward_rejects_out_of_range() {
        let v1 = vocab(&[1]);
        let v2 = vocab(&[2]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[])).unwrap();
        assert!(table.forward(LanguageTag::L2, TokenId(8)).is_err());
    }

    #[test]
    fn build_rejects_vocab_beyond_base_size() {
        let v1 = vocab(&[1, 9]);
        let v2 = vocab(&[2]);
        let partition = native_overlap(&v1, &v2);
        assert!(build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[])).is_err());
    }

    #[test]
    fn apply_remap_moves_contested_l2_tokens() {
        let v1 = vocab(&[1, 2, 5]);
        let v2 = vocab(&[2, 5]);
        let partition = OverlapPartition::new(set(&[2, 5]), set(&[2]), set(&[5]), set(&[])).unwrap();
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::HighSim, 8, &set(&[])).unwrap();
        let c2 = corpus(LanguageTag::L2, &[&[2, 5]]);
        let remapped = apply_remap(&table, &c2).unwrap();
        assert_eq!(remapped.documents()[0], vec![TokenId(2), TokenId(13)]);
    }

    #[test]
    fn apply_remap_is_identity_on_l1() {
        let v1 = vocab(&[1, 2, 5]);
        let v2 = vocab(&[2, 5]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[])).unwrap();
        let c1 = corpus(LanguageTag::L1, &[&[1, 2, 5], &[5]]);
        assert_eq!(apply_remap(&table, &c1).unwrap(), c1);
    }

    #[test]
    fn full_setting_is_identity_on_both_streams() {
        let v1 = vocab(&[1, 2, 5]);
        let v2 = vocab(&[2, 5, 7]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::Full, 8, &set(&[])).unwrap();
        let c1 = corpus(LanguageTag::L1, &[&[1, 2, 5]]);
        let c2 = corpus(LanguageTag::L2, &[&[2, 5, 7]]);
        assert_eq!(apply_remap(&table, &c1).unwrap(), c1);
        assert_eq!(apply_remap(&table, &c2).unwrap(), c2);
    }

    #[test]
    fn apply_then_invert_round_trips() {
        let v1 = vocab(&[0, 1, 2, 5]);
        let v2 = vocab(&[1, 2, 5, 6]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[])).unwrap();
        let c2 = corpus(LanguageTag::L2, &[&[1, 2, 6], &[5, 5]]);
        let remapped = apply_remap(&table, &c2).unwrap();
        assert_eq!(invert_remap(&table, &remapped).unwrap(), c2);
    }

    #[test]
    fn inverse_attributes_origin() {
        let v1 = vocab(&[1, 2]);
        let v2 = vocab(&[2, 3]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::Full, 8, &set(&[])).unwrap();
        assert_eq!(table.inverse(TokenId(2)).unwrap(), (Origin::Shared, TokenId(2)));
        assert_eq!(table.inverse(TokenId(1)).unwrap(), (Origin::L1, TokenId(1)));
        assert_eq!(table.inverse(TokenId(3)).unwrap(), (Origin::L2, TokenId(3)));
    }

    #[test]
    fn special_tokens_stay_shared_under_none() {
        let v1 = vocab(&[0, 1, 2]);
        let v2 = vocab(&[0, 2, 3]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[0])).unwrap();
        assert_eq!(table.forward(LanguageTag::L2, TokenId(0)).unwrap(), TokenId(0));
        assert_eq!(table.forward(LanguageTag::L2, TokenId(2)).unwrap(), TokenId(10));
        assert_eq!(table.plan().effective_size(), 3 + 3 - 1);
    }

    #[test]
    fn effective_vocab_counts_unique_ids() {
        let a = corpus(LanguageTag::L1, &[&[1, 2]]);
        let b = corpus(LanguageTag::L2, &[&[2, 9]]);
        assert_eq!(effective_vocab_of_streams(&a, &b), 3);
    }

    #[test]
    fn prune_retains_used_ids() {
        let v = vocab(&[1, 2, 3]);
        let c = corpus(LanguageTag::L1, &[&[1, 3, 3]]);
        let pruned = prune_vocabulary(&v, &c);
        assert_eq!(pruned.id_set(), set(&[1, 3]));
    }

    #[test]
    fn prune_empty_corpus_empties_vocab() {
        let v = vocab(&[1, 2, 3]);
        let c = corpus(LanguageTag::L1, &[]);
        assert!(prune_vocabulary(&v, &c).is_empty());
    }

    #[test]
    fn dense_index_is_dense_and_sorted() {
        let v1 = vocab(&[1, 2]);
        let v2 = vocab(&[2, 3]);
        let partition = native_overlap(&v1, &v2);
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::None, 8, &set(&[])).unwrap();
        // identities: L1 {1, 2}, L2 {3, 2+8=10}
        let index = dense_index(&table);
        assert_eq!(
            index,
            vec![
                (TokenId(1), 0),
                (TokenId(2), 1),
                (TokenId(3), 2),
                (TokenId(10), 3)
            ]
        );
    }

    #[test]
    fn table_file_round_trips() {
        let v1 = vocab(&[1, 2, 5]);
        let v2 = vocab(&[2, 3, 5]);
        let partition = OverlapPartition::new(set(&[2, 5]), set(&[2]), set(&[5]), set(&[])).unwrap();
        let table =
            build_remap(&v1, &v2, &partition, OverlapSetting::LowSim, 8, &set(&[])).unwrap();
        let file = RemapTableFile::from_table(&table);
        let mut buf = Vec::new();
        file.write(&mut buf).unwrap();
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut tmp, &buf).unwrap();
        let reloaded = RemapTableFile::load(tmp.path()).unwrap();
        assert_eq!(reloaded, file);

        let c2 = corpus(LanguageTag::L2, &[&[2, 3, 5]]);
        let remapped = apply_remap(&table, &c2).unwrap();
        assert_eq!(reloaded.invert_corpus(&remapped).unwrap(), c2);
    }
}
