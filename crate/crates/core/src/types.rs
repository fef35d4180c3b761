//! Domain types shared by every stage of the pipeline.
//!
//! All types here are immutable after construction and safe to share across
//! threads. Set-valued fields use `BTreeSet` so iteration order is always
//! ascending by token id.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a token in a base vocabulary of size `N`.
///
/// Base-vocabulary ids are in `[0, N)`; after remapping ids live in `[0, 2N)`.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn value(self) -> u32 {
        self.0
    }
}

impl From<u32> for TokenId {
    fn from(value: u32) -> Self {
        TokenId(value)
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The two languages of a bilingual experiment.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
pub enum LanguageTag {
    L1,
    L2,
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageTag::L1 => write!(f, "L1"),
            LanguageTag::L2 => write!(f, "L2"),
        }
    }
}

impl FromStr for LanguageTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L1" | "l1" => Ok(LanguageTag::L1),
            "L2" | "l2" => Ok(LanguageTag::L2),
            other => Err(Error::InvalidConfig(format!(
                "unknown language tag {other:?} (expected L1 or L2)"
            ))),
        }
    }
}

/// Which subset of the native overlap stays shared between the languages.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapSetting {
    /// Share the whole native overlap.
    Full,
    /// Share only the high-similarity half of the scored overlap.
    HighSim,
    /// Share only the low-similarity half of the scored overlap.
    LowSim,
    /// Share nothing; the vocabularies become disjoint.
    None,
}

impl OverlapSetting {
    pub const ALL: [OverlapSetting; 4] = [
        OverlapSetting::Full,
        OverlapSetting::HighSim,
        OverlapSetting::LowSim,
        OverlapSetting::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OverlapSetting::Full => "full",
            OverlapSetting::HighSim => "high",
            OverlapSetting::LowSim => "low",
            OverlapSetting::None => "none",
        }
    }
}

impl fmt::Display for OverlapSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OverlapSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(OverlapSetting::Full),
            "high" | "highsim" | "high-sim" => Ok(OverlapSetting::HighSim),
            "low" | "lowsim" | "low-sim" => Ok(OverlapSetting::LowSim),
            "none" => Ok(OverlapSetting::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown overlap setting {other:?} (expected full, high, low or none)"
            ))),
        }
    }
}

/// One vocabulary entry: occurrence count plus an optional surface form.
///
/// Corpora loaded as pre-tokenized id streams carry no surfaces, so the
/// surface is optional; vocabularies built from a vocab file have it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub surface: Option<String>,
    pub count: u64,
}

/// Per-corpus vocabulary: the unique token ids observed in one corpus,
/// each with its exact occurrence count.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vocabulary {
    entries: BTreeMap<TokenId, VocabEntry>,
}

impl Vocabulary {
    pub fn from_counts(counts: BTreeMap<TokenId, u64>) -> Self {
        let entries = counts
            .into_iter()
            .map(|(id, count)| (id, VocabEntry { surface: None, count }))
            .collect();
        Vocabulary { entries }
    }

    /// Build from `(surface, id, count)` triples, rejecting duplicate ids or
    /// duplicate surfaces.
    pub fn with_surfaces<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, TokenId, u64)>,
    {
        let mut entries = BTreeMap::new();
        let mut seen_surfaces = BTreeSet::new();
        for (surface, id, count) in triples {
            if !seen_surfaces.insert(surface.clone()) {
                return Err(Error::VocabMismatch(format!(
                    "duplicate surface {surface:?}"
                )));
            }
            let previous = entries.insert(
                id,
                VocabEntry {
                    surface: Some(surface),
                    count,
                },
            );
            if previous.is_some() {
                return Err(Error::VocabMismatch(format!("duplicate token id {id}")));
            }
        }
        Ok(Vocabulary { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: TokenId) -> bool {
        self.entries.contains_key(&id)
    }

    /// Occurrence count for `id`; zero when the token is absent.
    pub fn count(&self, id: TokenId) -> u64 {
        self.entries.get(&id).map(|e| e.count).unwrap_or(0)
    }

    pub fn surface(&self, id: TokenId) -> Option<&str> {
        self.entries.get(&id).and_then(|e| e.surface.as_deref())
    }

    pub fn ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.entries.keys().copied()
    }

    pub fn id_set(&self) -> BTreeSet<TokenId> {
        self.entries.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (TokenId, &VocabEntry)> {
        self.entries.iter().map(|(id, e)| (*id, e))
    }

    /// Sum of all occurrence counts (the running-token total of the corpus).
    pub fn total_tokens(&self) -> u64 {
        self.entries.values().map(|e| e.count).sum()
    }

    /// Merge two shard vocabularies by summing counts.
    ///
    /// The merge is associative and commutative, so counting shards in any
    /// order (or in parallel) produces the same vocabulary as a single pass.
    pub fn merge(&self, other: &Vocabulary) -> Result<Vocabulary> {
        let mut entries = self.entries.clone();
        for (id, entry) in &other.entries {
            match entries.get_mut(id) {
                Some(existing) => {
                    existing.count += entry.count;
                    match (&existing.surface, &entry.surface) {
                        (Some(a), Some(b)) if a != b => {
                            return Err(Error::VocabMismatch(format!(
                                "token {id} has conflicting surfaces {a:?} and {b:?}"
                            )));
                        }
                        (None, Some(b)) => existing.surface = Some(b.clone()),
                        _ => {}
                    }
                }
                None => {
                    entries.insert(*id, entry.clone());
                }
            }
        }
        Ok(Vocabulary { entries })
    }
}

/// The native overlap split into scored halves plus the unscored remainder.
///
/// `high` and `low` are disjoint subsets of `native`, and together with
/// `unscored` they cover it exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapPartition {
    native: BTreeSet<TokenId>,
    high: BTreeSet<TokenId>,
    low: BTreeSet<TokenId>,
    unscored: BTreeSet<TokenId>,
}

impl OverlapPartition {
    pub fn new(
        native: BTreeSet<TokenId>,
        high: BTreeSet<TokenId>,
        low: BTreeSet<TokenId>,
        unscored: BTreeSet<TokenId>,
    ) -> Result<Self> {
        if !high.is_subset(&native) || !low.is_subset(&native) {
            return Err(Error::InvalidConfig(
                "partition halves must be subsets of the native overlap".into(),
            ));
        }
        if !high.is_disjoint(&low) {
            return Err(Error::InvalidConfig(
                "high and low partition halves must be disjoint".into(),
            ));
        }
        let mut cover = high.clone();
        cover.extend(low.iter().copied());
        cover.extend(unscored.iter().copied());
        if cover != native {
            return Err(Error::InvalidConfig(
                "high, low and unscored must cover the native overlap exactly".into(),
            ));
        }
        Ok(OverlapPartition {
            native,
            high,
            low,
            unscored,
        })
    }

    /// A partition with no scored halves: everything is unscored.
    pub fn native_only(native: BTreeSet<TokenId>) -> Self {
        OverlapPartition {
            unscored: native.clone(),
            high: BTreeSet::new(),
            low: BTreeSet::new(),
            native,
        }
    }

    pub fn native(&self) -> &BTreeSet<TokenId> {
        &self.native
    }

    pub fn high(&self) -> &BTreeSet<TokenId> {
        &self.high
    }

    pub fn low(&self) -> &BTreeSet<TokenId> {
        &self.low
    }

    pub fn unscored(&self) -> &BTreeSet<TokenId> {
        &self.unscored
    }

    /// The shared set `O'` selected by a setting.
    ///
    /// `HighSim`/`LowSim` require the corresponding half to be non-empty.
    pub fn shared_for(&self, setting: OverlapSetting) -> Result<BTreeSet<TokenId>> {
        match setting {
            OverlapSetting::Full => Ok(self.native.clone()),
            OverlapSetting::None => Ok(BTreeSet::new()),
            OverlapSetting::HighSim => {
                if self.high.is_empty() {
                    Err(Error::InvalidConfig(
                        "setting high requires a non-empty high-similarity partition half".into(),
                    ))
                } else {
                    Ok(self.high.clone())
                }
            }
            OverlapSetting::LowSim => {
                if self.low.is_empty() {
                    Err(Error::InvalidConfig(
                        "setting low requires a non-empty low-similarity partition half".into(),
                    ))
                } else {
                    Ok(self.low.clone())
                }
            }
        }
    }
}

/// The token-index transformation chosen for one setting, with its
/// effective vocabulary size `|V1| + |V2| - |shared|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemapPlan {
    base_size: u32,
    setting: OverlapSetting,
    shared: BTreeSet<TokenId>,
    v1_size: u64,
    v2_size: u64,
    effective_size: u64,
}

impl RemapPlan {
    pub fn new(
        base_size: u32,
        setting: OverlapSetting,
        shared: BTreeSet<TokenId>,
        v1_size: u64,
        v2_size: u64,
    ) -> Self {
        let effective_size = v1_size + v2_size - shared.len() as u64;
        RemapPlan {
            base_size,
            setting,
            shared,
            v1_size,
            v2_size,
            effective_size,
        }
    }

    pub fn base_size(&self) -> u32 {
        self.base_size
    }

    pub fn setting(&self) -> OverlapSetting {
        self.setting
    }

    pub fn shared(&self) -> &BTreeSet<TokenId> {
        &self.shared
    }

    pub fn v1_size(&self) -> u64 {
        self.v1_size
    }

    pub fn v2_size(&self) -> u64 {
        self.v2_size
    }

    pub fn effective_size(&self) -> u64 {
        self.effective_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(values: &[u32]) -> BTreeSet<TokenId> {
        values.iter().copied().map(TokenId).collect()
    }

    #[test]
    fn partition_halves_cover_native() {
        let p = OverlapPartition::new(
            ids(&[1, 2, 3, 4]),
            ids(&[1]),
            ids(&[2]),
            ids(&[3, 4]),
        )
        .unwrap();
        assert_eq!(
            p.high().len() + p.low().len() + p.unscored().len(),
            p.native().len()
        );
    }

    #[test]
    fn partition_rejects_overlapping_halves() {
        let err = OverlapPartition::new(ids(&[1, 2]), ids(&[1]), ids(&[1]), ids(&[2]));
        assert!(err.is_err());
    }

    #[test]
    fn partition_rejects_incomplete_cover() {
        let err = OverlapPartition::new(ids(&[1, 2, 3]), ids(&[1]), ids(&[2]), BTreeSet::new());
        assert!(err.is_err());
    }

    #[test]
    fn shared_for_none_is_empty_and_full_is_native() {
        let p = OverlapPartition::new(ids(&[1, 2, 3]), ids(&[1, 2]), ids(&[3]), BTreeSet::new())
            .unwrap();
        assert!(p.shared_for(OverlapSetting::None).unwrap().is_empty());
        assert_eq!(p.shared_for(OverlapSetting::Full).unwrap(), ids(&[1, 2, 3]));
    }

    #[test]
    fn shared_for_empty_half_is_config_error() {
        let p = OverlapPartition::native_only(ids(&[1, 2]));
        assert!(p.shared_for(OverlapSetting::HighSim).is_err());
        assert!(p.shared_for(OverlapSetting::LowSim).is_err());
    }

    #[test]
    fn plan_effective_size_formula() {
        let plan = RemapPlan::new(10, OverlapSetting::Full, ids(&[1, 2]), 5, 4);
        assert_eq!(plan.effective_size(), 5 + 4 - 2);
        let none = RemapPlan::new(10, OverlapSetting::None, BTreeSet::new(), 5, 4);
        assert_eq!(none.effective_size(), 9);
    }

    #[test]
    fn vocabulary_rejects_duplicates() {
        let dup_id = Vocabulary::with_surfaces(vec![
            ("a".into(), TokenId(1), 1),
            ("b".into(), TokenId(1), 1),
        ]);
        assert!(dup_id.is_err());
        let dup_surface = Vocabulary::with_surfaces(vec![
            ("a".into(), TokenId(1), 1),
            ("a".into(), TokenId(2), 1),
        ]);
        assert!(dup_surface.is_err());
    }

    #[test]
    fn vocabulary_merge_sums_counts() {
        let a = Vocabulary::from_counts([(TokenId(1), 2), (TokenId(2), 1)].into());
        let b = Vocabulary::from_counts([(TokenId(2), 3), (TokenId(5), 1)].into());
        let merged = a.merge(&b).unwrap();
        assert_eq!(merged.count(TokenId(1)), 2);
        assert_eq!(merged.count(TokenId(2)), 4);
        assert_eq!(merged.count(TokenId(5)), 1);
        assert_eq!(merged.total_tokens(), 7);
    }

    #[test]
    fn setting_round_trips_through_str() {
        for setting in OverlapSetting::ALL {
            assert_eq!(setting.as_str().parse::<OverlapSetting>().unwrap(), setting);
        }
    }
}
