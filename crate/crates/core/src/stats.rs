//! Overlap metrics, compression rates, analysis-set construction and
//! significance tests (two-sample t, Cohen's d, exact McNemar, Bonferroni).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::embed::{pool_static, score_token, EmbeddingDump, SimilarityRanking};
use crate::error::{Error, Result};
use crate::types::{LanguageTag, OverlapPartition, TokenId, Vocabulary};

/// Type and frequency-weighted overlap of one remapped corpus pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapMetrics {
    /// `|O'|`: tokens shared between the two remapped vocabularies.
    pub shared_size: u64,
    /// `|V1| + |V2| - |O'|`.
    pub effective_size: u64,
    /// Jaccard overlap `|O'| / effective_size`, in `[0, 1]`.
    pub iou: f64,
    /// Fraction of running tokens of corpus 1 that are shared.
    pub f1: f64,
    /// Fraction of running tokens of corpus 2 that are shared.
    pub f2: f64,
}

/// `|V1| + |V2| - |shared|`.
pub fn effective_size(v1_size: u64, v2_size: u64, shared: u64) -> u64 {
    v1_size + v2_size - shared
}

/// Jaccard overlap from set sizes; zero when nothing is shared.
pub fn iou_from_sizes(shared: u64, effective: u64) -> f64 {
    if effective == 0 {
        0.0
    } else {
        shared as f64 / effective as f64
    }
}

/// Overlap metrics for a remapped pair, given per-corpus vocabularies whose
/// counts are exact occurrence totals.
pub fn overlap_metrics(v1: &Vocabulary, v2: &Vocabulary) -> Result<OverlapMetrics> {
    let total1 = v1.total_tokens();
    let total2 = v2.total_tokens();
    if total1 == 0 {
        return Err(Error::EmptyCorpus {
            language: LanguageTag::L1,
        });
    }
    if total2 == 0 {
        return Err(Error::EmptyCorpus {
            language: LanguageTag::L2,
        });
    }
    let shared: Vec<TokenId> = v1.ids().filter(|id| v2.contains(*id)).collect();
    let shared_size = shared.len() as u64;
    let effective = effective_size(v1.len() as u64, v2.len() as u64, shared_size);
    let shared_count1: u64 = shared.iter().map(|id| v1.count(*id)).sum();
    let shared_count2: u64 = shared.iter().map(|id| v2.count(*id)).sum();
    Ok(OverlapMetrics {
        shared_size,
        effective_size: effective,
        iou: iou_from_sizes(shared_size, effective),
        f1: shared_count1 as f64 / total1 as f64,
        f2: shared_count2 as f64 / total2 as f64,
    })
}

/// UTF-8 byte count and Unicode scalar count of a text.
pub fn text_counts(text: &str) -> (u64, u64) {
    (text.len() as u64, text.chars().count() as u64)
}

/// Bytes per token and characters per token.
pub fn compression_rates(bytes: u64, chars: u64, tokens: u64) -> Result<(f64, f64)> {
    if tokens == 0 {
        return Err(Error::ZeroTokens);
    }
    Ok((bytes as f64 / tokens as f64, chars as f64 / tokens as f64))
}

/// A cross-lingual token pair: an L1 token and an L2 token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TokenPair {
    pub l1: TokenId,
    pub l2: TokenId,
}

/// The three evaluation sets of the embedding-similarity analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSets {
    /// Top-k ranked overlap tokens, paired with themselves across languages.
    pub high: Vec<TokenPair>,
    /// Bottom-k ranked overlap tokens.
    pub low: Vec<TokenPair>,
    /// Seeded random pairs of non-overlapping tokens: an anisotropy control
    /// that shares neither form nor meaning.
    pub control: Vec<TokenPair>,
}

/// Select the top-k and bottom-k ranked tokens plus k seeded control pairs
/// drawn without replacement from each language's non-overlapping tokens.
///
/// Control tokens are sampled outside the whole native overlap, so they are
/// outside `O'` under every setting.
pub fn build_analysis_sets(
    ranking: &SimilarityRanking,
    v1: &Vocabulary,
    v2: &Vocabulary,
    partition: &OverlapPartition,
    k: usize,
    seed: u64,
) -> Result<AnalysisSets> {
    if ranking.len() < 2 * k {
        return Err(Error::SizeShortfall {
            set: "ranking",
            needed: 2 * k,
            available: ranking.len(),
        });
    }
    let high = ranking
        .top(k)
        .iter()
        .map(|e| TokenPair {
            l1: e.token,
            l2: e.token,
        })
        .collect();
    let low = ranking
        .bottom(k)
        .iter()
        .map(|e| TokenPair {
            l1: e.token,
            l2: e.token,
        })
        .collect();

    let native = partition.native();
    let pool1: Vec<TokenId> = v1.ids().filter(|id| !native.contains(id)).collect();
    let pool2: Vec<TokenId> = v2.ids().filter(|id| !native.contains(id)).collect();
    if pool1.len() < k {
        return Err(Error::SizeShortfall {
            set: "control (L1)",
            needed: k,
            available: pool1.len(),
        });
    }
    if pool2.len() < k {
        return Err(Error::SizeShortfall {
            set: "control (L2)",
            needed: k,
            available: pool2.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks1 = rand::seq::index::sample(&mut rng, pool1.len(), k);
    let picks2 = rand::seq::index::sample(&mut rng, pool2.len(), k);
    let control = picks1
        .iter()
        .zip(picks2.iter())
        .map(|(i, j)| TokenPair {
            l1: pool1[i],
            l2: pool2[j],
        })
        .collect();
    Ok(AnalysisSets { high, low, control })
}

/// Which two-sample t-test to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestKind {
    /// Welch's t-test (unequal variances).
    Welch,
    /// Student's t-test with a pooled variance.
    Pooled,
}

/// Test statistics for one comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatResult {
    pub t: f64,
    pub df: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub d: f64,
    pub n1: usize,
    pub n2: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcnemar_b: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcnemar_c: Option<u64>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_variance(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

fn require_sample(values: &[f64], needed: usize) -> Result<()> {
    if values.len() < needed {
        return Err(Error::SampleTooSmall {
            needed,
            got: values.len(),
        });
    }
    Ok(())
}

/// Two-sided p-value for a t statistic with `df` degrees of freedom.
///
/// `t == 0` maps to exactly 1 and an infinite `t` to exactly 0.
fn two_sided_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Unpaired two-sample t-test of `a` against `b`; positive `t` means
/// `mean(a) > mean(b)`.
///
/// When both samples are constant the standard error is zero: equal means
/// give `t = 0, p = 1`, distinct means give an infinite `t` with `p = 0`.
pub fn two_sample_t(a: &[f64], b: &[f64], kind: TTestKind) -> Result<(f64, f64, f64)> {
    require_sample(a, 2)?;
    require_sample(b, 2)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (m1, m2) = (mean(a), mean(b));
    let (v1, v2) = (sample_variance(a, m1), sample_variance(b, m2));
    let diff = m1 - m2;
    let (se2, df) = match kind {
        TTestKind::Welch => {
            let se2 = v1 / n1 + v2 / n2;
            let df = if se2 == 0.0 {
                n1 + n2 - 2.0
            } else {
                se2 * se2
                    / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0))
            };
            (se2, df)
        }
        TTestKind::Pooled => {
            let df = n1 + n2 - 2.0;
            let pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;
            (pooled * (1.0 / n1 + 1.0 / n2), df)
        }
    };
    let t = if se2 == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    } else {
        diff / se2.sqrt()
    };
    Ok((t, df, two_sided_p(t, df)))
}

/// Cohen's d with a pooled, (n-1)-weighted standard deviation; positive when
/// `mean(a) > mean(b)`.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    require_sample(a, 2)?;
    require_sample(b, 2)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (m1, m2) = (mean(a), mean(b));
    let (v1, v2) = (sample_variance(a, m1), sample_variance(b, m2));
    let pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / (n1 + n2 - 2.0);
    if pooled == 0.0 {
        return Err(Error::UndefinedEffect);
    }
    Ok((m1 - m2) / pooled.sqrt())
}

/// Bonferroni correction: `min(1, m * p)`.
pub fn bonferroni(p: f64, m: u32) -> f64 {
    (p * m as f64).min(1.0)
}

/// Which branch a McNemar test took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum McNemarMethod {
    /// Exact two-sided binomial test.
    Exact,
    /// Continuity-corrected chi-squared approximation.
    ChiSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McNemarResult {
    pub b: u64,
    pub c: u64,
    pub p: f64,
    pub method: McNemarMethod,
    /// True when there are no discordant pairs at all (p is 1 by definition).
    pub zero_discordance: bool,
}

/// Cumulative probability `P(X <= m)` for `X ~ Binomial(n, 1/2)`.
///
/// Binomial coefficients are accumulated as exact integers while they fit,
/// so small-n tail probabilities come out exact (the divisor `2^n` is a
/// power of two).
fn binomial_half_cdf(m: u64, n: u64) -> f64 {
    if n <= 120 {
        let mut coeff: u128 = 1;
        let mut sum: u128 = 1; // C(n, 0)
        for i in 0..m {
            coeff = coeff * (n - i) as u128 / (i + 1) as u128;
            sum += coeff;
        }
        sum as f64 / 2f64.powi(n as i32)
    } else {
        let mut log_coeff = 0.0f64;
        let mut sum = 0.0f64;
        let log2n = n as f64 * std::f64::consts::LN_2;
        sum += (-log2n).exp();
        for i in 0..m {
            log_coeff += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
            sum += (log_coeff - log2n).exp();
        }
        sum.min(1.0)
    }
}

/// McNemar test on discordant-pair counts with the default exact/χ²
/// switch-over at 25 discordant pairs.
pub fn mcnemar(b: u64, c: u64) -> McNemarResult {
    mcnemar_with_threshold(b, c, 25)
}

/// McNemar test: exact two-sided binomial `min(1, 2 * P(X <= min(b, c)))`
/// while `b + c <= exact_max`, otherwise a chi-squared statistic with the
/// continuity correction floored at zero so `b == c` still yields `p = 1`.
pub fn mcnemar_with_threshold(b: u64, c: u64, exact_max: u64) -> McNemarResult {
    let n = b + c;
    if n == 0 {
        return McNemarResult {
            b,
            c,
            p: 1.0,
            method: McNemarMethod::Exact,
            zero_discordance: true,
        };
    }
    if n <= exact_max {
        let p = (2.0 * binomial_half_cdf(b.min(c), n)).min(1.0);
        McNemarResult {
            b,
            c,
            p,
            method: McNemarMethod::Exact,
            zero_discordance: false,
        }
    } else {
        let corrected = (b as f64 - c as f64).abs() - 1.0;
        let statistic = corrected.max(0.0).powi(2) / n as f64;
        let p = if statistic == 0.0 {
            1.0
        } else {
            ChiSquared::new(1.0)
                .expect("one degree of freedom")
                .sf(statistic)
                .clamp(0.0, 1.0)
        };
        McNemarResult {
            b,
            c,
            p,
            method: McNemarMethod::ChiSquared,
            zero_discordance: false,
        }
    }
}

/// Discordant-pair counts of two equal-length 0/1 correctness vectors:
/// `b` counts instances only `a` got right, `c` those only `b` got right.
pub fn discordant_counts(a: &[bool], b: &[bool]) -> Result<(u64, u64)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let mut only_a = 0;
    let mut only_b = 0;
    for (x, y) in a.iter().zip(b) {
        match (x, y) {
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            _ => {}
        }
    }
    Ok((only_a, only_b))
}

/// A pair that could not be scored because the dump lacks occurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExcludedPair {
    pub pair: TokenPair,
    pub missing_l1: bool,
    pub missing_l2: bool,
}

/// Cosine similarities of one analysis set, with excluded pairs listed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SetSimilarities {
    pub similarities: Vec<f64>,
    pub excluded: Vec<ExcludedPair>,
}

impl SetSimilarities {
    pub fn mean(&self) -> f64 {
        if self.similarities.is_empty() {
            f64::NAN
        } else {
            mean(&self.similarities)
        }
    }
}

/// Full outcome of the embedding-similarity analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOutcome {
    pub high: SetSimilarities,
    pub low: SetSimilarities,
    pub control: SetSimilarities,
    /// High vs low comparison.
    pub stats: StatResult,
}

fn score_pairs(
    pairs: &[TokenPair],
    dump: &EmbeddingDump,
    cap: usize,
) -> Result<SetSimilarities> {
    let mut out = SetSimilarities::default();
    for pair in pairs {
        let missing_l1 = !dump.has(LanguageTag::L1, pair.l1);
        let missing_l2 = !dump.has(LanguageTag::L2, pair.l2);
        if missing_l1 || missing_l2 {
            out.excluded.push(ExcludedPair {
                pair: *pair,
                missing_l1,
                missing_l2,
            });
            continue;
        }
        let e1 = pool_static(dump, pair.l1, LanguageTag::L1, cap)?;
        let e2 = pool_static(dump, pair.l2, LanguageTag::L2, cap)?;
        out.similarities.push(score_token(&e1, &e2)?);
    }
    Ok(out)
}

/// Score every analysis pair against a model dump and test high vs low.
///
/// Pairs without dump coverage are listed as exclusions, never silently
/// dropped. When both similarity lists are constant and equal the result is
/// the null outcome `t = 0, p = 1, d = 0`.
pub fn similarity_analysis(
    sets: &AnalysisSets,
    dump: &EmbeddingDump,
    cap: usize,
    bonferroni_m: u32,
    kind: TTestKind,
) -> Result<AnalysisOutcome> {
    let high = score_pairs(&sets.high, dump, cap)?;
    let low = score_pairs(&sets.low, dump, cap)?;
    let control = score_pairs(&sets.control, dump, cap)?;
    let (t, df, p_raw) = two_sample_t(&high.similarities, &low.similarities, kind)?;
    let d = match cohens_d(&high.similarities, &low.similarities) {
        Ok(d) => d,
        Err(Error::UndefinedEffect) if t == 0.0 => 0.0,
        Err(e) => return Err(e),
    };
    let stats = StatResult {
        t,
        df,
        p_raw,
        p_adjusted: bonferroni(p_raw, bonferroni_m),
        d,
        n1: high.similarities.len(),
        n2: low.similarities.len(),
        mcnemar_b: None,
        mcnemar_c: None,
    };
    Ok(AnalysisOutcome {
        high,
        low,
        control,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{DumpSet, OccurrenceRecord};
    use std::collections::BTreeMap;

    #[test]
    fn metrics_direct_ratio() {
        // C1 = [1, 1, 2, 3], C2 = [1, 9]; O' = {1} so F1 = 2/4.
        let v1 = Vocabulary::from_counts(
            [(TokenId(1), 2), (TokenId(2), 1), (TokenId(3), 1)].into(),
        );
        let v2 = Vocabulary::from_counts([(TokenId(1), 1), (TokenId(9), 1)].into());
        let m = overlap_metrics(&v1, &v2).unwrap();
        assert_eq!(m.shared_size, 1);
        assert_eq!(m.effective_size, 4);
        assert_eq!(m.f1, 0.5);
        assert_eq!(m.f2, 0.5);
        assert_eq!(m.iou, 0.25);
    }

    #[test]
    fn metrics_empty_corpus_errors() {
        let v1 = Vocabulary::from_counts([(TokenId(1), 1)].into());
        let v2 = Vocabulary::default();
        assert!(matches!(
            overlap_metrics(&v1, &v2),
            Err(Error::EmptyCorpus { .. })
        ));
    }

    #[test]
    fn metrics_disjoint_all_zero() {
        let v1 = Vocabulary::from_counts([(TokenId(1), 3)].into());
        let v2 = Vocabulary::from_counts([(TokenId(2), 5)].into());
        let m = overlap_metrics(&v1, &v2).unwrap();
        assert_eq!(m.shared_size, 0);
        assert_eq!(m.iou, 0.0);
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.f2, 0.0);
    }

    #[test]
    fn compression_reference_values() {
        assert_eq!(compression_rates(4, 4, 2).unwrap(), (2.0, 2.0));
        assert_eq!(compression_rates(2, 1, 1).unwrap(), (2.0, 1.0));
        assert!(matches!(compression_rates(4, 4, 0), Err(Error::ZeroTokens)));
    }

    #[test]
    fn text_counts_multibyte() {
        assert_eq!(text_counts("abcd"), (4, 4));
        assert_eq!(text_counts("é"), (2, 1));
    }

    #[test]
    fn cohens_d_hand_computed() {
        // means 2 and 3, both variances 1, pooled SD 1 → d = -1.
        let d = cohens_d(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d, -1.0);
    }

    #[test]
    fn cohens_d_identical_samples_is_zero() {
        let d = cohens_d(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn cohens_d_zero_pooled_sd_errors() {
        assert!(matches!(
            cohens_d(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::UndefinedEffect)
        ));
    }

    #[test]
    fn welch_identical_samples_p_is_one() {
        let (t, _, p) = two_sample_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], TTestKind::Welch)
            .unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn welch_constant_distinct_samples_saturate() {
        let (t, _, p) = two_sample_t(&[1.0, 1.0], &[2.0, 2.0], TTestKind::Welch).unwrap();
        assert!(t.is_infinite() && t < 0.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn t_and_d_share_sign() {
        let a = [3.0, 4.0, 5.0, 6.0];
        let b = [1.0, 2.0, 2.5, 3.0];
        let (t, _, _) = two_sample_t(&a, &b, TTestKind::Welch).unwrap();
        let d = cohens_d(&a, &b).unwrap();
        assert!(t > 0.0 && d > 0.0);
    }

    #[test]
    fn bonferroni_reference_values() {
        assert_eq!(bonferroni(0.01, 24), 0.24);
        assert_eq!(bonferroni(0.2, 10), 1.0);
        assert_eq!(bonferroni(0.37, 1), 0.37);
    }

    #[test]
    fn mcnemar_binomial_tails_by_hand() {
        // b=1, c=5: 2 * (C(6,0) + C(6,1)) / 2^6 = 14/64.
        assert_eq!(mcnemar(1, 5).p, 0.21875);
        // b=0, c=10: 2 * C(10,0) / 2^10 = 2/1024.
        assert_eq!(mcnemar(0, 10).p, 2.0 / 1024.0);
    }

    #[test]
    fn mcnemar_symmetric_discordance_is_one() {
        assert_eq!(mcnemar(3, 3).p, 1.0);
        assert_eq!(mcnemar(20, 20).p, 1.0); // chi-squared branch
    }

    #[test]
    fn mcnemar_zero_discordance_flagged() {
        let r = mcnemar(0, 0);
        assert_eq!(r.p, 1.0);
        assert!(r.zero_discordance);
    }

    #[test]
    fn mcnemar_is_symmetric_in_b_and_c() {
        for (b, c) in [(1, 5), (0, 10), (4, 9), (30, 12)] {
            assert_eq!(mcnemar(b, c).p, mcnemar(c, b).p);
        }
    }

    #[test]
    fn mcnemar_chi_squared_branch_above_threshold() {
        let r = mcnemar(5, 30);
        assert_eq!(r.method, McNemarMethod::ChiSquared);
        assert!(r.p > 0.0 && r.p < 0.05);
    }

    #[test]
    fn discordant_counts_reference() {
        let a = [true, true, false, true, false];
        let b = [true, false, true, true, false];
        assert_eq!(discordant_counts(&a, &b).unwrap(), (1, 1));
        assert!(matches!(
            discordant_counts(&[true], &[true, false]),
            Err(Error::LengthMismatch { a: 1, b: 2 })
        ));
    }

    fn ranking(scores: &[(u32, f64)]) -> SimilarityRanking {
        SimilarityRanking::from_scores(
            scores.iter().map(|(t, s)| (TokenId(*t), *s)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn analysis_sets_extremes() {
        let r = ranking(&[(1, 0.9), (2, 0.1)]);
        let v1 = Vocabulary::from_counts(
            [(TokenId(1), 1), (TokenId(2), 1), (TokenId(10), 1)].into(),
        );
        let v2 = Vocabulary::from_counts(
            [(TokenId(1), 1), (TokenId(2), 1), (TokenId(20), 1)].into(),
        );
        let partition = crate::remap::native_overlap(&v1, &v2);
        let sets = build_analysis_sets(&r, &v1, &v2, &partition, 1, 7).unwrap();
        assert_eq!(sets.high[0].l1, TokenId(1));
        assert_eq!(sets.low[0].l1, TokenId(2));
        assert_eq!(sets.control.len(), 1);
        assert_eq!(sets.control[0].l1, TokenId(10));
        assert_eq!(sets.control[0].l2, TokenId(20));
    }

    #[test]
    fn analysis_sets_same_seed_same_controls() {
        let r = ranking(&[(1, 0.9), (2, 0.8), (3, 0.2), (4, 0.1)]);
        let ids1: BTreeMap<TokenId, u64> =
            (0..40u32).map(|i| (TokenId(i), 1)).collect();
        let ids2: BTreeMap<TokenId, u64> =
            (0..4u32).chain(100..140).map(|i| (TokenId(i), 1)).collect();
        let v1 = Vocabulary::from_counts(ids1);
        let v2 = Vocabulary::from_counts(ids2);
        let partition = crate::remap::native_overlap(&v1, &v2);
        let a = build_analysis_sets(&r, &v1, &v2, &partition, 2, 99).unwrap();
        let b = build_analysis_sets(&r, &v1, &v2, &partition, 2, 99).unwrap();
        assert_eq!(a, b);
        for pair in &a.control {
            assert!(!partition.native().contains(&pair.l1));
            assert!(!partition.native().contains(&pair.l2));
        }
    }

    #[test]
    fn analysis_sets_shortfall_reports_counts() {
        let r = ranking(&[(1, 0.9), (2, 0.1)]);
        let v1 = Vocabulary::from_counts([(TokenId(1), 1), (TokenId(2), 1)].into());
        let v2 = Vocabulary::from_counts([(TokenId(1), 1), (TokenId(2), 1)].into());
        let partition = crate::remap::native_overlap(&v1, &v2);
        match build_analysis_sets(&r, &v1, &v2, &partition, 1, 0) {
            Err(Error::SizeShortfall { set, needed, available }) => {
                assert_eq!(set, "control (L1)");
                assert_eq!(needed, 1);
                assert_eq!(available, 0);
            }
            other => panic!("expected shortfall, got {other:?}"),
        }
    }

    fn identical_vector_dump(tokens: &[u32]) -> DumpSet {
        let mut records = Vec::new();
        for t in tokens {
            for lang in [LanguageTag::L1, LanguageTag::L2] {
                records.push(OccurrenceRecord {
                    token: TokenId(*t),
                    lang,
                    layer: 6,
                    vec: vec![1.0, 1.0],
                });
            }
        }
        DumpSet::from_records(records).unwrap()
    }

    #[test]
    fn analysis_identical_vectors_is_null_result() {
        let sets = AnalysisSets {
            high: (1..=3)
                .map(|t| TokenPair { l1: TokenId(t), l2: TokenId(t) })
                .collect(),
            low: (4..=6)
                .map(|t| TokenPair { l1: TokenId(t), l2: TokenId(t) })
                .collect(),
            control: vec![],
        };
        let dumps = identical_vector_dump(&[1, 2, 3, 4, 5, 6]);
        let outcome =
            similarity_analysis(&sets, dumps.layer(6).unwrap(), 100, 4, TTestKind::Welch)
                .unwrap();
        assert_eq!(outcome.stats.t, 0.0);
        assert_eq!(outcome.stats.p_raw, 1.0);
        assert_eq!(outcome.stats.p_adjusted, 1.0);
        assert_eq!(outcome.stats.d, 0.0);
    }

    #[test]
    fn analysis_lists_missing_pairs() {
        let sets = AnalysisSets {
            high: vec![
                TokenPair { l1: TokenId(1), l2: TokenId(1) },
                TokenPair { l1: TokenId(2), l2: TokenId(2) },
                TokenPair { l1: TokenId(99), l2: TokenId(99) },
            ],
            low: vec![
                TokenPair { l1: TokenId(3), l2: TokenId(3) },
                TokenPair { l1: TokenId(4), l2: TokenId(4) },
            ],
            control: vec![],
        };
        let dumps = identical_vector_dump(&[1, 2, 3, 4]);
        let outcome =
            similarity_analysis(&sets, dumps.layer(6).unwrap(), 100, 1, TTestKind::Welch)
                .unwrap();
        assert_eq!(outcome.high.excluded.len(), 1);
        assert_eq!(outcome.high.excluded[0].pair.l1, TokenId(99));
        assert!(outcome.high.excluded[0].missing_l1);
        assert_eq!(outcome.high.similarities.len(), 2);
    }
}
