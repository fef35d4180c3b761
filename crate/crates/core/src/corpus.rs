//! Corpus ingestion: pre-tokenized id streams, vocabulary extraction with
//! exact counts, a greedy longest-match tokenizer for fixtures, and seeded
//! bilingual interleaving.
//!
//! The canonical input is a pre-tokenized stream: UTF-8 text, one document
//! per line, ASCII-decimal token ids separated by single spaces. The greedy
//! tokenizer exists so tests and demos need no external segmenter.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{LanguageTag, TokenId, Vocabulary};

/// A corpus of one language as token-id documents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedCorpus {
    language: LanguageTag,
    documents: Vec<Vec<TokenId>>,
    total_tokens: u64,
}

impl TokenizedCorpus {
    pub fn new(language: LanguageTag, documents: Vec<Vec<TokenId>>) -> Self {
        let total_tokens = documents.iter().map(|d| d.len() as u64).sum();
        TokenizedCorpus {
            language,
            documents,
            total_tokens,
        }
    }

    pub fn language(&self) -> LanguageTag {
        self.language
    }

    pub fn documents(&self) -> &[Vec<TokenId>] {
        &self.documents
    }

    pub fn doc_count(&self) -> usize {
        self.documents.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Serialize as one line of space-separated decimal ids per document.
    pub fn write_stream<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for doc in &self.documents {
            let mut first = true;
            for id in doc {
                if !first {
                    w.write_all(b" ")?;
                }
                write!(w, "{}", id.value())?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_stream_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_stream(&mut buf).expect("writing to Vec cannot fail");
        buf
    }
}

/// Load a pre-tokenized stream: one document per line, space-separated
/// decimal ids. Blank lines produce empty documents. When `max_id` is given,
/// any id `>= max_id` is rejected.
pub fn load_pretokenized(
    path: &Path,
    language: LanguageTag,
    max_id: Option<u32>,
) -> Result<TokenizedCorpus> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut doc = Vec::new();
        for field in line.split_ascii_whitespace() {
            let value: u32 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("malformed token id {field:?}"),
            })?;
            if let Some(bound) = max_id {
                if value >= bound {
                    return Err(Error::TokenOutOfRange {
                        id: value,
                        bound,
                    });
                }
            }
            doc.push(TokenId(value));
        }
        documents.push(doc);
    }
    Ok(TokenizedCorpus::new(language, documents))
}

/// Extract the vocabulary of a corpus: exactly the ids that occur, with
/// their occurrence counts.
pub fn extract_language_vocab(corpus: &TokenizedCorpus) -> Vocabulary {
    #[cfg(feature = "parallel")]
    return extract_language_vocab_par(corpus);
    #[cfg(not(feature = "parallel"))]
    extract_language_vocab_seq(corpus)
}

pub fn extract_language_vocab_seq(corpus: &TokenizedCorpus) -> Vocabulary {
    let mut counts: BTreeMap<TokenId, u64> = BTreeMap::new();
    for doc in corpus.documents() {
        for id in doc {
            *counts.entry(*id).or_insert(0) += 1;
        }
    }
    Vocabulary::from_counts(counts)
}

/// Parallel count: shards are folded independently and merged; integer
/// addition makes the merge order irrelevant, so the result is bit-identical
/// to the sequential pass.
#[cfg(feature = "parallel")]
pub fn extract_language_vocab_par(corpus: &TokenizedCorpus) -> Vocabulary {
    let counts = corpus
        .documents()
        .par_iter()
        .fold(HashMap::<TokenId, u64>::new, |mut acc, doc| {
            for id in doc {
                *acc.entry(*id).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (id, n) in b {
                *a.entry(id).or_insert(0) += n;
            }
            a
        });
    Vocabulary::from_counts(counts.into_iter().collect())
}

/// One row of a vocab file: `surface<TAB>id[<TAB>score]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VocabRow {
    pub surface: String,
    pub id: TokenId,
    pub score: Option<f64>,
}

/// A surface-form vocabulary loaded from a TSV file.
#[derive(Clone, Debug, Default)]
pub struct VocabFile {
    rows: Vec<VocabRow>,
    by_surface: HashMap<String, TokenId>,
    max_surface_bytes: usize,
}

impl VocabFile {
    pub fn from_rows(rows: Vec<VocabRow>) -> Result<Self> {
        let mut by_surface = HashMap::with_capacity(rows.len());
        let mut seen_ids = HashMap::with_capacity(rows.len());
        let mut max_surface_bytes = 0;
        for row in &rows {
            if by_surface.insert(row.surface.clone(), row.id).is_some() {
                return Err(Error::VocabMismatch(format!(
                    "duplicate surface {:?}",
                    row.surface
                )));
            }
            if seen_ids.insert(row.id, ()).is_some() {
                return Err(Error::VocabMismatch(format!(
                    "duplicate token id {}",
                    row.id
                )));
            }
            max_surface_bytes = max_surface_bytes.max(row.surface.len());
        }
        Ok(VocabFile {
            rows,
            by_surface,
            max_surface_bytes,
        })
    }

    /// Parse `surface<TAB>id[<TAB>score]` rows; `#`-prefixed lines are
    /// comments.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let reader = BufReader::new(file);
        let mut rows = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let surface = fields.next().unwrap_or("").to_string();
            let id_field = fields.next().ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: "expected surface<TAB>id".into(),
            })?;
            let id: u32 = id_field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("malformed token id {id_field:?}"),
            })?;
            let score = match fields.next() {
                Some(s) => Some(s.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("malformed score {s:?}"),
                })?),
                None => None,
            };
            rows.push(VocabRow {
                surface,
                id: TokenId(id),
                score,
            });
        }
        VocabFile::from_rows(rows).map_err(|e| match e {
            Error::VocabMismatch(msg) => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: msg,
            },
            other => other,
        })
    }

    pub fn rows(&self) -> &[VocabRow] {
        &self.rows
    }

    pub fn id_of(&self, surface: &str) -> Option<TokenId> {
        self.by_surface.get(surface).copied()
    }

    pub fn surface_of(&self, id: TokenId) -> Option<&str> {
        self.rows
            .iter()
            .find(|r| r.id == id)
            .map(|r| r.surface.as_str())
    }

    pub fn max_surface_bytes(&self) -> usize {
        self.max_surface_bytes
    }
}

/// Greedy leftmost-longest tokenization over the vocab surfaces.
///
/// Every character of the input must be reachable through some surface;
/// otherwise a coverage error names the first uncovered character.
pub fn tokenize_greedy(text: &str, vocab: &VocabFile) -> Result<Vec<TokenId>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < text.len() {
        let limit = (start + vocab.max_surface_bytes()).min(text.len());
        let mut matched = None;
        let mut end = limit;
        while end > start {
            if text.is_char_boundary(end) {
                if let Some(id) = vocab.id_of(&text[start..end]) {
                    matched = Some((id, end));
                    break;
                }
            }
            end -= 1;
        }
        match matched {
            Some((id, end)) => {
                out.push(id);
                start = end;
            }
            None => {
                let ch = text[start..].chars().next().expect("start is a char boundary");
                return Err(Error::Coverage { ch, offset: start });
            }
        }
    }
    Ok(out)
}

/// One document of an interleaved bilingual stream, tagged with its origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedDocument {
    pub language: LanguageTag,
    pub tokens: Vec<TokenId>,
}

/// A seeded shuffle of the union of two corpora's documents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedCorpus {
    documents: Vec<MixedDocument>,
    total_tokens: u64,
}

impl MixedCorpus {
    pub fn documents(&self) -> &[MixedDocument] {
        &self.documents
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }
}

/// Interleave two corpora: a seeded uniform shuffle of the document multiset,
/// each document keeping its language tag. The same seed always produces the
/// same order.
pub fn interleave(c1: &TokenizedCorpus, c2: &TokenizedCorpus, seed: u64) -> Result<MixedCorpus> {
    if c1.is_empty() || c2.is_empty() {
        return Err(Error::InvalidConfig(
            "interleave requires two non-empty corpora".into(),
        ));
    }
    let mut documents: Vec<MixedDocument> = Vec::with_capacity(c1.doc_count() + c2.doc_count());
    for doc in c1.documents() {
        documents.push(MixedDocument {
            language: c1.language(),
            tokens: doc.clone(),
        });
    }
    for doc in c2.documents() {
        documents.push(MixedDocument {
            language: c2.language(),
            tokens: doc.clone(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    documents.shuffle(&mut rng);
    let total_tokens = documents.iter().map(|d| d.tokens.len() as u64).sum();
    Ok(MixedCorpus {
        documents,
        total_tokens,
    })
}
