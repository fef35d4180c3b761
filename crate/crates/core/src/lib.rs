//! Controlled vocabulary-overlap manipulation for bilingual tokenization
//! experiments.
//!
//! The crate covers the full desk-side pipeline around bilingual subword
//! vocabularies:
//!
//! * [`corpus`] — pre-tokenized stream ingestion, vocabulary extraction with
//!   exact counts, a greedy fixture tokenizer, seeded interleaving;
//! * [`remap`] — native overlap, the four-setting token-index remap
//!   (full / high-similarity / low-similarity / none), inversion, pruning
//!   and dense re-indexing;
//! * [`embed`] — embedding dumps, mean-pooled static embeddings, cosine
//!   ranking, overlap partitioning and the per-layer oracle sweep;
//! * [`stats`] — overlap metrics (IoU, frequency-weighted), compression
//!   rates, analysis sets and significance tests (Welch/Student t, Cohen's
//!   d, exact McNemar, Bonferroni);
//! * [`synth`] — deterministic synthetic corpora and planted dumps for
//!   tests and demos.
//!
//! With the default `parallel` feature the data-parallel inner loops
//! (counting, remapping, pooling/scoring) run on rayon; `*_seq` variants of
//! those entry points are always available and produce bit-identical
//! results.

pub mod corpus;
pub mod embed;
pub mod error;
pub mod remap;
pub mod stats;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
