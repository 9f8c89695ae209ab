//! Parallel-corpus mining and filtering.
//!
//! The crate is organised as a pipeline:
//!
//! * [`text_prep`] tokenizes English, Pashto and Khmer text, splits documents
//!   into initial segments and identifies languages.
//! * [`word_align`] trains forward and reverse word-translation tables with EM.
//! * [`similarity`] scores segment pairs with an IDF-weighted lexical F-measure.
//! * [`mining`] extracts sentence pairs from document pairs (greedy matching plus
//!   a monotone dynamic-programming segmentation) and iterates table training.
//! * [`scoring`] trains a pair classifier, rank-normalizes its scores, applies
//!   language-ID and n-gram coverage discounts and ensembles score lists.
//! * [`corpus_io`] reads and writes corpora, merges, subsamples to an English
//!   word budget and runs the whole pipeline.

pub mod corpus_io;
pub mod error;
pub mod lang;
pub mod mining;
pub mod scoring;
pub mod similarity;
pub mod synth;
pub mod text_prep;
pub mod word_align;

pub use error::{Error, Result};
pub use lang::{Lang, LangPair};
