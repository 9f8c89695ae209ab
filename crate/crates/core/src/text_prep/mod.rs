//! Tokenization, sentence splitting and language identification.

mod khmer;
mod langid;
mod split;
mod tokenize;

use std::sync::Arc;

pub use khmer::{clusters, is_khmer, path_better, KhmerLexicon, ZWSP};
pub use langid::{LangGuess, LangIdModel, MAX_ORDER, MIN_SAMPLES_PER_LANG};
pub use split::split_sentences;
pub use tokenize::{is_punct, is_separator};
pub(crate) use tokenize::is_abbreviation;

use crate::{Error, Lang, Result};

/// Tokens of one sentence in one language. Tokens are never empty and never
/// contain whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub lang: Lang,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Tokenize `text`. Khmer requires a lexicon for text without ZWSP separators;
/// the lexicon is demanded for every Khmer call so behaviour does not depend on
/// the input.
pub fn tokenize(text: &str, lang: Lang, lexicon: Option<&KhmerLexicon>) -> Result<TokenSequence> {
    let tokens = match lang {
        Lang::En | Lang::Ps => tokenize::tokenize_spaced(text),
        Lang::Km => {
            let lexicon = lexicon.ok_or_else(|| Error::Config("Khmer tokenization requires a lexicon".into()))?;
            khmer::tokenize_khmer(text, lexicon)
        }
    };
    Ok(TokenSequence { tokens, lang })
}

/// A language-bound tokenizer that also produces alignment keys.
///
/// Keys are the tokens used by translation tables and IDF weights: English
/// keys are lowercased (switchable), other languages keep surface forms.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    lang: Lang,
    lexicon: Option<Arc<KhmerLexicon>>,
    lowercase_keys: bool,
}

impl Tokenizer {
    pub fn new(lang: Lang, lexicon: Option<Arc<KhmerLexicon>>) -> Result<Self> {
        if lang == Lang::Km && lexicon.is_none() {
            return Err(Error::Config("Khmer tokenization requires a lexicon".into()));
        }
        Ok(Self { lang, lexicon, lowercase_keys: lang == Lang::En })
    }

    pub fn with_lowercase_keys(mut self, on: bool) -> Self {
        self.lowercase_keys = on;
        self
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn tokenize(&self, text: &str) -> TokenSequence {
        tokenize(text, self.lang, self.lexicon.as_deref()).expect("lexicon presence checked in Tokenizer::new")
    }

    pub fn keys(&self, text: &str) -> Vec<String> {
        let toks = self.tokenize(text).tokens;
        if self.lowercase_keys {
            toks.into_iter().map(|t| t.to_lowercase()).collect()
        } else {
            toks
        }
    }

    /// Join tokens back into text using the language's word separator.
    pub fn join<S: AsRef<str>>(&self, tokens: &[S]) -> String {
        let sep = if self.lang == Lang::Km { "\u{200B}" } else { " " };
        let mut out = String::new();
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                out.push_str(sep);
            }
            out.push_str(t.as_ref());
        }
        out
    }
}
