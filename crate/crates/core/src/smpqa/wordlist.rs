use std::collections::HashSet;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Newline-delimited label vocabulary for one language, deduplicated in
/// first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    words: Vec<String>,
    digest: String,
}

macro_rules! builtin {
    ($($code:literal),* $(,)?) => {
        const BUILTIN: &[(&str, &str)] = &[
            $(($code, include_str!(concat!("../../data/wordlists/", $code, ".txt"))),)*
        ];
    };
}

builtin!("ar", "de", "en", "hi", "id", "it", "ko", "ru", "th", "zh", "zu");

impl WordList {
    pub fn parse(text: &str) -> Self {
        let mut seen = HashSet::new();
        let words: Vec<String> = text
            .lines()
            .map(|l| l.trim_start_matches('\u{FEFF}').trim())
            .filter(|l| !l.is_empty())
            .filter(|l| seen.insert(l.to_string()))
            .map(str::to_owned)
            .collect();
        let digest = hex::encode(Sha256::digest(words.join("\n").as_bytes()));
        Self { words, digest }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    /// Small bundled list for one of the default languages.
    pub fn builtin(code: &str) -> Option<Self> {
        BUILTIN
            .iter()
            .find(|(c, _)| *c == code)
            .map(|(_, text)| Self::parse(text))
    }

    pub fn builtin_languages() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(c, _)| *c)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}
