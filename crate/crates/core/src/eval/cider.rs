//! CIDEr-D.
//!
//! N-grams of order 1 to 4 weighted by TF-IDF, with document frequencies
//! taken over the reference sets of the scored corpus. Candidate counts are
//! clipped at the reference counts and each cosine is damped by a Gaussian
//! length penalty with sigma 6. Scores are scaled by 10.
//!
//! With a corpus of one item every IDF is `ln 1 - ln 1 = 0` and the metric
//! is undefined; in that case all n-grams get unit weight.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::registry::Script;

pub const MAX_N: usize = 4;
pub const SIGMA: f64 = 6.0;

type Gram = Vec<String>;

/// Lowercase, drop punctuation, split at whitespace. Characters of scripts
/// written without spaces (Han, kana, Thai, Lao, Khmer, Myanmar, Tibetan)
/// become one token each.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    for c in text.to_lowercase().chars() {
        if c.is_whitespace() || is_punctuation(c) {
            flush(&mut cur, &mut out);
        } else if is_unspaced(c) {
            flush(&mut cur, &mut out);
            out.push(c.to_string());
        } else {
            cur.push(c);
        }
    }
    flush(&mut cur, &mut out);
    out
}

fn is_unspaced(c: char) -> bool {
    matches!(
        Script::of_char(c),
        Some(
            Script::Han | Script::Japanese | Script::Thai | Script::Lao | Script::Khmer | Script::Myanmar | Script::Tibetan
        )
    )
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '。' | '、' | '，' | '．' | '！' | '？' | '：' | '；' | '「' | '」' | '『' | '』' | '（' | '）'
                | '«' | '»' | '“' | '”' | '‘' | '’' | '…' | '¿' | '¡' | '،' | '؟' | '۔' | '।' | '॥'
        )
}

fn ngram_counts(tokens: &[String]) -> [HashMap<Gram, f64>; MAX_N] {
    std::array::from_fn(|k| {
        let mut m = HashMap::new();
        for w in tokens.windows(k + 1) {
            *m.entry(w.to_vec()).or_insert(0.0) += 1.0;
        }
        m
    })
}

struct Doc {
    vec: [HashMap<Gram, f64>; MAX_N],
    norm: [f64; MAX_N],
    len: usize,
}

/// Document frequencies over a reference corpus.
pub struct CiderD {
    df: HashMap<Gram, f64>,
    log_n: f64,
    unit_idf: bool,
}

impl CiderD {
    pub fn new(references: &[Vec<String>]) -> Result<Self> {
        if references.is_empty() {
            return Err(Error::InvalidInput("CIDEr corpus is empty".into()));
        }
        let mut df: HashMap<Gram, f64> = HashMap::new();
        for (i, refs) in references.iter().enumerate() {
            if refs.is_empty() {
                return Err(Error::EmptyReferences(i));
            }
            let mut seen: HashSet<Gram> = HashSet::new();
            for r in refs {
                for m in ngram_counts(&tokenize(r)) {
                    seen.extend(m.into_keys());
                }
            }
            for g in seen {
                *df.entry(g).or_insert(0.0) += 1.0;
            }
        }
        Ok(Self {
            df,
            log_n: (references.len() as f64).ln(),
            unit_idf: references.len() == 1,
        })
    }

    fn doc(&self, text: &str) -> Doc {
        let tokens = tokenize(text);
        let counts = ngram_counts(&tokens);
        let mut norm = [0.0; MAX_N];
        let vec = std::array::from_fn(|k| {
            counts[k]
                .iter()
                .map(|(g, &tf)| {
                    let idf = if self.unit_idf {
                        1.0
                    } else {
                        self.log_n - self.df.get(g).copied().unwrap_or(0.0).max(1.0).ln()
                    };
                    let v = tf * idf;
                    norm[k] += v * v;
                    (g.clone(), v)
                })
                .collect()
        });
        Doc {
            vec,
            norm: norm.map(f64::sqrt),
            len: tokens.len(),
        }
    }

    fn similarity(cand: &Doc, reference: &Doc) -> f64 {
        let delta = cand.len as f64 - reference.len as f64;
        let penalty = (-(delta * delta) / (2.0 * SIGMA * SIGMA)).exp();
        let mut total = 0.0;
        for k in 0..MAX_N {
            let mut dot = 0.0;
            for (g, &v) in &cand.vec[k] {
                if let Some(&r) = reference.vec[k].get(g) {
                    dot += v.min(r) * r;
                }
            }
            if cand.norm[k] != 0.0 && reference.norm[k] != 0.0 {
                total += dot / (cand.norm[k] * reference.norm[k]) * penalty;
            }
        }
        total / MAX_N as f64
    }

    /// Score of one candidate against its references, in `[0, 10]`.
    pub fn score_one(&self, candidate: &str, references: &[String]) -> f64 {
        let cand = self.doc(candidate);
        let sum: f64 = references
            .iter()
            .map(|r| Self::similarity(&cand, &self.doc(r)))
            .sum();
        10.0 * sum / references.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiderScores {
    /// Mean over items, in `[0, 10]`.
    pub corpus: f64,
    pub per_item: Vec<f64>,
}

pub fn cider(candidates: &[String], references: &[Vec<String>]) -> Result<CiderScores> {
    if candidates.len() != references.len() {
        return Err(Error::InvalidInput(format!(
            "{} candidates but {} reference sets",
            candidates.len(),
            references.len()
        )));
    }
    let model = CiderD::new(references)?;
    let per_item: Vec<f64> = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| model.score_one(c, r))
        .collect();
    let corpus = per_item.iter().sum::<f64>() / per_item.len() as f64;
    Ok(CiderScores { corpus, per_item })
}
