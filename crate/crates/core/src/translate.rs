//! Machine translation of instruction data through an external service.
//!
//! The service speaks a minimal JSON protocol:
//! `POST {"texts": [...], "src": "eng_Latn", "tgt": "deu_Latn"}` answered by
//! `{"translations": [...]}`. Results are cached on disk keyed by a digest of
//! text, language pair and model id.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex, RwLock};
use std::time::Duration;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::planner::MixPlan;
use crate::registry::{Language, Registry};
use crate::rng;

/// Training datasets and whether their text is machine-translated. Text in
/// OCR-style datasets refers to text inside the image and stays English.
pub const KNOWN_DATASETS: &[(&str, bool)] = &[
    ("llava-instruct", true),
    ("vqav2", true),
    ("gqa", true),
    ("okvqa", true),
    ("a-okvqa", true),
    ("refcoco", true),
    ("vg", true),
    ("mscoco", true),
    ("nlvr", true),
    ("spot-the-difference", true),
    ("ocrvqa", false),
    ("docvqa", false),
    ("ai2d", false),
    ("chartqa", false),
    ("dvqa", false),
    ("scienceqa", false),
];

pub fn known_translatable(name: &str) -> Option<bool> {
    let key = name.to_ascii_lowercase();
    KNOWN_DATASETS.iter().find(|(n, _)| *n == key).map(|&(_, t)| t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationRequest {
    pub texts: Vec<String>,
    pub source: String,
    pub target: String,
}

impl TranslationRequest {
    pub fn validate(&self) -> Result<()> {
        if self.texts.is_empty() {
            return Err(Error::InvalidRequest("no texts".into()));
        }
        if self.source == self.target {
            return Err(Error::InvalidRequest(format!("source and target are both `{}`", self.source)));
        }
        Ok(())
    }
}

/// A translation backend. Codes are the service's language codes.
pub trait Translator: Send + Sync {
    fn model_id(&self) -> &str;
    fn translate(&self, texts: &[String], source: &str, target: &str) -> Result<Vec<String>>;
}

/// Prefixes each text with `[<target>] `; counts calls.
#[derive(Debug, Default)]
pub struct MockTranslator {
    calls: AtomicUsize,
    texts: AtomicUsize,
    unsupported: Vec<String>,
}

impl MockTranslator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fail with `UnsupportedLanguagePair` for these target codes.
    pub fn rejecting(targets: &[&str]) -> Self {
        Self {
            unsupported: targets.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn texts_translated(&self) -> usize {
        self.texts.load(Ordering::SeqCst)
    }

    /// Inverse of the mock transform.
    pub fn untag<'a>(text: &'a str, target: &str) -> Option<&'a str> {
        text.strip_prefix(&format!("[{target}] "))
    }
}

impl Translator for MockTranslator {
    fn model_id(&self) -> &str {
        "mock-v1"
    }

    fn translate(&self, texts: &[String], source: &str, target: &str) -> Result<Vec<String>> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if self.unsupported.iter().any(|t| t == target) {
            return Err(Error::UnsupportedLanguagePair {
                src: source.into(),
                tgt: target.into(),
            });
        }
        self.texts.fetch_add(texts.len(), Ordering::SeqCst);
        Ok(texts.iter().map(|t| format!("[{target}] {t}")).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model_id: String,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_timeout_s")]
    pub timeout_s: u64,
}

fn default_retries() -> u32 {
    4
}
fn default_backoff_ms() -> u64 {
    500
}
fn default_timeout_s() -> u64 {
    120
}

#[derive(Serialize)]
struct WireRequest<'a> {
    texts: &'a [String],
    src: &'a str,
    tgt: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    translations: Vec<String>,
}

/// Client for the JSON translation service. Connection failures, HTTP 429
/// and 5xx are retried with exponential backoff; 422 means the service
/// does not support the language pair; other 4xx are not retried.
pub struct HttpTranslator {
    config: HttpConfig,
    client: reqwest::blocking::Client,
}

impl HttpTranslator {
    pub fn new(config: HttpConfig) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_s))
            .build()
            .map_err(|e| Error::InvalidRequest(format!("http client: {e}")))?;
        Ok(Self { config, client })
    }

    fn attempt(&self, texts: &[String], source: &str, target: &str) -> std::result::Result<Vec<String>, Attempt> {
        let resp = self
            .client
            .post(&self.config.endpoint)
            .json(&WireRequest { texts, src: source, tgt: target })
            .send()
            .map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 422 {
            return Err(Attempt::Fatal(Error::UnsupportedLanguagePair {
                src: source.into(),
                tgt: target.into(),
            }));
        }
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Attempt::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let body = resp.text().unwrap_or_default();
            return Err(Attempt::Fatal(Error::InvalidRequest(format!("HTTP {status}: {body}"))));
        }
        let parsed: WireResponse = resp.json().map_err(|e| Attempt::Retry(format!("bad response: {e}")))?;
        if parsed.translations.len() != texts.len() {
            return Err(Attempt::Retry(format!(
                "{} translations for {} texts",
                parsed.translations.len(),
                texts.len()
            )));
        }
        Ok(parsed.translations)
    }
}

enum Attempt {
    Retry(String),
    Fatal(Error),
}

impl Translator for HttpTranslator {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    fn translate(&self, texts: &[String], source: &str, target: &str) -> Result<Vec<String>> {
        let attempts = self.config.retries + 1;
        let mut last = String::new();
        for i in 0..attempts {
            if i > 0 {
                let wait = self.config.backoff_ms.saturating_mul(1 << (i - 1).min(16));
                tracing::warn!(attempt = i + 1, wait_ms = wait, error = %last, "retrying translation");
                std::thread::sleep(Duration::from_millis(wait));
            }
            match self.attempt(texts, source, target) {
                Ok(out) => return Ok(out),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(msg)) => last = msg,
            }
        }
        Err(Error::ServiceUnavailable {
            attempts,
            last_error: last,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub value: String,
    pub created_at: String,
}

pub fn cache_key(text: &str, source: &str, target: &str, model_id: &str) -> String {
    let mut h = Sha256::new();
    for part in [text, source, target, model_id] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Append-only JSONL store. The first value written for a key wins; each
/// entry is one `write` on an append-mode file.
pub struct TranslationCache {
    map: RwLock<HashMap<String, String>>,
    file: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        Self {
            map: RwLock::new(HashMap::new()),
            file: None,
            path: None,
        }
    }

    /// Open or create `<dir>/translations.jsonl`. A torn last line from an
    /// interrupted write is skipped.
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("translations.jsonl");
        let mut map = HashMap::new();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            for line in text.lines() {
                if let Ok(e) = serde_json::from_str::<CacheEntry>(line) {
                    map.entry(e.key).or_insert(e.value);
                }
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            map: RwLock::new(map),
            file: Some(Mutex::new(file)),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.map.read().expect("cache lock").get(key).cloned()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Store `value` unless the key is present; returns the stored value.
    pub fn insert(&self, key: String, value: String) -> Result<String> {
        {
            let mut map = self.map.write().expect("cache lock");
            if let Some(v) = map.get(&key) {
                return Ok(v.clone());
            }
            map.insert(key.clone(), value.clone());
        }
        if let Some(file) = &self.file {
            let entry = CacheEntry {
                key,
                value: value.clone(),
                created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            };
            let mut line = serde_json::to_string(&entry)?;
            line.push('\n');
            let path = self.path.as_deref().unwrap_or(Path::new("translations.jsonl"));
            file.lock()
                .expect("cache file lock")
                .write_all(line.as_bytes())
                .map_err(|e| Error::io(path, e))?;
        }
        Ok(value)
    }
}

/// Counting semaphore bounding concurrent backend calls.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(n: usize) -> Self {
        Self {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn run<T>(&self, f: impl FnOnce() -> T) -> T {
        {
            let mut free = self.free.lock().expect("gate lock");
            while *free == 0 {
                free = self.cv.wait(free).expect("gate lock");
            }
            *free -= 1;
        }
        let out = f();
        *self.free.lock().expect("gate lock") += 1;
        self.cv.notify_one();
        out
    }
}

/// Cache in front of a backend, with a bound on in-flight backend calls.
pub struct CachedTranslator<T: Translator> {
    inner: T,
    cache: TranslationCache,
    gate: Gate,
    batch_size: usize,
}

impl<T: Translator> CachedTranslator<T> {
    pub fn new(inner: T, cache: TranslationCache, max_in_flight: usize) -> Self {
        Self {
            inner,
            cache,
            gate: Gate::new(max_in_flight),
            batch_size: 64,
        }
    }

    pub fn with_batch_size(mut self, n: usize) -> Self {
        self.batch_size = n.max(1);
        self
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }

    pub fn cache(&self) -> &TranslationCache {
        &self.cache
    }

    /// One output per input, in order. Only cache misses reach the backend,
    /// each distinct text once.
    pub fn translate_batch(&self, request: &TranslationRequest) -> Result<Vec<String>> {
        request.validate()?;
        let model = self.inner.model_id().to_owned();
        let keys: Vec<String> = request
            .texts
            .iter()
            .map(|t| cache_key(t, &request.source, &request.target, &model))
            .collect();
        let mut out: Vec<Option<String>> = keys.iter().map(|k| self.cache.get(k)).collect();
        let mut pending: Vec<(String, String)> = Vec::new();
        let mut queued = std::collections::HashSet::new();
        for (i, slot) in out.iter().enumerate() {
            if slot.is_none() && queued.insert(keys[i].clone()) {
                pending.push((keys[i].clone(), request.texts[i].clone()));
            }
        }
        let chunks: Vec<&[(String, String)]> = pending.chunks(self.batch_size).collect();
        let results: Vec<Vec<(String, String)>> = chunks
            .par_iter()
            .map(|chunk| -> Result<Vec<(String, String)>> {
                let texts: Vec<String> = chunk.iter().map(|(_, t)| t.clone()).collect();
                let translated = self
                    .gate
                    .run(|| self.inner.translate(&texts, &request.source, &request.target))?;
                if translated.len() != texts.len() {
                    return Err(Error::ServiceUnavailable {
                        attempts: 1,
                        last_error: format!("{} translations for {} texts", translated.len(), texts.len()),
                    });
                }
                chunk
                    .iter()
                    .zip(translated)
                    .map(|((k, _), v)| Ok((k.clone(), self.cache.insert(k.clone(), v)?)))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let fresh: HashMap<String, String> = results.into_iter().flatten().collect();
        for (i, slot) in out.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = fresh.get(&keys[i]).cloned();
            }
        }
        Ok(out.into_iter().map(|s| s.expect("every key resolved")).collect())
    }
}

fn protected_regex() -> &'static Regex {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)<IMG>|^[A-H]\.").expect("valid pattern"))
}

/// Part of a segment: kept verbatim or sent to translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Keep(String),
    Translate(String),
}

/// Split a segment into protected spans (image placeholders, option
/// letters at line start, caller-supplied literals), whitespace, and text
/// to translate. Each line of text is translated separately.
pub fn split_protected(segment: &str, extra: &[String]) -> Vec<Piece> {
    let mut spans: Vec<(usize, usize)> = protected_regex()
        .find_iter(segment)
        .map(|m| (m.start(), m.end()))
        .collect();
    for lit in extra.iter().filter(|l| !l.is_empty()) {
        spans.extend(segment.match_indices(lit.as_str()).map(|(i, m)| (i, i + m.len())));
    }
    spans.sort();
    let mut pieces = Vec::new();
    let mut pos = 0;
    let push_text = |text: &str, pieces: &mut Vec<Piece>| {
        for (i, line) in text.split('\n').enumerate() {
            if i > 0 {
                pieces.push(Piece::Keep("\n".into()));
            }
            let core = line.trim();
            if core.is_empty() {
                if !line.is_empty() {
                    pieces.push(Piece::Keep(line.into()));
                }
                continue;
            }
            let lead = &line[..line.len() - line.trim_start().len()];
            let trail = &line[line.trim_end().len()..];
            if !lead.is_empty() {
                pieces.push(Piece::Keep(lead.into()));
            }
            pieces.push(Piece::Translate(core.into()));
            if !trail.is_empty() {
                pieces.push(Piece::Keep(trail.into()));
            }
        }
    };
    for (s, e) in spans {
        if s < pos {
            continue;
        }
        push_text(&segment[pos..s], &mut pieces);
        pieces.push(Piece::Keep(segment[s..e].into()));
        pos = e;
    }
    push_text(&segment[pos..], &mut pieces);
    pieces
}

/// The protected spans of a segment, in order.
pub fn protected_spans(segment: &str, extra: &[String]) -> Vec<String> {
    let mut spans: Vec<(usize, String)> = protected_regex()
        .find_iter(segment)
        .map(|m| (m.start(), m.as_str().to_owned()))
        .collect();
    for lit in extra.iter().filter(|l| !l.is_empty()) {
        spans.extend(segment.match_indices(lit.as_str()).map(|(i, m)| (i, m.to_owned())));
    }
    spans.sort();
    spans.into_iter().map(|(_, s)| s).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub sample_id: String,
    pub segments: Vec<String>,
    /// Literal spans to keep verbatim in addition to the built-in ones.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub protected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDescriptor {
    pub name: String,
    /// Defaults to the known-dataset table when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translatable: Option<bool>,
    pub records: Vec<DatasetRecord>,
}

impl DatasetDescriptor {
    pub fn is_translatable(&self) -> Result<bool> {
        self.translatable
            .or_else(|| known_translatable(&self.name))
            .ok_or_else(|| Error::InvalidRequest(format!("dataset `{}` needs an explicit `translatable` flag", self.name)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assignment {
    /// Each record goes to exactly one language.
    #[default]
    Partition,
    /// Each language draws its own sample; records may repeat across
    /// languages.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedDataset {
    pub name: String,
    /// Records per language code, English untranslated.
    pub shards: BTreeMap<String, Vec<DatasetRecord>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslationOutput {
    /// Not a translatable dataset; returned as given.
    Passthrough(DatasetDescriptor),
    Translated(TranslatedDataset),
}

/// Record indices per language, deterministic in `(name, plan, seed)`.
pub fn assign_records(
    dataset: &DatasetDescriptor,
    plan: &MixPlan,
    seed: u64,
    mode: Assignment,
) -> Result<Vec<(&'static Language, Vec<usize>)>> {
    let n = dataset.records.len() as u64;
    let entries: Vec<(&'static Language, u64)> = plan.entries().filter(|&(_, c)| c > 0).collect();
    match mode {
        Assignment::Partition => {
            let requested: u64 = entries.iter().map(|&(_, c)| c).sum();
            if requested > n {
                return Err(Error::PlanExceedsDataset { requested, available: n });
            }
            let mut order: Vec<usize> = (0..dataset.records.len()).collect();
            let mut r = rng::substream(seed, &format!("translate-partition/{}", dataset.name), 0);
            rng::shuffle(&mut r, &mut order);
            let mut at = 0;
            Ok(entries
                .into_iter()
                .map(|(l, c)| {
                    let mut ids = order[at..at + c as usize].to_vec();
                    ids.sort_unstable();
                    at += c as usize;
                    (l, ids)
                })
                .collect())
        }
        Assignment::Duplicate => entries
            .into_iter()
            .map(|(l, c)| {
                if c > n {
                    return Err(Error::PlanExceedsDataset { requested: c, available: n });
                }
                let mut r = rng::substream(seed, &format!("translate-duplicate/{}/{}", dataset.name, l.code), 0);
                let mut ids = rng::sample_distinct(&mut r, n as usize, c as usize);
                ids.sort_unstable();
                Ok((l, ids))
            })
            .collect(),
    }
}

/// Split records across the plan's languages and translate every non-English
/// share. Languages without a translation code are rejected before any
/// backend call.
pub fn translate_dataset<T: Translator>(
    dataset: &DatasetDescriptor,
    plan: &MixPlan,
    seed: u64,
    mode: Assignment,
    translator: &CachedTranslator<T>,
) -> Result<TranslationOutput> {
    if !dataset.is_translatable()? {
        return Ok(TranslationOutput::Passthrough(dataset.clone()));
    }
    let english = Registry::global().english();
    let source = english.mt_code.expect("english has a translation code");
    for (lang, count) in plan.entries() {
        if count > 0 && lang.mt_code.is_none() {
            return Err(Error::MissingMtCode(lang.code.to_owned()));
        }
    }
    let assignment = assign_records(dataset, plan, seed, mode)?;
    let shards = assignment
        .into_iter()
        .map(|(lang, ids)| {
            let records: Vec<&DatasetRecord> = ids.iter().map(|&i| &dataset.records[i]).collect();
            let out = if lang.is_english() {
                records.into_iter().cloned().collect()
            } else {
                translate_records(&records, source, lang.mt_code.expect("checked above"), translator)?
            };
            Ok((lang.code.to_owned(), out))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(TranslationOutput::Translated(TranslatedDataset {
        name: dataset.name.clone(),
        shards,
    }))
}

fn translate_records<T: Translator>(
    records: &[&DatasetRecord],
    source: &str,
    target: &str,
    translator: &CachedTranslator<T>,
) -> Result<Vec<DatasetRecord>> {
    let split: Vec<Vec<Vec<Piece>>> = records
        .iter()
        .map(|r| r.segments.iter().map(|s| split_protected(s, &r.protected)).collect())
        .collect();
    let texts: Vec<String> = split
        .iter()
        .flatten()
        .flatten()
        .filter_map(|p| match p {
            Piece::Translate(t) => Some(t.clone()),
            Piece::Keep(_) => None,
        })
        .collect();
    let mut translated = if texts.is_empty() {
        Vec::new()
    } else {
        translator.translate_batch(&TranslationRequest {
            texts,
            source: source.into(),
            target: target.into(),
        })?
    }
    .into_iter();
    Ok(records
        .iter()
        .zip(split)
        .map(|(r, segs)| DatasetRecord {
            sample_id: r.sample_id.clone(),
            segments: segs
                .into_iter()
                .map(|pieces| {
                    pieces
                        .into_iter()
                        .map(|p| match p {
                            Piece::Keep(s) => s,
                            Piece::Translate(_) => translated.next().expect("one translation per piece"),
                        })
                        .collect()
                })
                .collect(),
            protected: r.protected.clone(),
        })
        .collect())
}
