//! Scoring of prediction files and tier-grouped reports.
//!
//! Each (task, language) shard is scored with the task's metric. A tier
//! cell is the mean over tasks of the mean over that task's languages in
//! the tier. English is reported on its own and never enters a tier;
//! languages without a ranked tier are scored but not aggregated.

pub mod cider;
pub mod lid;
pub mod metrics;
pub mod tasks;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use cider::{cider, CiderScores};
pub use lid::{language_fidelity, BuiltinLid, Fidelity, LanguageIdentifier};
pub use metrics::{exact_match, normalize, relaxed_match};
pub use tasks::{task, Metric, TaskSpec, TASKS};

use crate::error::{Error, Result};
use crate::registry::{Registry, Tier};
use crate::rng;
use crate::smpqa::{Annotation, QuestionType};

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub task: String,
    pub language: String,
    pub sample_id: String,
    pub prediction: String,
}

/// One line of a gold file. Captioning tasks carry `references`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gold {
    pub task: String,
    pub language: String,
    pub sample_id: String,
    #[serde(default)]
    pub gold: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub task: String,
    pub language: String,
    pub sample_id: String,
    pub prediction: String,
    pub gold: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<String>>,
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::InvalidInput(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("record serializes"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinStats {
    /// Gold items without a prediction; scored as an empty answer.
    pub missing: usize,
    /// Predictions without a gold item; ignored.
    pub unmatched: usize,
}

/// Validate task and language, resolve aliases to canonical codes.
fn resolve(task_name: &str, language: &str) -> Result<(&'static TaskSpec, String)> {
    let t = task(task_name)?;
    let lang = Registry::global().lookup(language)?;
    Ok((t, lang.code.to_owned()))
}

/// Pair predictions with gold items by `(task, language, sample_id)`.
pub fn join(predictions: &[Prediction], golds: &[Gold]) -> Result<(Vec<PredictionRecord>, JoinStats)> {
    let mut by_key: HashMap<(String, String, String), &Prediction> = HashMap::new();
    for p in predictions {
        let (t, lang) = resolve(&p.task, &p.language)?;
        let key = (t.name.to_owned(), lang, p.sample_id.clone());
        if by_key.insert(key, p).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate prediction for {}/{}/{}",
                p.task, p.language, p.sample_id
            )));
        }
    }
    let mut stats = JoinStats::default();
    let mut records = Vec::with_capacity(golds.len());
    let mut used = 0;
    for g in golds {
        let (t, lang) = resolve(&g.task, &g.language)?;
        let key = (t.name.to_owned(), lang.clone(), g.sample_id.clone());
        let prediction = match by_key.get(&key) {
            Some(p) => {
                used += 1;
                p.prediction.clone()
            }
            None => {
                stats.missing += 1;
                String::new()
            }
        };
        records.push(PredictionRecord {
            task: t.name.to_owned(),
            language: lang,
            sample_id: g.sample_id.clone(),
            prediction,
            gold: g.gold.clone(),
            references: g.references.clone(),
        });
    }
    stats.unmatched = by_key.len() - used;
    Ok((records, stats))
}

/// Score of one (task, language) shard on the 0-100 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub task: String,
    pub language: String,
    pub metric: Metric,
    pub score: f64,
    pub n: usize,
}

fn score_shard(t: &TaskSpec, records: &[&PredictionRecord]) -> Result<f64> {
    match t.metric {
        Metric::ExactMatch | Metric::RelaxedMatch => {
            let f = if t.metric == Metric::ExactMatch {
                exact_match
            } else {
                relaxed_match
            };
            let hits: u64 = records.iter().map(|r| f(&r.prediction, &r.gold) as u64).sum();
            Ok(100.0 * hits as f64 / records.len() as f64)
        }
        Metric::Cider => {
            let cands: Vec<String> = records.iter().map(|r| r.prediction.clone()).collect();
            let refs: Vec<Vec<String>> = records
                .iter()
                .map(|r| r.references.clone().unwrap_or_default())
                .collect();
            Ok(10.0 * cider(&cands, &refs)?.corpus)
        }
    }
}

/// Group by (task, language) and score each shard. Output is sorted by task
/// then language.
pub fn score_cells(records: &[PredictionRecord]) -> Result<Vec<CellScore>> {
    let mut shards: BTreeMap<(String, String), Vec<&PredictionRecord>> = BTreeMap::new();
    for r in records {
        let (t, lang) = resolve(&r.task, &r.language)?;
        shards.entry((t.name.to_owned(), lang)).or_default().push(r);
    }
    shards
        .into_par_iter()
        .map(|((name, language), mut rs)| {
            let t = task(&name)?;
            // CIDEr is invariant to item order, but summation order is not
            rs.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
            Ok(CellScore {
                score: score_shard(t, &rs)?,
                metric: t.metric,
                n: rs.len(),
                task: name,
                language,
            })
        })
        .collect()
}

fn tier_key(t: Tier) -> String {
    t.to_string()
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub english: Option<f64>,
    pub tiers: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TierTable {
    /// `T1`..`T5`; absent when no task has a language in the tier.
    pub tiers: BTreeMap<String, f64>,
    pub english: Option<f64>,
    pub per_task: BTreeMap<String, TaskSummary>,
}

/// Macro-average languages within each task, then tasks.
pub fn aggregate(cells: &[CellScore]) -> Result<TierTable> {
    let reg = Registry::global();
    let mut per_task_lang: BTreeMap<&str, BTreeMap<Tier, Vec<f64>>> = BTreeMap::new();
    let mut per_task_en: BTreeMap<&str, f64> = BTreeMap::new();
    let mut sorted: Vec<&CellScore> = cells.iter().collect();
    sorted.sort_by(|a, b| (&a.task, &a.language).cmp(&(&b.task, &b.language)));
    for c in sorted {
        task(&c.task)?;
        let lang = reg.lookup(&c.language)?;
        if lang.is_english() {
            per_task_en.insert(&c.task, c.score);
            per_task_lang.entry(&c.task).or_default();
        } else if lang.tier.is_ranked() {
            per_task_lang
                .entry(&c.task)
                .or_default()
                .entry(lang.tier)
                .or_default()
                .push(c.score);
        } else {
            per_task_lang.entry(&c.task).or_default();
        }
    }

    let mut table = TierTable::default();
    let mut across: BTreeMap<Tier, Vec<f64>> = BTreeMap::new();
    for (name, tiers) in &per_task_lang {
        let mut summary = TaskSummary {
            english: per_task_en.get(name).copied(),
            tiers: BTreeMap::new(),
        };
        for (tier, scores) in tiers {
            let m = mean(scores).expect("non-empty tier bucket");
            summary.tiers.insert(tier_key(*tier), m);
            across.entry(*tier).or_default().push(m);
        }
        table.per_task.insert((*name).to_owned(), summary);
    }
    for (tier, scores) in across {
        table.tiers.insert(tier_key(tier), mean(&scores).expect("non-empty"));
    }
    let en: Vec<f64> = per_task_en.values().copied().collect();
    table.english = mean(&en);
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub cells: Vec<CellScore>,
    #[serde(flatten)]
    pub table: TierTable,
    /// Fidelity-relevant tasks only, per language the identifier supports.
    pub fidelity: BTreeMap<String, BTreeMap<String, Fidelity>>,
    /// `task/language` shards skipped for fidelity because the identifier
    /// does not support the language.
    pub fidelity_unsupported: Vec<String>,
    pub join: JoinStats,
}

impl ScoreReport {
    pub fn tier(&self, t: Tier) -> Option<f64> {
        self.table.tiers.get(&tier_key(t)).copied()
    }

    pub fn cell(&self, task: &str, language: &str) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.task == task && c.language == language)
            .map(|c| c.score)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain-text table: one row per task plus an average row, columns
    /// `en` and `T1`..`T5`.
    pub fn render_table(&self) -> String {
        let tiers: Vec<String> = Tier::RANKED.iter().map(|t| tier_key(*t)).collect();
        let cell = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.1}"));
        let mut out = String::new();
        let _ = write!(out, "{:<14}{:>8}", "task", "en");
        for t in &tiers {
            let _ = write!(out, "{t:>8}");
        }
        out.push('\n');
        let mut row = |name: &str, en: Option<f64>, map: &BTreeMap<String, f64>| {
            let _ = write!(out, "{name:<14}{:>8}", cell(en));
            for t in &tiers {
                let _ = write!(out, "{:>8}", cell(map.get(t).copied()));
            }
            out.push('\n');
        };
        for (name, s) in &self.table.per_task {
            row(name, s.english, &s.tiers);
        }
        row("avg", self.table.english, &self.table.tiers);
        out
    }
}

/// Score, aggregate and, when an identifier is given, measure fidelity.
pub fn build_report(
    records: &[PredictionRecord],
    join: JoinStats,
    lid: Option<&dyn LanguageIdentifier>,
) -> Result<ScoreReport> {
    let cells = score_cells(records)?;
    let table = aggregate(&cells)?;
    let mut fidelity: BTreeMap<String, BTreeMap<String, Fidelity>> = BTreeMap::new();
    let mut unsupported = Vec::new();
    if let Some(lid) = lid {
        let mut outputs: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
        for r in records {
            if task(&r.task)?.fidelity_relevant {
                outputs.entry((&r.task, &r.language)).or_default().push(&r.prediction);
            }
        }
        for ((t, lang), outs) in outputs {
            if !lid.supports(lang) {
                unsupported.push(format!("{t}/{lang}"));
                continue;
            }
            let f = language_fidelity(&outs, lang, lid)?;
            fidelity.entry(t.to_owned()).or_default().insert(lang.to_owned(), f);
        }
    }
    Ok(ScoreReport {
        cells,
        table,
        fidelity,
        fidelity_unsupported: unsupported,
        join,
    })
}

pub const SMPQA_NAME: &str = "smpqa-name";
pub const SMPQA_GROUND: &str = "smpqa-ground";

/// Gold items for an SMPQA annotation file. Sample ids are
/// `<plot>-<line index>`.
pub fn smpqa_gold(annotations: &[Annotation], language: &str) -> Vec<Gold> {
    annotations
        .iter()
        .enumerate()
        .map(|(i, a)| Gold {
            task: match a.qtype {
                QuestionType::Reading => SMPQA_NAME,
                QuestionType::Grounding => SMPQA_GROUND,
            }
            .to_owned(),
            language: language.to_owned(),
            sample_id: format!("{}-{i}", a.plot_id),
            gold: a.gold.clone(),
            references: None,
        })
        .collect()
}

/// `k` ids chosen by a seeded shuffle of the sorted input.
pub fn select_subset(ids: &[String], k: usize, seed: u64) -> Vec<String> {
    let mut v = ids.to_vec();
    v.sort();
    v.dedup();
    let mut r = rng::substream(seed, "eval-subset", 0);
    rng::shuffle(&mut r, &mut v);
    v.truncate(k);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(task: &str, language: &str, score: f64) -> CellScore {
        CellScore {
            task: task.into(),
            language: language.into(),
            metric: Metric::ExactMatch,
            score,
            n: 1,
        }
    }

    #[test]
    fn macro_over_languages_then_tasks() {
        let t = aggregate(&[
            cell("maxm", "fr", 50.0),
            cell("maxm", "zh", 70.0),
            cell("xgqa", "de", 30.0),
            cell("xgqa", "zh", 90.0),
        ])
        .unwrap();
        assert_eq!(t.tiers["T5"], 60.0);
        assert_eq!(t.tiers.len(), 1);
        assert_eq!(t.english, None);
    }

    #[test]
    fn english_kept_apart() {
        let base = [cell("maxm", "fr", 50.0), cell("maxm", "th", 20.0)];
        let mut with_en = base.to_vec();
        with_en.push(cell("maxm", "en", 99.0));
        let a = aggregate(&base).unwrap();
        let b = aggregate(&with_en).unwrap();
        assert_eq!(a.tiers, b.tiers);
        assert_eq!(b.english, Some(99.0));
        let only = aggregate(&[cell("xgqa", "en", 40.0)]).unwrap();
        assert!(only.tiers.is_empty());
        assert_eq!(only.english, Some(40.0));
    }

    #[test]
    fn unranked_languages_not_aggregated() {
        let t = aggregate(&[cell("cvqa", "kr", 10.0), cell("cvqa", "rw", 30.0)]).unwrap();
        assert_eq!(t.tiers.len(), 1);
        assert_eq!(t.tiers["T1"], 30.0);
    }

    #[test]
    fn unknown_task_and_language() {
        assert!(matches!(aggregate(&[cell("mme", "en", 1.0)]), Err(Error::UnknownTask(_))));
        assert!(matches!(aggregate(&[cell("maxm", "xx", 1.0)]), Err(Error::UnknownLanguage(_))));
    }

    #[test]
    fn join_counts_missing_and_unmatched() {
        let p = |id: &str, pred: &str| Prediction {
            task: "xvnli".into(),
            language: "fr".into(),
            sample_id: id.into(),
            prediction: pred.into(),
        };
        let g = |id: &str, gold: &str| Gold {
            task: "xvnli".into(),
            language: "fr".into(),
            sample_id: id.into(),
            gold: gold.into(),
            references: None,
        };
        let (records, stats) = join(&[p("1", "yes"), p("9", "no")], &[g("1", "yes"), g("2", "no")]).unwrap();
        assert_eq!(stats, JoinStats { missing: 1, unmatched: 1 });
        let report = build_report(&records, stats, None).unwrap();
        assert_eq!(report.cell("xvnli", "fr"), Some(50.0));
        assert!(join(&[p("1", "a"), p("1", "b")], &[]).is_err());
    }

    #[test]
    fn aliases_resolve_in_join() {
        let (records, _) = join(
            &[],
            &[Gold {
                task: "cvqa".into(),
                language: "arz".into(),
                sample_id: "0".into(),
                gold: "A".into(),
                references: None,
            }],
        )
        .unwrap();
        assert_eq!(records[0].language, "ar-eg");
    }

    #[test]
    fn subset_is_seeded() {
        let ids: Vec<String> = (0..50).map(|i| format!("img{i}")).collect();
        let a = select_subset(&ids, 10, 7);
        let mut rev = ids.clone();
        rev.reverse();
        assert_eq!(a, select_subset(&rev, 10, 7));
        assert_ne!(a, select_subset(&ids, 10, 8));
        assert_eq!(a.len(), 10);
    }

    #[test]
    fn table_layout() {
        let cells = [cell("maxm", "en", 10.0), cell("maxm", "fr", 50.0)];
        let report = ScoreReport {
            table: aggregate(&cells).unwrap(),
            cells: cells.to_vec(),
            fidelity: BTreeMap::new(),
            fidelity_unsupported: vec![],
            join: JoinStats::default(),
        };
        let text = report.render_table();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("maxm"));
        assert!(lines[1].ends_with("50.0"));
        assert!(lines[2].contains("10.0"));
    }
}
