//! Synthetic multilingual plot QA.
//!
//! A seed fixes 100 language-independent plot configurations (50 bar, 50
//! pie), each with five reading and eight grounding questions. A language
//! only contributes label words drawn from its word list, so geometry,
//! question targets and the yes/no pattern are identical across languages.

pub mod config;
pub mod questions;
pub mod render;
pub mod wordlist;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{config_hash, sample_configs, Color, PlotConfig, PlotKind, Target};
pub use questions::{build_questions, QaItem, QuestionType, Templates};
pub use render::{encode_png, render, render_with, TextMode};
pub use wordlist::WordList;

use crate::error::{Error, Result};
use crate::font::Fonts;
use crate::registry::Language;
use crate::rng;

/// The languages of the published benchmark.
pub const DEFAULT_LANGUAGES: [&str; 11] = ["en", "de", "it", "id", "zu", "ru", "zh", "ko", "hi", "ar", "th"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPlot {
    pub config: PlotConfig,
    pub language: String,
    pub labels: Vec<String>,
}

/// Attach label words to a configuration. The word indices depend only on
/// `(seed, plot id)`, so regenerating with the same list reproduces them.
pub fn label_plot(config: &PlotConfig, language: &str, wordlist: &WordList, seed: u64) -> LabeledPlot {
    let mut r = rng::substream(seed, "smpqa-labels", config.id as u64);
    let labels = rng::sample_distinct(&mut r, wordlist.len(), config.n_elements())
        .into_iter()
        .map(|i| wordlist.words()[i].clone())
        .collect();
    LabeledPlot {
        config: config.clone(),
        language: language.to_owned(),
        labels,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmpqaManifest {
    pub language: String,
    pub seed: u64,
    pub wordlist_digest: String,
    pub palette_version: String,
    pub renderer_version: String,
    pub fonts: String,
    pub config_hash: String,
    pub plots: usize,
    pub reading: usize,
    pub grounding: usize,
}

#[derive(Debug, Clone)]
pub struct SmpqaDataset {
    pub language: String,
    pub plots: Vec<LabeledPlot>,
    pub items: Vec<QaItem>,
    pub manifest: SmpqaManifest,
}

/// One line of `annotations.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub plot_id: u32,
    pub qtype: QuestionType,
    pub target: Target,
    pub question: String,
    pub gold: String,
}

pub fn generate_dataset(
    language: &Language,
    wordlist: &WordList,
    seed: u64,
    fonts: &Fonts,
    templates: &Templates,
) -> Result<SmpqaDataset> {
    let required = config::MAX_ELEMENTS as usize;
    if wordlist.len() < required {
        return Err(Error::WordListTooSmall {
            language: language.code.to_owned(),
            available: wordlist.len(),
            required,
        });
    }
    if !fonts.covers_script(language.script) {
        return Err(Error::UnsupportedScript(language.script));
    }
    let configs = sample_configs(seed);
    let plots: Vec<LabeledPlot> = configs
        .iter()
        .map(|c| label_plot(c, language.code, wordlist, seed))
        .collect();
    let items: Vec<QaItem> = plots
        .iter()
        .flat_map(|p| build_questions(p, templates))
        .collect();
    let count = |t| items.iter().filter(|q| q.qtype == t).count();
    let manifest = SmpqaManifest {
        language: language.code.to_owned(),
        seed,
        wordlist_digest: wordlist.digest().to_owned(),
        palette_version: config::PALETTE_VERSION.to_owned(),
        renderer_version: render::RENDERER_VERSION.to_owned(),
        fonts: fonts.fingerprint(),
        config_hash: config_hash(&configs),
        plots: plots.len(),
        reading: count(QuestionType::Reading),
        grounding: count(QuestionType::Grounding),
    };
    Ok(SmpqaDataset {
        language: language.code.to_owned(),
        plots,
        items,
        manifest,
    })
}

impl SmpqaDataset {
    pub fn annotations_jsonl(&self) -> String {
        let mut out = String::new();
        for q in &self.items {
            let line = Annotation {
                plot_id: q.plot_id,
                qtype: q.qtype,
                target: q.target,
                question: q.question.clone(),
                gold: q.gold.clone(),
            };
            out.push_str(&serde_json::to_string(&line).expect("annotation serializes"));
            out.push('\n');
        }
        out
    }

    /// Write `<root>/<lang>/{images/<id>.png, annotations.jsonl, manifest.json}`.
    /// Images are rendered in parallel on the current rayon pool.
    pub fn write(&self, root: &Path, fonts: &Fonts) -> Result<()> {
        let dir = root.join(&self.language);
        let images = dir.join("images");
        fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
        self.plots.par_iter().try_for_each(|plot| -> Result<()> {
            let png = encode_png(&render(plot, fonts)?)?;
            let path = images.join(format!("{}.png", plot.config.id));
            fs::write(&path, png).map_err(|e| Error::io(&path, e))
        })?;
        let ann = dir.join("annotations.jsonl");
        fs::write(&ann, self.annotations_jsonl()).map_err(|e| Error::io(&ann, e))?;
        let man = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(&self.manifest)? + "\n";
        fs::write(&man, body).map_err(|e| Error::io(&man, e))?;
        Ok(())
    }
}

/// Read back an `annotations.jsonl` file.
pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{Registry, Script};

    fn dataset(code: &str, seed: u64) -> SmpqaDataset {
        let lang = Registry::global().lookup(code).unwrap();
        generate_dataset(
            lang,
            &WordList::builtin(code).unwrap(),
            seed,
            &Fonts::builtin(),
            &Templates::english(),
        )
        .unwrap()
    }

    #[test]
    fn counts_per_language() {
        let d = dataset("en", 42);
        assert_eq!(d.plots.len(), 100);
        assert_eq!(d.manifest.reading, 500);
        assert_eq!(d.manifest.grounding, 800);
        let yes = d.items.iter().filter(|q| q.gold == "yes").count();
        let no = d.items.iter().filter(|q| q.gold == "no").count();
        assert_eq!((yes, no), (400, 400));
    }

    #[test]
    fn labels_unique_within_plot() {
        for p in dataset("zh", 3).plots {
            let mut l = p.labels.clone();
            l.sort();
            l.dedup();
            assert_eq!(l.len(), p.config.n_elements());
        }
    }

    #[test]
    fn english_and_indonesian_share_structure() {
        let en = dataset("en", 9);
        let id = dataset("id", 9);
        assert_eq!(en.manifest.config_hash, id.manifest.config_hash);
        for (a, b) in en.items.iter().zip(&id.items) {
            assert_eq!((a.plot_id, a.qtype, a.target), (b.plot_id, b.qtype, b.target));
            if a.qtype == QuestionType::Grounding {
                assert_eq!(a.gold, b.gold);
            }
        }
    }

    #[test]
    fn small_wordlist_rejected() {
        let lang = Registry::global().lookup("en").unwrap();
        let err = generate_dataset(
            lang,
            &WordList::parse("a\nb\nc"),
            1,
            &Fonts::builtin(),
            &Templates::english(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::WordListTooSmall { available: 3, .. }));
    }

    #[test]
    fn uncovered_script_rejected() {
        let lang = Registry::global().lookup("th").unwrap();
        let err = generate_dataset(
            lang,
            &WordList::builtin("th").unwrap(),
            1,
            &Fonts::builtin_for(&[Script::Latin]),
            &Templates::english(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedScript(Script::Thai)));
    }

    #[test]
    fn thai_label_with_latin_font_is_glyph_missing() {
        let d = dataset("th", 1);
        let err = render(&d.plots[0], &Fonts::builtin_for(&[Script::Latin])).unwrap_err();
        assert!(matches!(err, Error::GlyphMissing { .. }));
    }

    #[test]
    fn rendering_is_byte_stable() {
        let d = dataset("ar", 5);
        let fonts = Fonts::builtin();
        for plot in [&d.plots[0], &d.plots[70]] {
            let a = encode_png(&render(plot, &fonts).unwrap()).unwrap();
            let b = encode_png(&render(plot, &fonts).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn masked_layers_identical_across_languages() {
        let en = dataset("en", 11);
        let ko = dataset("ko", 11);
        let fonts = Fonts::builtin();
        for (a, b) in en.plots.iter().zip(&ko.plots).step_by(7) {
            for mode in [TextMode::Masked, TextMode::Hidden] {
                let ia = render_with(a, &fonts, mode).unwrap();
                let ib = render_with(b, &fonts, mode).unwrap();
                assert!(ia == ib, "plot {} differs in {mode:?}", a.config.id);
            }
            // with glyphs the images must differ somewhere
            assert!(render(a, &fonts).unwrap() != render(b, &fonts).unwrap());
        }
    }

    #[test]
    fn element_colors_are_painted() {
        let d = dataset("en", 2);
        let fonts = Fonts::builtin();
        for p in d.plots.iter().step_by(9) {
            let img = render_with(p, &fonts, TextMode::Hidden).unwrap();
            for c in &p.config.colors {
                assert!(img.pixels().any(|px| px.0 == c.rgb()), "plot {} lacks {c}", p.config.id);
            }
        }
    }
}
