//! Synthdog-style OCR samples: corpus text in paragraph boxes over a
//! background image, with exact ground-truth transcriptions.
//!
//! Layout is plain: one to four axis-aligned boxes, each on a light paper
//! patch, greedy word wrapping. There is no geometric distortion stage.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::font::Fonts;
use crate::planner::MixPlan;
use crate::registry::Language;
use crate::rng::{self, Rng};
use crate::smpqa::encode_png;

pub const MIN_WORDS: u32 = 5;
pub const MAX_WORDS: u32 = 40;
pub const MAX_BOXES: u32 = 4;
/// Placement attempts per box before giving up on it.
pub const PLACEMENT_ATTEMPTS: u32 = 32;
const MIN_PX: u32 = 10;
const MAX_PX: u32 = 36;
const PAD: u32 = 6;
const GAP: u32 = 4;
const LINE_SPACING: f32 = 1.25;

/// Text lines of one language, control characters removed, blank lines
/// dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSource {
    pub language: String,
    lines: Vec<String>,
    digest: String,
}

impl CorpusSource {
    pub fn parse(language: &str, text: &str) -> Result<Self> {
        let lines: Vec<String> = text
            .lines()
            .map(|l| {
                l.chars()
                    .map(|c| if c == '\t' { ' ' } else { c })
                    .filter(|c| !c.is_control() && *c != '\u{FEFF}')
                    .collect::<String>()
                    .split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .filter(|l| !l.is_empty())
            .collect();
        if lines.is_empty() {
            return Err(Error::CorpusEmpty(language.to_owned()));
        }
        let digest = hex::encode(Sha256::digest(lines.join("\n").as_bytes()));
        Ok(Self {
            language: language.to_owned(),
            lines,
            digest,
        })
    }

    pub fn from_file(language: &str, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(language, &text)
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// `n` consecutive words starting at a random position, continuing into
    /// the following lines. Never repeats a word position.
    fn sample_span(&self, rng: &mut Rng, n: usize) -> String {
        let line = rng::index(rng, self.lines.len());
        let first: Vec<&str> = self.lines[line].split_whitespace().collect();
        let offset = rng::index(rng, first.len());
        let total: usize = self.lines.iter().map(|l| l.split_whitespace().count()).sum();
        let words: Vec<&str> = self
            .lines
            .iter()
            .cycle()
            .skip(line)
            .flat_map(|l| l.split_whitespace())
            .skip(offset)
            .take(n.min(total))
            .collect();
        words.join(" ")
    }
}

/// Corpora found as `<dir>/<code>.txt`, keyed by language code.
pub fn load_corpora(dir: &Path) -> Result<BTreeMap<String, CorpusSource>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") {
            continue;
        }
        let Some(code) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        out.insert(code.to_owned(), CorpusSource::from_file(code, &path)?);
    }
    Ok(out)
}

/// Every decodable image in `dir`, sorted by file name, converted to RGB.
pub fn load_backgrounds(dir: &Path) -> Result<Vec<RgbImage>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        })
        .collect();
    paths.sort();
    let images = paths
        .iter()
        .map(|p| Ok(image::open(p)?.to_rgb8()))
        .collect::<Result<Vec<_>>>()?;
    if images.is_empty() {
        return Err(Error::MissingBackgrounds);
    }
    Ok(images)
}

/// Smooth value noise with per-pixel grain. Deterministic in its arguments.
pub fn noise_background(seed: u64, index: u64, width: u32, height: u32) -> RgbImage {
    let mut r = rng::substream(seed, "ocr-background", index);
    let cell = 32.0;
    let gw = (width as f64 / cell).ceil() as usize + 2;
    let gh = (height as f64 / cell).ceil() as usize + 2;
    let base: [f64; 3] = std::array::from_fn(|_| 60.0 + 150.0 * rng::unit(&mut r));
    let grid: Vec<[f64; 3]> = (0..gw * gh)
        .map(|_| std::array::from_fn(|_| rng::unit(&mut r) * 70.0 - 35.0))
        .collect();
    let mut img = RgbImage::new(width, height);
    for (x, y, px) in img.enumerate_pixels_mut() {
        let (fx, fy) = (x as f64 / cell, y as f64 / cell);
        let (ix, iy) = (fx as usize, fy as usize);
        let (tx, ty) = (fx - ix as f64, fy - iy as f64);
        let at = |i: usize, j: usize| grid[j * gw + i];
        let grain = rng::unit(&mut r) * 16.0 - 8.0;
        px.0 = std::array::from_fn(|k| {
            let top = at(ix, iy)[k] * (1.0 - tx) + at(ix + 1, iy)[k] * tx;
            let bottom = at(ix, iy + 1)[k] * (1.0 - tx) + at(ix + 1, iy + 1)[k] * tx;
            (base[k] + top * (1.0 - ty) + bottom * ty + grain).round().clamp(0.0, 255.0) as u8
        });
    }
    img
}

/// Byte range of `TextBox::text` drawn as one line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextBox {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
    pub font_px: u32,
    /// Logical-order text handed to the renderer.
    pub text: String,
    pub lines: Vec<LineSpan>,
}

impl TextBox {
    pub fn line(&self, i: usize) -> &str {
        let s = self.lines[i];
        &self.text[s.start..s.end]
    }

    fn overlaps(&self, other: &TextBox) -> bool {
        self.x < other.x + other.width + GAP
            && other.x < self.x + self.width + GAP
            && self.y < other.y + other.height + GAP
            && other.y < self.y + self.height + GAP
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub width: u32,
    pub height: u32,
    /// In reading order: top to bottom, then left to right.
    pub boxes: Vec<TextBox>,
}

#[derive(Debug, Clone)]
pub struct OcrSample {
    pub image: RgbImage,
    /// Box texts joined by `\n`, in reading order.
    pub text: String,
    pub language: String,
    pub layout: Layout,
}

/// Greedy wrap at whitespace. A token wider than the box is split between
/// characters.
fn wrap(text: &str, fonts: &Fonts, px: f32, max_width: u32) -> Vec<LineSpan> {
    let fits = |s: usize, e: usize| fonts.measure(&text[s..e], px) <= max_width;
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push((s, text.len()));
    }

    let mut lines: Vec<LineSpan> = Vec::new();
    let mut cur: Option<LineSpan> = None;
    for (ts, te) in tokens {
        if let Some(line) = cur {
            if fits(line.start, te) {
                cur = Some(LineSpan { start: line.start, end: te });
                continue;
            }
            lines.push(line);
        }
        if fits(ts, te) {
            cur = Some(LineSpan { start: ts, end: te });
            continue;
        }
        let mut s = ts;
        let mut e = ts;
        for (i, c) in text[ts..te].char_indices() {
            let next = ts + i + c.len_utf8();
            if e > s && !fits(s, next) {
                lines.push(LineSpan { start: s, end: e });
                s = e;
            }
            e = next;
        }
        cur = Some(LineSpan { start: s, end: e });
    }
    lines.extend(cur);
    lines
}

fn is_rtl(text: &str) -> bool {
    text.chars()
        .find_map(crate::registry::Script::of_char)
        .is_some_and(|s| s.is_rtl())
}

/// Try to place one box of `text`; `None` when every attempt collides or
/// the text cannot fit the background.
fn place_box(
    rng: &mut Rng,
    text: &str,
    fonts: &Fonts,
    canvas: (u32, u32),
    placed: &[TextBox],
) -> Option<TextBox> {
    let (w, h) = canvas;
    if w <= 2 * PAD + 16 || h <= 2 * PAD + MIN_PX {
        return None;
    }
    for _ in 0..PLACEMENT_ATTEMPTS {
        let px_hi = MAX_PX.min((h / 6).max(MIN_PX));
        let mut px = rng::between(rng, MIN_PX, px_hi);
        let hi = w - 2 * PAD;
        let inner = rng::between(rng, ((w as f64 * 0.3) as u32).clamp(8, hi), hi);
        let (lines, line_h) = loop {
            let line_h = (fonts.line_height(px as f32) as f32 * LINE_SPACING).ceil() as u32;
            let lines = wrap(text, fonts, px as f32, inner);
            if lines.len() as u32 * line_h + 2 * PAD <= h || px == MIN_PX {
                break (lines, line_h);
            }
            px -= 1;
        };
        let width = lines
            .iter()
            .map(|s| fonts.measure(&text[s.start..s.end], px as f32))
            .max()
            .unwrap_or(0)
            + 2 * PAD;
        let height = lines.len() as u32 * line_h + 2 * PAD;
        if width > w || height > h {
            continue;
        }
        let candidate = TextBox {
            x: rng::between(rng, 0, w - width),
            y: rng::between(rng, 0, h - height),
            width,
            height,
            font_px: px,
            text: text.to_owned(),
            lines,
        };
        if placed.iter().all(|b| !b.overlaps(&candidate)) {
            return Some(candidate);
        }
    }
    None
}

fn draw_box(img: &mut RgbImage, fonts: &Fonts, b: &TextBox, paper: Rgb<u8>, ink: Rgb<u8>) {
    for y in b.y..b.y + b.height {
        for x in b.x..b.x + b.width {
            let p = img.get_pixel_mut(x, y);
            for k in 0..3 {
                p.0[k] = ((p.0[k] as u32 + 7 * paper.0[k] as u32) / 8) as u8;
            }
        }
    }
    let px = b.font_px as f32;
    let line_h = (fonts.line_height(px) as f32 * LINE_SPACING).ceil() as u32;
    let rtl = is_rtl(&b.text);
    for (i, _) in b.lines.iter().enumerate() {
        let line = b.line(i);
        let x = if rtl {
            b.x + b.width - PAD - fonts.measure(line, px)
        } else {
            b.x + PAD
        };
        let y = b.y + PAD + i as u32 * line_h;
        fonts.draw(img, x as i32, y as i32, px, line, ink);
    }
}

/// One sample with its own random stream.
pub fn synth_sample(
    language: &Language,
    corpus: &CorpusSource,
    background: &RgbImage,
    fonts: &Fonts,
    seed: u64,
) -> Result<OcrSample> {
    let mut r = rng::substream(seed, "ocr-sample", 0);
    synth_with(&mut r, language, corpus, background, fonts)
}

fn synth_with(
    r: &mut Rng,
    language: &Language,
    corpus: &CorpusSource,
    background: &RgbImage,
    fonts: &Fonts,
) -> Result<OcrSample> {
    let canvas = background.dimensions();
    let n_boxes = rng::between(r, 1, MAX_BOXES);
    let mut boxes: Vec<TextBox> = Vec::new();
    for _ in 0..n_boxes {
        let n_words = rng::between(r, MIN_WORDS, MAX_WORDS) as usize;
        let text = corpus.sample_span(r, n_words);
        fonts.check_text(&text)?;
        match place_box(r, &text, fonts, canvas, &boxes) {
            Some(b) => boxes.push(b),
            None => break,
        }
    }
    if boxes.is_empty() {
        return Err(Error::LayoutOverflow {
            attempts: PLACEMENT_ATTEMPTS as usize,
        });
    }
    let shade = rng::between(r, 232, 252) as u8;
    let paper = Rgb([shade, shade, shade.saturating_sub(6)]);
    let ink_v = rng::between(r, 0, 60) as u8;
    let ink = Rgb([ink_v, ink_v, ink_v]);

    let mut image = background.clone();
    boxes.sort_by_key(|b| (b.y, b.x));
    for b in &boxes {
        draw_box(&mut image, fonts, b, paper, ink);
    }
    let text = boxes.iter().map(|b| b.text.as_str()).collect::<Vec<_>>().join("\n");
    Ok(OcrSample {
        image,
        text,
        language: language.code.to_owned(),
        layout: Layout {
            width: canvas.0,
            height: canvas.1,
            boxes,
        },
    })
}

/// One line of `gt.jsonl`. `image` is relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub image: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcrManifest {
    pub seed: u64,
    pub plan_hash: String,
    pub fonts: String,
    pub backgrounds: String,
    pub corpora: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    /// Digest over every emitted image and transcription, in emission order.
    pub content_hash: String,
}

/// Languages with a positive count, in plan order.
pub fn plan_jobs(plan: &MixPlan) -> Vec<(&'static Language, u64)> {
    plan.entries().filter(|&(_, n)| n > 0).collect()
}

fn backgrounds_digest(backgrounds: &[RgbImage]) -> String {
    let mut h = Sha256::new();
    for b in backgrounds {
        h.update(b.width().to_le_bytes());
        h.update(b.height().to_le_bytes());
        h.update(b.as_raw());
    }
    hex::encode(h.finalize())
}

/// Render every sample the plan asks for into `out` and return the manifest
/// (also written to `out/manifest.json`).
pub fn build_ocr_dataset(
    plan: &MixPlan,
    corpora: &BTreeMap<String, CorpusSource>,
    backgrounds: &[RgbImage],
    fonts: &Fonts,
    seed: u64,
    out: &Path,
) -> Result<OcrManifest> {
    let jobs = plan_jobs(plan);
    for (lang, _) in &jobs {
        if !corpora.contains_key(lang.code) {
            return Err(Error::MissingCorpus(lang.code.to_owned()));
        }
    }
    if backgrounds.is_empty() {
        return Err(Error::MissingBackgrounds);
    }

    let mut content = Sha256::new();
    let mut counts = BTreeMap::new();
    for &(lang, count) in &jobs {
        let corpus = &corpora[lang.code];
        let dir = out.join(lang.code);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let domain = format!("ocr/{}", lang.code);
        let rendered: Vec<(String, [u8; 32], String)> = (0..count)
            .into_par_iter()
            .map(|idx| -> Result<_> {
                let mut r = rng::substream(seed, &domain, idx);
                let bg = &backgrounds[rng::index(&mut r, backgrounds.len())];
                let sample = synth_with(&mut r, lang, corpus, bg, fonts)?;
                let png = encode_png(&sample.image)?;
                let path = dir.join(format!("{idx}.png"));
                fs::write(&path, &png).map_err(|e| Error::io(&path, e))?;
                Ok((format!("{}/{idx}.png", lang.code), Sha256::digest(&png).into(), sample.text))
            })
            .collect::<Result<_>>()?;
        let mut gt = String::new();
        for (image, png_hash, text) in rendered {
            content.update(image.as_bytes());
            content.update(png_hash);
            content.update((text.len() as u64).to_le_bytes());
            content.update(text.as_bytes());
            gt.push_str(&serde_json::to_string(&GroundTruth { image, text })?);
            gt.push('\n');
        }
        let gt_path = dir.join("gt.jsonl");
        fs::write(&gt_path, gt).map_err(|e| Error::io(&gt_path, e))?;
        counts.insert(lang.code.to_owned(), count);
    }

    let manifest = OcrManifest {
        seed,
        plan_hash: plan.provenance.spec_hash.clone(),
        fonts: fonts.fingerprint(),
        backgrounds: backgrounds_digest(backgrounds),
        corpora: jobs
            .iter()
            .map(|(l, _)| (l.code.to_owned(), corpora[l.code].digest().to_owned()))
            .collect(),
        total: counts.values().sum(),
        counts,
        content_hash: hex::encode(content.finalize()),
    };
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Read back a language's `gt.jsonl`.
pub fn read_ground_truth(path: &Path) -> Result<Vec<GroundTruth>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{Provenance, RoundingMethod};
    use crate::registry::{Registry, Script};

    fn lang(code: &str) -> &'static Language {
        Registry::global().lookup(code).unwrap()
    }

    fn corpus(code: &str) -> CorpusSource {
        let words = crate::smpqa::WordList::builtin(code).unwrap();
        let text: Vec<String> = words.words().chunks(7).map(|c| c.join(" ")).collect();
        CorpusSource::parse(code, &text.join("\n")).unwrap()
    }

    #[test]
    fn corpus_strips_control_characters() {
        let c = CorpusSource::parse("en", "a\u{0007}b  c\t d\n\n\u{FEFF}e\r\n").unwrap();
        assert_eq!(c.lines(), ["ab c d", "e"]);
        assert!(matches!(CorpusSource::parse("en", " \n\u{0001}\n"), Err(Error::CorpusEmpty(_))));
    }

    #[test]
    fn span_is_contiguous_and_bounded() {
        let c = CorpusSource::parse("en", "a b c\nd e\nf").unwrap();
        let stream = "a b c d e f a b c d e f";
        let mut r = rng::substream(1, "t", 0);
        for _ in 0..50 {
            let s = c.sample_span(&mut r, 4);
            assert_eq!(s.split(' ').count(), 4);
            assert!(stream.contains(&s), "{s}");
        }
        assert_eq!(c.sample_span(&mut r, 40).split(' ').count(), 6);
    }

    #[test]
    fn wrap_preserves_text() {
        let fonts = Fonts::builtin();
        let text = "one two three four five six seven eight nine ten";
        let lines = wrap(text, &fonts, 16.0, 120);
        assert!(lines.len() > 1);
        let joined: Vec<&str> = lines.iter().map(|s| &text[s.start..s.end]).collect();
        assert_eq!(joined.join(" "), text);
        for s in &lines {
            assert!(fonts.measure(&text[s.start..s.end], 16.0) <= 120);
        }
        // one overlong token is split between characters
        let long = "abcdefghijklmnopqrstuvwxyz";
        let parts = wrap(long, &fonts, 16.0, 60);
        assert!(parts.len() > 1);
        let glued: String = parts.iter().map(|s| &long[s.start..s.end]).collect();
        assert_eq!(glued, long);
    }

    #[test]
    fn sample_is_deterministic_and_faithful() {
        let bg = noise_background(3, 0, 400, 300);
        let fonts = Fonts::builtin();
        for code in ["en", "ar", "th", "zh"] {
            let a = synth_sample(lang(code), &corpus(code), &bg, &fonts, 17).unwrap();
            let b = synth_sample(lang(code), &corpus(code), &bg, &fonts, 17).unwrap();
            assert_eq!(a.image, b.image);
            assert_eq!(a.text, b.text);
            assert!((1..=4).contains(&a.layout.boxes.len()));
            let texts: Vec<&str> = a.layout.boxes.iter().map(|b| b.text.as_str()).collect();
            assert_eq!(a.text, texts.join("\n"));
            for (i, x) in a.layout.boxes.iter().enumerate() {
                for y in &a.layout.boxes[i + 1..] {
                    assert!(!x.overlaps(y));
                }
                assert!(x.x + x.width <= 400 && x.y + x.height <= 300);
            }
            assert_ne!(a.image, bg);
        }
    }

    #[test]
    fn uncovered_text_is_glyph_missing() {
        let bg = noise_background(1, 0, 300, 200);
        let err = synth_sample(lang("th"), &corpus("th"), &bg, &Fonts::builtin_for(&[Script::Latin]), 1)
            .unwrap_err();
        assert!(matches!(err, Error::GlyphMissing { .. }));
    }

    #[test]
    fn tiny_background_overflows() {
        let bg = noise_background(1, 0, 20, 12);
        let err = synth_sample(lang("en"), &corpus("en"), &bg, &Fonts::builtin(), 1).unwrap_err();
        assert!(matches!(err, Error::LayoutOverflow { .. }));
    }

    #[test]
    fn noise_is_deterministic() {
        assert_eq!(noise_background(5, 2, 64, 48), noise_background(5, 2, 64, 48));
        assert_ne!(noise_background(5, 2, 64, 48), noise_background(5, 3, 64, 48));
    }

    fn small_plan() -> MixPlan {
        MixPlan::from_counts(
            3,
            [(lang("th"), 2), (lang("de"), 0)],
            Provenance {
                spec_hash: "test".into(),
                rounding: RoundingMethod::Fixed,
            },
        )
        .unwrap()
    }

    #[test]
    fn dataset_layout_and_counts() {
        let dir = tempfile::tempdir().unwrap();
        let corpora: BTreeMap<_, _> = ["en", "th"].iter().map(|c| (c.to_string(), corpus(c))).collect();
        let bgs = vec![noise_background(0, 0, 320, 240), noise_background(0, 1, 360, 280)];
        let m = build_ocr_dataset(&small_plan(), &corpora, &bgs, &Fonts::builtin(), 4, dir.path()).unwrap();
        assert_eq!(m.total, 5);
        assert!(!m.counts.contains_key("de"));
        for (code, n) in [("en", 3), ("th", 2)] {
            let gt = read_ground_truth(&dir.path().join(code).join("gt.jsonl")).unwrap();
            assert_eq!(gt.len(), n);
            for g in gt {
                assert!(dir.path().join(&g.image).is_file());
            }
        }
        let again = tempfile::tempdir().unwrap();
        let m2 = build_ocr_dataset(&small_plan(), &corpora, &bgs, &Fonts::builtin(), 4, again.path()).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn missing_corpus_fails_before_writing() {
        let dir = tempfile::tempdir().unwrap();
        let corpora: BTreeMap<_, _> = [("en".to_string(), corpus("en"))].into_iter().collect();
        let bgs = vec![noise_background(0, 0, 320, 240)];
        let err = build_ocr_dataset(&small_plan(), &corpora, &bgs, &Fonts::builtin(), 4, dir.path()).unwrap_err();
        assert!(matches!(err, Error::MissingCorpus(ref c) if c == "th"));
        assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
    }
}
