//! Glyph sources and text drawing for the image generators.
//!
//! Two backends: TrueType/OpenType files loaded from a directory, and a
//! built-in block font that draws a deterministic pattern per codepoint for
//! a configurable set of scripts. The block font keeps tests hermetic; it is
//! legible to nothing but pixel comparisons.
//!
//! Glyphs are placed one codepoint at a time without shaping. Right-to-left
//! runs are reordered to visual order before drawing.

use std::fs;
use std::path::Path;

use ab_glyph::{Font, FontVec, PxScale, ScaleFont};
use image::{Rgb, RgbImage};
use sha2::{Digest, Sha256};
use unicode_bidi::BidiInfo;

use crate::error::{Error, Result};
use crate::registry::Script;

/// Characters that never need a glyph.
fn is_invisible(c: char) -> bool {
    c.is_whitespace() || matches!(c, '\u{200B}'..='\u{200F}' | '\u{FEFF}')
}

/// Digits and ASCII punctuation are drawn by every font that covers Latin.
fn is_common(c: char) -> bool {
    c.is_ascii_digit() || c.is_ascii_punctuation()
}

/// Reorder a single line into visual (left-to-right drawing) order.
pub fn visual_order(line: &str) -> String {
    if !line.chars().any(|c| Script::of_char(c).is_some_and(Script::is_rtl)) {
        return line.to_owned();
    }
    let info = BidiInfo::new(line, None);
    info.paragraphs
        .iter()
        .map(|p| info.reorder_line(p, p.range.clone()).into_owned())
        .collect()
}

#[derive(Debug, Clone)]
pub struct BlockFont {
    scripts: Vec<Script>,
}

impl BlockFont {
    pub fn new(scripts: &[Script]) -> Self {
        let mut scripts = scripts.to_vec();
        scripts.sort();
        scripts.dedup();
        Self { scripts }
    }

    fn covers(&self, c: char) -> bool {
        match Script::of_char(c) {
            Some(s) => self.scripts.contains(&s),
            None => !c.is_control() && (c as u32) < 0x3000 || is_common(c),
        }
    }

    fn advance(&self, c: char, px: f32) -> f32 {
        match Script::of_char(c) {
            Some(Script::Han | Script::Hangul | Script::Japanese) => px,
            _ if c == ' ' => px * 0.35,
            _ => px * 0.6,
        }
    }

    fn draw_glyph(&self, img: &mut RgbImage, x: f32, y: f32, c: char, px: f32, color: Rgb<u8>) {
        if is_invisible(c) {
            return;
        }
        let w = self.advance(c, px);
        let cell_w = (w * 0.85).max(1.0);
        let cell_h = (px * 0.8).max(1.0);
        let top = y + px * 0.1;
        let mut bits = splitmix(c as u64 ^ 0x9e37_79b9_7f4a_7c15);
        // 5 columns x 7 rows with a solid left stem so no glyph is empty
        for row in 0..7u32 {
            for col in 0..5u32 {
                let on = col == 0 || bits & 1 == 1;
                bits >>= 1;
                if !on {
                    continue;
                }
                let x0 = x + cell_w * col as f32 / 5.0;
                let x1 = x + cell_w * (col + 1) as f32 / 5.0;
                let y0 = top + cell_h * row as f32 / 7.0;
                let y1 = top + cell_h * (row + 1) as f32 / 7.0;
                fill_rect_f(img, x0, y0, x1, y1, color);
            }
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fill_rect_f(img: &mut RgbImage, x0: f32, y0: f32, x1: f32, y1: f32, color: Rgb<u8>) {
    let (w, h) = img.dimensions();
    let xa = x0.round().max(0.0) as u32;
    let xb = (x1.round().max(0.0) as u32).min(w);
    let ya = y0.round().max(0.0) as u32;
    let yb = (y1.round().max(0.0) as u32).min(h);
    for yy in ya..yb {
        for xx in xa..xb {
            img.put_pixel(xx, yy, color);
        }
    }
}

pub struct TtfFonts {
    faces: Vec<(String, FontVec)>,
    digest: String,
}

impl std::fmt::Debug for TtfFonts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TtfFonts")
            .field("faces", &self.faces.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .finish()
    }
}

impl TtfFonts {
    fn face_for(&self, c: char) -> Option<&FontVec> {
        self.faces
            .iter()
            .map(|(_, f)| f)
            .find(|f| f.glyph_id(c).0 != 0)
    }
}

#[derive(Debug)]
pub enum Fonts {
    Builtin(BlockFont),
    Ttf(TtfFonts),
}

impl Fonts {
    /// Block font covering every registry script.
    pub fn builtin() -> Self {
        Fonts::Builtin(BlockFont::new(&Script::ALL))
    }

    pub fn builtin_for(scripts: &[Script]) -> Self {
        Fonts::Builtin(BlockFont::new(scripts))
    }

    /// Load every `.ttf`/`.otf` in `dir` (sorted by file name; earlier files
    /// take precedence for a codepoint).
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "ttf" | "otf"))
            })
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Error::Font(format!("no .ttf/.otf files in {}", dir.display())));
        }
        let mut hasher = Sha256::new();
        let mut faces = Vec::with_capacity(paths.len());
        for p in paths {
            let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
            hasher.update(&bytes);
            let face = FontVec::try_from_vec(bytes)
                .map_err(|e| Error::Font(format!("{}: {e}", p.display())))?;
            let name = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            faces.push((name, face));
        }
        Ok(Fonts::Ttf(TtfFonts {
            faces,
            digest: hex::encode(hasher.finalize()),
        }))
    }

    /// Identifies the glyph source in generation manifests.
    pub fn fingerprint(&self) -> String {
        match self {
            Fonts::Builtin(b) => {
                let names: Vec<String> = b.scripts.iter().map(|s| format!("{s:?}")).collect();
                format!("builtin-block:{}", names.join("+"))
            }
            Fonts::Ttf(t) => format!("ttf:{}", t.digest),
        }
    }

    pub fn covers(&self, c: char) -> bool {
        if is_invisible(c) {
            return true;
        }
        match self {
            Fonts::Builtin(b) => b.covers(c),
            Fonts::Ttf(t) => t.face_for(c).is_some(),
        }
    }

    pub fn covers_script(&self, script: Script) -> bool {
        self.covers(script.sample_char())
    }

    pub fn check_text(&self, text: &str) -> Result<()> {
        match text.chars().find(|&c| !self.covers(c)) {
            Some(c) => Err(Error::GlyphMissing {
                label: text.to_owned(),
                codepoint: c,
            }),
            None => Ok(()),
        }
    }

    /// Line height in pixels at size `px`.
    pub fn line_height(&self, px: f32) -> u32 {
        match self {
            Fonts::Builtin(_) => px.ceil() as u32,
            Fonts::Ttf(t) => match t.faces.first() {
                Some((_, f)) => {
                    let s = f.as_scaled(PxScale::from(px));
                    (s.ascent() - s.descent()).ceil().max(1.0) as u32
                }
                None => px.ceil() as u32,
            },
        }
    }

    /// Width of the text in pixels at size `px`.
    pub fn measure(&self, text: &str, px: f32) -> u32 {
        let w: f32 = match self {
            Fonts::Builtin(b) => text.chars().map(|c| b.advance(c, px)).sum(),
            Fonts::Ttf(t) => text
                .chars()
                .map(|c| match t.face_for(c) {
                    Some(f) => {
                        let s = f.as_scaled(PxScale::from(px));
                        s.h_advance(f.glyph_id(c))
                    }
                    None => 0.0,
                })
                .sum(),
        };
        w.ceil() as u32
    }

    /// Draw one line with its top-left corner at `(x, y)`. The caller has
    /// already checked coverage; uncovered characters are skipped.
    pub fn draw(&self, img: &mut RgbImage, x: i32, y: i32, px: f32, text: &str, color: Rgb<u8>) {
        let visual = visual_order(text);
        let mut caret = x as f32;
        match self {
            Fonts::Builtin(b) => {
                for c in visual.chars() {
                    b.draw_glyph(img, caret, y as f32, c, px, color);
                    caret += b.advance(c, px);
                }
            }
            Fonts::Ttf(t) => {
                let baseline = match t.faces.first() {
                    Some((_, f)) => y as f32 + f.as_scaled(PxScale::from(px)).ascent(),
                    None => y as f32 + px,
                };
                for c in visual.chars() {
                    let Some(face) = t.face_for(c) else { continue };
                    let scaled = face.as_scaled(PxScale::from(px));
                    let id = face.glyph_id(c);
                    let glyph = id.with_scale_and_position(px, ab_glyph::point(caret, baseline));
                    if let Some(outline) = face.outline_glyph(glyph) {
                        let bounds = outline.px_bounds();
                        outline.draw(|gx, gy, cov| {
                            let px_x = bounds.min.x as i32 + gx as i32;
                            let px_y = bounds.min.y as i32 + gy as i32;
                            blend(img, px_x, px_y, color, cov);
                        });
                    }
                    caret += scaled.h_advance(id);
                }
            }
        }
    }
}

fn blend(img: &mut RgbImage, x: i32, y: i32, color: Rgb<u8>, alpha: f32) {
    let (w, h) = img.dimensions();
    if x < 0 || y < 0 || x as u32 >= w || y as u32 >= h {
        return;
    }
    let a = alpha.clamp(0.0, 1.0);
    let p = img.get_pixel_mut(x as u32, y as u32);
    for k in 0..3 {
        let v = p.0[k] as f32 * (1.0 - a) + color.0[k] as f32 * a;
        p.0[k] = v.round() as u8;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_font_coverage() {
        let latin = Fonts::builtin_for(&[Script::Latin]);
        assert!(latin.check_text("reward 12.").is_ok());
        let err = latin.check_text("\u{0E01}\u{0E32}").unwrap_err();
        assert!(matches!(err, Error::GlyphMissing { codepoint: '\u{0E01}', .. }));
        assert!(Fonts::builtin().check_text("\u{0E01}\u{0E32}").is_ok());
    }

    #[test]
    fn draws_something() {
        let mut img = RgbImage::from_pixel(60, 30, Rgb([255, 255, 255]));
        Fonts::builtin().draw(&mut img, 2, 2, 16.0, "ab", Rgb([0, 0, 0]));
        assert!(img.pixels().any(|p| p.0 == [0, 0, 0]));
    }

    #[test]
    fn rtl_is_reversed_for_drawing() {
        let hebrew = "\u{05D0}\u{05D1}\u{05D2}";
        let v = visual_order(hebrew);
        assert_eq!(v, "\u{05D2}\u{05D1}\u{05D0}");
        assert_eq!(visual_order("abc"), "abc");
    }

    #[test]
    fn system_ttf_if_present() {
        let dir = Path::new("/usr/share/fonts/truetype/dejavu");
        if !dir.join("DejaVuSans.ttf").exists() {
            return;
        }
        let fonts = Fonts::load_dir(dir).unwrap();
        assert!(fonts.covers('a'));
        assert!(fonts.measure("hello", 20.0) > 20);
        let mut img = RgbImage::from_pixel(80, 30, Rgb([255, 255, 255]));
        fonts.draw(&mut img, 1, 1, 20.0, "hello", Rgb([0, 0, 0]));
        assert!(img.pixels().any(|p| p.0[0] < 128));
    }
}
