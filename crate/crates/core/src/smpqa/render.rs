//! Raster rendering of labeled plots.
//!
//! Geometry depends only on the [`PlotConfig`]; label text is fitted into a
//! fixed slot per element by shrinking the font, never by moving shapes.

use std::f64::consts::PI;

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ImageEncoder, Rgb, RgbImage};

use super::config::{Orientation, PlotConfig, PlotKind};
use super::LabeledPlot;
use crate::error::Result;
use crate::font::Fonts;

pub const RENDERER_VERSION: &str = "lingomix-plot/1";

const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const INK: Rgb<u8> = Rgb([20, 20, 20]);
const MASK: Rgb<u8> = Rgb([128, 128, 128]);
const MIN_FONT_PX: f32 = 8.0;
/// Width of a label mask in units of the slot font size.
const MASK_EMS: f32 = 3.0;

/// How label text is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextMode {
    #[default]
    Glyphs,
    /// A fixed-width box per label in place of the text.
    Masked,
    /// Geometry only.
    Hidden,
}

/// Where and how large a label may be drawn.
#[derive(Debug, Clone, Copy)]
struct LabelSlot {
    /// Anchor x; interpretation depends on `align`.
    x: f64,
    /// Vertical center of the text line.
    y_center: f64,
    max_width: f64,
    px: f32,
    align: Align,
}

#[derive(Debug, Clone, Copy)]
enum Align {
    Center,
    Right,
}

pub fn render(plot: &LabeledPlot, fonts: &Fonts) -> Result<RgbImage> {
    render_with(plot, fonts, TextMode::Glyphs)
}

pub fn render_with(plot: &LabeledPlot, fonts: &Fonts, mode: TextMode) -> Result<RgbImage> {
    if mode == TextMode::Glyphs {
        for label in &plot.labels {
            fonts.check_text(label)?;
        }
    }
    let cfg = &plot.config;
    let (w, h) = cfg.canvas;
    let mut img = RgbImage::from_pixel(w, h, WHITE);
    let slots = match cfg.kind {
        PlotKind::Bar => draw_bars(&mut img, cfg),
        PlotKind::Pie => draw_pie(&mut img, cfg),
    };
    for (slot, label) in slots.iter().zip(&plot.labels) {
        draw_label(&mut img, fonts, slot, label, mode);
    }
    Ok(img)
}

/// Lossless 8-bit RGB PNG without ancillary chunks.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    PngEncoder::new_with_quality(&mut buf, CompressionType::Default, FilterType::Adaptive)
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)?;
    Ok(buf)
}

fn fill_rect(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb<u8>) {
    let (w, h) = img.dimensions();
    let clamp = |v: f64, hi: u32| (v.round().max(0.0) as u32).min(hi);
    for y in clamp(y0, h)..clamp(y1, h) {
        for x in clamp(x0, w)..clamp(x1, w) {
            img.put_pixel(x, y, color);
        }
    }
}

fn rgb(c: super::config::Color) -> Rgb<u8> {
    Rgb(c.rgb())
}

fn draw_bars(img: &mut RgbImage, cfg: &PlotConfig) -> Vec<LabelSlot> {
    let (w, h) = (cfg.canvas.0 as f64, cfg.canvas.1 as f64);
    let n = cfg.n_elements() as f64;
    let max = *cfg.sizes.iter().max().unwrap_or(&1) as f64;
    let mut slots = Vec::with_capacity(cfg.n_elements());
    match cfg.orientation.unwrap_or(Orientation::Vertical) {
        Orientation::Vertical => {
            let (left, right, top) = (0.08 * w, 0.04 * w, 0.06 * h);
            let base = h - 0.16 * h;
            let slot_w = (w - left - right) / n;
            let px = ((0.06 * h).min(slot_w * 0.3).min(28.0) as f32).max(MIN_FONT_PX);
            for (i, (&size, &color)) in cfg.sizes.iter().zip(&cfg.colors).enumerate() {
                let cx = left + slot_w * (i as f64 + 0.5);
                let bar_h = (base - top) * size as f64 / max;
                fill_rect(img, cx - 0.35 * slot_w, base - bar_h, cx + 0.35 * slot_w, base, rgb(color));
                slots.push(LabelSlot {
                    x: cx,
                    y_center: base + 0.08 * h,
                    max_width: slot_w * 0.95,
                    px,
                    align: Align::Center,
                });
            }
            fill_rect(img, left, base, w - right, base + 2.0, INK);
        }
        Orientation::Horizontal => {
            let (band, right, top, bottom) = (0.26 * w, 0.05 * w, 0.06 * h, 0.06 * h);
            let slot_h = (h - top - bottom) / n;
            let px = ((slot_h * 0.45).min(28.0) as f32).max(MIN_FONT_PX);
            for (i, (&size, &color)) in cfg.sizes.iter().zip(&cfg.colors).enumerate() {
                let cy = top + slot_h * (i as f64 + 0.5);
                let len = (w - band - right) * size as f64 / max;
                fill_rect(img, band, cy - 0.35 * slot_h, band + len, cy + 0.35 * slot_h, rgb(color));
                slots.push(LabelSlot {
                    x: band - 6.0,
                    y_center: cy,
                    max_width: band - 12.0,
                    px,
                    align: Align::Right,
                });
            }
            fill_rect(img, band - 2.0, top, band, h - bottom, INK);
        }
    }
    slots
}

/// Angle of (dx, dy) measured clockwise from 12 o'clock, in [0, 2π).
fn clock_angle(dx: f64, dy: f64) -> f64 {
    let a = dx.atan2(-dy);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn draw_pie(img: &mut RgbImage, cfg: &PlotConfig) -> Vec<LabelSlot> {
    let (w, h) = (cfg.canvas.0 as f64, cfg.canvas.1 as f64);
    let (cx, cy) = (w / 2.0, h / 2.0);
    let r = 0.30 * w.min(h);
    let total: u32 = cfg.sizes.iter().sum();
    let explode = 0.08 * r;

    // slice i spans [start[i], start[i + 1]) clockwise from the top
    let mut bounds = Vec::with_capacity(cfg.n_elements() + 1);
    let mut acc = 0u32;
    bounds.push(0.0);
    for &s in &cfg.sizes {
        acc += s;
        bounds.push(2.0 * PI * acc as f64 / total as f64);
    }
    let centers: Vec<(f64, f64)> = (0..cfg.n_elements())
        .map(|i| {
            if cfg.exploded.contains(&i) {
                let mid = (bounds[i] + bounds[i + 1]) / 2.0;
                (cx + explode * mid.sin(), cy - explode * mid.cos())
            } else {
                (cx, cy)
            }
        })
        .collect();

    let reach = r + explode + 1.0;
    let y_lo = (cy - reach).floor().max(0.0) as u32;
    let y_hi = ((cy + reach).ceil() as u32).min(cfg.canvas.1);
    let x_lo = (cx - reach).floor().max(0.0) as u32;
    let x_hi = ((cx + reach).ceil() as u32).min(cfg.canvas.0);
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            for (i, &(sx, sy)) in centers.iter().enumerate() {
                let (dx, dy) = (px - sx, py - sy);
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let a = clock_angle(dx, dy);
                if a >= bounds[i] && a < bounds[i + 1] {
                    img.put_pixel(x, y, rgb(cfg.colors[i]));
                    break;
                }
            }
        }
    }

    let px = ((0.05 * w.min(h)).min(26.0) as f32).max(MIN_FONT_PX);
    (0..cfg.n_elements())
        .map(|i| {
            let mid = (bounds[i] + bounds[i + 1]) / 2.0;
            let (sx, sy) = centers[i];
            let d = 1.2 * r;
            let max_width = 0.3 * w;
            let x = (sx + d * mid.sin()).clamp(max_width / 2.0, w - max_width / 2.0);
            let y = (sy - d * mid.cos()).clamp(px as f64, h - px as f64);
            LabelSlot {
                x,
                y_center: y,
                max_width,
                px,
                align: Align::Center,
            }
        })
        .collect()
}

fn draw_label(img: &mut RgbImage, fonts: &Fonts, slot: &LabelSlot, label: &str, mode: TextMode) {
    match mode {
        TextMode::Hidden => {}
        TextMode::Masked => {
            let width = (slot.px * MASK_EMS) as f64;
            let x0 = match slot.align {
                Align::Center => slot.x - width / 2.0,
                Align::Right => slot.x - width,
            };
            let half = slot.px as f64 / 2.0;
            fill_rect(img, x0, slot.y_center - half, x0 + width, slot.y_center + half, MASK);
        }
        TextMode::Glyphs => {
            let mut px = slot.px;
            while px > MIN_FONT_PX && fonts.measure(label, px) as f64 > slot.max_width {
                px -= 1.0;
            }
            let width = fonts.measure(label, px) as f64;
            let x0 = match slot.align {
                Align::Center => slot.x - width / 2.0,
                Align::Right => slot.x - width,
            };
            let top = slot.y_center - fonts.line_height(px) as f64 / 2.0;
            fonts.draw(img, x0.round() as i32, top.round() as i32, px, label, INK);
        }
    }
}
