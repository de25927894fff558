//! Language-independent plot configurations.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::rng::{self, Rng};

pub const PLOTS_PER_KIND: u32 = 50;
pub const MIN_ELEMENTS: u32 = 4;
pub const MAX_ELEMENTS: u32 = 8;
/// Element sizes are drawn in tenths from 1.0 to 10.0.
pub const SIZE_TENTHS: (u32, u32) = (10, 100);
pub const CANVAS_WIDTHS: [u32; 3] = [480, 640, 800];
/// Height / width in hundredths.
pub const ASPECT_HUNDREDTHS: (u32, u32) = (60, 140);
pub const MAX_EXPLODED: u32 = 2;
pub const PALETTE_VERSION: &str = "named-10/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
    Green,
    Yellow,
    Purple,
    Orange,
    Brown,
    Pink,
    Gray,
    Cyan,
}

impl Color {
    pub const PALETTE: [Color; 10] = [
        Color::Red,
        Color::Blue,
        Color::Green,
        Color::Yellow,
        Color::Purple,
        Color::Orange,
        Color::Brown,
        Color::Pink,
        Color::Gray,
        Color::Cyan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
            Color::Green => "green",
            Color::Yellow => "yellow",
            Color::Purple => "purple",
            Color::Orange => "orange",
            Color::Brown => "brown",
            Color::Pink => "pink",
            Color::Gray => "gray",
            Color::Cyan => "cyan",
        }
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Color::Red => [214, 39, 40],
            Color::Blue => [31, 119, 180],
            Color::Green => [44, 160, 44],
            Color::Yellow => [240, 200, 20],
            Color::Purple => [148, 103, 189],
            Color::Orange => [255, 127, 14],
            Color::Brown => [140, 86, 75],
            Color::Pink => [227, 119, 194],
            Color::Gray => [127, 127, 127],
            Color::Cyan => [23, 190, 207],
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Color::PALETTE.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Bar,
    Pie,
}

impl PlotKind {
    pub fn element_noun(self) -> &'static str {
        match self {
            PlotKind::Bar => "bar",
            PlotKind::Pie => "slice",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// What a question refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Biggest,
    Smallest,
    Color(Color),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Biggest => f.write_str("biggest"),
            Target::Smallest => f.write_str("smallest"),
            Target::Color(c) => write!(f, "color:{c}"),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "biggest" => Ok(Target::Biggest),
            "smallest" => Ok(Target::Smallest),
            _ => s
                .strip_prefix("color:")
                .and_then(Color::from_name)
                .map(Target::Color)
                .ok_or_else(|| format!("unknown target `{s}`")),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One planned yes/no question: "is `element` the `target`?".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundingSpec {
    pub target: Target,
    pub element: usize,
    pub answer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlotConfig {
    pub id: u32,
    pub kind: PlotKind,
    /// Relative element sizes in tenths; exactly one maximum and one minimum.
    pub sizes: Vec<u32>,
    /// One distinct palette color per element.
    pub colors: Vec<Color>,
    pub canvas: (u32, u32),
    pub orientation: Option<Orientation>,
    /// Exploded slice indices (pie only), ascending.
    pub exploded: Vec<usize>,
    /// Elements whose colors the three color-reading questions ask about.
    pub question_elements: [usize; 3],
    /// The eight grounding questions, in emission order.
    pub grounding: Vec<GroundingSpec>,
}

impl PlotConfig {
    pub fn n_elements(&self) -> usize {
        self.sizes.len()
    }

    pub fn biggest(&self) -> usize {
        argmax(&self.sizes)
    }

    pub fn smallest(&self) -> usize {
        let neg: Vec<i64> = self.sizes.iter().map(|&s| -(s as i64)).collect();
        argmax(&neg)
    }

    /// Colors referenced by the reading questions.
    pub fn question_colors(&self) -> [Color; 3] {
        self.question_elements.map(|i| self.colors[i])
    }

    /// Evaluate a target predicate against the geometry.
    pub fn holds(&self, target: Target, element: usize) -> bool {
        match target {
            Target::Biggest => element == self.biggest(),
            Target::Smallest => element == self.smallest(),
            Target::Color(c) => self.colors[element] == c,
        }
    }
}

fn argmax<T: Ord>(xs: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

fn unique_extremes(sizes: &[u32]) -> bool {
    let max = sizes.iter().max().copied();
    let min = sizes.iter().min().copied();
    sizes.iter().filter(|&&s| Some(s) == max).count() == 1
        && sizes.iter().filter(|&&s| Some(s) == min).count() == 1
}

fn sample_sizes(rng: &mut Rng, n: usize) -> Vec<u32> {
    loop {
        let sizes: Vec<u32> = (0..n)
            .map(|_| rng::between(rng, SIZE_TENTHS.0, SIZE_TENTHS.1))
            .collect();
        if unique_extremes(&sizes) {
            return sizes;
        }
    }
}

fn ordered_pair(rng: &mut Rng, yes: GroundingSpec, no: GroundingSpec) -> [GroundingSpec; 2] {
    if rng::between(rng, 0, 1) == 0 {
        [yes, no]
    } else {
        [no, yes]
    }
}

fn other_than(rng: &mut Rng, n: usize, excluded: usize) -> usize {
    let pick = rng::index(rng, n - 1);
    if pick >= excluded {
        pick + 1
    } else {
        pick
    }
}

fn sample_one(seed: u64, id: u32) -> PlotConfig {
    let mut rng = rng::substream(seed, "smpqa-config", id as u64);
    let kind = if id < PLOTS_PER_KIND {
        PlotKind::Bar
    } else {
        PlotKind::Pie
    };
    let n = rng::between(&mut rng, MIN_ELEMENTS, MAX_ELEMENTS) as usize;
    let sizes = sample_sizes(&mut rng, n);
    let colors: Vec<Color> = rng::sample_distinct(&mut rng, Color::PALETTE.len(), n)
        .into_iter()
        .map(|i| Color::PALETTE[i])
        .collect();
    let width = CANVAS_WIDTHS[rng::index(&mut rng, CANVAS_WIDTHS.len())];
    let aspect = rng::between(&mut rng, ASPECT_HUNDREDTHS.0, ASPECT_HUNDREDTHS.1);
    let height = (width * aspect + 50) / 100;

    let (orientation, exploded) = match kind {
        PlotKind::Bar => {
            let o = if rng::between(&mut rng, 0, 1) == 0 {
                Orientation::Vertical
            } else {
                Orientation::Horizontal
            };
            (Some(o), Vec::new())
        }
        PlotKind::Pie => {
            let k = rng::between(&mut rng, 0, MAX_EXPLODED) as usize;
            let mut ex = rng::sample_distinct(&mut rng, n, k);
            ex.sort_unstable();
            (None, ex)
        }
    };

    let qe = rng::sample_distinct(&mut rng, n, 3);
    let question_elements = [qe[0], qe[1], qe[2]];

    let big = argmax(&sizes);
    let small = {
        let neg: Vec<i64> = sizes.iter().map(|&s| -(s as i64)).collect();
        argmax(&neg)
    };
    let mut grounding = Vec::with_capacity(8);
    for (target, truth) in [(Target::Biggest, big), (Target::Smallest, small)] {
        let distractor = other_than(&mut rng, n, truth);
        grounding.extend(ordered_pair(
            &mut rng,
            GroundingSpec {
                target,
                element: truth,
                answer: true,
            },
            GroundingSpec {
                target,
                element: distractor,
                answer: false,
            },
        ));
    }
    for element in rng::sample_distinct(&mut rng, n, 2) {
        let wrong = colors[other_than(&mut rng, n, element)];
        grounding.extend(ordered_pair(
            &mut rng,
            GroundingSpec {
                target: Target::Color(colors[element]),
                element,
                answer: true,
            },
            GroundingSpec {
                target: Target::Color(wrong),
                element,
                answer: false,
            },
        ));
    }

    PlotConfig {
        id,
        kind,
        sizes,
        colors,
        canvas: (width, height),
        orientation,
        exploded,
        question_elements,
        grounding,
    }
}

/// The 100 plot configurations (ids 0-49 bar, 50-99 pie) for a seed.
pub fn sample_configs(seed: u64) -> Vec<PlotConfig> {
    (0..2 * PLOTS_PER_KIND).map(|id| sample_one(seed, id)).collect()
}

/// Digest of the full configuration list, equal across languages by
/// construction.
pub fn config_hash(configs: &[PlotConfig]) -> String {
    let bytes = serde_json::to_vec(configs).expect("configs serialize");
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifty_of_each_kind() {
        let c = sample_configs(42);
        assert_eq!(c.len(), 100);
        assert_eq!(c.iter().filter(|p| p.kind == PlotKind::Bar).count(), 50);
        assert_eq!(c.iter().filter(|p| p.kind == PlotKind::Pie).count(), 50);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(sample_configs(42), sample_configs(42));
        assert_ne!(sample_configs(1), sample_configs(2));
    }

    #[test]
    fn config_ranges() {
        for seed in 0..5 {
            for p in sample_configs(seed) {
                let n = p.n_elements();
                assert!((MIN_ELEMENTS as usize..=MAX_ELEMENTS as usize).contains(&n));
                assert!(unique_extremes(&p.sizes));
                assert!(p.sizes.iter().all(|s| (SIZE_TENTHS.0..=SIZE_TENTHS.1).contains(s)));
                let mut colors = p.colors.clone();
                colors.sort();
                colors.dedup();
                assert_eq!(colors.len(), n);
                assert!(CANVAS_WIDTHS.contains(&p.canvas.0));
                let aspect = p.canvas.1 as f64 / p.canvas.0 as f64;
                assert!((0.59..=1.41).contains(&aspect));
                match p.kind {
                    PlotKind::Bar => assert!(p.orientation.is_some() && p.exploded.is_empty()),
                    PlotKind::Pie => {
                        assert!(p.orientation.is_none() && p.exploded.len() <= 2)
                    }
                }
                let mut qe = p.question_elements.to_vec();
                qe.sort_unstable();
                qe.dedup();
                assert_eq!(qe.len(), 3);
                assert_eq!(p.grounding.len(), 8);
                assert_eq!(p.grounding.iter().filter(|g| g.answer).count(), 4);
                for g in &p.grounding {
                    assert_eq!(p.holds(g.target, g.element), g.answer);
                }
            }
        }
    }

    #[test]
    fn target_text_roundtrip() {
        for t in [Target::Biggest, Target::Smallest, Target::Color(Color::Yellow)] {
            assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
        }
        assert!("color:teal".parse::<Target>().is_err());
    }
}
