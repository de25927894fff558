//! Question templates and instantiation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{PlotKind, Target};
use super::LabeledPlot;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionType {
    Reading,
    Grounding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaItem {
    pub plot_id: u32,
    pub language: String,
    pub qtype: QuestionType,
    pub target: Target,
    pub question: String,
    pub gold: String,
}

pub const YES: &str = "yes";
pub const NO: &str = "no";

/// Template keys; a key may be refined with `.bar` / `.pie`, which wins over
/// the plain key. Placeholders: `{element}`, `{label}`, `{color}`.
const ENGLISH: &[(&str, &str)] = &[
    ("reading.biggest", "What is the label of the biggest {element}?"),
    ("reading.smallest", "What is the label of the smallest {element}?"),
    ("reading.color", "What is the label of the {color} {element}?"),
    ("grounding.biggest", "Is the {element} with label '{label}' the biggest?"),
    ("grounding.smallest", "Is the {element} with label '{label}' the smallest?"),
    ("grounding.color", "Is the {element} with label '{label}' colored in {color}?"),
    ("element.bar", "bar"),
    ("element.pie", "slice"),
];

/// Question frames for one language. Keys missing from an override file
/// fall back to English.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    entries: BTreeMap<String, String>,
}

impl Default for Templates {
    fn default() -> Self {
        Self::english()
    }
}

impl Templates {
    pub fn english() -> Self {
        Self {
            entries: ENGLISH
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// English merged with a JSON object of overrides.
    pub fn with_overrides(overrides: BTreeMap<String, String>) -> Self {
        let mut t = Self::english();
        t.entries.extend(overrides);
        t
    }

    /// `<dir>/<lang>.json` if present, otherwise English.
    pub fn load(dir: &Path, language: &str) -> Result<Self> {
        let path = dir.join(format!("{language}.json"));
        if !path.exists() {
            return Ok(Self::english());
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let overrides: BTreeMap<String, String> = serde_json::from_str(&text)?;
        Ok(Self::with_overrides(overrides))
    }

    fn get(&self, key: &str, kind: PlotKind) -> &str {
        let refined = format!("{key}.{}", kind_key(kind));
        self.entries
            .get(&refined)
            .or_else(|| self.entries.get(key))
            .map(String::as_str)
            .unwrap_or("")
    }

    fn color_name<'a>(&'a self, color: &'a str) -> &'a str {
        self.entries
            .get(&format!("color.{color}"))
            .map_or(color, String::as_str)
    }

    fn fill(&self, qtype: QuestionType, target: Target, kind: PlotKind, label: &str) -> String {
        let prefix = match qtype {
            QuestionType::Reading => "reading",
            QuestionType::Grounding => "grounding",
        };
        let (suffix, color) = match target {
            Target::Biggest => ("biggest", ""),
            Target::Smallest => ("smallest", ""),
            Target::Color(c) => ("color", c.name()),
        };
        let element = self.get("element", kind);
        self.get(&format!("{prefix}.{suffix}"), kind)
            .replace("{element}", element)
            .replace("{color}", self.color_name(color))
            .replace("{label}", label)
    }
}

fn kind_key(kind: PlotKind) -> &'static str {
    match kind {
        PlotKind::Bar => "bar",
        PlotKind::Pie => "pie",
    }
}

/// Five reading then eight grounding questions for a labeled plot.
pub fn build_questions(plot: &LabeledPlot, templates: &Templates) -> Vec<QaItem> {
    let cfg = &plot.config;
    let item = |qtype, target, label: &str, gold: &str| QaItem {
        plot_id: cfg.id,
        language: plot.language.clone(),
        qtype,
        target,
        question: templates.fill(qtype, target, cfg.kind, label),
        gold: gold.to_owned(),
    };

    let mut out = Vec::with_capacity(13);
    out.push(item(QuestionType::Reading, Target::Biggest, "", &plot.labels[cfg.biggest()]));
    out.push(item(QuestionType::Reading, Target::Smallest, "", &plot.labels[cfg.smallest()]));
    for e in cfg.question_elements {
        out.push(item(
            QuestionType::Reading,
            Target::Color(cfg.colors[e]),
            "",
            &plot.labels[e],
        ));
    }
    for g in &cfg.grounding {
        out.push(item(
            QuestionType::Grounding,
            g.target,
            &plot.labels[g.element],
            if g.answer { YES } else { NO },
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::config::{Color, GroundingSpec, Orientation, PlotConfig};
    use super::*;

    /// The English bar plot shown as the worked example: six bars, yellow /
    /// red / purple reading targets.
    fn example_plot(kind: PlotKind) -> LabeledPlot {
        let labels = ["reward", "incredible", "reverse", "sunset", "closed", "twitter"];
        let colors = vec![Color::Blue, Color::Green, Color::Orange, Color::Red, Color::Yellow, Color::Purple];
        let g = |target, element, answer| GroundingSpec { target, element, answer };
        LabeledPlot {
            config: PlotConfig {
                id: 0,
                kind,
                sizes: vec![90, 50, 10, 40, 60, 30],
                colors,
                canvas: (640, 480),
                orientation: (kind == PlotKind::Bar).then_some(Orientation::Vertical),
                exploded: vec![],
                question_elements: [4, 3, 5],
                grounding: vec![
                    g(Target::Biggest, 0, true),
                    g(Target::Biggest, 1, false),
                    g(Target::Smallest, 2, true),
                    g(Target::Smallest, 3, false),
                    g(Target::Color(Color::Yellow), 4, true),
                    g(Target::Color(Color::Purple), 4, false),
                    g(Target::Color(Color::Purple), 5, true),
                    g(Target::Color(Color::Red), 5, false),
                ],
            },
            language: "en".into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn english_bar_questions_match_reference_strings() {
        let qs = build_questions(&example_plot(PlotKind::Bar), &Templates::english());
        let text: Vec<&str> = qs.iter().map(|q| q.question.as_str()).collect();
        assert_eq!(
            text,
            [
                "What is the label of the biggest bar?",
                "What is the label of the smallest bar?",
                "What is the label of the yellow bar?",
                "What is the label of the red bar?",
                "What is the label of the purple bar?",
                "Is the bar with label 'reward' the biggest?",
                "Is the bar with label 'incredible' the biggest?",
                "Is the bar with label 'reverse' the smallest?",
                "Is the bar with label 'sunset' the smallest?",
                "Is the bar with label 'closed' colored in yellow?",
                "Is the bar with label 'closed' colored in purple?",
                "Is the bar with label 'twitter' colored in purple?",
                "Is the bar with label 'twitter' colored in red?",
            ]
        );
        let golds: Vec<&str> = qs.iter().map(|q| q.gold.as_str()).collect();
        assert_eq!(
            golds,
            ["reward", "reverse", "closed", "sunset", "twitter", "yes", "no", "yes", "no", "yes", "no", "yes", "no"]
        );
    }

    #[test]
    fn pie_questions_say_slice() {
        let qs = build_questions(&example_plot(PlotKind::Pie), &Templates::english());
        assert_eq!(qs[0].question, "What is the label of the biggest slice?");
        assert!(qs.iter().all(|q| q.question.contains("slice")));
    }

    #[test]
    fn overrides_fall_back_to_english() {
        let mut o = BTreeMap::new();
        o.insert("reading.biggest".into(), "Was ist die Beschriftung des größten {element}?".into());
        o.insert("element.bar".into(), "Balkens".into());
        o.insert("color.yellow".into(), "gelben".into());
        let t = Templates::with_overrides(o);
        let qs = build_questions(&example_plot(PlotKind::Bar), &t);
        assert_eq!(qs[0].question, "Was ist die Beschriftung des größten Balkens?");
        assert_eq!(qs[2].question, "What is the label of the gelben Balkens?");
        assert_eq!(qs[1].question, "What is the label of the smallest Balkens?");
    }
}
