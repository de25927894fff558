//! The evaluation tasks, their metrics, languages and prompts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    ExactMatch,
    RelaxedMatch,
    Cider,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::ExactMatch => "exact-match",
            Metric::RelaxedMatch => "relaxed-match",
            Metric::Cider => "cider",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-match" | "exact" => Ok(Metric::ExactMatch),
            "relaxed-match" | "relaxed" => Ok(Metric::RelaxedMatch),
            "cider" => Ok(Metric::Cider),
            _ => Err(Error::InvalidInput(format!("unknown metric `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskSpec {
    pub name: &'static str,
    pub metric: Metric,
    /// Outputs are expected in the target language, so language fidelity
    /// is meaningful.
    pub fidelity_relevant: bool,
    pub languages: &'static [&'static str],
    pub prompt_template: &'static str,
}

impl TaskSpec {
    pub fn has_language(&self, code: &str) -> bool {
        self.languages.contains(&code)
    }
}

const WOP: &str = "<IMG>{QUESTION}\nAnswer the question using a single word or phrase.";
const WOP_TL: &str = "<IMG>{QUESTION}\nAnswer the question using a single word or phrase.\nAnswer in {LANGUAGE}.";
const WOP_Q_TL: &str = "<IMG>{QUESTION}?\nAnswer the question using a single word or phrase.\nAnswer in {LANGUAGE}.";
const XMMMU: &str = "{QUESTION}\nThere are several options:\nA. {OPTION A}\nB. {OPTION B}\nC. {OPTION C}\nD. {OPTION D}\nAnswer with the option's letter from the given choices directly.";
const MARVL: &str = "<IMG>Given the two images <IMG><IMG>, is it correct to say \"{HYPOTHESIS}\"? Answer yes or no.'";
const VGR: &str = "Given the two images <IMG><IMG>, is it correct to say \"{HYPOTHESIS}\"? Answer yes or no.'";

pub static TASKS: &[TaskSpec] = &[
    TaskSpec {
        name: "maxm",
        metric: Metric::ExactMatch,
        fidelity_relevant: true,
        languages: &["en", "fr", "hi", "ro", "th", "zh"],
        prompt_template: WOP_Q_TL,
    },
    TaskSpec {
        name: "xgqa",
        metric: Metric::ExactMatch,
        fidelity_relevant: false,
        languages: &["bn", "de", "en", "id", "ko", "pt", "ru", "zh"],
        prompt_template: "<IMG>{QUESTION}?\nAnswer the question using a single word or phrase.\nAnswer in English.",
    },
    TaskSpec {
        name: "xvnli",
        metric: Metric::ExactMatch,
        fidelity_relevant: false,
        languages: &["ar", "en", "es", "fr", "ru"],
        prompt_template: "<IMG>Is it guaranteed true that \"{HYPOTHESIS}\"? Yes, no, or maybe? Answer in English.",
    },
    TaskSpec {
        name: "m5b-vlod",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &["am", "ber", "bn", "de", "en", "fil", "ha", "hi", "ru", "sw", "th", "zu"],
        prompt_template: "Based on the 5 images <IMG><IMG><IMG><IMG><IMG> ordered from top-left to bottom-right, which image does not match the hypothesis \"{HYPOTHESIS}\"? Choose one from [A, B, C, D, E] and only output a single letter:",
    },
    TaskSpec {
        name: "m5b-vgr",
        metric: Metric::ExactMatch,
        fidelity_relevant: false,
        languages: &["am", "ber", "bn", "de", "en", "fil", "ha", "hi", "ru", "sw", "th", "zu"],
        prompt_template: VGR,
    },
    TaskSpec {
        name: "marvl",
        metric: Metric::ExactMatch,
        fidelity_relevant: false,
        languages: &["en", "id", "sw", "ta", "tr", "zh"],
        prompt_template: MARVL,
    },
    TaskSpec {
        name: "mtvqa",
        metric: Metric::ExactMatch,
        fidelity_relevant: true,
        languages: &["ar", "de", "fr", "it", "ja", "ru", "th", "vi"],
        prompt_template: WOP_TL,
    },
    TaskSpec {
        name: "smpqa-name",
        metric: Metric::ExactMatch,
        fidelity_relevant: true,
        languages: &["ar", "de", "en", "hi", "id", "it", "ko", "ru", "th", "zh", "zu"],
        prompt_template: WOP,
    },
    TaskSpec {
        name: "smpqa-ground",
        metric: Metric::ExactMatch,
        fidelity_relevant: false,
        languages: &["ar", "de", "en", "hi", "id", "it", "ko", "ru", "th", "zh", "zu"],
        prompt_template: WOP,
    },
    TaskSpec {
        name: "m3exam",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &["af", "en", "it", "pt", "th", "vi", "zh"],
        prompt_template: "{QUESTION}\nOptions:\nA. {OPTION A}\nB. {OPTION B}\nC. {OPTION C}\nD. {OPTION D}\n Answer with the option's letter from the given choices directly.",
    },
    TaskSpec {
        name: "mmmu",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &["en"],
        prompt_template: XMMMU,
    },
    TaskSpec {
        name: "xmmmu",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &["ar", "en", "fr", "hi", "id", "ja", "pt"],
        prompt_template: XMMMU,
    },
    TaskSpec {
        name: "bin-mc",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &[
            "af", "am", "cs", "el", "en", "es", "fa", "fi", "ha", "hr", "hu", "ja", "mi", "nl", "no", "pl", "ro", "ta",
            "te", "zu",
        ],
        prompt_template: "<IMG>Which of these choices (in English) is shown in the image?\n Choices:\nA. {CHOICE A}\nB. {CHOICE B}\nC. {CHOICE C}\nD. {CHOICE D}\n Answer with the letter from the given choices directly.",
    },
    TaskSpec {
        name: "cvqa",
        metric: Metric::RelaxedMatch,
        fidelity_relevant: false,
        languages: &[
            "am", "ar-eg", "bg", "bn", "br", "es", "fil", "ga", "id", "ig", "ja", "jv", "ko", "kr", "min", "mn", "ms",
            "no", "om", "pt", "ro", "ru", "rw", "si", "su", "sw", "ta", "te", "ur", "zh",
        ],
        prompt_template: "<IMG>{QUESTION}\nThere are several options:\nA. {OPTION A}\nB. {OPTION B}\nC. {OPTION C}\nD. {OPTION D}\nAnswer with the option's letter from the given choices directly.",
    },
    TaskSpec {
        name: "xm3600",
        metric: Metric::Cider,
        fidelity_relevant: true,
        languages: &[
            "ar", "bn", "cs", "da", "de", "el", "en", "es", "fa", "fi", "fil", "fr", "he", "hi", "hr", "hu", "id", "it",
            "ja", "ko", "mi", "nl", "no", "pl", "pt", "quz", "ro", "ru", "sv", "sw", "te", "th", "tr", "uk", "vi", "zh",
        ],
        prompt_template: "Briefly describe the image in {LANGUAGE} in one sentence.",
    },
];

pub fn task(name: &str) -> Result<&'static TaskSpec> {
    TASKS
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::UnknownTask(name.to_owned()))
}

/// Substitute `{KEY}` placeholders. Unknown placeholders are left as is.
pub fn fill_prompt(template: &str, fields: &[(&str, &str)]) -> String {
    let mut out = template.to_owned();
    for (k, v) in fields {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    out
}
