//! Language identification for fidelity scoring.

use std::collections::HashMap;

use crate::registry::Script;

pub trait LanguageIdentifier: Send + Sync {
    /// Whether `identify` can ever return `code`.
    fn supports(&self, code: &str) -> bool;
    /// Best guess for `text`, or `None` when undecidable.
    fn identify(&self, text: &str) -> Option<String>;
}

/// Scripts used by exactly one supported language.
const SINGLE: &[(Script, &str)] = &[
    (Script::Hangul, "ko"),
    (Script::Japanese, "ja"),
    (Script::Thai, "th"),
    (Script::Bengali, "bn"),
    (Script::Ethiopic, "am"),
    (Script::Georgian, "ka"),
    (Script::Greek, "el"),
    (Script::Hebrew, "he"),
    (Script::Tamil, "ta"),
    (Script::Telugu, "te"),
    (Script::Khmer, "km"),
    (Script::Lao, "lo"),
    (Script::Myanmar, "my"),
    (Script::Tibetan, "bo"),
    (Script::Gurmukhi, "pa"),
    (Script::Sinhala, "si"),
];

const LATIN: &[(&str, &str)] = &[
    ("en", "the a an of and is are in on with to it this that there for at by his her was were be"),
    ("de", "der die das und ist ein eine mit auf im in den dem des zu von nicht sich sind ich es"),
    ("fr", "le la les un une des et est dans sur avec du de en pour que qui au aux il elle sont"),
    ("es", "el la los las un una y es en con del de por para que se al su sus está son"),
    ("it", "il lo la gli le un una di e è in con su per che del della nel sono sul da"),
    ("pt", "o a os as um uma e é em com do da dos das no na para que se por são"),
    ("nl", "de het een en is van in op met te zijn niet dat die er aan voor bij"),
    ("id", "yang dan di ini itu dengan untuk dari ada sebuah seorang pada adalah ke tidak dalam"),
    ("tr", "bir ve bu ile için da de olan çok gibi ama daha en ne o var"),
    ("pl", "i w na z się jest do nie to że jak po od są przez dla o"),
    ("sv", "och en ett är på i med det som av för till att den har inte"),
    ("cs", "a v na se je s z do to že jsou od pro po ve jako který"),
];

const CYRILLIC: &[(&str, &str)] = &[
    ("ru", "и в на с не что это как по из у за от для он она они есть мужчина женщина"),
    ("uk", "і в на з не що це як по із у за від для він вона вони є та"),
    ("bg", "и в на с не че това как по от за е са една един той тя те със"),
];

const ARABIC: &[(&str, &str)] = &[
    ("ar", "في من على إلى و هذا هذه مع عن رجل امرأة التي الذي هو هي"),
    ("fa", "در از به با این آن و که را است یک برای روی مرد زن"),
    ("ur", "میں سے کے کی کا اور ہے ایک پر کو یہ وہ ہیں آدمی"),
];

const DEVANAGARI: &[(&str, &str)] = &[
    ("hi", "है में की के का और एक पर से को यह वह हैं था रहा"),
    ("mr", "आहे मध्ये आणि एक व ला या हा ही चा ची चे वर आहेत"),
];

/// Letters that only occur in one language of a script group.
const MARKERS: &[(char, &str)] = &[
    ('і', "uk"),
    ('ї', "uk"),
    ('є', "uk"),
    ('ґ', "uk"),
    ('ы', "ru"),
    ('э', "ru"),
    ('ё', "ru"),
    ('پ', "fa"),
    ('ژ', "fa"),
    ('ٹ', "ur"),
    ('ڈ', "ur"),
    ('ڑ', "ur"),
    ('ں', "ur"),
    ('ے', "ur"),
    ('ß', "de"),
    ('ğ', "tr"),
    ('ş', "tr"),
    ('ı', "tr"),
    ('ł', "pl"),
    ('ą', "pl"),
    ('ę', "pl"),
    ('ř', "cs"),
    ('ě', "cs"),
    ('ů', "cs"),
];

/// Script statistics plus small stopword lists. Enough to separate
/// languages with distinct scripts and the common languages within Latin,
/// Cyrillic, Arabic and Devanagari.
pub struct BuiltinLid {
    groups: Vec<(Script, Vec<Stopwords>)>,
}

type Stopwords = (&'static str, Vec<&'static str>);

impl Default for BuiltinLid {
    fn default() -> Self {
        let build = |table: &[(&'static str, &'static str)]| {
            table
                .iter()
                .map(|(code, words)| (*code, words.split_whitespace().collect()))
                .collect()
        };
        Self {
            groups: vec![
                (Script::Latin, build(LATIN)),
                (Script::Cyrillic, build(CYRILLIC)),
                (Script::Arabic, build(ARABIC)),
                (Script::Devanagari, build(DEVANAGARI)),
            ],
        }
    }
}

impl BuiltinLid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn supported(&self) -> Vec<&'static str> {
        let mut out: Vec<&str> = SINGLE.iter().map(|(_, c)| *c).collect();
        out.push("zh");
        for (_, langs) in &self.groups {
            out.extend(langs.iter().map(|(c, _)| *c));
        }
        out.sort_unstable();
        out
    }

    fn within(&self, script: Script, text: &str) -> Option<String> {
        let (_, langs) = self.groups.iter().find(|(s, _)| *s == script)?;
        let lower = text.to_lowercase();
        let mut score: HashMap<&str, f64> = HashMap::new();
        for token in lower.split(|c: char| !c.is_alphanumeric() && !is_mark(c)) {
            if token.is_empty() {
                continue;
            }
            for (code, words) in langs {
                if words.contains(&token) {
                    *score.entry(code).or_default() += 1.0;
                }
            }
        }
        for c in lower.chars() {
            if let Some((_, code)) = MARKERS.iter().find(|(m, _)| *m == c) {
                if langs.iter().any(|(l, _)| l == code) {
                    *score.entry(code).or_default() += 0.5;
                }
            }
        }
        // highest score; ties go to the earlier language in the table, and
        // without any evidence the first (most widely used) language wins
        let mut best = (langs[0].0, 0.0);
        for (code, _) in langs {
            let s = score.get(code).copied().unwrap_or(0.0);
            if s > best.1 {
                best = (code, s);
            }
        }
        Some(best.0.to_owned())
    }
}

fn is_mark(c: char) -> bool {
    // combining vowel signs of Devanagari and Arabic harakat
    matches!(c as u32, 0x0900..=0x0903 | 0x093A..=0x094F | 0x0962..=0x0963 | 0x064B..=0x065F | 0x0670)
}

impl LanguageIdentifier for BuiltinLid {
    fn supports(&self, code: &str) -> bool {
        self.supported().contains(&code)
    }

    fn identify(&self, text: &str) -> Option<String> {
        let mut counts: HashMap<Script, usize> = HashMap::new();
        for c in text.chars() {
            if let Some(s) = Script::of_char(c) {
                *counts.entry(s).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return None;
        }
        // kana anywhere marks Japanese even when kanji dominate
        if counts.get(&Script::Japanese).copied().unwrap_or(0) > 0 {
            return Some("ja".into());
        }
        let script = Script::ALL
            .iter()
            .copied()
            .max_by_key(|s| (counts.get(s).copied().unwrap_or(0), std::cmp::Reverse(*s)))?;
        if script == Script::Han {
            return Some("zh".into());
        }
        if let Some((_, code)) = SINGLE.iter().find(|(s, _)| *s == script) {
            return Some((*code).into());
        }
        self.within(script, text)
    }
}

/// Share of outputs identified as the expected language.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Fidelity {
    pub percent: f64,
    pub total: usize,
    pub matched: usize,
    /// Blank outputs; counted as not in the expected language.
    pub empty: usize,
}

pub fn language_fidelity<S: AsRef<str>>(
    outputs: &[S],
    expected: &str,
    lid: &dyn LanguageIdentifier,
) -> crate::Result<Fidelity> {
    if !lid.supports(expected) {
        return Err(crate::Error::UnsupportedLidLanguage(expected.to_owned()));
    }
    let mut matched = 0;
    let mut empty = 0;
    for o in outputs {
        let o = o.as_ref();
        if o.trim().is_empty() {
            empty += 1;
        } else if lid.identify(o).as_deref() == Some(expected) {
            matched += 1;
        }
    }
    let percent = if outputs.is_empty() {
        0.0
    } else {
        100.0 * matched as f64 / outputs.len() as f64
    };
    Ok(Fidelity {
        percent,
        total: outputs.len(),
        matched,
        empty,
    })
}
