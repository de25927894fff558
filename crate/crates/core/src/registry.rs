//! The 100 training languages, their resource tiers and scripts.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Writing systems present in the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Script {
    Latin,
    Arabic,
    Cyrillic,
    Devanagari,
    Han,
    Hangul,
    Japanese,
    Thai,
    Bengali,
    Ethiopic,
    Georgian,
    Greek,
    Hebrew,
    Tamil,
    Telugu,
    Khmer,
    Lao,
    Myanmar,
    Tibetan,
    Gurmukhi,
    Sinhala,
}

impl Script {
    pub const ALL: [Script; 21] = [
        Script::Latin,
        Script::Arabic,
        Script::Cyrillic,
        Script::Devanagari,
        Script::Han,
        Script::Hangul,
        Script::Japanese,
        Script::Thai,
        Script::Bengali,
        Script::Ethiopic,
        Script::Georgian,
        Script::Greek,
        Script::Hebrew,
        Script::Tamil,
        Script::Telugu,
        Script::Khmer,
        Script::Lao,
        Script::Myanmar,
        Script::Tibetan,
        Script::Gurmukhi,
        Script::Sinhala,
    ];

    /// Unicode blocks attributed to the script. Japanese covers kana only;
    /// kanji fall under [`Script::Han`].
    pub fn ranges(self) -> &'static [(u32, u32)] {
        match self {
            Script::Latin => &[(0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x024F), (0x1E00, 0x1EFF)],
            Script::Arabic => &[(0x0600, 0x06FF), (0x0750, 0x077F), (0xFB50, 0xFDFF), (0xFE70, 0xFEFF)],
            Script::Cyrillic => &[(0x0400, 0x052F)],
            Script::Devanagari => &[(0x0900, 0x097F)],
            Script::Han => &[(0x3400, 0x4DBF), (0x4E00, 0x9FFF), (0xF900, 0xFAFF)],
            Script::Hangul => &[(0x1100, 0x11FF), (0x3130, 0x318F), (0xAC00, 0xD7AF)],
            Script::Japanese => &[(0x3040, 0x30FF), (0x31F0, 0x31FF)],
            Script::Thai => &[(0x0E00, 0x0E7F)],
            Script::Bengali => &[(0x0980, 0x09FF)],
            Script::Ethiopic => &[(0x1200, 0x139F)],
            Script::Georgian => &[(0x10A0, 0x10FF)],
            Script::Greek => &[(0x0370, 0x03FF), (0x1F00, 0x1FFF)],
            Script::Hebrew => &[(0x0590, 0x05FF)],
            Script::Tamil => &[(0x0B80, 0x0BFF)],
            Script::Telugu => &[(0x0C00, 0x0C7F)],
            Script::Khmer => &[(0x1780, 0x17FF)],
            Script::Lao => &[(0x0E80, 0x0EFF)],
            Script::Myanmar => &[(0x1000, 0x109F)],
            Script::Tibetan => &[(0x0F00, 0x0FFF)],
            Script::Gurmukhi => &[(0x0A00, 0x0A7F)],
            Script::Sinhala => &[(0x0D80, 0x0DFF)],
        }
    }

    /// Script of a letter, `None` for digits, punctuation, whitespace and
    /// anything outside the known blocks.
    pub fn of_char(c: char) -> Option<Script> {
        let cp = c as u32;
        Script::ALL
            .iter()
            .copied()
            .find(|s| s.ranges().iter().any(|&(lo, hi)| (lo..=hi).contains(&cp)))
    }

    pub fn is_rtl(self) -> bool {
        matches!(self, Script::Arabic | Script::Hebrew)
    }

    /// A representative letter, used to probe font coverage.
    pub fn sample_char(self) -> char {
        match self {
            Script::Latin => 'a',
            Script::Arabic => '\u{0627}',
            Script::Cyrillic => '\u{0434}',
            Script::Devanagari => '\u{0915}',
            Script::Han => '\u{4E2D}',
            Script::Hangul => '\u{D55C}',
            Script::Japanese => '\u{3042}',
            Script::Thai => '\u{0E01}',
            Script::Bengali => '\u{0995}',
            Script::Ethiopic => '\u{1200}',
            Script::Georgian => '\u{10D0}',
            Script::Greek => '\u{03B1}',
            Script::Hebrew => '\u{05D0}',
            Script::Tamil => '\u{0B95}',
            Script::Telugu => '\u{0C15}',
            Script::Khmer => '\u{1780}',
            Script::Lao => '\u{0E81}',
            Script::Myanmar => '\u{1000}',
            Script::Tibetan => '\u{0F40}',
            Script::Gurmukhi => '\u{0A15}',
            Script::Sinhala => '\u{0D9A}',
        }
    }
}

/// Resource tier, 1 (lowest) to 5 (highest). Tier 0 only occurs for
/// evaluation-only languages and is never aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tier(u8);

impl Tier {
    pub const T1: Tier = Tier(1);
    pub const T2: Tier = Tier(2);
    pub const T3: Tier = Tier(3);
    pub const T4: Tier = Tier(4);
    pub const T5: Tier = Tier(5);
    pub const RANKED: [Tier; 5] = [Tier::T1, Tier::T2, Tier::T3, Tier::T4, Tier::T5];

    pub const fn new(index: u8) -> Option<Tier> {
        if index <= 5 {
            Some(Tier(index))
        } else {
            None
        }
    }

    pub const fn index(self) -> u8 {
        self.0
    }

    pub fn is_ranked(self) -> bool {
        self.0 >= 1
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Language {
    pub code: &'static str,
    pub name: &'static str,
    pub script: Script,
    pub tier: Tier,
    /// Flores-200 tag used by the translation service.
    pub mt_code: Option<&'static str>,
    /// Counted among the non-Latin-script languages for OCR budgeting.
    pub non_latin: bool,
    /// Part of the 100 training languages (as opposed to evaluation-only).
    pub training: bool,
}

impl Language {
    pub fn is_english(&self) -> bool {
        self.code == ENGLISH
    }
}

/// Canonical iteration order: tier descending, then code ascending.
pub fn canonical_cmp(a: &Language, b: &Language) -> Ordering {
    b.tier.cmp(&a.tier).then_with(|| a.code.cmp(b.code))
}

pub const ENGLISH: &str = "en";

/// Codes that use the non-Latin OCR budget.
const NON_LATIN: [&str; 32] = [
    "am", "ar", "as", "azb", "be", "bg", "bn", "bo", "el", "fa", "he", "hi", "ja", "ka", "kk", "km", "ko",
    "lo", "mr", "my", "pa", "ru", "sa", "sd", "sr", "ta", "te", "th", "ti", "uk", "ur", "zh",
];

const fn lang(
    code: &'static str,
    name: &'static str,
    script: Script,
    tier: u8,
    mt_code: Option<&'static str>,
) -> Language {
    Language {
        code,
        name,
        script,
        tier: Tier(tier),
        mt_code,
        non_latin: false,
        training: true,
    }
}

const fn eval_only(code: &'static str, name: &'static str, script: Script, tier: u8) -> Language {
    Language {
        code,
        name,
        script,
        tier: Tier(tier),
        mt_code: None,
        non_latin: false,
        training: false,
    }
}

const TRAINING: [Language; 100] = [
    lang("ar", "Arabic", Script::Arabic, 5, Some("arb_Arab")),
    lang("zh", "Chinese", Script::Han, 5, Some("zho_Hant")),
    lang("en", "English", Script::Latin, 5, Some("eng_Latn")),
    lang("fr", "French", Script::Latin, 5, Some("fra_Latn")),
    lang("de", "German", Script::Latin, 5, Some("deu_Latn")),
    lang("ja", "Japanese", Script::Japanese, 5, Some("jpn_Jpan")),
    lang("es", "Spanish", Script::Latin, 5, Some("spa_Latn")),
    lang("eu", "Basque", Script::Latin, 4, Some("eus_Latn")),
    lang("ca", "Catalan", Script::Latin, 4, Some("cat_Latn")),
    lang("hr", "Croatian", Script::Latin, 4, Some("hrv_Latn")),
    lang("cs", "Czech", Script::Latin, 4, Some("ces_Latn")),
    lang("nl", "Dutch", Script::Latin, 4, Some("nld_Latn")),
    lang("fi", "Finnish", Script::Latin, 4, Some("fin_Latn")),
    lang("hi", "Hindi", Script::Devanagari, 4, Some("hin_Deva")),
    lang("hu", "Hungarian", Script::Latin, 4, Some("hun_Latn")),
    lang("it", "Italian", Script::Latin, 4, Some("ita_Latn")),
    lang("ko", "Korean", Script::Hangul, 4, Some("kor_Hang")),
    lang("fa", "Persian", Script::Arabic, 4, Some("pes_Arab")),
    lang("pl", "Polish", Script::Latin, 4, Some("pol_Latn")),
    lang("pt", "Portuguese", Script::Latin, 4, Some("por_Latn")),
    lang("ru", "Russian", Script::Cyrillic, 4, Some("rus_Cyrl")),
    lang("sr", "Serbian", Script::Cyrillic, 4, Some("srp_Cyrl")),
    lang("sv", "Swedish", Script::Latin, 4, Some("swe_Latn")),
    lang("tr", "Turkish", Script::Latin, 4, Some("tur_Latn")),
    lang("vi", "Vietnamese", Script::Latin, 4, Some("vie_Latn")),
    lang("af", "Afrikaans", Script::Latin, 3, Some("afr_Latn")),
    lang("bn", "Bangla", Script::Bengali, 3, Some("ben_Beng")),
    lang("be", "Belarusian", Script::Cyrillic, 3, Some("bel_Cyrl")),
    lang("bs", "Bosnian", Script::Latin, 3, Some("bos_Latn")),
    lang("bg", "Bulgarian", Script::Cyrillic, 3, Some("bul_Cyrl")),
    lang("ceb", "Cebuano", Script::Latin, 3, Some("ceb_Latn")),
    lang("da", "Danish", Script::Latin, 3, Some("dan_Latn")),
    lang("ar-eg", "Egyptian Arabic", Script::Arabic, 3, Some("arz_Arab")),
    lang("et", "Estonian", Script::Latin, 3, Some("est_Latn")),
    lang("gl", "Galician", Script::Latin, 3, Some("glg_Latn")),
    lang("ka", "Georgian", Script::Georgian, 3, Some("kat_Geor")),
    lang("el", "Greek", Script::Greek, 3, Some("ell_Grek")),
    lang("id", "Indonesian", Script::Latin, 3, Some("ind_Latn")),
    lang("kk", "Kazakh", Script::Cyrillic, 3, Some("kaz_Cyrl")),
    lang("la", "Latin", Script::Latin, 3, None),
    lang("lv", "Latvian", Script::Latin, 3, Some("lvs_Latn")),
    lang("lt", "Lithuanian", Script::Latin, 3, Some("lit_Latn")),
    lang("ms", "Malay", Script::Latin, 3, Some("zsm_Latn")),
    lang("ro", "Romanian", Script::Latin, 3, Some("ron_Latn")),
    lang("sk", "Slovak", Script::Latin, 3, Some("slk_Latn")),
    lang("sl", "Slovenian", Script::Latin, 3, Some("slv_Latn")),
    lang("tl", "Tagalog", Script::Latin, 3, Some("tgl_Latn")),
    lang("ta", "Tamil", Script::Tamil, 3, Some("tam_Taml")),
    lang("th", "Thai", Script::Thai, 3, Some("tha_Thai")),
    lang("uk", "Ukrainian", Script::Cyrillic, 3, Some("ukr_Cyrl")),
    lang("ur", "Urdu", Script::Arabic, 3, Some("urd_Arab")),
    lang("uz", "Uzbek", Script::Latin, 3, Some("uzn_Latn")),
    lang("he", "Hebrew", Script::Hebrew, 3, Some("heb_Hebr")),
    lang("am", "Amharic", Script::Ethiopic, 2, Some("amh_Ethi")),
    lang("ht", "Haitian", Script::Latin, 2, Some("hat_Latn")),
    lang("ha", "Hausa", Script::Latin, 2, Some("hau_Latn")),
    lang("is", "Icelandic", Script::Latin, 2, Some("isl_Latn")),
    lang("ga", "Irish", Script::Latin, 2, Some("gle_Latn")),
    lang("lo", "Lao", Script::Lao, 2, Some("lao_Laoo")),
    lang("mt", "Maltese", Script::Latin, 2, Some("mlt_Latn")),
    lang("mr", "Marathi", Script::Devanagari, 2, Some("mar_Deva")),
    lang("pa", "Punjabi", Script::Gurmukhi, 2, Some("pan_Guru")),
    lang("sa", "Sanskrit", Script::Devanagari, 2, Some("san_Deva")),
    lang("sw", "Swahili", Script::Latin, 2, Some("swh_Latn")),
    lang("ti", "Tigrinya", Script::Ethiopic, 2, Some("tir_Ethi")),
    lang("tn", "Tswana", Script::Latin, 2, Some("tsn_Latn")),
    lang("wo", "Wolof", Script::Latin, 2, Some("wol_Latn")),
    lang("xh", "Xhosa", Script::Latin, 2, Some("xho_Latn")),
    lang("yo", "Yoruba", Script::Latin, 2, Some("yor_Latn")),
    lang("zu", "Zulu", Script::Latin, 2, Some("zul_Latn")),
    lang("sq", "Albanian", Script::Latin, 1, Some("als_Latn")),
    lang("as", "Assamese", Script::Bengali, 1, Some("asm_Beng")),
    lang("azb", "Azerbaijani", Script::Arabic, 1, Some("azb_Arab")),
    lang("bm", "Bambara", Script::Latin, 1, Some("bam_Latn")),
    lang("my", "Burmese", Script::Myanmar, 1, Some("mya_Mymr")),
    lang("eo", "Esperanto", Script::Latin, 1, Some("epo_Latn")),
    lang("ig", "Igbo", Script::Latin, 1, Some("ibo_Latn")),
    lang("jv", "Javanese", Script::Latin, 1, Some("jav_Latn")),
    lang("km", "Khmer", Script::Khmer, 1, Some("khm_Khmr")),
    lang("ki", "Kikuyu", Script::Latin, 1, Some("kik_Latn")),
    lang("rw", "Kinyarwanda", Script::Latin, 1, Some("kin_Latn")),
    lang("ln", "Lingala", Script::Latin, 1, Some("lin_Latn")),
    lang("lb", "Luxembourgish", Script::Latin, 1, Some("ltz_Latn")),
    lang("mi", "Maori", Script::Latin, 1, Some("mri_Latn")),
    lang("no", "Norwegian", Script::Latin, 1, Some("nob_Latn")),
    lang("oc", "Occitan", Script::Latin, 1, Some("oci_Latn")),
    lang("qu", "Quechua", Script::Latin, 1, Some("quy_Latn")),
    lang("sm", "Samoan", Script::Latin, 1, Some("smo_Latn")),
    lang("sg", "Sango", Script::Latin, 1, Some("sag_Latn")),
    lang("sc", "Sardinian", Script::Latin, 1, Some("srd_Latn")),
    lang("gd", "Scottish Gaelic", Script::Latin, 1, Some("gla_Latn")),
    lang("sd", "Sindhi", Script::Arabic, 1, Some("snd_Arab")),
    lang("so", "Somali", Script::Latin, 1, Some("som_Latn")),
    lang("ss", "Swati", Script::Latin, 1, Some("ssw_Latn")),
    lang("te", "Telugu", Script::Telugu, 1, Some("tel_Telu")),
    lang("bo", "Tibetan", Script::Tibetan, 1, Some("bod_Tibt")),
    lang("tpi", "Tok Pisin", Script::Latin, 1, Some("tpi_Latn")),
    lang("ts", "Tsonga", Script::Latin, 1, Some("tso_Latn")),
    lang("tw", "Twi", Script::Latin, 1, Some("twi_Latn")),
    lang("war", "Waray", Script::Latin, 1, Some("war_Latn")),
];

/// Languages that appear in evaluation data but not in training.
const EVAL_ONLY: [Language; 10] = [
    eval_only("ber", "Berber", Script::Latin, 0),
    eval_only("br", "Breton", Script::Latin, 1),
    eval_only("fil", "Filipino", Script::Latin, 3),
    eval_only("kr", "Kanuri", Script::Latin, 0),
    eval_only("min", "Minangkabau", Script::Latin, 1),
    eval_only("mn", "Mongolian", Script::Cyrillic, 1),
    eval_only("om", "Oromo", Script::Latin, 1),
    eval_only("quz", "Cusco Quechua", Script::Latin, 1),
    eval_only("si", "Sinhala", Script::Sinhala, 0),
    eval_only("su", "Sundanese", Script::Latin, 1),
];

const ALIASES: [(&str, &str); 2] = [("iw", "he"), ("arz", "ar-eg")];

pub struct Registry {
    training: Vec<Language>,
    eval_only: Vec<Language>,
    index: HashMap<&'static str, (bool, usize)>,
}

impl Registry {
    pub fn global() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(Registry::build)
    }

    fn build() -> Registry {
        let mut training: Vec<Language> = TRAINING.to_vec();
        for l in &mut training {
            l.non_latin = NON_LATIN.contains(&l.code);
        }
        training.sort_by(canonical_cmp);
        let mut eval_only = EVAL_ONLY.to_vec();
        eval_only.sort_by(canonical_cmp);

        let mut index = HashMap::new();
        for (i, l) in training.iter().enumerate() {
            let prev = index.insert(l.code, (true, i));
            assert!(prev.is_none(), "duplicate language code {}", l.code);
        }
        for (i, l) in eval_only.iter().enumerate() {
            let prev = index.insert(l.code, (false, i));
            assert!(prev.is_none(), "duplicate language code {}", l.code);
        }
        Registry {
            training,
            eval_only,
            index,
        }
    }

    pub fn lookup(&self, code: &str) -> Result<&Language> {
        let code = ALIASES
            .iter()
            .find(|(alias, _)| *alias == code)
            .map_or(code, |(_, canonical)| canonical);
        match self.index.get(code) {
            Some(&(true, i)) => Ok(&self.training[i]),
            Some(&(false, i)) => Ok(&self.eval_only[i]),
            None => Err(Error::UnknownLanguage(code.to_owned())),
        }
    }

    pub fn english(&self) -> &Language {
        self.lookup(ENGLISH).expect("english is registered")
    }

    /// All 100 training languages in canonical order.
    pub fn training(&self) -> &[Language] {
        &self.training
    }

    pub fn eval_only(&self) -> &[Language] {
        &self.eval_only
    }

    /// Non-English training languages of a setup, in canonical order.
    pub fn expand_setup(&self, setup: LanguageSetup) -> Vec<&Language> {
        match setup.lowest_tier() {
            None => Vec::new(),
            Some(lowest) => self
                .training
                .iter()
                .filter(|l| !l.is_english() && l.tier >= lowest)
                .collect(),
        }
    }

    /// JSON array of the training registry for downstream tooling.
    pub fn export_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.training
                .iter()
                .map(|l| {
                    serde_json::json!({
                        "code": l.code,
                        "name": l.name,
                        "script": l.script,
                        "tier": l.tier,
                        "mt_code": l.mt_code,
                    })
                })
                .collect(),
        )
    }
}

/// Split languages into (Latin, non-Latin) by the OCR budget flag. Output
/// is deduplicated and canonically ordered.
pub fn script_partition<'a, I>(langs: I) -> (Vec<&'a Language>, Vec<&'a Language>)
where
    I: IntoIterator<Item = &'a Language>,
{
    let mut all: Vec<&Language> = langs.into_iter().collect();
    all.sort_by(|a, b| canonical_cmp(a, b));
    all.dedup_by(|a, b| a.code == b.code);
    all.into_iter().partition(|l| !l.non_latin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LanguageSetup {
    EnglishOnly,
    T5,
    T5T4,
    T5T3,
    T5T2,
    L100,
}

impl LanguageSetup {
    pub const ALL: [LanguageSetup; 6] = [
        LanguageSetup::EnglishOnly,
        LanguageSetup::T5,
        LanguageSetup::T5T4,
        LanguageSetup::T5T3,
        LanguageSetup::T5T2,
        LanguageSetup::L100,
    ];

    pub fn lowest_tier(self) -> Option<Tier> {
        match self {
            LanguageSetup::EnglishOnly => None,
            LanguageSetup::T5 => Some(Tier::T5),
            LanguageSetup::T5T4 => Some(Tier::T4),
            LanguageSetup::T5T3 => Some(Tier::T3),
            LanguageSetup::T5T2 => Some(Tier::T2),
            LanguageSetup::L100 => Some(Tier::T1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LanguageSetup::EnglishOnly => "english",
            LanguageSetup::T5 => "t5",
            LanguageSetup::T5T4 => "t5-t4",
            LanguageSetup::T5T3 => "t5-t3",
            LanguageSetup::T5T2 => "t5-t2",
            LanguageSetup::L100 => "l100",
        }
    }
}

impl fmt::Display for LanguageSetup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageSetup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match norm.as_str() {
            "english" | "en" | "englishonly" => LanguageSetup::EnglishOnly,
            "t5" => LanguageSetup::T5,
            "t5t4" => LanguageSetup::T5T4,
            "t5t3" => LanguageSetup::T5T3,
            "t5t2" => LanguageSetup::T5T2,
            "l100" => LanguageSetup::L100,
            _ => return Err(Error::Manifest(format!("unknown language setup `{s}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_known_codes() {
        let r = Registry::global();
        let de = r.lookup("de").unwrap();
        assert_eq!((de.tier, de.script), (Tier::T5, Script::Latin));
        let zu = r.lookup("zu").unwrap();
        assert_eq!((zu.tier, zu.script), (Tier::T2, Script::Latin));
        assert!(matches!(r.lookup("xx"), Err(Error::UnknownLanguage(c)) if c == "xx"));
    }

    #[test]
    fn aliases_resolve() {
        let r = Registry::global();
        assert_eq!(r.lookup("iw").unwrap().code, "he");
        assert_eq!(r.lookup("arz").unwrap().code, "ar-eg");
        assert_eq!(r.lookup("ar-eg").unwrap().mt_code, Some("arz_Arab"));
    }

    #[test]
    fn latin_has_no_mt_code() {
        assert_eq!(Registry::global().lookup("la").unwrap().mt_code, None);
    }

    #[test]
    fn registry_shape() {
        let r = Registry::global();
        assert_eq!(r.training().len(), 100);
        assert_eq!(r.training().iter().filter(|l| l.non_latin).count(), 32);
        let mut sizes = [0usize; 6];
        for l in r.training().iter().filter(|l| !l.is_english()) {
            sizes[l.tier.index() as usize] += 1;
        }
        assert_eq!(&sizes[1..], &[30, 17, 28, 18, 6]);
        // every non-Latin flag sits on a non-Latin script
        assert!(r.training().iter().filter(|l| l.non_latin).all(|l| l.script != Script::Latin));
    }

    #[test]
    fn t5_setup() {
        let codes: Vec<_> = Registry::global()
            .expand_setup(LanguageSetup::T5)
            .iter()
            .map(|l| l.code)
            .collect();
        assert_eq!(codes, ["ar", "de", "es", "fr", "ja", "zh"]);
    }

    #[test]
    fn setup_cardinalities() {
        let r = Registry::global();
        let sizes: Vec<_> = LanguageSetup::ALL.iter().map(|&s| r.expand_setup(s).len()).collect();
        assert_eq!(sizes, [0, 6, 24, 52, 69, 99]);
    }

    #[test]
    fn partition_counts() {
        let r = Registry::global();
        let (latin, non_latin) = script_partition(r.training());
        assert_eq!((latin.len(), non_latin.len()), (68, 32));
        let others = r.expand_setup(LanguageSetup::L100);
        let (latin, non_latin) = script_partition(others.iter().copied());
        assert_eq!((latin.len(), non_latin.len()), (67, 32));
        let zh = r.lookup("zh").unwrap();
        let (latin, non_latin) = script_partition([zh]);
        assert!(latin.is_empty());
        assert_eq!(non_latin[0].code, "zh");
    }

    #[test]
    fn script_of_char() {
        assert_eq!(Script::of_char('a'), Some(Script::Latin));
        assert_eq!(Script::of_char('\u{0E01}'), Some(Script::Thai));
        assert_eq!(Script::of_char('\u{4E2D}'), Some(Script::Han));
        assert_eq!(Script::of_char('7'), None);
        assert_eq!(Script::of_char(' '), None);
    }

    #[test]
    fn setup_parsing() {
        assert_eq!("T5-T4".parse::<LanguageSetup>().unwrap(), LanguageSetup::T5T4);
        assert_eq!("L100".parse::<LanguageSetup>().unwrap(), LanguageSetup::L100);
        assert!("T6".parse::<LanguageSetup>().is_err());
    }
}
