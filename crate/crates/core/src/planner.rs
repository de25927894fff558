//! Per-language sample budgets.
//!
//! Every weight is an exact rational. The non-English share of the budget
//! is distributed with the largest-remainder method, ties broken by the
//! canonical language order, so the plan always sums to the budget and is
//! independent of input order and platform.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::registry::{canonical_cmp, Language, LanguageSetup, Registry, ENGLISH};

/// e^1 .. e^5 to 30 significant digits, the only transcendental inputs of
/// the planner.
const EXP_TIER: [&str; 5] = [
    "2.71828182845904523536028747135",
    "7.38905609893065022723042746058",
    "20.0855369231876677409285296546",
    "54.5981500331442390781102612029",
    "148.413159102576603421115580041",
];

/// Parse a plain decimal literal (`"12.5"`, `"-0.25"`, `"3"`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

fn exp_tier(tier: u8) -> &'static BigRational {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        EXP_TIER
            .iter()
            .map(|s| parse_decimal(s).expect("valid constant"))
            .collect()
    });
    &table[tier as usize - 1]
}

/// Share of a budget kept in English, an exact rational in [0, 1].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnglishFraction(BigRational);

impl EnglishFraction {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidAllocation("fraction denominator is zero".into()));
        }
        Self::from_rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_rational(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::InvalidAllocation(format!(
                "english fraction {r} outside [0, 1]"
            )));
        }
        Ok(Self(r))
    }

    /// Exact value of a finite `f64`. Use [`FromStr`] for decimal input,
    /// since `0.1_f64` is not one tenth.
    pub fn from_f64(x: f64) -> Result<Self> {
        let r = BigRational::from_float(x)
            .ok_or_else(|| Error::InvalidAllocation(format!("english fraction {x} is not finite")))?;
        Self::from_rational(r)
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl FromStr for EnglishFraction {
    type Err = Error;

    /// Accepts `0.5`, `50%` and `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidAllocation(format!("cannot parse english fraction `{s}`"));
        let r = if let Some(pct) = s.strip_suffix('%') {
            parse_decimal(pct).ok_or_else(bad)? / BigRational::from_integer(100.into())
        } else if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n).ok_or_else(bad)?;
            let d = parse_decimal(d).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(bad());
            }
            n / d
        } else {
            parse_decimal(s).ok_or_else(bad)?
        };
        Self::from_rational(r)
    }
}

impl fmt::Display for EnglishFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionKind {
    Uniform,
    /// f(tier) = 1 / tier
    Stratified1,
    /// f(tier) = 1 / e^tier
    Stratified2,
    /// Fixed counts per language code, e.g. from a plan produced elsewhere.
    PerLanguageOverride(BTreeMap<String, u64>),
}

impl DistributionKind {
    fn describe(&self) -> String {
        match self {
            DistributionKind::Uniform => "uniform".into(),
            DistributionKind::Stratified1 => "stratified-1".into(),
            DistributionKind::Stratified2 => "stratified-2".into(),
            DistributionKind::PerLanguageOverride(m) => {
                let body: Vec<String> = m.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                format!("override({})", body.join(","))
            }
        }
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "uniform" => Ok(DistributionKind::Uniform),
            "stratified-1" | "stratified1" => Ok(DistributionKind::Stratified1),
            "stratified-2" | "stratified2" => Ok(DistributionKind::Stratified2),
            _ => Err(Error::Manifest(format!("unknown distribution `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AllocationSpec {
    pub budget: u64,
    pub english_fraction: EnglishFraction,
    pub languages: Vec<&'static Language>,
    pub distribution: DistributionKind,
}

impl AllocationSpec {
    pub fn for_setup(
        budget: u64,
        english_fraction: EnglishFraction,
        setup: LanguageSetup,
        distribution: DistributionKind,
    ) -> Self {
        Self {
            budget,
            english_fraction,
            languages: Registry::global().expand_setup(setup),
            distribution,
        }
    }

    /// Languages deduplicated, English removed, in canonical order.
    fn canonical_languages(&self) -> Vec<&'static Language> {
        let mut langs: Vec<&'static Language> = self
            .languages
            .iter()
            .copied()
            .filter(|l| !l.is_english())
            .collect();
        langs.sort_by(|a, b| canonical_cmp(a, b));
        langs.dedup_by(|a, b| a.code == b.code);
        langs
    }

    /// Stable digest of the spec, independent of language input order.
    pub fn digest(&self) -> String {
        let codes: Vec<&str> = self.canonical_languages().iter().map(|l| l.code).collect();
        let canonical = format!(
            "budget={};english={};languages={};distribution={}",
            self.budget,
            self.english_fraction,
            codes.join(","),
            self.distribution.describe()
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMethod {
    LargestRemainder,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub spec_hash: String,
    pub rounding: RoundingMethod,
}

/// Integer sample counts per language. Counts are kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixPlan {
    pub english: u64,
    counts: Vec<(&'static Language, u64)>,
    pub provenance: Provenance,
}

impl MixPlan {
    pub fn from_counts(
        english: u64,
        counts: impl IntoIterator<Item = (&'static Language, u64)>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut counts: Vec<_> = counts.into_iter().collect();
        counts.sort_by(|a, b| canonical_cmp(a.0, b.0));
        for pair in counts.windows(2) {
            if pair[0].0.code == pair[1].0.code {
                return Err(Error::InvalidAllocation(format!(
                    "language `{}` listed twice",
                    pair[0].0.code
                )));
            }
        }
        if let Some((l, _)) = counts.iter().find(|(l, _)| l.is_english()) {
            return Err(Error::InvalidAllocation(format!(
                "`{}` must be given as the english count",
                l.code
            )));
        }
        Ok(Self {
            english,
            counts,
            provenance,
        })
    }

    pub fn counts(&self) -> &[(&'static Language, u64)] {
        &self.counts
    }

    pub fn count(&self, code: &str) -> u64 {
        if code == ENGLISH {
            return self.english;
        }
        self.counts
            .iter()
            .find(|(l, _)| l.code == code)
            .map_or(0, |&(_, n)| n)
    }

    pub fn total(&self) -> u64 {
        self.english + self.counts.iter().map(|&(_, n)| n).sum::<u64>()
    }

    /// English first, then the other languages; zero counts included.
    pub fn entries(&self) -> impl Iterator<Item = (&'static Language, u64)> + '_ {
        std::iter::once((Registry::global().english(), self.english))
            .chain(self.counts.iter().copied())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes") + "\n"
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for MixPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Counts<'a>(&'a [(&'static Language, u64)]);
        impl Serialize for Counts<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (l, n) in self.0 {
                    map.serialize_entry(l.code, n)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("spec_hash", &self.provenance.spec_hash)?;
        map.serialize_entry("english", &self.english)?;
        map.serialize_entry("counts", &Counts(&self.counts))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for MixPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            spec_hash: String,
            english: u64,
            counts: BTreeMap<String, u64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let registry = Registry::global();
        let mut counts = Vec::with_capacity(raw.counts.len());
        for (code, n) in raw.counts {
            let lang = registry.lookup(&code).map_err(de::Error::custom)?;
            counts.push((lang, n));
        }
        MixPlan::from_counts(
            raw.english,
            counts,
            Provenance {
                spec_hash: raw.spec_hash,
                rounding: RoundingMethod::Fixed,
            },
        )
        .map_err(de::Error::custom)
    }
}

/// Exact weights over the non-English languages, in canonical order.
pub fn compute_weights(
    languages: &[&'static Language],
    distribution: &DistributionKind,
) -> Result<Vec<(&'static Language, BigRational)>> {
    let mut langs: Vec<&'static Language> = languages.to_vec();
    langs.sort_by(|a, b| canonical_cmp(a, b));
    langs.dedup_by(|a, b| a.code == b.code);
    if langs.is_empty() {
        return Err(Error::EmptyLanguageSet);
    }
    let raw: Vec<BigRational> = match distribution {
        DistributionKind::Uniform => vec![BigRational::one(); langs.len()],
        DistributionKind::Stratified1 | DistributionKind::Stratified2 => {
            let mut out = Vec::with_capacity(langs.len());
            for l in &langs {
                let tier = l.tier.index();
                if !l.tier.is_ranked() {
                    return Err(Error::InvalidAllocation(format!(
                        "`{}` has no resource tier",
                        l.code
                    )));
                }
                out.push(match distribution {
                    DistributionKind::Stratified1 => {
                        BigRational::new(BigInt::one(), BigInt::from(tier))
                    }
                    _ => exp_tier(tier).recip(),
                });
            }
            out
        }
        DistributionKind::PerLanguageOverride(_) => {
            return Err(Error::InvalidAllocation(
                "override distributions carry counts, not weights".into(),
            ))
        }
    };
    let total: BigRational = raw.iter().cloned().sum();
    Ok(langs.into_iter().zip(raw.into_iter().map(|w| w / &total)).collect())
}

fn round_half_even(r: &BigRational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    let twice: BigInt = &rem * 2;
    match twice.cmp(r.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("count fits in u64")
}

/// Split `total` proportionally to `weights` (which sum to one) with the
/// largest-remainder method. Ties go to the earlier entry.
pub fn largest_remainder(total: u64, weights: &[BigRational]) -> Vec<u64> {
    let total_r = BigRational::from_integer(total.into());
    let mut floors = Vec::with_capacity(weights.len());
    let mut remainders = Vec::with_capacity(weights.len());
    for w in weights {
        let quota = &total_r * w;
        let floor = quota.floor();
        remainders.push(&quota - &floor);
        floors.push(to_u64(&floor.to_integer()));
    }
    let assigned: u64 = floors.iter().sum();
    let leftover = total.saturating_sub(assigned) as usize;
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort keeps index order among equal remainders
    order.sort_by(|&a, &b| remainders[b].cmp(&remainders[a]));
    for &i in order.iter().take(leftover) {
        floors[i] += 1;
    }
    floors
}

pub fn allocate(spec: &AllocationSpec) -> Result<MixPlan> {
    let langs = spec.canonical_languages();
    let budget = spec.budget;
    let provenance = |rounding| Provenance {
        spec_hash: spec.digest(),
        rounding,
    };

    if let DistributionKind::PerLanguageOverride(map) = &spec.distribution {
        let registry = Registry::global();
        let mut counts = Vec::with_capacity(map.len());
        for (code, &n) in map {
            let lang = registry.lookup(code)?;
            if !langs.iter().any(|l| l.code == lang.code) {
                return Err(Error::InvalidAllocation(format!(
                    "override for `{code}` outside the language set"
                )));
            }
            counts.push((lang, n));
        }
        let assigned: u64 = counts.iter().map(|&(_, n)| n).sum();
        let english = budget.checked_sub(assigned).ok_or_else(|| {
            Error::InvalidAllocation(format!("overrides sum to {assigned}, budget is {budget}"))
        })?;
        for l in &langs {
            if !counts.iter().any(|(c, _)| c.code == l.code) {
                counts.push((l, 0));
            }
        }
        return MixPlan::from_counts(english, counts, provenance(RoundingMethod::Fixed));
    }

    let english_exact = BigRational::from_integer(budget.into()) * spec.english_fraction.as_rational();
    let english = to_u64(&round_half_even(&english_exact));
    let remaining = budget - english;

    if langs.is_empty() {
        if spec.english_fraction.is_one() || remaining == 0 {
            return MixPlan::from_counts(english, [], provenance(RoundingMethod::LargestRemainder));
        }
        return Err(Error::EmptyLanguageSet);
    }

    let weighted = compute_weights(&langs, &spec.distribution)?;
    let weights: Vec<BigRational> = weighted.iter().map(|(_, w)| w.clone()).collect();
    let shares = largest_remainder(remaining, &weights);
    MixPlan::from_counts(
        english,
        weighted.iter().map(|(l, _)| *l).zip(shares),
        provenance(RoundingMethod::LargestRemainder),
    )
}

pub const OCR_ENGLISH: u64 = 500_000;
pub const OCR_LATIN: u64 = 5_000;
pub const OCR_LATIN_DOWN: u64 = 2_500;
pub const OCR_NON_LATIN: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OcrMode {
    /// 500k English, 5k per Latin-script language, 10k per other script.
    CenturioDefault,
    /// `fraction` of `budget` in English, remainder uniform over the rest.
    PercentEnglish {
        fraction: EnglishFraction,
        budget: u64,
    },
    /// Latin-script budgets halved to 2.5k; non-Latin stays at 10k.
    LatinDown,
}

impl OcrMode {
    fn describe(&self) -> String {
        match self {
            OcrMode::CenturioDefault => "centurio-default".into(),
            OcrMode::PercentEnglish { fraction, budget } => {
                format!("percent-english({fraction},{budget})")
            }
            OcrMode::LatinDown => "latin-down".into(),
        }
    }
}

/// Synthetic OCR budgets over the given languages (normally all 100).
pub fn ocr_allocation(mode: &OcrMode, languages: &[&'static Language]) -> Result<MixPlan> {
    if let OcrMode::PercentEnglish { fraction, budget } = mode {
        return allocate(&AllocationSpec {
            budget: *budget,
            english_fraction: fraction.clone(),
            languages: languages.to_vec(),
            distribution: DistributionKind::Uniform,
        });
    }
    let latin = match mode {
        OcrMode::LatinDown => OCR_LATIN_DOWN,
        _ => OCR_LATIN,
    };
    let counts = languages
        .iter()
        .filter(|l| !l.is_english())
        .map(|l| (*l, if l.non_latin { OCR_NON_LATIN } else { latin }));
    let codes: Vec<&str> = languages.iter().map(|l| l.code).collect();
    let digest = Sha256::digest(format!("ocr={};languages={}", mode.describe(), codes.join(",")));
    let english = if languages.iter().any(|l| l.is_english()) {
        OCR_ENGLISH
    } else {
        0
    };
    let mut seen = std::collections::HashSet::new();
    let counts: Vec<_> = counts.filter(|(l, _)| seen.insert(l.code)).collect();
    MixPlan::from_counts(
        english,
        counts,
        Provenance {
            spec_hash: hex::encode(digest),
            rounding: RoundingMethod::Fixed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Tier;

    fn reg() -> &'static Registry {
        Registry::global()
    }

    fn frac(s: &str) -> EnglishFraction {
        s.parse().unwrap()
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!(frac("0.5"), EnglishFraction::new(1, 2).unwrap());
        assert_eq!(frac("50%"), EnglishFraction::new(1, 2).unwrap());
        assert_eq!(frac("1/3"), EnglishFraction::new(1, 3).unwrap());
        assert_eq!(frac("0.1"), EnglishFraction::new(1, 10).unwrap());
        assert!("1.3".parse::<EnglishFraction>().is_err());
        assert!("-0.1".parse::<EnglishFraction>().is_err());
        assert!("abc".parse::<EnglishFraction>().is_err());
        assert!(EnglishFraction::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn rounding_half_even() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(round_half_even(&r(5, 2)), 2.into());
        assert_eq!(round_half_even(&r(7, 2)), 4.into());
        assert_eq!(round_half_even(&r(7, 3)), 2.into());
        assert_eq!(round_half_even(&r(8, 3)), 3.into());
    }

    #[test]
    fn uniform_weights_l100() {
        let langs = reg().expand_setup(LanguageSetup::L100);
        let w = compute_weights(&langs, &DistributionKind::Uniform).unwrap();
        assert_eq!(w.len(), 99);
        assert!(w.iter().all(|(_, x)| *x == BigRational::new(1.into(), 99.into())));
    }

    #[test]
    fn weights_sum_to_one() {
        let langs = reg().expand_setup(LanguageSetup::L100);
        for d in [DistributionKind::Uniform, DistributionKind::Stratified1, DistributionKind::Stratified2] {
            let total: BigRational = compute_weights(&langs, &d).unwrap().into_iter().map(|(_, w)| w).sum();
            assert!(total.is_one());
        }
    }

    #[test]
    fn empty_language_set() {
        assert!(matches!(
            compute_weights(&[], &DistributionKind::Uniform),
            Err(Error::EmptyLanguageSet)
        ));
        let spec = AllocationSpec {
            budget: 10,
            english_fraction: frac("0.5"),
            languages: vec![],
            distribution: DistributionKind::Uniform,
        };
        assert!(matches!(allocate(&spec), Err(Error::EmptyLanguageSet)));
        let spec = AllocationSpec {
            english_fraction: EnglishFraction::one(),
            ..spec
        };
        assert_eq!(allocate(&spec).unwrap().english, 10);
    }

    #[test]
    fn stratification_is_tier_monotone() {
        let langs = reg().expand_setup(LanguageSetup::L100);
        for d in [DistributionKind::Stratified1, DistributionKind::Stratified2] {
            let w = compute_weights(&langs, &d).unwrap();
            let of = |t: Tier| -> Vec<BigRational> {
                w.iter().filter(|(l, _)| l.tier == t).map(|(_, x)| x.clone()).collect()
            };
            for pair in Tier::RANKED.windows(2) {
                let lower = of(pair[0]);
                let higher = of(pair[1]);
                assert!(lower.iter().min() > higher.iter().max());
            }
        }
    }

    #[test]
    fn l100_half_english() {
        let plan = allocate(&AllocationSpec::for_setup(
            766_000,
            frac("0.5"),
            LanguageSetup::L100,
            DistributionKind::Uniform,
        ))
        .unwrap();
        assert_eq!(plan.english, 383_000);
        assert_eq!(plan.counts().len(), 99);
        assert!(plan.counts().iter().all(|&(_, n)| n == 3868 || n == 3869));
        assert_eq!(plan.total(), 766_000);
        // 383000 = 99 * 3868 + 68: the first 68 canonical languages get the extra sample
        let extra: Vec<_> = plan.counts().iter().take_while(|&&(_, n)| n == 3869).collect();
        assert_eq!(extra.len(), 68);
    }

    #[test]
    fn all_english() {
        let plan = allocate(&AllocationSpec::for_setup(
            766_000,
            EnglishFraction::one(),
            LanguageSetup::L100,
            DistributionKind::Uniform,
        ))
        .unwrap();
        assert_eq!(plan.english, 766_000);
        assert!(plan.counts().iter().all(|&(_, n)| n == 0));
    }

    #[test]
    fn t5_half_english() {
        let plan = allocate(&AllocationSpec::for_setup(
            766_000,
            frac("0.5"),
            LanguageSetup::T5,
            DistributionKind::Uniform,
        ))
        .unwrap();
        assert_eq!(plan.counts().len(), 6);
        assert!(plan.counts().iter().all(|&(_, n)| n == 63_833 || n == 63_834));
        assert_eq!(plan.total(), 766_000);
    }

    #[test]
    fn override_plan() {
        let mut m = BTreeMap::new();
        m.insert("de".to_string(), 1);
        let spec = AllocationSpec {
            budget: 3,
            english_fraction: EnglishFraction::zero(),
            languages: vec![reg().lookup("de").unwrap()],
            distribution: DistributionKind::PerLanguageOverride(m.clone()),
        };
        let plan = allocate(&spec).unwrap();
        assert_eq!((plan.english, plan.count("de")), (2, 1));

        m.insert("fr".to_string(), 1);
        let bad = AllocationSpec {
            distribution: DistributionKind::PerLanguageOverride(m),
            ..spec
        };
        assert!(matches!(allocate(&bad), Err(Error::InvalidAllocation(_))));
    }

    #[test]
    fn ocr_modes() {
        let all: Vec<_> = reg().training().iter().collect();
        let plan = ocr_allocation(&OcrMode::CenturioDefault, &all).unwrap();
        assert_eq!(plan.total(), 1_155_000);
        assert_eq!(plan.count("de"), 5_000);
        assert_eq!(plan.count("th"), 10_000);

        let down = ocr_allocation(&OcrMode::LatinDown, &all).unwrap();
        assert_eq!(down.count("de"), 2_500);
        assert_eq!(down.count("th"), 10_000);
        assert_eq!(down.english, 500_000);

        let pct = ocr_allocation(
            &OcrMode::PercentEnglish {
                fraction: frac("0.01"),
                budget: 500_000,
            },
            &all,
        )
        .unwrap();
        assert_eq!(pct.english, 5_000);
        assert_eq!(pct.total(), 500_000);
        assert_eq!(pct.counts().len(), 99);
    }

    #[test]
    fn json_layout() {
        let plan = allocate(&AllocationSpec::for_setup(
            12,
            frac("0.5"),
            LanguageSetup::T5,
            DistributionKind::Uniform,
        ))
        .unwrap();
        let s = plan.to_json_string();
        let expected = format!(
            "{{\n  \"spec_hash\": \"{}\",\n  \"english\": 6,\n  \"counts\": {{\n    \"ar\": 1,\n    \"de\": 1,\n    \"es\": 1,\n    \"fr\": 1,\n    \"ja\": 1,\n    \"zh\": 1\n  }}\n}}\n",
            plan.provenance.spec_hash
        );
        assert_eq!(s, expected);
        let back = MixPlan::from_json_str(&s).unwrap();
        assert_eq!(back.counts(), plan.counts());
        assert_eq!(back.to_json_string(), s);
    }

    #[test]
    fn json_rejects_unknown_language() {
        let s = r#"{"spec_hash":"x","english":1,"counts":{"xx":1}}"#;
        assert!(MixPlan::from_json_str(s).is_err());
    }
}
