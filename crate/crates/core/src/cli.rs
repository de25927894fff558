//! Command-line front end.
//!
//! Every invocation compiles into a [`RunManifest`]. The manifest is
//! validated before anything is written, outputs are produced in a staging
//! location and promoted only on success, and each output carries the
//! manifest that produced it plus a provenance record.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{self, BuiltinLid, Gold, LanguageIdentifier, Prediction, ScoreReport};
use crate::font::Fonts;
use crate::ocr;
use crate::planner::{allocate, ocr_allocation, AllocationSpec, DistributionKind, EnglishFraction, MixPlan, OcrMode};
use crate::registry::{Language, LanguageSetup, Registry};
use crate::smpqa::{self, Templates, WordList};
use crate::translate::{
    Assignment, CachedTranslator, DatasetDescriptor, HttpConfig, HttpTranslator, MockTranslator, TranslationCache,
    TranslationOutput, Translator,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "lingomix", version, about = "Multilingual training-mix and evaluation data tooling")]
struct Cli {
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory (or a `.json` file for `plan` and `score`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run from a manifest file; flags above override its values.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute a training mix plan.
    Plan(PlanArgs),
    /// Generate the synthetic plot QA benchmark.
    SmpqaGen(SmpqaArgs),
    /// Generate synthetic OCR samples for a plan.
    OcrGen(OcrArgs),
    /// Translate a dataset according to a plan.
    Translate(TranslateArgs),
    /// Score predictions against gold answers.
    Score(ScoreArgs),
    /// Render a score report as a text table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long)]
    budget: Option<u64>,
    /// English share: `0.5`, `50%` or `1/2`.
    #[arg(long)]
    english: Option<String>,
    /// english, t5, t5-t4, t5-t3, t5-t2 or l100.
    #[arg(long)]
    setup: Option<String>,
    /// Comma-separated codes; replaces --setup.
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    /// uniform, stratified-1 or stratified-2.
    #[arg(long = "dist")]
    distribution: Option<String>,
    /// OCR budget mode: centurio-default or latin-down.
    #[arg(long)]
    ocr: Option<String>,
}

#[derive(Debug, Args)]
struct SmpqaArgs {
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    /// Directory of `<code>.txt` word lists (default: bundled lists).
    #[arg(long)]
    wordlists: Option<PathBuf>,
    /// Directory of .ttf/.otf fonts (default: built-in block font).
    #[arg(long)]
    fonts: Option<PathBuf>,
    /// Directory of `<code>.json` question template overrides.
    #[arg(long)]
    templates: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OcrArgs {
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Directory of `<code>.txt` corpora.
    #[arg(long)]
    corpora: Option<PathBuf>,
    /// Directory of background images.
    #[arg(long)]
    backgrounds: Option<PathBuf>,
    /// Use this many procedural noise backgrounds instead of --backgrounds.
    #[arg(long)]
    noise_backgrounds: Option<u32>,
    #[arg(long)]
    fonts: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TranslateArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    plan: Option<PathBuf>,
    /// partition or duplicate.
    #[arg(long)]
    mode: Option<String>,
    /// Use the offline mock translator.
    #[arg(long)]
    mock: bool,
    /// Service URL (env LINGOMIX_MT_ENDPOINT).
    #[arg(long)]
    endpoint: Option<String>,
    /// Model id recorded in cache keys (env LINGOMIX_MT_MODEL).
    #[arg(long)]
    model_id: Option<String>,
    #[arg(long)]
    max_in_flight: Option<usize>,
    #[arg(long)]
    retries: Option<u32>,
    /// Cache directory (env LINGOMIX_CACHE_DIR, default `.lingomix-cache`).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    pred: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Skip language-fidelity measurement.
    #[arg(long)]
    no_fidelity: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// A report.json written by `score`.
    #[arg(long)]
    input: Option<PathBuf>,
}

/// A complete, replayable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: CommandName,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smpqa: Option<SmpqaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ocr: Option<OcrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<TranslateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Plan,
    SmpqaGen,
    OcrGen,
    Translate,
    Score,
    Report,
}

/// A fraction given either as a JSON number or a string such as `"1/3"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FractionValue {
    Number(f64),
    Text(String),
}

impl FractionValue {
    fn parse(&self) -> Result<EnglishFraction> {
        let text = match self {
            // shortest round-trip decimal, so 0.1 means exactly 1/10
            FractionValue::Number(x) if x.is_finite() => format!("{x}"),
            FractionValue::Number(x) => return Err(Error::Manifest(format!("english_fraction {x} is not finite"))),
            FractionValue::Text(s) => s.clone(),
        };
        text.parse()
            .map_err(|_| Error::Manifest(format!("english_fraction `{text}` must be a fraction in [0, 1]")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub english_fraction: Option<FractionValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub languages: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ocr: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmpqaSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub languages: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wordlists: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fonts: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcrSection {
    pub plan: PathBuf,
    pub corpora: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backgrounds: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_backgrounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fonts: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateSection {
    pub dataset: PathBuf,
    pub plan: PathBuf,
    #[serde(default)]
    pub mode: Assignment,
    #[serde(default)]
    pub mock: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_in_flight: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retries: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreSection {
    pub pred: PathBuf,
    pub gold: PathBuf,
    #[serde(default = "yes")]
    pub fidelity: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub input: PathBuf,
}

fn missing(flag: &str) -> Error {
    Error::Manifest(format!("missing required `{flag}`"))
}

impl RunManifest {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Manifest(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    /// Everything that can be checked without touching the file system.
    pub fn validate(&self) -> Result<()> {
        let sections = [
            (CommandName::Plan, self.plan.is_some()),
            (CommandName::SmpqaGen, self.smpqa.is_some()),
            (CommandName::OcrGen, self.ocr.is_some()),
            (CommandName::Translate, self.translate.is_some()),
            (CommandName::Score, self.score.is_some()),
            (CommandName::Report, self.report.is_some()),
        ];
        for (name, present) in sections {
            if present && name != self.command {
                return Err(Error::Manifest(format!(
                    "section for {name:?} given but command is {:?}",
                    self.command
                )));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::Manifest("jobs must be at least 1".into()));
        }
        match self.command {
            CommandName::Plan => {
                plan_job(self.plan.as_ref().ok_or_else(|| missing("plan"))?)?;
            }
            CommandName::SmpqaGen => {
                smpqa_languages(self.smpqa.as_ref())?;
            }
            CommandName::OcrGen => {
                let o = self.ocr.as_ref().ok_or_else(|| missing("ocr"))?;
                if o.backgrounds.is_none() && o.noise_backgrounds.unwrap_or(0) == 0 {
                    return Err(Error::Manifest("ocr needs `backgrounds` or `noise_backgrounds`".into()));
                }
            }
            CommandName::Translate => {
                let t = self.translate.as_ref().ok_or_else(|| missing("translate"))?;
                if !t.mock && t.endpoint.is_none() {
                    return Err(Error::Manifest("translate needs `endpoint` or `mock`".into()));
                }
                if t.max_in_flight == Some(0) {
                    return Err(Error::Manifest("max_in_flight must be at least 1".into()));
                }
            }
            CommandName::Score => {
                self.score.as_ref().ok_or_else(|| missing("score"))?;
            }
            CommandName::Report => {
                self.report.as_ref().ok_or_else(|| missing("report"))?;
            }
        }
        if self.command != CommandName::Report && self.out.is_none() {
            return Err(missing("out"));
        }
        Ok(())
    }
}

enum PlanJob {
    Alloc(AllocationSpec),
    Ocr(OcrMode, Vec<&'static Language>),
}

fn lookup_all(codes: &[String]) -> Result<Vec<&'static Language>> {
    codes.iter().map(|c| Registry::global().lookup(c.trim())).collect()
}

fn plan_job(p: &PlanSection) -> Result<PlanJob> {
    let languages = match (&p.languages, &p.setup) {
        (Some(codes), _) => lookup_all(codes)?,
        (None, Some(setup)) => Registry::global().expand_setup(setup.parse::<LanguageSetup>()?),
        (None, None) => Registry::global().expand_setup(LanguageSetup::L100),
    };
    if let Some(mode) = &p.ocr {
        let mode = match mode.as_str() {
            "centurio-default" | "default" => OcrMode::CenturioDefault,
            "latin-down" => OcrMode::LatinDown,
            other => return Err(Error::Manifest(format!("unknown ocr mode `{other}`"))),
        };
        let mut langs = languages;
        langs.push(Registry::global().english());
        return Ok(PlanJob::Ocr(mode, langs));
    }
    let budget = p.budget.ok_or_else(|| missing("budget"))?;
    let distribution = match &p.overrides {
        Some(o) => DistributionKind::PerLanguageOverride(o.clone()),
        None => p.distribution.as_deref().unwrap_or("uniform").parse()?,
    };
    let english_fraction = match &p.english_fraction {
        Some(f) => f.parse()?,
        None if p.overrides.is_some() => EnglishFraction::zero(),
        None => return Err(missing("english_fraction")),
    };
    Ok(PlanJob::Alloc(AllocationSpec {
        budget,
        english_fraction,
        languages,
        distribution,
    }))
}

fn smpqa_languages(s: Option<&SmpqaSection>) -> Result<Vec<&'static Language>> {
    match s.and_then(|s| s.languages.as_ref()) {
        Some(codes) => lookup_all(codes),
        None => smpqa::DEFAULT_LANGUAGES
            .iter()
            .map(|c| Registry::global().lookup(c))
            .collect(),
    }
}

fn manifest_from_cli(cli: Cli) -> Result<RunManifest> {
    let mut m = match (&cli.manifest, &cli.command) {
        (Some(_), Some(_)) => {
            return Err(Error::Manifest("give either --manifest or a subcommand, not both".into()));
        }
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            RunManifest::from_json_str(&text)?
        }
        (None, Some(cmd)) => compile(cmd)?,
        (None, None) => return Err(Error::Manifest("no subcommand given; see --help".into())),
    };
    if let Some(seed) = cli.seed {
        m.seed = seed;
    }
    if cli.jobs.is_some() {
        m.jobs = cli.jobs;
    }
    if cli.out.is_some() {
        m.out = cli.out;
    }
    Ok(m)
}

fn env_or(flag: Option<String>, var: &str) -> Option<String> {
    flag.or_else(|| std::env::var(var).ok().filter(|v| !v.is_empty()))
}

/// Compile subcommand flags into a manifest.
fn compile(cmd: &Cmd) -> Result<RunManifest> {
    let mut m = RunManifest {
        command: CommandName::Plan,
        seed: 0,
        jobs: None,
        out: None,
        plan: None,
        smpqa: None,
        ocr: None,
        translate: None,
        score: None,
        report: None,
    };
    match cmd {
        Cmd::Plan(a) => {
            m.plan = Some(PlanSection {
                budget: a.budget,
                english_fraction: a.english.clone().map(FractionValue::Text),
                setup: a.setup.clone(),
                languages: a.languages.clone(),
                distribution: a.distribution.clone(),
                overrides: None,
                ocr: a.ocr.clone(),
            });
        }
        Cmd::SmpqaGen(a) => {
            m.command = CommandName::SmpqaGen;
            m.smpqa = Some(SmpqaSection {
                languages: a.languages.clone(),
                wordlists: a.wordlists.clone(),
                fonts: a.fonts.clone(),
                templates: a.templates.clone(),
            });
        }
        Cmd::OcrGen(a) => {
            m.command = CommandName::OcrGen;
            m.ocr = Some(OcrSection {
                plan: a.plan.clone().ok_or_else(|| missing("--plan"))?,
                corpora: a.corpora.clone().ok_or_else(|| missing("--corpora"))?,
                backgrounds: a.backgrounds.clone(),
                noise_backgrounds: a.noise_backgrounds,
                fonts: a.fonts.clone(),
            });
        }
        Cmd::Translate(a) => {
            m.command = CommandName::Translate;
            let mode = match a.mode.as_deref() {
                None | Some("partition") => Assignment::Partition,
                Some("duplicate") => Assignment::Duplicate,
                Some(other) => return Err(Error::Manifest(format!("unknown mode `{other}`"))),
            };
            m.translate = Some(TranslateSection {
                dataset: a.dataset.clone().ok_or_else(|| missing("--dataset"))?,
                plan: a.plan.clone().ok_or_else(|| missing("--plan"))?,
                mode,
                mock: a.mock,
                endpoint: if a.mock {
                    None
                } else {
                    env_or(a.endpoint.clone(), "LINGOMIX_MT_ENDPOINT")
                },
                model_id: env_or(a.model_id.clone(), "LINGOMIX_MT_MODEL"),
                max_in_flight: a.max_in_flight,
                retries: a.retries,
                cache_dir: a
                    .cache_dir
                    .clone()
                    .or_else(|| env_or(None, "LINGOMIX_CACHE_DIR").map(PathBuf::from)),
            });
        }
        Cmd::Score(a) => {
            m.command = CommandName::Score;
            m.score = Some(ScoreSection {
                pred: a.pred.clone().ok_or_else(|| missing("--pred"))?,
                gold: a.gold.clone().ok_or_else(|| missing("--gold"))?,
                fidelity: !a.no_fidelity,
            });
        }
        Cmd::Report(a) => {
            m.command = CommandName::Report;
            m.report = Some(ReportSection {
                input: a.input.clone().ok_or_else(|| missing("--input"))?,
            });
        }
    }
    Ok(m)
}

/// SHA-256 of a file, or of every file below a directory (sorted by
/// relative path).
pub fn digest_path(path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, path, &mut files)?;
        files.sort();
        for rel in files {
            let bytes = fs::read(path.join(&rel)).map_err(|e| Error::io(path.join(&rel), e))?;
            h.update(rel.to_string_lossy().as_bytes());
            h.update([0]);
            h.update(Sha256::digest(&bytes));
        }
    } else {
        h.update(fs::read(path).map_err(|e| Error::io(path, e))?);
    }
    Ok(hex::encode(h.finalize()))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else {
            out.push(path.strip_prefix(root).expect("below root").to_path_buf());
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: CommandName,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
}

/// Where outputs go before promotion.
enum Target {
    /// A directory replaced as a whole.
    Dir { final_dir: PathBuf, staging: PathBuf },
    /// A single JSON file; provenance goes next to it.
    File { final_file: PathBuf, staging: PathBuf },
}

impl Target {
    fn new(out: &Path, allow_file: bool) -> Result<Self> {
        let is_file = allow_file && out.extension().is_some_and(|e| e == "json");
        let parent = match out.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
        let name = out
            .file_name()
            .ok_or_else(|| Error::Manifest(format!("bad output path {}", out.display())))?
            .to_string_lossy()
            .into_owned();
        let staging = parent.join(format!(".{name}.staging-{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        }
        fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        if is_file {
            Ok(Target::File {
                final_file: out.to_path_buf(),
                staging,
            })
        } else {
            if out.exists() && !is_replaceable(out) {
                let _ = fs::remove_dir_all(&staging);
                return Err(Error::Manifest(format!(
                    "{} exists and was not written by this tool; refusing to replace it",
                    out.display()
                )));
            }
            Ok(Target::Dir {
                final_dir: out.to_path_buf(),
                staging,
            })
        }
    }

    fn dir(&self) -> &Path {
        match self {
            Target::Dir { staging, .. } | Target::File { staging, .. } => staging,
        }
    }

    /// Path of the primary output file in file mode.
    fn primary(&self, default_name: &str) -> PathBuf {
        match self {
            Target::File { staging, final_file } => {
                staging.join(final_file.file_name().expect("file name checked"))
            }
            Target::Dir { staging, .. } => staging.join(default_name),
        }
    }

    fn promote(self) -> Result<PathBuf> {
        match self {
            Target::Dir { final_dir, staging } => {
                if final_dir.exists() {
                    fs::remove_dir_all(&final_dir).map_err(|e| Error::io(&final_dir, e))?;
                }
                fs::rename(&staging, &final_dir).map_err(|e| Error::io(&final_dir, e))?;
                Ok(final_dir)
            }
            Target::File { final_file, staging } => {
                let name = final_file.file_name().expect("file name checked").to_string_lossy().into_owned();
                let stem = name.trim_end_matches(".json");
                let parent = final_file.parent().map(Path::to_path_buf).unwrap_or_default();
                for entry in fs::read_dir(&staging).map_err(|e| Error::io(&staging, e))? {
                    let src = entry.map_err(|e| Error::io(&staging, e))?.path();
                    let file = src.file_name().expect("entry name").to_string_lossy().into_owned();
                    let dest = if file == name {
                        final_file.clone()
                    } else {
                        parent.join(format!("{stem}.{file}"))
                    };
                    fs::rename(&src, &dest).map_err(|e| Error::io(&dest, e))?;
                }
                fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
                Ok(final_file)
            }
        }
    }

    fn abandon(self) {
        let _ = fs::remove_dir_all(self.dir());
    }
}

fn is_replaceable(dir: &Path) -> bool {
    match fs::read_dir(dir) {
        Ok(mut entries) => entries.next().is_none() || dir.join("provenance.json").is_file(),
        Err(_) => false,
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn init_logging() {
    let level = std::env::var("LINGOMIX_LOG")
        .ok()
        .and_then(|v| v.parse::<tracing::Level>().ok())
        .unwrap_or(tracing::Level::INFO);
    let _ = tracing_subscriber::fmt()
        .json()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .with_current_span(false)
        .try_init();
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match manifest_from_cli(cli).and_then(|m| {
        m.validate()?;
        execute(&m)
    }) {
        Ok(summary) => {
            if !summary.is_empty() {
                println!("{summary}");
            }
            0
        }
        Err(e) => {
            tracing::error!(error = %e, exit_code = e.exit_code(), "run failed");
            e.exit_code()
        }
    }
}

/// Run a validated manifest; returns the stdout summary.
pub fn execute(m: &RunManifest) -> Result<String> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = m.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Manifest(format!("thread pool: {e}")))?;
    pool.install(|| match m.command {
        CommandName::Report => run_report(m),
        _ => {
            let out = m.out.as_deref().ok_or_else(|| missing("out"))?;
            let allow_file = matches!(m.command, CommandName::Plan | CommandName::Score);
            let target = Target::new(out, allow_file)?;
            match run_staged(m, &target) {
                Ok((summary, inputs)) => {
                    let prov = Provenance {
                        tool: "lingomix".into(),
                        version: VERSION.into(),
                        command: m.command,
                        seed: m.seed,
                        inputs,
                    };
                    write(&target.dir().join("provenance.json"), serde_json::to_string_pretty(&prov)? + "\n")?;
                    write(&target.dir().join("run.json"), m.to_json_string())?;
                    let dest = target.promote()?;
                    tracing::info!(command = ?m.command, out = %dest.display(), "done");
                    Ok(summary)
                }
                Err(e) => {
                    target.abandon();
                    Err(e)
                }
            }
        }
    })
}

type Staged = (String, BTreeMap<String, String>);

fn run_staged(m: &RunManifest, target: &Target) -> Result<Staged> {
    match m.command {
        CommandName::Plan => run_plan(m.plan.as_ref().expect("validated"), target),
        CommandName::SmpqaGen => run_smpqa(m, target),
        CommandName::OcrGen => run_ocr(m, target),
        CommandName::Translate => run_translate(m, target),
        CommandName::Score => run_score(m.score.as_ref().expect("validated"), target),
        CommandName::Report => unreachable!("report is not staged"),
    }
}

fn input(inputs: &mut BTreeMap<String, String>, path: &Path) -> Result<()> {
    inputs.insert(path.display().to_string(), digest_path(path)?);
    Ok(())
}

fn run_plan(p: &PlanSection, target: &Target) -> Result<Staged> {
    let plan = match plan_job(p)? {
        PlanJob::Alloc(spec) => allocate(&spec)?,
        PlanJob::Ocr(mode, langs) => ocr_allocation(&mode, &langs)?,
    };
    write(&target.primary("plan.json"), plan.to_json_string())?;
    let nonzero = plan.counts().iter().filter(|(_, n)| *n > 0).count();
    Ok((
        format!("plan: english={} languages={} total={}", plan.english, nonzero, plan.total()),
        BTreeMap::new(),
    ))
}

fn load_fonts(dir: Option<&Path>, inputs: &mut BTreeMap<String, String>) -> Result<Fonts> {
    match dir {
        Some(d) => {
            input(inputs, d)?;
            Fonts::load_dir(d)
        }
        None => Ok(Fonts::builtin()),
    }
}

fn run_smpqa(m: &RunManifest, target: &Target) -> Result<Staged> {
    let s = m.smpqa.clone().unwrap_or_default();
    let mut inputs = BTreeMap::new();
    let fonts = load_fonts(s.fonts.as_deref(), &mut inputs)?;
    for dir in [&s.wordlists, &s.templates].into_iter().flatten() {
        input(&mut inputs, dir)?;
    }
    let langs = smpqa_languages(Some(&s))?;
    let mut lines = Vec::new();
    for lang in langs {
        let wordlist = match &s.wordlists {
            Some(dir) => WordList::from_file(&dir.join(format!("{}.txt", lang.code)))?,
            None => WordList::builtin(lang.code).ok_or_else(|| {
                Error::Manifest(format!("no bundled word list for `{}`; pass --wordlists", lang.code))
            })?,
        };
        let templates = match &s.templates {
            Some(dir) => Templates::load(dir, lang.code)?,
            None => Templates::english(),
        };
        let ds = smpqa::generate_dataset(lang, &wordlist, m.seed, &fonts, &templates)?;
        ds.write(target.dir(), &fonts)?;
        lines.push(format!(
            "{}: {} plots, {} reading, {} grounding",
            lang.code, ds.manifest.plots, ds.manifest.reading, ds.manifest.grounding
        ));
    }
    Ok((lines.join("\n"), inputs))
}

fn read_plan(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<MixPlan> {
    input(inputs, path)?;
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MixPlan::from_json_str(&text).map_err(|e| match e {
        Error::Json(j) => Error::Manifest(format!("{}: {j}", path.display())),
        other => other,
    })
}

fn run_ocr(m: &RunManifest, target: &Target) -> Result<Staged> {
    let o = m.ocr.as_ref().expect("validated");
    let mut inputs = BTreeMap::new();
    let plan = read_plan(&o.plan, &mut inputs)?;
    input(&mut inputs, &o.corpora)?;
    let corpora = ocr::load_corpora(&o.corpora)?;
    let backgrounds = match &o.backgrounds {
        Some(dir) => {
            input(&mut inputs, dir)?;
            ocr::load_backgrounds(dir)?
        }
        None => (0..o.noise_backgrounds.unwrap_or(0) as u64)
            .map(|i| ocr::noise_background(m.seed, i, 640, 480))
            .collect(),
    };
    let fonts = load_fonts(o.fonts.as_deref(), &mut inputs)?;
    let manifest = ocr::build_ocr_dataset(&plan, &corpora, &backgrounds, &fonts, m.seed, target.dir())?;
    Ok((
        format!("ocr: {} samples, content hash {}", manifest.total, manifest.content_hash),
        inputs,
    ))
}

fn run_translate(m: &RunManifest, target: &Target) -> Result<Staged> {
    let t = m.translate.as_ref().expect("validated");
    let mut inputs = BTreeMap::new();
    let plan = read_plan(&t.plan, &mut inputs)?;
    input(&mut inputs, &t.dataset)?;
    let raw = fs::read(&t.dataset).map_err(|e| Error::io(&t.dataset, e))?;
    let dataset: DatasetDescriptor =
        serde_json::from_slice(&raw).map_err(|e| Error::Manifest(format!("{}: {e}", t.dataset.display())))?;
    let cache = TranslationCache::open(t.cache_dir.as_deref().unwrap_or(Path::new(".lingomix-cache")))?;
    let in_flight = t.max_in_flight.unwrap_or(4);
    if t.mock {
        let tr = CachedTranslator::new(MockTranslator::new(), cache, in_flight);
        finish_translate(m.seed, t, &dataset, &raw, &plan, &tr, target, inputs)
    } else {
        let config = HttpConfig {
            endpoint: t.endpoint.clone().ok_or_else(|| missing("endpoint"))?,
            model_id: t.model_id.clone().unwrap_or_else(|| "nllb".into()),
            retries: t.retries.unwrap_or(4),
            backoff_ms: 500,
            timeout_s: 120,
        };
        let tr = CachedTranslator::new(HttpTranslator::new(config)?, cache, in_flight);
        finish_translate(m.seed, t, &dataset, &raw, &plan, &tr, target, inputs)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_translate<T: Translator>(
    seed: u64,
    t: &TranslateSection,
    dataset: &DatasetDescriptor,
    raw: &[u8],
    plan: &MixPlan,
    tr: &CachedTranslator<T>,
    target: &Target,
    inputs: BTreeMap<String, String>,
) -> Result<Staged> {
    let summary = match crate::translate::translate_dataset(dataset, plan, seed, t.mode, tr)? {
        TranslationOutput::Passthrough(_) => {
            let name = t.dataset.file_name().expect("dataset file name");
            write(&target.dir().join(name), raw)?;
            format!("translate: `{}` is not translatable; copied unchanged", dataset.name)
        }
        TranslationOutput::Translated(out) => {
            let mut parts = Vec::new();
            for (code, records) in &out.shards {
                let shard = DatasetDescriptor {
                    name: dataset.name.clone(),
                    translatable: Some(true),
                    records: records.clone(),
                };
                write(
                    &target.dir().join(format!("{code}.json")),
                    serde_json::to_string_pretty(&shard)? + "\n",
                )?;
                parts.push(format!("{code}={}", records.len()));
            }
            format!("translate: {}", parts.join(" "))
        }
    };
    Ok((summary, inputs))
}

fn run_score(s: &ScoreSection, target: &Target) -> Result<Staged> {
    let mut inputs = BTreeMap::new();
    input(&mut inputs, &s.pred)?;
    input(&mut inputs, &s.gold)?;
    let preds: Vec<Prediction> = eval::read_jsonl(&s.pred)?;
    let golds: Vec<Gold> = eval::read_jsonl(&s.gold)?;
    let (records, stats) = eval::join(&preds, &golds)?;
    let lid = BuiltinLid::new();
    let lid_ref: Option<&dyn LanguageIdentifier> = if s.fidelity { Some(&lid) } else { None };
    let report = eval::build_report(&records, stats, lid_ref)?;
    write(&target.primary("report.json"), report.to_json_string())?;
    let table = report.render_table();
    write(&target.dir().join("report.txt"), &table)?;
    Ok((table, inputs))
}

fn run_report(m: &RunManifest) -> Result<String> {
    let r = m.report.as_ref().expect("validated");
    let text = fs::read_to_string(&r.input).map_err(|e| Error::io(&r.input, e))?;
    let report: ScoreReport =
        serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", r.input.display())))?;
    let table = report.render_table();
    if let Some(out) = &m.out {
        let tmp = out.with_extension("tmp");
        write(&tmp, &table)?;
        fs::rename(&tmp, out).map_err(|e| Error::io(out, e))?;
    }
    Ok(table.trim_end().to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(json: &str) -> Result<RunManifest> {
        let m = RunManifest::from_json_str(json)?;
        m.validate()?;
        Ok(m)
    }

    #[test]
    fn fraction_out_of_range_is_manifest_error() {
        let err = manifest(
            r#"{"command":"plan","out":"x","plan":{"budget":10,"english_fraction":1.3,"setup":"l100"}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Manifest(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(manifest(r#"{"command":"plan","out":"x","colour":1}"#).is_err());
        assert!(manifest(
            r#"{"command":"plan","out":"x","plan":{"budget":1,"english_fraction":0.5,"budgett":2}}"#
        )
        .is_err());
    }

    #[test]
    fn section_must_match_command() {
        let err = manifest(r#"{"command":"score","out":"x","plan":{"budget":1}}"#).unwrap_err();
        assert!(matches!(err, Error::Manifest(_)));
    }

    #[test]
    fn numeric_fraction_is_exact() {
        let f = FractionValue::Number(0.1).parse().unwrap();
        assert_eq!(f, EnglishFraction::new(1, 10).unwrap());
        assert_eq!(FractionValue::Text("1/3".into()).parse().unwrap(), EnglishFraction::new(1, 3).unwrap());
    }

    #[test]
    fn flags_compile_to_manifest() {
        let cli = Cli::try_parse_from([
            "lingomix", "plan", "--budget", "766000", "--english", "0.5", "--setup", "L100", "--dist", "uniform",
            "--seed", "3", "--out", "p.json",
        ])
        .unwrap();
        let m = manifest_from_cli(cli).unwrap();
        m.validate().unwrap();
        assert_eq!(m.seed, 3);
        assert_eq!(m.command, CommandName::Plan);
        let back = RunManifest::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(back, m);
    }
}
