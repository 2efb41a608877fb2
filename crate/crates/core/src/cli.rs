//! `cuebias` command-line front end.
//!
//! Exit codes: 0 on success, 1 when some records failed (failures are
//! written next to the output as `<out>.failures.jsonl`), 2 on usage or
//! configuration errors.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::biaslist::{
    build_bias_list, render_prompt, sample_training_size, BiasList, UtteranceManifestLine, UtteranceRecord,
};
use crate::ctc::selfcheck::{gradient_check, oracle_check, toy_check};
use crate::ctc::{ctc_loss, LogitMatrix, Matrix};
use crate::hints::{HintEntry, HintGenerator, SelectionPolicy, Strategy};
use crate::jsonl;
use crate::lexicon::{parse_common_list, parse_lexicon};
use crate::metrics::{aggregate, align, score, WerReport};
use crate::seed::derive_seed;
use crate::syllable::{CodaMode, OnsetTable, Syllabifier};
use crate::tagging::{normalize, tag_transcript, TagSequence};

const AFTER_HELP: &str = "\
File formats (one JSON object per line unless noted):
  lexicon       CMUdict text:        SHELLEY  SH EH1 L IY0
  word lists    plain text:          sheriff
  utterances    {\"id\":\"u1\",\"text\":\"tom hanks met shelley\",\"bias_words\":[\"tom hanks\",\"shelley\"]}
  hints         {\"bias\":\"shelley\",\"strategy\":\"syl\",\"hints\":[\"sheriff\",\"legal\"],\"fallback\":false,\"meta\":[{\"syll\":0,\"ced\":4,\"ped\":0}]}
  bias lists    {\"id\":\"u1\",\"words\":[\"shelley\",\"orchid\"],\"relevant_count\":1}
  prompts       {\"id\":\"u1\",\"prompt\":\"Transcribe this speech\\nBias words: shelley (sounds like: sheriff legal)\"}
  tags          {\"id\":\"u1\",\"text\":\"tom hanks\",\"tags\":\"bbbsbbbbb\"}
  hypotheses    {\"id\":\"u1\",\"text\":\"tom hanks met shelly\"}
  pairs         {\"id\":\"u1\",\"ref\":\"...\",\"hyp\":\"...\"}
  matrices      TSV, header `rows<TAB>cols` then one row per line
Exit codes: 0 success, 1 some records failed, 2 usage or configuration error.";

#[derive(Debug, Parser)]
#[command(name = "cuebias", version, about = "Common-word pronunciation cues, bias tags and B-WER scoring", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate pronunciation hints for a list of bias words.
    Hints(HintsArgs),
    /// Build per-utterance bias lists with random distractors.
    Biaslist(BiasListArgs),
    /// Render contextual-ASR prompts from bias lists.
    Prompt(PromptArgs),
    /// Produce character-level b/n/s tags for transcripts.
    Tag(TagArgs),
    /// Score hypotheses with B-WER, U-WER and WER.
    Score(ScoreArgs),
    /// Check CTC against brute force and finite differences.
    CtcSelftest(CtcArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Syl,
    Vowel,
    CedPed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    MinCed,
    MinCedPed,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CodaArg {
    Auto,
    Always,
    Never,
}

#[derive(Debug, Args)]
struct HintsArgs {
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "min-ced")]
    policy: PolicyArg,
    /// Required with `--policy random`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    common: PathBuf,
    /// Bias words, one per line.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write `bias<TAB>hint1 hint2 ...` lines here.
    #[arg(long)]
    tsv: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    first_syllable_coda: CodaArg,
    /// Legal onset clusters, one per line (e.g. `S T R`).
    #[arg(long)]
    onsets: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BiasListArgs {
    /// Utterance manifest.
    #[arg(long = "in")]
    input: PathBuf,
    /// Distractor words, one per line.
    #[arg(long)]
    pool: PathBuf,
    /// Fixed list size; drawn from 1..=200 per utterance when omitted.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PromptArgs {
    /// Bias lists from `biaslist`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "Transcribe this speech")]
    instruction: String,
    /// Hints from `hints`; every list entry must be covered.
    #[arg(long)]
    hints: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TagArgs {
    /// Utterance manifest.
    #[arg(long = "in")]
    input: PathBuf,
    /// Tag with these bias lists instead of each utterance's bias_words.
    #[arg(long)]
    lists: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Reference manifest; a record's `bias_words` overrides `--bias`.
    #[arg(long = "ref", required_unless_present = "pairs", requires = "hyp")]
    reference: Option<PathBuf>,
    #[arg(long)]
    hyp: Option<PathBuf>,
    /// Paired `{id, ref, hyp}` records instead of `--ref`/`--hyp`.
    #[arg(long, conflicts_with_all = ["reference", "hyp"])]
    pairs: Option<PathBuf>,
    /// Bias list, one entry per line.
    #[arg(long)]
    bias: Option<PathBuf>,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aligned-text view of every utterance.
    #[arg(long)]
    diff: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CtcArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 100)]
    grad_instances: usize,
    /// Evaluate the loss on this logit matrix (TSV, 4 columns) as well.
    #[arg(long, requires = "labels")]
    logits: Option<PathBuf>,
    /// Tag string (b/n/s) for `--logits`.
    #[arg(long)]
    labels: Option<String>,
    /// Write the gradient for `--logits` here (TSV).
    #[arg(long, requires = "logits")]
    out: Option<PathBuf>,
}

/// Distinguishes configuration problems (exit 2) from runtime failures.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.into()))
}

#[derive(Debug, Serialize, Deserialize)]
struct Failure {
    record: String,
    error: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BiasListLine {
    pub id: String,
    pub words: Vec<String>,
    pub relevant_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PromptLine {
    pub id: String,
    pub prompt: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TagLine {
    pub id: String,
    pub text: String,
    pub tags: TagSequence,
}

#[derive(Debug, Deserialize)]
struct HypLine {
    id: String,
    text: String,
}

#[derive(Debug, Deserialize)]
struct PairLine {
    id: String,
    #[serde(rename = "ref")]
    reference: String,
    hyp: String,
    #[serde(default)]
    bias_words: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct RefLine {
    id: String,
    text: String,
    #[serde(default)]
    bias_words: Option<Vec<String>>,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Hints(a) => run_hints(&a),
        Command::Biaslist(a) => run_biaslist(&a),
        Command::Prompt(a) => run_prompt(&a),
        Command::Tag(a) => run_tag(&a),
        Command::Score(a) => run_score(&a),
        Command::CtcSelftest(a) => run_ctc(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("read {}: {e}", path.display())))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    jsonl::parse(&read_text(path)?).map_err(|e| config_err(format!("{}: {e:#}", path.display())))
}

fn word_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

fn failures_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".failures.jsonl");
    out.with_file_name(name)
}

/// Writes the failure manifest (or removes a stale one) and picks the exit code.
fn finish(out: &Path, failures: &[Failure]) -> Result<i32> {
    let path = failures_path(out);
    if failures.is_empty() {
        if path.exists() {
            std::fs::remove_file(&path).with_context(|| format!("remove {}", path.display()))?;
        }
        return Ok(0);
    }
    jsonl::write_atomic(&path, &jsonl::to_string(failures)?)?;
    eprintln!("{} record(s) failed; see {}", failures.len(), path.display());
    Ok(1)
}

fn run_hints(a: &HintsArgs) -> Result<i32> {
    let policy = match (a.policy, a.seed) {
        (PolicyArg::MinCed, _) => SelectionPolicy::MinCed,
        (PolicyArg::MinCedPed, _) => SelectionPolicy::MinCedThenMinPed,
        (PolicyArg::Random, Some(seed)) => SelectionPolicy::SeededRandom { seed },
        (PolicyArg::Random, None) => return Err(config_err("--policy random requires --seed")),
    };
    let strategy = match a.strategy {
        StrategyArg::Syl => Strategy::Syllable,
        StrategyArg::Vowel => Strategy::Vowel,
        StrategyArg::CedPed => Strategy::CedPed,
    };
    let coda = match a.first_syllable_coda {
        CodaArg::Auto => CodaMode::Auto,
        CodaArg::Always => CodaMode::Always,
        CodaArg::Never => CodaMode::Never,
    };
    let onsets = match &a.onsets {
        Some(p) => OnsetTable::parse(&read_text(p)?).map_err(|e| config_err(format!("{}: {e}", p.display())))?,
        None => OnsetTable::default(),
    };
    let lexicon =
        parse_lexicon(&read_text(&a.lexicon)?).map_err(|e| config_err(format!("{}: {e}", a.lexicon.display())))?;
    let bias_words = word_lines(&read_text(&a.input)?);
    let exclude: BTreeSet<String> = bias_words.iter().map(|w| normalize(w)).collect();
    let common = parse_common_list(&read_text(&a.common)?, &exclude);
    let generator = HintGenerator::with_syllabifier(&lexicon, &common, Syllabifier::new(onsets), coda);

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (word, result) in bias_words.iter().zip(generator.generate(&bias_words, strategy, policy)) {
        match result {
            Ok(e) => entries.push(e),
            Err(e) => failures.push(Failure {
                record: word.clone(),
                error: e.to_string(),
            }),
        }
    }
    jsonl::write_atomic(&a.out, &jsonl::to_string(&entries)?)?;
    if let Some(tsv) = &a.tsv {
        let text: String = entries.iter().map(|e| format!("{}\n", e.to_tsv())).collect();
        jsonl::write_atomic(tsv, &text)?;
    }
    finish(&a.out, &failures)
}

fn run_biaslist(a: &BiasListArgs) -> Result<i32> {
    let manifest: Vec<UtteranceManifestLine> = read_jsonl(&a.input)?;
    let pool = word_lines(&read_text(&a.pool)?);
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for m in &manifest {
        let built = UtteranceRecord::from_manifest(m).and_then(|rec| {
            let size = a
                .size
                .unwrap_or_else(|| sample_training_size(derive_seed(a.seed, &rec.id)).max(rec.bias_words.len()));
            build_bias_list(&rec, &pool, size, a.seed)
        });
        match built {
            Ok(list) => lines.push(BiasListLine {
                id: m.id.clone(),
                words: list.words,
                relevant_count: list.relevant_count,
            }),
            Err(e) => failures.push(Failure {
                record: m.id.clone(),
                error: e.to_string(),
            }),
        }
    }
    jsonl::write_atomic(&a.out, &jsonl::to_string(&lines)?)?;
    finish(&a.out, &failures)
}

fn run_prompt(a: &PromptArgs) -> Result<i32> {
    let lists: Vec<BiasListLine> = read_jsonl(&a.input)?;
    let hints: Option<Vec<HintEntry>> = a.hints.as_deref().map(read_jsonl).transpose()?;
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for l in lists {
        let list = BiasList::new(l.words, l.relevant_count);
        match render_prompt(&a.instruction, &list, hints.as_deref()) {
            Ok(p) => lines.push(PromptLine {
                id: l.id,
                prompt: p.text,
            }),
            Err(e) => failures.push(Failure {
                record: l.id,
                error: e.to_string(),
            }),
        }
    }
    jsonl::write_atomic(&a.out, &jsonl::to_string(&lines)?)?;
    finish(&a.out, &failures)
}

fn run_tag(a: &TagArgs) -> Result<i32> {
    let manifest: Vec<UtteranceManifestLine> = read_jsonl(&a.input)?;
    let lists: Option<HashMap<String, Vec<String>>> = match &a.lists {
        Some(p) => Some(
            read_jsonl::<BiasListLine>(p)?
                .into_iter()
                .map(|l| (l.id, l.words))
                .collect(),
        ),
        None => None,
    };
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for m in manifest {
        let entries = match &lists {
            None => m.bias_words.clone(),
            Some(map) => match map.get(&m.id) {
                Some(words) => words.clone(),
                None => {
                    failures.push(Failure {
                        record: m.id.clone(),
                        error: "no bias list for utterance".into(),
                    });
                    continue;
                }
            },
        };
        let text = normalize(&m.text);
        let tags = tag_transcript(&text, &entries);
        lines.push(TagLine { id: m.id, text, tags });
    }
    jsonl::write_atomic(&a.out, &jsonl::to_string(&lines)?)?;
    finish(&a.out, &failures)
}

/// `(id, ref, hyp, per-record bias list)`
type ScorePair = (String, String, Option<String>, Option<Vec<String>>);

fn run_score(a: &ScoreArgs) -> Result<i32> {
    let global_bias: Option<Vec<String>> = a.bias.as_deref().map(read_text).transpose()?.map(|t| word_lines(&t));

    let mut pairs: Vec<ScorePair> = Vec::new();
    if let Some(p) = &a.pairs {
        for l in read_jsonl::<PairLine>(p)? {
            pairs.push((l.id, l.reference, Some(l.hyp), l.bias_words));
        }
    } else {
        let refs: Vec<RefLine> = read_jsonl(a.reference.as_deref().expect("clap enforces --ref"))?;
        let hyps: HashMap<String, String> = read_jsonl::<HypLine>(a.hyp.as_deref().expect("clap enforces --hyp"))?
            .into_iter()
            .map(|h| (h.id, h.text))
            .collect();
        for r in refs {
            let hyp = hyps.get(&r.id).cloned();
            pairs.push((r.id, r.text, hyp, r.bias_words));
        }
    }

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut diff = String::new();
    for (id, reference, hyp, bias) in pairs {
        let Some(hyp) = hyp else {
            failures.push(Failure {
                record: id,
                error: "no hypothesis".into(),
            });
            continue;
        };
        let Some(bias) = bias.or_else(|| global_bias.clone()) else {
            return Err(config_err(format!(
                "record `{id}` has no bias_words and --bias was not given"
            )));
        };
        let r = normalize(&reference);
        let h = normalize(&hyp);
        let r: Vec<&str> = r.split_whitespace().collect();
        let h: Vec<&str> = h.split_whitespace().collect();
        let report = score(&r, &h, &bias);
        if a.diff.is_some() {
            diff.push_str(&format!("id: {id}\n{}\n", align(&r, &h).diff_view()));
        }
        reports.push(report);
    }

    let total: WerReport = aggregate(&reports);
    let summary = total.summary();
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    match &a.out {
        Some(p) => jsonl::write_atomic(p, &json)?,
        None => print!("{json}"),
    }
    if let Some(p) = &a.diff {
        jsonl::write_atomic(p, &diff)?;
    }
    eprintln!("{summary}");
    eprintln!("{}", total.count_row("#bias | #non-bias"));
    if failures.is_empty() {
        return Ok(0);
    }
    match &a.out {
        Some(p) => finish(p, &failures),
        None => {
            for f in &failures {
                eprintln!("failed: {} ({})", f.record, f.error);
            }
            Ok(1)
        }
    }
}

fn run_ctc(a: &CtcArgs) -> Result<i32> {
    let reports = [
        oracle_check(a.instances, a.seed),
        gradient_check(a.grad_instances, a.seed.wrapping_add(1)),
        toy_check(50, 8, a.seed),
    ];
    for r in &reports {
        println!("{r}");
    }
    let mut ok = reports.iter().all(|r| r.passed());

    if let (Some(path), Some(labels)) = (&a.logits, &a.labels) {
        let matrix = Matrix::from_tsv(&read_text(path)?).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let logits = LogitMatrix::new(matrix).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let tags: TagSequence = labels.parse().map_err(|e| config_err(format!("--labels: {e}")))?;
        match ctc_loss(&logits, &tags) {
            Ok(out) => {
                println!("nll: {}", out.nll);
                if let Some(p) = &a.out {
                    jsonl::write_atomic(p, &out.grad.to_tsv())?;
                }
            }
            Err(e) => {
                println!("nll: error: {e}");
                ok = false;
            }
        }
    }
    if ok {
        Ok(0)
    } else {
        Err(anyhow!("self-test failed"))
    }
}
