//! Per-utterance bias lists with random distractors, and prompt rendering.
//!
//! Prompt template:
//!
//! ```text
//! <instruction>
//! Bias words: word1; word2 (sounds like: h1 h2); word3
//! ```
//!
//! With an empty list the prompt is the instruction alone.

use std::collections::{BTreeSet, HashMap};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hints::HintEntry;
use crate::lexicon::fold_case;
use crate::seed::rng_for;
use crate::tagging::{find_occurrences, normalize, tokens};

pub const BIAS_HEADER: &str = "Bias words: ";
pub const ENTRY_SEPARATOR: &str = "; ";
pub const HINT_OPEN: &str = " (sounds like: ";
pub const HINT_CLOSE: &str = ")";

/// Bias-list sizes drawn for training lie in `1..=MAX_TRAINING_LIST`.
pub const MAX_TRAINING_LIST: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BiasListError {
    #[error("bias word `{word}` does not occur in utterance `{id}`")]
    NotInTranscript { id: String, word: String },
    #[error("list size {size} is smaller than the {required} utterance bias words")]
    SizeTooSmall { size: usize, required: usize },
    #[error("distractor pool has {available} usable words, {needed} needed")]
    PoolTooSmall { needed: usize, available: usize },
    #[error("no hint for bias word `{0}`")]
    MissingHint(String),
    #[error("malformed prompt: {0}")]
    MalformedPrompt(String),
}

/// One line of an utterance manifest: `{id, text, bias_words}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtteranceManifestLine {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub bias_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtteranceRecord {
    pub id: String,
    pub transcript: Vec<String>,
    /// Case-folded, deduplicated, first-occurrence order. Entries may span
    /// several tokens.
    pub bias_words: Vec<String>,
}

impl UtteranceRecord {
    /// Normalizes text and bias words and checks that every bias entry occurs
    /// in the transcript as a whole-token sequence.
    pub fn new(id: &str, text: &str, bias_words: &[String]) -> Result<Self, BiasListError> {
        let text = normalize(text);
        let transcript: Vec<String> = tokens(&text).into_iter().map(|(_, w)| w.to_string()).collect();
        let mut seen = BTreeSet::new();
        let mut words = Vec::new();
        for w in bias_words {
            let w = normalize(w);
            if w.is_empty() || !seen.insert(w.clone()) {
                continue;
            }
            if find_occurrences(&transcript, &w).is_empty() {
                return Err(BiasListError::NotInTranscript {
                    id: id.to_string(),
                    word: w,
                });
            }
            words.push(w);
        }
        Ok(UtteranceRecord {
            id: id.to_string(),
            transcript,
            bias_words: words,
        })
    }

    pub fn from_manifest(line: &UtteranceManifestLine) -> Result<Self, BiasListError> {
        Self::new(&line.id, &line.text, &line.bias_words)
    }

    pub fn text(&self) -> String {
        self.transcript.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasList {
    pub words: Vec<String>,
    /// How many entries are bias words of the utterance itself.
    pub relevant_count: usize,
}

impl BiasList {
    pub fn new(words: Vec<String>, relevant_count: usize) -> Self {
        BiasList { words, relevant_count }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// The utterance's bias words plus `size - |bias words|` distractors drawn
/// without replacement from the pool, shuffled. Randomness is keyed on the
/// utterance id.
pub fn build_bias_list(
    rec: &UtteranceRecord,
    distractor_pool: &[String],
    size: usize,
    seed: u64,
) -> Result<BiasList, BiasListError> {
    let required = rec.bias_words.len();
    if size < required {
        return Err(BiasListError::SizeTooSmall { size, required });
    }
    let own: BTreeSet<&str> = rec.bias_words.iter().map(String::as_str).collect();
    let mut seen = BTreeSet::new();
    let pool: Vec<String> = distractor_pool
        .iter()
        .map(|w| normalize(w))
        .filter(|w| !w.is_empty() && !own.contains(w.as_str()))
        .filter(|w| seen.insert(w.clone()))
        .collect();
    let needed = size - required;
    if pool.len() < needed {
        return Err(BiasListError::PoolTooSmall {
            needed,
            available: pool.len(),
        });
    }

    let mut rng = rng_for(seed, &rec.id);
    let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), needed).into_vec();
    picked.sort_unstable();
    let mut words = rec.bias_words.clone();
    words.extend(picked.into_iter().map(|i| pool[i].clone()));
    words.shuffle(&mut rng);
    Ok(BiasList::new(words, required))
}

/// Uniform draw from `1..=200`, fixed per seed.
pub fn sample_training_size(seed: u64) -> usize {
    rng_for(seed, "training-size").random_range(1..=MAX_TRAINING_LIST)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedEntry {
    pub word: String,
    pub hints: Option<Vec<String>>,
}

impl RenderedEntry {
    fn render(&self) -> String {
        match &self.hints {
            Some(h) => format!("{}{HINT_OPEN}{}{HINT_CLOSE}", self.word, h.join(" ")),
            None => self.word.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub text: String,
    pub instruction: String,
    pub entries: Vec<RenderedEntry>,
}

/// Renders `instruction` and the list. When `hints` is given every list
/// entry needs a matching [`HintEntry`].
pub fn render_prompt(
    instruction: &str,
    list: &BiasList,
    hints: Option<&[HintEntry]>,
) -> Result<RenderedPrompt, BiasListError> {
    let by_word: Option<HashMap<&str, &HintEntry>> = hints.map(|hs| hs.iter().map(|h| (h.bias.as_str(), h)).collect());
    let entries = list
        .words
        .iter()
        .map(|w| {
            let hints = match &by_word {
                None => None,
                Some(map) => Some(
                    map.get(fold_case(w).as_str())
                        .ok_or_else(|| BiasListError::MissingHint(w.clone()))?
                        .hints
                        .clone(),
                ),
            };
            Ok(RenderedEntry { word: w.clone(), hints })
        })
        .collect::<Result<Vec<_>, BiasListError>>()?;

    let mut text = instruction.to_string();
    if !entries.is_empty() {
        let rendered: Vec<String> = entries.iter().map(RenderedEntry::render).collect();
        text.push('\n');
        text.push_str(BIAS_HEADER);
        text.push_str(&rendered.join(ENTRY_SEPARATOR));
    }
    Ok(RenderedPrompt {
        text,
        instruction: instruction.to_string(),
        entries,
    })
}

/// Inverse of [`render_prompt`]: recovers the instruction and entries.
pub fn parse_prompt(text: &str) -> Result<RenderedPrompt, BiasListError> {
    let marker = format!("\n{BIAS_HEADER}");
    let Some((instruction, list)) = text.rsplit_once(&marker) else {
        return Ok(RenderedPrompt {
            text: text.to_string(),
            instruction: text.to_string(),
            entries: Vec::new(),
        });
    };
    let entries = list
        .split(ENTRY_SEPARATOR)
        .map(|item| {
            if let Some(open) = item.find(HINT_OPEN) {
                let inner = item[open + HINT_OPEN.len()..]
                    .strip_suffix(HINT_CLOSE)
                    .ok_or_else(|| BiasListError::MalformedPrompt(format!("unclosed hint in `{item}`")))?;
                Ok(RenderedEntry {
                    word: item[..open].to_string(),
                    hints: Some(inner.split(' ').filter(|s| !s.is_empty()).map(str::to_string).collect()),
                })
            } else if item.is_empty() {
                Err(BiasListError::MalformedPrompt("empty entry".into()))
            } else {
                Ok(RenderedEntry {
                    word: item.to_string(),
                    hints: None,
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RenderedPrompt {
        text: text.to_string(),
        instruction: instruction.to_string(),
        entries,
    })
}
