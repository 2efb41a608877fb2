//! Common-word pronunciation cues for contextual speech recognition.
//!
//! - [`lexicon`]: CMUdict parsing, ARPAbet phonemes, common-word lists.
//! - [`syllable`]: maximal-onset syllabification.
//! - [`distance`]: character, phoneme and word edit distances.
//! - [`hints`]: syllable, vowel and CED+PED cue generation.
//! - [`biaslist`]: bias lists with distractors and prompt rendering.
//! - [`tagging`]: character-level bias position tags.
//! - [`ctc`]: CTC loss, its brute-force oracle and a toy linear tagger.
//! - [`metrics`]: B-WER / U-WER / WER scoring.
//! - [`cli`]: the `cuebias` command-line front end.

pub mod biaslist;
pub mod cli;
pub mod ctc;
pub mod distance;
pub mod hints;
pub mod jsonl;
pub mod lexicon;
pub mod metrics;
pub mod seed;
pub mod syllable;
pub mod tagging;
