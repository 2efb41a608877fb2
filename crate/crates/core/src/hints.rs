//! Common-word pronunciation cues for bias words.
//!
//! Three strategies pair a bias word with common words that sound partly
//! like it:
//!
//! - [`Strategy::Syllable`]: one common word per syllable of the bias word,
//!   chosen so that the common word's first syllable matches that syllable.
//! - [`Strategy::Vowel`]: common words whose concatenated vowel sequence
//!   equals the bias word's vowel sequence (a single word when possible).
//! - [`Strategy::CedPed`]: the single common word closest in spelling,
//!   with phoneme distance as the tie-break.
//!
//! Within each candidate set a [`SelectionPolicy`] picks the word.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{ced, levenshtein, ped};
use crate::lexicon::{fold_case, vowel_sequence, CommonWordList, Lexicon, Pronunciation, Symbol};
use crate::seed::rng_for;
use crate::syllable::{CodaMode, Syllabifier};

/// Largest first-syllable PED accepted when no exact match exists.
pub const MAX_SYLLABLE_RELAXATION: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HintError {
    #[error("no pronunciation for `{0}`")]
    NoPronunciation(String),
    #[error("`{word}` has no vowels")]
    Degenerate { word: String },
    #[error("no candidate for syllable {syllable} of `{word}`")]
    NoCandidate { word: String, syllable: usize },
    #[error("cannot cover vowels of `{word}` from position {position}")]
    CoverFailure { word: String, position: usize },
    #[error("common word list is empty")]
    EmptyCommonList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "syl")]
    Syllable,
    #[serde(rename = "vowel")]
    Vowel,
    #[serde(rename = "ced-ped")]
    CedPed,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Syllable => "syl",
            Strategy::Vowel => "vowel",
            Strategy::CedPed => "ced-ped",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "syl" | "syllable" => Ok(Strategy::Syllable),
            "vowel" => Ok(Strategy::Vowel),
            "ced-ped" | "ced" => Ok(Strategy::CedPed),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Smallest CED to the bias word, then lexicographic.
    MinCed,
    /// Smallest CED, then smallest PED of primary pronunciations, then lexicographic.
    MinCedThenMinPed,
    /// Uniform over the candidate set, seeded per bias word.
    SeededRandom { seed: u64 },
}

impl SelectionPolicy {
    pub fn is_random(&self) -> bool {
        matches!(self, SelectionPolicy::SeededRandom { .. })
    }
}

/// Where a hint word came from and how close it is.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchMeta {
    /// Bias-word syllable index (syllable strategy).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub syll: Option<usize>,
    /// Half-open range of bias-word vowels covered (vowel strategy).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[usize; 2]>,
    pub ced: usize,
    /// Syllable strategy: PED between first-syllable keys. Otherwise PED of
    /// whole pronunciations when both are known.
    pub ped: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HintEntry {
    pub bias: String,
    pub strategy: Strategy,
    pub hints: Vec<String>,
    /// True when relaxed matching or the CED+PED fallback produced the hints.
    pub fallback: bool,
    pub meta: Vec<MatchMeta>,
}

impl HintEntry {
    /// `bias<TAB>hint1 hint2 ...`
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}", self.bias, self.hints.join(" "))
    }
}

#[derive(Debug)]
struct Candidate {
    word: String,
    pron: Option<Pronunciation>,
    first_key: Option<Vec<Symbol>>,
}

/// Precomputed view of a common-word list for repeated hint generation.
pub struct HintGenerator<'a> {
    lexicon: &'a Lexicon,
    syllabifier: Syllabifier,
    coda_mode: CodaMode,
    candidates: Vec<Candidate>,
    by_first_key: HashMap<Vec<Symbol>, Vec<usize>>,
    by_vowels: HashMap<Vec<Symbol>, Vec<usize>>,
}

impl<'a> HintGenerator<'a> {
    pub fn new(lexicon: &'a Lexicon, common: &CommonWordList) -> Self {
        Self::with_syllabifier(lexicon, common, Syllabifier::default(), CodaMode::Auto)
    }

    pub fn with_syllabifier(
        lexicon: &'a Lexicon,
        common: &CommonWordList,
        syllabifier: Syllabifier,
        coda_mode: CodaMode,
    ) -> Self {
        let mut candidates = Vec::with_capacity(common.len());
        let mut by_first_key: HashMap<Vec<Symbol>, Vec<usize>> = HashMap::new();
        let mut by_vowels: HashMap<Vec<Symbol>, Vec<usize>> = HashMap::new();
        for word in common.words() {
            let idx = candidates.len();
            let pron = lexicon.primary(word).cloned();
            // Vowel-free words take no part in syllable or vowel matching.
            let usable = pron.as_ref().filter(|p| p.vowel_count() > 0);
            let first_key = usable.map(|p| syllabifier.first_syllable_key(p, coda_mode));
            let vowels = usable.map(vowel_sequence).unwrap_or_default();
            if let Some(key) = &first_key {
                by_first_key.entry(key.clone()).or_default().push(idx);
            }
            if !vowels.is_empty() {
                by_vowels.entry(vowels).or_default().push(idx);
            }
            candidates.push(Candidate {
                word: word.clone(),
                pron,
                first_key,
            });
        }
        HintGenerator {
            lexicon,
            syllabifier,
            coda_mode,
            candidates,
            by_first_key,
            by_vowels,
        }
    }

    pub fn coda_mode(&self) -> CodaMode {
        self.coda_mode
    }

    pub fn syllabifier(&self) -> &Syllabifier {
        &self.syllabifier
    }

    fn bias_pron(&self, bias: &str, supplied: Option<&Pronunciation>) -> Result<Pronunciation, HintError> {
        supplied
            .or_else(|| self.lexicon.primary(bias))
            .cloned()
            .ok_or_else(|| HintError::NoPronunciation(bias.to_string()))
    }

    /// Picks one candidate index. `pool` must be non-empty.
    fn select(
        &self,
        bias: &str,
        bias_pron: Option<&Pronunciation>,
        pool: &[usize],
        policy: SelectionPolicy,
        rng: &mut Option<ChaCha8Rng>,
    ) -> usize {
        let word = |i: usize| self.candidates[i].word.as_str();
        match policy {
            SelectionPolicy::MinCed => *pool
                .iter()
                .min_by_key(|&&i| (ced(word(i), bias), word(i)))
                .expect("non-empty pool"),
            SelectionPolicy::MinCedThenMinPed => *pool
                .iter()
                .min_by_key(|&&i| {
                    let p = self.ped_to(i, bias_pron);
                    (ced(word(i), bias), p.is_none(), p, word(i))
                })
                .expect("non-empty pool"),
            SelectionPolicy::SeededRandom { seed } => {
                let rng = rng.get_or_insert_with(|| rng_for(seed, bias));
                let mut sorted = pool.to_vec();
                sorted.sort_by(|&a, &b| word(a).cmp(word(b)));
                *sorted.choose(rng).expect("non-empty pool")
            }
        }
    }

    fn ped_to(&self, idx: usize, bias_pron: Option<&Pronunciation>) -> Option<usize> {
        Some(ped(self.candidates[idx].pron.as_ref()?, bias_pron?))
    }

    fn meta_for(&self, idx: usize, bias: &str, bias_pron: Option<&Pronunciation>) -> MatchMeta {
        MatchMeta {
            syll: None,
            span: None,
            ced: ced(&self.candidates[idx].word, bias),
            ped: self.ped_to(idx, bias_pron),
        }
    }

    pub fn syllable_hints(&self, bias_word: &str, policy: SelectionPolicy) -> Result<HintEntry, HintError> {
        self.syllable_hints_with(bias_word, None, policy)
    }

    /// One hint per syllable of the bias word. Candidates match the
    /// syllable exactly, else within PED 1, else within PED 2.
    pub fn syllable_hints_with(
        &self,
        bias_word: &str,
        pron: Option<&Pronunciation>,
        policy: SelectionPolicy,
    ) -> Result<HintEntry, HintError> {
        let bias = fold_case(bias_word);
        let bias_pron = self.bias_pron(&bias, pron)?;
        if bias_pron.vowel_count() == 0 {
            return Err(HintError::Degenerate { word: bias });
        }
        let syllables = self.syllabifier.syllabify(&bias_pron);
        let count = syllables.len();
        let mut rng = None;
        let mut hints = Vec::with_capacity(count);
        let mut meta = Vec::with_capacity(count);
        let mut fallback = false;

        for (m, syl) in syllables.iter().enumerate() {
            let target = syl.key(self.coda_mode.includes_coda(m, count));
            let mut pool: Vec<usize> = self
                .by_first_key
                .get(&target)
                .map(|v| v.iter().copied().filter(|&i| self.candidates[i].word != bias).collect())
                .unwrap_or_default();
            let mut tier = 1;
            while pool.is_empty() && tier <= MAX_SYLLABLE_RELAXATION {
                pool = self
                    .candidates
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.word != bias)
                    .filter(|(_, c)| c.first_key.as_ref().is_some_and(|k| levenshtein(k, &target) <= tier))
                    .map(|(i, _)| i)
                    .collect();
                fallback = true;
                tier += 1;
            }
            if pool.is_empty() {
                return Err(HintError::NoCandidate {
                    word: bias,
                    syllable: m,
                });
            }
            let chosen = self.select(&bias, Some(&bias_pron), &pool, policy, &mut rng);
            let key = self.candidates[chosen].first_key.as_ref().expect("indexed candidate");
            hints.push(self.candidates[chosen].word.clone());
            meta.push(MatchMeta {
                syll: Some(m),
                span: None,
                ced: ced(&self.candidates[chosen].word, &bias),
                ped: Some(levenshtein(key, &target)),
            });
        }

        Ok(HintEntry {
            bias,
            strategy: Strategy::Syllable,
            hints,
            fallback,
            meta,
        })
    }

    pub fn vowel_hints(&self, bias_word: &str, policy: SelectionPolicy) -> Result<HintEntry, HintError> {
        self.vowel_hints_with(bias_word, None, policy)
    }

    /// Common words whose vowel sequences concatenate to the bias word's.
    ///
    /// A single exact match is used when one exists. Otherwise the cover is
    /// built left to right, each step taking the longest prefix of the
    /// remaining vowels that some common word matches and from which the
    /// rest can still be covered.
    pub fn vowel_hints_with(
        &self,
        bias_word: &str,
        pron: Option<&Pronunciation>,
        policy: SelectionPolicy,
    ) -> Result<HintEntry, HintError> {
        let bias = fold_case(bias_word);
        let bias_pron = self.bias_pron(&bias, pron)?;
        let target = vowel_sequence(&bias_pron);
        if target.is_empty() {
            return Err(HintError::Degenerate { word: bias });
        }
        let n = target.len();
        let matching = |range: std::ops::Range<usize>| -> Vec<usize> {
            self.by_vowels
                .get(&target[range])
                .map(|v| v.iter().copied().filter(|&i| self.candidates[i].word != bias).collect())
                .unwrap_or_default()
        };

        // coverable[i]: target[i..] can be split into matchable pieces.
        let mut coverable = vec![false; n + 1];
        coverable[n] = true;
        for i in (0..n).rev() {
            coverable[i] = (i + 1..=n).any(|j| coverable[j] && !matching(i..j).is_empty());
        }

        let mut rng = None;
        let mut hints = Vec::new();
        let mut meta = Vec::new();
        let mut pos = 0;
        while pos < n {
            let step = (pos + 1..=n)
                .rev()
                .filter(|&end| coverable[end])
                .map(|end| (end, matching(pos..end)))
                .find(|(_, pool)| !pool.is_empty());
            let Some((end, pool)) = step else {
                return Err(HintError::CoverFailure {
                    word: bias,
                    position: pos,
                });
            };
            let chosen = self.select(&bias, Some(&bias_pron), &pool, policy, &mut rng);
            let mut m = self.meta_for(chosen, &bias, Some(&bias_pron));
            m.span = Some([pos, end]);
            hints.push(self.candidates[chosen].word.clone());
            meta.push(m);
            pos = end;
        }

        Ok(HintEntry {
            bias,
            strategy: Strategy::Vowel,
            hints,
            fallback: false,
            meta,
        })
    }

    /// The common word with the smallest CED to the bias word.
    ///
    /// CED ties go to PED under [`SelectionPolicy::MinCedThenMinPed`]
    /// (words missing from the lexicon rank last), or to a uniform draw
    /// under [`SelectionPolicy::SeededRandom`].
    pub fn ced_ped_hint(&self, bias_word: &str, policy: SelectionPolicy) -> Result<HintEntry, HintError> {
        let bias = fold_case(bias_word);
        let scored: Vec<(usize, usize)> = self
            .candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.word != bias)
            .map(|(i, c)| (i, ced(&c.word, &bias)))
            .collect();
        let best = scored.iter().map(|&(_, d)| d).min().ok_or(HintError::EmptyCommonList)?;
        let pool: Vec<usize> = scored.iter().filter(|&&(_, d)| d == best).map(|&(i, _)| i).collect();

        let bias_pron = self.lexicon.primary(&bias);
        if pool.len() > 1 && policy == SelectionPolicy::MinCedThenMinPed && bias_pron.is_none() {
            return Err(HintError::NoPronunciation(bias));
        }
        let chosen = self.select(&bias, bias_pron, &pool, policy, &mut None);
        Ok(HintEntry {
            meta: vec![self.meta_for(chosen, &bias, bias_pron)],
            hints: vec![self.candidates[chosen].word.clone()],
            bias,
            strategy: Strategy::CedPed,
            fallback: false,
        })
    }

    /// Runs `strategy` on every bias word, in order. Words that are not in
    /// the lexicon or have no vowels get a CED+PED hint marked as fallback.
    pub fn generate(
        &self,
        bias_words: &[String],
        strategy: Strategy,
        policy: SelectionPolicy,
    ) -> Vec<Result<HintEntry, HintError>> {
        bias_words
            .iter()
            .map(|w| self.generate_one(w, strategy, policy))
            .collect()
    }

    fn generate_one(&self, word: &str, strategy: Strategy, policy: SelectionPolicy) -> Result<HintEntry, HintError> {
        let result = match strategy {
            Strategy::Syllable => self.syllable_hints(word, policy),
            Strategy::Vowel => self.vowel_hints(word, policy),
            Strategy::CedPed => return self.ced_ped_hint(word, policy),
        };
        match result {
            Err(HintError::NoPronunciation(_) | HintError::Degenerate { .. }) => {
                self.ced_ped_hint(word, policy).map(|mut e| {
                    e.fallback = true;
                    e
                })
            }
            other => other,
        }
    }
}

pub fn syllable_hints(
    bias_word: &str,
    lex: &Lexicon,
    common: &CommonWordList,
    policy: SelectionPolicy,
) -> Result<HintEntry, HintError> {
    HintGenerator::new(lex, common).syllable_hints(bias_word, policy)
}

pub fn vowel_hints(
    bias_word: &str,
    lex: &Lexicon,
    common: &CommonWordList,
    policy: SelectionPolicy,
) -> Result<HintEntry, HintError> {
    HintGenerator::new(lex, common).vowel_hints(bias_word, policy)
}

pub fn ced_ped_hint(
    bias_word: &str,
    lex: &Lexicon,
    common: &CommonWordList,
    policy: SelectionPolicy,
) -> Result<HintEntry, HintError> {
    HintGenerator::new(lex, common).ced_ped_hint(bias_word, policy)
}

pub fn generate_hints(
    bias_words: &[String],
    strategy: Strategy,
    lex: &Lexicon,
    common: &CommonWordList,
    policy: SelectionPolicy,
) -> Vec<Result<HintEntry, HintError>> {
    HintGenerator::new(lex, common).generate(bias_words, strategy, policy)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::lexicon::{parse_common_list, parse_lexicon};

    const DICT: &str = "\
SHELLEY  SH EH1 L IY0
SHERIFF  SH EH1 R AH0 F
LEGAL  L IY1 G AH0 L
HEALTHY  HH EH1 L TH IY0
SHELLED  SH EH1 L D
SHELL  SH EH1 L
BED  B EH1 D
SEE  S IY1
THE  DH AH0
THE(2)  DH AH1
BUN  B AH1 N
CAT  K AE1 T
CAB  K AE1 B
HMM  HH M
";

    fn lex() -> Lexicon {
        parse_lexicon(DICT).unwrap()
    }

    fn common(words: &str) -> CommonWordList {
        parse_common_list(words, &BTreeSet::new())
    }

    #[test]
    fn shelley_syllable_hints() {
        let lex = lex();
        let list = common("the\nsheriff\nlegal\nhealthy\nbed\n");
        let e = syllable_hints("shelley", &lex, &list, SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["sheriff", "legal"]);
        assert!(!e.fallback);
        assert_eq!(e.meta[0].syll, Some(0));
        assert_eq!(e.meta[1].ped, Some(0));
    }

    #[test]
    fn monosyllable_gets_one_hint() {
        let lex = lex();
        let list = common("cab\nbed\n");
        let e = syllable_hints("cat", &lex, &list, SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["cab"]);
        // K AE B vs K AE T needs the PED<=1 tier.
        assert!(e.fallback);
        assert_eq!(e.meta[0].ped, Some(1));
    }

    #[test]
    fn no_candidate_when_list_has_no_vowels() {
        let lex = lex();
        let list = common("hmm\n");
        let err = syllable_hints("shelley", &lex, &list, SelectionPolicy::MinCed).unwrap_err();
        assert!(matches!(err, HintError::NoCandidate { syllable: 0, .. }));
    }

    #[test]
    fn shelley_vowel_hint() {
        let lex = lex();
        let list = common("sheriff\nlegal\nhealthy\n");
        let e = vowel_hints("shelley", &lex, &list, SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["healthy"]);
        assert_eq!(e.meta[0].span, Some([0, 2]));
    }

    #[test]
    fn single_vowel_exact() {
        let lex = lex();
        let e = vowel_hints("bun", &lex, &common("the\n"), SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["the"]);
    }

    #[test]
    fn vowel_cover_with_single_vowel_words() {
        let lex = lex();
        let e = vowel_hints("shelley", &lex, &common("bed\nsee\n"), SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["bed", "see"]);
        assert_eq!(e.meta[0].span, Some([0, 1]));
        assert_eq!(e.meta[1].span, Some([1, 2]));
    }

    #[test]
    fn vowel_cover_failure() {
        let lex = lex();
        let err = vowel_hints("shelley", &lex, &common("bed\n"), SelectionPolicy::MinCed).unwrap_err();
        assert!(matches!(err, HintError::CoverFailure { position: 0, .. }));
    }

    #[test]
    fn cover_backs_off_from_dead_end_prefix() {
        // EH-IY-AH: taking "healthy" first leaves AH, which no word covers.
        let lex = parse_lexicon(&format!("{DICT}SHELLEYA  SH EH1 L IY0 AH0\n")).unwrap();
        let e = vowel_hints(
            "shelleya",
            &lex,
            &common("healthy\nbed\nlegal\n"),
            SelectionPolicy::MinCed,
        )
        .unwrap();
        assert_eq!(e.hints, ["bed", "legal"]);
    }

    #[test]
    fn ced_ped_picks_closest_spelling() {
        let lex = lex();
        let list = common("the\nsheriff\nlegal\nhealthy\nshelled\n");
        for policy in [
            SelectionPolicy::MinCed,
            SelectionPolicy::MinCedThenMinPed,
            SelectionPolicy::SeededRandom { seed: 9 },
        ] {
            let e = ced_ped_hint("shelley", &lex, &list, policy).unwrap();
            assert_eq!(e.hints, ["shelled"]);
            assert_eq!(e.meta[0].ced, 1);
        }
    }

    #[test]
    fn ced_tie_broken_by_ped() {
        let lex = lex();
        // Both at CED 2 from "shelley": "shell" (PED 1) and "shelxy" (not in lexicon).
        let list = common("shelxy\nshell\n");
        let e = ced_ped_hint("shelley", &lex, &list, SelectionPolicy::MinCedThenMinPed).unwrap();
        assert_eq!(e.hints, ["shell"]);
        let e = ced_ped_hint("shelley", &lex, &list, SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["shell"]);
        let err = ced_ped_hint(
            "shellxy",
            &lex,
            &common("shellx\nshelly\n"),
            SelectionPolicy::MinCedThenMinPed,
        )
        .unwrap_err();
        assert_eq!(err, HintError::NoPronunciation("shellxy".into()));
    }

    #[test]
    fn seeded_random_is_deterministic() {
        let lex = lex();
        let list = common("bed\ncab\ncat\nsee\nthe\n");
        let policy = SelectionPolicy::SeededRandom { seed: 42 };
        let a = ced_ped_hint("zzz", &lex, &list, policy).unwrap();
        let b = ced_ped_hint("zzz", &lex, &list, policy).unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn batch_routes_unknown_words_to_ced_ped() {
        let lex = lex();
        let list = common("sheriff\nlegal\nshelled\n");
        assert!(generate_hints(&[], Strategy::Syllable, &lex, &list, SelectionPolicy::MinCed).is_empty());
        let out = generate_hints(
            &["shellez".to_string()],
            Strategy::Syllable,
            &lex,
            &list,
            SelectionPolicy::MinCed,
        );
        let e = out[0].as_ref().unwrap();
        assert_eq!(e.strategy, Strategy::CedPed);
        assert!(e.fallback);
        assert_eq!(e.hints, ["shelled"]);
        let out = generate_hints(
            &["hmm".to_string()],
            Strategy::Vowel,
            &lex,
            &list,
            SelectionPolicy::MinCed,
        );
        assert!(out[0].as_ref().unwrap().fallback);
    }

    #[test]
    fn bias_word_never_hints_itself() {
        let lex = lex();
        let list = common("shelley\nshelled\n");
        let e = ced_ped_hint("shelley", &lex, &list, SelectionPolicy::MinCed).unwrap();
        assert_eq!(e.hints, ["shelled"]);
    }

    #[test]
    fn json_shape() {
        let lex = lex();
        let e = syllable_hints("shelley", &lex, &common("sheriff\nlegal\n"), SelectionPolicy::MinCed).unwrap();
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(v["strategy"], "syl");
        assert_eq!(v["meta"][0]["syll"], 0);
        assert!(v["meta"][0].get("span").is_none());
        assert_eq!(e.to_tsv(), "shelley\tsheriff legal");
    }
}
