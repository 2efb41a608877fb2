//! Maximal-onset syllabification of ARPAbet pronunciations.
//!
//! Intervocalic consonant clusters are split so that the following syllable
//! receives the longest suffix of the cluster that is a legal English onset;
//! the rest closes the preceding syllable. Word-initial consonants always form
//! the first onset and word-final consonants the last coda.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::lexicon::{LexiconError, Phoneme, Pronunciation, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub onset: Vec<Phoneme>,
    /// `None` only for the degenerate syllable of a vowel-free pronunciation.
    pub nucleus: Option<Phoneme>,
    pub coda: Vec<Phoneme>,
}

impl Syllable {
    pub fn is_degenerate(&self) -> bool {
        self.nucleus.is_none()
    }

    pub fn phonemes(&self) -> Vec<Phoneme> {
        let mut out = self.onset.clone();
        out.extend(self.nucleus);
        out.extend(self.coda.iter().copied());
        out
    }

    /// Stress-stripped onset and nucleus, plus the coda when `with_coda`.
    pub fn key(&self, with_coda: bool) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.onset.iter().map(|p| p.base()).collect();
        out.extend(self.nucleus.map(|p| p.base()));
        if with_coda || self.is_degenerate() {
            out.extend(self.coda.iter().map(|p| p.base()));
        }
        out
    }
}

/// Whether the coda takes part in syllable comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CodaMode {
    /// Coda kept only for a word's final syllable (so a monosyllable is
    /// compared whole and a non-final syllable as onset+nucleus).
    #[default]
    Auto,
    Always,
    Never,
}

impl CodaMode {
    pub fn includes_coda(self, syllable_index: usize, syllable_count: usize) -> bool {
        match self {
            CodaMode::Auto => syllable_index + 1 == syllable_count,
            CodaMode::Always => true,
            CodaMode::Never => false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown coda mode `{0}` (expected auto, always or never)")]
pub struct UnknownCodaMode(String);

impl FromStr for CodaMode {
    type Err = UnknownCodaMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(CodaMode::Auto),
            "always" => Ok(CodaMode::Always),
            "never" => Ok(CodaMode::Never),
            other => Err(UnknownCodaMode(other.to_string())),
        }
    }
}

const DEFAULT_ONSETS: &[&str] = &[
    // every consonant but NG is a legal single onset
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z",
    "ZH", "P R", "T R", "K R", "B R", "D R", "G R", "F R", "TH R", "SH R", "P L", "K L", "B L", "G L", "F L", "S L",
    "T W", "D W", "K W", "G W", "S W", "TH W", "P Y", "B Y", "K Y", "G Y", "F Y", "V Y", "M Y", "HH Y", "S P", "S T",
    "S K", "S M", "S N", "S F", "S T R", "S P R", "S K R", "S P L", "S K L", "S K W", "S P Y", "S K Y",
];

/// Set of consonant clusters allowed at the start of a syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnsetTable {
    onsets: BTreeSet<Vec<Symbol>>,
}

impl Default for OnsetTable {
    fn default() -> Self {
        Self::parse(&DEFAULT_ONSETS.join("\n")).expect("built-in onset table is valid")
    }
}

impl OnsetTable {
    /// One onset per line as space-separated symbols, e.g. `S T R`.
    pub fn parse(source: &str) -> Result<Self, LexiconError> {
        let mut onsets = BTreeSet::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            let cluster = line
                .split_whitespace()
                .map(|tok| match tok.parse::<Symbol>() {
                    Ok(s) if !s.is_vowel() => Ok(s),
                    _ => Err(LexiconError::MalformedLine {
                        line_no: idx + 1,
                        reason: format!("`{tok}` is not a consonant symbol"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            onsets.insert(cluster);
        }
        Ok(OnsetTable { onsets })
    }

    pub fn is_legal(&self, cluster: &[Symbol]) -> bool {
        cluster.is_empty() || self.onsets.contains(cluster)
    }

    /// Number of trailing consonants of `cluster` that form the longest legal onset.
    fn onset_len(&self, cluster: &[Phoneme]) -> usize {
        let symbols: Vec<Symbol> = cluster.iter().map(|p| p.base()).collect();
        (0..=symbols.len())
            .rev()
            .find(|&n| self.is_legal(&symbols[symbols.len() - n..]))
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Syllabifier {
    onsets: OnsetTable,
}

impl Syllabifier {
    pub fn new(onsets: OnsetTable) -> Self {
        Syllabifier { onsets }
    }

    pub fn syllabify(&self, p: &Pronunciation) -> Vec<Syllable> {
        let phonemes = p.phonemes();
        let nuclei: Vec<usize> = phonemes
            .iter()
            .enumerate()
            .filter(|(_, ph)| ph.is_vowel())
            .map(|(i, _)| i)
            .collect();
        if nuclei.is_empty() {
            return vec![Syllable {
                onset: phonemes.to_vec(),
                nucleus: None,
                coda: Vec::new(),
            }];
        }

        let mut syllables: Vec<Syllable> = Vec::with_capacity(nuclei.len());
        let mut onset = phonemes[..nuclei[0]].to_vec();
        for (k, &v) in nuclei.iter().enumerate() {
            let next = nuclei.get(k + 1).copied().unwrap_or(phonemes.len());
            let cluster = &phonemes[v + 1..next];
            let split = if k + 1 == nuclei.len() {
                cluster.len()
            } else {
                cluster.len() - self.onsets.onset_len(cluster)
            };
            syllables.push(Syllable {
                onset: std::mem::take(&mut onset),
                nucleus: Some(phonemes[v]),
                coda: cluster[..split].to_vec(),
            });
            onset = cluster[split..].to_vec();
        }
        syllables
    }

    /// Comparison key of the first syllable under `mode`.
    pub fn first_syllable_key(&self, p: &Pronunciation, mode: CodaMode) -> Vec<Symbol> {
        let syllables = self.syllabify(p);
        syllables[0].key(mode.includes_coda(0, syllables.len()))
    }
}

pub fn syllabify(p: &Pronunciation) -> Vec<Syllable> {
    Syllabifier::default().syllabify(p)
}

/// First syllable with stress removed, coda included only for monosyllables.
pub fn first_syllable_phonemes(p: &Pronunciation) -> Vec<Symbol> {
    Syllabifier::default().first_syllable_key(p, CodaMode::Auto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Symbol::*;

    fn pron(s: &str) -> Pronunciation {
        s.parse().unwrap()
    }

    fn show(syl: &Syllable) -> String {
        let join = |v: &[Phoneme]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
        format!(
            "{}|{}|{}",
            join(&syl.onset),
            syl.nucleus.map(|p| p.to_string()).unwrap_or_default(),
            join(&syl.coda)
        )
    }

    #[test]
    fn shelley_splits_before_l() {
        let s = syllabify(&pron("SH EH1 L IY0"));
        let shown: Vec<String> = s.iter().map(show).collect();
        assert_eq!(shown, ["SH|EH1|", "L|IY0|"]);
    }

    #[test]
    fn monosyllable_keeps_everything() {
        let s = syllabify(&pron("K AE1 T"));
        assert_eq!(s.len(), 1);
        assert_eq!(show(&s[0]), "K|AE1|T");
        assert_eq!(first_syllable_phonemes(&pron("K AE1 T")), vec![K, AE, T]);
    }

    #[test]
    fn vowel_free_is_degenerate() {
        let s = syllabify(&pron("SH"));
        assert_eq!(s.len(), 1);
        assert!(s[0].is_degenerate());
        assert_eq!(first_syllable_phonemes(&pron("SH")), vec![SH]);
    }

    #[test]
    fn sheriff_first_syllable_drops_r() {
        assert_eq!(first_syllable_phonemes(&pron("SH EH1 R AH0 F")), vec![SH, EH]);
    }

    #[test]
    fn illegal_cluster_splits() {
        // L TH is not an onset, TH is.
        let s = syllabify(&pron("HH EH1 L TH IY0"));
        let shown: Vec<String> = s.iter().map(show).collect();
        assert_eq!(shown, ["HH|EH1|L", "TH|IY0|"]);
        // NG never starts a syllable.
        let s = syllabify(&pron("S IH1 NG ER0"));
        let shown: Vec<String> = s.iter().map(show).collect();
        assert_eq!(shown, ["S|IH1|NG", "|ER0|"]);
        // Maximal onset keeps S T R together.
        let s = syllabify(&pron("EH1 K S T R AH0"));
        let shown: Vec<String> = s.iter().map(show).collect();
        assert_eq!(shown, ["|EH1|K", "S T R|AH0|"]);
    }

    #[test]
    fn coda_modes() {
        let p = pron("HH EH1 L TH IY0");
        let syl = Syllabifier::default();
        assert_eq!(syl.first_syllable_key(&p, CodaMode::Auto), vec![HH, EH]);
        assert_eq!(syl.first_syllable_key(&p, CodaMode::Always), vec![HH, EH, L]);
        assert_eq!(syl.first_syllable_key(&pron("K AE1 T"), CodaMode::Never), vec![K, AE]);
        assert_eq!("always".parse::<CodaMode>().unwrap(), CodaMode::Always);
        assert!("sometimes".parse::<CodaMode>().is_err());
    }

    #[test]
    fn custom_onset_table() {
        let table = OnsetTable::parse("L\nL TH\n").unwrap();
        let syl = Syllabifier::new(table);
        let s = syl.syllabify(&pron("HH EH1 L TH IY0"));
        assert_eq!(show(&s[0]), "HH|EH1|");
        assert_eq!(show(&s[1]), "L TH|IY0|");
        assert!(OnsetTable::parse("EH").is_err());
    }
}
