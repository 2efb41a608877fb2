//! Pronunciation dictionaries (CMUdict format) and common-word lists.
//!
//! The lexicon is the only grapheme-to-phoneme source in this crate: a word
//! either has a dictionary entry or it has no pronunciation at all.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line_no}: {reason}")]
    MalformedLine { line_no: usize, reason: String },
    #[error("unknown ARPAbet symbol `{0}`")]
    UnknownSymbol(String),
    #[error("empty pronunciation")]
    EmptyPronunciation,
}

macro_rules! arpabet {
    ($( $variant:ident => $text:literal, $vowel:literal; )*) => {
        /// One of the 39 ARPAbet phoneme symbols, without stress.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum Symbol {
            $( $variant, )*
        }

        impl Symbol {
            pub const ALL: [Symbol; 39] = [ $( Symbol::$variant, )* ];

            pub fn as_str(self) -> &'static str {
                match self {
                    $( Symbol::$variant => $text, )*
                }
            }

            pub fn is_vowel(self) -> bool {
                match self {
                    $( Symbol::$variant => $vowel, )*
                }
            }
        }

        impl FromStr for Symbol {
            type Err = LexiconError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $( $text => Ok(Symbol::$variant), )*
                    other => Err(LexiconError::UnknownSymbol(other.to_string())),
                }
            }
        }
    };
}

arpabet! {
    AA => "AA", true;
    AE => "AE", true;
    AH => "AH", true;
    AO => "AO", true;
    AW => "AW", true;
    AY => "AY", true;
    EH => "EH", true;
    ER => "ER", true;
    EY => "EY", true;
    IH => "IH", true;
    IY => "IY", true;
    OW => "OW", true;
    OY => "OY", true;
    UH => "UH", true;
    UW => "UW", true;
    B => "B", false;
    CH => "CH", false;
    D => "D", false;
    DH => "DH", false;
    F => "F", false;
    G => "G", false;
    HH => "HH", false;
    JH => "JH", false;
    K => "K", false;
    L => "L", false;
    M => "M", false;
    N => "N", false;
    NG => "NG", false;
    P => "P", false;
    R => "R", false;
    S => "S", false;
    SH => "SH", false;
    T => "T", false;
    TH => "TH", false;
    V => "V", false;
    W => "W", false;
    Y => "Y", false;
    Z => "Z", false;
    ZH => "ZH", false;
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lexical stress on a vowel: 0 (none), 1 (primary) or 2 (secondary).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stress(u8);

impl Stress {
    pub fn new(level: u8) -> Option<Self> {
        (level <= 2).then_some(Stress(level))
    }

    pub fn level(self) -> u8 {
        self.0
    }
}

/// A phoneme as it appears in a dictionary entry. Vowels always carry
/// stress and consonants never do; the constructors enforce this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phoneme {
    base: Symbol,
    stress: Option<Stress>,
}

impl Phoneme {
    pub fn vowel(base: Symbol, stress: Stress) -> Option<Self> {
        base.is_vowel().then_some(Phoneme {
            base,
            stress: Some(stress),
        })
    }

    pub fn consonant(base: Symbol) -> Option<Self> {
        (!base.is_vowel()).then_some(Phoneme { base, stress: None })
    }

    pub fn base(self) -> Symbol {
        self.base
    }

    pub fn stress(self) -> Option<Stress> {
        self.stress
    }

    pub fn is_vowel(self) -> bool {
        self.base.is_vowel()
    }
}

impl FromStr for Phoneme {
    type Err = LexiconError;

    /// Parses `EH1`, `SH`, etc.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || LexiconError::UnknownSymbol(s.to_string());
        let (head, digit) = match s.as_bytes().last() {
            Some(b) if b.is_ascii_digit() => (&s[..s.len() - 1], Some(b - b'0')),
            _ => (s, None),
        };
        let base: Symbol = head.parse().map_err(|_| unknown())?;
        match digit {
            Some(d) => Phoneme::vowel(base, Stress::new(d).ok_or_else(unknown)?),
            None => Phoneme::consonant(base),
        }
        .ok_or_else(unknown)
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stress {
            Some(s) => write!(f, "{}{}", self.base, s.level()),
            None => write!(f, "{}", self.base),
        }
    }
}

/// A non-empty phoneme sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pronunciation(Vec<Phoneme>);

impl Pronunciation {
    pub fn new(phonemes: Vec<Phoneme>) -> Result<Self, LexiconError> {
        if phonemes.is_empty() {
            return Err(LexiconError::EmptyPronunciation);
        }
        Ok(Pronunciation(phonemes))
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Stress-stripped symbols, in order.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.0.iter().map(|p| p.base()).collect()
    }

    pub fn vowel_count(&self) -> usize {
        self.0.iter().filter(|p| p.is_vowel()).count()
    }
}

impl FromStr for Pronunciation {
    type Err = LexiconError;

    /// Whitespace-separated phonemes, e.g. `SH EH1 L IY0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let phonemes = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<Phoneme>, _>>()?;
        Pronunciation::new(phonemes)
    }
}

impl fmt::Display for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// The vowels of `p` with stress removed, order preserved.
pub fn vowel_sequence(p: &Pronunciation) -> Vec<Symbol> {
    p.phonemes()
        .iter()
        .filter(|ph| ph.is_vowel())
        .map(|ph| ph.base())
        .collect()
}

/// Simple lowercase mapping used for every word key in the crate.
pub fn fold_case(word: &str) -> String {
    word.to_lowercase()
}

/// Case-folded word → pronunciations, primary first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Pronunciation>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a pronunciation for `word`; the first one inserted is primary.
    pub fn insert(&mut self, word: &str, pron: Pronunciation) {
        self.entries.entry(fold_case(word)).or_default().push(pron);
    }

    pub fn lookup(&self, word: &str) -> &[Pronunciation] {
        self.entries.get(&fold_case(word)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn primary(&self, word: &str) -> Option<&Pronunciation> {
        self.lookup(word).first()
    }

    pub fn contains(&self, word: &str) -> bool {
        !self.lookup(word).is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Pronunciation])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// CMUdict-format text: `word  PH PH ...`, variants as `word(2)`.
    pub fn to_cmudict(&self) -> String {
        let mut out = String::new();
        for (word, prons) in &self.entries {
            for (i, p) in prons.iter().enumerate() {
                if i == 0 {
                    out.push_str(word);
                } else {
                    out.push_str(&format!("{word}({})", i + 1));
                }
                out.push_str("  ");
                out.push_str(&p.to_string());
                out.push('\n');
            }
        }
        out
    }
}

/// Strips a trailing `(n)` variant marker.
fn strip_variant(word: &str) -> &str {
    if let Some(open) = word.rfind('(') {
        let inner = &word[open + 1..];
        if let Some(digits) = inner.strip_suffix(')') {
            if open > 0 && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return &word[..open];
            }
        }
    }
    word
}

/// Parses CMUdict-format text. Lines starting with `;;;` and blank lines
/// are skipped; line numbers in errors are 1-based.
pub fn parse_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with(";;;") {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-empty line has a field");
        let phonemes = fields
            .map(|tok| {
                tok.parse::<Phoneme>().map_err(|_| LexiconError::MalformedLine {
                    line_no,
                    reason: format!("unknown ARPAbet symbol `{tok}`"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let pron = Pronunciation::new(phonemes).map_err(|_| LexiconError::MalformedLine {
            line_no,
            reason: format!("word `{word}` has no phonemes"),
        })?;
        lex.insert(strip_variant(word), pron);
    }
    Ok(lex)
}

/// Ordered, deduplicated, case-folded common words with the bias words removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommonWordList {
    words: Vec<String>,
    excluded: BTreeSet<String>,
}

impl CommonWordList {
    pub fn new<I, S>(words: I, exclude: &BTreeSet<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let excluded: BTreeSet<String> = exclude.iter().map(|w| fold_case(w)).collect();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for w in words {
            let w = fold_case(w.as_ref().trim());
            if w.is_empty() || excluded.contains(&w) || !seen.insert(w.clone()) {
                continue;
            }
            out.push(w);
        }
        CommonWordList { words: out, excluded }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn excluded(&self) -> &BTreeSet<String> {
        &self.excluded
    }

    pub fn contains(&self, word: &str) -> bool {
        let w = fold_case(word);
        self.words.contains(&w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// One word per line; blank lines skipped.
pub fn parse_common_list(source: &str, exclude: &BTreeSet<String>) -> CommonWordList {
    CommonWordList::new(source.lines(), exclude)
}
