#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// CMUdict entries for the worked examples.
pub const CMU_FIXTURE: &str = "\
;;; entries copied from cmudict-0.7b
HEALTHY  HH EH1 L TH IY0
LEGAL  L IY1 G AH0 L
SHELLEY  SH EH1 L IY0
SHERIFF  SH EH1 R AH0 F
";

const VOWELS: &[(&str, &str)] = &[
    ("AA", "o"),
    ("AE", "a"),
    ("AH", "u"),
    ("AO", "aw"),
    ("AW", "ow"),
    ("AY", "i"),
    ("EH", "e"),
    ("ER", "er"),
    ("EY", "ay"),
    ("IH", "i"),
    ("IY", "ee"),
    ("OW", "oa"),
    ("OY", "oy"),
    ("UH", "oo"),
    ("UW", "ew"),
];

const ONSETS: &[(&str, &str)] = &[
    ("", ""),
    ("B", "b"),
    ("CH", "ch"),
    ("D", "d"),
    ("F", "f"),
    ("G", "g"),
    ("HH", "h"),
    ("JH", "j"),
    ("K", "k"),
    ("L", "l"),
    ("M", "m"),
    ("N", "n"),
    ("P", "p"),
    ("R", "r"),
    ("S", "s"),
    ("SH", "sh"),
    ("T", "t"),
    ("TH", "th"),
    ("V", "v"),
    ("W", "w"),
    ("Z", "z"),
    ("S T", "st"),
    ("P L", "pl"),
    ("T R", "tr"),
    ("K R", "cr"),
    ("S T R", "str"),
    ("B L", "bl"),
];

const CODAS: &[(&str, &str)] = &[
    ("", ""),
    ("", ""),
    ("N", "n"),
    ("T", "t"),
    ("L", "l"),
    ("K", "ck"),
    ("NG", "ng"),
    ("S", "ss"),
    ("M", "m"),
    ("R", "r"),
    ("D", "d"),
];

#[derive(Debug, Clone)]
pub struct SynthWord {
    pub spelling: String,
    pub pron: String,
}

/// Random pronounceable words with matching CMUdict-style pronunciations,
/// unique by spelling and excluding `taken`.
pub fn synth_words(n: usize, rng: &mut ChaCha8Rng, taken: &BTreeSet<String>) -> Vec<SynthWord> {
    let mut seen = taken.clone();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(1..=4);
        let mut spelling = String::new();
        let mut pron: Vec<String> = Vec::new();
        for i in 0..syllables {
            let (o, og) = ONSETS.choose(rng).unwrap();
            let (v, vg) = VOWELS.choose(rng).unwrap();
            let (c, cg) = CODAS.choose(rng).unwrap();
            spelling.push_str(og);
            spelling.push_str(vg);
            spelling.push_str(cg);
            pron.extend(o.split_whitespace().map(str::to_string));
            let stress = if i == 0 { 1 } else { rng.random_range(0..=2) };
            pron.push(format!("{v}{stress}"));
            pron.extend(c.split_whitespace().map(str::to_string));
        }
        if seen.insert(spelling.clone()) {
            out.push(SynthWord {
                spelling,
                pron: pron.join(" "),
            });
        }
    }
    out
}

pub fn to_cmudict(words: &[SynthWord]) -> String {
    words
        .iter()
        .map(|w| format!("{}  {}\n", w.spelling.to_uppercase(), w.pron))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Classic edit-distance recursion, memoized on suffix positions.
pub fn recursive_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], i: usize, j: usize, memo: &mut Vec<Vec<Option<usize>>>) -> usize {
        if let Some(v) = memo[i][j] {
            return v;
        }
        let v = if i == a.len() {
            b.len() - j
        } else if j == b.len() {
            a.len() - i
        } else {
            let sub = go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
            let del = go(a, b, i + 1, j, memo) + 1;
            let ins = go(a, b, i, j + 1, memo) + 1;
            sub.min(del).min(ins)
        };
        memo[i][j] = Some(v);
        v
    }
    let mut memo = vec![vec![None; b.len() + 1]; a.len() + 1];
    go(a, b, 0, 0, &mut memo)
}
