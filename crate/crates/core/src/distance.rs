//! Unit-cost Levenshtein distances over characters, phonemes and words.

use crate::lexicon::Pronunciation;

/// Levenshtein distance with unit insert, delete and substitute costs.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = if x == y { diag } else { diag + 1 };
            row[j + 1] = cost.min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Character-level edit distance. Callers case-fold beforehand.
pub fn ced(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein(&a, &b)
}

/// Phoneme-level edit distance over whole symbols, ignoring stress.
pub fn ped(a: &Pronunciation, b: &Pronunciation) -> usize {
    levenshtein(&a.symbols(), &b.symbols())
}
