//! Character-level bias / non-bias / whitespace tags for a transcript.
//!
//! Positions are counted in Unicode scalar values (`char`s). Bias entries
//! match whole tokens only, so `ann` never tags part of `annual`. When
//! entries overlap, longer entries (in tokens) claim first, then the
//! leftmost occurrence wins.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::fold_case;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TagError {
    #[error("tag length {tags} does not match transcript length {text}")]
    LengthMismatch { tags: usize, text: usize },
    #[error("invalid tag character `{0}`")]
    InvalidTag(char),
    #[error("tags disagree with the transcript at character {0}")]
    Misaligned(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Bias,
    NonBias,
    Space,
}

impl Tag {
    pub fn as_char(self) -> char {
        match self {
            Tag::Bias => 'b',
            Tag::NonBias => 'n',
            Tag::Space => 's',
        }
    }

    pub fn from_char(c: char) -> Result<Self, TagError> {
        match c {
            'b' => Ok(Tag::Bias),
            'n' => Ok(Tag::NonBias),
            's' => Ok(Tag::Space),
            other => Err(TagError::InvalidTag(other)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TagSequence(Vec<Tag>);

impl TagSequence {
    pub fn new(tags: Vec<Tag>) -> Self {
        TagSequence(tags)
    }

    pub fn tags(&self) -> &[Tag] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TagSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|t| write!(f, "{}", t.as_char()))
    }
}

impl FromStr for TagSequence {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars().map(Tag::from_char).collect::<Result<_, _>>().map(TagSequence)
    }
}

impl Serialize for TagSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TagSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Lowercases and collapses whitespace runs to single spaces.
pub fn normalize(text: &str) -> String {
    fold_case(text).split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace-delimited tokens with their starting char offsets.
pub fn tokens(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (char_pos, (byte, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some((cp, bp)) = start.take() {
                out.push((cp, &text[bp..byte]));
            }
        } else if start.is_none() {
            start = Some((char_pos, byte));
        }
    }
    if let Some((cp, bp)) = start {
        out.push((cp, &text[bp..]));
    }
    out
}

/// Token index ranges where `entry` occurs as a whole-token sequence.
pub fn find_occurrences<S: AsRef<str>>(words: &[S], entry: &str) -> Vec<std::ops::Range<usize>> {
    let needle: Vec<String> = normalize(entry).split(' ').map(str::to_string).collect();
    if needle.iter().all(|t| t.is_empty()) || needle.len() > words.len() {
        return Vec::new();
    }
    (0..=words.len() - needle.len())
        .filter(|&i| needle.iter().zip(&words[i..]).all(|(n, w)| fold_case(w.as_ref()) == *n))
        .map(|i| i..i + needle.len())
        .collect()
}

/// Non-overlapping occurrences of `entries` in `words`, claimed
/// longest-entry-first then leftmost, returned in text order.
pub fn match_entries<S: AsRef<str>, E: AsRef<str>>(words: &[S], entries: &[E]) -> Vec<std::ops::Range<usize>> {
    let mut order: Vec<(usize, String)> = entries
        .iter()
        .map(|e| normalize(e.as_ref()))
        .filter(|e| !e.is_empty())
        .map(|e| (e.split(' ').count(), e))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.len().cmp(&a.1.len())).then(a.1.cmp(&b.1)));
    order.dedup();

    let mut claimed = vec![false; words.len()];
    let mut found = Vec::new();
    for (_, entry) in &order {
        for r in find_occurrences(words, entry) {
            if claimed[r.clone()].iter().all(|c| !c) {
                claimed[r.clone()].iter_mut().for_each(|c| *c = true);
                found.push(r);
            }
        }
    }
    found.sort_by_key(|r| r.start);
    found
}

/// Per-token bias flags under [`match_entries`].
pub fn bias_token_mask<S: AsRef<str>, E: AsRef<str>>(words: &[S], entries: &[E]) -> Vec<bool> {
    let mut mask = vec![false; words.len()];
    for r in match_entries(words, entries) {
        mask[r].iter_mut().for_each(|m| *m = true);
    }
    mask
}

pub fn tag_transcript<E: AsRef<str>>(transcript: &str, entries: &[E]) -> TagSequence {
    let toks = tokens(transcript);
    let words: Vec<&str> = toks.iter().map(|(_, w)| *w).collect();
    let mask = bias_token_mask(&words, entries);
    let mut tags: Vec<Tag> = transcript
        .chars()
        .map(|c| if c.is_whitespace() { Tag::Space } else { Tag::NonBias })
        .collect();
    for ((start, word), is_bias) in toks.iter().zip(mask) {
        if is_bias {
            let len = word.chars().count();
            tags[*start..start + len].iter_mut().for_each(|t| *t = Tag::Bias);
        }
    }
    TagSequence(tags)
}

/// A span of the transcript in char offsets, `end` exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// Recovers bias and non-bias spans: maximal runs of same-class tokens
/// separated by single whitespace runs. Adjacent bias occurrences
/// therefore come back as one span.
pub fn untag(transcript: &str, tags: &TagSequence) -> Result<(Vec<Span>, Vec<Span>), TagError> {
    let chars: Vec<char> = transcript.chars().collect();
    if chars.len() != tags.len() {
        return Err(TagError::LengthMismatch {
            tags: tags.len(),
            text: chars.len(),
        });
    }
    for (i, (c, t)) in chars.iter().zip(tags.tags()).enumerate() {
        if c.is_whitespace() != (*t == Tag::Space) {
            return Err(TagError::Misaligned(i));
        }
    }

    let mut bias = Vec::new();
    let mut other = Vec::new();
    let mut current: Option<(Tag, usize, usize)> = None;
    for (start, word) in tokens(transcript) {
        let end = start + word.chars().count();
        let class = tags.tags()[start];
        if tags.tags()[start..end].iter().any(|t| *t != class) {
            return Err(TagError::Misaligned(start));
        }
        current = match current {
            Some((c, s, _)) if c == class => Some((c, s, end)),
            Some(prev) => {
                push_span(&chars, prev, &mut bias, &mut other);
                Some((class, start, end))
            }
            None => Some((class, start, end)),
        };
    }
    if let Some(prev) = current {
        push_span(&chars, prev, &mut bias, &mut other);
    }
    Ok((bias, other))
}

fn push_span(chars: &[char], (class, start, end): (Tag, usize, usize), bias: &mut Vec<Span>, other: &mut Vec<Span>) {
    let span = Span {
        start,
        end,
        text: chars[start..end].iter().collect(),
    };
    if class == Tag::Bias {
        bias.push(span);
    } else {
        other.push(span);
    }
}
