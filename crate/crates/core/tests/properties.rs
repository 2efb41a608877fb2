use std::collections::BTreeSet;

use proptest::prelude::*;

use cuebias::biaslist::{build_bias_list, parse_prompt, render_prompt, BiasList, UtteranceRecord};
use cuebias::ctc::{ctc_loss_labels, log_softmax, Matrix, NUM_CLASSES};
use cuebias::distance::{ced, levenshtein};
use cuebias::hints::{HintEntry, Strategy as HintStrategy};
use cuebias::lexicon::{parse_lexicon, vowel_sequence, Lexicon, Phoneme, Pronunciation, Stress, Symbol};
use cuebias::syllable::syllabify;
use cuebias::tagging::{tag_transcript, untag, Tag, TagSequence};

fn phoneme() -> impl Strategy<Value = Phoneme> {
    (0..Symbol::ALL.len(), 0u8..3).prop_map(|(i, s)| {
        let sym = Symbol::ALL[i];
        if sym.is_vowel() {
            Phoneme::vowel(sym, Stress::new(s).unwrap()).unwrap()
        } else {
            Phoneme::consonant(sym).unwrap()
        }
    })
}

fn pronunciation() -> impl Strategy<Value = Pronunciation> {
    prop::collection::vec(phoneme(), 1..10).prop_map(|p| Pronunciation::new(p).unwrap())
}

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

proptest! {
    #[test]
    fn pronunciation_text_round_trip(p in pronunciation()) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Pronunciation>().unwrap(), p);
    }

    #[test]
    fn lexicon_round_trip(entries in prop::collection::btree_map(word(), prop::collection::vec(pronunciation(), 1..3), 1..8)) {
        let mut lex = Lexicon::new();
        for (w, prons) in &entries {
            for p in prons {
                lex.insert(w, p.clone());
            }
        }
        let back = parse_lexicon(&lex.to_cmudict()).unwrap();
        prop_assert_eq!(back, lex);
    }

    #[test]
    fn stress_marks_exactly_the_vowels(i in 0..Symbol::ALL.len(), s in 0u8..3) {
        let sym = Symbol::ALL[i];
        let stressed = format!("{sym}{s}").parse::<Phoneme>();
        let bare = sym.to_string().parse::<Phoneme>();
        prop_assert_eq!(stressed.is_ok(), sym.is_vowel());
        prop_assert_eq!(bare.is_ok(), !sym.is_vowel());
    }

    #[test]
    fn vowel_sequence_keeps_vowels_in_order(p in pronunciation()) {
        let expected: Vec<Symbol> = p.phonemes().iter().filter(|ph| ph.is_vowel()).map(|ph| ph.base()).collect();
        prop_assert_eq!(vowel_sequence(&p), expected);
    }

    #[test]
    fn syllables_recombine(p in pronunciation()) {
        let syls = syllabify(&p);
        prop_assert_eq!(syls.len(), p.vowel_count().max(1));
        let joined: Vec<Phoneme> = syls.iter().flat_map(|s| s.phonemes()).collect();
        prop_assert_eq!(joined.as_slice(), p.phonemes());
        if p.vowel_count() > 0 {
            prop_assert!(syls.iter().all(|s| s.nucleus.is_some_and(|n| n.is_vowel())));
        }
    }

    #[test]
    fn distances_are_metrics(a in "[a-d]{0,8}", b in "[a-d]{0,8}", c in "[a-d]{0,8}") {
        prop_assert_eq!(ced(&a, &a), 0);
        prop_assert_eq!(ced(&a, &b), ced(&b, &a));
        prop_assert!(ced(&a, &c) <= ced(&a, &b) + ced(&b, &c));
        prop_assert_eq!(ced(&a, &b) == 0, a == b);
        prop_assert!(ced(&a, &b) <= a.len().max(b.len()));
        prop_assert!(ced(&a, &b) >= a.len().abs_diff(b.len()));
    }

    #[test]
    fn phoneme_distance_ignores_stress(p in pronunciation(), q in pronunciation()) {
        prop_assert_eq!(cuebias::distance::ped(&p, &q), levenshtein(&p.symbols(), &q.symbols()));
    }

    #[test]
    fn ctc_probabilities_sum_to_one(frames in 1usize..=4, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..frames * NUM_CLASSES).map(|_| r.random_range(-3.0..3.0)).collect();
        let z = Matrix::from_vec(frames, NUM_CLASSES, data).unwrap();
        let mut total = 0.0;
        let mut frontier: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..=frames {
            let mut next = Vec::new();
            for labels in &frontier {
                if let Ok(out) = ctc_loss_labels(&z, labels) {
                    total += (-out.nll).exp();
                }
                for k in 1..NUM_CLASSES {
                    let mut l = labels.clone();
                    l.push(k);
                    next.push(l);
                }
            }
            frontier = next;
        }
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
    }

    #[test]
    fn softmax_rows_and_gradient_rows(frames in 1usize..6, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..frames * NUM_CLASSES).map(|_| r.random_range(-20.0..20.0)).collect();
        let z = Matrix::from_vec(frames, NUM_CLASSES, data).unwrap();
        let lp = log_softmax(&z);
        for t in 0..frames {
            let s: f64 = lp.row(t).iter().map(|x| x.exp()).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
        let out = ctc_loss_labels(&z, &[]).unwrap();
        prop_assert!(out.nll >= 0.0);
        for t in 0..frames {
            prop_assert!(out.grad.row(t).iter().sum::<f64>().abs() < 1e-9);
        }
    }

    #[test]
    fn prompt_parses_back(
        instruction in "[A-Za-z ,.]{0,30}",
        words in prop::collection::btree_set(word(), 0..6),
        with_hints in any::<bool>(),
        hint_words in prop::collection::vec(prop::collection::vec(word(), 1..4), 6),
    ) {
        let words: Vec<String> = words.into_iter().collect();
        let entries: Vec<HintEntry> = words
            .iter()
            .zip(&hint_words)
            .map(|(w, h)| HintEntry {
                bias: w.clone(),
                strategy: HintStrategy::Syllable,
                hints: h.clone(),
                fallback: false,
                meta: Vec::new(),
            })
            .collect();
        let list = BiasList::new(words.clone(), words.len());
        let rendered = render_prompt(&instruction, &list, with_hints.then_some(entries.as_slice())).unwrap();
        let parsed = parse_prompt(&rendered.text).unwrap();
        prop_assert_eq!(parsed, rendered.clone());
        let parsed_words: Vec<String> = rendered.entries.iter().map(|e| e.word.clone()).collect();
        prop_assert_eq!(parsed_words, words);
    }

    #[test]
    fn bias_list_invariants(
        text in prop::collection::vec("[a-f]{1,3}", 1..10),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
        extra in 0usize..20,
        seed in any::<u64>(),
    ) {
        let bias: Vec<String> = picks.iter().map(|i| i.get(&text).clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let rec = UtteranceRecord::new("u", &text.join(" "), &bias).unwrap();
        let pool: Vec<String> = (0..40).map(|i| format!("d{i}")).collect();
        let size = rec.bias_words.len() + extra;
        let list = build_bias_list(&rec, &pool, size, seed).unwrap();
        prop_assert_eq!(list.len(), size);
        prop_assert_eq!(list.relevant_count, rec.bias_words.len());
        prop_assert!(rec.bias_words.iter().all(|b| list.words.contains(b)));
        prop_assert_eq!(list.words.iter().collect::<BTreeSet<_>>().len(), size);
        prop_assert_eq!(build_bias_list(&rec, &pool, size, seed).unwrap(), list);
    }

    #[test]
    fn untag_round_trips(
        words in prop::collection::vec("[a-d]{1,3}", 1..12),
        entries in prop::collection::vec("[a-d]{1,3}( [a-d]{1,3}){0,2}", 0..4),
    ) {
        let text = words.join(" ");
        let tags = tag_transcript(&text, &entries);
        prop_assert_eq!(tags.len(), text.chars().count());
        let (bias, other) = untag(&text, &tags).unwrap();
        let mut rebuilt: Vec<Tag> = text.chars().map(|c| if c == ' ' { Tag::Space } else { Tag::NonBias }).collect();
        for span in &bias {
            prop_assert_eq!(&span.text, &text.chars().skip(span.start).take(span.end - span.start).collect::<String>());
            for (i, c) in span.text.chars().enumerate() {
                if c != ' ' {
                    rebuilt[span.start + i] = Tag::Bias;
                }
            }
        }
        prop_assert_eq!(TagSequence::new(rebuilt), tags);
        let covered: usize = bias.iter().chain(&other).map(|s| s.text.split(' ').count()).sum();
        prop_assert_eq!(covered, words.len());
    }
}
