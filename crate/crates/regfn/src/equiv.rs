//! Bounded-word equivalence oracle.
//!
//! Two machines agree when they define the same transduction, rejection
//! included: a word one machine rejects and the other maps somewhere is a
//! counterexample. Enumeration is exhaustive in length-lexicographic order,
//! so the reported witness is minimal; a seeded random sampler covers longer
//! words when exhaustion is too expensive.

use crate::machines::{Alphabet, Evaluate, Symbol, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default seed of the random word sampler, fixed for reproducibility.
pub const DEFAULT_SAMPLE_SEED: u64 = 0x5eed;

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Equal,
    Counterexample {
        witness: Word,
        left: Option<Word>,
        right: Option<Word>,
    },
}

impl EquivVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, EquivVerdict::Equal)
    }
}

/// All words over `alphabet` of length at most `max_len`, in
/// length-lexicographic order following the alphabet's symbol order.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let mut all: Vec<Word> = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in alphabet.symbols() {
                let mut w2 = w.clone();
                w2.push(s.clone());
                next.push(w2);
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

fn compare_on(
    left: &impl Evaluate,
    right: &impl Evaluate,
    word: &[Symbol],
) -> Option<EquivVerdict> {
    let l = left.eval(word);
    let r = right.eval(word);
    if l == r {
        None
    } else {
        Some(EquivVerdict::Counterexample {
            witness: word.to_vec(),
            left: l,
            right: r,
        })
    }
}

/// Compares the machines on every word of length `0..=max_len`, returning
/// the first disagreement.
pub fn check_equiv(
    left: &impl Evaluate,
    right: &impl Evaluate,
    alphabet: &Alphabet,
    max_len: usize,
) -> EquivVerdict {
    for word in words_up_to(alphabet, max_len) {
        if let Some(verdict) = compare_on(left, right, &word) {
            return verdict;
        }
    }
    EquivVerdict::Equal
}

/// Compares the machines on `samples` uniformly random words of length up to
/// `max_len`, drawn from a seeded generator.
pub fn check_equiv_sampled(
    left: &impl Evaluate,
    right: &impl Evaluate,
    alphabet: &Alphabet,
    max_len: usize,
    samples: usize,
    seed: u64,
) -> EquivVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = alphabet.symbols();
    for _ in 0..samples {
        let len = rng.gen_range(0..=max_len);
        let word: Word = (0..len)
            .map(|_| symbols[rng.gen_range(0..symbols.len())].clone())
            .collect();
        if let Some(verdict) = compare_on(left, right, &word) {
            return verdict;
        }
    }
    EquivVerdict::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::machines::substitution::Piece;
    use crate::machines::word;

    #[test]
    fn the_two_block_doublers_agree_to_length_eight() {
        let two_way = fixtures::block_doubler_2dft();
        let streaming = fixtures::block_doubler_sst();
        assert!(check_equiv(&two_way, &streaming, &Alphabet::chars("ab"), 8).is_equal());
    }

    #[test]
    fn flipped_output_expression_is_caught_with_a_minimal_witness() {
        let original = fixtures::block_doubler_sst();
        let mut flipped = original.clone();
        flipped
            .output_fn
            .insert("q".into(), vec![Piece::var("Y"), Piece::var("X")]);
        let verdict = check_equiv(&original, &flipped, &Alphabet::chars("ab"), 3);
        match verdict {
            EquivVerdict::Counterexample {
                witness,
                left,
                right,
            } => {
                // on "a" the variables hold X = "a", Y = "b"
                assert_eq!(witness, word("a"));
                assert_eq!(left, Some(word("ab")));
                assert_eq!(right, Some(word("ba")));
            }
            EquivVerdict::Equal => panic!("expected a counterexample"),
        }
    }

    #[test]
    fn reflexivity() {
        let m = fixtures::block_doubler_sst();
        assert!(check_equiv(&m, &m, &Alphabet::chars("ab"), 4).is_equal());
    }

    #[test]
    fn symmetry_swaps_the_outputs() {
        let original = fixtures::block_doubler_sst();
        let mut broken = original.clone();
        broken.output_fn.insert("q".into(), vec![Piece::var("X")]);
        let alphabet = Alphabet::chars("ab");
        let v1 = check_equiv(&original, &broken, &alphabet, 3);
        let v2 = check_equiv(&broken, &original, &alphabet, 3);
        match (v1, v2) {
            (
                EquivVerdict::Counterexample {
                    witness: w1,
                    left: l1,
                    right: r1,
                },
                EquivVerdict::Counterexample {
                    witness: w2,
                    left: l2,
                    right: r2,
                },
            ) => {
                assert_eq!(w1, w2);
                assert_eq!(l1, r2);
                assert_eq!(r1, l2);
            }
            _ => panic!("expected counterexamples both ways"),
        }
    }

    #[test]
    fn equality_at_a_length_implies_equality_below_it() {
        let two_way = fixtures::block_doubler_2dft();
        let streaming = fixtures::block_doubler_sst();
        let alphabet = Alphabet::chars("ab");
        if check_equiv(&two_way, &streaming, &alphabet, 5).is_equal() {
            for shorter in 0..5 {
                assert!(check_equiv(&two_way, &streaming, &alphabet, shorter).is_equal());
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_and_finds_coarse_differences() {
        let original = fixtures::block_doubler_sst();
        let mut broken = original.clone();
        broken.output_fn.insert("q".into(), vec![]);
        let alphabet = Alphabet::chars("ab");
        let v1 = check_equiv_sampled(&original, &broken, &alphabet, 20, 50, DEFAULT_SAMPLE_SEED);
        let v2 = check_equiv_sampled(&original, &broken, &alphabet, 20, 50, DEFAULT_SAMPLE_SEED);
        assert_eq!(v1, v2);
        assert!(!v1.is_equal());
    }

    #[test]
    fn word_enumeration_is_length_lexicographic() {
        let words = words_up_to(&Alphabet::chars("ab"), 2);
        let rendered: Vec<String> = words.iter().map(|w| w.concat()).collect();
        assert_eq!(rendered, vec!["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(words_up_to(&Alphabet::chars("ab"), 10).len(), 2047);
    }
}
