//! Shared helpers for the integration suites: the direct block-doubler
//! formula and a seeded generator of small random machines.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use regfn::machines::substitution::{Piece, Substitution};
use regfn::machines::{Alphabet, Sst, Symbol};
use regfn::monoid::Aperiodicity;
use regfn::sst_analysis::{check_k_bounded, ftm_closure, CoeffBound};
use std::collections::{BTreeMap, BTreeSet};

/// Direct implementation of the block doubler: after each maximal block of
/// `a`s, a block of `b`s of the same length; separator `b`s are consumed.
pub fn block_doubler_formula(input: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::new();
    let mut run = 0usize;
    for s in input.iter().chain(std::iter::once(&"b".to_string())) {
        if s == "a" {
            run += 1;
        } else {
            out.extend(std::iter::repeat_n("a".to_string(), run));
            out.extend(std::iter::repeat_n("b".to_string(), run));
            run = 0;
        }
    }
    out
}

/// Random machines over `{a, b}` with at most 3 states and 3 variables,
/// kept only when k-bounded for some k <= 2 with an aperiodic flow monoid.
/// Returns each machine with its least bound k.
pub fn bounded_aperiodic_corpus(count: usize, seed: u64) -> Vec<(Sst, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::new();
    let mut attempts = 0;
    while corpus.len() < count && attempts < 50_000 {
        attempts += 1;
        let machine = random_sst(&mut rng);
        if !machine.validate().is_empty() {
            continue;
        }
        let Some(k) = (1..=2).find(|&k| check_k_bounded(&machine, k)) else {
            continue;
        };
        let Ok(ftm) = ftm_closure(&machine, CoeffBound::Cap(k), 100_000) else {
            continue;
        };
        if !matches!(ftm.aperiodicity(), Aperiodicity::Aperiodic { .. }) {
            continue;
        }
        corpus.push((machine, k));
    }
    corpus
}

fn random_sst(rng: &mut ChaCha8Rng) -> Sst {
    let all_states = ["p", "q", "r"];
    let all_vars = ["X", "Y", "Z"];
    let letters = ["a", "b"];
    let states: Vec<String> = all_states[..rng.gen_range(1..=3)]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let vars: Vec<String> = all_vars[..rng.gen_range(1..=3)]
        .iter()
        .map(|s| s.to_string())
        .collect();

    let random_expr = |rng: &mut ChaCha8Rng, max_len: usize| {
        let len = rng.gen_range(0..=max_len);
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Piece::letter(letters[rng.gen_range(0..2)])
                } else {
                    Piece::var(vars[rng.gen_range(0..vars.len())].clone())
                }
            })
            .collect::<Vec<_>>()
    };

    let mut delta = BTreeMap::new();
    let mut update = BTreeMap::new();
    for state in &states {
        for letter in letters {
            if !rng.gen_bool(0.85) {
                continue;
            }
            let target = states[rng.gen_range(0..states.len())].clone();
            let mut sub = Substitution::default();
            for var in &vars {
                let image = random_expr(rng, 2);
                sub.set(var.clone(), image);
            }
            let key = (state.clone(), letter.to_string());
            delta.insert(key.clone(), target);
            update.insert(key, sub);
        }
    }

    let mut finals = BTreeSet::new();
    let mut output_fn = BTreeMap::new();
    for state in &states {
        if rng.gen_bool(0.5) {
            finals.insert(state.clone());
            if rng.gen_bool(0.9) {
                output_fn.insert(state.clone(), random_expr(rng, 3));
            }
        }
    }

    Sst {
        input: Alphabet::chars("ab"),
        output: Alphabet::chars("ab"),
        states: states.clone(),
        initial: states[0].clone(),
        finals,
        variables: vars,
        delta,
        update,
        output_fn,
    }
}
