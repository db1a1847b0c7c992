//! Finite monoid closures generated from per-symbol elements, with
//! aperiodicity-index computation.
//!
//! The closure is generic over the element type; callers supply a canonical
//! (`Ord`) element encoding so that set membership is exact. Saturation is
//! breadth first from the identity and the generators, and the full Cayley
//! table is filled in afterwards.

use crate::machines::{State, Symbol};
use std::collections::BTreeMap;

/// Default bound on the number of elements materialized before giving up.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// Raised when a closure grows past its element cap, which signals a
/// (possibly) infinite monoid.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("monoid closure exceeded the element cap of {cap}")]
pub struct CapExceeded {
    pub cap: usize,
}

/// Verdict of the aperiodicity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aperiodicity {
    /// Least `n >= 1` with `x^n = x^(n+1)` for every element.
    Aperiodic { index: usize },
    /// Some element's powers enter a cycle longer than one.
    NotAperiodic,
}

impl Aperiodicity {
    pub fn index(self) -> Option<usize> {
        match self {
            Aperiodicity::Aperiodic { index } => Some(index),
            Aperiodicity::NotAperiodic => None,
        }
    }
}

/// A finite monoid generated by the images of the alphabet symbols.
#[derive(Debug, Clone)]
pub struct MonoidClosure<E> {
    elements: Vec<E>,
    index: BTreeMap<E, usize>,
    generators: BTreeMap<Symbol, usize>,
    identity: usize,
    cayley: Vec<Vec<usize>>,
}

impl<E: Ord + Clone> MonoidClosure<E> {
    /// Saturates the set generated by `generators` under `product`.
    ///
    /// `product` must be associative on the element domain; this is assumed,
    /// not checked. Fails with [`CapExceeded`] when more than `element_cap`
    /// distinct elements appear.
    pub fn generate(
        generators: BTreeMap<Symbol, E>,
        identity: E,
        mut product: impl FnMut(&E, &E) -> E,
        element_cap: usize,
    ) -> Result<Self, CapExceeded> {
        let mut elements: Vec<E> = Vec::new();
        let mut index: BTreeMap<E, usize> = BTreeMap::new();
        let add = |e: E,
                   elements: &mut Vec<E>,
                   index: &mut BTreeMap<E, usize>|
         -> Result<usize, CapExceeded> {
            if let Some(&i) = index.get(&e) {
                return Ok(i);
            }
            if elements.len() >= element_cap {
                return Err(CapExceeded { cap: element_cap });
            }
            let i = elements.len();
            elements.push(e.clone());
            index.insert(e, i);
            Ok(i)
        };

        let identity_idx = add(identity, &mut elements, &mut index)?;
        let mut generator_idx: BTreeMap<Symbol, usize> = BTreeMap::new();
        for (sym, e) in generators {
            let i = add(e, &mut elements, &mut index)?;
            generator_idx.insert(sym, i);
        }
        let gen_indices: Vec<usize> = {
            let mut v: Vec<usize> = generator_idx.values().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };

        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            for &g in &gen_indices {
                let next = product(&current, &elements[g]);
                add(next, &mut elements, &mut index)?;
            }
            frontier += 1;
        }

        let n = elements.len();
        let mut cayley = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = product(&elements[i], &elements[j]);
                cayley[i][j] = *index
                    .get(&p)
                    .expect("product of closure elements left the closure; product is not associative over the generators");
            }
        }

        Ok(MonoidClosure {
            elements,
            index,
            generators: generator_idx,
            identity: identity_idx,
            cayley,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn generator(&self, symbol: &str) -> Option<usize> {
        self.generators.get(symbol).copied()
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j]
    }

    /// Image of a word under the generator morphism.
    pub fn eval_word<S: AsRef<str>>(&self, word: &[S]) -> Option<usize> {
        let mut acc = self.identity;
        for s in word {
            let g = self.generator(s.as_ref())?;
            acc = self.product(acc, g);
        }
        Some(acc)
    }

    /// Least `n >= 1` with `x^n = x^(n+1)` for all `x`, if it exists.
    ///
    /// Powers of each element are walked until they repeat; a repeat that is
    /// not a fixpoint is a cycle of length at least two, which rules
    /// aperiodicity out.
    pub fn aperiodicity(&self) -> Aperiodicity {
        let mut index = 1usize;
        for x in 0..self.elements.len() {
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            let mut power = x;
            let mut n = 1usize;
            loop {
                let next = self.product(power, x);
                if next == power {
                    index = index.max(n);
                    break;
                }
                if seen.insert(power, n).is_some() {
                    return Aperiodicity::NotAperiodic;
                }
                power = next;
                n += 1;
            }
        }
        Aperiodicity::Aperiodic { index }
    }
}

/// A partial function on states, the transition-monoid element of a
/// deterministic one-way automaton.
pub type StateFn = BTreeMap<State, State>;

/// Transition monoid of a deterministic one-way automaton given by `step`.
///
/// Elements are partial state maps; missing entries mean the automaton dies.
pub fn state_function_monoid(
    states: &[State],
    symbols: &[Symbol],
    step: impl Fn(&State, &Symbol) -> Option<State>,
    element_cap: usize,
) -> Result<MonoidClosure<StateFn>, CapExceeded> {
    let identity: StateFn = states.iter().map(|q| (q.clone(), q.clone())).collect();
    let mut generators = BTreeMap::new();
    for a in symbols {
        let f: StateFn = states
            .iter()
            .filter_map(|q| step(q, a).map(|r| (q.clone(), r)))
            .collect();
        generators.insert(a.clone(), f);
    }
    MonoidClosure::generate(generators, identity, compose_state_fns, element_cap)
}

fn compose_state_fns(first: &StateFn, second: &StateFn) -> StateFn {
    first
        .iter()
        .filter_map(|(q, mid)| second.get(mid).map(|r| (q.clone(), r.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mod_add_monoid(modulus: u8) -> MonoidClosure<u8> {
        let mut generators = BTreeMap::new();
        generators.insert("g".to_string(), 1u8);
        MonoidClosure::generate(generators, 0u8, |a, b| (a + b) % modulus, 100).unwrap()
    }

    #[test]
    fn idempotent_generator_gives_two_elements() {
        let mut generators = BTreeMap::new();
        generators.insert("g".to_string(), "g".to_string());
        let closure = MonoidClosure::generate(
            generators,
            "e".to_string(),
            |a, b| {
                if a == "e" {
                    b.clone()
                } else if b == "e" {
                    a.clone()
                } else {
                    "g".to_string()
                }
            },
            10,
        )
        .unwrap();
        assert_eq!(closure.len(), 2);
        assert_eq!(closure.aperiodicity(), Aperiodicity::Aperiodic { index: 1 });
    }

    #[test]
    fn trivial_monoid_has_index_one() {
        let closure = MonoidClosure::generate(BTreeMap::new(), 0u8, |_, _| 0u8, 10).unwrap();
        assert_eq!(closure.len(), 1);
        assert_eq!(closure.aperiodicity(), Aperiodicity::Aperiodic { index: 1 });
    }

    #[test]
    fn two_element_group_is_not_aperiodic() {
        let closure = mod_add_monoid(2);
        assert_eq!(closure.len(), 2);
        assert_eq!(closure.aperiodicity(), Aperiodicity::NotAperiodic);
    }

    #[test]
    fn cap_is_enforced() {
        let mut generators = BTreeMap::new();
        generators.insert("g".to_string(), 1u64);
        let result = MonoidClosure::generate(generators, 0u64, |a, b| a + b, 50);
        assert_eq!(result.unwrap_err(), CapExceeded { cap: 50 });
    }

    #[test]
    fn index_is_tight_when_aperiodic() {
        // saturating addition up to 3: g^3 = g^4 but g^2 != g^3
        let mut generators = BTreeMap::new();
        generators.insert("g".to_string(), 1u8);
        let closure = MonoidClosure::generate(generators, 0u8, |a, b| (a + b).min(3), 100).unwrap();
        let aperiodicity = closure.aperiodicity();
        assert_eq!(aperiodicity, Aperiodicity::Aperiodic { index: 3 });
        // the returned index is the least one: every element stabilizes at 3
        // and some element still moves at 2
        let g = closure.generator("g").unwrap();
        let pow = |k: usize| (0..k).fold(closure.identity(), |acc, _| closure.product(acc, g));
        assert_eq!(pow(3), pow(4));
        assert_ne!(pow(2), pow(3));
    }

    proptest! {
        #[test]
        fn generator_map_extends_to_a_morphism(
            u in prop::collection::vec(prop::sample::select(vec!["g"]), 0..8),
            v in prop::collection::vec(prop::sample::select(vec!["g"]), 0..8),
        ) {
            let closure = mod_add_monoid(5);
            let uv: Vec<&str> = u.iter().chain(v.iter()).copied().collect();
            let eval = |w: &[&str]| closure.eval_word(w).unwrap();
            prop_assert_eq!(eval(&uv), closure.product(eval(&u), eval(&v)));
        }
    }
}
