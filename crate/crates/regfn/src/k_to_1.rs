//! From a k-bounded SST to an equivalent 1-bounded SST.
//!
//! The idea is to keep copies of each variable, but only as many as the rest
//! of the input will actually consume. How many times a variable's value
//! reaches the final output depends only on the flow-monoid image of the
//! remaining suffix, so the states are extended with a set of candidate
//! suffix classes (maintained backwards through the monoid), and each
//! variable is copied once per class and needed occurrence. Within one
//! suffix class the copies are assigned injectively, so no image repeats a
//! variable; distinct classes reuse the same copies but their variables are
//! never recombined, which is exactly 1-boundedness.

use crate::machines::substitution::{occurrences, OutputExpr, Piece, Substitution};
use crate::machines::{Sst, State, Var};
use crate::monoid::{CapExceeded, MonoidClosure};
use crate::sst_analysis::{check_k_bounded, ftm_closure, Coeff, CoeffBound, FlowMatrix};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KToOneError {
    #[error("machine is not {0}-bounded")]
    NotKBounded(u64),
    /// Some variable's value is needed more than k times by a final output,
    /// so k copies cannot cover it.
    #[error("variable {var} reaches the output {count} times from state {state}, more than the {k} copies available")]
    OutputCopiesExceeded {
        state: State,
        var: Var,
        count: usize,
        k: u64,
    },
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
}

/// Number of times the current value of `x` at state `q` reaches the final
/// output, given that the remaining suffix has flow image `elem`: the flows
/// of `x` into each variable of the suffix run, weighted by how often that
/// variable occurs in the target state's output expression.
///
/// `None` when `elem` has no run from `q`.
pub fn useful_count(
    t: &Sst,
    ftm: &MonoidClosure<FlowMatrix>,
    elem: usize,
    q: &str,
    x: &str,
) -> Option<usize> {
    let row = ftm.element(elem).rows.get(q)?;
    let output = t.output_fn.get(&row.target);
    let mut total = 0usize;
    for y in &t.variables {
        let flow = match row.counts.get(&(x.to_string(), y.clone())) {
            Some(Coeff::Fin(n)) => *n as usize,
            Some(Coeff::Omega) => usize::MAX / 2,
            None => 0,
        };
        if flow == 0 {
            continue;
        }
        let in_output = output.map(|expr| occurrences(expr, y)).unwrap_or(0);
        total += flow * in_output;
    }
    Some(total)
}

fn copy_name(x: &str, rank: usize, i: usize) -> Var {
    format!("{x}.m{rank}.{i}")
}

struct Builder {
    k: u64,
    ftm: MonoidClosure<FlowMatrix>,
    /// Canonical rank of each monoid element (by its serialized order).
    rank: Vec<usize>,
    /// Element indices sorted by rank, for deterministic iteration.
    by_rank: Vec<usize>,
}

impl Builder {
    fn state_name(&self, q: &str, suffixes: &BTreeSet<usize>) -> State {
        let ranks: Vec<String> = self
            .by_rank
            .iter()
            .filter(|e| suffixes.contains(e))
            .map(|e| format!("m{}", self.rank[*e]))
            .collect();
        format!("{q}@{{{}}}", ranks.join(","))
    }

    /// Relabels `image` for one target class: each variable occurrence takes
    /// the next copy of its source class, shared across the whole batch.
    fn relabel(
        &self,
        image: &[Piece],
        source_class: usize,
        counters: &mut BTreeMap<Var, usize>,
        origin: &State,
    ) -> Result<OutputExpr, KToOneError> {
        let rank = self.rank[source_class];
        let mut out = Vec::with_capacity(image.len());
        for piece in image {
            match piece {
                Piece::Letter(s) => out.push(Piece::Letter(s.clone())),
                Piece::Var(y) => {
                    let i = counters.entry(y.clone()).or_insert(0);
                    *i += 1;
                    if *i as u64 > self.k {
                        return Err(KToOneError::OutputCopiesExceeded {
                            state: origin.clone(),
                            var: y.clone(),
                            count: *i,
                            k: self.k,
                        });
                    }
                    out.push(Piece::Var(copy_name(y, rank, *i)));
                }
            }
        }
        Ok(out)
    }
}

/// The full copy-variable set: one copy per variable, flow element and index.
fn copy_variables(t: &Sst, elements: usize, k: u64) -> Vec<Var> {
    let mut vars = Vec::new();
    for x in &t.variables {
        for rank in 0..elements {
            for i in 1..=k as usize {
                vars.push(copy_name(x, rank, i));
            }
        }
    }
    vars
}

/// Builds the 1-bounded equivalent of a k-bounded machine, restricted to the
/// reachable extended states.
pub fn k_to_1(t: &Sst, k: u64, element_cap: usize) -> Result<Sst, KToOneError> {
    if !check_k_bounded(t, k) {
        return Err(KToOneError::NotKBounded(k));
    }
    let ftm = ftm_closure(t, CoeffBound::Cap(k), element_cap)?;

    let mut order: Vec<usize> = (0..ftm.len()).collect();
    order.sort_by_key(|&i| ftm.element(i).clone());
    let mut rank = vec![0usize; ftm.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let builder = Builder {
        k,
        ftm,
        rank,
        by_rank: order,
    };
    let ftm = &builder.ftm;

    // refuse machines whose output expressions fan a value out more than k
    // times; k copies cannot serve them
    for elem in 0..ftm.len() {
        for q in &t.states {
            for x in &t.variables {
                if let Some(count) = useful_count(t, ftm, elem, q, x) {
                    if count as u64 > k {
                        return Err(KToOneError::OutputCopiesExceeded {
                            state: q.clone(),
                            var: x.clone(),
                            count,
                            k,
                        });
                    }
                }
            }
        }
    }

    let accepting_class = |elem: usize, q: &str| -> bool {
        ftm.element(elem)
            .rows
            .get(q)
            .map(|row| t.finals.contains(&row.target) && t.output_fn.contains_key(&row.target))
            .unwrap_or(false)
    };

    let seed: BTreeSet<usize> = (0..ftm.len())
        .filter(|&m| accepting_class(m, &t.initial))
        .collect();
    let initial = (t.initial.clone(), seed);

    let all_variables = copy_variables(t, ftm.len(), k);
    let mut states: Vec<(State, BTreeSet<usize>)> = vec![initial.clone()];
    let mut seen: BTreeSet<(State, BTreeSet<usize>)> = BTreeSet::from([initial]);
    let mut delta = BTreeMap::new();
    let mut update = BTreeMap::new();
    let mut frontier = 0;
    while frontier < states.len() {
        let (q, suffixes) = states[frontier].clone();
        let from = builder.state_name(&q, &suffixes);
        for a in t.input.symbols() {
            let Some(q2) = t.step(&q, a) else { continue };
            let image_of_a = ftm
                .generator(a)
                .expect("every input symbol generates a flow element");
            let next_suffixes: BTreeSet<usize> = (0..ftm.len())
                .filter(|&n| suffixes.contains(&ftm.product(image_of_a, n)))
                .collect();
            let sub = t.update_of(&q, a).expect("update on a defined transition");

            let mut full = Substitution::blank(&all_variables);
            for &n in &builder.by_rank {
                if !next_suffixes.contains(&n) {
                    continue;
                }
                let source_class = ftm.product(image_of_a, n);
                let mut counters: BTreeMap<Var, usize> = BTreeMap::new();
                for x in &t.variables {
                    let needed = useful_count(t, ftm, n, q2, x)
                        .expect("suffix classes always have a run from the next state");
                    let image = sub.image(x).cloned().unwrap_or_default();
                    for i in 1..=needed {
                        let relabeled = builder.relabel(&image, source_class, &mut counters, &q)?;
                        full.set(copy_name(x, builder.rank[n], i), relabeled);
                    }
                }
            }

            let target = (q2.clone(), next_suffixes);
            if seen.insert(target.clone()) {
                states.push(target.clone());
            }
            let to = builder.state_name(&target.0, &target.1);
            delta.insert((from.clone(), a.clone()), to);
            update.insert((from.clone(), a.clone()), full);
        }
        frontier += 1;
    }

    let identity_rank = builder.rank[ftm.identity()];
    let mut finals = BTreeSet::new();
    let mut output_fn = BTreeMap::new();
    for (q, suffixes) in &states {
        if !suffixes.contains(&ftm.identity()) || !t.finals.contains(q) {
            continue;
        }
        let Some(expr) = t.output_fn.get(q) else {
            continue;
        };
        let name = builder.state_name(q, suffixes);
        let mut counters: BTreeMap<Var, usize> = BTreeMap::new();
        let mut relabeled = Vec::with_capacity(expr.len());
        for piece in expr {
            match piece {
                Piece::Letter(s) => relabeled.push(Piece::Letter(s.clone())),
                Piece::Var(x) => {
                    let i = counters.entry(x.clone()).or_insert(0);
                    *i += 1;
                    relabeled.push(Piece::Var(copy_name(x, identity_rank, *i)));
                }
            }
        }
        finals.insert(name.clone());
        output_fn.insert(name, relabeled);
    }

    Ok(Sst {
        input: t.input.clone(),
        output: t.output.clone(),
        states: states
            .iter()
            .map(|(q, s)| builder.state_name(q, s))
            .collect(),
        initial: builder.state_name(&states[0].0, &states[0].1),
        finals,
        variables: all_variables,
        delta,
        update,
        output_fn,
    })
}
