//! Streaming string transducers.

use super::substitution::{OutputExpr, Substitution};
use super::validate::ValidationReport;
use super::{Alphabet, Evaluate, State, Symbol, Var, Word};
use std::collections::{BTreeMap, BTreeSet};

/// A deterministic one-way transducer with string-valued variables.
///
/// Every transition carries a substitution describing how the variables are
/// rewritten; `delta` and `update` are defined on exactly the same pairs.
/// The output of an accepting run is the final state's output expression with
/// variables replaced by their accumulated values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sst {
    pub input: Alphabet,
    pub output: Alphabet,
    pub states: Vec<State>,
    pub initial: State,
    pub finals: BTreeSet<State>,
    pub variables: Vec<Var>,
    pub delta: BTreeMap<(State, Symbol), State>,
    pub update: BTreeMap<(State, Symbol), Substitution>,
    pub output_fn: BTreeMap<State, OutputExpr>,
}

impl Sst {
    pub fn step(&self, state: &str, symbol: &str) -> Option<&State> {
        self.delta.get(&(state.to_string(), symbol.to_string()))
    }

    pub fn update_of(&self, state: &str, symbol: &str) -> Option<&Substitution> {
        self.update.get(&(state.to_string(), symbol.to_string()))
    }

    /// Runs the underlying automaton, returning the state sequence
    /// `q0 .. qn` or `None` on an undefined transition.
    pub fn state_trace(&self, input: &[Symbol]) -> Option<Vec<State>> {
        let mut trace = vec![self.initial.clone()];
        for a in input {
            let q = trace.last().unwrap();
            trace.push(self.step(q, a)?.clone());
        }
        Some(trace)
    }

    /// Composed substitution of the run on `input`, `None` if the run dies.
    pub fn run_substitution(&self, input: &[Symbol]) -> Option<Substitution> {
        let mut acc = Substitution::identity(&self.variables);
        let mut state = self.initial.clone();
        for a in input {
            let step = self.update_of(&state, a)?.clone();
            acc = acc.compose(&step);
            state = self.step(&state, a)?.clone();
        }
        Some(acc)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let known: BTreeSet<&State> = self.states.iter().collect();
        let vars: BTreeSet<&Var> = self.variables.iter().collect();
        if !known.contains(&self.initial) {
            report.push(
                "unknown state",
                format!("initial state \"{}\" is not declared", self.initial),
            );
        }
        for f in &self.finals {
            if !known.contains(f) {
                report.push(
                    "unknown state",
                    format!("final state \"{f}\" is not declared"),
                );
            }
        }
        for ((p, a), q) in &self.delta {
            if !known.contains(p) || !known.contains(q) {
                report.push(
                    "unknown state",
                    format!("transition ({p}, {a}) uses an undeclared state"),
                );
            }
            if !self.input.contains(a) {
                report.push(
                    "unknown symbol",
                    format!("transition ({p}, {a}) reads outside the input alphabet"),
                );
            }
            if !self.update.contains_key(&(p.clone(), a.clone())) {
                report.push(
                    "update domain",
                    format!("transition ({p}, {a}) has no variable update"),
                );
            }
        }
        for (p, a) in self.update.keys() {
            if !self.delta.contains_key(&(p.clone(), a.clone())) {
                report.push(
                    "update domain",
                    format!("update on ({p}, {a}) has no matching transition"),
                );
            }
        }
        for sub in self.update.values() {
            let dom: BTreeSet<&Var> = sub.domain().collect();
            if dom != vars {
                report.push(
                    "update domain",
                    "a substitution is not defined on exactly the variable set".to_string(),
                );
            }
            for (_, image) in sub.images() {
                for piece in image {
                    match piece {
                        super::Piece::Letter(s) if !self.output.contains(s) => {
                            report.push(
                                "unknown symbol",
                                format!("update writes \"{s}\" outside the output alphabet"),
                            );
                        }
                        super::Piece::Var(v) if !vars.contains(v) => {
                            report.push(
                                "unknown variable",
                                format!("update mentions undeclared variable \"{v}\""),
                            );
                        }
                        _ => {}
                    }
                }
            }
        }
        for (q, expr) in &self.output_fn {
            if !self.finals.contains(q) {
                report.push(
                    "output domain",
                    format!("output expression on non-final state \"{q}\""),
                );
            }
            for piece in expr {
                match piece {
                    super::Piece::Letter(s) if !self.output.contains(s) => {
                        report.push(
                            "unknown symbol",
                            format!("output expression writes \"{s}\" outside the output alphabet"),
                        );
                    }
                    super::Piece::Var(v) if !vars.contains(v) => {
                        report.push(
                            "unknown variable",
                            format!("output expression mentions undeclared variable \"{v}\""),
                        );
                    }
                    _ => {}
                }
            }
        }
        report
    }
}

impl Evaluate for Sst {
    fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        // Variable environment: each variable's current value, initially ε.
        let mut env: BTreeMap<Var, Word> = self
            .variables
            .iter()
            .map(|v| (v.clone(), Vec::new()))
            .collect();
        let mut state = self.initial.clone();
        for a in input {
            let sub = self.update_of(&state, a)?;
            let mut next_env = BTreeMap::new();
            for v in &self.variables {
                let image = sub.image(v).cloned().unwrap_or_default();
                let mut value = Vec::new();
                for piece in &image {
                    match piece {
                        super::Piece::Letter(s) => value.push(s.clone()),
                        super::Piece::Var(u) => {
                            value.extend(env.get(u).cloned().unwrap_or_default())
                        }
                    }
                }
                next_env.insert(v.clone(), value);
            }
            env = next_env;
            state = self.step(&state, a)?.clone();
        }
        if !self.finals.contains(&state) {
            return None;
        }
        let expr = self.output_fn.get(&state)?;
        let mut out = Vec::new();
        for piece in expr {
            match piece {
                super::Piece::Letter(s) => out.push(s.clone()),
                super::Piece::Var(v) => out.extend(env.get(v).cloned().unwrap_or_default()),
            }
        }
        Some(out)
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Debug, Clone)]
pub struct SstBuilder {
    machine: Sst,
}

impl SstBuilder {
    pub fn new(input: Alphabet, output: Alphabet, initial: &str, variables: &[&str]) -> Self {
        SstBuilder {
            machine: Sst {
                input,
                output,
                states: vec![initial.to_string()],
                initial: initial.to_string(),
                finals: BTreeSet::new(),
                variables: variables.iter().map(|v| v.to_string()).collect(),
                delta: BTreeMap::new(),
                update: BTreeMap::new(),
                output_fn: BTreeMap::new(),
            },
        }
    }

    pub fn state(mut self, name: &str) -> Self {
        if !self.machine.states.iter().any(|s| s == name) {
            self.machine.states.push(name.to_string());
        }
        self
    }

    pub fn final_state(mut self, name: &str, output: OutputExpr) -> Self {
        self = self.state(name);
        self.machine.finals.insert(name.to_string());
        self.machine.output_fn.insert(name.to_string(), output);
        self
    }

    pub fn rule(mut self, from: &str, on: &str, to: &str, update: Substitution) -> Self {
        self = self.state(from).state(to);
        let key = (from.to_string(), on.to_string());
        self.machine.delta.insert(key.clone(), to.to_string());
        self.machine.update.insert(key, update);
        self
    }

    pub fn build(self) -> Sst {
        self.machine
    }
}
