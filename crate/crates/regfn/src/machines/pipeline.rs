//! Pipelines: machine compositions evaluated stage by stage.

use super::validate::ValidationReport;
use super::{Alphabet, Evaluate, MachineError, SequentialTransducer, Symbol, TwoDft, Word};

/// One stage of a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Sequential(SequentialTransducer),
    TwoDft(TwoDft),
}

impl Stage {
    pub fn input_alphabet(&self) -> &Alphabet {
        match self {
            Stage::Sequential(m) => &m.input,
            Stage::TwoDft(m) => &m.input,
        }
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        match self {
            Stage::Sequential(m) => &m.output,
            Stage::TwoDft(m) => &m.output,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Sequential(_) => "sequential",
            Stage::TwoDft(_) => "2dft",
        }
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        match self {
            Stage::Sequential(m) => m.eval(input),
            Stage::TwoDft(m) => m.eval(input),
        }
    }
}

/// A chain of machines whose semantics is function composition.
///
/// When `end_token` is set, the runner appends that symbol to the external
/// input before the first stage; stages that need to see where the word ends
/// (such as the enrichers of the SST-to-two-way construction) rely on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    input: Alphabet,
    end_token: Option<Symbol>,
    stages: Vec<Stage>,
}

impl Pipeline {
    /// Builds a pipeline, checking that each stage's output alphabet matches
    /// the next stage's input alphabet. Alphabet mismatch is a construction
    /// error; evaluation never fails on alphabets.
    pub fn new(
        input: Alphabet,
        end_token: Option<Symbol>,
        stages: Vec<Stage>,
    ) -> Result<Self, MachineError> {
        if stages.is_empty() {
            return Err(MachineError::AlphabetMismatch(0, 0));
        }
        let mut expected: Vec<Symbol> = input.symbols().to_vec();
        if let Some(tok) = &end_token {
            expected.push(tok.clone());
        }
        let first = Alphabet::new(expected)?;
        if !first.same_symbols(stages[0].input_alphabet()) {
            return Err(MachineError::AlphabetMismatch(0, 1));
        }
        for i in 0..stages.len() - 1 {
            if !stages[i]
                .output_alphabet()
                .same_symbols(stages[i + 1].input_alphabet())
            {
                return Err(MachineError::AlphabetMismatch(i + 1, i + 2));
            }
        }
        Ok(Pipeline {
            input,
            end_token,
            stages,
        })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn end_token(&self) -> Option<&Symbol> {
        self.end_token.as_ref()
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        self.stages.last().unwrap().output_alphabet()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for stage in &self.stages {
            match stage {
                Stage::Sequential(m) => report.extend(m.validate()),
                Stage::TwoDft(m) => report.extend(m.validate()),
            }
        }
        report
    }
}

impl Evaluate for Pipeline {
    fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    fn eval(&self, input: &[Symbol]) -> Option<Word> {
        let mut current: Word = input.to_vec();
        if let Some(tok) = &self.end_token {
            current.push(tok.clone());
        }
        for stage in &self.stages {
            current = stage.eval(&current)?;
        }
        Some(current)
    }
}
