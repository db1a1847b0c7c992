//! JSON machine documents.
//!
//! Every machine kind serializes to a JSON object with a `kind`
//! discriminator. Words and substitution images are written as strings when
//! every relevant symbol is a single character (`"ab"`, `"${X}a${Y}b"`,
//! variables in `${...}` escapes) and as explicit symbol arrays otherwise.
//! The endmarkers are written as the reserved names `BEGIN` and `END`, which
//! no alphabet may contain.
//!
//! Parsing validates the machine and reports every violation; a document
//! that round-trips is structurally identical to the machine it came from.

use crate::machines::sequential::Direction;
use crate::machines::substitution::{OutputExpr, Piece, Substitution};
use crate::machines::twodft::StartSide;
use crate::machines::{
    Alphabet, Machine, MachineError, Move, Pipeline, SequentialTransducer, Sst, Stage, Symbol,
    Tape, TwoDft, ValidationReport, Var, Word, BEGIN_NAME, END_NAME,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid machine: {0}")]
    Validation(ValidationReport),
}

impl From<MachineError> for FormatError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::MalformedMachine(report) => FormatError::Validation(report),
            MachineError::AlphabetMismatch(i, j) => {
                let mut report = ValidationReport::default();
                report.push(
                    "alphabet mismatch",
                    format!("pipeline stages {i} and {j} disagree on their interface alphabet"),
                );
                FormatError::Validation(report)
            }
        }
    }
}

/// A word or expression: compact text or an explicit token list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Tokens {
    Text(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
struct Metadata {
    #[serde(skip_serializing_if = "String::is_empty")]
    name: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    notes: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TwoDftRule {
    from: String,
    on: String,
    write: Tokens,
    to: String,
    #[serde(rename = "move")]
    movement: i8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SstRule {
    from: String,
    on: String,
    to: String,
    update: BTreeMap<String, Tokens>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeqRule {
    from: String,
    on: String,
    to: String,
    write: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum Doc {
    #[serde(rename = "2dft")]
    TwoDft {
        #[serde(default, skip_serializing_if = "meta_empty")]
        metadata: Metadata,
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        states: Vec<String>,
        initial: String,
        finals: Vec<String>,
        start_side: String,
        transitions: Vec<TwoDftRule>,
    },
    #[serde(rename = "sst")]
    Sst {
        #[serde(default, skip_serializing_if = "meta_empty")]
        metadata: Metadata,
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        states: Vec<String>,
        initial: String,
        finals: Vec<String>,
        variables: Vec<String>,
        transitions: Vec<SstRule>,
        output_fn: BTreeMap<String, Tokens>,
    },
    #[serde(rename = "sequential")]
    Sequential {
        #[serde(default, skip_serializing_if = "meta_empty")]
        metadata: Metadata,
        direction: String,
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        states: Vec<String>,
        initial: String,
        transitions: Vec<SeqRule>,
    },
    #[serde(rename = "pipeline")]
    Pipeline {
        #[serde(default, skip_serializing_if = "meta_empty")]
        metadata: Metadata,
        input_alphabet: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end_token: Option<String>,
        stages: Vec<Doc>,
    },
}

fn meta_empty(m: &Metadata) -> bool {
    m.name.is_empty() && m.notes.is_empty()
}

fn compact_symbols(alphabet: &Alphabet) -> bool {
    alphabet.symbols().iter().all(|s| s.chars().count() == 1)
}

fn write_word(word: &[Symbol], alphabet: &Alphabet) -> Tokens {
    if compact_symbols(alphabet) {
        Tokens::Text(word.concat())
    } else {
        Tokens::List(word.to_vec())
    }
}

fn write_expr(expr: &[Piece], alphabet: &Alphabet, vars: &[Var]) -> Tokens {
    let vars_safe = vars.iter().all(|v| !v.contains('}'));
    if compact_symbols(alphabet) && vars_safe {
        Tokens::Text(expr.iter().map(|p| p.to_string()).collect())
    } else {
        Tokens::List(
            expr.iter()
                .map(|p| match p {
                    Piece::Letter(s) => s.clone(),
                    Piece::Var(v) => format!("${{{v}}}"),
                })
                .collect(),
        )
    }
}

/// Longest-match tokenization of `text` against the alphabet, with `${...}`
/// escapes marking variables when `vars` is given.
fn parse_tokens_text(
    text: &str,
    alphabet: &Alphabet,
    vars: Option<&BTreeSet<&Var>>,
    context: &str,
) -> Result<OutputExpr, FormatError> {
    let mut symbols: Vec<&Symbol> = alphabet.symbols().iter().collect();
    symbols.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut rest = text;
    let mut out = Vec::new();
    while !rest.is_empty() {
        if let Some(tail) = rest.strip_prefix("${") {
            let Some(end) = tail.find('}') else {
                return Err(FormatError::Parse(format!(
                    "{context}: unterminated variable escape in {text:?}"
                )));
            };
            let name = &tail[..end];
            match vars {
                Some(vars) if vars.contains(&name.to_string()) => {
                    out.push(Piece::var(name));
                }
                Some(_) => {
                    return Err(FormatError::Parse(format!(
                        "{context}: unknown variable \"{name}\" in {text:?}"
                    )))
                }
                None => {
                    return Err(FormatError::Parse(format!(
                        "{context}: variable escape not allowed in {text:?}"
                    )))
                }
            }
            rest = &tail[end + 1..];
            continue;
        }
        match symbols.iter().find(|s| rest.starts_with(s.as_str())) {
            Some(s) => {
                out.push(Piece::letter(s.as_str()));
                rest = &rest[s.len()..];
            }
            None => {
                return Err(FormatError::Parse(format!(
                    "{context}: cannot match {rest:?} against the alphabet"
                )))
            }
        }
    }
    Ok(out)
}

fn parse_expr(
    tokens: &Tokens,
    alphabet: &Alphabet,
    vars: Option<&BTreeSet<&Var>>,
    context: &str,
) -> Result<OutputExpr, FormatError> {
    match tokens {
        Tokens::Text(text) => parse_tokens_text(text, alphabet, vars, context),
        Tokens::List(items) => {
            let mut out = Vec::new();
            for item in items {
                if let Some(tail) = item.strip_prefix("${") {
                    let Some(name) = tail.strip_suffix('}') else {
                        return Err(FormatError::Parse(format!(
                            "{context}: malformed variable escape {item:?}"
                        )));
                    };
                    match vars {
                        Some(vars) if vars.contains(&name.to_string()) => {
                            out.push(Piece::var(name))
                        }
                        Some(_) => {
                            return Err(FormatError::Parse(format!(
                                "{context}: unknown variable \"{name}\""
                            )))
                        }
                        None => {
                            return Err(FormatError::Parse(format!(
                                "{context}: variable escape not allowed here"
                            )))
                        }
                    }
                } else {
                    out.push(Piece::letter(item.as_str()));
                }
            }
            Ok(out)
        }
    }
}

fn parse_word(tokens: &Tokens, alphabet: &Alphabet, context: &str) -> Result<Word, FormatError> {
    let expr = parse_expr(tokens, alphabet, None, context)?;
    Ok(expr
        .into_iter()
        .map(|p| match p {
            Piece::Letter(s) => s,
            Piece::Var(_) => unreachable!("variables rejected above"),
        })
        .collect())
}

fn parse_tape(on: &str) -> Tape {
    match on {
        BEGIN_NAME => Tape::Begin,
        END_NAME => Tape::End,
        other => Tape::letter(other),
    }
}

fn tape_name(tape: &Tape) -> String {
    tape.to_string()
}

fn parse_move(movement: i8, context: &str) -> Result<Move, FormatError> {
    match movement {
        -1 => Ok(Move::Left),
        0 => Ok(Move::Stay),
        1 => Ok(Move::Right),
        other => Err(FormatError::Parse(format!(
            "{context}: move must be -1, 0 or 1, got {other}"
        ))),
    }
}

fn validated(machine: Machine) -> Result<Machine, FormatError> {
    let report = machine.validate();
    if report.is_empty() {
        Ok(machine)
    } else {
        Err(FormatError::Validation(report))
    }
}

fn machine_from_doc(doc: Doc) -> Result<Machine, FormatError> {
    match doc {
        Doc::TwoDft {
            input_alphabet,
            output_alphabet,
            states,
            initial,
            finals,
            start_side,
            transitions,
            ..
        } => {
            let input = Alphabet::new(input_alphabet)?;
            let output = Alphabet::new(output_alphabet)?;
            let start_side = match start_side.as_str() {
                "left" => StartSide::Left,
                "right" => StartSide::Right,
                other => {
                    return Err(FormatError::Parse(format!(
                        "start_side must be \"left\" or \"right\", got {other:?}"
                    )))
                }
            };
            let mut delta = BTreeMap::new();
            for (i, rule) in transitions.iter().enumerate() {
                let context = format!("transitions[{i}]");
                let key = (rule.from.clone(), parse_tape(&rule.on));
                let write = parse_word(&rule.write, &output, &context)?;
                let movement = parse_move(rule.movement, &context)?;
                if delta
                    .insert(key, (write, rule.to.clone(), movement))
                    .is_some()
                {
                    return Err(FormatError::Parse(format!(
                        "{context}: duplicate transition ({}, {})",
                        rule.from, rule.on
                    )));
                }
            }
            validated(Machine::TwoDft(TwoDft {
                input,
                output,
                states,
                initial,
                finals: finals.into_iter().collect(),
                delta,
                start_side,
            }))
        }
        Doc::Sst {
            input_alphabet,
            output_alphabet,
            states,
            initial,
            finals,
            variables,
            transitions,
            output_fn,
            ..
        } => {
            let input = Alphabet::new(input_alphabet)?;
            let output = Alphabet::new(output_alphabet)?;
            let var_set: BTreeSet<&Var> = variables.iter().collect();
            let mut delta = BTreeMap::new();
            let mut update = BTreeMap::new();
            for (i, rule) in transitions.iter().enumerate() {
                let context = format!("transitions[{i}]");
                let key = (rule.from.clone(), rule.on.clone());
                if delta.insert(key.clone(), rule.to.clone()).is_some() {
                    return Err(FormatError::Parse(format!(
                        "{context}: duplicate transition ({}, {})",
                        rule.from, rule.on
                    )));
                }
                let mut sub = Substitution::default();
                for (var, tokens) in &rule.update {
                    let image = parse_expr(
                        tokens,
                        &output,
                        Some(&var_set),
                        &format!("{context}.update.{var}"),
                    )?;
                    sub.set(var.clone(), image);
                }
                update.insert(key, sub);
            }
            let mut outputs = BTreeMap::new();
            for (state, tokens) in &output_fn {
                let expr = parse_expr(
                    tokens,
                    &output,
                    Some(&var_set),
                    &format!("output_fn.{state}"),
                )?;
                outputs.insert(state.clone(), expr);
            }
            validated(Machine::Sst(Sst {
                input,
                output,
                states,
                initial,
                finals: finals.into_iter().collect(),
                variables,
                delta,
                update,
                output_fn: outputs,
            }))
        }
        Doc::Sequential {
            direction,
            input_alphabet,
            output_alphabet,
            states,
            initial,
            transitions,
            ..
        } => {
            let direction = match direction.as_str() {
                "left-to-right" => Direction::LeftToRight,
                "right-to-left" => Direction::RightToLeft,
                other => {
                    return Err(FormatError::Parse(format!(
                        "direction must be \"left-to-right\" or \"right-to-left\", got {other:?}"
                    )))
                }
            };
            let input = Alphabet::new(input_alphabet)?;
            let output = Alphabet::new(output_alphabet)?;
            let mut delta = BTreeMap::new();
            for (i, rule) in transitions.iter().enumerate() {
                let key = (rule.from.clone(), rule.on.clone());
                if delta
                    .insert(key, (rule.to.clone(), rule.write.clone()))
                    .is_some()
                {
                    return Err(FormatError::Parse(format!(
                        "transitions[{i}]: duplicate transition ({}, {})",
                        rule.from, rule.on
                    )));
                }
            }
            validated(Machine::Sequential(SequentialTransducer {
                direction,
                input,
                output,
                states,
                initial,
                delta,
            }))
        }
        Doc::Pipeline {
            input_alphabet,
            end_token,
            stages,
            ..
        } => {
            let input = Alphabet::new(input_alphabet)?;
            let mut built = Vec::new();
            for (i, stage) in stages.into_iter().enumerate() {
                match machine_from_doc(stage)? {
                    Machine::Sequential(m) => built.push(Stage::Sequential(m)),
                    Machine::TwoDft(m) => built.push(Stage::TwoDft(m)),
                    other => {
                        return Err(FormatError::Parse(format!(
                            "stages[{i}]: pipelines may only contain sequential and 2dft stages, got {}",
                            other.kind()
                        )))
                    }
                }
            }
            let pipeline = Pipeline::new(input, end_token, built)?;
            validated(Machine::Pipeline(pipeline))
        }
    }
}

fn doc_from_machine(machine: &Machine) -> Doc {
    match machine {
        Machine::TwoDft(m) => Doc::TwoDft {
            metadata: Metadata::default(),
            input_alphabet: m.input.symbols().to_vec(),
            output_alphabet: m.output.symbols().to_vec(),
            states: m.states.clone(),
            initial: m.initial.clone(),
            finals: m.finals.iter().cloned().collect(),
            start_side: match m.start_side {
                StartSide::Left => "left".to_string(),
                StartSide::Right => "right".to_string(),
            },
            transitions: m
                .delta
                .iter()
                .map(|((from, on), (write, to, movement))| TwoDftRule {
                    from: from.clone(),
                    on: tape_name(on),
                    write: write_word(write, &m.output),
                    to: to.clone(),
                    movement: movement.offset() as i8,
                })
                .collect(),
        },
        Machine::Sst(m) => Doc::Sst {
            metadata: Metadata::default(),
            input_alphabet: m.input.symbols().to_vec(),
            output_alphabet: m.output.symbols().to_vec(),
            states: m.states.clone(),
            initial: m.initial.clone(),
            finals: m.finals.iter().cloned().collect(),
            variables: m.variables.clone(),
            transitions: m
                .delta
                .iter()
                .map(|((from, on), to)| SstRule {
                    from: from.clone(),
                    on: on.clone(),
                    to: to.clone(),
                    update: m
                        .update
                        .get(&(from.clone(), on.clone()))
                        .map(|sub| {
                            sub.images()
                                .map(|(v, image)| {
                                    (v.clone(), write_expr(image, &m.output, &m.variables))
                                })
                                .collect()
                        })
                        .unwrap_or_default(),
                })
                .collect(),
            output_fn: m
                .output_fn
                .iter()
                .map(|(q, expr)| (q.clone(), write_expr(expr, &m.output, &m.variables)))
                .collect(),
        },
        Machine::Sequential(m) => Doc::Sequential {
            metadata: Metadata::default(),
            direction: match m.direction {
                Direction::LeftToRight => "left-to-right".to_string(),
                Direction::RightToLeft => "right-to-left".to_string(),
            },
            input_alphabet: m.input.symbols().to_vec(),
            output_alphabet: m.output.symbols().to_vec(),
            states: m.states.clone(),
            initial: m.initial.clone(),
            transitions: m
                .delta
                .iter()
                .map(|((from, on), (to, write))| SeqRule {
                    from: from.clone(),
                    on: on.clone(),
                    to: to.clone(),
                    write: write.clone(),
                })
                .collect(),
        },
        Machine::Pipeline(m) => Doc::Pipeline {
            metadata: Metadata::default(),
            input_alphabet: m.input().symbols().to_vec(),
            end_token: m.end_token().cloned(),
            stages: m
                .stages()
                .iter()
                .map(|stage| match stage {
                    Stage::Sequential(s) => doc_from_machine(&Machine::Sequential(s.clone())),
                    Stage::TwoDft(s) => doc_from_machine(&Machine::TwoDft(s.clone())),
                })
                .collect(),
        },
    }
}

/// Parses and validates a machine document.
pub fn parse_machine(text: &str) -> Result<Machine, FormatError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
    machine_from_doc(doc)
}

/// Serializes a machine as a pretty-printed document.
pub fn serialize_machine(machine: &Machine) -> String {
    serde_json::to_string_pretty(&doc_from_machine(machine)).expect("documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::machines::Evaluate;

    #[test]
    fn fixtures_round_trip_structurally() {
        for (name, machine) in fixtures::all() {
            let text = serialize_machine(&machine);
            let back = parse_machine(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, machine, "{name} did not round-trip");
        }
    }

    #[test]
    fn pipelines_round_trip() {
        let pipeline =
            crate::sst_to_2dft::sst_to_2dft(&fixtures::block_doubler_sst(), false).unwrap();
        let machine = Machine::Pipeline(pipeline);
        let text = serialize_machine(&machine);
        let back = parse_machine(&text).unwrap();
        assert_eq!(back, machine);
        assert_eq!(
            back.eval(&crate::machines::word("aab")),
            Some(crate::machines::word("aabb"))
        );
    }

    #[test]
    fn parsed_block_doubler_has_the_expected_shape() {
        let text = serialize_machine(&Machine::Sst(fixtures::block_doubler_sst()));
        let Machine::Sst(m) = parse_machine(&text).unwrap() else {
            panic!("expected an sst");
        };
        assert_eq!(m.states.len(), 1);
        assert_eq!(m.variables.len(), 2);
    }

    #[test]
    fn duplicate_transitions_are_a_parse_error() {
        let text = r#"{
            "kind": "sequential",
            "direction": "left-to-right",
            "input_alphabet": ["a"],
            "output_alphabet": ["a"],
            "states": ["i"],
            "initial": "i",
            "transitions": [
                {"from": "i", "on": "a", "to": "i", "write": "a"},
                {"from": "i", "on": "a", "to": "i", "write": "a"}
            ]
        }"#;
        match parse_machine(text) {
            Err(FormatError::Parse(message)) => assert!(message.contains("duplicate transition")),
            other => panic!("expected a duplicate-transition error, got {other:?}"),
        }
    }

    #[test]
    fn reserved_alphabet_names_are_rejected() {
        let text = r#"{
            "kind": "sequential",
            "direction": "left-to-right",
            "input_alphabet": ["a", "END"],
            "output_alphabet": ["a"],
            "states": ["i"],
            "initial": "i",
            "transitions": []
        }"#;
        match parse_machine(text) {
            Err(FormatError::Validation(report)) => {
                assert!(report
                    .violations()
                    .iter()
                    .any(|v| v.code == "reserved symbol"));
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variables_in_updates_are_rejected() {
        let text = r#"{
            "kind": "sst",
            "input_alphabet": ["a"],
            "output_alphabet": ["a"],
            "states": ["q"],
            "initial": "q",
            "finals": ["q"],
            "variables": ["X"],
            "transitions": [
                {"from": "q", "on": "a", "to": "q", "update": {"X": "${Z}a"}}
            ],
            "output_fn": {"q": "${X}"}
        }"#;
        assert!(matches!(parse_machine(text), Err(FormatError::Parse(_))));
    }

    #[test]
    fn multi_character_symbols_use_token_lists() {
        let machine = Machine::Sequential(fixtures::parity_relabeler());
        let text = serialize_machine(&machine);
        assert!(text.contains("(a,0)"));
        assert_eq!(parse_machine(&text).unwrap(), machine);
    }
}
