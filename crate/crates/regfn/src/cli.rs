//! Command-line surface.
//!
//! Exit codes: `0` success, `1` negative verdict (rejection, inequivalence,
//! failed aperiodicity or boundedness), `2` usage, parse or validation
//! error. Reports are deterministic `key: value` lines so they diff cleanly.

use crate::behaviors::transition_monoid_2dft;
use crate::equiv::{check_equiv, check_equiv_sampled, EquivVerdict, DEFAULT_SAMPLE_SEED};
use crate::machines::{
    render_word, Evaluate, Machine, Pipeline, SequentialTransducer, Sst, Symbol, TwoDft, Word,
};
use crate::monoid::{
    state_function_monoid, Aperiodicity, CapExceeded, MonoidClosure, DEFAULT_ELEMENT_CAP,
};
use crate::sst_analysis::{check_copyless, check_k_bounded, ftm_closure, stm_closure, CoeffBound};
use crate::{fixtures, format, k_to_1, sst_to_2dft, twodft_to_sst};
use clap::{Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Result of one command invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: String,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            exit_code: 0,
            report,
        }
    }

    fn negative(report: String) -> Self {
        Outcome {
            exit_code: 1,
            report,
        }
    }

    fn usage(message: String) -> Self {
        Outcome {
            exit_code: 2,
            report: message,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "regfn",
    version,
    about = "Two-way and streaming string transducers: evaluation, monoid analysis, conversions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a machine on a word.
    Run {
        /// Machine document (JSON).
        machine: PathBuf,
        /// Input word: characters, or whitespace-separated symbols.
        word: String,
    },
    /// Report transition monoids, aperiodicity, boundedness and copylessness.
    Analyze {
        machine: PathBuf,
        /// Abort monoid closures past this many elements.
        #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
        element_cap: usize,
        /// Largest k tried by the boundedness sweep.
        #[arg(long, default_value_t = 4)]
        max_k: u64,
    },
    /// Convert a machine and write the result.
    Convert {
        #[arg(long = "to", value_enum)]
        to: Target,
        /// Bound used by the 1bounded-sst target.
        #[arg(long, default_value_t = 2)]
        k: u64,
        /// Skip the useful-variables stage (copyless machines only).
        #[arg(long)]
        skip_useful_vars: bool,
        machine: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ELEMENT_CAP)]
        element_cap: usize,
    },
    /// Compare two machines on every word up to a length.
    CheckEquiv {
        m1: PathBuf,
        m2: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Additionally compare on this many random longer words.
        #[arg(long)]
        sample: Option<usize>,
        /// Length bound for sampled words.
        #[arg(long, default_value_t = 20)]
        sample_len: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
    /// Write the bundled machine documents into a directory.
    Examples {
        #[arg(long)]
        emit: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    #[value(name = "2dft-pipeline")]
    TwoDftPipeline,
    #[value(name = "copyless-sst")]
    CopylessSst,
    #[value(name = "1bounded-sst")]
    OneBoundedSst,
}

/// Runs one command; `args` excludes the program name.
pub fn run_command<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("regfn".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return Outcome {
                exit_code: code,
                report: e.to_string(),
            };
        }
    };
    match cli.command {
        Command::Run { machine, word } => run(&machine, &word),
        Command::Analyze {
            machine,
            element_cap,
            max_k,
        } => analyze(&machine, element_cap, max_k),
        Command::Convert {
            to,
            k,
            skip_useful_vars,
            machine,
            out,
            element_cap,
        } => convert(to, k, skip_useful_vars, &machine, &out, element_cap),
        Command::CheckEquiv {
            m1,
            m2,
            max_len,
            sample,
            sample_len,
            seed,
        } => check_equiv_command(&m1, &m2, max_len, sample, sample_len, seed),
        Command::Examples { emit } => emit_examples(&emit),
    }
}

fn load(path: &Path) -> Result<Machine, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))?;
    format::parse_machine(&text).map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))
}

fn parse_word(machine: &Machine, text: &str) -> Result<Word, Outcome> {
    let alphabet = machine.input_alphabet();
    let tokens: Vec<Symbol> = if text.is_empty() {
        Vec::new()
    } else if text.contains(char::is_whitespace) {
        text.split_whitespace().map(str::to_string).collect()
    } else if alphabet.contains(text) {
        vec![text.to_string()]
    } else {
        text.chars().map(|c| c.to_string()).collect()
    };
    for s in &tokens {
        if !alphabet.contains(s) {
            return Err(Outcome::usage(format!(
                "symbol {s:?} is not in the machine's input alphabet"
            )));
        }
    }
    Ok(tokens)
}

fn run(path: &Path, word: &str) -> Outcome {
    let machine = match load(path) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let input = match parse_word(&machine, word) {
        Ok(w) => w,
        Err(out) => return out,
    };
    match machine.eval(&input) {
        Some(output) => Outcome::ok(format!("output: {}", render_word(&output))),
        None => Outcome::negative("reject".to_string()),
    }
}

fn describe_aperiodicity(a: Aperiodicity) -> String {
    match a {
        Aperiodicity::Aperiodic { index } => format!("aperiodic=true index={index}"),
        Aperiodicity::NotAperiodic => "aperiodic=false".to_string(),
    }
}

fn monoid_line<E: Ord + Clone>(
    label: &str,
    result: Result<MonoidClosure<E>, CapExceeded>,
    report: &mut String,
    all_aperiodic: &mut bool,
) {
    match result {
        Ok(closure) => {
            let aperiodicity = closure.aperiodicity();
            if aperiodicity.index().is_none() {
                *all_aperiodic = false;
            }
            let _ = writeln!(
                report,
                "{label}: size={} {}",
                closure.len(),
                describe_aperiodicity(aperiodicity)
            );
        }
        Err(e) => {
            *all_aperiodic = false;
            let _ = writeln!(report, "{label}: cap-exceeded cap={}", e.cap);
        }
    }
}

fn analyze_2dft(t: &TwoDft, element_cap: usize, report: &mut String) -> bool {
    let mut ok = true;
    let _ = writeln!(report, "states: {}", t.states.len());
    monoid_line(
        "behavior-monoid",
        transition_monoid_2dft(t, element_cap),
        report,
        &mut ok,
    );
    ok
}

fn analyze_sst(t: &Sst, element_cap: usize, max_k: u64, report: &mut String) -> bool {
    let mut ok = true;
    let _ = writeln!(report, "states: {}", t.states.len());
    let _ = writeln!(report, "variables: {}", t.variables.len());
    let _ = writeln!(report, "copyless: {}", check_copyless(t));
    let bound = (1..=max_k).find(|&k| check_k_bounded(t, k));
    match bound {
        Some(k) => {
            let _ = writeln!(report, "k-bounded: k={k}");
            monoid_line(
                "ftm",
                ftm_closure(t, CoeffBound::Cap(k), element_cap),
                report,
                &mut ok,
            );
            match stm_closure(t, k, element_cap) {
                Ok(closure) => {
                    let aperiodicity = closure.aperiodicity();
                    if aperiodicity.index().is_none() {
                        ok = false;
                    }
                    let _ = writeln!(
                        report,
                        "stm: size={} {}",
                        closure.len(),
                        describe_aperiodicity(aperiodicity)
                    );
                }
                Err(e) => {
                    ok = false;
                    let _ = writeln!(report, "stm: unavailable ({e})");
                }
            }
        }
        None => {
            ok = false;
            let _ = writeln!(report, "k-bounded: none up to k={max_k}");
            let _ = writeln!(report, "ftm: infinite (machine is not bounded)");
        }
    }
    ok
}

fn analyze_sequential(t: &SequentialTransducer, element_cap: usize, report: &mut String) -> bool {
    let mut ok = true;
    let _ = writeln!(report, "direction: {:?}", t.direction);
    let _ = writeln!(report, "states: {}", t.states.len());
    monoid_line(
        "transition-monoid",
        state_function_monoid(
            &t.states,
            t.input.symbols(),
            |q, a| t.step(q, a).map(|(next, _)| next.clone()),
            element_cap,
        ),
        report,
        &mut ok,
    );
    ok
}

fn analyze_pipeline(p: &Pipeline, element_cap: usize, report: &mut String) -> bool {
    let mut ok = true;
    let _ = writeln!(report, "stages: {}", p.stages().len());
    for (i, stage) in p.stages().iter().enumerate() {
        match stage {
            crate::machines::Stage::Sequential(m) => {
                monoid_line(
                    &format!("stage{i}-monoid (sequential)"),
                    state_function_monoid(
                        &m.states,
                        m.input.symbols(),
                        |q, a| m.step(q, a).map(|(next, _)| next.clone()),
                        element_cap,
                    ),
                    report,
                    &mut ok,
                );
            }
            crate::machines::Stage::TwoDft(m) => {
                monoid_line(
                    &format!("stage{i}-monoid (2dft)"),
                    transition_monoid_2dft(m, element_cap),
                    report,
                    &mut ok,
                );
            }
        }
    }
    ok
}

fn analyze(path: &Path, element_cap: usize, max_k: u64) -> Outcome {
    let machine = match load(path) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let mut report = String::new();
    let _ = writeln!(report, "kind: {}", machine.kind());
    let ok = match &machine {
        Machine::TwoDft(t) => analyze_2dft(t, element_cap, &mut report),
        Machine::Sst(t) => analyze_sst(t, element_cap, max_k, &mut report),
        Machine::Sequential(t) => analyze_sequential(t, element_cap, &mut report),
        Machine::Pipeline(p) => analyze_pipeline(p, element_cap, &mut report),
    };
    let report = report.trim_end().to_string();
    if ok {
        Outcome::ok(report)
    } else {
        Outcome::negative(report)
    }
}

fn convert(
    target: Target,
    k: u64,
    skip_useful_vars: bool,
    path: &Path,
    out: &Path,
    element_cap: usize,
) -> Outcome {
    let machine = match load(path) {
        Ok(m) => m,
        Err(outcome) => return outcome,
    };
    let converted = match (target, machine) {
        (Target::TwoDftPipeline, Machine::Sst(t)) => {
            match sst_to_2dft::sst_to_2dft(&t, skip_useful_vars) {
                Ok(pipeline) => Machine::Pipeline(pipeline),
                Err(e) => return Outcome::negative(format!("conversion failed: {e}")),
            }
        }
        (Target::CopylessSst, Machine::TwoDft(t)) => {
            match twodft_to_sst::twodft_to_copyless_sst(&t) {
                Ok(sst) => Machine::Sst(sst),
                Err(e) => return Outcome::negative(format!("conversion failed: {e}")),
            }
        }
        (Target::OneBoundedSst, Machine::Sst(t)) => match k_to_1::k_to_1(&t, k, element_cap) {
            Ok(sst) => Machine::Sst(sst),
            Err(e) => return Outcome::negative(format!("conversion failed: {e}")),
        },
        (Target::TwoDftPipeline, other) | (Target::OneBoundedSst, other) => {
            return Outcome::usage(format!(
                "this conversion expects an sst machine, got {}",
                other.kind()
            ))
        }
        (Target::CopylessSst, other) => {
            return Outcome::usage(format!(
                "this conversion expects a 2dft machine, got {}",
                other.kind()
            ))
        }
    };
    let text = format::serialize_machine(&converted);
    if let Err(e) = std::fs::write(out, text) {
        return Outcome::usage(format!("cannot write {}: {e}", out.display()));
    }
    let mut report = String::new();
    let _ = writeln!(report, "written: {}", out.display());
    let _ = writeln!(report, "kind: {}", converted.kind());
    match &converted {
        Machine::Sst(t) => {
            let _ = writeln!(report, "states: {}", t.states.len());
            let _ = writeln!(report, "variables: {}", t.variables.len());
        }
        Machine::Pipeline(p) => {
            let _ = writeln!(report, "stages: {}", p.stages().len());
        }
        _ => {}
    }
    Outcome::ok(report.trim_end().to_string())
}

fn check_equiv_command(
    path1: &Path,
    path2: &Path,
    max_len: usize,
    sample: Option<usize>,
    sample_len: usize,
    seed: u64,
) -> Outcome {
    let m1 = match load(path1) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let m2 = match load(path2) {
        Ok(m) => m,
        Err(out) => return out,
    };
    if !m1.input_alphabet().same_symbols(m2.input_alphabet()) {
        return Outcome::usage("the machines have different input alphabets".to_string());
    }
    let alphabet = m1.input_alphabet().clone();
    let mut verdict = check_equiv(&m1, &m2, &alphabet, max_len);
    if verdict.is_equal() {
        if let Some(samples) = sample {
            verdict = check_equiv_sampled(&m1, &m2, &alphabet, sample_len, samples, seed);
        }
    }
    match verdict {
        EquivVerdict::Equal => Outcome::ok("equal".to_string()),
        EquivVerdict::Counterexample {
            witness,
            left,
            right,
        } => {
            let show = |side: Option<Word>| match side {
                Some(w) => render_word(&w),
                None => "reject".to_string(),
            };
            Outcome::negative(format!(
                "counterexample: {:?}\nleft: {}\nright: {}",
                render_word(&witness),
                show(left),
                show(right)
            ))
        }
    }
}

fn emit_examples(dir: &Path) -> Outcome {
    if let Err(e) = std::fs::create_dir_all(dir) {
        return Outcome::usage(format!("cannot create {}: {e}", dir.display()));
    }
    let mut report = String::new();
    for (name, machine) in fixtures::all() {
        let path = dir.join(format!("{name}.json"));
        let text = format::serialize_machine(&machine);
        if let Err(e) = std::fs::write(&path, text) {
            return Outcome::usage(format!("cannot write {}: {e}", path.display()));
        }
        let _ = writeln!(report, "written: {}", path.display());
    }
    Outcome::ok(report.trim_end().to_string())
}
