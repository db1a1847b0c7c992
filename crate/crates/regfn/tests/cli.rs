//! End-to-end tests of the command surface: files in, reports and exit
//! codes out.

use regfn::cli::{run_command, Outcome};
use regfn::format::parse_machine;
use std::path::{Path, PathBuf};

fn regfn(args: &[&str]) -> Outcome {
    run_command(args.iter().map(|s| s.to_string()))
}

struct Emitted {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Emitted {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("machines");
        let outcome = regfn(&["examples", "--emit", root.to_str().unwrap()]);
        assert_eq!(outcome.exit_code, 0, "{}", outcome.report);
        Emitted { _dir: dir, root }
    }

    fn path(&self, name: &str) -> String {
        self.root
            .join(format!("{name}.json"))
            .to_str()
            .unwrap()
            .to_string()
    }
}

#[test]
fn emitted_machines_reparse_and_validate() {
    let emitted = Emitted::new();
    let mut count = 0;
    for entry in std::fs::read_dir(&emitted.root).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let machine = parse_machine(&text)
            .unwrap_or_else(|e| panic!("{} failed to parse: {e}", path.display()));
        assert!(
            machine.validate().is_empty(),
            "{} is invalid",
            path.display()
        );
        count += 1;
    }
    assert!(count >= 10, "expected the full bundle, found {count} files");
}

#[test]
fn run_evaluates_and_signals_rejection() {
    let emitted = Emitted::new();
    let ok = regfn(&["run", &emitted.path("block-doubler-sst"), "aab"]);
    assert_eq!((ok.exit_code, ok.report.as_str()), (0, "output: aabb"));

    let ok = regfn(&["run", &emitted.path("block-doubler-2dft"), "aab"]);
    assert_eq!((ok.exit_code, ok.report.as_str()), (0, "output: aabb"));

    let empty = regfn(&["run", &emitted.path("block-doubler-sst"), ""]);
    assert_eq!((empty.exit_code, empty.report.as_str()), (0, "output: "));

    let rejected = regfn(&["run", &emitted.path("state-swap-2dft"), ""]);
    assert_eq!(
        (rejected.exit_code, rejected.report.as_str()),
        (1, "reject")
    );

    let bad_symbol = regfn(&["run", &emitted.path("block-doubler-sst"), "abc"]);
    assert_eq!(bad_symbol.exit_code, 2);
}

#[test]
fn analyze_reports_are_deterministic_and_verdict_bearing() {
    let emitted = Emitted::new();

    let two_way = regfn(&["analyze", &emitted.path("block-doubler-2dft")]);
    assert_eq!(two_way.exit_code, 0, "{}", two_way.report);
    assert!(two_way.report.contains("kind: 2dft"));
    assert!(two_way.report.contains("aperiodic=true"));
    assert!(two_way.report.contains("behavior-monoid"));
    let again = regfn(&["analyze", &emitted.path("block-doubler-2dft")]);
    assert_eq!(two_way, again, "analyze output is not deterministic");

    let sst = regfn(&["analyze", &emitted.path("block-doubler-sst")]);
    assert_eq!(sst.exit_code, 0, "{}", sst.report);
    for needle in [
        "kind: sst",
        "copyless: true",
        "k-bounded: k=1",
        "ftm: size=2 aperiodic=true index=1",
        "stm: size=2 aperiodic=true index=1",
    ] {
        assert!(
            sst.report.contains(needle),
            "missing {needle:?} in:\n{}",
            sst.report
        );
    }

    let swap = regfn(&["analyze", &emitted.path("swap-sst")]);
    assert_eq!(swap.exit_code, 1);
    assert!(swap.report.contains("aperiodic=false"));

    let doubling = regfn(&["analyze", &emitted.path("doubling-sst")]);
    assert_eq!(doubling.exit_code, 1);
    assert!(doubling.report.contains("k-bounded: none up to k=4"));

    // counting modulo two is inherently periodic
    let relabeler = regfn(&["analyze", &emitted.path("parity-relabeler")]);
    assert_eq!(relabeler.exit_code, 1, "{}", relabeler.report);
    assert!(relabeler.report.contains("transition-monoid"));
    assert!(relabeler.report.contains("aperiodic=false"));
}

fn convert_and_check(emitted: &Emitted, source: &str, args: &[&str], out: &Path) {
    let out_str = out.to_str().unwrap();
    let source_path = emitted.path(source);
    let mut full = vec!["convert"];
    full.extend_from_slice(args);
    full.extend_from_slice(&[&source_path, "-o", out_str]);
    let converted = regfn(&full);
    assert_eq!(converted.exit_code, 0, "{}", converted.report);
    assert!(converted.report.contains("written:"));

    // the written document parses, validates, and matches the source machine
    let text = std::fs::read_to_string(out).unwrap();
    let machine = parse_machine(&text).unwrap();
    assert!(machine.validate().is_empty());

    let equiv = regfn(&[
        "check-equiv",
        &emitted.path(source),
        out_str,
        "--max-len",
        "6",
    ]);
    assert_eq!((equiv.exit_code, equiv.report.as_str()), (0, "equal"));
}

#[test]
fn conversions_write_equivalent_documents() {
    let emitted = Emitted::new();
    let dir = tempfile::tempdir().unwrap();
    convert_and_check(
        &emitted,
        "block-doubler-sst",
        &["--to", "2dft-pipeline"],
        &dir.path().join("pipeline.json"),
    );
    // the written pipeline can itself be run and analyzed
    let pipeline = dir.path().join("pipeline.json");
    let pipeline = pipeline.to_str().unwrap();
    let ran = regfn(&["run", pipeline, "aab"]);
    assert_eq!((ran.exit_code, ran.report.as_str()), (0, "output: aabb"));
    let analyzed = regfn(&["analyze", pipeline]);
    assert_eq!(analyzed.exit_code, 0, "{}", analyzed.report);
    assert!(analyzed.report.contains("stages: 3"));
    assert!(analyzed.report.contains("stage2-monoid (2dft)"));
    convert_and_check(
        &emitted,
        "block-doubler-sst",
        &["--to", "2dft-pipeline", "--skip-useful-vars"],
        &dir.path().join("pipeline-skip.json"),
    );
    convert_and_check(
        &emitted,
        "block-doubler-2dft",
        &["--to", "copyless-sst"],
        &dir.path().join("copyless.json"),
    );
    convert_and_check(
        &emitted,
        "two-bounded-sst",
        &["--to", "1bounded-sst", "--k", "2"],
        &dir.path().join("one-bounded.json"),
    );
}

#[test]
fn convert_rejects_wrong_kinds_and_failed_preconditions() {
    let emitted = Emitted::new();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let out = out.to_str().unwrap();

    let wrong_kind = regfn(&[
        "convert",
        "--to",
        "copyless-sst",
        &emitted.path("block-doubler-sst"),
        "-o",
        out,
    ]);
    assert_eq!(wrong_kind.exit_code, 2);

    let not_bounded = regfn(&[
        "convert",
        "--to",
        "2dft-pipeline",
        &emitted.path("two-bounded-sst"),
        "-o",
        out,
    ]);
    assert_eq!(not_bounded.exit_code, 1);
    assert!(not_bounded.report.contains("not 1-bounded"));

    let not_copyless = regfn(&[
        "convert",
        "--to",
        "2dft-pipeline",
        "--skip-useful-vars",
        &emitted.path("drop-last-sst"),
        "-o",
        out,
    ]);
    assert_eq!(not_copyless.exit_code, 1);
    assert!(not_copyless.report.contains("not copyless"));
}

#[test]
fn check_equiv_compares_across_machine_kinds() {
    let emitted = Emitted::new();
    let equal = regfn(&[
        "check-equiv",
        &emitted.path("block-doubler-2dft"),
        &emitted.path("block-doubler-sst"),
        "--max-len",
        "8",
    ]);
    assert_eq!((equal.exit_code, equal.report.as_str()), (0, "equal"));

    let differ = regfn(&[
        "check-equiv",
        &emitted.path("block-doubler-sst"),
        &emitted.path("word-doubler-sst"),
        "--max-len",
        "4",
    ]);
    assert_eq!(differ.exit_code, 1);
    assert!(differ.report.contains("counterexample"));

    let sampled = regfn(&[
        "check-equiv",
        &emitted.path("block-doubler-2dft"),
        &emitted.path("block-doubler-sst"),
        "--max-len",
        "4",
        "--sample",
        "25",
        "--sample-len",
        "16",
    ]);
    assert_eq!((sampled.exit_code, sampled.report.as_str()), (0, "equal"));

    let mismatched = regfn(&[
        "check-equiv",
        &emitted.path("block-doubler-sst"),
        &emitted.path("two-bounded-sst"),
    ]);
    assert_eq!(mismatched.exit_code, 2);
}
