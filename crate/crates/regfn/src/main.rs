use std::io::Write;

fn main() {
    let outcome = regfn::cli::run_command(std::env::args().skip(1));
    if !outcome.report.is_empty() {
        // ignore a closed stdout, e.g. when piped into `head`
        let _ = writeln!(std::io::stdout(), "{}", outcome.report);
    }
    std::process::exit(outcome.exit_code);
}
