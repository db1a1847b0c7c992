//! Serialize machines to JSON documents and parse them back.
//!
//! ```bash
//! cargo run --example machine_files
//! ```

use regfn::format::{parse_machine, serialize_machine};
use regfn::machines::{word, Evaluate, Machine};
use regfn::{equiv, fixtures};

fn main() {
    let machine = Machine::Sst(fixtures::block_doubler_sst());
    let text = serialize_machine(&machine);
    println!("{text}\n");

    let parsed = parse_machine(&text).expect("own documents always parse");
    assert_eq!(parsed, machine);
    println!("round-trip: structurally identical");
    println!(
        "parsed machine on \"aab\": {:?}",
        parsed.eval(&word("aab")).map(|w| w.concat())
    );

    // documents of different machine kinds can be compared directly
    let other = Machine::TwoDft(fixtures::block_doubler_2dft());
    let verdict = equiv::check_equiv(&parsed, &other, parsed.input_alphabet(), 6);
    println!(
        "agrees with the two-way version up to length 6: {}",
        verdict.is_equal()
    );

    // a malformed document is rejected with a precise message
    let broken = text.replace("\"${X}a\"", "\"${Q}a\"");
    match parse_machine(&broken) {
        Err(e) => println!("broken document rejected: {e}"),
        Ok(_) => unreachable!("unknown variables must be rejected"),
    }
}
