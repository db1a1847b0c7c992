//! Build the two bundled block-doubler machines and evaluate them.
//!
//! ```bash
//! cargo run --example evaluate_machines
//! ```

use regfn::fixtures;
use regfn::machines::{render_word, word, Evaluate};

fn main() {
    let two_way = fixtures::block_doubler_2dft();
    let streaming = fixtures::block_doubler_sst();

    println!("two-way machine: {} states", two_way.states.len());
    println!(
        "streaming machine: {} states, {} variables",
        streaming.states.len(),
        streaming.variables.len()
    );
    assert!(two_way.validate().is_empty());
    assert!(streaming.validate().is_empty());

    for input in ["", "a", "aab", "abaa", "aabaaab"] {
        let w = word(input);
        let via_two_way = two_way.eval(&w).expect("total on {a,b}*");
        let via_streaming = streaming.eval(&w).expect("total on {a,b}*");
        assert_eq!(via_two_way, via_streaming);
        println!(
            "{:>8} -> {}",
            format!("{input:?}"),
            render_word(&via_two_way)
        );
    }

    // a machine with a partial transition table rejects by getting stuck
    let swapper = fixtures::state_swap_2dft();
    println!(
        "state swapper on \"a\":  {:?}",
        swapper.eval(&word("a")).map(|w| render_word(&w))
    );
    println!(
        "state swapper on \"aa\": {:?}",
        swapper.eval(&word("aa")).map(|w| render_word(&w))
    );
}
