//! Turn a 1-bounded streaming machine into a two-way pipeline and watch the
//! intermediate enriched words.
//!
//! ```bash
//! cargo run --example sst_to_two_way
//! ```

use regfn::equiv::check_equiv;
use regfn::fixtures;
use regfn::machines::{word, Evaluate};
use regfn::sst_to_2dft::{build_prev_enricher, build_useful_vars_enricher, end_token, sst_to_2dft};

fn main() {
    let machine = fixtures::block_doubler_sst();
    let token = end_token(&machine);

    // first stage: tag each position with the state before it
    let first = build_prev_enricher(&machine);
    let mut input = word("aab");
    input.push(token.clone());
    let tagged = first.eval(&input).unwrap();
    println!("after the state enricher:      {tagged:?}");

    // second stage: tag each position with the variables still flowing into
    // the final output
    let second = build_useful_vars_enricher(&machine);
    let useful = second.eval(&tagged).unwrap();
    println!("after the useful-var enricher: {useful:?}");

    // the full pipeline appends the end token itself
    let pipeline = sst_to_2dft(&machine, false).unwrap();
    println!("pipeline stages: {}", pipeline.stages().len());
    println!(
        "pipeline on \"aab\": {:?}",
        pipeline.eval(&word("aab")).map(|w| w.concat())
    );

    let verdict = check_equiv(&pipeline, &machine, &machine.input.clone(), 8);
    println!(
        "equivalent on every word up to length 8: {}",
        verdict.is_equal()
    );

    // copyless machines can skip the second stage
    let short = sst_to_2dft(&machine, true).unwrap();
    println!("with --skip-useful-vars: {} stages", short.stages().len());

    // non-copyless machines cannot
    let drop_last = fixtures::drop_last_sst();
    println!(
        "skipping on a non-copyless machine: {:?}",
        sst_to_2dft(&drop_last, true).unwrap_err()
    );
}
