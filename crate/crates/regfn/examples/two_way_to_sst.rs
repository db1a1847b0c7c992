//! Turn a two-way machine into a copyless streaming machine via merge
//! forests.
//!
//! ```bash
//! cargo run --example two_way_to_sst
//! ```

use regfn::equiv::check_equiv;
use regfn::fixtures;
use regfn::machines::substitution::render_expr;
use regfn::machines::word;
use regfn::machines::Evaluate;
use regfn::sst_analysis::check_copyless;
use regfn::twodft_to_sst::{explore, normalize_2dft, twodft_to_copyless_sst};

fn main() {
    let two_way = fixtures::block_doubler_2dft();

    // the construction wants a machine that starts on the right endmarker
    // and emits nothing on the left one
    let normalized = normalize_2dft(&two_way);
    println!(
        "normalized: {} states (was {}), starts on the right",
        normalized.states.len(),
        two_way.states.len()
    );

    // each reachable state is a forest of merged right-to-right runs
    let exploration = explore(&normalized).unwrap();
    println!("reachable forest states: {}", exploration.states.len());
    for (i, state) in exploration.states.iter().enumerate() {
        let vertices: Vec<String> = state
            .forest
            .canonical_order()
            .iter()
            .map(|v| format!("{{{}}}", v.iter().cloned().collect::<Vec<_>>().join(",")))
            .collect();
        println!("  s{i}: {}", vertices.join(" "));
    }
    println!("largest forest: {} vertices", exploration.max_vertices);

    let sst = twodft_to_copyless_sst(&two_way).unwrap();
    println!(
        "copyless SST: {} states, {} variables, copyless = {}",
        sst.states.len(),
        sst.variables.len(),
        check_copyless(&sst)
    );
    for (state, expr) in &sst.output_fn {
        println!("  output at {state}: {}", render_expr(expr));
    }
    println!(
        "on \"aab\": {:?}",
        sst.eval(&word("aab")).map(|w| w.concat())
    );

    let verdict = check_equiv(&sst, &two_way, &two_way.input.clone(), 8);
    println!(
        "equivalent on every word up to length 8: {}",
        verdict.is_equal()
    );

    // deferring outputs written on the left endmarker
    let prefixer = fixtures::begin_output_2dft();
    let converted = twodft_to_copyless_sst(&prefixer).unwrap();
    println!(
        "\nleading-output machine converts too: \"ab\" -> {:?}",
        converted.eval(&word("ab")).map(|w| w.concat())
    );
}
