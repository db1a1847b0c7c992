//! Rewrite a 2-bounded streaming machine into a 1-bounded one using
//! flow-monoid lookahead.
//!
//! ```bash
//! cargo run --example bounded_to_one_bounded
//! ```

use regfn::equiv::check_equiv;
use regfn::fixtures;
use regfn::k_to_1::{k_to_1, useful_count};
use regfn::machines::Evaluate;
use regfn::sst_analysis::{check_k_bounded, ftm_closure, CoeffBound};

fn main() {
    // X := Xa, Y := XX with output Y maps a^n to a^(2(n-1))
    let machine = fixtures::two_bounded_sst();
    println!("2-bounded: {}", check_k_bounded(&machine, 2));
    println!("1-bounded: {}", check_k_bounded(&machine, 1));

    let ftm = ftm_closure(&machine, CoeffBound::Cap(2), 1 << 20).unwrap();
    println!("flow monoid size: {}", ftm.len());
    for elem in 0..ftm.len() {
        for var in &machine.variables {
            if let Some(n) = useful_count(&machine, &ftm, elem, "q", var) {
                println!("  copies of {var} needed under suffix class {elem}: {n}");
            }
        }
    }

    let result = k_to_1(&machine, 2, 1 << 20).unwrap();
    println!(
        "result: {} states, {} variables",
        result.states.len(),
        result.variables.len()
    );
    println!("result is 1-bounded: {}", check_k_bounded(&result, 1));

    for n in 0..=6usize {
        let input = vec!["a".to_string(); n];
        let output = result.eval(&input).map(|w| w.concat());
        println!("  a^{n} -> {output:?}");
    }
    let verdict = check_equiv(&result, &machine, &machine.input.clone(), 8);
    println!(
        "equivalent on every word up to length 8: {}",
        verdict.is_equal()
    );
}
