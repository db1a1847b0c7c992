//! Compute the transition monoids behind aperiodicity checks: behavior
//! quadruples for a two-way machine, flow and substitution monoids for a
//! streaming machine.
//!
//! ```bash
//! cargo run --example transition_monoids
//! ```

use regfn::behaviors::{letter_behavior, transition_monoid_2dft};
use regfn::fixtures;
use regfn::machines::Tape;
use regfn::monoid::Aperiodicity;
use regfn::sst_analysis::{
    check_copyless, check_index_bound, check_k_bounded, ftm_closure, stm_closure, CoeffBound,
};

fn describe(a: Aperiodicity) -> String {
    match a {
        Aperiodicity::Aperiodic { index } => format!("aperiodic with index {index}"),
        Aperiodicity::NotAperiodic => "not aperiodic".to_string(),
    }
}

fn main() {
    let two_way = fixtures::block_doubler_2dft();
    let quad = letter_behavior(&two_way, &Tape::letter("a"));
    println!("behavior of the letter 'a':");
    println!("  left-to-right {:?}", quad.lr);
    println!("  left-to-left  {:?}", quad.ll);

    let monoid = transition_monoid_2dft(&two_way, 1 << 20).unwrap();
    println!(
        "two-way behavior monoid: {} elements, {}",
        monoid.len(),
        describe(monoid.aperiodicity())
    );

    let streaming = fixtures::block_doubler_sst();
    println!(
        "\nstreaming machine: copyless = {}",
        check_copyless(&streaming)
    );
    println!("1-bounded = {}", check_k_bounded(&streaming, 1));

    let ftm = ftm_closure(&streaming, CoeffBound::Cap(1), 1 << 20).unwrap();
    println!(
        "flow monoid: {} elements, {}",
        ftm.len(),
        describe(ftm.aperiodicity())
    );
    let stm = stm_closure(&streaming, 1, 1 << 20).unwrap();
    println!(
        "substitution monoid: {} elements, {}",
        stm.len(),
        describe(stm.aperiodicity())
    );

    let report = check_index_bound(&streaming, 1, 1 << 20).unwrap();
    println!(
        "index bound: substitution index {} <= flow index {} + (k+1)*variables = {}",
        report.stm_index, report.ftm_index, report.bound
    );

    // a machine that swaps two variables forever is periodic
    let swap = fixtures::swap_sst();
    let swap_ftm = ftm_closure(&swap, CoeffBound::Cap(1), 1 << 20).unwrap();
    println!(
        "\nvariable swapper flow monoid: {}",
        describe(swap_ftm.aperiodicity())
    );

    // and the squaring machine is not bounded at all
    let doubling = fixtures::doubling_sst();
    let bounded = (1..=4).find(|&k| check_k_bounded(&doubling, k));
    println!(
        "squaring machine bounded for some k <= 4: {}",
        bounded.is_some()
    );
}
