//! Deterministic two-way transducers, streaming string transducers, and the
//! direct conversions between them.
//!
//! The crate models three machine kinds over finite alphabets:
//!
//! - [`machines::TwoDft`] — deterministic two-way transducers reading
//!   endmarked input `⊢w⊣` with moves in {-1, 0, +1},
//! - [`machines::Sst`] — deterministic one-way transducers with string
//!   variables updated by substitutions,
//! - [`machines::SequentialTransducer`] — length-preserving one-way
//!   relabelers, used as pipeline stages.
//!
//! On top of the machine models it provides:
//!
//! - transition monoids: behavior quadruples for two-way machines
//!   ([`behaviors`]), flow and substitution transition monoids for SSTs
//!   ([`sst_analysis`]), with aperiodicity-index computation ([`monoid`]),
//! - the three conversions: [`sst_to_2dft`] (1-bounded SST to a three-stage
//!   two-way pipeline), [`twodft_to_sst`] (two-way transducer to copyless SST
//!   via merge forests), and [`k_to_1`] (k-bounded to 1-bounded SST via
//!   monoid lookahead),
//! - a bounded-word equivalence oracle ([`equiv`]) used to validate every
//!   construction,
//! - a JSON machine-description format and a command-line front end
//!   ([`format`], [`cli`]).
//!
//! Each major capability has a runnable example under `examples/`; see the
//! README for a tour.

pub mod behaviors;
pub mod cli;
pub mod equiv;
pub mod fixtures;
pub mod format;
pub mod k_to_1;
pub mod machines;
pub mod monoid;
pub mod sst_analysis;
pub mod sst_to_2dft;
pub mod twodft_to_sst;

pub use equiv::{check_equiv, EquivVerdict};
pub use machines::{
    Alphabet, Evaluate, Machine, Move, Piece, Pipeline, SequentialTransducer, Sst, Substitution,
    Symbol, Tape, TwoDft, Word,
};
