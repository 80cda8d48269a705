//! Compression of deterministic finite automata into delayed DFAs (D²FA).
//!
//! A D²FA keeps the state set of the input DFA but replaces runs of shared
//! transitions with a single unlabeled *default* transition per state. This
//! crate provides the classic quadratic constructions (complete similarity
//! graph, maximum spanning tree, bounded-diameter forests, A-DFA) alongside
//! near-linear variants that sample the similarity graph with
//! locality-sensitive hashing.
//!
//! The usual flow is
//!
//! ```
//! use d2fa_core::automata::compile_regex_set;
//! use d2fa_core::pipelines::{compress, AlgoSpec, Algorithm};
//! use d2fa_core::d2fa::verify_equivalent;
//!
//! let dfa = compile_regex_set(&[".*ab+c", ".*cd+"], 256).unwrap();
//! let spec = AlgoSpec::new(Algorithm::OrigSparse);
//! let (compressed, report) = compress(&dfa, &spec).unwrap();
//! assert!(verify_equivalent(&dfa, &compressed).is_ok());
//! assert!(report.compression_ratio < 1.0);
//! ```

pub mod automata;
pub mod bench;
pub mod d2fa;
mod error;
pub mod forest;
pub mod graphs;
pub mod pipelines;

pub use error::{Error, Result};

/// Dense state identifier in `[0, n)`.
pub type StateId = u32;
