//! Complete DFAs over a dense integer alphabet.

mod compile;
mod generate;
pub(crate) mod io;
mod minimize;
mod parse;

use std::collections::VecDeque;

use crate::{Error, Result, StateId};

pub use compile::{compile_regex_set, compile_regex_set_over, CompileOptions, DEFAULT_STATE_CAP};
pub use generate::{
    generate_clustered, generate_clustered_dfa, generate_rule_set, star_dfa, toy_dfa, ClusteredDfa,
    RuleShape,
};
pub use io::{parse_dfa, parse_rules, read_dfa, read_rules, write_dfa, write_dfa_to, RuleFile};
pub use minimize::minimize;
pub use parse::{parse_pattern, Ast, ByteSet};

/// Largest supported alphabet; symbols are bytes.
pub const MAX_ALPHABET: usize = 256;

/// A complete deterministic automaton `(Q, Σ, δ, q0, A)`.
///
/// The transition table is stored row-major: `table[u * m + c] = δ(u, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet_size: usize,
    table: Vec<StateId>,
    start: StateId,
    accepting: Vec<bool>,
}

impl Dfa {
    /// Builds a DFA and checks totality, id ranges and reachability.
    pub fn new(
        alphabet_size: usize,
        table: Vec<StateId>,
        start: StateId,
        accepting: impl IntoIterator<Item = StateId>,
    ) -> Result<Dfa> {
        let dfa = Dfa::from_parts(alphabet_size, table, start, accepting)?;
        dfa.check_reachable()?;
        Ok(dfa)
    }

    /// Like [`Dfa::new`] but does not require every state to be reachable.
    pub(crate) fn from_parts(
        alphabet_size: usize,
        table: Vec<StateId>,
        start: StateId,
        accepting: impl IntoIterator<Item = StateId>,
    ) -> Result<Dfa> {
        if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
            return Err(Error::InvalidParams(format!(
                "alphabet size {alphabet_size} not in 1..={MAX_ALPHABET}"
            )));
        }
        if table.is_empty() || !table.len().is_multiple_of(alphabet_size) {
            return Err(Error::InvalidParams(format!(
                "transition table of length {} is not a non-empty multiple of {alphabet_size}",
                table.len()
            )));
        }
        let n = table.len() / alphabet_size;
        if n > StateId::MAX as usize {
            return Err(Error::InvalidParams(format!(
                "{n} states do not fit a state id"
            )));
        }
        if let Some(&bad) = table.iter().find(|&&t| t as usize >= n) {
            return Err(Error::StateOutOfRange { id: bad as u64, n });
        }
        if start as usize >= n {
            return Err(Error::StateOutOfRange {
                id: start as u64,
                n,
            });
        }
        let mut accept = vec![false; n];
        for a in accepting {
            if a as usize >= n {
                return Err(Error::StateOutOfRange { id: a as u64, n });
            }
            accept[a as usize] = true;
        }
        Ok(Dfa {
            alphabet_size,
            table,
            start,
            accepting: accept,
        })
    }

    fn check_reachable(&self) -> Result<()> {
        let seen = self.reachable();
        let missing: Vec<StateId> = (0..self.state_count() as StateId)
            .filter(|&u| !seen[u as usize])
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Unreachable(missing))
        }
    }

    pub(crate) fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(u) = stack.pop() {
            for &t in self.row(u) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, u: StateId) -> bool {
        self.accepting[u as usize]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(u, _)| u as StateId)
    }

    pub(crate) fn accepting_mask(&self) -> &[bool] {
        &self.accepting
    }

    /// The outgoing row `δ(u, 0..m)`.
    #[inline]
    pub fn row(&self, u: StateId) -> &[StateId] {
        let m = self.alphabet_size;
        let at = u as usize * m;
        &self.table[at..at + m]
    }

    #[inline]
    pub fn next(&self, u: StateId, symbol: usize) -> StateId {
        self.table[u as usize * self.alphabet_size + symbol]
    }

    pub fn table(&self) -> &[StateId] {
        &self.table
    }

    /// Runs the automaton over `input`, where each byte is a symbol.
    pub fn run(&self, input: &[u8]) -> Result<StateId> {
        let mut u = self.start;
        for &b in input {
            let c = b as usize;
            if c >= self.alphabet_size {
                return Err(Error::SymbolOutOfRange {
                    symbol: c,
                    alphabet_size: self.alphabet_size,
                });
            }
            u = self.next(u, c);
        }
        Ok(u)
    }

    pub fn accepts(&self, input: &[u8]) -> Result<bool> {
        self.run(input).map(|u| self.is_accepting(u))
    }
}

/// Shortest-path distance from the start state to every state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMap {
    depths: Vec<u32>,
}

impl DepthMap {
    pub fn depth(&self, u: StateId) -> u32 {
        self.depths[u as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.depths
    }

    pub fn max_depth(&self) -> u32 {
        self.depths.iter().copied().max().unwrap_or(0)
    }
}

/// Breadth-first depths over unit-weight transitions.
///
/// States that are not reachable (only possible for DFAs built internally
/// without the reachability check) get `u32::MAX`.
pub fn bfs_depths(dfa: &Dfa) -> DepthMap {
    let mut depths = vec![u32::MAX; dfa.state_count()];
    let mut queue = VecDeque::new();
    depths[dfa.start() as usize] = 0;
    queue.push_back(dfa.start());
    while let Some(u) = queue.pop_front() {
        let next_depth = depths[u as usize] + 1;
        for &t in dfa.row(u) {
            if depths[t as usize] == u32::MAX {
                depths[t as usize] = next_depth;
                queue.push_back(t);
            }
        }
    }
    DepthMap { depths }
}
