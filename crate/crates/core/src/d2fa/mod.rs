//! Delayed DFAs: sparse labeled rows plus at most one default transition
//! per state.
//!
//! Resolving symbol `c` at state `u` follows `u`'s `c`-labeled transition if
//! there is one and otherwise retries at `F(u)`. Every default followed adds
//! one to the delay of that step.

mod io;
mod report;

use crate::automata::Dfa;
use crate::forest::Forest;
use crate::{Error, Result, StateId};

pub use io::{parse_d2fa, read_d2fa, write_d2fa, write_d2fa_to};
pub use report::{CompressionReport, PhaseTimings, ReportParams};

/// Number of symbols on which `u` and `v` move to the same state.
#[inline]
pub fn similarity(dfa: &Dfa, u: StateId, v: StateId) -> usize {
    row_similarity(dfa.row(u), dfa.row(v))
}

#[inline]
pub(crate) fn row_similarity<T: Copy + Eq>(a: &[T], b: &[T]) -> usize {
    // Rows hold at most 256 symbols, so the u16 count never wraps.
    a.iter()
        .zip(b)
        .fold(0u16, |acc, (x, y)| acc.wrapping_add(u16::from(x == y))) as usize
}

/// Transition rows for bulk similarity scans, narrowed to 16-bit targets
/// whenever every state id fits.
pub(crate) enum SimRows<'a> {
    Narrow { m: usize, cells: Vec<u16> },
    Wide(&'a Dfa),
}

impl<'a> SimRows<'a> {
    pub(crate) fn new(dfa: &'a Dfa) -> SimRows<'a> {
        if dfa.state_count() > 1 << 16 {
            return SimRows::Wide(dfa);
        }
        let cells = (0..dfa.state_count() as StateId)
            .flat_map(|u| dfa.row(u).iter().map(|&t| t as u16))
            .collect();
        SimRows::Narrow {
            m: dfa.alphabet_size(),
            cells,
        }
    }

    #[inline]
    pub(crate) fn similarity(&self, u: StateId, v: StateId) -> usize {
        match self {
            SimRows::Narrow { m, cells } => {
                let (u, v) = (u as usize * m, v as usize * m);
                row_similarity(&cells[u..u + m], &cells[v..v + m])
            }
            SimRows::Wide(dfa) => row_similarity(dfa.row(u), dfa.row(v)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D2fa {
    alphabet_size: usize,
    start: StateId,
    accepting: Vec<bool>,
    defaults: Vec<Option<StateId>>,
    row_start: Vec<usize>,
    symbols: Vec<u8>,
    targets: Vec<StateId>,
}

/// Outcome of resolving one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub state: StateId,
    pub delay: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOutcome {
    pub end_state: StateId,
    pub accepted: bool,
    pub matching_delay: usize,
    /// Prefix lengths whose end state is accepting.
    pub accepting_positions: Vec<usize>,
}

impl D2fa {
    /// Assembles a D²FA from explicit rows and checks that every
    /// `(state, symbol)` pair resolves.
    ///
    /// Each row must be sorted by symbol without repeats.
    pub fn from_parts(
        alphabet_size: usize,
        start: StateId,
        accepting: Vec<bool>,
        defaults: Vec<Option<StateId>>,
        rows: Vec<Vec<(u8, StateId)>>,
    ) -> Result<D2fa> {
        let n = accepting.len();
        if n == 0 || defaults.len() != n || rows.len() != n {
            return Err(Error::InvalidParams(
                "state count disagrees between accepting set, defaults and rows".into(),
            ));
        }
        if alphabet_size == 0 || alphabet_size > crate::automata::MAX_ALPHABET {
            return Err(Error::InvalidParams(format!(
                "alphabet size {alphabet_size} out of range"
            )));
        }
        if start as usize >= n {
            return Err(Error::StateOutOfRange {
                id: start as u64,
                n,
            });
        }
        let mut d = D2fa {
            alphabet_size,
            start,
            accepting,
            defaults,
            row_start: Vec::with_capacity(n + 1),
            symbols: Vec::new(),
            targets: Vec::new(),
        };
        d.row_start.push(0);
        for (u, row) in rows.into_iter().enumerate() {
            if let Some(f) = d.defaults[u] {
                if f as usize >= n {
                    return Err(Error::StateOutOfRange { id: f as u64, n });
                }
                if f as usize == u {
                    return Err(Error::InvalidParams(format!(
                        "state {u} defaults to itself"
                    )));
                }
            }
            let mut prev: Option<u8> = None;
            for (c, t) in row {
                if c as usize >= alphabet_size {
                    return Err(Error::SymbolOutOfRange {
                        symbol: c as usize,
                        alphabet_size,
                    });
                }
                if prev.is_some_and(|p| p >= c) {
                    return Err(Error::InvalidParams(format!(
                        "row of state {u} is not strictly sorted by symbol"
                    )));
                }
                if t as usize >= n {
                    return Err(Error::StateOutOfRange { id: t as u64, n });
                }
                prev = Some(c);
                d.symbols.push(c);
                d.targets.push(t);
            }
            d.row_start.push(d.symbols.len());
        }
        d.check_resolvable()?;
        Ok(d)
    }

    /// The same automaton with every transition labeled and no defaults.
    pub fn from_dfa(dfa: &Dfa) -> D2fa {
        build_from_forest(dfa, &Forest::singletons(dfa.state_count()))
            .expect("singleton forest always fits")
    }

    fn check_resolvable(&self) -> Result<()> {
        for u in 0..self.state_count() as StateId {
            for c in 0..self.alphabet_size {
                self.resolve(u, c)?;
            }
        }
        Ok(())
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

    pub fn default_of(&self, u: StateId) -> Option<StateId> {
        self.defaults[u as usize]
    }

    /// Labeled transitions of `u`, sorted by symbol.
    pub fn labeled_row(&self, u: StateId) -> impl Iterator<Item = (u8, StateId)> + '_ {
        let (lo, hi) = (self.row_start[u as usize], self.row_start[u as usize + 1]);
        self.symbols[lo..hi]
            .iter()
            .copied()
            .zip(self.targets[lo..hi].iter().copied())
    }

    pub fn labeled_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn default_count(&self) -> usize {
        self.defaults.iter().filter(|d| d.is_some()).count()
    }

    /// Labeled plus default transitions.
    pub fn total_transitions(&self) -> usize {
        self.labeled_count() + self.default_count()
    }

    #[inline]
    fn labeled(&self, u: StateId, c: usize) -> Option<StateId> {
        let (lo, hi) = (self.row_start[u as usize], self.row_start[u as usize + 1]);
        if hi - lo == self.alphabet_size {
            return Some(self.targets[lo + c]);
        }
        self.symbols[lo..hi]
            .binary_search(&(c as u8))
            .ok()
            .map(|i| self.targets[lo + i])
    }

    /// Resolves symbol `c` at state `u`, counting the defaults followed.
    pub fn resolve(&self, u: StateId, c: usize) -> Result<Step> {
        if c >= self.alphabet_size {
            return Err(Error::SymbolOutOfRange {
                symbol: c,
                alphabet_size: self.alphabet_size,
            });
        }
        let mut at = u;
        for delay in 0..=self.state_count() {
            if let Some(state) = self.labeled(at, c) {
                return Ok(Step { state, delay });
            }
            match self.defaults[at as usize] {
                Some(f) => at = f,
                None => break,
            }
        }
        // Either a defaultless state lacks `c` or the defaults loop without
        // ever offering `c`.
        Err(Error::Unresolvable {
            state: u,
            symbol: c,
        })
    }

    /// Runs `input` from the start state; each byte is one symbol.
    pub fn match_string(&self, input: &[u8]) -> Result<MatchOutcome> {
        let mut u = self.start;
        let mut matching_delay = 0;
        let mut accepting_positions = Vec::new();
        for (i, &b) in input.iter().enumerate() {
            let step = self.resolve(u, b as usize)?;
            u = step.state;
            matching_delay += step.delay;
            if self.is_accepting(u) {
                accepting_positions.push(i + 1);
            }
        }
        Ok(MatchOutcome {
            end_state: u,
            accepted: self.is_accepting(u),
            matching_delay,
            accepting_positions,
        })
    }

    /// Largest number of defaults followed to resolve any single symbol.
    pub fn longest_delay(&self) -> usize {
        let mut longest = 0;
        for u in 0..self.state_count() as StateId {
            if self.defaults[u as usize].is_none() {
                continue;
            }
            for c in 0..self.alphabet_size {
                let d = self.resolve(u, c).map(|s| s.delay).unwrap_or(0);
                longest = longest.max(d);
            }
        }
        longest
    }
}

/// Turns a root-directed forest into default transitions.
///
/// Non-roots default to their parent and keep only the labeled transitions
/// on which they differ from the parent in `dfa`. Roots keep their full row.
/// Comparing against the original rows is sound because resolution at the
/// parent already reproduces the parent's original row.
pub fn build_from_forest(dfa: &Dfa, forest: &Forest) -> Result<D2fa> {
    let n = dfa.state_count();
    let m = dfa.alphabet_size();
    if forest.node_count() != n {
        return Err(Error::InvalidForest(format!(
            "forest spans {} nodes but the DFA has {n} states",
            forest.node_count()
        )));
    }
    let mut row_start = Vec::with_capacity(n + 1);
    let mut symbols = Vec::new();
    let mut targets = Vec::new();
    let mut defaults = Vec::with_capacity(n);
    row_start.push(0);
    for u in 0..n as StateId {
        let row = dfa.row(u);
        match forest.parent(u) {
            None => {
                symbols.extend((0..m).map(|c| c as u8));
                targets.extend_from_slice(row);
            }
            Some(p) => {
                for (c, (&t, &pt)) in row.iter().zip(dfa.row(p)).enumerate() {
                    if t != pt {
                        symbols.push(c as u8);
                        targets.push(t);
                    }
                }
            }
        }
        defaults.push(forest.parent(u));
        row_start.push(symbols.len());
    }
    Ok(D2fa {
        alphabet_size: m,
        start: dfa.start(),
        accepting: dfa.accepting_mask().to_vec(),
        defaults,
        row_start,
        symbols,
        targets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("state {state} on symbol {symbol}: DFA goes to {expected}, D2FA {}",
        .found.map_or("cannot resolve".to_string(), |f| format!("goes to {f}")))]
    Mismatch {
        state: StateId,
        symbol: usize,
        expected: StateId,
        found: Option<StateId>,
    },
}

/// Checks `resolve(u, c) = δ(u, c)` for every state and symbol.
///
/// This is stronger than language equality; the first failing pair is
/// returned as a witness.
pub fn verify_equivalent(dfa: &Dfa, d2fa: &D2fa) -> Result<(), VerifyError> {
    if dfa.state_count() != d2fa.state_count() {
        return Err(VerifyError::Shape(format!(
            "DFA has {} states, D2FA has {}",
            dfa.state_count(),
            d2fa.state_count()
        )));
    }
    if dfa.alphabet_size() != d2fa.alphabet_size() {
        return Err(VerifyError::Shape(format!(
            "DFA alphabet {} vs D2FA alphabet {}",
            dfa.alphabet_size(),
            d2fa.alphabet_size()
        )));
    }
    if dfa.start() != d2fa.start() {
        return Err(VerifyError::Shape("start states differ".into()));
    }
    if dfa.accepting_mask() != d2fa.accepting.as_slice() {
        return Err(VerifyError::Shape("accepting sets differ".into()));
    }
    for u in 0..dfa.state_count() as StateId {
        for (c, &expected) in dfa.row(u).iter().enumerate() {
            let found = d2fa.resolve(u, c).ok().map(|s| s.state);
            if found != Some(expected) {
                return Err(VerifyError::Mismatch {
                    state: u,
                    symbol: c,
                    expected,
                    found,
                });
            }
        }
    }
    Ok(())
}
