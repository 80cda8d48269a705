//! Rule-set compilation: union Thompson NFA, then subset construction.

use std::collections::HashMap;

use super::parse::{parse_pattern, Ast, ByteSet};
use super::{minimize, Dfa, MAX_ALPHABET};
use crate::{Error, Result, StateId};

/// Default limit on the number of DFA states before giving up.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

const NFA_STATE_CAP: usize = 20_000_000;

#[derive(Debug, Clone)]
pub struct CompileOptions {
    /// `alphabet[i]` is the byte that DFA symbol `i` stands for.
    pub alphabet: Vec<u8>,
    pub state_cap: usize,
    pub minimize: bool,
}

impl CompileOptions {
    /// Symbols `0..alphabet_size` standing for the bytes of the same value.
    pub fn with_alphabet_size(alphabet_size: usize) -> Result<CompileOptions> {
        if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
            return Err(Error::InvalidParams(format!(
                "alphabet size {alphabet_size} not in 1..={MAX_ALPHABET}"
            )));
        }
        Ok(CompileOptions {
            alphabet: (0..alphabet_size).map(|b| b as u8).collect(),
            state_cap: DEFAULT_STATE_CAP,
            minimize: false,
        })
    }
}

/// Compiles the union of `rules` over the byte alphabet `0..alphabet_size`.
///
/// A string is accepted when at least one rule matches all of it. The
/// result is complete: a dead state is added whenever some transition would
/// otherwise be missing.
pub fn compile_regex_set<S: AsRef<str>>(rules: &[S], alphabet_size: usize) -> Result<Dfa> {
    compile_regex_set_over(rules, &CompileOptions::with_alphabet_size(alphabet_size)?)
}

pub fn compile_regex_set_over<S: AsRef<str>>(rules: &[S], opts: &CompileOptions) -> Result<Dfa> {
    if opts.alphabet.is_empty() || opts.alphabet.len() > MAX_ALPHABET {
        return Err(Error::InvalidParams(
            "alphabet must hold 1..=256 bytes".into(),
        ));
    }
    let mut nfa = Nfa::default();
    let accept = nfa.push(NState::Match)?;
    let mut entries = Vec::with_capacity(rules.len());
    for (i, rule) in rules.iter().enumerate() {
        let ast = parse_pattern(rule.as_ref(), i)?;
        entries.push(nfa.build(&ast, accept)?);
    }
    let start = nfa.union(&entries)?;
    let dfa = determinize(&nfa, start, accept, opts)?;
    Ok(if opts.minimize { minimize(&dfa) } else { dfa })
}

#[derive(Debug, Clone, Copy)]
enum NState {
    Class(ByteSet, u32),
    Split(u32, u32),
    Eps(u32),
    Match,
    /// Entry point of a rule set with no rules.
    Fail,
}

#[derive(Default)]
struct Nfa {
    states: Vec<NState>,
}

impl Nfa {
    fn push(&mut self, s: NState) -> Result<u32> {
        if self.states.len() >= NFA_STATE_CAP {
            return Err(Error::InvalidParams(format!(
                "NFA exceeds {NFA_STATE_CAP} states; reduce counted repetitions"
            )));
        }
        self.states.push(s);
        Ok((self.states.len() - 1) as u32)
    }

    /// Returns the entry state of a fragment for `ast` that continues at `next`.
    fn build(&mut self, ast: &Ast, next: u32) -> Result<u32> {
        match ast {
            Ast::Empty => Ok(next),
            Ast::Class(set) => self.push(NState::Class(*set, next)),
            Ast::Concat(items) => {
                let mut cont = next;
                for item in items.iter().rev() {
                    cont = self.build(item, cont)?;
                }
                Ok(cont)
            }
            Ast::Alt(branches) => {
                let entries = branches
                    .iter()
                    .map(|b| self.build(b, next))
                    .collect::<Result<Vec<_>>>()?;
                self.union(&entries)
            }
            Ast::Repeat { inner, min, max } => {
                let mut cont = match max {
                    None => {
                        let lp = self.push(NState::Split(0, 0))?;
                        let body = self.build(inner, lp)?;
                        self.states[lp as usize] = NState::Split(body, next);
                        lp
                    }
                    Some(max) => {
                        let mut tail = next;
                        for _ in 0..(max - min) {
                            let body = self.build(inner, tail)?;
                            tail = self.push(NState::Split(body, next))?;
                        }
                        tail
                    }
                };
                for _ in 0..*min {
                    cont = self.build(inner, cont)?;
                }
                Ok(cont)
            }
        }
    }

    fn union(&mut self, entries: &[u32]) -> Result<u32> {
        match entries {
            [] => self.push(NState::Fail),
            [only] => self.push(NState::Eps(*only)),
            [first, rest @ ..] => {
                let tail = self.union(rest)?;
                self.push(NState::Split(*first, tail))
            }
        }
    }
}

struct Closure<'a> {
    nfa: &'a Nfa,
    mark: Vec<u32>,
    generation: u32,
    stack: Vec<u32>,
}

impl Closure<'_> {
    /// Epsilon closure of `seeds`, keeping only consuming and match states.
    fn run(&mut self, seeds: impl IntoIterator<Item = u32>, out: &mut Vec<u32>) {
        self.generation += 1;
        out.clear();
        self.stack.extend(seeds);
        while let Some(s) = self.stack.pop() {
            if self.mark[s as usize] == self.generation {
                continue;
            }
            self.mark[s as usize] = self.generation;
            match self.nfa.states[s as usize] {
                NState::Class(..) | NState::Match => out.push(s),
                NState::Split(a, b) => {
                    self.stack.push(b);
                    self.stack.push(a);
                }
                NState::Eps(a) => self.stack.push(a),
                NState::Fail => {}
            }
        }
        out.sort_unstable();
    }
}

/// Groups symbols that no NFA class distinguishes.
fn symbol_classes(nfa: &Nfa, alphabet: &[u8]) -> (Vec<u32>, Vec<u8>) {
    let mut class_of = vec![0u32; alphabet.len()];
    let mut seen = std::collections::HashSet::new();
    for s in &nfa.states {
        let NState::Class(set, _) = s else { continue };
        if !seen.insert(*set) {
            continue;
        }
        let mut remap: HashMap<(u32, bool), u32> = HashMap::new();
        for (i, &b) in alphabet.iter().enumerate() {
            let key = (class_of[i], set.contains(b));
            let fresh = remap.len() as u32;
            class_of[i] = *remap.entry(key).or_insert(fresh);
        }
    }
    let count = class_of.iter().copied().max().map_or(0, |m| m + 1) as usize;
    let mut reps = vec![0u8; count];
    let mut have = vec![false; count];
    for (i, &c) in class_of.iter().enumerate() {
        if !have[c as usize] {
            have[c as usize] = true;
            reps[c as usize] = alphabet[i];
        }
    }
    (class_of, reps)
}

fn determinize(nfa: &Nfa, start: u32, accept: u32, opts: &CompileOptions) -> Result<Dfa> {
    let (class_of, reps) = symbol_classes(nfa, &opts.alphabet);
    let mut closure = Closure {
        nfa,
        mark: vec![0; nfa.states.len()],
        generation: 0,
        stack: Vec::new(),
    };

    let mut ids: HashMap<Vec<u32>, StateId> = HashMap::new();
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut class_rows: Vec<StateId> = Vec::new();

    let mut first = Vec::new();
    closure.run([start], &mut first);
    ids.insert(first.clone(), 0);
    sets.push(first);

    let mut seeds = Vec::new();
    let mut next = Vec::new();
    let mut cursor = 0;
    while cursor < sets.len() {
        for &rep in &reps {
            seeds.clear();
            for &s in &sets[cursor] {
                if let NState::Class(set, to) = nfa.states[s as usize] {
                    if set.contains(rep) {
                        seeds.push(to);
                    }
                }
            }
            closure.run(seeds.drain(..), &mut next);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if sets.len() >= opts.state_cap {
                        return Err(Error::StateBlowup {
                            cap: opts.state_cap,
                        });
                    }
                    let id = sets.len() as StateId;
                    ids.insert(next.clone(), id);
                    sets.push(next.clone());
                    id
                }
            };
            class_rows.push(id);
        }
        cursor += 1;
    }

    let m = opts.alphabet.len();
    let k = reps.len();
    let mut table = Vec::with_capacity(sets.len() * m);
    for u in 0..sets.len() {
        let row = &class_rows[u * k..(u + 1) * k];
        table.extend(class_of.iter().map(|&c| row[c as usize]));
    }
    let accepting: Vec<StateId> = sets
        .iter()
        .enumerate()
        .filter(|(_, set)| set.binary_search(&accept).is_ok())
        .map(|(u, _)| u as StateId)
        .collect();
    Dfa::from_parts(m, table, 0, accepting)
}
