//! Hopcroft partition refinement.

use std::collections::{HashSet, VecDeque};

use super::Dfa;
use crate::StateId;

struct Partition {
    elems: Vec<StateId>,
    loc: Vec<usize>,
    block_of: Vec<usize>,
    start: Vec<usize>,
    end: Vec<usize>,
    marked: Vec<usize>,
}

impl Partition {
    fn new(n: usize, accepting: &[bool]) -> Partition {
        let mut elems: Vec<StateId> = (0..n as StateId).collect();
        elems.sort_by_key(|&u| !accepting[u as usize]);
        let split = accepting.iter().filter(|&&a| a).count();
        let mut p = Partition {
            loc: vec![0; n],
            block_of: vec![0; n],
            elems,
            start: Vec::new(),
            end: Vec::new(),
            marked: Vec::new(),
        };
        for (i, &u) in p.elems.iter().enumerate() {
            p.loc[u as usize] = i;
        }
        for (lo, hi) in [(0, split), (split, n)] {
            if lo < hi {
                let b = p.start.len();
                p.start.push(lo);
                p.end.push(hi);
                p.marked.push(0);
                for i in lo..hi {
                    p.block_of[p.elems[i] as usize] = b;
                }
            }
        }
        p
    }

    fn size(&self, b: usize) -> usize {
        self.end[b] - self.start[b]
    }

    /// Moves `u` into the marked prefix of its block; false if already there.
    fn mark(&mut self, u: StateId) -> bool {
        let b = self.block_of[u as usize];
        let pos = self.loc[u as usize];
        let front = self.start[b] + self.marked[b];
        if pos < front {
            return false;
        }
        let other = self.elems[front];
        self.elems.swap(pos, front);
        self.loc[other as usize] = pos;
        self.loc[u as usize] = front;
        self.marked[b] += 1;
        true
    }

    /// Splits the marked prefix off `b` as a new block, if it is proper.
    fn split(&mut self, b: usize) -> Option<usize> {
        let marked = std::mem::take(&mut self.marked[b]);
        if marked == self.size(b) {
            return None;
        }
        let nb = self.start.len();
        let lo = self.start[b];
        self.start.push(lo);
        self.end.push(lo + marked);
        self.marked.push(0);
        self.start[b] = lo + marked;
        for i in lo..lo + marked {
            self.block_of[self.elems[i] as usize] = nb;
        }
        Some(nb)
    }
}

/// Returns the minimal DFA equivalent to `dfa`.
///
/// States are renumbered in breadth-first order from the start state, so the
/// result is deterministic.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let n = dfa.state_count();
    let m = dfa.alphabet_size();

    // Inverse transitions, CSR keyed by (symbol, target).
    let mut offsets = vec![0usize; n * m + 1];
    for u in 0..n as StateId {
        for (c, &t) in dfa.row(u).iter().enumerate() {
            offsets[c * n + t as usize + 1] += 1;
        }
    }
    for i in 1..offsets.len() {
        offsets[i] += offsets[i - 1];
    }
    let mut fill = offsets.clone();
    let mut sources = vec![0 as StateId; n * m];
    for u in 0..n as StateId {
        for (c, &t) in dfa.row(u).iter().enumerate() {
            let slot = &mut fill[c * n + t as usize];
            sources[*slot] = u;
            *slot += 1;
        }
    }

    let mut part = Partition::new(n, dfa.accepting_mask());
    let mut pending: VecDeque<(usize, usize)> = VecDeque::new();
    let mut in_work: HashSet<(usize, usize)> = HashSet::new();
    for b in 0..part.start.len() {
        for c in 0..m {
            pending.push_back((b, c));
            in_work.insert((b, c));
        }
    }

    let mut splitter = Vec::new();
    let mut touched = Vec::new();
    while let Some((b, c)) = pending.pop_front() {
        in_work.remove(&(b, c));
        splitter.clear();
        splitter.extend_from_slice(&part.elems[part.start[b]..part.end[b]]);
        for &t in &splitter {
            let idx = c * n + t as usize;
            for &s in &sources[offsets[idx]..offsets[idx + 1]] {
                let blk = part.block_of[s as usize];
                if part.marked[blk] == 0 {
                    touched.push(blk);
                }
                part.mark(s);
            }
        }
        for blk in touched.drain(..) {
            let Some(nb) = part.split(blk) else { continue };
            for c2 in 0..m {
                if in_work.contains(&(blk, c2)) {
                    in_work.insert((nb, c2));
                    pending.push_back((nb, c2));
                } else {
                    let smaller = if part.size(nb) <= part.size(blk) {
                        nb
                    } else {
                        blk
                    };
                    in_work.insert((smaller, c2));
                    pending.push_back((smaller, c2));
                }
            }
        }
    }

    let blocks = part.start.len();
    let mut id_of = vec![StateId::MAX; blocks];
    let mut order = Vec::with_capacity(blocks);
    let mut queue = VecDeque::new();
    let b0 = part.block_of[dfa.start() as usize];
    id_of[b0] = 0;
    queue.push_back(b0);
    while let Some(b) = queue.pop_front() {
        order.push(b);
        let rep = part.elems[part.start[b]];
        for &t in dfa.row(rep) {
            let tb = part.block_of[t as usize];
            if id_of[tb] == StateId::MAX {
                id_of[tb] = (order.len() + queue.len()) as StateId;
                queue.push_back(tb);
            }
        }
    }
    let mut table = Vec::with_capacity(order.len() * m);
    let mut accepting = Vec::new();
    for (new_id, &b) in order.iter().enumerate() {
        let rep = part.elems[part.start[b]];
        table.extend(
            dfa.row(rep)
                .iter()
                .map(|&t| id_of[part.block_of[t as usize]]),
        );
        if dfa.is_accepting(rep) {
            accepting.push(new_id as StateId);
        }
    }
    Dfa::from_parts(m, table, 0, accepting).expect("quotient of a valid DFA is valid")
}
