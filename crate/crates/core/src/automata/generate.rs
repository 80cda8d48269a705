//! Fixtures and seeded synthetic inputs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dfa, MAX_ALPHABET};
use crate::{Error, Result, StateId};

/// The four-state fixture over `{a, b}` (symbols 0 and 1).
///
/// `0:(a→1,b→0) 1:(a→1,b→2) 2:(a→1,b→3) 3:(a→1,b→0)`, start 0, accepting {3}.
pub fn toy_dfa() -> Dfa {
    Dfa::new(2, vec![1, 0, 1, 2, 1, 3, 1, 0], 0, [3]).expect("fixture is valid")
}

/// `δ(0, c) = c mod n`; every other state loops on itself.
pub fn star_dfa(n: usize, alphabet_size: usize) -> Dfa {
    let mut table = Vec::with_capacity(n * alphabet_size);
    for u in 0..n {
        for c in 0..alphabet_size {
            table.push(if u == 0 {
                (c % n) as StateId
            } else {
                u as StateId
            });
        }
    }
    Dfa::new(alphabet_size, table, 0, []).expect("star needs alphabet_size >= n - 1")
}

/// A clustered DFA together with the cluster label of every state.
#[derive(Debug, Clone)]
pub struct ClusteredDfa {
    pub dfa: Dfa,
    pub cluster_of: Vec<u32>,
    /// Number of cells rewritten to make every state reachable.
    pub patched_cells: usize,
}

/// Random DFA whose states fall into `cluster_count` groups sharing a
/// prototype row.
///
/// Each cell of a state's row is independently replaced by a uniform random
/// target with probability `noise`. When `cluster_count * alphabet_size >= n`
/// the prototypes jointly cover every state, so reachability from state 0
/// usually needs no repair; otherwise unreachable states are wired in by
/// rewriting cells that are not on the current reachability tree.
pub fn generate_clustered_dfa(
    n: usize,
    alphabet_size: usize,
    cluster_count: usize,
    noise: f64,
    seed: u64,
) -> Result<Dfa> {
    generate_clustered(n, alphabet_size, cluster_count, noise, seed).map(|c| c.dfa)
}

pub fn generate_clustered(
    n: usize,
    alphabet_size: usize,
    cluster_count: usize,
    noise: f64,
    seed: u64,
) -> Result<ClusteredDfa> {
    if n == 0 || n > StateId::MAX as usize {
        return Err(Error::InvalidParams(format!(
            "state count {n} out of range"
        )));
    }
    if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
        return Err(Error::InvalidParams(format!(
            "alphabet size {alphabet_size} out of range"
        )));
    }
    if cluster_count == 0 || cluster_count > n {
        return Err(Error::InvalidParams(format!(
            "cluster count {cluster_count} must be in 1..={n}"
        )));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidParams(format!("noise {noise} not in [0, 1]")));
    }
    let m = alphabet_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut cluster_of: Vec<u32> = (0..n)
        .map(|i| {
            if i < cluster_count {
                i as u32
            } else {
                rng.gen_range(0..cluster_count as u32)
            }
        })
        .collect();
    // Keep state 0 in cluster 0 but do not leave the low ids in fixed clusters.
    cluster_of[1..].shuffle(&mut rng);

    let cells = cluster_count * m;
    let mut prototypes: Vec<StateId> = (0..cells)
        .map(|i| {
            if i < n {
                i as StateId
            } else {
                rng.gen_range(0..n as StateId)
            }
        })
        .collect();
    prototypes.shuffle(&mut rng);

    let mut table = Vec::with_capacity(n * m);
    for &cl in &cluster_of {
        let proto = &prototypes[cl as usize * m..(cl as usize + 1) * m];
        for &t in proto {
            if noise > 0.0 && rng.gen_bool(noise) {
                table.push(rng.gen_range(0..n as StateId));
            } else {
                table.push(t);
            }
        }
    }
    let patched_cells = patch_reachability(&mut table, n, m, &mut rng);
    let dfa = Dfa::new(m, table, 0, [])?;
    Ok(ClusteredDfa {
        dfa,
        cluster_of,
        patched_cells,
    })
}

/// Rewrites cells until every state is reachable from state 0.
///
/// Cells on the discovery tree of reached states are never rewritten, so
/// nothing reached is ever lost.
fn patch_reachability(table: &mut [StateId], n: usize, m: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut reached = vec![false; n];
    let mut protected = vec![false; n * m];
    let mut reached_list = Vec::with_capacity(n);

    let explore = |from: StateId,
                   table: &[StateId],
                   reached: &mut Vec<bool>,
                   protected: &mut Vec<bool>,
                   reached_list: &mut Vec<StateId>| {
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for c in 0..m {
                let cell = u as usize * m + c;
                let t = table[cell];
                if !reached[t as usize] {
                    reached[t as usize] = true;
                    protected[cell] = true;
                    reached_list.push(t);
                    stack.push(t);
                }
            }
        }
    };

    reached[0] = true;
    reached_list.push(0);
    explore(0, table, &mut reached, &mut protected, &mut reached_list);

    let mut patched = 0;
    for v in 0..n {
        if reached[v] {
            continue;
        }
        let cell = loop {
            let u = reached_list[rng.gen_range(0..reached_list.len())];
            let cell = u as usize * m + rng.gen_range(0..m);
            if !protected[cell] {
                break cell;
            }
        };
        table[cell] = v as StateId;
        protected[cell] = true;
        reached[v] = true;
        reached_list.push(v as StateId);
        patched += 1;
        explore(
            v as StateId,
            table,
            &mut reached,
            &mut protected,
            &mut reached_list,
        );
    }
    patched
}

/// Shape knobs for synthetic signature rules.
///
/// Defaults follow the published IDS rule-set statistics loosely: about
/// half the rules use `*`/`+`/`?`, roughly a third use a counted
/// repetition. The counted bounds are drawn uniformly from
/// `restriction_bounds`; the source data gives no distribution for them.
#[derive(Debug, Clone)]
pub struct RuleShape {
    pub mean_literal_len: usize,
    pub wildcard_rate: f64,
    pub length_restriction_rate: f64,
    pub restriction_bounds: (u32, u32),
    /// Probability that a rule is unanchored (starts with `.*`).
    pub unanchored_rate: f64,
}

impl Default for RuleShape {
    fn default() -> Self {
        RuleShape {
            mean_literal_len: 24,
            wildcard_rate: 0.5,
            length_restriction_rate: 0.3,
            restriction_bounds: (2, 6),
            unanchored_rate: 0.9,
        }
    }
}

const LITERAL_BYTES: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789/=_-:%";

/// Generates `count` rules; prefixes of the output are stable across counts.
pub fn generate_rule_set(count: usize, shape: &RuleShape, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| generate_rule(shape, &mut rng)).collect()
}

fn literal(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len)
        .map(|_| {
            let b = LITERAL_BYTES[rng.gen_range(0..LITERAL_BYTES.len())];
            if b == b'-' {
                "\\-".to_string()
            } else {
                (b as char).to_string()
            }
        })
        .collect()
}

fn generate_rule(shape: &RuleShape, rng: &mut ChaCha8Rng) -> String {
    let total = rng
        .gen_range(shape.mean_literal_len / 2..=shape.mean_literal_len * 3 / 2)
        .max(2);
    let wildcard = rng.gen_bool(shape.wildcard_rate);
    let restricted = rng.gen_bool(shape.length_restriction_rate);
    let mut pieces = 1 + usize::from(wildcard) + usize::from(restricted);
    let mut out = String::new();
    if rng.gen_bool(shape.unanchored_rate) {
        out.push_str(".*");
    }
    let mut remaining = total;
    let mut specials = Vec::new();
    if wildcard {
        specials.push(
            ["[a-z]+", "\\d*", "x?", "[^\\n]*", "(ab|cd)+", "[0-9a-f]+"][rng.gen_range(0..6)]
                .to_string(),
        );
    }
    if restricted {
        let (lo, hi) = shape.restriction_bounds;
        let a = rng.gen_range(lo..=hi);
        let class = ["\\d", "[a-z]", "[^\\n]", "[0-9a-f]"][rng.gen_range(0..4)];
        if rng.gen_bool(0.5) {
            specials.push(format!("{class}{{{a}}}"));
        } else {
            let b = rng.gen_range(a..=hi + 2);
            specials.push(format!("{class}{{{a},{b}}}"));
        }
    }
    specials.shuffle(rng);
    for special in specials {
        let len = (remaining / pieces).max(1);
        out.push_str(&literal(rng, len));
        remaining = remaining.saturating_sub(len);
        pieces -= 1;
        out.push_str(&special);
    }
    out.push_str(&literal(rng, remaining.max(1)));
    out
}
