//! Spanning trees and forests over similarity graphs.
//!
//! Undirected results are returned as [`UnrootedForest`]; [`root_and_direct`]
//! turns them into a [`Forest`] whose parent pointers become default
//! transitions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;

use crate::graphs::{Edge, WeightedGraph};
use crate::{Error, Result, StateId};

/// Rooted forest with every edge directed toward its root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    parent: Vec<Option<StateId>>,
    roots: Vec<StateId>,
    tree_id: Vec<u32>,
}

impl Forest {
    pub fn singletons(n: usize) -> Forest {
        Forest {
            parent: vec![None; n],
            roots: (0..n as StateId).collect(),
            tree_id: (0..n as u32).collect(),
        }
    }

    /// Checks ranges and acyclicity of a parent array.
    pub fn from_parents(parent: Vec<Option<StateId>>) -> Result<Forest> {
        let n = parent.len();
        for (u, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p as usize >= n {
                    return Err(Error::StateOutOfRange { id: p as u64, n });
                }
                if p as usize == u {
                    return Err(Error::InvalidForest(format!("node {u} is its own parent")));
                }
            }
        }
        // 0 = unvisited, 1 = on the current chain, 2 = resolved.
        let mut state = vec![0u8; n];
        let mut tree_id = vec![u32::MAX; n];
        let mut roots = Vec::new();
        for u in 0..n {
            if parent[u].is_none() {
                tree_id[u] = roots.len() as u32;
                roots.push(u as StateId);
                state[u] = 2;
            }
        }
        let mut chain = Vec::new();
        for u in 0..n {
            let mut at = u;
            while state[at] == 0 {
                state[at] = 1;
                chain.push(at);
                at = parent[at].unwrap() as usize;
            }
            if state[at] == 1 {
                return Err(Error::InvalidForest(format!(
                    "parent pointers cycle through node {at}"
                )));
            }
            let id = tree_id[at];
            for &c in &chain {
                state[c] = 2;
                tree_id[c] = id;
            }
            chain.clear();
        }
        Ok(Forest {
            parent,
            roots,
            tree_id,
        })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, u: StateId) -> Option<StateId> {
        self.parent[u as usize]
    }

    pub fn parents(&self) -> &[Option<StateId>] {
        &self.parent
    }

    pub fn roots(&self) -> &[StateId] {
        &self.roots
    }

    /// Index into [`Forest::roots`] of the tree containing `u`.
    pub fn tree_id(&self, u: StateId) -> u32 {
        self.tree_id[u as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - self.roots.len()
    }

    /// Length of every node's parent chain.
    pub fn depths(&self) -> Vec<u32> {
        let n = self.parent.len();
        let mut depth = vec![u32::MAX; n];
        let mut chain = Vec::new();
        for u in 0..n {
            let mut at = u;
            while depth[at] == u32::MAX {
                match self.parent[at] {
                    None => depth[at] = 0,
                    Some(p) => {
                        chain.push(at);
                        at = p as usize;
                    }
                }
            }
            let mut d = depth[at];
            while let Some(c) = chain.pop() {
                d += 1;
                depth[c] = d;
            }
        }
        depth
    }

    pub fn max_depth(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0) as usize
    }

    /// Writes one `child parent` line per edge.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                writeln!(out, "{u} {p}")?;
            }
        }
        Ok(())
    }
}

/// An acyclic set of undirected weighted edges over `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnrootedForest {
    node_count: usize,
    edges: Vec<Edge>,
}

impl UnrootedForest {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<UnrootedForest> {
        let mut sets = DisjointSets::new(node_count);
        for e in &edges {
            if e.u as usize >= node_count || e.v as usize >= node_count {
                return Err(Error::StateOutOfRange {
                    id: e.u.max(e.v) as u64,
                    n: node_count,
                });
            }
            if !sets.union(e.u, e.v) {
                return Err(Error::InvalidForest(format!(
                    "edge ({}, {}) closes a cycle",
                    e.u, e.v
                )));
            }
        }
        Ok(UnrootedForest { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<StateId>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for e in &self.edges {
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
        }
        adj
    }

    /// Diameter (in edges) of the component containing each node's tree,
    /// one entry per component in order of smallest member.
    pub fn diameters(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut bfs = Bfs::new(self.node_count);
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        for s in 0..self.node_count as StateId {
            if seen[s as usize] {
                continue;
            }
            let (a, _) = bfs.farthest(&adj, s);
            for &x in &bfs.order {
                seen[x as usize] = true;
            }
            let (_, d) = bfs.farthest(&adj, a);
            out.push(d as usize);
        }
        out
    }

    pub fn max_diameter(&self) -> usize {
        self.diameters().into_iter().max().unwrap_or(0)
    }
}

struct DisjointSets {
    parent: Vec<StateId>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> DisjointSets {
        DisjointSets {
            parent: (0..n as StateId).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: StateId) -> StateId {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: StateId, b: StateId) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            Ordering::Less => self.parent[ra as usize] = rb,
            Ordering::Greater => self.parent[rb as usize] = ra,
            Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
        true
    }
}

/// Reusable breadth-first search over forest adjacency lists.
struct Bfs {
    dist: Vec<u32>,
    via: Vec<StateId>,
    order: Vec<StateId>,
}

impl Bfs {
    fn new(n: usize) -> Bfs {
        Bfs {
            dist: vec![u32::MAX; n],
            via: vec![0; n],
            order: Vec::new(),
        }
    }

    fn clear(&mut self) {
        for &x in &self.order {
            self.dist[x as usize] = u32::MAX;
        }
        self.order.clear();
    }

    /// Visits the tree of `from`; `order` and `dist` stay valid until the next run.
    fn run(&mut self, adj: &[Vec<StateId>], from: StateId) {
        self.clear();
        self.dist[from as usize] = 0;
        self.via[from as usize] = from;
        self.order.push(from);
        let mut head = 0;
        while head < self.order.len() {
            let x = self.order[head];
            head += 1;
            let d = self.dist[x as usize] + 1;
            for &y in &adj[x as usize] {
                if self.dist[y as usize] == u32::MAX {
                    self.dist[y as usize] = d;
                    self.via[y as usize] = x;
                    self.order.push(y);
                }
            }
        }
    }

    /// Farthest node from `from` (smallest id on ties) and its distance.
    fn farthest(&mut self, adj: &[Vec<StateId>], from: StateId) -> (StateId, u32) {
        self.run(adj, from);
        let mut best = (from, 0);
        for &x in &self.order {
            let d = self.dist[x as usize];
            if d > best.1 || (d == best.1 && x < best.0) {
                best = (x, d);
            }
        }
        best
    }
}

/// Maximum-weight spanning forest by Kruskal's algorithm.
///
/// The graph already stores edges in Kruskal order (weight descending, then
/// endpoint ids), which fixes the tie-breaking.
pub fn kruskal_mst(graph: &WeightedGraph) -> UnrootedForest {
    let n = graph.node_count();
    let mut sets = DisjointSets::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for e in graph.edges() {
        if sets.union(e.u, e.v) {
            edges.push(*e);
            if edges.len() + 1 == n {
                break;
            }
        }
    }
    UnrootedForest {
        node_count: n,
        edges,
    }
}

fn center_of(adj: &[Vec<StateId>], bfs: &mut Bfs, member: StateId) -> StateId {
    let (a, _) = bfs.farthest(adj, member);
    let (b, diameter) = bfs.farthest(adj, a);
    // Walk back from b toward a; the path is b = p_D, ..., p_0 = a.
    let lo = diameter / 2;
    let hi = diameter - lo;
    let mut at = b;
    let mut centers = Vec::with_capacity(2);
    for pos in (0..=diameter).rev() {
        if pos == lo || pos == hi {
            centers.push(at);
        }
        at = bfs.via[at as usize];
    }
    centers.into_iter().min().unwrap()
}

/// A node of minimum eccentricity in the tree containing `member`.
///
/// Found by double BFS: one end of a diameter path, then the middle of that
/// path. A tree has one or two centers regardless of which diameter path is
/// found; the smaller id wins.
pub fn central_node(tree: &UnrootedForest, member: StateId) -> StateId {
    let adj = tree.adjacency();
    let mut bfs = Bfs::new(tree.node_count);
    center_of(&adj, &mut bfs, member)
}

/// Roots every tree at its central node and points edges at the root.
pub fn root_and_direct(forest: &UnrootedForest) -> Forest {
    let n = forest.node_count;
    let adj = forest.adjacency();
    let mut bfs = Bfs::new(n);
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    for s in 0..n as StateId {
        if done[s as usize] {
            continue;
        }
        let root = center_of(&adj, &mut bfs, s);
        bfs.run(&adj, root);
        for &x in &bfs.order {
            done[x as usize] = true;
            if x != root {
                parent[x as usize] = Some(bfs.via[x as usize]);
            }
        }
    }
    Forest::from_parents(parent).expect("BFS parents form a forest")
}

/// Greedy maximum spanning forest whose trees have diameter at most `delta`.
///
/// Edges are taken in groups of equal weight, heaviest first. Inside a
/// group the feasible edge whose merge grows the resulting tree's diameter
/// the least (over the larger of the two old diameters) is taken next, ties
/// going to the smaller endpoint ids, until no feasible edge remains.
/// Node eccentricities are recomputed over the whole merged tree on every
/// merge, so the worst case is quadratic in the tree sizes.
pub fn kruskal_bounded_diameter(graph: &WeightedGraph, delta: usize) -> UnrootedForest {
    let n = graph.node_count();
    let delta = delta.min(u32::MAX as usize) as u32;
    let mut tree_of: Vec<u32> = (0..n as u32).collect();
    let mut members: Vec<Vec<StateId>> = (0..n as StateId).map(|u| vec![u]).collect();
    let mut diameter = vec![0u32; n];
    let mut ecc = vec![0u32; n];
    let mut adj: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut bfs = Bfs::new(n);
    let mut dist_a = vec![0u32; n];
    let mut chosen = Vec::new();

    let edges = graph.edges();
    const END: u32 = u32::MAX;
    let mut next_of: Vec<u32> = Vec::new();
    let mut lo = 0;
    while lo < edges.len() {
        let w = edges[lo].weight;
        let mut hi = lo;
        while hi < edges.len() && edges[hi].weight == w {
            hi += 1;
        }
        let group = &edges[lo..hi];
        next_of.clear();
        next_of.extend((1..=group.len() as u32).map(|i| {
            if i as usize == group.len() {
                END
            } else {
                i
            }
        }));
        let mut head = if group.is_empty() { END } else { 0 };

        loop {
            // Find the first edge of minimum increase; drop edges that can
            // never be used again (same tree, or too wide: trees only grow).
            let mut best: Option<(u32, u32, u32)> = None; // (increase, index, prev)
            let mut prev = END;
            let mut at = head;
            while at != END {
                let e = &group[at as usize];
                let (tu, tv) = (tree_of[e.u as usize], tree_of[e.v as usize]);
                let next = next_of[at as usize];
                let old = diameter[tu as usize].max(diameter[tv as usize]);
                let merged = old.max(ecc[e.u as usize] + 1 + ecc[e.v as usize]);
                if tu == tv || merged > delta {
                    if prev == END {
                        head = next;
                    } else {
                        next_of[prev as usize] = next;
                    }
                    at = next;
                    continue;
                }
                let increase = merged - old;
                if best.is_none_or(|b| increase < b.0) {
                    best = Some((increase, at, prev));
                    if increase == 0 {
                        break;
                    }
                }
                prev = at;
                at = next;
            }
            let Some((_, idx, prev)) = best else { break };
            let next = next_of[idx as usize];
            if prev == END {
                head = next;
            } else {
                next_of[prev as usize] = next;
            }

            let e = group[idx as usize];
            chosen.push(e);
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
            let (mut keep, mut gone) = (tree_of[e.u as usize], tree_of[e.v as usize]);
            if members[keep as usize].len() < members[gone as usize].len() {
                std::mem::swap(&mut keep, &mut gone);
            }
            let moved = std::mem::take(&mut members[gone as usize]);
            for &x in &moved {
                tree_of[x as usize] = keep;
            }
            members[keep as usize].extend(moved);

            let (a, _) = bfs.farthest(&adj, e.u);
            let (b, d) = bfs.farthest(&adj, a);
            for &x in &bfs.order {
                dist_a[x as usize] = bfs.dist[x as usize];
            }
            bfs.run(&adj, b);
            for &x in &bfs.order {
                ecc[x as usize] = dist_a[x as usize].max(bfs.dist[x as usize]);
            }
            diameter[keep as usize] = d;
        }
        lo = hi;
    }
    UnrootedForest {
        node_count: n,
        edges: chosen,
    }
}

/// Frontier priority in penalized Prim: `base − 2^min(depth, 40)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PenalizedWeight {
    pub base: u32,
    /// Depth the candidate node would get in the tree.
    pub depth: u32,
}

impl PenalizedWeight {
    pub const MAX_EXPONENT: u32 = 40;

    pub fn effective(&self) -> i64 {
        self.base as i64 - (1i64 << self.depth.min(Self::MAX_EXPONENT))
    }
}

impl Ord for PenalizedWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.effective()
            .cmp(&other.effective())
            .then(self.base.cmp(&other.base))
    }
}

impl PartialOrd for PenalizedWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(PartialEq, Eq)]
struct Candidate {
    key: Option<PenalizedWeight>,
    base: u32,
    from: StateId,
    to: StateId,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then(self.base.cmp(&other.base))
            .then(other.from.cmp(&self.from))
            .then(other.to.cmp(&self.to))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Spanning tree grown from `root` together with each node's depth.
#[derive(Debug, Clone)]
pub struct GrownTree {
    pub root: StateId,
    pub tree: UnrootedForest,
    pub depth: Vec<u32>,
}

/// Prim's algorithm from `v0` with the frontier weighted by
/// [`PenalizedWeight`], so a deep attachment must be much more similar to
/// beat a shallow one.
pub fn prim_penalized(graph: &WeightedGraph, v0: StateId) -> Result<GrownTree> {
    prim_spanning_tree(graph, v0, true)
}

/// Prim's algorithm; with `penalize = false` this is a plain maximum
/// spanning tree.
pub fn prim_spanning_tree(graph: &WeightedGraph, v0: StateId, penalize: bool) -> Result<GrownTree> {
    let n = graph.node_count();
    if v0 as usize >= n {
        return Err(Error::StateOutOfRange { id: v0 as u64, n });
    }
    let mut depth = vec![u32::MAX; n];
    depth[v0 as usize] = 0;
    let edges = if n >= 2 && graph.edge_count() == n * (n - 1) / 2 {
        prim_complete(graph, v0, penalize, &mut depth)
    } else {
        prim_heap(graph, v0, penalize, &mut depth)
    };
    if let Some(missing) = depth.iter().position(|&d| d == u32::MAX) {
        return Err(Error::Disconnected(missing as StateId));
    }
    Ok(GrownTree {
        root: v0,
        tree: UnrootedForest {
            node_count: n,
            edges,
        },
        depth,
    })
}

fn candidate(
    from: StateId,
    to: StateId,
    weight: u32,
    from_depth: u32,
    penalize: bool,
) -> Candidate {
    Candidate {
        key: penalize.then_some(PenalizedWeight {
            base: weight,
            depth: from_depth + 1,
        }),
        base: weight,
        from,
        to,
    }
}

/// Lazy-deletion heap over adjacency lists, for sparse graphs.
fn prim_heap(graph: &WeightedGraph, v0: StateId, penalize: bool, depth: &mut [u32]) -> Vec<Edge> {
    let adj = graph.adjacency();
    let mut edges = Vec::with_capacity(graph.node_count().saturating_sub(1));
    let mut heap = BinaryHeap::new();
    let push_all = |x: StateId, depth: &[u32], heap: &mut BinaryHeap<Candidate>| {
        for &(y, w) in adj.neighbors(x) {
            if depth[y as usize] == u32::MAX {
                heap.push(candidate(x, y, w, depth[x as usize], penalize));
            }
        }
    };
    push_all(v0, depth, &mut heap);
    while let Some(c) = heap.pop() {
        if depth[c.to as usize] != u32::MAX {
            continue;
        }
        depth[c.to as usize] = depth[c.from as usize] + 1;
        edges.push(Edge::new(c.from, c.to, c.base));
        push_all(c.to, depth, &mut heap);
    }
    edges
}

/// Quadratic Prim over a weight matrix, for complete graphs. Keeping the
/// best candidate per outside node selects the same edges as the heap.
fn prim_complete(
    graph: &WeightedGraph,
    v0: StateId,
    penalize: bool,
    depth: &mut [u32],
) -> Vec<Edge> {
    let n = graph.node_count();
    let tri = |u: usize, v: usize| {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        u * n - u * (u + 1) / 2 + (v - u - 1)
    };
    let mut weight = vec![0u32; n * (n - 1) / 2];
    for e in graph.edges() {
        weight[tri(e.u as usize, e.v as usize)] = e.weight;
    }
    let mut best: Vec<Option<Candidate>> = (0..n).map(|_| None).collect();
    let mut outside: Vec<StateId> = (0..n as StateId).filter(|&y| y != v0).collect();
    let mut edges = Vec::with_capacity(n - 1);
    let mut x = v0;
    loop {
        let dx = depth[x as usize];
        for &y in &outside {
            let c = candidate(x, y, weight[tri(x as usize, y as usize)], dx, penalize);
            let slot = &mut best[y as usize];
            if slot.as_ref().is_none_or(|b| c > *b) {
                *slot = Some(c);
            }
        }
        let Some((pos, _)) = outside
            .iter()
            .enumerate()
            .max_by(|a, b| best[*a.1 as usize].cmp(&best[*b.1 as usize]))
        else {
            break;
        };
        let y = outside.swap_remove(pos);
        let c = best[y as usize].take().expect("complete graph");
        depth[y as usize] = depth[c.from as usize] + 1;
        edges.push(Edge::new(c.from, y, c.base));
        x = y;
    }
    edges
}

/// Result of [`cut_to_diameter`].
#[derive(Debug, Clone)]
pub struct CutForest {
    /// Surviving trees, rooted at their central nodes.
    pub forest: Forest,
    pub kept: UnrootedForest,
    pub cut: Vec<Edge>,
}

/// Removes a minimum number of edges so every tree has diameter ≤ `delta`.
///
/// Bottom-up over each tree rooted at its smallest id: a node's surviving
/// child branches have heights `h + 1`; while the two tallest together (or
/// the tallest alone) exceed `delta`, the tallest branch is cut off.
pub fn cut_to_diameter(forest: &UnrootedForest, delta: usize) -> CutForest {
    let n = forest.node_count;
    let adj = forest.adjacency();
    let mut bfs = Bfs::new(n);
    let mut height = vec![0usize; n];
    let mut weight_to_parent = vec![0u32; n];
    let mut parent: Vec<Option<StateId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut cut = Vec::new();
    let mut kept = Vec::new();
    let mut branches: Vec<(usize, StateId)> = Vec::new();

    let weight_of = {
        let mut map = std::collections::HashMap::with_capacity(forest.edges.len());
        for e in &forest.edges {
            map.insert((e.u, e.v), e.weight);
        }
        map
    };

    for s in 0..n as StateId {
        if done[s as usize] {
            continue;
        }
        bfs.run(&adj, s);
        for &x in &bfs.order {
            done[x as usize] = true;
            if x != s {
                let p = bfs.via[x as usize];
                parent[x as usize] = Some(p);
                weight_to_parent[x as usize] = weight_of[&(p.min(x), p.max(x))];
            }
        }
        for &x in bfs.order.iter().rev() {
            branches.clear();
            for &y in &adj[x as usize] {
                if parent[y as usize] == Some(x) && parent[x as usize] != Some(y) {
                    branches.push((height[y as usize] + 1, y));
                }
            }
            branches.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut first = 0;
            while first < branches.len() {
                let top = branches[first].0;
                let second = branches.get(first + 1).map_or(0, |b| b.0);
                if top + second <= delta {
                    break;
                }
                let child = branches[first].1;
                cut.push(Edge::new(x, child, weight_to_parent[child as usize]));
                first += 1;
            }
            for &(_, child) in &branches[first..] {
                kept.push(Edge::new(x, child, weight_to_parent[child as usize]));
            }
            height[x as usize] = branches.get(first).map_or(0, |b| b.0);
        }
    }
    let kept = UnrootedForest {
        node_count: n,
        edges: kept,
    };
    CutForest {
        forest: root_and_direct(&kept),
        kept,
        cut,
    }
}
