//! Canonical undirected graph representation, exact task oracles, and the
//! witness validators that anchor all downstream scoring.
//!
//! Graphs are simple (no self-loops, no duplicate edges) with node ids
//! `0..node_count`. All solvers are exact and deterministic: when several
//! optimal witnesses exist, the lexicographically smallest one is returned.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::collections::VecDeque;

/// Hard limit of the bitset-based exact solvers.
pub const EXACT_SOLVER_CAP: usize = 64;

/// Immutable simple undirected graph with canonical node ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges may be given in either
    /// orientation; self-loops and duplicates are rejected.
    pub fn new(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("node_count must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            for id in [a, b] {
                if id >= node_count {
                    return Err(Error::InvalidNode { id, node_count });
                }
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
        }
        Ok(Self::from_edge_set(node_count, set))
    }

    pub(crate) fn from_edge_set(node_count: usize, set: BTreeSet<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); node_count];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            node_count,
            edges: set.into_iter().collect(),
            adj,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of edges, `m`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        self.adj
            .get(v)
            .map(|l| l.as_slice())
            .ok_or(Error::InvalidNode {
                id: v,
                node_count: self.node_count,
            })
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count
            && v < self.node_count
            && u != v
            && self.adj[u].binary_search(&v).is_ok()
    }

    /// Plain-text adjacency list, one `u: v1 v2 ...` line per node.
    pub fn adjacency_list_text(&self) -> String {
        let mut out = String::new();
        for v in 0..self.node_count {
            out.push_str(&v.to_string());
            out.push(':');
            for w in &self.adj[v] {
                out.push(' ');
                out.push_str(&w.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count <= 1 {
            return true;
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.node_count
    }

    fn check_node(&self, id: usize) -> Result<()> {
        if id >= self.node_count {
            return Err(Error::InvalidNode {
                id,
                node_count: self.node_count,
            });
        }
        Ok(())
    }

    /// Nodes adjacent to both `u` and `v`, sorted ascending.
    pub fn common_neighbors(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidGraph(format!(
                "common_neighbors requires distinct nodes, got {u} twice"
            )));
        }
        // Both lists are sorted; merge-intersect.
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// BFS-exact shortest path from `u` to `v`, measured in edges.
    ///
    /// Returns `None` when the two nodes are disconnected. Among all
    /// shortest paths the lexicographically smallest node sequence is
    /// returned.
    pub fn shortest_path(&self, u: usize, v: usize) -> Result<Option<ShortestPath>> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::InvalidGraph(format!(
                "shortest_path requires distinct nodes, got {u} twice"
            )));
        }
        // Distances to the target; then walk greedily from the source,
        // always taking the smallest neighbor that makes progress.
        let dist = self.bfs_distances(v);
        let Some(total) = dist[u] else {
            return Ok(None);
        };
        let mut nodes = vec![u];
        let mut cur = u;
        let mut remaining = total;
        while cur != v {
            let next = self.adj[cur]
                .iter()
                .copied()
                .find(|&w| dist[w] == Some(remaining - 1))
                .expect("BFS distance invariant");
            nodes.push(next);
            cur = next;
            remaining -= 1;
        }
        Ok(Some(ShortestPath {
            length: total,
            nodes,
        }))
    }

    fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for &w in &self.adj[x] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn neighbor_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.node_count];
        for &(u, v) in &self.edges {
            masks[u] |= 1 << v;
            masks[v] |= 1 << u;
        }
        masks
    }

    /// Exact maximum clique via branch and bound with greedy-coloring
    /// pruning. Errors if the graph exceeds `cap` nodes; never approximates.
    pub fn max_clique_with_cap(&self, cap: usize) -> Result<OptimalSet> {
        let cap = cap.min(EXACT_SOLVER_CAP);
        if self.node_count > cap {
            return Err(Error::SolverCapExceeded {
                n: self.node_count,
                cap,
            });
        }
        let masks = self.neighbor_masks();
        let all = all_bits(self.node_count);
        let size = max_clique_size(&masks, all);
        let nodes = lex_smallest_clique(&masks, all, size);
        Ok(OptimalSet { size, nodes })
    }

    pub fn max_clique(&self) -> Result<OptimalSet> {
        self.max_clique_with_cap(EXACT_SOLVER_CAP)
    }

    /// Size of a maximum independent set (clique of the complement).
    pub fn max_independent_set_size(&self) -> Result<usize> {
        if self.node_count > EXACT_SOLVER_CAP {
            return Err(Error::SolverCapExceeded {
                n: self.node_count,
                cap: EXACT_SOLVER_CAP,
            });
        }
        let comp = self.complement_masks();
        Ok(max_clique_size(&comp, all_bits(self.node_count)))
    }

    /// Exact minimum vertex cover, solved as the complement of a maximum
    /// independent set on the same branch-and-bound core.
    pub fn min_vertex_cover_with_cap(&self, cap: usize) -> Result<OptimalSet> {
        let cap = cap.min(EXACT_SOLVER_CAP);
        if self.node_count > cap {
            return Err(Error::SolverCapExceeded {
                n: self.node_count,
                cap,
            });
        }
        let comp = self.complement_masks();
        let mis = max_clique_size(&comp, all_bits(self.node_count));
        let size = self.node_count - mis;
        let nodes = self.lex_smallest_cover(size);
        Ok(OptimalSet { size, nodes })
    }

    pub fn min_vertex_cover(&self) -> Result<OptimalSet> {
        self.min_vertex_cover_with_cap(EXACT_SOLVER_CAP)
    }

    fn complement_masks(&self) -> Vec<u64> {
        let all = all_bits(self.node_count);
        self.neighbor_masks()
            .iter()
            .enumerate()
            .map(|(v, &m)| all & !m & !(1u64 << v))
            .collect()
    }

    /// Lexicographically smallest vertex cover of the (known optimal) size,
    /// built greedily with an exact feasibility check per candidate.
    fn lex_smallest_cover(&self, size: usize) -> Vec<usize> {
        let masks = self.neighbor_masks();
        let comp = self.complement_masks();
        let n = self.node_count;
        let mut chosen: Vec<usize> = Vec::with_capacity(size);
        let mut chosen_mask = 0u64;
        let mut candidate = 0usize;
        while chosen.len() < size {
            debug_assert!(candidate < n, "cover feasibility invariant");
            let trial_mask = chosen_mask | (1u64 << candidate);
            if self.cover_completable(&masks, &comp, trial_mask, candidate, size) {
                chosen.push(candidate);
                chosen_mask = trial_mask;
            }
            candidate += 1;
        }
        chosen
    }

    /// Can `chosen` (all ids <= last) be completed to a cover of `size`
    /// using only ids > last?
    fn cover_completable(
        &self,
        masks: &[u64],
        comp: &[u64],
        chosen: u64,
        last: usize,
        size: usize,
    ) -> bool {
        let n = self.node_count;
        let budget = size - (chosen.count_ones() as usize);
        let future = all_bits(n) & !low_bits(last + 1); // ids > last
        let dead = all_bits(n) & !chosen & !future; // excluded forever
        let mut forced = 0u64;
        for v in bits(dead) {
            let open = masks[v] & !chosen;
            if open & dead != 0 {
                return false; // edge with both endpoints excluded
            }
            forced |= open; // endpoints in `future` must join the cover
        }
        if (forced.count_ones() as usize) > budget {
            return false;
        }
        // Remaining uncovered edges lie inside this set.
        let free = future & !forced;
        let sub_mis = max_clique_size_at_least(comp, free, usize::MAX);
        let residual_cover = (free.count_ones() as usize) - sub_mis;
        (forced.count_ones() as usize) + residual_cover <= budget
    }

    /// Count of consecutive pairs in `path` that are edges of the graph.
    /// Unknown node ids contribute nothing; hallucinated input is data,
    /// not an error.
    pub fn validate_path(&self, path: &[u64]) -> usize {
        path.windows(2)
            .filter(|w| self.has_edge_u64(w[0], w[1]))
            .count()
    }

    /// Count of distinct node pairs in `clique` that are edges of the graph.
    /// Duplicate ids are collapsed before pairing.
    pub fn validate_clique(&self, clique: &[u64]) -> usize {
        let set: BTreeSet<u64> = clique.iter().copied().collect();
        let nodes: Vec<u64> = set.into_iter().collect();
        let mut count = 0;
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if self.has_edge_u64(nodes[i], nodes[j]) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Count of edges with NEITHER endpoint in `cover`.
    pub fn validate_cover(&self, cover: &[u64]) -> usize {
        let set: BTreeSet<u64> = cover.iter().copied().collect();
        self.edges
            .iter()
            .filter(|&&(u, v)| !set.contains(&(u as u64)) && !set.contains(&(v as u64)))
            .count()
    }

    fn has_edge_u64(&self, a: u64, b: u64) -> bool {
        a < self.node_count as u64
            && b < self.node_count as u64
            && self.has_edge(a as usize, b as usize)
    }
}

/// A shortest path: length in edges plus one witness node sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPath {
    pub length: usize,
    pub nodes: Vec<usize>,
}

/// Result of an exact optimization: the optimal size and the
/// lexicographically smallest witness achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalSet {
    pub size: usize,
    pub nodes: Vec<usize>,
}

/// Kind of structure a model is claiming in its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    NodeSet,
    Path,
    Clique,
    Cover,
}

/// A claimed structure from a model reply. Node ids need not exist in the
/// graph; validators treat unknown ids as non-edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub nodes: Vec<u64>,
}

impl Witness {
    pub fn new(kind: WitnessKind, nodes: Vec<u64>) -> Self {
        Witness { kind, nodes }
    }
}

#[inline]
fn all_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn low_bits(n: usize) -> u64 {
    all_bits(n)
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// Size of the maximum clique within `p`, Tomita-style branch and bound.
fn max_clique_size(masks: &[u64], p: u64) -> usize {
    max_clique_size_at_least(masks, p, usize::MAX)
}

/// Branch and bound that stops early once a clique of `target` is found.
/// With `target = usize::MAX` it runs to optimality.
fn max_clique_size_at_least(masks: &[u64], p: u64, target: usize) -> usize {
    let mut best = 0usize;
    expand(masks, 0, p, &mut best, target);
    best
}

fn expand(masks: &[u64], r_size: usize, p: u64, best: &mut usize, target: usize) {
    if *best >= target {
        return;
    }
    if p == 0 {
        if r_size > *best {
            *best = r_size;
        }
        return;
    }
    let (order, bounds) = color_sort(masks, p);
    let mut p = p;
    for i in (0..order.len()).rev() {
        if r_size + bounds[i] <= *best {
            return;
        }
        let v = order[i];
        expand(masks, r_size + 1, p & masks[v], best, target);
        if *best >= target {
            return;
        }
        p &= !(1u64 << v);
    }
}

/// Greedy coloring of `p`: returns candidate vertices in processing order
/// with their color numbers as clique-size upper bounds (non-decreasing).
fn color_sort(masks: &[u64], p: u64) -> (Vec<usize>, Vec<usize>) {
    let count = p.count_ones() as usize;
    let mut order = Vec::with_capacity(count);
    let mut bounds = Vec::with_capacity(count);
    let mut uncolored = p;
    let mut color = 0usize;
    while uncolored != 0 {
        color += 1;
        let mut class = uncolored;
        while class != 0 {
            let v = class.trailing_zeros() as usize;
            class &= !(1u64 << v);
            class &= !masks[v];
            uncolored &= !(1u64 << v);
            order.push(v);
            bounds.push(color);
        }
    }
    (order, bounds)
}

/// Lexicographically smallest clique of the (known optimal) size, built by
/// picking the smallest vertex whose remaining candidates still contain a
/// large-enough clique.
fn lex_smallest_clique(masks: &[u64], all: u64, size: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(size);
    let mut p = all;
    while chosen.len() < size {
        let need = size - chosen.len() - 1;
        let v = bits(p)
            .find(|&v| {
                let rest = p & masks[v] & !low_bits(v + 1);
                max_clique_size_at_least(masks, rest, need) >= need
            })
            .expect("clique feasibility invariant");
        chosen.push(v);
        p &= masks[v] & !low_bits(v + 1);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::random_gnp;

    /// Exhaustive subset oracles, independent of the branch-and-bound path.
    mod oracle {
        use super::Graph;

        pub fn max_clique_size(g: &Graph) -> usize {
            let n = g.node_count();
            assert!(n <= 20, "exhaustive oracle is for small graphs");
            let mut best = 0;
            for mask in 0u32..(1 << n) {
                if is_clique(g, mask) {
                    best = best.max(mask.count_ones() as usize);
                }
            }
            best
        }

        pub fn min_cover_size(g: &Graph) -> usize {
            let n = g.node_count();
            assert!(n <= 20);
            let mut best = n;
            for mask in 0u32..(1 << n) {
                if covers_all(g, mask) {
                    best = best.min(mask.count_ones() as usize);
                }
            }
            best
        }

        fn is_clique(g: &Graph, mask: u32) -> bool {
            let nodes: Vec<usize> = (0..g.node_count()).filter(|&v| mask & (1 << v) != 0).collect();
            for i in 0..nodes.len() {
                for j in (i + 1)..nodes.len() {
                    if !g.has_edge(nodes[i], nodes[j]) {
                        return false;
                    }
                }
            }
            true
        }

        fn covers_all(g: &Graph, mask: u32) -> bool {
            g.edges()
                .iter()
                .all(|&(u, v)| mask & (1 << u) != 0 || mask & (1 << v) != 0)
        }

        /// Floyd–Warshall all-pairs distances; usize::MAX marks unreachable.
        pub fn all_pairs(g: &Graph) -> Vec<Vec<usize>> {
            let n = g.node_count();
            let inf = usize::MAX / 4;
            let mut d = vec![vec![inf; n]; n];
            for v in 0..n {
                d[v][v] = 0;
            }
            for &(u, v) in g.edges() {
                d[u][v] = 1;
                d[v][u] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if d[i][k] + d[k][j] < d[i][j] {
                            d[i][j] = d[i][k] + d[k][j];
                        }
                    }
                }
            }
            d
        }
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::new(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Graph::new(0, &[]).is_err());
        assert!(Graph::new(3, &[(0, 0)]).is_err());
        assert!(Graph::new(3, &[(0, 3)]).is_err());
        assert!(Graph::new(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let g = Graph::new(4, &[(2, 0), (3, 1), (0, 1)]).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), &[1, 2]);
        assert_eq!(g.neighbors(1).unwrap(), &[0, 3]);
        assert_eq!(g.edge_count(), 3);
        for v in 0..4 {
            for &w in g.neighbors(v).unwrap() {
                assert!(g.neighbors(w).unwrap().contains(&v));
            }
        }
    }

    #[test]
    fn common_neighbors_triangle_and_path() {
        let k3 = complete(3);
        assert_eq!(k3.common_neighbors(0, 1).unwrap(), vec![2]);
        let p3 = path_graph(3);
        assert_eq!(p3.common_neighbors(0, 2).unwrap(), vec![1]);
        assert!(p3.common_neighbors(0, 0).is_err());
        assert!(p3.common_neighbors(0, 9).is_err());
    }

    #[test]
    fn common_neighbors_matches_brute_force() {
        let g = random_gnp(12, 0.4, 7);
        // Frozen from the brute-force intersection below.
        assert_eq!(g.common_neighbors(3, 9).unwrap(), vec![11]);
        for u in 0..12 {
            for v in (u + 1)..12 {
                let brute: Vec<usize> = (0..12)
                    .filter(|&w| w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w))
                    .collect();
                assert_eq!(g.common_neighbors(u, v).unwrap(), brute);
            }
        }
    }

    #[test]
    fn shortest_path_on_path_graph() {
        let g = path_graph(4);
        let sp = g.shortest_path(0, 3).unwrap().unwrap();
        assert_eq!(sp.length, 3);
        assert_eq!(sp.nodes, vec![0, 1, 2, 3]);
        let adj = g.shortest_path(1, 2).unwrap().unwrap();
        assert_eq!(adj.length, 1);
    }

    #[test]
    fn shortest_path_unreachable_is_distinct() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(g.shortest_path(0, 3).unwrap().is_none());
    }

    #[test]
    fn shortest_path_matches_all_pairs_oracle() {
        let g = random_gnp(15, 0.3, 11);
        let d = oracle::all_pairs(&g);
        for u in 0..15 {
            for v in 0..15 {
                if u == v {
                    continue;
                }
                match g.shortest_path(u, v).unwrap() {
                    Some(sp) => {
                        assert_eq!(sp.length, d[u][v]);
                        assert_eq!(sp.nodes.len(), sp.length + 1);
                        assert_eq!(sp.nodes[0], u);
                        assert_eq!(*sp.nodes.last().unwrap(), v);
                        for w in sp.nodes.windows(2) {
                            assert!(g.has_edge(w[0], w[1]));
                        }
                    }
                    None => assert!(d[u][v] > 15),
                }
            }
        }
    }

    #[test]
    fn max_clique_small_cases() {
        assert_eq!(complete(5).max_clique().unwrap().size, 5);
        assert_eq!(complete(5).max_clique().unwrap().nodes, vec![0, 1, 2, 3, 4]);
        assert_eq!(path_graph(4).max_clique().unwrap().size, 2);
        assert_eq!(star(5).max_clique().unwrap().size, 2);
    }

    #[test]
    fn max_clique_matches_exhaustive_enumeration() {
        let g = random_gnp(12, 0.5, 3);
        let got = g.max_clique().unwrap();
        assert_eq!(got.size, oracle::max_clique_size(&g));
        assert_eq!(g.validate_clique(&as_u64(&got.nodes)), got.size * (got.size - 1) / 2);
    }

    #[test]
    fn min_vertex_cover_small_cases() {
        let s = star(5);
        let c = s.min_vertex_cover().unwrap();
        assert_eq!(c.size, 1);
        assert_eq!(c.nodes, vec![0]);
        assert_eq!(complete(4).min_vertex_cover().unwrap().size, 3);
    }

    #[test]
    fn min_vertex_cover_matches_exhaustive_enumeration() {
        let g = random_gnp(12, 0.4, 5);
        let got = g.min_vertex_cover().unwrap();
        assert_eq!(got.size, oracle::min_cover_size(&g));
        assert_eq!(g.validate_cover(&as_u64(&got.nodes)), 0);
    }

    #[test]
    fn gallai_identity_holds() {
        for seed in 0..20 {
            let g = random_gnp(14, 0.35, seed);
            let cover = g.min_vertex_cover().unwrap();
            let mis = g.max_independent_set_size().unwrap();
            assert_eq!(cover.size + mis, g.node_count());
        }
    }

    #[test]
    fn witnesses_are_lexicographically_smallest() {
        // Two maximum cliques: {1, 2, 3} and {2, 3, 4}; smallest is {1,2,3}.
        let g = Graph::new(5, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(g.max_clique().unwrap().nodes, vec![1, 2, 3]);
        // 4-cycle: covers {0,2} and {1,3}; smallest is {0,2}.
        let c4 = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(c4.min_vertex_cover().unwrap().nodes, vec![0, 2]);
        // Diamond: shortest 0->3 paths via 1 or 2; smallest goes via 1.
        let d = Graph::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(d.shortest_path(0, 3).unwrap().unwrap().nodes, vec![0, 1, 3]);
    }

    #[test]
    fn solver_cap_is_a_hard_error() {
        let g = path_graph(70);
        assert!(matches!(
            g.max_clique(),
            Err(Error::SolverCapExceeded { n: 70, cap: 64 })
        ));
        assert!(g.min_vertex_cover().is_err());
        assert!(g.max_clique_with_cap(32).is_err());
    }

    #[test]
    fn sixty_four_node_graph_is_within_cap() {
        let g = complete(64);
        assert_eq!(g.max_clique().unwrap().size, 64);
        assert_eq!(g.min_vertex_cover().unwrap().size, 63);
    }

    fn as_u64(nodes: &[usize]) -> Vec<u64> {
        nodes.iter().map(|&v| v as u64).collect()
    }

    #[test]
    fn validate_path_counts_real_edges_only() {
        let g = path_graph(4);
        assert_eq!(g.validate_path(&[0, 1, 2, 3]), 3);
        assert_eq!(g.validate_path(&[9, 10, 11]), 0);
        assert_eq!(g.validate_path(&[0, 1, 9]), 1);
        assert_eq!(g.validate_path(&[0]), 0);
        assert_eq!(g.validate_path(&[]), 0);
        assert_eq!(g.validate_path(&[0, 0, 1]), 1);
    }

    #[test]
    fn validate_clique_counts_real_pairs() {
        let k4 = complete(4);
        assert_eq!(k4.validate_clique(&[0, 1, 2, 3]), 6);
        assert_eq!(k4.validate_clique(&[7, 8, 9]), 0);
        // Half-real: {0,1,2} pairs exist, the hallucinated node adds none.
        assert_eq!(k4.validate_clique(&[0, 1, 2, 99]), 3);
        // Duplicates collapse.
        assert_eq!(k4.validate_clique(&[0, 0, 1]), 1);
    }

    #[test]
    fn validate_cover_counts_uncovered_edges() {
        let g = path_graph(5);
        let all: Vec<u64> = (0..5).collect();
        assert_eq!(g.validate_cover(&all), 0);
        assert_eq!(g.validate_cover(&[]), g.edge_count());
        // {1, 9}: covers (0,1) and (1,2); leaves (2,3) and (3,4).
        assert_eq!(g.validate_cover(&[1, 9]), 2);
    }

    #[test]
    fn optimal_witnesses_validate_perfectly() {
        for seed in 0..10 {
            let g = random_gnp(10, 0.45, 100 + seed);
            let clique = g.max_clique().unwrap();
            assert_eq!(
                g.validate_clique(&as_u64(&clique.nodes)),
                clique.size * (clique.size - 1) / 2
            );
            let cover = g.min_vertex_cover().unwrap();
            assert_eq!(g.validate_cover(&as_u64(&cover.nodes)), 0);
        }
    }

    #[test]
    fn solvers_are_deterministic() {
        let g = random_gnp(16, 0.4, 42);
        let a = g.max_clique().unwrap();
        let b = g.max_clique().unwrap();
        assert_eq!(a, b);
        assert_eq!(g.min_vertex_cover().unwrap(), g.min_vertex_cover().unwrap());
    }
}
