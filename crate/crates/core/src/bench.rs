//! Benchmark construction: graph file IO (graph6 and adjacency-list text),
//! seeded generators with controlled structural properties, task instance
//! sampling, and manifest files tying them together.

use crate::error::{Error, Result};
use crate::graph::{Graph, Witness};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

const GENERATION_RETRIES: usize = 40;

/// The four graph-structure tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Task {
    CoNe,
    ShPa,
    MaxC,
    MinVC,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::CoNe, Task::ShPa, Task::MaxC, Task::MinVC];

    /// CoNe and ShPa query a node pair; MaxC and MinVC take only the graph.
    pub fn is_pair_task(self) -> bool {
        matches!(self, Task::CoNe | Task::ShPa)
    }

    pub fn witness_kind(self) -> crate::graph::WitnessKind {
        match self {
            Task::CoNe => crate::graph::WitnessKind::NodeSet,
            Task::ShPa => crate::graph::WitnessKind::Path,
            Task::MaxC => crate::graph::WitnessKind::Clique,
            Task::MinVC => crate::graph::WitnessKind::Cover,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::CoNe => "CoNe",
            Task::ShPa => "ShPa",
            Task::MaxC => "MaxC",
            Task::MinVC => "MinVC",
        };
        f.write_str(s)
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cone" => Ok(Task::CoNe),
            "shpa" => Ok(Task::ShPa),
            "maxc" => Ok(Task::MaxC),
            "minvc" => Ok(Task::MinVC),
            other => Err(Error::Config(format!("unknown task '{other}'"))),
        }
    }
}

/// One query against one graph, with its precomputed ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub graph_id: String,
    pub task: Task,
    /// Query node pair for CoNe/ShPa; None for MaxC/MinVC.
    pub query: Option<(usize, usize)>,
    pub truth_value: u64,
    pub truth_witness: Witness,
}

impl TaskInstance {
    /// Stable identifier used in records and cache keys.
    pub fn id(&self) -> String {
        match self.query {
            Some((u, v)) => format!("{}/{}/{}-{}", self.graph_id, self.task, u, v),
            None => format!("{}/{}", self.graph_id, self.task),
        }
    }
}

// ---------------------------------------------------------------------------
// graph6 encoding
// ---------------------------------------------------------------------------

/// Decodes one graph6 line (optionally prefixed with the standard header).
///
/// Supports the single-byte size form (n <= 62) and the 3-byte '~' form.
pub fn parse_graph6(line: &str) -> Result<Graph> {
    let line = line.trim_end();
    let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "empty graph6 string".into(),
        });
    }
    let (n, body) = read_graph6_size(bytes)?;
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "graph6 graph with zero nodes".into(),
        });
    }
    let pair_count = n * (n - 1) / 2;
    let needed = pair_count.div_ceil(6);
    if body.len() < needed {
        return Err(Error::Parse {
            line: 1,
            msg: format!("graph6 body too short: need {needed} bytes, got {}", body.len()),
        });
    }
    let mut edges = BTreeSet::new();
    let mut idx = 0usize;
    'outer: for (col, byte) in body.iter().enumerate().take(needed) {
        let val = byte.checked_sub(63).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("invalid graph6 byte 0x{:02x} at position {col}", byte),
        })?;
        if val > 63 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("invalid graph6 byte 0x{:02x} at position {col}", byte),
            });
        }
        for bit in 0..6 {
            if idx >= pair_count {
                break 'outer;
            }
            if val & (1 << (5 - bit)) != 0 {
                let (u, v) = pair_from_index(idx);
                edges.insert((u, v));
            }
            idx += 1;
        }
    }
    Ok(Graph::from_edge_set(n, edges))
}

// Upper triangle in column-major order: (0,1), (0,2), (1,2), (0,3), ...
fn pair_from_index(idx: usize) -> (usize, usize) {
    let mut col = 1usize;
    let mut base = 0usize;
    while base + col <= idx {
        base += col;
        col += 1;
    }
    (idx - base, col)
}

fn read_graph6_size(bytes: &[u8]) -> Result<(usize, &[u8])> {
    let first = bytes[0];
    if first == 126 {
        // '~' prefix: three 6-bit groups, big-endian.
        if bytes.len() < 4 {
            return Err(Error::Parse {
                line: 1,
                msg: "truncated graph6 size field".into(),
            });
        }
        let mut n = 0usize;
        for &b in &bytes[1..4] {
            let v = b.checked_sub(63).filter(|&v| v <= 63).ok_or_else(|| Error::Parse {
                line: 1,
                msg: "invalid graph6 size byte".into(),
            })?;
            n = (n << 6) | v as usize;
        }
        Ok((n, &bytes[4..]))
    } else if (63..=125).contains(&first) {
        Ok(((first - 63) as usize, &bytes[1..]))
    } else {
        Err(Error::Parse {
            line: 1,
            msg: format!("invalid graph6 size byte 0x{first:02x}"),
        })
    }
}

/// Encodes a graph as a graph6 string.
pub fn to_graph6(g: &Graph) -> String {
    let n = g.node_count();
    let mut out = Vec::new();
    if n <= 62 {
        out.push(63 + n as u8);
    } else {
        out.push(126);
        out.push(63 + ((n >> 12) & 63) as u8);
        out.push(63 + ((n >> 6) & 63) as u8);
        out.push(63 + (n & 63) as u8);
    }
    let pair_count = n * (n - 1) / 2;
    let mut acc = 0u8;
    let mut filled = 0u8;
    for idx in 0..pair_count {
        let (u, v) = pair_from_index(idx);
        acc <<= 1;
        if g.has_edge(u, v) {
            acc |= 1;
        }
        filled += 1;
        if filled == 6 {
            out.push(63 + acc);
            acc = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        acc <<= 6 - filled;
        out.push(63 + acc);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

// ---------------------------------------------------------------------------
// File loading
// ---------------------------------------------------------------------------

/// On-disk graph formats the loader understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    Graph6,
    AdjacencyList,
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "graph6" | "g6" => Ok(FileFormat::Graph6),
            "adjacency-list" | "adj" | "adjlist" => Ok(FileFormat::AdjacencyList),
            other => Err(Error::Config(format!("unknown graph format '{other}'"))),
        }
    }
}

/// Loads graphs from a file. graph6 files hold one graph per line;
/// adjacency-list files hold a single graph. Empty files yield no graphs.
pub fn load_graphs(path: &Path, format: FileFormat) -> Result<Vec<Graph>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_graphs(&text, format)
}

/// Parses graph file content; see [`load_graphs`].
pub fn parse_graphs(text: &str, format: FileFormat) -> Result<Vec<Graph>> {
    match format {
        FileFormat::Graph6 => {
            let mut graphs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let g = parse_graph6(line).map_err(|e| relocate_line(e, i + 1))?;
                graphs.push(g);
            }
            Ok(graphs)
        }
        FileFormat::AdjacencyList => {
            if text.trim().is_empty() {
                return Ok(Vec::new());
            }
            Ok(vec![parse_adjacency_list(text)?])
        }
    }
}

fn relocate_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

/// Parses the plain adjacency-list text format, one `u: v1 v2 ...` line per
/// node. The listing must be symmetric: `v` in `u`'s line implies `u` in
/// `v`'s line.
pub fn parse_adjacency_list(text: &str) -> Result<Graph> {
    let mut rows: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: "expected 'node: neighbors' form".into(),
        })?;
        let node: usize = head.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid node id '{}'", head.trim()),
        })?;
        let mut neighbors = Vec::new();
        for tok in rest.split_whitespace() {
            let w: usize = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid neighbor id '{tok}'"),
            })?;
            neighbors.push(w);
        }
        rows.push((node, neighbors, line_no));
    }
    let n = rows.len();
    let mut seen = vec![false; n];
    let mut adj: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0); n];
    for (node, neighbors, line_no) in rows {
        if node >= n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("node id {node} out of range for {n} listed nodes"),
            });
        }
        if seen[node] {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate line for node {node}"),
            });
        }
        seen[node] = true;
        adj[node] = (neighbors, line_no);
    }
    let mut edges = BTreeSet::new();
    for u in 0..n {
        let (neighbors, line_no) = &adj[u];
        for &v in neighbors {
            if v >= n {
                return Err(Error::Parse {
                    line: *line_no,
                    msg: format!("neighbor id {v} out of range"),
                });
            }
            if v == u {
                return Err(Error::Parse {
                    line: *line_no,
                    msg: format!("self-loop at node {u}"),
                });
            }
            if !adj[v].0.contains(&u) {
                return Err(Error::Parse {
                    line: *line_no,
                    msg: format!("asymmetric adjacency: {u} lists {v} but {v} does not list {u}"),
                });
            }
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Ok(Graph::from_edge_set(n, edges))
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Erdős–Rényi G(n, p), deterministic per seed.
pub fn random_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gnp_with_rng(n, p, &mut rng)
}

fn gnp_with_rng(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.insert((u, v));
            }
        }
    }
    Graph::from_edge_set(n, edges)
}

/// G(n, p) with single bridge edges added between components afterwards,
/// so the result is always connected. A bridge joins two previously
/// disconnected parts, so it can never enlarge a clique beyond size 2.
pub fn random_connected_gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gnp_with_rng(n, p, &mut rng);
    connect_components(&g)
}

/// Connected graph with `parts` dense communities and sparse links between
/// them (a planted-partition stand-in for community-structured topologies).
pub fn random_community_graph(n: usize, parts: usize, p_in: f64, p_out: f64, seed: u64) -> Graph {
    let parts = parts.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).map(|v| v * parts / n).collect();
    membership.shuffle(&mut rng);
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if membership[u] == membership[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.insert((u, v));
            }
        }
    }
    connect_components(&Graph::from_edge_set(n, edges))
}

fn connect_components(g: &Graph) -> Graph {
    let n = g.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(start);
        let mut stack = vec![start];
        comp[start] = id;
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v).expect("in range") {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
    }
    if reps.len() <= 1 {
        return g.clone();
    }
    let mut edges: BTreeSet<(usize, usize)> = g.edges().iter().copied().collect();
    for pair in reps.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        edges.insert((a.min(b), a.max(b)));
    }
    Graph::from_edge_set(n, edges)
}

/// Connected graph whose maximum clique size is exactly `k`, confirmed by
/// the exact solver. Background density is perturbed downward on each
/// failed attempt; never silently returns an unconfirmed graph.
pub fn generate_planted_clique(n: usize, k: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if !(2..=n).contains(&k) {
        return Err(Error::Generation {
            retries: 0,
            msg: format!("planted clique requires 2 <= k <= n, got k={k}, n={n}"),
        });
    }
    if n > crate::graph::EXACT_SOLVER_CAP {
        return Err(Error::Generation {
            retries: 0,
            msg: format!("cannot confirm clique size beyond {} nodes", crate::graph::EXACT_SOLVER_CAP),
        });
    }
    let mut p = edge_prob.clamp(0.0, 1.0);
    for attempt in 0..GENERATION_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 0x9e37_79b9));
        let mut members: Vec<usize> = (0..n).collect();
        members.shuffle(&mut rng);
        members.truncate(k);
        let planted: BTreeSet<usize> = members.into_iter().collect();
        let mut edges = BTreeSet::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let inside = planted.contains(&u) && planted.contains(&v);
                if inside || rng.gen::<f64>() < p {
                    edges.insert((u, v));
                }
            }
        }
        let g = connect_components(&Graph::from_edge_set(n, edges));
        if g.is_connected() && g.max_clique()?.size == k {
            return Ok(g);
        }
        p *= 0.8; // thin the background and try again
    }
    Err(Error::Generation {
        retries: GENERATION_RETRIES,
        msg: format!("could not realize max clique {k} on {n} nodes"),
    })
}

/// Connected graph whose minimum vertex cover size is exactly `target`,
/// confirmed by the exact solver.
///
/// Construction: a disjoint union of `n - target` cliques has min cover
/// exactly `target` (each clique of size q contributes q-1). Bridges and
/// extra edges are then attached at cover-designated vertices only, which
/// keeps the designated cover valid while edge additions can only push the
/// optimum up.
pub fn generate_controlled_vc(n: usize, target: usize, seed: u64) -> Result<Graph> {
    if target == 0 || target >= n {
        return Err(Error::Generation {
            retries: 0,
            msg: format!("vertex cover target must satisfy 1 <= target < n, got target={target}, n={n}"),
        });
    }
    if n > crate::graph::EXACT_SOLVER_CAP {
        return Err(Error::Generation {
            retries: 0,
            msg: format!("cannot confirm cover size beyond {} nodes", crate::graph::EXACT_SOLVER_CAP),
        });
    }
    for attempt in 0..GENERATION_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 0x51_7c_c1_b7));
        let g = controlled_vc_attempt(n, target, &mut rng);
        if g.is_connected() && g.min_vertex_cover()?.size == target {
            return Ok(g);
        }
    }
    Err(Error::Generation {
        retries: GENERATION_RETRIES,
        msg: format!("could not realize vertex cover {target} on {n} nodes"),
    })
}

fn controlled_vc_attempt(n: usize, target: usize, rng: &mut ChaCha8Rng) -> Graph {
    let comp_count = n - target;
    // Component sizes: all start at 1; `target` extra vertices distributed
    // at random. Sum of (size - 1) over components is exactly `target`.
    let mut sizes = vec![1usize; comp_count];
    for _ in 0..target {
        let i = rng.gen_range(0..comp_count);
        sizes[i] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a)); // cliques first, singletons last
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut label_iter = labels.into_iter();
    let mut components: Vec<Vec<usize>> = Vec::with_capacity(comp_count);
    for &size in &sizes {
        components.push((0..size).map(|_| label_iter.next().unwrap()).collect());
    }
    let mut edges = BTreeSet::new();
    let add = |a: usize, b: usize, edges: &mut BTreeSet<(usize, usize)>| {
        edges.insert((a.min(b), a.max(b)));
    };
    // Within each component, a complete clique. Members[0] is designated
    // free (never in the cover); the rest are cover-designated.
    let mut cover_designated: Vec<usize> = Vec::new();
    for members in &components {
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                add(members[i], members[j], &mut edges);
            }
        }
        cover_designated.extend(&members[1..]);
    }
    // Bridges: connect every component after the first to a random earlier
    // vertex, attaching at a cover-designated vertex on at least one side.
    for ci in 1..components.len() {
        let earlier: Vec<usize> = components[..ci].iter().flatten().copied().collect();
        if components[ci].len() >= 2 {
            let mine = components[ci][1 + rng.gen_range(0..components[ci].len() - 1)];
            let there = earlier[rng.gen_range(0..earlier.len())];
            add(mine, there, &mut edges);
        } else {
            // Singleton: must attach to a cover vertex of an earlier clique.
            let there = cover_designated[rng.gen_range(0..cover_designated.len())];
            add(components[ci][0], there, &mut edges);
        }
    }
    // Extra density, still incident to the designated cover.
    if !cover_designated.is_empty() {
        let extra = n / 3;
        for _ in 0..extra {
            let a = cover_designated[rng.gen_range(0..cover_designated.len())];
            let b = rng.gen_range(0..n);
            if a != b {
                add(a, b, &mut edges);
            }
        }
    }
    Graph::from_edge_set(n, edges)
}

// ---------------------------------------------------------------------------
// Instance sampling
// ---------------------------------------------------------------------------

/// Samples task instances for one graph. Pair tasks draw up to
/// `pairs_per_graph` distinct connected node pairs uniformly; value tasks
/// yield a single instance. Ground truths come from the exact oracles.
pub fn sample_instances(
    g: &Graph,
    graph_id: &str,
    task: Task,
    pairs_per_graph: usize,
    seed: u64,
) -> Result<Vec<TaskInstance>> {
    match task {
        Task::MaxC => {
            let opt = g.max_clique()?;
            Ok(vec![TaskInstance {
                graph_id: graph_id.to_string(),
                task,
                query: None,
                truth_value: opt.size as u64,
                truth_witness: Witness::new(task.witness_kind(), to_u64(&opt.nodes)),
            }])
        }
        Task::MinVC => {
            let opt = g.min_vertex_cover()?;
            Ok(vec![TaskInstance {
                graph_id: graph_id.to_string(),
                task,
                query: None,
                truth_value: opt.size as u64,
                truth_witness: Witness::new(task.witness_kind(), to_u64(&opt.nodes)),
            }])
        }
        Task::CoNe | Task::ShPa => {
            let mut pairs = connected_pairs(g);
            if pairs.is_empty() {
                return Err(Error::Sampling(format!(
                    "graph {graph_id} has no connected node pair to query"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pairs.shuffle(&mut rng);
            pairs.truncate(pairs_per_graph);
            pairs.sort_unstable();
            let mut out = Vec::with_capacity(pairs.len());
            for (u, v) in pairs {
                let (value, witness) = match task {
                    Task::CoNe => {
                        let common = g.common_neighbors(u, v)?;
                        (
                            common.len() as u64,
                            Witness::new(task.witness_kind(), to_u64(&common)),
                        )
                    }
                    Task::ShPa => {
                        let sp = g
                            .shortest_path(u, v)?
                            .expect("sampled pairs are connected");
                        (
                            sp.length as u64,
                            Witness::new(task.witness_kind(), to_u64(&sp.nodes)),
                        )
                    }
                    _ => unreachable!(),
                };
                out.push(TaskInstance {
                    graph_id: graph_id.to_string(),
                    task,
                    query: Some((u, v)),
                    truth_value: value,
                    truth_witness: witness,
                });
            }
            Ok(out)
        }
    }
}

fn connected_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = next;
        next += 1;
        let mut stack = vec![start];
        comp[start] = id;
        while let Some(v) = stack.pop() {
            for &w in g.neighbors(v).expect("in range") {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if comp[u] == comp[v] {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn to_u64(nodes: &[usize]) -> Vec<u64> {
    nodes.iter().map(|&v| v as u64).collect()
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

/// Cached ground truth for one task on one graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CachedTruth {
    pub task: Task,
    pub value: u64,
    pub witness: Vec<u64>,
}

/// One graph in a benchmark: where it lives and what the oracles said.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
    pub format: FileFormat,
    #[serde(default)]
    pub truths: Vec<CachedTruth>,
}

/// A named benchmark: graph sources plus precomputed ground truths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub name: String,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl BenchmarkManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
        Ok(())
    }

    /// Loads every graph, re-verifies cached truths against the oracles, and
    /// checks the structural constraints of the reserved benchmark names.
    pub fn load_and_verify(&self, base_dir: &Path) -> Result<Vec<(String, Graph)>> {
        let mut graphs = Vec::with_capacity(self.entries.len());
        for entry in &self.entries {
            let path = base_dir.join(&entry.file);
            let loaded = load_graphs(&path, entry.format)?;
            let g = match loaded.len() {
                1 => loaded.into_iter().next().unwrap(),
                k => {
                    return Err(Error::Config(format!(
                        "manifest entry {} expects exactly one graph in {}, found {k}",
                        entry.id,
                        path.display()
                    )))
                }
            };
            if !g.is_connected() {
                return Err(Error::Config(format!(
                    "benchmark graph {} is not connected",
                    entry.id
                )));
            }
            for truth in &entry.truths {
                verify_truth(&g, &entry.id, truth)?;
            }
            graphs.push((entry.id.clone(), g));
        }
        self.check_reserved_invariants(&graphs)?;
        Ok(graphs)
    }

    fn check_reserved_invariants(&self, graphs: &[(String, Graph)]) -> Result<()> {
        let constraint = match self.name.as_str() {
            "Bench-1" => Some((20, Some((6, 50)), None, None)),
            "Bench-2" => Some((20, None, Some((2, 7)), None)),
            "Bench-3" => Some((20, None, None, Some((1, 26)))),
            "Bench-4" => Some((28, Some((7, 50)), None, None)),
            _ => None,
        };
        let Some((count, n_range, clique_range, vc_range)) = constraint else {
            return Ok(());
        };
        if graphs.len() != count {
            return Err(Error::Config(format!(
                "{} must contain {count} graphs, found {}",
                self.name,
                graphs.len()
            )));
        }
        for (id, g) in graphs {
            if let Some((lo, hi)) = n_range {
                if !(lo..=hi).contains(&g.node_count()) {
                    return Err(Error::Config(format!(
                        "{}: graph {id} has {} nodes, outside [{lo}, {hi}]",
                        self.name,
                        g.node_count()
                    )));
                }
            }
            if let Some((lo, hi)) = clique_range {
                let size = g.max_clique()?.size;
                if !(lo..=hi).contains(&size) {
                    return Err(Error::Config(format!(
                        "{}: graph {id} has max clique {size}, outside [{lo}, {hi}]",
                        self.name
                    )));
                }
            }
            if let Some((lo, hi)) = vc_range {
                let size = g.min_vertex_cover()?.size;
                if !(lo..=hi).contains(&size) {
                    return Err(Error::Config(format!(
                        "{}: graph {id} has min vertex cover {size}, outside [{lo}, {hi}]",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

fn verify_truth(g: &Graph, id: &str, truth: &CachedTruth) -> Result<()> {
    let actual = match truth.task {
        Task::MaxC => g.max_clique()?.size as u64,
        Task::MinVC => g.min_vertex_cover()?.size as u64,
        // Pair-task truths are per query pair and do not belong in manifests.
        Task::CoNe | Task::ShPa => {
            return Err(Error::Config(format!(
                "manifest entry {id}: cached {} truth requires a query pair",
                truth.task
            )))
        }
    };
    if actual != truth.value {
        return Err(Error::Config(format!(
            "manifest entry {id}: cached {} value {} disagrees with oracle {actual}",
            truth.task, truth.value
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph6_star_decodes_to_documented_edges() {
        // 'D' = 5 nodes; '?' = 000000; '{' = 111100: edges (0,4),(1,4),(2,4),(3,4).
        let g = parse_graph6("D?{").unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edges(), &[(0, 4), (1, 4), (2, 4), (3, 4)]);
    }

    #[test]
    fn graph6_known_encoding() {
        // 5 nodes, edges (0,2),(0,4),(1,3),(3,4) encodes as "DQc".
        let g = Graph::new(5, &[(0, 2), (0, 4), (1, 3), (3, 4)]).unwrap();
        assert_eq!(to_graph6(&g), "DQc");
        assert_eq!(parse_graph6("DQc").unwrap(), g);
    }

    #[test]
    fn graph6_round_trip_random() {
        for seed in 0..30 {
            let n = 2 + (seed as usize % 40);
            let g = random_gnp(n, 0.3, seed);
            let enc = to_graph6(&g);
            assert_eq!(parse_graph6(&enc).unwrap(), g, "seed {seed}");
        }
    }

    #[test]
    fn graph6_header_and_garbage() {
        assert!(parse_graph6(">>graph6<<D?{").is_ok());
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("D").is_err()); // truncated body
        assert!(parse_graph6("\x1f??").is_err());
    }

    #[test]
    fn graph6_large_size_form() {
        let g = random_gnp(70, 0.05, 9);
        let enc = to_graph6(&g);
        assert_eq!(enc.as_bytes()[0], 126);
        assert_eq!(parse_graph6(&enc).unwrap(), g);
    }

    #[test]
    fn empty_file_yields_no_graphs() {
        assert!(parse_graphs("", FileFormat::Graph6).unwrap().is_empty());
        assert!(parse_graphs("\n\n", FileFormat::Graph6).unwrap().is_empty());
        assert!(parse_graphs("", FileFormat::AdjacencyList).unwrap().is_empty());
    }

    #[test]
    fn adjacency_list_round_trip() {
        let g = random_gnp(9, 0.4, 2);
        let text = g.adjacency_list_text();
        assert_eq!(parse_adjacency_list(&text).unwrap(), g);
    }

    #[test]
    fn adjacency_list_asymmetry_is_an_error_with_line() {
        let text = "0: 1 2\n1: 0\n2:\n";
        match parse_adjacency_list(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("asymmetric"), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn adjacency_list_rejects_bad_ids() {
        assert!(parse_adjacency_list("0: 5\n1:\n").is_err());
        assert!(parse_adjacency_list("0: 0\n").is_err());
        assert!(parse_adjacency_list("0: 1\n0: 1\n").is_err());
        assert!(parse_adjacency_list("x: 1\n").is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        assert_eq!(random_gnp(12, 0.4, 7), random_gnp(12, 0.4, 7));
        assert_ne!(random_gnp(12, 0.4, 7), random_gnp(12, 0.4, 8));
    }

    #[test]
    fn planted_clique_hits_target_exactly() {
        let g = generate_planted_clique(10, 5, 0.3, 11).unwrap();
        assert_eq!(g.max_clique().unwrap().size, 5);
        assert!(g.is_connected());
    }

    #[test]
    fn planted_clique_complete_graph_case() {
        let g = generate_planted_clique(6, 6, 0.5, 1).unwrap();
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn planted_clique_bench2_range_sweep() {
        for k in 2..=7 {
            let g = generate_planted_clique(14, k, 0.25, 50 + k as u64).unwrap();
            assert_eq!(g.max_clique().unwrap().size, k, "k={k}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn planted_clique_rejects_bad_k() {
        assert!(generate_planted_clique(5, 1, 0.3, 0).is_err());
        assert!(generate_planted_clique(5, 6, 0.3, 0).is_err());
    }

    #[test]
    fn controlled_vc_star_and_sweep() {
        let g = generate_controlled_vc(6, 1, 3).unwrap();
        assert_eq!(g.min_vertex_cover().unwrap().size, 1);
        for target in [1usize, 5, 13, 26] {
            let n = (2 * target).clamp(8, 50).max(target + 2);
            let g = generate_controlled_vc(n, target, 77 + target as u64).unwrap();
            assert_eq!(g.min_vertex_cover().unwrap().size, target, "target={target}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn controlled_vc_rejects_bad_target() {
        assert!(generate_controlled_vc(5, 0, 0).is_err());
        assert!(generate_controlled_vc(5, 5, 0).is_err());
    }

    #[test]
    fn sampling_k2_yields_the_single_pair() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let inst = sample_instances(&g, "k2", Task::ShPa, 2, 0).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].query, Some((0, 1)));
        assert_eq!(inst[0].truth_value, 1);
    }

    #[test]
    fn sampling_is_deterministic_and_connected() {
        let g = random_connected_gnp(15, 0.2, 4);
        let a = sample_instances(&g, "g", Task::CoNe, 2, 9).unwrap();
        let b = sample_instances(&g, "g", Task::CoNe, 2, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for inst in &a {
            let (u, v) = inst.query.unwrap();
            assert!(g.shortest_path(u, v).unwrap().is_some());
        }
    }

    #[test]
    fn sampled_shpa_matches_all_pairs_reachability() {
        let g = random_connected_gnp(12, 0.25, 21);
        let inst = sample_instances(&g, "g", Task::ShPa, 2, 5).unwrap();
        for i in &inst {
            let (u, v) = i.query.unwrap();
            let sp = g.shortest_path(u, v).unwrap().unwrap();
            assert_eq!(sp.length as u64, i.truth_value);
            assert_eq!(g.validate_path(&i.truth_witness.nodes), sp.length);
        }
    }

    #[test]
    fn sampling_errors_without_valid_pairs() {
        let g = Graph::new(3, &[]).unwrap();
        assert!(matches!(
            sample_instances(&g, "g", Task::ShPa, 2, 0),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn value_task_instances_carry_oracle_truth() {
        let g = generate_planted_clique(12, 4, 0.3, 6).unwrap();
        let inst = sample_instances(&g, "g", Task::MaxC, 2, 0).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].truth_value, 4);
        assert_eq!(
            g.validate_clique(&inst[0].truth_witness.nodes),
            4 * 3 / 2
        );
    }

    #[test]
    fn manifest_round_trip_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate_planted_clique(10, 4, 0.3, 2).unwrap();
        std::fs::write(dir.path().join("g0.g6"), to_graph6(&g)).unwrap();
        let manifest = BenchmarkManifest {
            name: "custom".into(),
            seed: 2,
            entries: vec![ManifestEntry {
                id: "g0".into(),
                file: "g0.g6".into(),
                format: FileFormat::Graph6,
                truths: vec![CachedTruth {
                    task: Task::MaxC,
                    value: 4,
                    witness: Vec::new(),
                }],
            }],
        };
        let mpath = dir.path().join("manifest.toml");
        manifest.save(&mpath).unwrap();
        let loaded = BenchmarkManifest::load(&mpath).unwrap();
        let graphs = loaded.load_and_verify(dir.path()).unwrap();
        assert_eq!(graphs.len(), 1);
        assert_eq!(graphs[0].1, g);

        let mut bad = loaded.clone();
        bad.entries[0].truths[0].value = 5;
        assert!(bad.load_and_verify(dir.path()).is_err());
    }
}
