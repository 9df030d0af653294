//! Graph drawings: a seeded force-directed engine for the straight-line
//! paradigm, a grid router for the orthogonal paradigm, readability
//! measurement, and local-search improvement of straight-line drawings.

use crate::error::{Error, Result};
use crate::geometry::{segment_intersects_rect, segments_cross, Point, Rect};
use crate::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

/// Extent of the longer side of a normalized straight-line drawing.
pub const LAYOUT_EXTENT: f64 = 100.0;
/// Padding added around the geometry when deriving the bounding box.
pub const BBOX_PAD: f64 = 6.0;
/// Orthogonal grid cell size in layout units.
pub const ORTHO_CELL: f64 = 8.0;
/// Half-width of the square box reserved around each node center.
pub const NODE_BOX_HALF: f64 = 1.0;

// Channel lanes keep parallel routes apart; all offsets stay clear of the
// node boxes (|offset| < ORTHO_CELL/2 - NODE_BOX_HALF).
const LANE_OFFSETS: [f64; 5] = [0.0, -1.25, 1.25, -2.5, 2.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Paradigm {
    StraightLine,
    Orthogonal,
}

impl std::fmt::Display for Paradigm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Paradigm::StraightLine => f.write_str("straight-line"),
            Paradigm::Orthogonal => f.write_str("orthogonal"),
        }
    }
}

/// Polyline route of one edge; endpoints index into the drawing's nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRoute {
    pub endpoints: (usize, usize),
    pub points: Vec<Point>,
}

impl EdgeRoute {
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.distance(&b)).sum()
    }
}

/// Node positions plus per-edge polyline routes, tagged with a paradigm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drawing {
    pub paradigm: Paradigm,
    pub positions: Vec<Point>,
    pub routes: Vec<EdgeRoute>,
    pub bbox: Rect,
}

impl Drawing {
    fn from_positions(paradigm: Paradigm, positions: Vec<Point>, routes: Vec<EdgeRoute>) -> Self {
        let bbox = geometry_bbox(&positions, &routes).expanded(BBOX_PAD);
        Drawing {
            paradigm,
            positions,
            routes,
            bbox,
        }
    }

    /// Checks the structural invariants of the paradigm. Used by tests and
    /// by the router's own verification pass.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.positions.iter().enumerate() {
            for b in self.positions.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::Layout(format!("coincident node positions at {a:?}")));
                }
            }
            if !self.bbox.contains(a) {
                return Err(Error::Layout("bounding box does not enclose nodes".into()));
            }
        }
        for route in &self.routes {
            let (u, v) = route.endpoints;
            if route.points.len() < 2 {
                return Err(Error::Layout(format!("route {u}-{v} has no segments")));
            }
            if route.points[0] != self.positions[u]
                || *route.points.last().unwrap() != self.positions[v]
            {
                return Err(Error::Layout(format!(
                    "route {u}-{v} does not start and end at its node positions"
                )));
            }
            for p in &route.points {
                if !self.bbox.contains(p) {
                    return Err(Error::Layout("bounding box does not enclose routes".into()));
                }
            }
            match self.paradigm {
                Paradigm::StraightLine => {
                    if route.points.len() != 2 {
                        return Err(Error::Layout(format!(
                            "straight-line route {u}-{v} has {} points",
                            route.points.len()
                        )));
                    }
                }
                Paradigm::Orthogonal => {
                    for (a, b) in route.segments() {
                        if a.x != b.x && a.y != b.y {
                            return Err(Error::Layout(format!(
                                "route {u}-{v} has a non-axis-parallel segment"
                            )));
                        }
                    }
                    if route.points.len() > 6 {
                        return Err(Error::Layout(format!(
                            "route {u}-{v} has more than 4 bends"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The square region reserved around a node center.
    pub fn node_box(&self, v: usize) -> Rect {
        let p = self.positions[v];
        Rect {
            min_x: p.x - NODE_BOX_HALF,
            min_y: p.y - NODE_BOX_HALF,
            max_x: p.x + NODE_BOX_HALF,
            max_y: p.y + NODE_BOX_HALF,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self)
            .map_err(|e| Error::Layout(format!("drawing serialization: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Layout(format!("drawing parse: {e}")))
    }
}

fn geometry_bbox(positions: &[Point], routes: &[EdgeRoute]) -> Rect {
    let all = positions.iter().chain(routes.iter().flat_map(|r| r.points.iter()));
    Rect::from_points(all).unwrap_or(Rect {
        min_x: 0.0,
        min_y: 0.0,
        max_x: 0.0,
        max_y: 0.0,
    })
}

fn straight_routes(g: &Graph, positions: &[Point]) -> Vec<EdgeRoute> {
    g.edges()
        .iter()
        .map(|&(u, v)| EdgeRoute {
            endpoints: (u, v),
            points: vec![positions[u], positions[v]],
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Force-directed layout
// ---------------------------------------------------------------------------

/// Seeded Fruchterman–Reingold layout with linear cooling. Deterministic per
/// (graph, iterations, seed); coincident nodes are separated afterwards.
pub fn layout_force_directed(g: &Graph, iterations: usize, seed: u64) -> Result<Drawing> {
    if !g.is_connected() {
        return Err(Error::Layout(
            "force-directed layout requires a connected graph".into(),
        ));
    }
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    if n > 1 {
        let k = (1.0 / n as f64).sqrt();
        let mut disp = vec![(0.0f64, 0.0f64); n];
        for iter in 0..iterations {
            for d in &mut disp {
                *d = (0.0, 0.0);
            }
            for u in 0..n {
                for v in (u + 1)..n {
                    let dx = pos[u].x - pos[v].x;
                    let dy = pos[u].y - pos[v].y;
                    let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
                    let force = k * k / dist;
                    let (fx, fy) = (dx / dist * force, dy / dist * force);
                    disp[u].0 += fx;
                    disp[u].1 += fy;
                    disp[v].0 -= fx;
                    disp[v].1 -= fy;
                }
            }
            for &(u, v) in g.edges() {
                let dx = pos[u].x - pos[v].x;
                let dy = pos[u].y - pos[v].y;
                let dist = (dx * dx + dy * dy).sqrt().max(1e-9);
                let force = dist * dist / k;
                let (fx, fy) = (dx / dist * force, dy / dist * force);
                disp[u].0 -= fx;
                disp[u].1 -= fy;
                disp[v].0 += fx;
                disp[v].1 += fy;
            }
            let temp = 0.1 * (1.0 - iter as f64 / iterations.max(1) as f64) + 1e-3;
            for v in 0..n {
                let (dx, dy) = disp[v];
                let len = (dx * dx + dy * dy).sqrt();
                if len > 0.0 {
                    let cap = len.min(temp);
                    pos[v].x += dx / len * cap;
                    pos[v].y += dy / len * cap;
                }
            }
        }
    }
    separate_coincident(&mut pos);
    normalize(&mut pos);
    let routes = straight_routes(g, &pos);
    Ok(Drawing::from_positions(Paradigm::StraightLine, pos, routes))
}

/// Nudges exactly-overlapping nodes apart, deterministically by index.
fn separate_coincident(pos: &mut [Point]) {
    let eps = 1e-6;
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            if pos[i].distance(&pos[j]) < eps {
                pos[j].x += eps * (j + 1) as f64;
                pos[j].y += eps * (i + 1) as f64;
            }
        }
    }
}

/// Translates to the origin and uniformly scales the longer extent to
/// LAYOUT_EXTENT, preserving the aspect ratio.
fn normalize(pos: &mut [Point]) {
    let Some(bbox) = Rect::from_points(pos.iter()) else {
        return;
    };
    let extent = bbox.width().max(bbox.height());
    let scale = if extent > 0.0 { LAYOUT_EXTENT / extent } else { 1.0 };
    for p in pos.iter_mut() {
        p.x = (p.x - bbox.min_x) * scale;
        p.y = (p.y - bbox.min_y) * scale;
    }
}

// ---------------------------------------------------------------------------
// Orthogonal layout
// ---------------------------------------------------------------------------

/// Grid-based orthogonal layout. Nodes are snapped to distinct grid cells
/// (placement seeded from a force-directed pass); each edge is routed as an
/// axis-parallel polyline with at most 4 bends that stays clear of every
/// node box except at its own endpoints.
pub fn layout_orthogonal(g: &Graph, seed: u64) -> Result<Drawing> {
    if !g.is_connected() {
        return Err(Error::Layout(
            "orthogonal layout requires a connected graph".into(),
        ));
    }
    let mut scale = 1.0f64;
    let mut last_err = None;
    for _ in 0..3 {
        match orthogonal_attempt(g, seed, scale) {
            Ok(d) => return Ok(d),
            Err(e) => {
                last_err = Some(e);
                scale *= 2.0; // widen the grid and retry
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Layout("orthogonal routing failed".into())))
}

fn orthogonal_attempt(g: &Graph, seed: u64, scale: f64) -> Result<Drawing> {
    let n = g.node_count();
    let cell = ORTHO_CELL * scale;
    let cols = (n as f64).sqrt().ceil() as usize;
    let cols = cols.max(1);
    let rows = n.div_ceil(cols);

    // Seed cell assignment from the force-directed result: sort by y into
    // rows, then by x within each row.
    let guide = layout_force_directed(g, 200, seed)?;
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by(|&a, &b| {
        guide.positions[a]
            .y
            .total_cmp(&guide.positions[b].y)
            .then(a.cmp(&b))
    });
    let mut cell_of = vec![(0usize, 0usize); n];
    let mut occupied = vec![vec![false; cols]; rows];
    for (row, chunk) in by_y.chunks(cols).enumerate() {
        let mut row_nodes = chunk.to_vec();
        row_nodes.sort_by(|&a, &b| {
            guide.positions[a]
                .x
                .total_cmp(&guide.positions[b].x)
                .then(a.cmp(&b))
        });
        for (col, &v) in row_nodes.iter().enumerate() {
            cell_of[v] = (row, col);
            occupied[row][col] = true;
        }
    }
    let center = |(row, col): (usize, usize)| {
        Point::new(col as f64 * cell + cell / 2.0, row as f64 * cell + cell / 2.0)
    };
    let positions: Vec<Point> = (0..n).map(|v| center(cell_of[v])).collect();

    let mut router = Router {
        cell,
        cell_of,
        occupied,
        positions: &positions,
        lanes: HashMap::new(),
    };
    let mut routes = Vec::with_capacity(g.edge_count());
    for &(u, v) in g.edges() {
        routes.push(EdgeRoute {
            endpoints: (u, v),
            points: router.route(u, v),
        });
    }

    let drawing = Drawing::from_positions(Paradigm::Orthogonal, positions, routes);
    drawing.validate()?;
    verify_box_clearance(&drawing)?;
    Ok(drawing)
}

/// Every route segment must stay clear of all node boxes except the boxes
/// of its own two endpoints.
fn verify_box_clearance(d: &Drawing) -> Result<()> {
    for route in &d.routes {
        let (u, v) = route.endpoints;
        for (a, b) in route.segments() {
            for w in 0..d.positions.len() {
                if w == u || w == v {
                    continue;
                }
                if segment_intersects_rect(a, b, &d.node_box(w)) {
                    return Err(Error::Layout(format!(
                        "route {u}-{v} intersects the box of node {w}"
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Channel {
    Horizontal(usize), // along y = index * cell
    Vertical(usize),   // along x = index * cell
}

struct Router<'a> {
    cell: f64,
    cell_of: Vec<(usize, usize)>,
    occupied: Vec<Vec<bool>>,
    positions: &'a [Point],
    lanes: HashMap<Channel, usize>,
}

impl Router<'_> {
    fn route(&mut self, u: usize, v: usize) -> Vec<Point> {
        let (pu, pv) = (self.positions[u], self.positions[v]);
        let ((ru, cu), (rv, cv)) = (self.cell_of[u], self.cell_of[v]);

        // Straight corridor along a shared row or column.
        if cu == cv && self.col_clear(cu, ru, rv) {
            return vec![pu, pv];
        }
        if ru == rv && self.row_clear(ru, cu, cv) {
            return vec![pu, pv];
        }
        // Single-bend L routes; the corner cell must be free too.
        if self.l_clear((ru, cu), (rv, cv), true) {
            return dedupe(vec![pu, Point::new(pv.x, pu.y), pv]);
        }
        if self.l_clear((ru, cu), (rv, cv), false) {
            return dedupe(vec![pu, Point::new(pu.x, pv.y), pv]);
        }
        self.channel_route(u, v)
    }

    fn col_clear(&self, col: usize, r1: usize, r2: usize) -> bool {
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        ((lo + 1)..hi).all(|r| !self.occupied[r][col])
    }

    fn row_clear(&self, row: usize, c1: usize, c2: usize) -> bool {
        let (lo, hi) = (c1.min(c2), c1.max(c2));
        ((lo + 1)..hi).all(|c| !self.occupied[row][c])
    }

    /// horizontal_first: go along u's row to v's column, then down/up.
    fn l_clear(&self, from: (usize, usize), to: (usize, usize), horizontal_first: bool) -> bool {
        let ((ru, cu), (rv, cv)) = (from, to);
        if ru == rv || cu == cv {
            return false;
        }
        let (corner_r, corner_c) = if horizontal_first { (ru, cv) } else { (rv, cu) };
        if self.occupied[corner_r][corner_c] {
            return false;
        }
        if horizontal_first {
            self.row_clear(ru, cu, cv) && self.col_clear(cv, ru, rv)
        } else {
            self.col_clear(cu, ru, rv) && self.row_clear(rv, cu, cv)
        }
    }

    /// General route through the channel network between grid cells:
    /// exit vertically into a horizontal channel, run to a vertical channel,
    /// cross rows, and enter the target symmetrically. At most 4 bends.
    fn channel_route(&mut self, u: usize, v: usize) -> Vec<Point> {
        let (pu, pv) = (self.positions[u], self.positions[v]);
        let ((ru, cu), (rv, cv)) = (self.cell_of[u], self.cell_of[v]);
        let cell = self.cell;

        // Horizontal channel above or below each endpoint, facing the other.
        let hu = if rv > ru { ru + 1 } else { ru };
        let hv = if ru > rv { rv + 1 } else { rv };
        let lane_u = self.lane(Channel::Horizontal(hu));
        let ch_yu = hu as f64 * cell + lane_u;

        if ru == rv {
            // Same row: one shared channel, two bends.
            return dedupe(vec![
                pu,
                Point::new(pu.x, ch_yu),
                Point::new(pv.x, ch_yu),
                pv,
            ]);
        }
        let lane_v = self.lane(Channel::Horizontal(hv));
        let ch_yv = hv as f64 * cell + lane_v;
        // Vertical channel at the boundary nearest to v on u's side.
        let vc = if cu == cv { cu } else { cu.max(cv) };
        let lane_x = self.lane(Channel::Vertical(vc));
        let ch_x = vc as f64 * cell + lane_x;
        dedupe(vec![
            pu,
            Point::new(pu.x, ch_yu),
            Point::new(ch_x, ch_yu),
            Point::new(ch_x, ch_yv),
            Point::new(pv.x, ch_yv),
            pv,
        ])
    }

    fn lane(&mut self, channel: Channel) -> f64 {
        let counter = self.lanes.entry(channel).or_insert(0);
        let offset = LANE_OFFSETS[*counter % LANE_OFFSETS.len()];
        *counter += 1;
        offset * (self.cell / ORTHO_CELL)
    }
}

/// Drops repeated points and merges collinear runs.
fn dedupe(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last() == Some(&p) {
            continue;
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let collinear = (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y);
            if collinear {
                *out.last_mut().unwrap() = p;
                continue;
            }
        }
        out.push(p);
    }
    out
}

// ---------------------------------------------------------------------------
// Quality measurement
// ---------------------------------------------------------------------------

/// Human-readability metrics of a drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Pairs of route segments that intersect away from shared endpoints.
    pub crossings: usize,
    pub min_node_distance: f64,
    /// Minimum angle between edges leaving a shared node, radians.
    pub angular_resolution: f64,
    /// Coefficient of variation of route lengths.
    pub edge_length_cv: f64,
}

pub fn quality_report(d: &Drawing) -> QualityReport {
    QualityReport {
        crossings: count_crossings(d),
        min_node_distance: min_node_distance(&d.positions),
        angular_resolution: angular_resolution(d),
        edge_length_cv: edge_length_cv(&d.routes),
    }
}

/// Exact pairwise segment-intersection count; O(s^2) over all route
/// segments, which is fine at desk scale.
pub fn count_crossings(d: &Drawing) -> usize {
    let segments: Vec<(Point, Point)> = d.routes.iter().flat_map(|r| r.segments()).collect();
    let mut count = 0;
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            if segments_cross(segments[i].0, segments[i].1, segments[j].0, segments[j].1) {
                count += 1;
            }
        }
    }
    count
}

fn min_node_distance(positions: &[Point]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            min = min.min(positions[i].distance(&positions[j]));
        }
    }
    min
}

fn angular_resolution(d: &Drawing) -> f64 {
    let n = d.positions.len();
    let mut directions: Vec<Vec<f64>> = vec![Vec::new(); n];
    for route in &d.routes {
        let (u, v) = route.endpoints;
        if route.points.len() < 2 {
            continue;
        }
        let first = (route.points[0], route.points[1]);
        let last = (
            route.points[route.points.len() - 1],
            route.points[route.points.len() - 2],
        );
        for (node, (from, to)) in [(u, first), (v, last)] {
            let (dx, dy) = (to.x - from.x, to.y - from.y);
            if dx != 0.0 || dy != 0.0 {
                directions[node].push(dy.atan2(dx));
            }
        }
    }
    let mut min = std::f64::consts::PI;
    for angles in &mut directions {
        if angles.len() < 2 {
            continue;
        }
        angles.sort_by(f64::total_cmp);
        for i in 0..angles.len() {
            let next = if i + 1 == angles.len() {
                angles[0] + std::f64::consts::TAU
            } else {
                angles[i + 1]
            };
            let gap = next - angles[i];
            // The wraparound gap can exceed pi; the true angle between the
            // two directions is capped there.
            min = min.min(gap.min(std::f64::consts::TAU - gap).abs());
        }
    }
    min
}

fn edge_length_cv(routes: &[EdgeRoute]) -> f64 {
    if routes.is_empty() {
        return 0.0;
    }
    let lengths: Vec<f64> = routes.iter().map(|r| r.length()).collect();
    let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / lengths.len() as f64;
    var.sqrt() / mean
}

// ---------------------------------------------------------------------------
// Drawing improvement
// ---------------------------------------------------------------------------

#[derive(PartialEq, PartialOrd)]
struct Objective(usize, f64, f64); // (crossings, -min_dist, -angular)

fn objective(d: &Drawing) -> Objective {
    let q = quality_report(d);
    Objective(q.crossings, -q.min_node_distance, -q.angular_resolution)
}

/// Hill-climbing improvement of a straight-line drawing: random single-node
/// moves, accepted only when (crossings, min node distance, angular
/// resolution) improves lexicographically. Never increases the crossing
/// count; returns the best drawing found within the move budget.
pub fn improve_drawing(d: &Drawing, budget: usize, seed: u64) -> Result<Drawing> {
    if d.paradigm != Paradigm::StraightLine {
        return Err(Error::Layout(
            "improve_drawing applies to straight-line drawings only".into(),
        ));
    }
    let mut best = d.clone();
    if best.positions.len() <= 1 {
        return Ok(best);
    }
    let mut best_score = objective(&best);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = geometry_bbox(&d.positions, &d.routes);
    for _ in 0..budget {
        let node = rng.gen_range(0..best.positions.len());
        let candidate = Point::new(
            rng.gen_range(region.min_x..=region.max_x),
            rng.gen_range(region.min_y..=region.max_y),
        );
        if best
            .positions
            .iter()
            .enumerate()
            .any(|(w, p)| w != node && p.distance(&candidate) < 1e-9)
        {
            continue;
        }
        let mut trial = best.clone();
        trial.positions[node] = candidate;
        for route in &mut trial.routes {
            let (u, v) = route.endpoints;
            if u == node || v == node {
                route.points = vec![trial.positions[u], trial.positions[v]];
            }
        }
        let score = objective(&trial);
        if score < best_score {
            trial.bbox = geometry_bbox(&trial.positions, &trial.routes).expanded(BBOX_PAD);
            best = trial;
            best_score = score;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{random_connected_gnp, random_gnp};
    use crate::graph::Graph;

    fn k(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).unwrap()
    }

    /// Distinct integer positions, so drawings stay non-degenerate and all
    /// intersection arithmetic is exact in f64.
    fn random_lattice_positions(n: usize, extent: i32, rng: &mut ChaCha8Rng) -> Vec<Point> {
        use rand::seq::SliceRandom;
        let mut cells: Vec<(i32, i32)> = (0..extent)
            .flat_map(|x| (0..extent).map(move |y| (x, y)))
            .collect();
        cells.shuffle(rng);
        cells
            .into_iter()
            .take(n)
            .map(|(x, y)| Point::new(x as f64, y as f64))
            .collect()
    }

    #[test]
    fn force_directed_k3_is_near_equilateral() {
        let d = layout_force_directed(&k(3), 800, 7).unwrap();
        let dists = [
            d.positions[0].distance(&d.positions[1]),
            d.positions[0].distance(&d.positions[2]),
            d.positions[1].distance(&d.positions[2]),
        ];
        let (min, max) = (
            dists.iter().cloned().fold(f64::INFINITY, f64::min),
            dists.iter().cloned().fold(0.0, f64::max),
        );
        assert!(
            (max - min) / max < 0.05,
            "pairwise distances should agree within 5%: {dists:?}"
        );
        d.validate().unwrap();
    }

    #[test]
    fn force_directed_single_edge() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let d = layout_force_directed(&g, 100, 1).unwrap();
        assert!(d.positions[0].distance(&d.positions[1]) > 0.0);
        d.validate().unwrap();
    }

    #[test]
    fn force_directed_is_deterministic() {
        let g = random_connected_gnp(12, 0.3, 5);
        let a = layout_force_directed(&g, 300, 9).unwrap();
        let b = layout_force_directed(&g, 300, 9).unwrap();
        assert_eq!(a, b);
        let c = layout_force_directed(&g, 300, 10).unwrap();
        assert_ne!(a.positions, c.positions);
    }

    #[test]
    fn force_directed_rejects_disconnected() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(layout_force_directed(&g, 50, 0).is_err());
    }

    #[test]
    fn orthogonal_path_graph_segments_axis_parallel() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let d = layout_orthogonal(&g, 3).unwrap();
        for route in &d.routes {
            for (a, b) in route.segments() {
                assert!(a.x == b.x || a.y == b.y);
            }
        }
        d.validate().unwrap();
    }

    #[test]
    fn orthogonal_k4_routes_are_clean() {
        let d = layout_orthogonal(&k(4), 1).unwrap();
        d.validate().unwrap();
        // Geometric assertion over the output: every segment axis-parallel
        // and clear of foreign node boxes.
        verify_box_clearance(&d).unwrap();
    }

    #[test]
    fn orthogonal_four_cycle_can_be_planar() {
        let d = layout_orthogonal(&cycle(4), 2).unwrap();
        assert_eq!(count_crossings(&d), 0);
    }

    #[test]
    fn orthogonal_handles_bench_scale_graphs() {
        for (i, &n) in [6usize, 17, 33, 50].iter().enumerate() {
            let g = random_connected_gnp(n, 0.15, 40 + i as u64);
            let d = layout_orthogonal(&g, i as u64).unwrap();
            d.validate().unwrap();
            verify_box_clearance(&d).unwrap();
        }
    }

    #[test]
    fn orthogonal_is_deterministic() {
        let g = random_connected_gnp(10, 0.3, 8);
        assert_eq!(layout_orthogonal(&g, 4).unwrap(), layout_orthogonal(&g, 4).unwrap());
    }

    #[test]
    fn quality_planar_square_has_zero_crossings() {
        let g = cycle(4);
        let positions = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let routes = straight_routes(&g, &positions);
        let d = Drawing::from_positions(Paradigm::StraightLine, positions, routes);
        let q = quality_report(&d);
        assert_eq!(q.crossings, 0);
        assert_eq!(q.min_node_distance, 10.0);
        assert!((q.angular_resolution - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(q.edge_length_cv.abs() < 1e-12);
    }

    #[test]
    fn quality_k4_with_crossing_diagonals() {
        let g = k(4);
        // Square with both diagonals drawn: exactly one crossing.
        let positions = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let routes = straight_routes(&g, &positions);
        let d = Drawing::from_positions(Paradigm::StraightLine, positions, routes);
        assert_eq!(count_crossings(&d), 1);
    }

    #[test]
    fn crossing_count_matches_naive_oracle() {
        // Independent oracle: parametric line intersection on lattice points.
        fn oracle_cross(a: (Point, Point), b: (Point, Point)) -> bool {
            let ends = [a.0, a.1];
            if ends.contains(&b.0) || ends.contains(&b.1) {
                return false;
            }
            let (p, r) = (a.0, Point::new(a.1.x - a.0.x, a.1.y - a.0.y));
            let (q, s) = (b.0, Point::new(b.1.x - b.0.x, b.1.y - b.0.y));
            let rxs = r.x * s.y - r.y * s.x;
            let qp = Point::new(q.x - p.x, q.y - p.y);
            let qpxr = qp.x * r.y - qp.y * r.x;
            if rxs != 0.0 {
                let t = (qp.x * s.y - qp.y * s.x) / rxs;
                let u = qpxr / rxs;
                return (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u);
            }
            if qpxr != 0.0 {
                return false; // parallel, not collinear
            }
            let rr = r.x * r.x + r.y * r.y;
            let t0 = (qp.x * r.x + qp.y * r.y) / rr;
            let t1 = t0 + (s.x * r.x + s.y * r.y) / rr;
            let (lo, hi) = (t0.min(t1), t0.max(t1));
            lo.max(0.0) < hi.min(1.0) // positive-length overlap
        }

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..40 {
            let n = 4 + trial % 6;
            let g = random_gnp(n, 0.5, trial as u64);
            let positions = random_lattice_positions(n, 40, &mut rng);
            let routes = straight_routes(&g, &positions);
            let d = Drawing::from_positions(Paradigm::StraightLine, positions, routes);
            let segments: Vec<(Point, Point)> =
                d.routes.iter().flat_map(|r| r.segments()).collect();
            let mut expected = 0;
            for i in 0..segments.len() {
                for j in (i + 1)..segments.len() {
                    if oracle_cross(segments[i], segments[j]) {
                        expected += 1;
                    }
                }
            }
            assert_eq!(count_crossings(&d), expected, "trial {trial}");
        }
    }

    #[test]
    fn improve_preserves_zero_crossings() {
        let g = cycle(4);
        let positions = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let routes = straight_routes(&g, &positions);
        let d = Drawing::from_positions(Paradigm::StraightLine, positions, routes);
        let improved = improve_drawing(&d, 200, 1).unwrap();
        assert_eq!(count_crossings(&improved), 0);
        assert_eq!(improved.paradigm, Paradigm::StraightLine);
    }

    #[test]
    fn improve_untangles_a_crossed_cycle() {
        let g = cycle(6);
        // Deliberately tangled placement.
        let positions = vec![
            Point::new(0.0, 0.0),
            Point::new(50.0, 50.0),
            Point::new(10.0, 40.0),
            Point::new(60.0, 10.0),
            Point::new(30.0, 60.0),
            Point::new(70.0, 30.0),
        ];
        let routes = straight_routes(&g, &positions);
        let d = Drawing::from_positions(Paradigm::StraightLine, positions, routes);
        let before = count_crossings(&d);
        assert!(before > 0);
        let improved = improve_drawing(&d, 500, 3).unwrap();
        assert!(count_crossings(&improved) < before);
    }

    #[test]
    fn improve_budget_zero_returns_input() {
        let g = cycle(5);
        let d = layout_force_directed(&g, 200, 2).unwrap();
        let out = improve_drawing(&d, 0, 9).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn improve_rejects_orthogonal_input() {
        let g = cycle(4);
        let d = layout_orthogonal(&g, 0).unwrap();
        assert!(improve_drawing(&d, 10, 0).is_err());
    }

    #[test]
    fn drawing_serialization_round_trips() {
        let g = random_connected_gnp(8, 0.3, 12);
        let d = layout_orthogonal(&g, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("drawing.toml");
        d.save(&path).unwrap();
        assert_eq!(Drawing::load(&path).unwrap(), d);
    }
}

