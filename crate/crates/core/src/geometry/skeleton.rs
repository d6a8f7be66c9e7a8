use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::Write;

use super::contour::{boundary_samples, extract_contour};
use super::delaunay::Triangulation;
use super::{Point, Polygon, Polyline};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonParams {
    /// Maximum gap between consecutive outline samples, pixels.
    pub spacing: f64,
    /// A Voronoi edge is kept only if the outline arc between its two
    /// generating samples is at least `arc_ratio` times the inscribed radius
    /// at the edge. Staircase noise on rasterised outlines produces branches
    /// whose generators are close along the outline; genuine medial branches,
    /// including those into right-angle corners, have generators at least two
    /// radii apart.
    pub arc_ratio: f64,
}

impl Default for SkeletonParams {
    fn default() -> Self {
        Self {
            spacing: 0.5,
            arc_ratio: 1.2,
        }
    }
}

/// Undirected medial graph. Each node carries its inscribed-disk radius
/// (distance to the nearest outline sample).
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonGraph {
    nodes: Vec<Point>,
    radii: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl SkeletonGraph {
    /// Graph with Euclidean edge lengths and zero radii.
    pub fn from_edges(nodes: Vec<Point>, edges: &[(usize, usize)]) -> Result<Self> {
        let radii = vec![0.0; nodes.len()];
        Self::with_radii(nodes, radii, edges)
    }

    pub fn with_radii(
        nodes: Vec<Point>,
        radii: Vec<f64>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        if radii.len() != nodes.len() {
            return Err(Error::DimensionMismatch("one radius per node".into()));
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= nodes.len() || b >= nodes.len() {
                return Err(Error::invalid("edge endpoint out of range"));
            }
            if a == b {
                return Err(Error::invalid("self-loop"));
            }
            out.push((a, b, nodes[a].dist(nodes[b])));
        }
        Ok(Self {
            nodes,
            radii,
            edges: out,
        })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// No nodes at all. A single node without edges is a point skeleton.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b, l) in &self.edges {
            adj[a].push((b, l));
            adj[b].push((a, l));
        }
        adj
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, b, _) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        components(self.nodes.len(), &self.edges)
            .iter()
            .all(|&c| c == 0)
    }

    /// Keeps the nodes flagged in `keep` (and edges between them),
    /// reindexing in the original order.
    fn restrict(&self, keep: &[bool]) -> SkeletonGraph {
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        let mut radii = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            if k {
                map[i] = nodes.len();
                nodes.push(self.nodes[i]);
                radii.push(self.radii[i]);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.0] && keep[e.1])
            .map(|&(a, b, l)| (map[a], map[b], l))
            .collect();
        SkeletonGraph {
            nodes,
            radii,
            edges,
        }
    }
}

fn components(n: usize, edges: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            // smaller index wins so component ids are canonical
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Arc-length position of every outline sample and the total perimeter.
fn arc_positions(samples: &[Point], polygon: &Polygon) -> (Vec<f64>, f64) {
    let mut arc = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (i, p) in samples.iter().enumerate() {
        if i > 0 {
            acc += samples[i - 1].dist(*p);
        }
        arc.push(acc);
    }
    (arc, polygon.perimeter())
}

/// Interior Voronoi skeleton of the mask's outline.
///
/// Voronoi vertices are the circumcentres of the Delaunay triangles of the
/// outline samples; coincident circumcentres (cocircular samples) are merged.
/// An edge survives when both endpoints lie strictly inside the outline and
/// it passes the outline-arc significance test of [`SkeletonParams`]. Only
/// the connected component with the largest total edge length is returned.
/// When no edge is significant (a disk) the skeleton is the single interior
/// node with the largest inscribed radius.
pub fn medial_skeleton(m: &BinaryMask, params: SkeletonParams) -> Result<SkeletonGraph> {
    let polygon = extract_contour(m)?;
    let samples = boundary_samples(&polygon, params.spacing)?;
    let (sample_arc, perimeter) = arc_positions(&samples, &polygon);
    let tri = Triangulation::new(&samples);

    let mut point_arc = vec![f64::NAN; tri.points().len()];
    for (i, &a) in sample_arc.iter().enumerate() {
        let k = tri.input_index(i);
        if point_arc[k].is_nan() {
            point_arc[k] = a;
        }
    }

    // Circumcircles of triangles whose centre is inside the outline.
    let n_tri = tri.triangles().len();
    let mut circles: Vec<Option<(Point, f64)>> = Vec::with_capacity(n_tri);
    for t in 0..n_tri {
        let (c, r) = tri.circumcircle(t);
        circles.push((c.x.is_finite() && c.y.is_finite() && polygon.contains(c)).then_some((c, r)));
    }

    // Merge coincident centres.
    const MERGE_EPS: f64 = 1e-6;
    let cell = |p: Point| {
        (
            (p.x / MERGE_EPS).floor() as i64,
            (p.y / MERGE_EPS).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut node_of_tri = vec![usize::MAX; n_tri];
    let mut nodes: Vec<Point> = Vec::new();
    let mut radii: Vec<f64> = Vec::new();
    for t in 0..n_tri {
        let Some((c, r)) = circles[t] else { continue };
        let (cx, cy) = cell(c);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(cx + dx, cy + dy)) {
                    for &n in list {
                        if nodes[n].dist(c) <= MERGE_EPS {
                            found = Some(n);
                            break 'search;
                        }
                    }
                }
            }
        }
        node_of_tri[t] = found.unwrap_or_else(|| {
            nodes.push(c);
            radii.push(r);
            grid.entry((cx, cy)).or_default().push(nodes.len() - 1);
            nodes.len() - 1
        });
    }

    let mut edge_set: HashMap<(usize, usize), f64> = HashMap::new();
    for (t1, t2, u, v) in tri.adjacent_pairs() {
        let (n1, n2) = (node_of_tri[t1], node_of_tri[t2]);
        if n1 == usize::MAX || n2 == usize::MAX || n1 == n2 {
            continue;
        }
        let gap = (point_arc[u] - point_arc[v]).abs();
        let arc = gap.min(perimeter - gap);
        let r = radii[n1].max(radii[n2]);
        if arc < params.arc_ratio * r {
            continue;
        }
        let key = (n1.min(n2), n1.max(n2));
        edge_set.insert(key, nodes[n1].dist(nodes[n2]));
    }
    let mut edges: Vec<(usize, usize, f64)> =
        edge_set.into_iter().map(|((a, b), l)| (a, b, l)).collect();
    edges.sort_unstable_by_key(|e| (e.0, e.1));
    if edges.is_empty() {
        let deepest = (0..nodes.len())
            .max_by(|&a, &b| {
                radii[a]
                    .total_cmp(&radii[b])
                    .then(nodes[b].lex_cmp(&nodes[a]))
            })
            .ok_or(Error::EmptySkeleton)?;
        return Ok(SkeletonGraph {
            nodes: vec![nodes[deepest]],
            radii: vec![radii[deepest]],
            edges: Vec::new(),
        });
    }

    let graph = SkeletonGraph {
        nodes,
        radii,
        edges,
    };
    let comp = components(graph.nodes.len(), &graph.edges);
    let mut weight: HashMap<usize, f64> = HashMap::new();
    for &(a, _, l) in &graph.edges {
        *weight.entry(comp[a]).or_default() += l;
    }
    let best = weight
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&c, _)| c)
        .expect("non-empty edge set");
    let has_edge = {
        let mut h = vec![false; graph.nodes.len()];
        for &(a, b, _) in &graph.edges {
            h[a] = true;
            h[b] = true;
        }
        h
    };
    let keep: Vec<bool> = (0..graph.nodes.len())
        .map(|i| has_edge[i] && comp[i] == best)
        .collect();
    Ok(graph.restrict(&keep))
}

/// Repeatedly remove the shortest leaf branch shorter than `prune_len`.
///
/// A leaf branch runs from a degree-1 node through degree-2 nodes up to the
/// first node of degree 3 or more; that junction node is kept. Pruning stops
/// when no junction is left, so a path is never shortened.
pub fn prune_spurs(g: &SkeletonGraph, prune_len: f64) -> SkeletonGraph {
    if g.edges.is_empty() {
        return g.clone();
    }
    let n = g.nodes.len();
    let mut alive_edge = vec![true; g.edges.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(a, b, _)) in g.edges.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    loop {
        let deg: Vec<usize> = (0..n)
            .map(|v| incident[v].iter().filter(|&&e| alive_edge[e]).count())
            .collect();
        if !deg.iter().any(|&d| d >= 3) {
            break;
        }
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for leaf in (0..n).filter(|&v| deg[v] == 1) {
            let mut len = 0.0;
            let mut branch_edges = Vec::new();
            let mut prev_edge = usize::MAX;
            let mut cur = leaf;
            while let Some(&e) = incident[cur]
                .iter()
                .find(|&&e| alive_edge[e] && e != prev_edge)
            {
                let (a, b, l) = g.edges[e];
                len += l;
                branch_edges.push(e);
                prev_edge = e;
                cur = if a == cur { b } else { a };
                if deg[cur] != 2 {
                    break;
                }
            }
            if deg[cur] < 3 || len >= prune_len {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bl, bleaf, _)) => len
                    .total_cmp(bl)
                    .then_with(|| g.nodes[leaf].lex_cmp(&g.nodes[*bleaf]))
                    .is_lt(),
            };
            if better {
                best = Some((len, leaf, branch_edges));
            }
        }
        let Some((_, _, branch)) = best else { break };
        for e in branch {
            alive_edge[e] = false;
        }
    }
    let edges: Vec<(usize, usize, f64)> = g
        .edges
        .iter()
        .zip(&alive_edge)
        .filter(|(_, &a)| a)
        .map(|(e, _)| *e)
        .collect();
    let mut keep = vec![false; n];
    for &(a, b, _) in &edges {
        keep[a] = true;
        keep[b] = true;
    }
    SkeletonGraph {
        nodes: g.nodes.clone(),
        radii: g.radii.clone(),
        edges,
    }
    .restrict(&keep)
}

#[derive(PartialEq)]
struct Visit(f64, usize);

impl Eq for Visit {}

impl PartialOrd for Visit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Visit {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then node index
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], src: usize) -> (Vec<f64>, Vec<usize>) {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut prev = vec![usize::MAX; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Visit(0.0, src));
    while let Some(Visit(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, l) in &adj[u] {
            let nd = d + l;
            if nd < dist[v] {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Visit(nd, v));
            }
        }
    }
    (dist, prev)
}

/// Longest shortest-path between two leaves, found by two farthest-leaf
/// sweeps. A point skeleton gives a zero-length polyline. Ties go to the lexicographically smaller endpoint, and the
/// returned path starts at the lexicographically smaller of its two ends.
pub fn centerline(g: &SkeletonGraph) -> Result<Polyline> {
    if g.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    if g.edges.is_empty() {
        // point skeleton
        let p = g.nodes[0];
        return Polyline::new(vec![p, p]);
    }
    let deg = g.degree();
    let leaves: Vec<usize> = (0..g.nodes.len()).filter(|&v| deg[v] == 1).collect();
    if leaves.is_empty() {
        return Err(Error::CyclicSkeleton);
    }
    let adj = g.adjacency();
    let lex_min = |cands: &mut dyn Iterator<Item = usize>| {
        cands
            .min_by(|&a, &b| g.nodes[a].lex_cmp(&g.nodes[b]))
            .expect("non-empty")
    };
    let farthest = |dist: &[f64], exclude: usize| -> Option<usize> {
        let best = leaves
            .iter()
            .filter(|&&v| v != exclude && dist[v].is_finite())
            .map(|&v| dist[v])
            .fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return None;
        }
        Some(lex_min(
            &mut leaves
                .iter()
                .copied()
                .filter(|&v| v != exclude && dist[v] == best),
        ))
    };

    let start = lex_min(&mut leaves.iter().copied());
    let (d0, _) = dijkstra(&adj, start);
    let a = farthest(&d0, start).unwrap_or(start);
    let (da, prev) = dijkstra(&adj, a);
    let b = farthest(&da, a).ok_or(Error::CyclicSkeleton)?;

    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = prev[cur];
        path.push(cur);
    }
    if g.nodes[a].lex_cmp(&g.nodes[b]).is_lt() {
        path.reverse();
    }
    Polyline::new(path.into_iter().map(|i| g.nodes[i]).collect())
}

/// Centred moving average with a window that shrinks symmetrically near the
/// ends, so both endpoints stay fixed. The result is never longer than the
/// input.
pub fn smooth_polyline(pl: &Polyline, window: usize) -> Result<Polyline> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::invalid("smoothing window must be odd and positive"));
    }
    let pts = pl.points();
    let n = pts.len();
    let half = window / 2;
    let out = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let sum = pts[i - h..=i + h]
                .iter()
                .fold(Point::default(), |acc, &p| acc + p);
            sum * (1.0 / (2 * h + 1) as f64)
        })
        .collect();
    Polyline::new(out)
}

/// Write points as `x,y` rows under a header.
pub fn write_points_csv<W: Write>(points: &[Point], mut out: W) -> Result<()> {
    writeln!(out, "x,y")?;
    for p in points {
        writeln!(out, "{:.6},{:.6}", p.x, p.y)?;
    }
    Ok(())
}
