//! Geometric roadmaps: cities scattered in a rectangle, joined by undirected
//! links whose lengths are the Euclidean distances between their endpoints.
//!
//! Besides the graph itself this module owns random instance generation,
//! the two instance features used by the parameter advisor (node count and
//! nearest-neighbour variation coefficient), the exact shortest-path oracle
//! and the plain-text instance format.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance between a stored edge length and the coordinate distance.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

const FILE_MAGIC: &str = "roadmap";

#[derive(Debug, Error)]
pub enum RoadmapError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {field}: {message}")]
    Parse {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("invalid roadmap: {0}")]
    Validation(String),
    #[error("node {destination} is unreachable from node {from}")]
    Unreachable { from: NodeId, destination: NodeId },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, RoadmapError>;

/// Dense node index in `[0, node_count)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Undirected link, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite `from`.
    #[inline]
    pub fn other(&self, from: NodeId) -> NodeId {
        if self.a == from {
            self.b
        } else {
            self.a
        }
    }
}

/// One entry of a node's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub node: NodeId,
    pub edge: usize,
    pub length: f64,
}

/// Connected, undirected geometric graph.
///
/// Edges are kept sorted by `(a, b)` and every adjacency list is sorted by
/// neighbour id, so all iteration orders are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    nodes: Vec<Point>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Neighbor>>,
    width: f64,
    height: f64,
}

impl Roadmap {
    /// Builds a roadmap from coordinates and endpoint pairs. Edge lengths are
    /// computed from the coordinates.
    pub fn new(
        nodes: Vec<Point>,
        links: &[(NodeId, NodeId)],
        width: f64,
        height: f64,
    ) -> Result<Self> {
        let edges = links
            .iter()
            .map(|&(a, b)| {
                let length = match (nodes.get(a.0), nodes.get(b.0)) {
                    (Some(pa), Some(pb)) => pa.distance(pb),
                    _ => f64::NAN,
                };
                (a, b, length)
            })
            .collect::<Vec<_>>();
        Self::with_lengths(nodes, &edges, width, height)
    }

    /// Builds a roadmap from explicit edge lengths, checking each against the
    /// coordinate distance. Stored lengths are always the coordinate distance.
    pub fn with_lengths(
        nodes: Vec<Point>,
        links: &[(NodeId, NodeId, f64)],
        width: f64,
        height: f64,
    ) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && height > 0.0 && height.is_finite()) {
            return Err(RoadmapError::Validation(format!(
                "area must be positive and finite, got {width}x{height}"
            )));
        }
        if nodes.len() < 2 {
            return Err(RoadmapError::Validation(format!(
                "at least 2 nodes required, got {}",
                nodes.len()
            )));
        }
        if let Some((i, _)) = nodes
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(RoadmapError::Validation(format!(
                "node {i} has non-finite coordinates"
            )));
        }

        let n = nodes.len();
        let mut edges = Vec::with_capacity(links.len());
        for &(a, b, length) in links {
            if a.0 >= n || b.0 >= n {
                return Err(RoadmapError::Validation(format!(
                    "edge ({a}, {b}) references a node outside [0, {n})"
                )));
            }
            if a == b {
                return Err(RoadmapError::Validation(format!("self-loop at node {a}")));
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let euclid = nodes[a.0].distance(&nodes[b.0]);
            if !(euclid > 0.0) {
                return Err(RoadmapError::Validation(format!(
                    "edge ({a}, {b}) joins coincident nodes"
                )));
            }
            if !((length - euclid).abs() <= LENGTH_TOLERANCE * euclid) {
                return Err(RoadmapError::Validation(format!(
                    "edge ({a}, {b}) length {length} differs from coordinate distance {euclid}"
                )));
            }
            edges.push(Edge {
                a,
                b,
                length: euclid,
            });
        }
        edges.sort_by_key(|e| (e.a, e.b));
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b))
        {
            return Err(RoadmapError::Validation(format!(
                "duplicate edge ({}, {})",
                w[0].a, w[0].b
            )));
        }

        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.a.0].push(Neighbor {
                node: e.b,
                edge: idx,
                length: e.length,
            });
            adjacency[e.b.0].push(Neighbor {
                node: e.a,
                edge: idx,
                length: e.length,
            });
        }
        for list in &mut adjacency {
            list.sort_by_key(|nb| nb.node);
        }

        let roadmap = Self {
            nodes,
            edges,
            adjacency,
            width,
            height,
        };
        let components = roadmap.component_count();
        if components != 1 {
            return Err(RoadmapError::Validation(format!(
                "graph is disconnected ({components} components)"
            )));
        }
        Ok(roadmap)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn point(&self, id: NodeId) -> Point {
        self.nodes[id.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn neighbors(&self, id: NodeId) -> &[Neighbor] {
        &self.adjacency[id.0]
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 < self.nodes.len()
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn edge_index(&self, a: NodeId, b: NodeId) -> Option<usize> {
        let list = self.adjacency.get(a.0)?;
        list.binary_search_by_key(&b, |nb| nb.node)
            .ok()
            .map(|pos| list[pos].edge)
    }

    /// Sum of edge lengths along `path`, accumulated from the first node.
    /// `None` if two consecutive nodes are not adjacent.
    pub fn path_length(&self, path: &[NodeId]) -> Option<f64> {
        path.windows(2).try_fold(0.0, |acc, w| {
            self.edge_index(w[0], w[1])
                .map(|e| acc + self.edges[e].length)
        })
    }

    /// Pair of nodes with the largest Euclidean separation; ties resolved
    /// towards the lexicographically smallest `(i, j)`.
    pub fn farthest_pair(&self) -> (NodeId, NodeId) {
        let mut best = (NodeId(0), NodeId(1));
        let mut best_d = f64::NEG_INFINITY;
        for i in 0..self.nodes.len() {
            for j in (i + 1)..self.nodes.len() {
                let d = self.nodes[i].distance(&self.nodes[j]);
                if d > best_d {
                    best_d = d;
                    best = (NodeId(i), NodeId(j));
                }
            }
        }
        best
    }

    fn component_count(&self) -> usize {
        component_labels(self.nodes.len(), &self.adjacency_pairs()).1
    }

    fn adjacency_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.a.0, e.b.0)).collect()
    }
}

/// Labels each node with a component index; returns labels and component count.
fn component_labels(n: usize, pairs: &[(usize, usize)]) -> (Vec<usize>, usize) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Random k-nearest-neighbour roadmap.
///
/// Nodes are scattered uniformly over `[0, width) x [0, height)`. Each node is
/// linked to its `k_neighbors` nearest nodes (ties toward the smaller id);
/// while more than one component remains, the shortest link between two
/// different components is added.
pub fn generate_roadmap(
    node_count: usize,
    area: (f64, f64),
    k_neighbors: usize,
    seed: u64,
) -> Result<Roadmap> {
    let (width, height) = area;
    if node_count < 2 {
        return Err(RoadmapError::InvalidArgument(format!(
            "node_count must be at least 2, got {node_count}"
        )));
    }
    if k_neighbors < 1 {
        return Err(RoadmapError::InvalidArgument(
            "k_neighbors must be at least 1".into(),
        ));
    }
    if !(width > 0.0 && width.is_finite() && height > 0.0 && height.is_finite()) {
        return Err(RoadmapError::InvalidArgument(format!(
            "area must be positive, got {width}x{height}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<Point> = Vec::with_capacity(node_count);
    while nodes.len() < node_count {
        let p = Point::new(rng.gen::<f64>() * width, rng.gen::<f64>() * height);
        // reject coincident cities
        if nodes.iter().all(|q| q.distance(&p) > 0.0) {
            nodes.push(p);
        }
    }

    let n = node_count;
    let k = k_neighbors.min(n - 1);
    let mut links: Vec<(usize, usize)> = Vec::with_capacity(n * k);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (nodes[i].distance(&nodes[j]), j)),
        );
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, j) in order.iter().take(k) {
            links.push((i.min(j), i.max(j)));
        }
    }
    links.sort_unstable();
    links.dedup();

    loop {
        let (label, count) = component_labels(n, &links);
        if count == 1 {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                if label[i] == label[j] {
                    continue;
                }
                let d = nodes[i].distance(&nodes[j]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("more than one component implies a cross pair");
        links.push((i, j));
    }

    let pairs: Vec<(NodeId, NodeId)> = links.iter().map(|&(a, b)| (NodeId(a), NodeId(b))).collect();
    Roadmap::new(nodes, &pairs, width, height)
}

/// Instance features used to index the parameter surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Raw node count.
    pub n: usize,
    pub width: f64,
    pub height: f64,
    /// Population std-dev of Euclidean nearest-neighbour distances over their mean.
    pub sigma_v: f64,
}

impl FeatureVector {
    /// Nodes per unit area.
    pub fn density(&self) -> f64 {
        self.n as f64 / (self.width * self.height)
    }
}

/// Euclidean nearest-neighbour distance of every node.
pub fn nearest_neighbor_distances(points: &[Point]) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| p.distance(q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn extract_features(roadmap: &Roadmap) -> FeatureVector {
    let nn = nearest_neighbor_distances(roadmap.nodes());
    let count = nn.len() as f64;
    let mean = nn.iter().sum::<f64>() / count;
    let sigma_v = if mean > 0.0 {
        let var = nn.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / count;
        var.sqrt() / mean
    } else {
        0.0
    };
    FeatureVector {
        n: roadmap.node_count(),
        width: roadmap.width(),
        height: roadmap.height(),
        sigma_v,
    }
}

/// Minimum-length route between two nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub path: Vec<NodeId>,
    pub length: f64,
    pub hops: usize,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source distances, accumulated along each path from `source`.
pub fn shortest_distances(roadmap: &Roadmap, source: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; roadmap.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source.0] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source.0,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for nb in roadmap.neighbors(NodeId(node)) {
            let nd = d + nb.length;
            if nd < dist[nb.node.0] {
                dist[nb.node.0] = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    node: nb.node.0,
                });
            }
        }
    }
    dist
}

/// Exact shortest path. Among equal-length optima the lexicographically
/// smallest node sequence is returned.
pub fn dijkstra(roadmap: &Roadmap, source: NodeId, destination: NodeId) -> Result<PathResult> {
    for id in [source, destination] {
        if !roadmap.contains(id) {
            return Err(RoadmapError::InvalidArgument(format!(
                "node {id} is not in the roadmap"
            )));
        }
    }
    if source == destination {
        return Err(RoadmapError::InvalidArgument(
            "source and destination must differ".into(),
        ));
    }
    let dist = shortest_distances(roadmap, source);
    if !dist[destination.0].is_finite() {
        return Err(RoadmapError::Unreachable {
            from: source,
            destination,
        });
    }

    // Mark nodes that lie on some optimal route: walk backwards from the
    // destination over tight edges (dist[u] + w == dist[v]).
    let n = roadmap.node_count();
    let mut on_route = vec![false; n];
    on_route[destination.0] = true;
    let mut stack = vec![destination.0];
    while let Some(v) = stack.pop() {
        for nb in roadmap.neighbors(NodeId(v)) {
            let u = nb.node.0;
            if !on_route[u] && dist[u] + nb.length == dist[v] {
                on_route[u] = true;
                stack.push(u);
            }
        }
    }

    // Tight edges strictly increase dist, so the greedy smallest-id walk
    // terminates at the destination.
    let mut path = vec![source];
    let mut current = source;
    while current != destination {
        let next = roadmap
            .neighbors(current)
            .iter()
            .find(|nb| on_route[nb.node.0] && dist[current.0] + nb.length == dist[nb.node.0])
            .map(|nb| nb.node)
            .expect("an optimal route continues from every node marked on it");
        path.push(next);
        current = next;
    }
    Ok(PathResult {
        hops: path.len() - 1,
        length: dist[destination.0],
        path,
    })
}

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the roadmap in its plain-text form:
///
/// ```text
/// roadmap <node_count> <width> <height>
/// node <id> <x> <y>
/// edge <id_a> <id_b> <length>
/// ```
///
/// Reals carry 17 significant digits so a load reproduces every value exactly.
pub fn write_roadmap<W: std::io::Write>(roadmap: &Roadmap, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{FILE_MAGIC} {} {} {}",
        roadmap.node_count(),
        fmt_real(roadmap.width),
        fmt_real(roadmap.height)
    )?;
    for (i, p) in roadmap.nodes.iter().enumerate() {
        writeln!(out, "node {i} {} {}", fmt_real(p.x), fmt_real(p.y))?;
    }
    for e in &roadmap.edges {
        writeln!(out, "edge {} {} {}", e.a, e.b, fmt_real(e.length))?;
    }
    Ok(())
}

pub fn roadmap_to_string(roadmap: &Roadmap) -> String {
    let mut buf = Vec::new();
    write_roadmap(roadmap, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("roadmap text is ASCII")
}

pub fn save_roadmap(roadmap: &Roadmap, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, roadmap_to_string(roadmap))?;
    Ok(())
}

pub fn load_roadmap(path: impl AsRef<Path>) -> Result<Roadmap> {
    parse_roadmap(&fs::read_to_string(path)?)
}

struct Fields<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn next<T: std::str::FromStr>(&mut self, field: &'static str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let line = self.line;
        let raw = self.iter.next().ok_or(RoadmapError::Parse {
            line,
            field,
            message: "missing value".into(),
        })?;
        raw.parse::<T>().map_err(|e| RoadmapError::Parse {
            line,
            field,
            message: format!("{raw:?}: {e}"),
        })
    }

    fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            None => Ok(()),
            Some(extra) => Err(RoadmapError::Parse {
                line: self.line,
                field: "record",
                message: format!("unexpected trailing field {extra:?}"),
            }),
        }
    }
}

pub fn parse_roadmap(text: &str) -> Result<Roadmap> {
    let mut header: Option<(usize, f64, f64)> = None;
    let mut nodes: Vec<Point> = Vec::new();
    let mut links: Vec<(NodeId, NodeId, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut iter = trimmed.split_whitespace();
        let tag = iter.next().unwrap_or_default();
        let mut fields = Fields { line, iter };
        match tag {
            FILE_MAGIC => {
                if header.is_some() {
                    return Err(RoadmapError::Parse {
                        line,
                        field: "header",
                        message: "repeated header record".into(),
                    });
                }
                let count = fields.next::<usize>("node_count")?;
                let width = fields.next::<f64>("width")?;
                let height = fields.next::<f64>("height")?;
                fields.finish()?;
                header = Some((count, width, height));
            }
            "node" | "edge" if header.is_none() => {
                return Err(RoadmapError::Parse {
                    line,
                    field: "header",
                    message: "header record must come first".into(),
                });
            }
            "node" => {
                let id = fields.next::<usize>("id")?;
                let x = fields.next::<f64>("x")?;
                let y = fields.next::<f64>("y")?;
                fields.finish()?;
                if id != nodes.len() {
                    return Err(RoadmapError::Parse {
                        line,
                        field: "id",
                        message: format!("expected node id {}, found {id}", nodes.len()),
                    });
                }
                nodes.push(Point::new(x, y));
            }
            "edge" => {
                let a = fields.next::<usize>("id_a")?;
                let b = fields.next::<usize>("id_b")?;
                let length = fields.next::<f64>("length")?;
                fields.finish()?;
                links.push((NodeId(a), NodeId(b), length));
            }
            other => {
                return Err(RoadmapError::Parse {
                    line,
                    field: "record",
                    message: format!("unknown record type {other:?}"),
                });
            }
        }
    }

    let (count, width, height) = header.ok_or(RoadmapError::Parse {
        line: 1,
        field: "header",
        message: "missing header record".into(),
    })?;
    if count != nodes.len() {
        return Err(RoadmapError::Validation(format!(
            "header declares {count} nodes but {} were listed",
            nodes.len()
        )));
    }
    Roadmap::with_lengths(nodes, &links, width, height)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Roadmap {
        // 0-1 and 1-2 are 5 long, 0-2 is 6
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(6.0, 0.0),
        ];
        Roadmap::new(
            nodes,
            &[
                (NodeId(0), NodeId(1)),
                (NodeId(1), NodeId(2)),
                (NodeId(0), NodeId(2)),
            ],
            10.0,
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn two_node_generation_is_a_single_edge() {
        let r = generate_roadmap(2, (10.0, 5.0), 1, 99).unwrap();
        assert_eq!(r.node_count(), 2);
        assert_eq!(r.edge_count(), 1);
        assert_eq!((r.edges()[0].a, r.edges()[0].b), (NodeId(0), NodeId(1)));
    }

    #[test]
    fn generation_rejects_bad_arguments() {
        assert!(matches!(
            generate_roadmap(1, (1.0, 1.0), 1, 0),
            Err(RoadmapError::InvalidArgument(_))
        ));
        assert!(generate_roadmap(5, (0.0, 1.0), 1, 0).is_err());
        assert!(generate_roadmap(5, (1.0, -1.0), 1, 0).is_err());
        assert!(generate_roadmap(5, (1.0, 1.0), 0, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_roadmap(60, (300.0, 300.0), 4, 7).unwrap();
        let b = generate_roadmap(60, (300.0, 300.0), 4, 7).unwrap();
        assert_eq!(roadmap_to_string(&a), roadmap_to_string(&b));
        let c = generate_roadmap(60, (300.0, 300.0), 4, 8).unwrap();
        assert_ne!(roadmap_to_string(&a), roadmap_to_string(&c));
    }

    #[test]
    fn k1_generation_merges_components() {
        // 1-NN graphs are almost always disconnected before merging
        let r = generate_roadmap(80, (100.0, 100.0), 1, 3).unwrap();
        assert_eq!(r.node_count(), 80);
        assert!(r.edge_count() >= 79);
    }

    #[test]
    fn unit_square_has_zero_variation() {
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let links = [
            (NodeId(0), NodeId(1)),
            (NodeId(1), NodeId(2)),
            (NodeId(2), NodeId(3)),
        ];
        let r = Roadmap::new(nodes, &links, 1.0, 1.0).unwrap();
        let f = extract_features(&r);
        assert_eq!(f.n, 4);
        assert_eq!(f.sigma_v, 0.0);
        assert_eq!(f.density(), 4.0);
    }

    #[test]
    fn dijkstra_prefers_two_short_hops() {
        // lengths must match coordinates, so the long A-C link cannot exist here
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        let r = Roadmap::new(
            nodes,
            &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))],
            2.0,
            1.0,
        )
        .unwrap();
        let p = dijkstra(&r, NodeId(0), NodeId(2)).unwrap();
        assert_eq!(p.path, vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(p.length, 2.0);
        assert_eq!(p.hops, 2);
    }

    #[test]
    fn dijkstra_takes_direct_edge_when_shortest() {
        let r = triangle();
        let p = dijkstra(&r, NodeId(0), NodeId(2)).unwrap();
        assert_eq!(p.path, vec![NodeId(0), NodeId(2)]);
        assert_eq!(p.length, 6.0);
    }

    #[test]
    fn dijkstra_breaks_ties_lexicographically() {
        // square 0-1-3 and 0-2-3 have identical length
        let nodes = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        let links = [
            (NodeId(0), NodeId(2)),
            (NodeId(2), NodeId(3)),
            (NodeId(0), NodeId(1)),
            (NodeId(1), NodeId(3)),
        ];
        let r = Roadmap::new(nodes, &links, 1.0, 1.0).unwrap();
        let p = dijkstra(&r, NodeId(0), NodeId(3)).unwrap();
        assert_eq!(p.path, vec![NodeId(0), NodeId(1), NodeId(3)]);
        let back = dijkstra(&r, NodeId(3), NodeId(0)).unwrap();
        assert_eq!(back.path, vec![NodeId(3), NodeId(1), NodeId(0)]);
    }

    #[test]
    fn dijkstra_rejects_bad_endpoints() {
        let r = triangle();
        assert!(dijkstra(&r, NodeId(0), NodeId(0)).is_err());
        assert!(dijkstra(&r, NodeId(0), NodeId(9)).is_err());
    }

    #[test]
    fn validation_catches_malformed_graphs() {
        let pts = || {
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
            ]
        };
        let dup = Roadmap::new(
            pts(),
            &[
                (NodeId(0), NodeId(1)),
                (NodeId(1), NodeId(0)),
                (NodeId(1), NodeId(2)),
            ],
            2.0,
            1.0,
        );
        assert!(matches!(dup, Err(RoadmapError::Validation(m)) if m.contains("duplicate")));
        let looped = Roadmap::new(pts(), &[(NodeId(1), NodeId(1))], 2.0, 1.0);
        assert!(matches!(looped, Err(RoadmapError::Validation(m)) if m.contains("self-loop")));
        let split = Roadmap::new(pts(), &[(NodeId(0), NodeId(1))], 2.0, 1.0);
        assert!(matches!(split, Err(RoadmapError::Validation(m)) if m.contains("disconnected")));
    }

    #[test]
    fn parse_reports_line_and_field() {
        let text = "roadmap 2 1 1\nnode 0 0 0\nnode 1 abc 0\n";
        match parse_roadmap(text) {
            Err(RoadmapError::Parse { line, field, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "x");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_duplicate_and_inconsistent_edges() {
        let dup = "roadmap 2 1 1\nnode 0 0 0\nnode 1 1 0\nedge 0 1 1\nedge 1 0 1\n";
        assert!(matches!(
            parse_roadmap(dup),
            Err(RoadmapError::Validation(_))
        ));
        let bad_len = "roadmap 2 1 1\nnode 0 0 0\nnode 1 1 0\nedge 0 1 1.001\n";
        assert!(
            matches!(parse_roadmap(bad_len), Err(RoadmapError::Validation(m)) if m.contains("length"))
        );
        let ok = "roadmap 2 1 1\nnode 0 0 0\nnode 1 1 0\nedge 0 1 1.0000000000001\n";
        assert!(parse_roadmap(ok).is_ok());
        let disconnected = "roadmap 3 1 1\nnode 0 0 0\nnode 1 1 0\nnode 2 1 1\nedge 0 1 1\n";
        assert!(matches!(
            parse_roadmap(disconnected),
            Err(RoadmapError::Validation(_))
        ));
    }

    #[test]
    fn farthest_pair_on_line() {
        let nodes = vec![
            Point::new(1.0, 0.0),
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
        ];
        let r = Roadmap::new(
            nodes,
            &[(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2))],
            5.0,
            1.0,
        )
        .unwrap();
        assert_eq!(r.farthest_pair(), (NodeId(1), NodeId(2)));
    }
}
