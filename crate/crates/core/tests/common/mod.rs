//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use ant_system::roadmap::{NodeId, Point, Roadmap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum over all simple paths, summing lengths from the source. DFS in
/// ascending neighbour order visits paths lexicographically, so the first
/// strict minimum is also the lexicographically smallest optimum.
pub fn brute_force(r: &Roadmap, s: NodeId, d: NodeId) -> Option<(f64, Vec<NodeId>)> {
    fn dfs(
        r: &Roadmap,
        at: NodeId,
        d: NodeId,
        len: f64,
        path: &mut Vec<NodeId>,
        seen: &mut Vec<bool>,
        best: &mut Option<(f64, Vec<NodeId>)>,
    ) {
        if at == d {
            if best.as_ref().is_none_or(|(b, _)| len < *b) {
                *best = Some((len, path.clone()));
            }
            return;
        }
        for nb in r.neighbors(at) {
            if seen[nb.node.0] {
                continue;
            }
            seen[nb.node.0] = true;
            path.push(nb.node);
            dfs(r, nb.node, d, len + nb.length, path, seen, best);
            path.pop();
            seen[nb.node.0] = false;
        }
    }
    let mut seen = vec![false; r.node_count()];
    seen[s.0] = true;
    let mut best = None;
    dfs(r, s, d, 0.0, &mut vec![s], &mut seen, &mut best);
    best
}

/// Random connected graph with 2..=10 nodes on a 4x4 integer lattice, so
/// equal-length alternatives are common.
pub fn lattice_graph(seed: u64) -> Roadmap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=10);
    let mut pts: Vec<Point> = Vec::new();
    while pts.len() < n {
        let p = Point::new(rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut links = Vec::new();
    for i in 1..n {
        links.push((NodeId(rng.gen_range(0..i)), NodeId(i)));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let pair = (NodeId(a.min(b)), NodeId(a.max(b)));
        if a != b && !links.iter().any(|&(x, y)| (x.min(y), x.max(y)) == pair) {
            links.push(pair);
        }
    }
    Roadmap::new(pts, &links, 4.0, 4.0).unwrap()
}

const ALPHA_TABLE: &str = "a = 0.538, b_1 = -2.167, b_2 = 0.903, b_3 = 0.479, b_4 = 0.215, \
    b_5 = 0.410, c_1 = -0.207, c_2 = 0.829, c_3 = -0.079, c_4 = 0.052, c_5 = 0.190, \
    d_{11} = 0.050, d_{12} = 1.319, d_{13} = -0.15, d_{14} = 0.57, d_{21} = -0.2, \
    d_{22} = -0.63, d_{23} = -0.09, d_{31} = 0.027, d_{32} = -0.18, d_{41} = -1.022";

const BETA_TABLE: &str = "a = 3.76, b_1 = -0.06, b_2 = 0.07, b_3 = -0.17, b_4 = 0.023, \
    b_5 = 0.05, c_1 = -0.17, c_2 = 0.07, c_3 = -0.11, c_4 = 0.03, c_5 = -0.02, \
    d_{11} = -0.24, d_{12} = 0.122, d_{13} = -0.159, d_{14} = 0.080, d_{21} = -0.026, \
    d_{22} = -0.008, d_{23} = 0.002, d_{31} = -0.101, d_{32} = -0.041, d_{41} = 0.011";

fn table(text: &str) -> HashMap<String, f64> {
    text.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').unwrap();
            let key: String = k.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
            (key, v.trim().parse().unwrap())
        })
        .collect()
}

pub fn alpha_table() -> HashMap<String, f64> {
    table(ALPHA_TABLE)
}

pub fn beta_table() -> HashMap<String, f64> {
    table(BETA_TABLE)
}

/// `a + sum b_i X_i + sum c_j Y_j + sum_{i+j<=5} d_ij X_i Y_j`.
fn series(t: &HashMap<String, f64>, x: impl Fn(usize) -> f64, y: impl Fn(usize) -> f64) -> f64 {
    let mut f = t["a"];
    for i in 1..=5 {
        f += t[&format!("b{i}")] * x(i);
        f += t[&format!("c{i}")] * y(i);
    }
    for i in 1..=4 {
        for j in 1..=(5 - i) {
            f += t[&format!("d{i}{j}")] * x(i) * y(j);
        }
    }
    f
}

pub fn logistic(i: usize, x: f64) -> f64 {
    if i == 1 {
        x
    } else {
        2.0 / (1.0 + (-(x + 1.0 - (i as f64 - 1.0) * 0.4) / 0.12).exp()) - 1.0
    }
}

/// Alpha surface at node count `n` and variation coefficient `s`.
pub fn alpha_oracle(n: f64, s: f64) -> f64 {
    let x = 2.0 * (n.clamp(50.0, 500.0) - 50.0) / 450.0 - 1.0;
    let y = 2.0 * s.clamp(0.0, 1.0) - 1.0;
    series(&alpha_table(), |i| logistic(i, x), |j| logistic(j, y))
}

/// Beta surface at node count `n` and variation coefficient `s`.
pub fn beta_oracle(n: f64, s: f64) -> f64 {
    let x = PI * (n.clamp(50.0, 500.0) - 50.0) / 450.0;
    let y = PI * s.clamp(0.0, 1.0);
    series(
        &beta_table(),
        |i| (i as f64 * x).cos(),
        |j| (j as f64 * y).cos(),
    )
}
