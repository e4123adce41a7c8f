use std::collections::VecDeque;

use super::{Graph, VertexSet};
use crate::error::{invalid, Result};

/// Truncated multi-source BFS. Returns `dist[v]` for every vertex within
/// `limit` of the sources (all reachable vertices when `limit` is `None`).
pub fn bfs_distances(g: &Graph, sources: &[usize], limit: Option<usize>) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        if limit.is_some_and(|l| du >= l) {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Reusable bounded BFS that only touches the explored region, so repeated
/// small-radius searches on a large graph stay cheap.
pub(crate) struct LocalBfs {
    dist: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
    visited: Vec<usize>,
}

impl LocalBfs {
    pub(crate) fn new(n: usize) -> Self {
        LocalBfs {
            dist: vec![0; n],
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
            visited: Vec::new(),
        }
    }

    /// Runs BFS from `sources` up to `radius`; returns visited vertices in
    /// BFS order (sources first).
    pub(crate) fn run(&mut self, g: &Graph, sources: &[usize], radius: usize) -> &[usize] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.visited.clear();
        self.queue.clear();
        for &s in sources {
            if self.stamp[s] != self.epoch {
                self.stamp[s] = self.epoch;
                self.dist[s] = 0;
                self.queue.push_back(s);
                self.visited.push(s);
            }
        }
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u];
            if du >= radius {
                continue;
            }
            for &w in g.neighbors(u) {
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.dist[w] = du + 1;
                    self.queue.push_back(w);
                    self.visited.push(w);
                }
            }
        }
        &self.visited
    }

    pub(crate) fn distance(&self, v: usize) -> Option<usize> {
        (self.stamp[v] == self.epoch).then_some(self.dist[v])
    }
}

/// Vertices at distance exactly `i` from `v`.
pub fn sphere(g: &Graph, v: usize, i: usize) -> Result<VertexSet> {
    g.check_vertex(v)?;
    sphere_of_set(g, &VertexSet::from_sorted(vec![v]), i)
}

/// Vertices at distance at most `r` from `v`.
pub fn ball(g: &Graph, v: usize, r: usize) -> Result<VertexSet> {
    g.check_vertex(v)?;
    let mut bfs = LocalBfs::new(g.vertex_count());
    Ok(bfs.run(g, &[v], r).iter().copied().collect())
}

/// Vertices whose distance to the nearest member of `s` is exactly `i`.
pub fn sphere_of_set(g: &Graph, s: &VertexSet, i: usize) -> Result<VertexSet> {
    if s.is_empty() {
        return invalid("sphere of an empty set");
    }
    g.check_set(s)?;
    let mut bfs = LocalBfs::new(g.vertex_count());
    let visited = bfs.run(g, s.as_slice(), i).to_vec();
    Ok(visited
        .into_iter()
        .filter(|&w| bfs.distance(w) == Some(i))
        .collect())
}

/// Greedy maximal `k`-independent set: scan `order`, keep a vertex when no
/// kept vertex lies within distance `k`. Vertices absent from `order` are
/// never selected.
pub fn max_k_independent(
    g: &Graph,
    k: usize,
    order: impl IntoIterator<Item = usize>,
) -> VertexSet {
    let mut blocked = vec![false; g.vertex_count()];
    let mut chosen = Vec::new();
    let mut bfs = LocalBfs::new(g.vertex_count());
    for v in order {
        if blocked[v] {
            continue;
        }
        chosen.push(v);
        for &w in bfs.run(g, &[v], k) {
            blocked[w] = true;
        }
    }
    chosen.into_iter().collect()
}

/// True iff every two members of `s` are at distance at least `k + 1`.
pub fn is_k_independent(g: &Graph, s: &VertexSet, k: usize) -> bool {
    if s.max().is_some_and(|v| v >= g.vertex_count()) {
        return false;
    }
    let mut bfs = LocalBfs::new(g.vertex_count());
    s.iter()
        .all(|v| bfs.run(g, &[v], k).iter().all(|&w| w == v || !s.contains(w)))
}

/// The square: `u ~ v` iff `1 <= dist(u, v) <= 2`.
pub fn square(g: &Graph) -> Graph {
    let mut mark = vec![usize::MAX; g.vertex_count()];
    let adjacency = g
        .vertices()
        .map(|v| {
            mark[v] = v;
            let mut nb = Vec::new();
            for &u in g.neighbors(v) {
                if mark[u] != v {
                    mark[u] = v;
                    nb.push(u);
                }
                for &w in g.neighbors(u) {
                    if mark[w] != v {
                        mark[w] = v;
                        nb.push(w);
                    }
                }
            }
            nb
        })
        .collect();
    Graph::from_adjacency(adjacency)
}

/// Connected components ordered by their smallest vertex id.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    let mut seen = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in g.vertices() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push(comp.into_iter().collect());
    }
    out
}
