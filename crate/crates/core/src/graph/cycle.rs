use serde::{Deserialize, Serialize};

use super::distance::LocalBfs;
use super::{Graph, VertexSet};
use crate::error::{invalid, Result};

/// A cycle given by its vertex order `(c_1, ..., c_g)`; `c_g` closes back to `c_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cycle(Vec<usize>);

impl Cycle {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 3 {
            return invalid(format!("cycle of length {} < 3", vertices.len()));
        }
        let set: VertexSet = vertices.iter().copied().collect();
        if set.len() != vertices.len() {
            return invalid("cycle repeats a vertex");
        }
        Ok(Cycle(vertices))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.0.iter().copied().collect()
    }

    /// Consecutive pairs, including the closing pair `(c_g, c_1)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let g = self.0.len();
        (0..g).map(move |j| (self.0[j], self.0[(j + 1) % g]))
    }

    pub fn is_cycle_in(&self, g: &Graph) -> bool {
        self.0.iter().all(|&v| v < g.vertex_count()) && self.edges().all(|(a, b)| g.has_edge(a, b))
    }

    /// No chords: the only edges among cycle vertices are the cycle edges.
    pub fn is_induced_in(&self, g: &Graph) -> bool {
        if !self.is_cycle_in(g) {
            return false;
        }
        let set = self.vertex_set();
        let inside: usize = self
            .0
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&w| set.contains(w)).count())
            .sum();
        inside == 2 * self.0.len()
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> Cycle {
        Cycle(self.0.iter().map(|&v| f(v)).collect())
    }
}

/// Length of the shortest cycle in `g`, if one of length `<= l_max` exists.
fn bounded_girth(g: &Graph, l_max: usize) -> Option<usize> {
    let n = g.vertex_count();
    let mut best = l_max + 1;
    let mut depth = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    let mut touched = Vec::new();
    for root in g.vertices() {
        for &t in &touched {
            depth[t] = usize::MAX;
        }
        touched.clear();
        queue.clear();
        depth[root] = 0;
        parent[root] = usize::MAX;
        touched.push(root);
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * depth[u] + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(depth[u] + depth[w] + 1);
                    if 2 * depth[u] + 1 >= best {
                        break 'bfs;
                    }
                }
            }
        }
    }
    (best <= l_max).then_some(best)
}

/// All `len`-cycles whose smallest vertex is `s`, as paths `s, x_1, ..., x_{len-1}`.
fn cycles_from_min_vertex(g: &Graph, s: usize, len: usize) -> Vec<Vec<usize>> {
    // distances from s within the vertices > s
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([s]);
    dist[s] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if w > s && dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }

    let mut found = Vec::new();
    let mut path = vec![s];
    let mut on_path = vec![false; n];
    on_path[s] = true;

    fn extend(
        g: &Graph,
        s: usize,
        len: usize,
        dist: &[usize],
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        found: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        if path.len() == len {
            if g.has_edge(last, s) && path[1] < path[len - 1] {
                found.push(path.clone());
            }
            return;
        }
        let remaining = len - path.len();
        for &w in g.neighbors(last) {
            if w <= s || on_path[w] || dist[w] > remaining {
                continue;
            }
            path.push(w);
            on_path[w] = true;
            extend(g, s, len, dist, path, on_path, found);
            on_path[w] = false;
            path.pop();
        }
    }

    extend(g, s, len, &dist, &mut path, &mut on_path, &mut found);
    found
}

/// Shortest cycle in the subgraph induced by the radius-`r` ball around `v`,
/// provided its length is at most `l_max`.
///
/// Among shortest cycles the one with the lexicographically smallest sorted
/// vertex list wins; it is reported starting at its smallest vertex and
/// heading toward the smaller of that vertex's two cycle neighbours.
pub fn shortest_cycle_through_ball(g: &Graph, v: usize, r: usize, l_max: usize) -> Option<Cycle> {
    if l_max < 3 || v >= g.vertex_count() {
        return None;
    }
    let mut bfs = LocalBfs::new(g.vertex_count());
    let ball: VertexSet = bfs.run(g, &[v], r).iter().copied().collect();
    let (local, map) = g.induced_subgraph(&ball);
    let girth = bounded_girth(&local, l_max)?;

    // local ids preserve the order of the original ids
    for s in local.vertices() {
        let mut cycles = cycles_from_min_vertex(&local, s, girth);
        if cycles.is_empty() {
            continue;
        }
        cycles.sort_by_cached_key(|c| {
            let mut key = c.clone();
            key.sort_unstable();
            key
        });
        let best = cycles.swap_remove(0);
        return Some(Cycle(best.into_iter().map(|w| map.parent(w)).collect()));
    }
    unreachable!("bounded_girth found a cycle that enumeration missed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_in_k4() {
        let c = shortest_cycle_through_ball(&Graph::complete(4), 0, 1, 3).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2]);
        assert!(c.is_induced_in(&Graph::complete(4)));
    }

    #[test]
    fn trees_have_no_cycles() {
        assert!(shortest_cycle_through_ball(&Graph::path(20), 5, 10, 20).is_none());
        assert!(shortest_cycle_through_ball(&Graph::star(6), 0, 3, 20).is_none());
    }

    #[test]
    fn c6_needs_length_six() {
        let c6 = Graph::cycle(6);
        assert!(shortest_cycle_through_ball(&c6, 0, 3, 5).is_none());
        let c = shortest_cycle_through_ball(&c6, 0, 3, 6).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn ball_restriction_hides_far_cycles() {
        // a triangle hanging off the end of a path: 0-1-2-3, triangle on 3,4,5
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(shortest_cycle_through_ball(&g, 0, 2, 10).is_none());
        // radius 3 reaches vertex 3 only: the triangle is not induced in the ball
        assert!(shortest_cycle_through_ball(&g, 0, 3, 10).is_none());
        let c = shortest_cycle_through_ball(&g, 0, 4, 10).unwrap();
        assert_eq!(c.vertices(), &[3, 4, 5]);
    }

    #[test]
    fn orientation_toward_smaller_neighbour() {
        // 4-cycle 2-7-3-9-2 with other labels
        let g = Graph::from_edges(10, [(2, 9), (9, 3), (3, 7), (7, 2)]).unwrap();
        let c = shortest_cycle_through_ball(&g, 3, 2, 4).unwrap();
        assert_eq!(c.vertices(), &[2, 7, 3, 9]);
    }

    #[test]
    fn cycle_validation() {
        assert!(Cycle::new(vec![0, 1]).is_err());
        assert!(Cycle::new(vec![0, 1, 0]).is_err());
        let c = Cycle::new(vec![0, 1, 2, 3]).unwrap();
        assert!(c.is_cycle_in(&Graph::complete(4)));
        assert!(!c.is_induced_in(&Graph::complete(4)));
        assert!(c.is_induced_in(&Graph::cycle(4)));
    }
}
