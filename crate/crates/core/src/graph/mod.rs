//! Undirected simple graphs with dense vertex ids, plus the distance,
//! independence and short-cycle primitives the embedding pipeline is built on.

mod cycle;
mod distance;
mod io;

pub use cycle::{shortest_cycle_through_ball, Cycle};
pub use distance::{
    ball, bfs_distances, connected_components, is_k_independent, max_k_independent, sphere,
    sphere_of_set, square,
};
pub(crate) use distance::LocalBfs;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Set of vertex ids, stored sorted and deduplicated so that iteration is
/// always in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    /// Membership from a boolean mask indexed by vertex id.
    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &m)| m.then_some(v))
                .collect(),
        )
    }

    pub fn range(lo: usize, hi: usize) -> Self {
        VertexSet((lo..hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut ids: Vec<usize> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Id translation between a graph and an induced subgraph of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMap {
    /// `to_parent[new] = old`
    pub to_parent: Vec<usize>,
    /// `from_parent[old] = Some(new)` for survivors.
    pub from_parent: Vec<Option<usize>>,
}

impl VertexMap {
    pub fn identity(n: usize) -> Self {
        VertexMap {
            to_parent: (0..n).collect(),
            from_parent: (0..n).map(Some).collect(),
        }
    }

    pub fn parent(&self, v: usize) -> usize {
        self.to_parent[v]
    }

    pub fn child(&self, old: usize) -> Option<usize> {
        self.from_parent.get(old).copied().flatten()
    }

    /// `self` maps C -> B, `outer` maps B -> A; the result maps C -> A.
    pub fn compose(&self, outer: &VertexMap) -> VertexMap {
        let to_parent: Vec<usize> = self.to_parent.iter().map(|&b| outer.to_parent[b]).collect();
        let mut from_parent = vec![None; outer.from_parent.len()];
        for (c, &a) in to_parent.iter().enumerate() {
            from_parent[a] = Some(c);
        }
        VertexMap {
            to_parent,
            from_parent,
        }
    }

    pub fn lift(&self, set: &VertexSet) -> VertexSet {
        set.iter().map(|v| self.to_parent[v]).collect()
    }
}

/// Undirected simple graph on vertices `0..vertex_count` with sorted
/// adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "io::EdgeList", try_from = "io::EdgeList")]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        vertex_count: n,
                    });
                }
            }
            if u == v {
                return invalid(format!("self-loop at vertex {u}"));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_count = 0;
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return invalid(format!("duplicate edge {{{u}, {}}}", w[0]));
            }
            edge_count += list.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: edge_count / 2,
        })
    }

    /// Builds from per-vertex neighbor lists that are already symmetric and
    /// loop-free; lists are sorted here.
    pub(crate) fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut total = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            total += list.len();
        }
        Graph {
            adjacency,
            edge_count: total / 2,
        }
    }

    pub fn path(n: usize) -> Self {
        Self::from_adjacency(
            (0..n)
                .map(|v| {
                    let mut nb = Vec::new();
                    if v > 0 {
                        nb.push(v - 1);
                    }
                    if v + 1 < n {
                        nb.push(v + 1);
                    }
                    nb
                })
                .collect(),
        )
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::from_adjacency(
            (0..n)
                .map(|v| vec![(v + n - 1) % n, (v + 1) % n])
                .collect(),
        )
    }

    pub fn complete(n: usize) -> Self {
        Self::from_adjacency(
            (0..n)
                .map(|v| (0..n).filter(|&w| w != v).collect())
                .collect(),
        )
    }

    pub fn star(leaves: usize) -> Self {
        let mut adjacency = vec![Vec::new(); leaves + 1];
        for leaf in 1..=leaves {
            adjacency[0].push(leaf);
            adjacency[leaf].push(0);
        }
        Self::from_adjacency(adjacency)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|nb| nb.iter().map(|&w| w + shift).collect()),
        );
        Graph {
            adjacency,
            edge_count: self.edge_count + other.edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.vertex_count()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count(),
            })
        }
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.max() {
            Some(v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    /// Adds `extra` isolated vertices at the end.
    pub fn with_isolated(&self, extra: usize) -> Graph {
        let mut adjacency = self.adjacency.clone();
        adjacency.resize(self.vertex_count() + extra, Vec::new());
        Graph {
            adjacency,
            edge_count: self.edge_count,
        }
    }

    /// Subgraph induced on `keep`, re-indexed densely in ascending id order.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> (Graph, VertexMap) {
        let mut from_parent = vec![None; self.vertex_count()];
        for (new, old) in keep.iter().enumerate() {
            from_parent[old] = Some(new);
        }
        let adjacency = keep
            .iter()
            .map(|old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|&w| from_parent[w])
                    .collect()
            })
            .collect();
        (
            Graph::from_adjacency(adjacency),
            VertexMap {
                to_parent: keep.as_slice().to_vec(),
                from_parent,
            },
        )
    }

    /// Removes `s` and re-indexes the survivors.
    pub fn delete_vertices(&self, s: &VertexSet) -> Result<(Graph, VertexMap)> {
        self.check_set(s)?;
        let mask = s.to_mask(self.vertex_count());
        let keep = self.vertices().filter(|&v| !mask[v]).collect();
        Ok(self.induced_subgraph(&VertexSet::from_sorted(keep)))
    }
}
