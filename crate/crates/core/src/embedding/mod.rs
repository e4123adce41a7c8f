//! Host zones, the class-ordered core embedder, backtracking search for
//! small components, and the three-phase pipeline.

mod partitioned;
mod pipeline;
mod subgraph;
mod zones;

pub use partitioned::{embed_partitioned, PartitionedOutcome, PartitionedStats};
pub use pipeline::{run_pipeline, Outcome, PhaseStats, PipelineConfig, PipelineResult, PlacedCycle};
pub use subgraph::{embed_small_components, find_subgraph};
pub use zones::{layout_zones, ZoneLayout};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{Graph, VertexSet};

/// Search limits. Exhausting any of them ends the attempt with a failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryBudget {
    /// Full restarts of the core embedder after a class cannot be matched.
    pub max_restarts: usize,
    /// Class matchings across all attempts.
    pub max_matchings: usize,
    /// Search nodes per backtracking call.
    pub max_backtrack_nodes: usize,
    /// Placed cycles that may be undone to unblock a later request.
    pub max_cycle_undos: usize,
    /// Optional wall-clock cap; off by default since it makes results
    /// depend on machine speed.
    pub wall_clock_ms: Option<u64>,
}

impl Default for RetryBudget {
    fn default() -> Self {
        RetryBudget {
            max_restarts: 8,
            max_matchings: 1_000_000,
            max_backtrack_nodes: 200_000,
            max_cycle_undos: 4,
            wall_clock_ms: None,
        }
    }
}

/// Injective partial map from guest vertices to host vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingMap {
    forward: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
    len: usize,
}

impl EmbeddingMap {
    pub fn new(guest_count: usize, host_count: usize) -> Self {
        EmbeddingMap {
            forward: vec![None; guest_count],
            inverse: vec![None; host_count],
            len: 0,
        }
    }

    /// Builds a map from `forward[g] = host`, rejecting collisions.
    pub fn from_forward(forward: Vec<Option<usize>>, host_count: usize) -> Result<Self> {
        let mut map = EmbeddingMap::new(forward.len(), host_count);
        for (g, h) in forward.into_iter().enumerate() {
            if let Some(h) = h {
                map.insert(g, h)?;
            }
        }
        Ok(map)
    }

    pub fn insert(&mut self, g: usize, h: usize) -> Result<()> {
        if g >= self.forward.len() {
            return Err(Error::VertexOutOfRange { vertex: g, vertex_count: self.forward.len() });
        }
        if h >= self.inverse.len() {
            return Err(Error::VertexOutOfRange { vertex: h, vertex_count: self.inverse.len() });
        }
        if self.forward[g].is_some() {
            return invalid(format!("guest vertex {g} already mapped"));
        }
        if let Some(other) = self.inverse[h] {
            return invalid(format!("host vertex {h} already holds guest vertex {other}"));
        }
        self.forward[g] = Some(h);
        self.inverse[h] = Some(g);
        self.len += 1;
        Ok(())
    }

    pub fn remove(&mut self, g: usize) -> Option<usize> {
        let h = self.forward.get_mut(g)?.take()?;
        self.inverse[h] = None;
        self.len -= 1;
        Some(h)
    }

    pub fn get(&self, g: usize) -> Option<usize> {
        self.forward.get(g).copied().flatten()
    }

    pub fn preimage(&self, h: usize) -> Option<usize> {
        self.inverse.get(h).copied().flatten()
    }

    pub fn is_used(&self, h: usize) -> bool {
        self.preimage(h).is_some()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn guest_count(&self) -> usize {
        self.forward.len()
    }

    pub fn host_count(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_total(&self) -> bool {
        self.len == self.forward.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().enumerate().filter_map(|(g, h)| h.map(|h| (g, h)))
    }

    pub fn image(&self) -> VertexSet {
        self.iter().map(|(_, h)| h).collect()
    }

    pub fn as_forward(&self) -> &[Option<usize>] {
        &self.forward
    }

    /// `forward` as a plain array when every guest vertex is mapped.
    pub fn to_total(&self) -> Option<Vec<usize>> {
        self.forward.iter().copied().collect()
    }
}

/// True iff `assignment` is injective, inside the host, and sends every
/// guest edge to a host edge.
pub fn validate_assignment(host: &Graph, guest: &Graph, assignment: &[usize]) -> bool {
    if assignment.len() != guest.vertex_count() {
        return false;
    }
    let mut used = vec![false; host.vertex_count()];
    for &h in assignment {
        if h >= host.vertex_count() || std::mem::replace(&mut used[h], true) {
            return false;
        }
    }
    guest.edges().all(|(a, b)| host.has_edge(assignment[a], assignment[b]))
}

/// Certifies a total map; a partial map is an input error.
pub fn validate_embedding(host: &Graph, guest: &Graph, f: &EmbeddingMap) -> Result<bool> {
    if f.guest_count() != guest.vertex_count() {
        return invalid(format!(
            "map covers {} guest vertices, guest has {}",
            f.guest_count(),
            guest.vertex_count()
        ));
    }
    match f.to_total() {
        Some(a) => Ok(validate_assignment(host, guest, &a)),
        None => invalid("embedding map is partial"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_bookkeeping() {
        let mut f = EmbeddingMap::new(3, 5);
        f.insert(0, 4).unwrap();
        assert!(f.insert(1, 4).is_err());
        assert!(f.insert(0, 2).is_err());
        f.insert(1, 2).unwrap();
        assert_eq!(f.preimage(4), Some(0));
        assert_eq!(f.len(), 2);
        assert!(!f.is_total());
        assert_eq!(f.remove(0), Some(4));
        assert!(!f.is_used(4));
        assert!(EmbeddingMap::from_forward(vec![Some(1), Some(1)], 3).is_err());
    }

    #[test]
    fn validation_examples() {
        let host = Graph::complete(5);
        let guest = Graph::path(4);
        let id = EmbeddingMap::from_forward((0..4).map(Some).collect(), 5).unwrap();
        assert!(validate_embedding(&host, &guest, &id).unwrap());
        // collapsing an edge
        assert!(!validate_assignment(&host, &guest, &[0, 0, 1, 2]));
        // P_3 onto a non-adjacent pair
        let sparse = Graph::path(5);
        assert!(!validate_assignment(&sparse, &Graph::path(3), &[0, 1, 3]));
        let partial = EmbeddingMap::new(4, 5);
        assert!(validate_embedding(&host, &guest, &partial).is_err());
    }
}
