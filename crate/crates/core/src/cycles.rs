//! Placing removed cycles inside a reserved zone so that every cycle vertex
//! is adjacent to its anchor set, plus small-instance tools for systems of
//! disjoint representatives.

use serde::{Deserialize, Serialize};

use crate::embedding::RetryBudget;
use crate::error::{invalid, Result};
use crate::graph::{Cycle, Graph, VertexSet};

/// One cycle to place: `anchors[j]` must lie in the host neighbourhood of
/// the `j`-th cycle vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRequest {
    pub anchors: Vec<VertexSet>,
}

impl PlacementRequest {
    pub fn new(anchors: Vec<VertexSet>) -> Self {
        PlacementRequest { anchors }
    }

    /// Request with no anchors for a cycle of length `g`.
    pub fn unanchored(g: usize) -> Self {
        PlacementRequest { anchors: vec![VertexSet::new(); g] }
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }
}

/// `{v in zone : w is contained in the host neighbourhood of v}`.
pub fn candidate_anchors(host: &Graph, zone: &VertexSet, w: &VertexSet) -> Result<VertexSet> {
    if !zone.is_disjoint(w) {
        return invalid("anchor set meets the zone");
    }
    Ok(anchor_filter(host, zone, w))
}

fn anchor_filter(host: &Graph, zone: &VertexSet, w: &VertexSet) -> VertexSet {
    match w.iter().min_by_key(|&a| host.degree(a)) {
        None => zone.clone(),
        Some(pivot) => host
            .neighbors(pivot)
            .iter()
            .copied()
            .filter(|&v| zone.contains(v) && w.iter().all(|a| host.has_edge(a, v)))
            .collect(),
    }
}

/// Depth-first search for a cycle `(c_1, ..., c_g)` inside `zone_free` with
/// every `c_j` dominating `anchors[j]`. The search starts at the position
/// with the fewest candidates and walks the cycle from there.
pub fn find_dominating_cycle(
    host: &Graph,
    zone_free: &VertexSet,
    req: &PlacementRequest,
    node_budget: usize,
) -> Option<Cycle> {
    let g = req.len();
    if g < 3 {
        return None;
    }
    let cands: Vec<VertexSet> = req.anchors.iter().map(|w| anchor_filter(host, zone_free, w)).collect();
    let start = (0..g).min_by_key(|&j| cands[j].len())?;
    if cands[start].is_empty() {
        return None;
    }
    let positions: Vec<usize> = (0..g).map(|k| (start + k) % g).collect();
    let mut chosen = vec![usize::MAX; g];
    let mut nodes = 0usize;

    fn dfs(
        host: &Graph,
        cands: &[VertexSet],
        positions: &[usize],
        k: usize,
        chosen: &mut [usize],
        nodes: &mut usize,
        budget: usize,
    ) -> Option<bool> {
        let g = positions.len();
        if k == g {
            return Some(true);
        }
        let pos = positions[k];
        let prev = (k > 0).then(|| chosen[positions[k - 1]]);
        let first = chosen[positions[0]];
        let options: Vec<usize> = match prev {
            None => cands[pos].iter().collect(),
            Some(p) => host
                .neighbors(p)
                .iter()
                .copied()
                .filter(|&x| cands[pos].contains(x))
                .collect(),
        };
        for x in options {
            if chosen.contains(&x) {
                continue;
            }
            if k == g - 1 && !host.has_edge(x, first) {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            chosen[pos] = x;
            if dfs(host, cands, positions, k + 1, chosen, nodes, budget)? {
                return Some(true);
            }
            chosen[pos] = usize::MAX;
        }
        Some(false)
    }

    match dfs(host, &cands, &positions, 0, &mut chosen, &mut nodes, node_budget) {
        Some(true) => Cycle::new(chosen).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementOutcome {
    /// One cycle per request, in request order, on success.
    pub cycles: Option<Vec<Cycle>>,
    pub stuck_request: Option<usize>,
    /// Candidate-set sizes of the stuck request.
    pub stuck_candidates: Vec<usize>,
    pub undos: usize,
    pub reason: Option<String>,
}

impl PlacementOutcome {
    fn failed(stuck: Option<usize>, sizes: Vec<usize>, undos: usize, reason: String) -> Self {
        PlacementOutcome {
            cycles: None,
            stuck_request: stuck,
            stuck_candidates: sizes,
            undos,
            reason: Some(reason),
        }
    }
}

/// Places every request inside `zone` with pairwise disjoint cycles.
/// Requests go hardest first (smallest product of candidate counts); when
/// one cannot be placed, up to `max_cycle_undos` earlier placements are
/// taken back and retried after it.
pub fn place_all_cycles(
    host: &Graph,
    zone: &VertexSet,
    reqs: &[PlacementRequest],
    budget: &RetryBudget,
) -> Result<PlacementOutcome> {
    host.check_set(zone)?;
    let Some(g) = reqs.first().map(PlacementRequest::len) else {
        return Ok(PlacementOutcome {
            cycles: Some(Vec::new()),
            stuck_request: None,
            stuck_candidates: Vec::new(),
            undos: 0,
            reason: None,
        });
    };
    if g < 3 || reqs.iter().any(|r| r.len() != g) {
        return invalid("requests must share one cycle length >= 3");
    }
    for (i, r) in reqs.iter().enumerate() {
        if r.anchors.iter().any(|w| !w.is_disjoint(zone)) {
            return invalid(format!("anchors of request {i} meet the zone"));
        }
    }
    if reqs.len() * g > zone.len() {
        return Ok(PlacementOutcome::failed(
            None,
            Vec::new(),
            0,
            format!("{} cycles of length {g} exceed zone size {}", reqs.len(), zone.len()),
        ));
    }

    let sizes = |r: &PlacementRequest, free: &VertexSet| -> Vec<usize> {
        r.anchors.iter().map(|w| anchor_filter(host, free, w).len()).collect()
    };
    let hardness: Vec<f64> = reqs
        .iter()
        .map(|r| sizes(r, zone).iter().map(|&s| (s as f64).ln()).sum())
        .collect();
    let mut pending: Vec<usize> = (0..reqs.len()).collect();
    pending.sort_by(|&a, &b| hardness[a].total_cmp(&hardness[b]).then(a.cmp(&b)));
    pending.reverse(); // pop from the back

    let mut placed: Vec<(usize, Cycle)> = Vec::new();
    let mut free = zone.clone();
    let mut undos = 0;
    while let Some(i) = pending.pop() {
        match find_dominating_cycle(host, &free, &reqs[i], budget.max_backtrack_nodes) {
            Some(c) => {
                free = free.difference(&c.vertex_set());
                placed.push((i, c));
            }
            None if undos < budget.max_cycle_undos && !placed.is_empty() => {
                let (j, c) = placed.pop().expect("nonempty");
                free = free.union(&c.vertex_set());
                undos += 1;
                // retry i before j
                pending.push(j);
                pending.push(i);
            }
            None => {
                let s = sizes(&reqs[i], &free);
                return Ok(PlacementOutcome::failed(
                    Some(i),
                    s,
                    undos,
                    format!("no dominating {g}-cycle for request {i}"),
                ));
            }
        }
    }
    let mut cycles: Vec<Option<Cycle>> = vec![None; reqs.len()];
    for (i, c) in placed {
        cycles[i] = Some(c);
    }
    let cycles: Vec<Cycle> = cycles.into_iter().map(|c| c.expect("every request placed")).collect();
    verify_placement(host, zone, reqs, &cycles).map_err(crate::error::Error::InvalidInput)?;
    Ok(PlacementOutcome {
        cycles: Some(cycles),
        stuck_request: None,
        stuck_candidates: Vec::new(),
        undos,
        reason: None,
    })
}

/// Re-checks a placement: cycles in the host, inside the zone, pairwise
/// disjoint, and dominating their anchors position by position.
pub fn verify_placement(
    host: &Graph,
    zone: &VertexSet,
    reqs: &[PlacementRequest],
    cycles: &[Cycle],
) -> std::result::Result<(), String> {
    if reqs.len() != cycles.len() {
        return Err(format!("{} cycles for {} requests", cycles.len(), reqs.len()));
    }
    let mut used = VertexSet::new();
    for (i, (r, c)) in reqs.iter().zip(cycles).enumerate() {
        if c.len() != r.len() || !c.is_cycle_in(host) {
            return Err(format!("cycle {i} is not a {}-cycle of the host", r.len()));
        }
        let vs = c.vertex_set();
        if !vs.is_subset(zone) {
            return Err(format!("cycle {i} leaves the zone"));
        }
        if !vs.is_disjoint(&used) {
            return Err(format!("cycle {i} overlaps an earlier cycle"));
        }
        used = used.union(&vs);
        for (j, (&x, w)) in c.vertices().iter().zip(&r.anchors).enumerate() {
            if let Some(a) = w.iter().find(|&a| !host.has_edge(a, x)) {
                return Err(format!("cycle {i} position {j}: host vertex {x} misses anchor {a}"));
            }
        }
    }
    Ok(())
}

/// Hypergraphs over a common ground set whose edges all have `g` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdrInstance {
    pub g: usize,
    pub hypergraphs: Vec<Vec<VertexSet>>,
}

impl SdrInstance {
    pub fn new(g: usize, hypergraphs: Vec<Vec<VertexSet>>) -> Result<Self> {
        for (i, h) in hypergraphs.iter().enumerate() {
            if let Some(e) = h.iter().find(|e| e.len() != g) {
                return invalid(format!("hypergraph {i} has an edge of size {} != {g}", e.len()));
            }
        }
        Ok(SdrInstance { g, hypergraphs })
    }

    pub fn total_edges(&self) -> usize {
        self.hypergraphs.iter().map(Vec::len).sum()
    }

    /// True iff `assignment[i]` indexes an edge of hypergraph `i` and the
    /// chosen edges are pairwise disjoint.
    pub fn is_valid_assignment(&self, assignment: &[usize]) -> bool {
        if assignment.len() != self.hypergraphs.len() {
            return false;
        }
        let mut used = VertexSet::new();
        for (h, &e) in self.hypergraphs.iter().zip(assignment) {
            let Some(edge) = h.get(e) else { return false };
            if !edge.is_disjoint(&used) {
                return false;
            }
            used = used.union(edge);
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdrMode {
    /// Complete enumeration of all edge choices; at most 20 edges in total.
    Exhaustive,
    /// Backtracking over hypergraphs with the fewest edges first.
    GreedyBacktrack { node_budget: Option<usize> },
}

const EXHAUSTIVE_EDGE_CAP: usize = 20;

/// One edge index per hypergraph with the chosen edges pairwise disjoint.
pub fn sdr_solve(inst: &SdrInstance, mode: SdrMode) -> Result<Option<Vec<usize>>> {
    let k = inst.hypergraphs.len();
    if inst.hypergraphs.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    match mode {
        SdrMode::Exhaustive => {
            if inst.total_edges() > EXHAUSTIVE_EDGE_CAP {
                return invalid(format!(
                    "exhaustive mode needs at most {EXHAUSTIVE_EDGE_CAP} edges, got {}",
                    inst.total_edges()
                ));
            }
            let mut idx = vec![0usize; k];
            loop {
                if inst.is_valid_assignment(&idx) {
                    return Ok(Some(idx));
                }
                // odometer increment
                let mut pos = 0;
                loop {
                    if pos == k {
                        return Ok(None);
                    }
                    idx[pos] += 1;
                    if idx[pos] < inst.hypergraphs[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        }
        SdrMode::GreedyBacktrack { node_budget } => {
            let mut order: Vec<usize> = (0..k).collect();
            order.sort_by_key(|&i| (inst.hypergraphs[i].len(), i));
            let mut chosen = vec![usize::MAX; k];
            let mut nodes = 0usize;
            let budget = node_budget.unwrap_or(usize::MAX);

            fn go(
                inst: &SdrInstance,
                order: &[usize],
                k: usize,
                chosen: &mut [usize],
                used: &VertexSet,
                nodes: &mut usize,
                budget: usize,
            ) -> Option<bool> {
                if k == order.len() {
                    return Some(true);
                }
                let i = order[k];
                for (e, edge) in inst.hypergraphs[i].iter().enumerate() {
                    if !edge.is_disjoint(used) {
                        continue;
                    }
                    *nodes += 1;
                    if *nodes > budget {
                        return None;
                    }
                    chosen[i] = e;
                    if go(inst, order, k + 1, chosen, &used.union(edge), nodes, budget)? {
                        return Some(true);
                    }
                }
                Some(false)
            }

            Ok(match go(inst, &order, 0, &mut chosen, &VertexSet::new(), &mut nodes, budget) {
                Some(true) => Some(chosen),
                _ => None,
            })
        }
    }
}

const AH_MAX_HYPERGRAPHS: usize = 12;
const AH_MAX_EDGES: usize = 48;

fn edge_mask(e: &VertexSet) -> Result<u64> {
    let mut m = 0u64;
    for v in e.iter() {
        if v >= 64 {
            return invalid("ground set too large for the condition check");
        }
        m |= 1 << v;
    }
    Ok(m)
}

/// Largest set of pairwise disjoint edges.
fn max_matching(edges: &[u64]) -> usize {
    fn go(edges: &[u64], used: u64, best: &mut usize, size: usize) {
        if size + edges.len() <= *best {
            return;
        }
        let Some((&e, rest)) = edges.split_first() else {
            *best = size;
            return;
        };
        if e & used == 0 {
            go(rest, used | e, best, size + 1);
        }
        go(rest, used, best, size);
    }
    let mut best = 0;
    go(edges, 0, &mut best, 0);
    best
}

/// For every nonempty set `I` of hypergraph indices, the union of their edge
/// sets has a matching larger than `g (|I| - 1)`.
pub fn check_ah_condition(inst: &SdrInstance, g: usize) -> Result<bool> {
    let k = inst.hypergraphs.len();
    if k > AH_MAX_HYPERGRAPHS || inst.total_edges() > AH_MAX_EDGES {
        return invalid(format!(
            "condition check limited to {AH_MAX_HYPERGRAPHS} hypergraphs and {AH_MAX_EDGES} edges"
        ));
    }
    let masks: Vec<Vec<u64>> = inst
        .hypergraphs
        .iter()
        .map(|h| h.iter().map(edge_mask).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for subset in 1u32..(1 << k) {
        let mut union: Vec<u64> = (0..k)
            .filter(|&i| subset & (1 << i) != 0)
            .flat_map(|i| masks[i].iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        let size = subset.count_ones() as usize;
        if max_matching(&union) <= g * (size - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn candidate_anchor_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(candidate_anchors(&k4, &set(&[0, 1]), &VertexSet::new()).unwrap(), set(&[0, 1]));
        let star = Graph::star(4);
        assert_eq!(candidate_anchors(&star, &set(&[0]), &set(&[1, 2])).unwrap(), set(&[0]));
        let w: VertexSet = (1..5).collect();
        assert!(candidate_anchors(&Graph::cycle(8), &set(&[0, 5, 6]), &w).unwrap().is_empty());
        assert!(candidate_anchors(&k4, &set(&[0, 1]), &set(&[1])).is_err());
    }

    #[test]
    fn dominating_cycle_examples() {
        let host = Graph::complete(6);
        let c = find_dominating_cycle(&host, &VertexSet::range(0, 6), &PlacementRequest::unanchored(3), 1000).unwrap();
        assert_eq!(c.vertices(), &[0, 1, 2]);

        // anchors 6, 7, 8 each see exactly one zone vertex; those form a triangle
        let mut edges = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (0, 3)];
        edges.extend([(6, 2), (7, 0), (8, 1)]);
        let host = Graph::from_edges(9, edges).unwrap();
        let req = PlacementRequest::new(vec![set(&[6]), set(&[7]), set(&[8])]);
        let c = find_dominating_cycle(&host, &VertexSet::range(0, 6), &req, 1000).unwrap();
        assert_eq!(c.vertices(), &[2, 0, 1]);

        let req = PlacementRequest::new(vec![set(&[6, 7]), VertexSet::new(), VertexSet::new()]);
        assert!(find_dominating_cycle(&host, &VertexSet::range(0, 6), &req, 1000).is_none());
    }

    #[test]
    fn placement_examples() {
        let b = RetryBudget::default();
        let out = place_all_cycles(&Graph::complete(4), &VertexSet::range(0, 4), &[], &b).unwrap();
        assert_eq!(out.cycles, Some(vec![]));

        let k6 = Graph::complete(6);
        let out = place_all_cycles(&k6, &VertexSet::range(0, 6), &[PlacementRequest::unanchored(3)], &b).unwrap();
        assert_eq!(out.cycles.unwrap().len(), 1);

        let k10 = Graph::complete(10);
        let reqs = vec![PlacementRequest::unanchored(3), PlacementRequest::unanchored(3)];
        let cycles = place_all_cycles(&k10, &VertexSet::range(0, 10), &reqs, &b).unwrap().cycles.unwrap();
        assert!(cycles[0].vertex_set().is_disjoint(&cycles[1].vertex_set()));
        assert!(verify_placement(&k10, &VertexSet::range(0, 10), &reqs, &cycles).is_ok());
    }

    #[test]
    fn undo_unblocks_later_request() {
        // triangles {0,1,2}, {2,3,4}, {4,5,6}; the anchored request first grabs
        // {2,3,4}, which leaves no triangle for the unanchored one
        let edges = [
            (0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5), (5, 6), (4, 6),
            (9, 2), (9, 4), (10, 3), (10, 5), (11, 4), (11, 6),
        ];
        let host = Graph::from_edges(12, edges).unwrap();
        let zone = VertexSet::range(0, 7);
        let reqs = vec![
            PlacementRequest::unanchored(3),
            PlacementRequest::new(vec![set(&[9]), set(&[10]), set(&[11])]),
        ];
        let out = place_all_cycles(&host, &zone, &reqs, &RetryBudget::default()).unwrap();
        assert_eq!(out.undos, 1);
        let cycles = out.cycles.expect("placement succeeds");
        assert_eq!(cycles[1].vertices(), &[4, 5, 6]);
        assert!(verify_placement(&host, &zone, &reqs, &cycles).is_ok());

        let none = RetryBudget { max_cycle_undos: 0, ..RetryBudget::default() };
        let out = place_all_cycles(&host, &zone, &reqs, &none).unwrap();
        assert_eq!(out.stuck_request, Some(0));
    }

    #[test]
    fn placement_failure_is_reported() {
        let host = Graph::path(6);
        let out = place_all_cycles(&host, &VertexSet::range(0, 6), &[PlacementRequest::unanchored(3)], &RetryBudget::default())
            .unwrap();
        assert!(out.cycles.is_none());
        assert_eq!(out.stuck_request, Some(0));
        let out = place_all_cycles(
            &Graph::complete(5),
            &VertexSet::range(0, 5),
            &[PlacementRequest::unanchored(3), PlacementRequest::unanchored(3)],
            &RetryBudget::default(),
        )
        .unwrap();
        assert!(out.cycles.is_none() && out.reason.is_some());
    }

    #[test]
    fn sdr_examples() {
        let e = |a: usize, b: usize| set(&[a, b]);
        let inst = SdrInstance::new(2, vec![vec![e(1, 2)], vec![e(3, 4)]]).unwrap();
        for mode in [SdrMode::Exhaustive, SdrMode::GreedyBacktrack { node_budget: None }] {
            assert_eq!(sdr_solve(&inst, mode).unwrap(), Some(vec![0, 0]));
        }
        let clash = SdrInstance::new(2, vec![vec![e(1, 2)], vec![e(1, 2)]]).unwrap();
        assert_eq!(sdr_solve(&clash, SdrMode::Exhaustive).unwrap(), None);
        let forced = SdrInstance::new(2, vec![vec![e(1, 2), e(3, 4)], vec![e(1, 2)]]).unwrap();
        assert_eq!(sdr_solve(&forced, SdrMode::Exhaustive).unwrap(), Some(vec![1, 0]));
        assert_eq!(
            sdr_solve(&forced, SdrMode::GreedyBacktrack { node_budget: None }).unwrap(),
            Some(vec![1, 0])
        );
        assert!(SdrInstance::new(2, vec![vec![set(&[1])]]).is_err());
        let big = SdrInstance::new(1, vec![(0..21).map(|v| set(&[v])).collect()]).unwrap();
        assert!(sdr_solve(&big, SdrMode::Exhaustive).is_err());
    }

    #[test]
    fn ah_examples() {
        let single = SdrInstance::new(2, vec![vec![set(&[0, 1])]]).unwrap();
        assert!(check_ah_condition(&single, 5).unwrap());
        let twin = SdrInstance::new(2, vec![vec![set(&[1, 2])], vec![set(&[1, 2])]]).unwrap();
        assert!(!check_ah_condition(&twin, 2).unwrap());
        let apart = SdrInstance::new(1, vec![vec![set(&[1])], vec![set(&[3])]]).unwrap();
        assert!(check_ah_condition(&apart, 1).unwrap());
        let apart2 = SdrInstance::new(2, vec![vec![set(&[1, 2])], vec![set(&[3, 4])]]).unwrap();
        assert!(!check_ah_condition(&apart2, 2).unwrap());
    }

    #[test]
    fn matching_brute_force() {
        assert_eq!(max_matching(&[0b11, 0b110, 0b1100]), 2);
        assert_eq!(max_matching(&[]), 0);
    }
}
