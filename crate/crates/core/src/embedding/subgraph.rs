use super::{EmbeddingMap, RetryBudget};
use crate::graph::{connected_components, Graph, VertexSet};

/// Pattern vertices ordered so each one, after the first of its component,
/// has as many earlier neighbours as possible; ties go to higher degree.
fn search_order(pattern: &Graph) -> Vec<usize> {
    let n = pattern.vertex_count();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let u = (0..n)
            .filter(|&u| !placed[u])
            .max_by_key(|&u| (links[u], pattern.degree(u), std::cmp::Reverse(u)))
            .expect("vertices remain");
        placed[u] = true;
        order.push(u);
        for &w in pattern.neighbors(u) {
            links[w] += 1;
        }
    }
    order
}

struct Search<'a> {
    host: &'a Graph,
    pattern: &'a Graph,
    allowed: &'a [bool],
    used: &'a mut [bool],
    /// Allowed host vertices by descending degree, for unanchored picks.
    roots: &'a [usize],
    order: Vec<usize>,
    assign: Vec<Option<usize>>,
    nodes: usize,
    node_budget: usize,
}

impl Search<'_> {
    fn images_of_neighbours(&self, u: usize) -> Vec<usize> {
        self.pattern.neighbors(u).iter().filter_map(|&w| self.assign[w]).collect()
    }

    fn candidates(&self, anchors: &[usize]) -> Vec<usize> {
        let ok = |x: usize| self.allowed[x] && !self.used[x];
        match anchors.iter().min_by_key(|&&a| self.host.degree(a)) {
            None => self.roots.iter().copied().filter(|&x| ok(x)).collect(),
            Some(&pivot) => {
                let mut c: Vec<usize> = self
                    .host
                    .neighbors(pivot)
                    .iter()
                    .copied()
                    .filter(|&x| ok(x) && anchors.iter().all(|&a| self.host.has_edge(a, x)))
                    .collect();
                c.sort_by_key(|&x| (std::cmp::Reverse(self.host.degree(x)), x));
                c
            }
        }
    }

    fn has_candidate(&self, anchors: &[usize]) -> bool {
        match anchors.iter().min_by_key(|&&a| self.host.degree(a)) {
            None => true,
            Some(&pivot) => self.host.neighbors(pivot).iter().any(|&x| {
                self.allowed[x] && !self.used[x] && anchors.iter().all(|&a| self.host.has_edge(a, x))
            }),
        }
    }

    /// `None` when the node budget ran out.
    fn extend(&mut self, k: usize) -> Option<bool> {
        if k == self.order.len() {
            return Some(true);
        }
        let u = self.order[k];
        let anchors = self.images_of_neighbours(u);
        for x in self.candidates(&anchors) {
            self.nodes += 1;
            if self.nodes > self.node_budget {
                return None;
            }
            self.assign[u] = Some(x);
            self.used[x] = true;
            let viable = self.pattern.neighbors(u).iter().all(|&w| {
                self.assign[w].is_some() || self.has_candidate(&self.images_of_neighbours(w))
            });
            if viable && self.extend(k + 1)? {
                return Some(true);
            }
            self.used[x] = false;
            self.assign[u] = None;
        }
        Some(false)
    }
}

fn search(
    host: &Graph,
    allowed: &[bool],
    used: &mut [bool],
    roots: &[usize],
    pattern: &Graph,
    node_budget: usize,
) -> Option<Vec<usize>> {
    let mut s = Search {
        host,
        pattern,
        allowed,
        used,
        roots,
        order: search_order(pattern),
        assign: vec![None; pattern.vertex_count()],
        nodes: 0,
        node_budget,
    };
    match s.extend(0) {
        Some(true) => Some(s.assign.into_iter().map(|x| x.expect("complete")).collect()),
        _ => None,
    }
}

fn sorted_roots(host: &Graph, allowed: &VertexSet) -> Vec<usize> {
    let mut roots: Vec<usize> = allowed.iter().collect();
    roots.sort_by_key(|&x| (std::cmp::Reverse(host.degree(x)), x));
    roots
}

/// Backtracking search for a copy of `pattern` inside `allowed`.
pub fn find_subgraph(host: &Graph, allowed: &VertexSet, pattern: &Graph, budget: &RetryBudget) -> Option<EmbeddingMap> {
    if allowed.max().is_some_and(|m| m >= host.vertex_count()) {
        return None;
    }
    let mut mask = vec![false; host.vertex_count()];
    for x in allowed.iter() {
        mask[x] = true;
    }
    let mut used = vec![false; host.vertex_count()];
    let roots = sorted_roots(host, allowed);
    let a = search(host, &mask, &mut used, &roots, pattern, budget.max_backtrack_nodes)?;
    EmbeddingMap::from_forward(a.into_iter().map(Some).collect(), host.vertex_count()).ok()
}

/// Embeds `comps` one after another, largest first, each into the vertices
/// of `free` not taken by earlier ones. Guest ids of the result run through
/// the components in the given order.
pub fn embed_small_components(
    host: &Graph,
    free: &VertexSet,
    comps: &[Graph],
    budget: &RetryBudget,
) -> Option<EmbeddingMap> {
    if free.max().is_some_and(|m| m >= host.vertex_count()) {
        return None;
    }
    let mut offsets = Vec::with_capacity(comps.len());
    let mut total = 0;
    for c in comps {
        offsets.push(total);
        total += c.vertex_count();
    }
    if total > free.len() {
        return None;
    }
    let mut mask = vec![false; host.vertex_count()];
    for x in free.iter() {
        mask[x] = true;
    }
    let mut used = vec![false; host.vertex_count()];
    let roots = sorted_roots(host, free);
    let mut by_size: Vec<usize> = (0..comps.len()).collect();
    by_size.sort_by_key(|&i| std::cmp::Reverse(comps[i].vertex_count()));

    let mut f = EmbeddingMap::new(total, host.vertex_count());
    for i in by_size {
        // components of a disconnected pattern are searched separately
        for part in connected_components(&comps[i]) {
            let (sub, map) = comps[i].induced_subgraph(&part);
            let a = search(host, &mask, &mut used, &roots, &sub, budget.max_backtrack_nodes)?;
            for (local, x) in a.into_iter().enumerate() {
                f.insert(offsets[i] + map.parent(local), x).ok()?;
            }
        }
    }
    Some(f)
}
