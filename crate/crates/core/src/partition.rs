//! Ordered vertex partitions with bounded back-degree, built from BFS layers
//! around the low-degree vertices and a colouring of the square.

use serde::{Deserialize, Serialize};

use crate::cert::CertReport;
use crate::error::{invalid, Error, Result};
use crate::graph::{bfs_distances, Graph, LocalBfs, VertexSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionParams {
    /// Number of BFS layers.
    pub q: usize,
    pub max_degree: usize,
    pub eps: f64,
    /// Fraction of vertices reserved for the last class.
    pub eps_slot: f64,
}

impl PartitionParams {
    /// `eps_slot = min(1/(2 max_degree), eps/(2 - eps))`.
    pub fn new(q: usize, max_degree: usize, eps: f64) -> Result<Self> {
        if q == 0 {
            return invalid("q must be >= 1");
        }
        if max_degree < 2 {
            return invalid("max degree must be >= 2");
        }
        if !(eps > 0.0 && eps < 1.0) {
            return invalid(format!("epsilon {eps} outside (0, 1)"));
        }
        let eps_slot = (1.0 / (2.0 * max_degree as f64)).min(eps / (2.0 - eps));
        let d = (max_degree - 1) as f64;
        if eps_slot >= 1.0 / (2.0 * d) {
            return invalid("eps_slot must be below 1/(2d)");
        }
        Ok(PartitionParams { q, max_degree, eps, eps_slot })
    }

    /// `q = floor(65/eps log^3 n)`, clamped to `[1, vertex_count]`.
    pub fn asymptotic_defaults(
        n: usize,
        eps: f64,
        max_degree: usize,
        log_base: f64,
        vertex_count: usize,
    ) -> Result<Self> {
        if n < 2 || !(log_base > 1.0) {
            return invalid("need n >= 2 and log base > 1");
        }
        let l = (n as f64).ln() / log_base.ln();
        let raw = (65.0 / eps * l.powi(3)).floor();
        let q = if raw.is_finite() && raw > 0.0 { raw as usize } else { 1 };
        PartitionParams::new(q.clamp(1, vertex_count.max(1)), max_degree, eps)
    }

    pub fn colors(&self) -> usize {
        self.max_degree * self.max_degree + 1
    }

    /// `t = (max_degree^2 + 1) q + 1`.
    pub fn t(&self) -> usize {
        self.colors() * self.q + 1
    }
}

/// Size of the reserved slot: `floor(eps_slot * v)`, with a small tolerance
/// so that products like `0.3 * 10` round as exact rationals would.
pub fn slot_size(eps_slot: f64, v: usize) -> usize {
    (eps_slot * v as f64 + 1e-9).floor() as usize
}

/// Classes `W_0, ..., W_t` over the padded guest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FPartition {
    pub t: usize,
    pub d: usize,
    pub eps_slot: f64,
    pub classes: Vec<VertexSet>,
    /// `layers[i - 1] = S_i`; `S_q` is the low-degree set.
    #[serde(skip)]
    pub layers: Vec<VertexSet>,
    /// Square-colouring classes `L_1, ...`.
    #[serde(skip)]
    pub color_classes: Vec<VertexSet>,
}

impl FPartition {
    pub fn last(&self) -> &VertexSet {
        &self.classes[self.t]
    }

    /// Class index of every vertex.
    pub fn class_of(&self, vertex_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; vertex_count];
        for (i, c) in self.classes.iter().enumerate() {
            for v in c.iter() {
                if v < vertex_count {
                    out[v] = Some(i);
                }
            }
        }
        out
    }

    pub fn nonempty_classes(&self) -> usize {
        self.classes.iter().filter(|c| !c.is_empty()).count()
    }
}

/// Appends isolated vertices up to `target`.
pub fn pad_with_isolated(h2: &Graph, target: usize) -> Result<Graph> {
    if target < h2.vertex_count() {
        return invalid(format!(
            "padding target {target} below vertex count {}",
            h2.vertex_count()
        ));
    }
    Ok(h2.with_isolated(target - h2.vertex_count()))
}

/// Colour per vertex: ascending id, first colour unused within distance 2.
pub fn square_coloring(h: &Graph, k: usize) -> Result<Vec<usize>> {
    let delta = h.max_degree();
    if k < delta * delta + 1 {
        return invalid(format!("{k} colours is fewer than max degree^2 + 1 = {}", delta * delta + 1));
    }
    let mut color = vec![usize::MAX; h.vertex_count()];
    let mut taken = vec![usize::MAX; k];
    for v in h.vertices() {
        for &u in h.neighbors(v) {
            if color[u] != usize::MAX {
                taken[color[u]] = v;
            }
            for &w in h.neighbors(u) {
                if color[w] != usize::MAX {
                    taken[color[w]] = v;
                }
            }
        }
        color[v] = (0..k).find(|&c| taken[c] != v).expect("k exceeds the square degree");
    }
    Ok(color)
}

/// `k` colour classes, each independent in the square of `h`.
pub fn greedy_square_coloring(h: &Graph, k: usize) -> Result<Vec<VertexSet>> {
    let color = square_coloring(h, k)?;
    let mut classes = vec![Vec::new(); k];
    for (v, &c) in color.iter().enumerate() {
        classes[c].push(v);
    }
    Ok(classes.into_iter().map(VertexSet::from_sorted).collect())
}

pub fn build_f_partition(h2p: &Graph, params: &PartitionParams) -> Result<FPartition> {
    let delta = params.max_degree;
    if h2p.max_degree() > delta {
        return invalid(format!("graph max degree {} exceeds {delta}", h2p.max_degree()));
    }
    let v = h2p.vertex_count();
    let q = params.q;
    let t = params.t();

    let slot = slot_size(params.eps_slot, v);
    let w_t: VertexSet = h2p.vertices().filter(|&u| h2p.degree(u) == 0).take(slot).collect();
    if w_t.len() < slot {
        return Err(Error::Capacity { needed: slot, available: w_t.len() });
    }
    let w_0: VertexSet = w_t.iter().flat_map(|u| h2p.neighbors(u).to_vec()).collect();

    let placed = w_t.union(&w_0);
    let s_q: Vec<usize> = h2p
        .vertices()
        .filter(|&u| !placed.contains(u) && h2p.degree(u) < delta)
        .collect();
    let dist = bfs_distances(h2p, &s_q, Some(q - 1));
    let mut layers = vec![Vec::new(); q];
    for u in h2p.vertices().filter(|&u| !placed.contains(u)) {
        match dist[u] {
            Some(i) => layers[q - 1 - i].push(u),
            None => return Err(Error::UnreachableVertex { vertex: u, limit: q - 1 }),
        }
    }

    let colors = params.colors();
    let color = square_coloring(h2p, colors)?;
    let mut classes = vec![Vec::new(); t + 1];
    for (i0, layer) in layers.iter().enumerate() {
        for &u in layer {
            classes[i0 * colors + color[u] + 1].push(u);
        }
    }
    classes[0] = w_0.into_vec();
    classes[t] = w_t.into_vec();

    let mut color_classes = vec![Vec::new(); colors];
    for (u, &c) in color.iter().enumerate() {
        color_classes[c].push(u);
    }
    Ok(FPartition {
        t,
        d: delta - 1,
        eps_slot: params.eps_slot,
        classes: classes.into_iter().map(VertexSet::from_sorted).collect(),
        layers: layers.into_iter().map(VertexSet::from_sorted).collect(),
        color_classes: color_classes.into_iter().map(VertexSet::from_sorted).collect(),
    })
}

/// Checks the partition and properties `(i)`-`(v)` against `h2p`.
pub fn validate_f_partition(h2p: &Graph, part: &FPartition) -> CertReport {
    let mut report = CertReport::default();
    let v = h2p.vertex_count();
    let well_formed = part.classes.len() == part.t + 1 && part.t >= 1;

    report.record("partition", {
        let mut count = vec![0usize; v];
        let mut bad = None;
        if !well_formed {
            bad = Some(format!("{} classes for t = {}", part.classes.len(), part.t));
        }
        for c in &part.classes {
            for u in c.iter() {
                match count.get_mut(u) {
                    Some(k) => *k += 1,
                    None => bad = bad.or(Some(format!("vertex {u} out of range"))),
                }
            }
        }
        if let Some(u) = count.iter().position(|&k| k != 1) {
            bad = bad.or(Some(format!("vertex {u} in {} classes", count[u])));
        }
        bad.map_or(Ok(()), Err)
    });
    if !well_formed {
        return report;
    }
    let last = part.last();
    let in_range = |s: &VertexSet| s.max().is_none_or(|m| m < v);

    report.record("i_slot_size", {
        let want = slot_size(part.eps_slot, v);
        if last.len() == want {
            Ok(())
        } else {
            Err(format!("|W_t| = {}, expected {want}", last.len()))
        }
    });

    report.record("ii_w0_is_neighbourhood", {
        if !in_range(last) {
            Err("W_t out of range".into())
        } else {
            let nb: VertexSet = last.iter().flat_map(|u| h2p.neighbors(u).to_vec()).collect();
            let missing = nb.iter().find(|&u| !part.classes[0].contains(u));
            let extra = part.classes[0].iter().find(|&u| !nb.contains(u));
            match (missing, extra) {
                (Some(u), _) => Err(format!("neighbour {u} of W_t missing from W_0")),
                (None, Some(u)) => Err(format!("W_0 vertex {u} has no neighbour in W_t")),
                (None, None) => Ok(()),
            }
        }
    });

    let mut bfs = LocalBfs::new(v);
    let mut independence = |s: &VertexSet, k: usize| -> std::result::Result<(), String> {
        if !in_range(s) {
            return Err("class out of range".into());
        }
        for a in s.iter() {
            if let Some(&b) = bfs.run(h2p, &[a], k).iter().find(|&&b| b != a && s.contains(b)) {
                return Err(format!("{a} and {b} within distance {k}"));
            }
        }
        Ok(())
    };
    report.record("iii_last_3_independent", independence(last, 3));
    report.record("iv_classes_2_independent", {
        let mut res = Ok(());
        for (i, c) in part.classes.iter().enumerate().take(part.t).skip(1) {
            if let Err(e) = independence(c, 2) {
                res = Err(format!("W_{i}: {e}"));
                break;
            }
        }
        res
    });

    report.record("v_back_degree", {
        let class = part.class_of(v);
        let mut res = Ok(());
        'outer: for (i, c) in part.classes.iter().enumerate().skip(1) {
            for u in c.iter().filter(|&u| u < v) {
                let back = h2p
                    .neighbors(u)
                    .iter()
                    .filter(|&&w| class[w].is_some_and(|j| j < i))
                    .count();
                if back > part.d {
                    res = Err(format!("vertex {u} in W_{i} has {back} earlier neighbours"));
                    break 'outer;
                }
            }
        }
        res
    });
    report
}
