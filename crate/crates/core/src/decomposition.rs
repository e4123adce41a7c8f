//! Guest surgery: drop small components, pick a sparse independent set of
//! the remaining core, and cut one short induced cycle near every chosen
//! vertex that has no low-degree vertex nearby.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cert::CertReport;
use crate::error::{invalid, Error, Result};
use crate::graph::{
    ball, connected_components, max_k_independent, shortest_cycle_through_ball, Cycle, Graph,
    VertexMap, VertexSet,
};
use crate::graph::LocalBfs;

/// Radii and thresholds for the surgery, measured in guest hops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryParams {
    /// Components with fewer vertices are set aside for the last phase.
    pub small_component_threshold: usize,
    /// Members of the independent set are pairwise farther apart than this.
    pub independence_radius: usize,
    /// Radius of the ball searched for a low-degree witness or short cycle.
    pub witness_radius: usize,
    pub max_cycle_length: usize,
    /// Radius of the ball in which removed-cycle neighbourhoods are checked.
    pub eq1_radius: usize,
    /// True when every value is the unclamped asymptotic formula; the
    /// independent-set size bound is then enforced.
    #[serde(default)]
    pub asymptotic_mode: bool,
    #[serde(default)]
    pub independent_set_bound: Option<f64>,
}

fn floor_usize(x: f64) -> usize {
    if x.is_finite() && x > 0.0 {
        x.floor() as usize
    } else {
        0
    }
}

impl SurgeryParams {
    /// Asymptotic defaults for a host on `n` vertices:
    /// `log^4 n`, `64/eps log^3 n`, `log n`, `2 log n`, `3 log n`,
    /// with the component threshold clamped to `n/4` and the independence
    /// radius to `n - 1`.
    pub fn asymptotic_defaults(n: usize, eps: f64, log_base: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return invalid(format!("epsilon {eps} outside (0, 1)"));
        }
        if !(log_base > 1.0) {
            return invalid(format!("log base {log_base} must exceed 1"));
        }
        if n < 2 {
            return invalid("host needs at least 2 vertices");
        }
        let l = (n as f64).ln() / log_base.ln();
        let sigma_raw = floor_usize(l.powi(4));
        let rho_raw = floor_usize(64.0 / eps * l.powi(3));
        let witness_radius = floor_usize(l).max(1);
        let max_cycle_length = floor_usize(2.0 * l).max(3);
        let eq1_radius = floor_usize(3.0 * l).max(witness_radius + 1);

        let sigma = sigma_raw.clamp(1, (n / 4).max(1));
        let rho = rho_raw.min(n - 1).max(2 * eq1_radius).max(2 * witness_radius);
        let asymptotic_mode = sigma == sigma_raw && rho == rho_raw;
        let params = SurgeryParams {
            small_component_threshold: sigma,
            independence_radius: rho,
            witness_radius,
            max_cycle_length,
            eq1_radius,
            asymptotic_mode,
            independent_set_bound: Some(eps * n as f64 / (32.0 * l.powi(3))),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.small_component_threshold == 0 {
            return invalid("small component threshold must be >= 1");
        }
        if self.max_cycle_length < 3 {
            return invalid("max cycle length must be >= 3");
        }
        if self.independence_radius < 2 * self.witness_radius {
            return invalid("independence radius must be at least twice the witness radius");
        }
        if 2 * self.eq1_radius > self.independence_radius {
            return invalid("eq1 radius must be at most half the independence radius");
        }
        if self.eq1_radius <= self.witness_radius {
            return invalid("eq1 radius must exceed the witness radius");
        }
        Ok(())
    }
}

/// Outcome of the local search around a vertex of `H_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// A vertex in the witness ball with degree below the cap.
    LowDegreeWitness(usize),
    ShortCycle(Cycle),
}

/// Components of `h` with at least `sigma` vertices, and the rest.
pub fn split_small_components(h: &Graph, sigma: usize) -> Result<(Graph, VertexMap, Vec<VertexSet>)> {
    if sigma == 0 {
        return invalid("small component threshold must be >= 1");
    }
    let mut large = Vec::new();
    let mut small = Vec::new();
    for comp in connected_components(h) {
        if comp.len() >= sigma {
            large.extend(comp.iter());
        } else {
            small.push(comp);
        }
    }
    let keep: VertexSet = large.into_iter().collect();
    let (h1, map) = h.induced_subgraph(&keep);
    Ok((h1, map, small))
}

/// Low-degree witness in BFS order from `v`, else the shortest cycle in the
/// witness ball.
pub fn classify_vertex(
    h1: &Graph,
    v: usize,
    params: &SurgeryParams,
    max_degree: usize,
) -> Result<Classification> {
    h1.check_vertex(v)?;
    let mut bfs = LocalBfs::new(h1.vertex_count());
    if let Some(&w) = bfs
        .run(h1, &[v], params.witness_radius)
        .iter()
        .find(|&&w| h1.degree(w) < max_degree)
    {
        return Ok(Classification::LowDegreeWitness(w));
    }
    shortest_cycle_through_ball(h1, v, params.witness_radius, params.max_cycle_length)
        .map(Classification::ShortCycle)
        .ok_or(Error::ClaimViolated {
            vertex: v,
            radius: params.witness_radius,
            max_cycle_length: params.max_cycle_length,
        })
}

/// `H_2`: `H_1` minus the vertices of all removed cycles.
pub fn carve_h2(h1: &Graph, cycles: &BTreeMap<usize, Cycle>) -> (Graph, VertexMap) {
    let removed: VertexSet = cycles.values().flat_map(|c| c.vertices().to_vec()).collect();
    h1.delete_vertices(&removed)
        .expect("cycles were found inside h1")
}

/// The surgery record for one guest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovalPlan {
    pub params: SurgeryParams,
    pub max_degree: usize,
    /// Components of `H` below the size threshold, in `H` ids.
    pub small_components: Vec<VertexSet>,
    pub h1: Graph,
    /// `H_1 -> H`
    pub h1_map: VertexMap,
    /// Independent-set members with a low-degree witness (`H_1` ids).
    pub independent_a: VertexSet,
    /// Independent-set members that needed a cycle removed (`H_1` ids).
    pub independent_b: VertexSet,
    /// Removed cycle per member of `independent_b`, in `H_1` ids with the
    /// fixed vertex order.
    pub cycles: BTreeMap<usize, Cycle>,
    pub h2: Graph,
    /// `H_2 -> H_1`
    pub h2_map: VertexMap,
    /// `None` when no bound applies; otherwise whether `|I|` respects it.
    pub independent_set_within_bound: Option<bool>,
}

pub fn build_removal_plan(h: &Graph, params: &SurgeryParams, max_degree: usize) -> Result<RemovalPlan> {
    params.validate()?;
    if h.max_degree() > max_degree {
        return invalid(format!(
            "guest max degree {} exceeds the cap {max_degree}",
            h.max_degree()
        ));
    }
    let (h1, h1_map, small_components) = split_small_components(h, params.small_component_threshold)?;
    let independent = max_k_independent(&h1, params.independence_radius, h1.vertices());

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut cycles = BTreeMap::new();
    for v in independent.iter() {
        match classify_vertex(&h1, v, params, max_degree)? {
            Classification::LowDegreeWitness(_) => a.push(v),
            Classification::ShortCycle(c) => {
                b.push(v);
                cycles.insert(v, c);
            }
        }
    }
    let (h2, h2_map) = carve_h2(&h1, &cycles);

    let within = params
        .independent_set_bound
        .map(|bound| independent.len() as f64 <= bound);
    if params.asymptotic_mode && within == Some(false) {
        return Err(Error::IndependentSetTooLarge {
            size: independent.len(),
            bound: params.independent_set_bound.unwrap_or_default(),
        });
    }

    Ok(RemovalPlan {
        params: params.clone(),
        max_degree,
        small_components,
        h1,
        h1_map,
        independent_a: a.into_iter().collect(),
        independent_b: b.into_iter().collect(),
        cycles,
        h2,
        h2_map,
        independent_set_within_bound: within,
    })
}

impl RemovalPlan {
    pub fn independent_set(&self) -> VertexSet {
        self.independent_a.union(&self.independent_b)
    }

    /// `H_2` id -> `H` id.
    pub fn h2_to_h(&self, v: usize) -> usize {
        self.h1_map.parent(self.h2_map.parent(v))
    }

    /// Vertices of `H_2` in `H` ids.
    pub fn h2_vertices_in_h(&self) -> VertexSet {
        self.h2.vertices().map(|v| self.h2_to_h(v)).collect()
    }

    /// Removed cycles translated to `H` ids, keyed by their centre in `H` ids.
    pub fn cycles_in_h(&self) -> BTreeMap<usize, Cycle> {
        self.cycles
            .iter()
            .map(|(&v, c)| (self.h1_map.parent(v), c.map(|w| self.h1_map.parent(w))))
            .collect()
    }

    /// Low-degree vertices of `H_2` (in `H_2` ids).
    pub fn low_degree_h2(&self) -> VertexSet {
        self.h2
            .vertices()
            .filter(|&w| self.h2.degree(w) < self.max_degree)
            .collect()
    }

    /// Runs every structural check on the plan for guest `h`.
    pub fn certify(&self, h: &Graph) -> CertReport {
        let mut report = CertReport::default();
        report.record("partition", self.check_partition(h));
        report.record("independence", self.check_independence());
        report.record("cycles", self.check_cycles());
        report.record("eq1", self.check_eq1());
        report.record("eq2", self.check_eq2());
        report.record("carved_degrees", self.check_carved_degrees());
        report
    }

    /// `V(H)` is exactly partitioned by small components, `V(H_2)` and the
    /// removed cycles.
    pub fn check_partition(&self, h: &Graph) -> std::result::Result<(), String> {
        let mut owner = vec![0u32; h.vertex_count()];
        let mut bump = |v: usize, what: &str| -> std::result::Result<(), String> {
            if v >= owner.len() {
                return Err(format!("{what} vertex {v} outside H"));
            }
            owner[v] += 1;
            Ok(())
        };
        for comp in &self.small_components {
            for v in comp.iter() {
                bump(v, "small-component")?;
            }
        }
        for v in self.h2.vertices() {
            bump(self.h2_to_h(v), "H_2")?;
        }
        for c in self.cycles.values() {
            for &v in c.vertices() {
                bump(self.h1_map.parent(v), "cycle")?;
            }
        }
        match owner.iter().position(|&k| k != 1) {
            None => Ok(()),
            Some(v) => Err(format!("partition: vertex {v} covered {} times", owner[v])),
        }
    }

    /// `I` is independence-radius independent and maximal in `H_1`.
    pub fn check_independence(&self) -> std::result::Result<(), String> {
        let i = self.independent_set();
        if !self.independent_a.is_disjoint(&self.independent_b) {
            return Err("independence: I_a and I_b overlap".into());
        }
        let rho = self.params.independence_radius;
        let mut bfs = LocalBfs::new(self.h1.vertex_count());
        let mut covered = vec![false; self.h1.vertex_count()];
        for v in i.iter() {
            for &w in bfs.run(&self.h1, &[v], rho) {
                if w != v && i.contains(w) {
                    return Err(format!("independence: {v} and {w} within distance {rho}"));
                }
                covered[w] = true;
            }
        }
        match covered.iter().position(|c| !c) {
            None => Ok(()),
            Some(v) => Err(format!("independence: not maximal, {v} can be added")),
        }
    }

    /// Cycles are induced, of admissible length, inside their witness ball,
    /// and pairwise disjoint.
    pub fn check_cycles(&self) -> std::result::Result<(), String> {
        let mut used = vec![false; self.h1.vertex_count()];
        if self.cycles.keys().copied().collect::<VertexSet>() != self.independent_b {
            return Err("cycles: keys differ from I_b".into());
        }
        for (&v, c) in &self.cycles {
            if c.len() < 3 || c.len() > self.params.max_cycle_length {
                return Err(format!("cycles: C_{v} has length {}", c.len()));
            }
            if !c.is_induced_in(&self.h1) {
                return Err(format!("cycles: C_{v} is not an induced cycle"));
            }
            let ball = ball(&self.h1, v, self.params.witness_radius).map_err(|e| e.to_string())?;
            if !c.vertex_set().is_subset(&ball) {
                return Err(format!("cycles: C_{v} leaves the witness ball"));
            }
            for &w in c.vertices() {
                if std::mem::replace(&mut used[w], true) {
                    return Err(format!("cycles: vertex {w} on two cycles"));
                }
            }
        }
        Ok(())
    }

    /// Around every `v` in `I`, the `eq1_radius` ball loses exactly `C_v`
    /// (nothing for `I_a`) when passing to `H_2`.
    pub fn check_eq1(&self) -> std::result::Result<(), String> {
        let in_h2: Vec<bool> = {
            let mut m = vec![false; self.h1.vertex_count()];
            for v in self.h2.vertices() {
                m[self.h2_map.parent(v)] = true;
            }
            m
        };
        for v in self.independent_set().iter() {
            let b = ball(&self.h1, v, self.params.eq1_radius).map_err(|e| e.to_string())?;
            let kept: VertexSet = b.iter().filter(|&w| in_h2[w]).collect();
            let expected = match self.cycles.get(&v) {
                Some(c) => b.difference(&c.vertex_set()),
                None => b,
            };
            if kept != expected {
                return Err(format!("eq1: ball around {v} intersects H_2 incorrectly"));
            }
        }
        Ok(())
    }

    /// Every `eq1_radius` ball around a member of `I` meets the low-degree
    /// set of `H_2`.
    pub fn check_eq2(&self) -> std::result::Result<(), String> {
        let low: Vec<bool> = {
            let mut m = vec![false; self.h1.vertex_count()];
            for w in self.low_degree_h2().iter() {
                m[self.h2_map.parent(w)] = true;
            }
            m
        };
        let mut bfs = LocalBfs::new(self.h1.vertex_count());
        for v in self.independent_set().iter() {
            if !bfs.run(&self.h1, &[v], self.params.eq1_radius).iter().any(|&w| low[w]) {
                return Err(format!("eq2: no low-degree H_2 vertex near {v}"));
            }
        }
        Ok(())
    }

    /// Vertices of `H_2` that lost a neighbour to a removed cycle have
    /// degree below the cap.
    pub fn check_carved_degrees(&self) -> std::result::Result<(), String> {
        for c in self.cycles.values() {
            for &x in c.vertices() {
                for &w in self.h1.neighbors(x) {
                    if let Some(w2) = self.h2_map.child(w) {
                        if self.h2.degree(w2) + 1 > self.max_degree {
                            return Err(format!("carving: H_1 vertex {w} kept full degree"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
