use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    embed_partitioned, embed_small_components, layout_zones, validate_embedding, EmbeddingMap,
    RetryBudget, ZoneLayout,
};
use crate::cycles::{place_all_cycles, PlacementRequest};
use crate::decomposition::{build_removal_plan, SurgeryParams};
use crate::error::Error;
use crate::graph::{Cycle, Graph, VertexSet};
use crate::partition::{build_f_partition, pad_with_isolated, PartitionParams};
use crate::rng::Seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub max_degree: usize,
    pub eps: f64,
    pub log_base: f64,
    /// Replaces the asymptotic surgery defaults when set.
    pub surgery: Option<SurgeryParams>,
    /// Replaces the asymptotic number of BFS layers when set.
    pub q: Option<usize>,
    pub budget: RetryBudget,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_degree: 3,
            eps: 0.25,
            log_base: std::f64::consts::E,
            surgery: None,
            q: None,
            budget: RetryBudget::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    Phase1Fail,
    Phase2Fail,
    Phase3Fail,
    RejectedInput,
    /// An internal check failed; indicates a bug, never a property of the input.
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Phase1Fail => "phase1-fail",
            Outcome::Phase2Fail => "phase2-fail",
            Outcome::Phase3Fail => "phase3-fail",
            Outcome::RejectedInput => "rejected-input",
            Outcome::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub guest_vertices: usize,
    pub small_components: usize,
    pub h2_vertices: usize,
    pub independent_set: usize,
    pub removed_cycles: usize,
    pub nonempty_classes: usize,
    pub phase1_attempts: usize,
    pub phase1_matchings: usize,
    pub stuck_class: Option<usize>,
    pub phase2_undos: usize,
    pub stuck_request: Option<usize>,
    pub phase1_ms: u64,
    pub phase2_ms: u64,
    pub phase3_ms: u64,
    pub total_ms: u64,
}

/// A removed guest cycle together with its host image and anchor sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedCycle {
    /// Guest cycle in guest ids, in its fixed order.
    pub guest: Cycle,
    /// Host cycle; position `j` holds the image of guest position `j`.
    pub host: Cycle,
    pub anchors: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub outcome: Outcome,
    pub fail_reason: Option<String>,
    pub stats: PhaseStats,
    pub zones: Option<ZoneLayout>,
    /// Guest vertices placed by each phase.
    pub phase1_vertices: VertexSet,
    pub phase3_vertices: VertexSet,
    pub placed_cycles: Vec<PlacedCycle>,
    /// Guest id -> host id, present on success.
    pub map: Option<Vec<usize>>,
}

impl PipelineResult {
    fn new(outcome: Outcome, reason: Option<String>) -> Self {
        PipelineResult {
            outcome,
            fail_reason: reason,
            stats: PhaseStats::default(),
            zones: None,
            phase1_vertices: VertexSet::new(),
            phase3_vertices: VertexSet::new(),
            placed_cycles: Vec::new(),
            map: None,
        }
    }

    fn fail(mut self, outcome: Outcome, reason: impl Into<String>) -> Self {
        self.outcome = outcome;
        self.fail_reason = Some(reason.into());
        self
    }

    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    pub fn embedding(&self, host_count: usize) -> Option<EmbeddingMap> {
        let forward = self.map.as_ref()?.iter().map(|&h| Some(h)).collect();
        EmbeddingMap::from_forward(forward, host_count).ok()
    }
}

fn ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Guest graphs with maximum degree two are out of scope: they are
/// disjoint unions of paths and cycles and need a separate argument.
fn check_input(host: &Graph, guest: &Graph, cfg: &PipelineConfig) -> Result<(), String> {
    if cfg.max_degree < 3 {
        return Err(format!(
            "max degree {} < 3: guests of maximum degree 2 (disjoint unions of paths and cycles) are not supported",
            cfg.max_degree
        ));
    }
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(format!("epsilon {} outside (0, 1)", cfg.eps));
    }
    if guest.max_degree() > cfg.max_degree {
        return Err(format!("guest max degree {} exceeds {}", guest.max_degree(), cfg.max_degree));
    }
    let cap = ((1.0 - cfg.eps) * host.vertex_count() as f64 + 1e-9).floor() as usize;
    if guest.vertex_count() > cap {
        return Err(format!("guest has {} vertices, limit is {cap}", guest.vertex_count()));
    }
    Ok(())
}

/// Surgery, core embedding into `R`, cycle placement into the `D_g` zones,
/// then small components into whatever remains.
pub fn run_pipeline(host: &Graph, guest: &Graph, cfg: &PipelineConfig, seed: Seed) -> PipelineResult {
    let start = Instant::now();
    let mut res = PipelineResult::new(Outcome::Success, None);
    res.stats.guest_vertices = guest.vertex_count();
    if let Err(reason) = check_input(host, guest, cfg) {
        return res.fail(Outcome::RejectedInput, reason);
    }
    let n = host.vertex_count();

    let surgery = match &cfg.surgery {
        Some(s) => s.clone(),
        None => match SurgeryParams::asymptotic_defaults(n, cfg.eps, cfg.log_base) {
            Ok(s) => s,
            Err(e) => return res.fail(Outcome::RejectedInput, e.to_string()),
        },
    };
    let zones = match layout_zones(n, cfg.eps, surgery.max_cycle_length, cfg.log_base) {
        Ok(z) => z,
        Err(e) => return res.fail(Outcome::RejectedInput, e.to_string()),
    };
    res.zones = Some(zones.clone());

    // Phase I
    let t1 = Instant::now();
    let plan = match build_removal_plan(guest, &surgery, cfg.max_degree) {
        Ok(p) => p,
        Err(e @ Error::InvalidInput(_)) => return res.fail(Outcome::RejectedInput, e.to_string()),
        Err(e) => return res.fail(Outcome::Error, e.to_string()),
    };
    res.stats.small_components = plan.small_components.len();
    res.stats.h2_vertices = plan.h2.vertex_count();
    res.stats.independent_set = plan.independent_a.len() + plan.independent_b.len();
    res.stats.removed_cycles = plan.cycles.len();

    let h2p = match pad_with_isolated(&plan.h2, zones.r.len()) {
        Ok(g) => g,
        Err(e) => return res.fail(Outcome::Error, e.to_string()),
    };
    let params = match cfg.q {
        Some(q) => PartitionParams::new(q.clamp(1, h2p.vertex_count().max(1)), cfg.max_degree, cfg.eps),
        None => PartitionParams::asymptotic_defaults(n, cfg.eps, cfg.max_degree, cfg.log_base, h2p.vertex_count()),
    };
    let part = match params.and_then(|p| build_f_partition(&h2p, &p)) {
        Ok(p) => p,
        Err(e) => return res.fail(Outcome::Error, e.to_string()),
    };
    res.stats.nonempty_classes = part.nonempty_classes();
    let core = match embed_partitioned(host, &zones.r, &h2p, &part, &cfg.budget, seed.derive("phase1")) {
        Ok(o) => o,
        Err(e) => return res.fail(Outcome::Error, e.to_string()),
    };
    res.stats.phase1_attempts = core.stats.attempts;
    res.stats.phase1_matchings = core.stats.matchings;
    res.stats.stuck_class = core.stats.stuck_class;
    res.stats.phase1_ms = ms(t1);
    let Some(core_map) = core.map else {
        res.stats.total_ms = ms(start);
        let reason = match core.stats.stuck_class {
            Some(i) => format!("core class {i} could not be matched"),
            None => "core embedding budget exhausted".to_string(),
        };
        return res.fail(Outcome::Phase1Fail, reason);
    };

    // only the real H_2 vertices carry over; padding images are released
    let mut f = EmbeddingMap::new(guest.vertex_count(), n);
    for u in plan.h2.vertices() {
        let x = core_map.get(u).expect("core map is total");
        f.insert(plan.h2_to_h(u), x).expect("core map is injective");
    }
    res.phase1_vertices = plan.h2_vertices_in_h();

    // Phase II
    let t2 = Instant::now();
    let in_h2 = {
        let mut m = vec![false; guest.vertex_count()];
        for v in res.phase1_vertices.iter() {
            m[v] = true;
        }
        m
    };
    let mut by_length: BTreeMap<usize, Vec<Cycle>> = BTreeMap::new();
    for c in plan.cycles_in_h().into_values() {
        by_length.entry(c.len()).or_default().push(c);
    }
    for (g, guest_cycles) in by_length {
        let Some(zone) = zones.zone_of(g) else {
            return res.fail(Outcome::Error, format!("no zone for cycles of length {g}"));
        };
        let reqs: Vec<PlacementRequest> = guest_cycles
            .iter()
            .map(|c| {
                PlacementRequest::new(
                    c.vertices()
                        .iter()
                        .map(|&x| {
                            guest
                                .neighbors(x)
                                .iter()
                                .filter(|&&w| in_h2[w])
                                .map(|&w| f.get(w).expect("H_2 is placed"))
                                .collect()
                        })
                        .collect(),
                )
            })
            .collect();
        let out = match place_all_cycles(host, zone, &reqs, &cfg.budget) {
            Ok(o) => o,
            Err(e) => return res.fail(Outcome::Error, e.to_string()),
        };
        res.stats.phase2_undos += out.undos;
        let Some(host_cycles) = out.cycles else {
            res.stats.stuck_request = out.stuck_request;
            res.stats.phase2_ms = ms(t2);
            res.stats.total_ms = ms(start);
            let reason = format!(
                "length {g}: {} (candidate sizes {:?})",
                out.reason.unwrap_or_default(),
                out.stuck_candidates
            );
            return res.fail(Outcome::Phase2Fail, reason);
        };
        for ((gc, hc), req) in guest_cycles.into_iter().zip(host_cycles).zip(reqs) {
            for (&a, &b) in gc.vertices().iter().zip(hc.vertices()) {
                if let Err(e) = f.insert(a, b) {
                    return res.fail(Outcome::Error, e.to_string());
                }
            }
            res.placed_cycles.push(PlacedCycle { guest: gc, host: hc, anchors: req.anchors });
        }
    }
    res.stats.phase2_ms = ms(t2);

    // Phase III
    let t3 = Instant::now();
    let free: VertexSet = (0..n).filter(|&x| !f.is_used(x)).collect();
    let comps: Vec<(Graph, crate::graph::VertexMap)> =
        plan.small_components.iter().map(|c| guest.induced_subgraph(c)).collect();
    let graphs: Vec<Graph> = comps.iter().map(|(g, _)| g.clone()).collect();
    let Some(small) = embed_small_components(host, &free, &graphs, &cfg.budget) else {
        res.stats.phase3_ms = ms(t3);
        res.stats.total_ms = ms(start);
        return res.fail(Outcome::Phase3Fail, "small components could not be embedded");
    };
    let mut offset = 0;
    for (g, map) in &comps {
        for local in g.vertices() {
            let x = small.get(offset + local).expect("small map is total");
            if let Err(e) = f.insert(map.parent(local), x) {
                return res.fail(Outcome::Error, e.to_string());
            }
        }
        offset += g.vertex_count();
    }
    res.phase3_vertices = plan.small_components.iter().flat_map(|c| c.iter()).collect();
    res.stats.phase3_ms = ms(t3);
    res.stats.total_ms = ms(start);

    match validate_embedding(host, guest, &f) {
        Ok(true) => {
            res.map = f.to_total();
            res
        }
        Ok(false) => res.fail(Outcome::Error, "final embedding failed validation"),
        Err(e) => res.fail(Outcome::Error, e.to_string()),
    }
}
