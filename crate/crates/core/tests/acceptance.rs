//! End-to-end acceptance checks. Runs as a plain binary so that the
//! per-criterion verdict lines are always printed.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use universal_embed::cycles::{check_ah_condition, sdr_solve, SdrInstance, SdrMode};
use universal_embed::decomposition::{build_removal_plan, RemovalPlan, SurgeryParams};
use universal_embed::embedding::{layout_zones, validate_embedding, Outcome, PipelineResult, RetryBudget};
use universal_embed::generate::{ComponentKind, ComponentRecipe, GuestSpec};
use universal_embed::harness::{
    estimate_threshold, monotonicity_violations, run_sweep, run_trial_full, summarize, sweep_csv, ExperimentConfig,
    PGrid, ThresholdSearch,
};
use universal_embed::janson::{
    brute_force_family, brute_force_mu_delta, cycle_family_copies, delta_upper_canonical, equal_parts,
    janson_tail_bound, mu_canonical_copies, mu_cycle_family, JansonParams,
};
use universal_embed::partition::{
    build_f_partition, pad_with_isolated, slot_size, validate_f_partition, FPartition, PartitionParams,
};
use universal_embed::{Graph, Seed, VertexSet};

// tolerances
const LOG_TOL: f64 = 1e-9;
const JANSON_SAMPLES: usize = 100_000;
const JANSON_SIGMAS: f64 = 4.0;
const MONOTONE_SIGMAS: f64 = 2.0;
const CORPUS_MIN_RUNS: usize = 500;
const E2E_P: f64 = 0.35;
const E2E_INFO_P: f64 = 0.15;
const E2E_TRIALS: usize = 20;
const E2E_MIN_SUCCESSES: usize = 18;

struct Verdict {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn bfs(g: &Graph, src: usize, limit: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        if d == limit {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

// ---------------------------------------------------------------------------
// corpus

struct CorpusCase {
    cfg: ExperimentConfig,
    label: String,
}

fn fill_paths(mut comps: Vec<ComponentRecipe>, total: usize) -> Vec<ComponentRecipe> {
    let used: usize = comps.iter().map(|c| c.size * c.count).sum();
    comps.push(ComponentRecipe::new(ComponentKind::Path, 10, (total - used) / 10));
    comps
}

fn corpus_cases() -> Vec<CorpusCase> {
    let mut cases = Vec::new();
    for (ni, &n) in [500usize, 1500, 3000].iter().enumerate() {
        let total = (0.75 * n as f64) as usize;
        let grid = match n {
            500 => 200,
            1500 => 400,
            _ => 800,
        };
        for &delta in &[3usize, 4] {
            let mixed = fill_paths(
                vec![
                    ComponentRecipe::new(ComponentKind::RandomBounded, n / 3, 1),
                    ComponentRecipe::new(ComponentKind::Clique, 4, n / 60),
                    ComponentRecipe::new(ComponentKind::Clique, 3, n / 30),
                ],
                total,
            );
            let gridded = fill_paths(vec![ComponentRecipe::new(ComponentKind::Grid, grid, 1)], total);
            for (gname, comps) in [("mixed", mixed), ("grid", gridded)] {
                cases.push(CorpusCase {
                    label: format!("n={n} delta={delta} guest={gname}"),
                    cfg: ExperimentConfig {
                        n,
                        max_degree: delta,
                        eps: 0.25,
                        p: PGrid::List(vec![0.15, 0.4, 0.9]),
                        trials: 15,
                        base_seed: 1000 + 10 * ni as u64 + delta as u64,
                        guest: GuestSpec { total_vertices: total, max_degree: delta, components: comps },
                        surgery: None,
                        q: None,
                        budget: RetryBudget::default(),
                        log_base: std::f64::consts::E,
                        output: None,
                        record_timings: false,
                        reject_check: false,
                    },
                });
            }
        }
    }
    cases
}

struct CorpusRun {
    label: String,
    p: f64,
    seed: Seed,
    result: PipelineResult,
    success_check: Result<(), String>,
    partition_check: Result<(), String>,
    plan_check: Result<(), String>,
}

/// Success certificate, checked without the pipeline's own validator
/// beyond `validate_embedding`.
fn check_success(host: &Graph, guest: &Graph, res: &PipelineResult) -> Result<(), String> {
    let f = res.embedding(host.vertex_count()).ok_or("success without a total injective map")?;
    if !validate_embedding(host, guest, &f).map_err(|e| e.to_string())? {
        return Err("embedding misses a guest edge".into());
    }
    let map = res.map.as_ref().unwrap();
    let zones = res.zones.as_ref().ok_or("no zones reported")?;

    let mut owner = vec![0u8; guest.vertex_count()];
    for u in res.phase1_vertices.iter() {
        owner[u] += 1;
        if !zones.r.contains(map[u]) {
            return Err(format!("core vertex {u} mapped outside R"));
        }
    }
    let in_core = res.phase1_vertices.to_mask(guest.vertex_count());
    for (i, pc) in res.placed_cycles.iter().enumerate() {
        let zone = zones.zone_of(pc.guest.len()).ok_or("cycle without zone")?;
        for (j, (&gu, &hx)) in pc.guest.vertices().iter().zip(pc.host.vertices()).enumerate() {
            owner[gu] += 1;
            if map[gu] != hx {
                return Err(format!("cycle {i}: reported image differs from the map"));
            }
            if !zone.contains(hx) {
                return Err(format!("cycle {i}: host vertex {hx} outside its zone"));
            }
            let expected: VertexSet =
                guest.neighbors(gu).iter().filter(|&&w| in_core[w]).map(|&w| map[w]).collect();
            if pc.anchors[j] != expected {
                return Err(format!("cycle {i} position {j}: anchor set differs from core neighbour images"));
            }
            let missed = expected.iter().find(|&a| !host.has_edge(a, hx));
            if let Some(a) = missed {
                return Err(format!("cycle {i} position {j}: {hx} does not dominate anchor {a}"));
            }
        }
    }
    for u in res.phase3_vertices.iter() {
        owner[u] += 1;
    }
    if let Some(u) = owner.iter().position(|&k| k != 1) {
        return Err(format!("guest vertex {u} owned by {} phases", owner[u]));
    }
    Ok(())
}

/// Properties (i)-(v) recomputed by plain BFS.
fn oracle_partition(h: &Graph, part: &FPartition) -> Result<(), String> {
    let v = h.vertex_count();
    if part.classes.len() != part.t + 1 {
        return Err("class count".into());
    }
    let mut class = vec![usize::MAX; v];
    for (i, c) in part.classes.iter().enumerate() {
        for u in c.iter() {
            if u >= v || class[u] != usize::MAX {
                return Err(format!("vertex {u} out of range or repeated"));
            }
            class[u] = i;
        }
    }
    if class.contains(&usize::MAX) {
        return Err("vertex in no class".into());
    }
    let last = part.last();
    if last.len() != slot_size(part.eps_slot, v) {
        return Err("(i) slot size".into());
    }
    let nb: VertexSet = last.iter().flat_map(|u| h.neighbors(u).to_vec()).collect();
    if nb != part.classes[0] {
        return Err("(ii) W_0 is not the neighbourhood of W_t".into());
    }
    for (i, c) in part.classes.iter().enumerate().skip(1) {
        let k = if i == part.t { 3 } else { 2 };
        for a in c.iter() {
            if h.degree(a) == 0 {
                continue;
            }
            let d = bfs(h, a, k);
            if let Some(b) = c.iter().find(|&b| b != a && d[b].is_some()) {
                return Err(format!("W_{i}: {a} and {b} within distance {k}"));
            }
        }
        for u in c.iter() {
            let back = h.neighbors(u).iter().filter(|&&w| class[w] < i).count();
            if back > part.d {
                return Err(format!("(v) back degree {back} at {u}"));
            }
        }
    }
    Ok(())
}

/// Partition of `V(H)`, cycle shape and position recomputed in `H` ids.
fn oracle_plan(h: &Graph, plan: &RemovalPlan) -> Result<(), String> {
    let mut owner = vec![0u8; h.vertex_count()];
    for c in &plan.small_components {
        for v in c.iter() {
            owner[v] += 1;
        }
    }
    for v in plan.h2_vertices_in_h().iter() {
        owner[v] += 1;
    }
    let cycles = plan.cycles_in_h();
    for (&centre, c) in &cycles {
        for &v in c.vertices() {
            owner[v] += 1;
        }
        if !c.is_induced_in(h) {
            return Err(format!("cycle at {centre} not induced"));
        }
        let d = bfs(h, centre, plan.params.witness_radius);
        if c.vertices().iter().any(|&v| d[v].is_none()) {
            return Err(format!("cycle at {centre} leaves the witness ball"));
        }
    }
    if let Some(v) = owner.iter().position(|&k| k != 1) {
        return Err(format!("vertex {v} covered {} times", owner[v]));
    }
    let report = plan.certify(h);
    if !report.is_ok() {
        return Err(report.to_string());
    }
    Ok(())
}

fn structure_checks(cfg: &ExperimentConfig, guest: &Graph) -> (Result<(), String>, Result<(), String>) {
    let surgery = SurgeryParams::asymptotic_defaults(cfg.n, cfg.eps, cfg.log_base).unwrap();
    let plan = match build_removal_plan(guest, &surgery, cfg.max_degree) {
        Ok(p) => p,
        Err(e) => return (Err(format!("no plan: {e}")), Err(format!("no plan: {e}"))),
    };
    let plan_check = oracle_plan(guest, &plan);
    let zones = layout_zones(cfg.n, cfg.eps, surgery.max_cycle_length, cfg.log_base).unwrap();
    let padded = pad_with_isolated(&plan.h2, zones.r.len()).unwrap();
    let params =
        PartitionParams::asymptotic_defaults(cfg.n, cfg.eps, cfg.max_degree, cfg.log_base, padded.vertex_count()).unwrap();
    let partition_check = match build_f_partition(&padded, &params) {
        Err(e) => Err(format!("no partition: {e}")),
        Ok(part) => {
            let report = validate_f_partition(&padded, &part);
            if !report.is_ok() {
                Err(report.to_string())
            } else {
                oracle_partition(&padded, &part)
            }
        }
    };
    (partition_check, plan_check)
}

fn run_corpus() -> Vec<CorpusRun> {
    let jobs: Vec<(usize, usize, f64, Seed)> = corpus_cases()
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| {
            c.cfg.p.values().into_iter().enumerate().flat_map(move |(pi, p)| {
                (0..c.cfg.trials).map(move |t| (ci, pi, p, c.cfg.trial_seed(pi, t)))
            })
        })
        .collect();
    let cases = corpus_cases();
    jobs.par_iter()
        .map(|&(ci, _pi, p, seed)| {
            let case = &cases[ci];
            let (inputs, result) = run_trial_full(&case.cfg, p, seed).expect("corpus inputs are valid");
            let success_check = if result.outcome == Outcome::Success {
                check_success(&inputs.host, &inputs.guest, &result)
            } else {
                Ok(())
            };
            // the guest depends only on the seed, so the structure checks
            // are done once per guest at the lowest p
            let (partition_check, plan_check) = if p == case.cfg.p.values()[0] {
                structure_checks(&case.cfg, &inputs.guest)
            } else {
                (Ok(()), Ok(()))
            };
            CorpusRun { label: case.label.clone(), p, seed, result, success_check, partition_check, plan_check }
        })
        .collect()
}

fn first_failure(runs: &[CorpusRun], pick: impl Fn(&CorpusRun) -> &Result<(), String>) -> Option<(&CorpusRun, String)> {
    runs.iter().find_map(|r| pick(r).as_ref().err().map(|e| (r, e.clone())))
}

fn criterion_1(runs: &[CorpusRun], secs: f64) -> Verdict {
    let successes = runs.iter().filter(|r| r.result.outcome == Outcome::Success).count();
    let with_cycles = runs
        .iter()
        .filter(|r| r.result.outcome == Outcome::Success && !r.result.placed_cycles.is_empty())
        .count();
    let errors = runs.iter().filter(|r| r.result.outcome == Outcome::Error).count();
    let bad = first_failure(runs, |r| &r.success_check);
    let mut outcomes = std::collections::BTreeMap::new();
    for r in runs {
        *outcomes.entry(r.result.outcome.as_str()).or_insert(0) += 1;
    }
    let passed = runs.len() >= CORPUS_MIN_RUNS && bad.is_none() && errors == 0 && with_cycles > 0;
    let mut detail = format!(
        "{} runs in {secs:.1}s, {successes} successes ({with_cycles} with placed cycles), outcomes {outcomes:?}",
        runs.len()
    );
    if let Some((r, e)) = bad {
        detail += &format!("; first violation {} p={} seed={}: {e}", r.label, r.p, r.seed.0);
    }
    Verdict { id: 1, name: "embedding validity", passed, detail }
}

fn negative_partition_fixtures() -> Vec<(&'static str, bool)> {
    let params = PartitionParams::new(3, 3, 0.5).unwrap();
    let g = Graph::path(6).with_isolated(14);
    let base = build_f_partition(&g, &params).unwrap();
    let class_of = |part: &FPartition, u: usize| part.classes.iter().position(|c| c.contains(u)).unwrap();
    let one = |u: usize| VertexSet::from_iter([u]);
    let mut out = Vec::new();

    // a path vertex with no neighbour in W_t joins W_0
    let mut m = base.clone();
    let t = m.t;
    let c = class_of(&m, 2);
    m.classes[c] = m.classes[c].difference(&one(2));
    m.classes[0] = m.classes[0].union(&one(2));
    let r = validate_f_partition(&g, &m);
    out.push(("ii_w0_is_neighbourhood", !r.passed("ii_w0_is_neighbourhood")));

    // two path vertices at distance 3 both in W_t
    let mut m = base.clone();
    let drop: Vec<usize> = m.classes[t].iter().take(2).collect();
    for u in [0, 3] {
        let c = class_of(&m, u);
        m.classes[c] = m.classes[c].difference(&one(u));
    }
    for &u in &drop {
        m.classes[t] = m.classes[t].difference(&one(u));
    }
    m.classes[t] = m.classes[t].union(&VertexSet::from_iter([0, 3]));
    let spare = (1..t).find(|&i| m.classes[i].is_empty()).unwrap();
    m.classes[spare] = m.classes[spare].union(&drop.into_iter().collect());
    let r = validate_f_partition(&g, &m);
    out.push(("iii_last_3_independent", !r.passed("iii_last_3_independent")));

    // adjacent path vertices 2 and 3 share a middle class
    let mut m = base.clone();
    let (c2, c3) = (class_of(&m, 2), class_of(&m, 3));
    m.classes[c3] = m.classes[c3].difference(&one(3));
    m.classes[c2] = m.classes[c2].union(&one(3));
    let r = validate_f_partition(&g, &m);
    out.push(("iv_classes_2_independent", !r.passed("iv_classes_2_independent")));
    out
}

fn criterion_2(runs: &[CorpusRun]) -> Verdict {
    let checked = runs.iter().filter(|r| r.p == 0.15).count();
    let bad = first_failure(runs, |r| &r.partition_check);
    let negatives = negative_partition_fixtures();
    let neg_ok = negatives.iter().all(|(_, rejected)| *rejected);
    let mut detail = format!(
        "{checked} corpus guests certified; negatives {:?}",
        negatives.iter().map(|(n, ok)| format!("{n}:{}", if *ok { "rejected" } else { "ACCEPTED" })).collect::<Vec<_>>()
    );
    if let Some((r, e)) = &bad {
        detail += &format!("; first violation {} seed={}: {e}", r.label, r.seed.0);
    }
    Verdict { id: 2, name: "partition certification", passed: bad.is_none() && neg_ok && checked > 0, detail }
}

fn criterion_3(runs: &[CorpusRun]) -> Verdict {
    let checked = runs.iter().filter(|r| r.p == 0.15).count();
    let cycles: usize = runs.iter().filter(|r| r.p == 0.15).map(|r| r.result.stats.removed_cycles).sum();
    let bad = first_failure(runs, |r| &r.plan_check);
    let mut detail = format!("{checked} removal plans, {cycles} removed cycles");
    if let Some((r, e)) = &bad {
        detail += &format!("; first violation {} seed={}: {e}", r.label, r.seed.0);
    }
    Verdict { id: 3, name: "decomposition invariants", passed: bad.is_none() && checked > 0, detail }
}

// ---------------------------------------------------------------------------
// Janson

fn patterns() -> Vec<(&'static str, Graph)> {
    let e = |n, edges: &[(usize, usize)]| Graph::from_edges(n, edges.iter().copied()).unwrap();
    vec![
        ("edge", Graph::path(2)),
        ("p3", Graph::path(3)),
        ("triangle", Graph::complete(3)),
        ("p4", Graph::path(4)),
        ("star3", Graph::star(3)),
        ("c4", Graph::cycle(4)),
        ("paw", e(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        ("diamond", e(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])),
        ("k4", Graph::complete(4)),
        ("c5", Graph::cycle(5)),
    ]
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut fixtures = 0;
    let mut failures = Vec::new();
    for (name, pat) in patterns() {
        for m in [2usize, 3] {
            for p in [0.3, 0.7] {
                fixtures += 1;
                let parts = equal_parts(pat.vertex_count(), m);
                let (mu_bf, delta_bf) = brute_force_mu_delta(&pat, &parts, p).unwrap();
                let mu = mu_canonical_copies(&pat, m, p).unwrap();
                if (mu.ln() - mu_bf.ln()).abs() > LOG_TOL {
                    failures.push(format!("{name} m={m} p={p}: mu {} vs {}", mu, mu_bf));
                }
                let upper = delta_upper_canonical(&pat, m, p, 3).unwrap();
                if !delta_bf.is_zero() && upper.ln() < delta_bf.ln() - LOG_TOL {
                    failures.push(format!("{name} m={m} p={p}: delta bound {} below {}", upper, delta_bf));
                }
            }
        }
    }
    // cycle families: k requests of g-cycles with single-vertex anchors
    for (k, g, m) in [(1usize, 3usize, 3usize), (2, 3, 3), (2, 4, 2), (3, 3, 2), (1, 5, 2)] {
        for p in [0.4, 0.8] {
            fixtures += 1;
            let parts = equal_parts(g, m);
            let base = g * m;
            let anchors: Vec<Vec<VertexSet>> = (0..k)
                .map(|i| (0..g).map(|j| VertexSet::from_iter([base + i * g + j])).collect())
                .collect();
            let (mu_bf, _) = brute_force_family(&cycle_family_copies(&parts, &anchors).unwrap(), p).unwrap();
            // a cycle vertex carries Delta - 2 anchor edges: one anchor is degree 3
            let mu = mu_cycle_family(k, g, m, p, 3).unwrap();
            if (mu.ln() - mu_bf.ln()).abs() > LOG_TOL {
                failures.push(format!("cycle k={k} g={g} m={m} p={p}: mu {} vs {}", mu, mu_bf));
            }
        }
    }
    // two anchors per position is degree 4
    for (k, g, m) in [(1usize, 3usize, 2usize), (2, 3, 2), (1, 4, 2)] {
        fixtures += 1;
        let p = 0.6;
        let parts = equal_parts(g, m);
        let base = g * m;
        let anchors: Vec<Vec<VertexSet>> = (0..k)
            .map(|i| (0..g).map(|j| VertexSet::from_iter([base + 2 * (i * g + j), base + 2 * (i * g + j) + 1])).collect())
            .collect();
        let (mu_bf, _) = brute_force_family(&cycle_family_copies(&parts, &anchors).unwrap(), p).unwrap();
        let mu = mu_cycle_family(k, g, m, p, 4).unwrap();
        if (mu.ln() - mu_bf.ln()).abs() > LOG_TOL {
            failures.push(format!("cycle k={k} g={g} m={m} deg 4: mu {} vs {}", mu, mu_bf));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 4,
        name: "janson oracle equivalence",
        passed: failures.is_empty() && fixtures >= 20 && secs < 60.0,
        detail: format!("{fixtures} fixtures in {secs:.1}s; {}", if failures.is_empty() { "all agree".into() } else { failures.join("; ") }),
    }
}

/// Number of triangles with one vertex in each of three parts of size `m`.
fn canonical_triangle_count(m: usize, p: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut ab = vec![false; m * m];
    let mut bc = vec![false; m * m];
    let mut ac = vec![false; m * m];
    for x in ab.iter_mut().chain(bc.iter_mut()).chain(ac.iter_mut()) {
        *x = rng.random_bool(p);
    }
    let mut count = 0;
    for a in 0..m {
        for b in 0..m {
            if !ab[a * m + b] {
                continue;
            }
            for c in 0..m {
                if bc[b * m + c] && ac[a * m + c] {
                    count += 1;
                }
            }
        }
    }
    count
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let fixtures = [(6usize, 0.3f64), (8, 0.25), (10, 0.2)];
    let gammas = [0.3, 0.5, 0.9];
    let results: Vec<Vec<(f64, f64, f64, f64)>> = fixtures
        .par_iter()
        .enumerate()
        .map(|(fi, &(m, p))| {
            let tri = Graph::complete(3);
            let (mu, delta) = brute_force_mu_delta(&tri, &equal_parts(3, m), p).unwrap();
            let mut rng = Seed(77).derive_indexed("janson-mc", &[fi as u64]).rng();
            let counts: Vec<usize> = (0..JANSON_SAMPLES).map(|_| canonical_triangle_count(m, p, &mut rng)).collect();
            gammas
                .iter()
                .map(|&gamma| {
                    let cut = (1.0 - gamma) * mu.value();
                    let hits = counts.iter().filter(|&&x| (x as f64) < cut).count();
                    let freq = hits as f64 / JANSON_SAMPLES as f64;
                    let bound = janson_tail_bound(&JansonParams { mu, delta, gamma }).unwrap().value();
                    let q = bound.max(freq).min(1.0);
                    let sigma = (q * (1.0 - q) / JANSON_SAMPLES as f64).sqrt();
                    (gamma, freq, bound, sigma)
                })
                .collect()
        })
        .collect();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for ((m, p), res) in fixtures.iter().zip(&results) {
        for &(gamma, freq, bound, sigma) in res {
            rows.push(format!("m={m},p={p},g={gamma}:{freq:.4}<={bound:.4}"));
            if freq > bound + JANSON_SIGMAS * sigma {
                failures.push(format!("m={m} p={p} gamma={gamma}: {freq} > {bound} + {JANSON_SIGMAS} sigma"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 5,
        name: "janson bound validity",
        passed: failures.is_empty() && secs < 300.0,
        detail: format!("{JANSON_SAMPLES} samples per fixture in {secs:.1}s; {}", if failures.is_empty() { rows.join(" ") } else { failures.join("; ") }),
    }
}

// ---------------------------------------------------------------------------
// SDR

fn subsets(ground: usize, g: usize) -> Vec<VertexSet> {
    (0u32..1 << ground)
        .filter(|m| m.count_ones() as usize == g)
        .map(|m| (0..ground).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

/// All edge lists of `1..=max_edges` edges from `universe`, as sorted index lists.
fn edge_lists(universe: usize, max_edges: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(start: usize, universe: usize, max_edges: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_edges {
            return;
        }
        for i in start..universe {
            cur.push(i);
            go(i + 1, universe, max_edges, cur, out);
            cur.pop();
        }
    }
    go(0, universe, max_edges, &mut Vec::new(), &mut out);
    out
}

#[derive(Default)]
struct SdrTally {
    instances: usize,
    solvable: usize,
    ah_true: usize,
    disagreements: Vec<String>,
}

fn sdr_check(inst: &SdrInstance) -> Result<(bool, bool), String> {
    let ex = sdr_solve(inst, SdrMode::Exhaustive).map_err(|e| e.to_string())?;
    let gb = sdr_solve(inst, SdrMode::GreedyBacktrack { node_budget: None }).map_err(|e| e.to_string())?;
    if ex.is_some() != gb.is_some() {
        return Err(format!("solvers disagree on {:?}", inst.hypergraphs));
    }
    for a in ex.iter().chain(gb.iter()) {
        if !inst.is_valid_assignment(a) {
            return Err(format!("invalid assignment {a:?} for {:?}", inst.hypergraphs));
        }
    }
    let ah = check_ah_condition(inst, inst.g).map_err(|e| e.to_string())?;
    if ah && ex.is_none() {
        return Err(format!("condition holds but no SDR for {:?}", inst.hypergraphs));
    }
    Ok((ex.is_some(), ah))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut tally = SdrTally::default();
    for g in [2usize, 3] {
        let universe = subsets(6, g);
        let build = |lists: &[&Vec<usize>]| {
            SdrInstance::new(g, lists.iter().map(|l| l.iter().map(|&i| universe[i].clone()).collect()).collect())
                .unwrap()
        };
        // one hypergraph: every edge list up to 8 edges
        let single = edge_lists(universe.len(), 8);
        // two: unordered pairs of lists with up to 4 edges each
        let upto4 = edge_lists(universe.len(), 4);
        let upto3 = edge_lists(universe.len(), 3);
        let pair_lists = if g == 2 { &upto4 } else { &upto3 };
        // three: unordered triples of lists with up to 2 edges each
        let upto2 = edge_lists(universe.len(), 2);

        let results: Vec<Result<(bool, bool), String>> = single
            .par_iter()
            .map(|a| sdr_check(&build(&[a])))
            .chain((0..pair_lists.len()).into_par_iter().flat_map_iter(|i| {
                let build = &build;
                (i..pair_lists.len()).map(move |j| sdr_check(&build(&[&pair_lists[i], &pair_lists[j]])))
            }))
            .chain((0..upto2.len()).into_par_iter().flat_map_iter(|i| {
                let build = &build;
                let upto2 = &upto2;
                (i..upto2.len()).flat_map(move |j| {
                    (j..upto2.len()).map(move |k| sdr_check(&build(&[&upto2[i], &upto2[j], &upto2[k]])))
                })
            }))
            .collect();
        // seeded sample of the larger instances with 7 or 8 edges in total
        let mut rng = Seed(606).derive_indexed("sdr", &[g as u64]).rng();
        let mut sampled = Vec::new();
        for _ in 0..100_000 {
            let k = rng.random_range(2..=3usize);
            let total = rng.random_range(7..=8usize);
            let mut sizes = vec![1usize; k];
            for _ in k..total {
                let i = rng.random_range(0..k);
                sizes[i] += 1;
            }
            let lists: Vec<Vec<usize>> = sizes
                .iter()
                .map(|&s| {
                    let mut l: Vec<usize> = rand::seq::index::sample(&mut rng, universe.len(), s.min(universe.len())).into_vec();
                    l.sort_unstable();
                    l
                })
                .collect();
            sampled.push(lists);
        }
        let sampled_results: Vec<Result<(bool, bool), String>> = sampled
            .par_iter()
            .map(|lists| sdr_check(&build(&lists.iter().collect::<Vec<_>>())))
            .collect();
        for r in results.into_iter().chain(sampled_results) {
            tally.instances += 1;
            match r {
                Ok((solvable, ah)) => {
                    tally.solvable += usize::from(solvable);
                    tally.ah_true += usize::from(ah);
                }
                Err(e) => {
                    if tally.disagreements.len() < 3 {
                        tally.disagreements.push(e);
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        id: 6,
        name: "sdr oracle equivalence",
        passed: tally.disagreements.is_empty() && secs < 120.0,
        detail: format!(
            "{} instances in {secs:.1}s, {} solvable, {} satisfy the condition; {}",
            tally.instances,
            tally.solvable,
            tally.ah_true,
            if tally.disagreements.is_empty() { "no disagreement".into() } else { tally.disagreements.join("; ") }
        ),
    }
}

// ---------------------------------------------------------------------------
// end to end

fn e2e_config(p: f64) -> ExperimentConfig {
    ExperimentConfig {
        n: 3000,
        max_degree: 3,
        eps: 0.25,
        p: PGrid::List(vec![p]),
        trials: E2E_TRIALS,
        base_seed: 2026,
        guest: GuestSpec {
            total_vertices: 2250,
            max_degree: 3,
            components: vec![
                ComponentRecipe::new(ComponentKind::RandomBounded, 1000, 1),
                ComponentRecipe::new(ComponentKind::Clique, 3, 200),
                ComponentRecipe::new(ComponentKind::Path, 10, 65),
            ],
        },
        surgery: None,
        q: None,
        budget: RetryBudget::default(),
        log_base: std::f64::consts::E,
        output: None,
        record_timings: false,
        reject_check: false,
    }
}

fn criterion_7() -> (Verdict, String) {
    let start = Instant::now();
    let cfg = e2e_config(E2E_P);
    let recs = run_sweep(&cfg, None).unwrap();
    let csv = sweep_csv(&cfg, &recs).unwrap();
    let ok = recs.iter().filter(|r| r.outcome == Outcome::Success).count();
    let info = run_sweep(&e2e_config(E2E_INFO_P), None).unwrap();
    let info_ok = info.iter().filter(|r| r.outcome == Outcome::Success).count();
    let secs = start.elapsed().as_secs_f64();
    (
        Verdict {
            id: 7,
            name: "end-to-end success rate",
            passed: ok >= E2E_MIN_SUCCESSES && secs < 300.0,
            detail: format!(
                "p={E2E_P}: {ok}/{E2E_TRIALS} successes (need {E2E_MIN_SUCCESSES}); informational p={E2E_INFO_P}: {info_ok}/{E2E_TRIALS}; {secs:.1}s"
            ),
        },
        csv,
    )
}

fn sweep_guest(triangles: bool) -> GuestSpec {
    let components = if triangles {
        vec![
            ComponentRecipe::new(ComponentKind::Clique, 3, 300),
            ComponentRecipe::new(ComponentKind::Path, 10, 22),
        ]
    } else {
        vec![ComponentRecipe::new(ComponentKind::Path, 10, 112)]
    };
    GuestSpec { total_vertices: 1125, max_degree: 3, components }
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut passed = true;
    let mut estimates = Vec::new();
    for triangles in [true, false] {
        let name = if triangles { "triangle-heavy" } else { "path-only" };
        let mut cfg = e2e_config(0.5);
        cfg.n = 1500;
        cfg.guest = sweep_guest(triangles);
        cfg.base_seed = 88;
        cfg.p = PGrid::Geometric { lo: 0.002, hi: 0.5, points: 8 };
        cfg.trials = 50;
        let recs = run_sweep(&cfg, None).unwrap();
        let summaries = summarize(&recs);
        let flags = monotonicity_violations(&summaries);
        if !flags.is_empty() {
            passed = false;
        }
        detail.push(format!(
            "{name} rates [{}] drops beyond {MONOTONE_SIGMAS} sigma: {}",
            summaries.iter().map(|s| format!("{:.4}:{:.2}", s.p, s.rate())).collect::<Vec<_>>().join(" "),
            flags.len()
        ));
        cfg.trials = 20;
        let search = ThresholdSearch { target: 0.5, lo: 0.001, hi: 0.5, resolution: 0.1 };
        match estimate_threshold(&cfg, &search, None) {
            Ok(est) => {
                detail.push(format!(
                    "{name} p*={:.5} in [{:.5}, {:.5}]{}",
                    est.p,
                    est.lo,
                    est.hi,
                    if est.below_range { " (below range)" } else { "" }
                ));
                estimates.push(est);
            }
            Err(e) => {
                passed = false;
                detail.push(format!("{name} threshold error: {e}"));
            }
        }
    }
    if estimates.len() == 2 {
        // the triangle bracket must lie entirely above the path bracket
        if !(estimates[0].lo >= estimates[1].hi && estimates[0].p > estimates[1].p) {
            passed = false;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    detail.push(format!("{secs:.1}s"));
    Verdict { id: 8, name: "monotonicity and ordering", passed: passed && secs < 900.0, detail: detail.join("; ") }
}

fn criterion_9(first: &str) -> Verdict {
    let cfg = e2e_config(E2E_P);
    let again = sweep_csv(&cfg, &run_sweep(&cfg, Some(3)).unwrap()).unwrap();
    let same = again.as_bytes() == first.as_bytes();
    Verdict {
        id: 9,
        name: "determinism",
        passed: same,
        detail: format!("{} bytes, {}", first.len(), if same { "identical" } else { "DIFFERENT" }),
    }
}

fn main() {
    // `cargo test` passes harness flags such as --nocapture; listing asks
    // for test names only
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let start = Instant::now();
    let corpus_start = Instant::now();
    let runs = run_corpus();
    let corpus_secs = corpus_start.elapsed().as_secs_f64();
    let mut verdicts = vec![criterion_1(&runs, corpus_secs), criterion_2(&runs), criterion_3(&runs)];
    drop(runs);
    verdicts.push(criterion_4());
    verdicts.push(criterion_5());
    verdicts.push(criterion_6());
    let (v7, csv) = criterion_7();
    verdicts.push(v7);
    verdicts.push(criterion_8());
    verdicts.push(criterion_9(&csv));
    verdicts.sort_by_key(|v| v.id);

    println!();
    for v in &verdicts {
        println!("criterion {} [{}]: {} - {}", v.id, v.name, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed = verdicts.iter().filter(|v| !v.passed).count();
    println!("acceptance: {} of {} criteria pass ({:.1}s)", verdicts.len() - failed, verdicts.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
