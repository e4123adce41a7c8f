use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EmbeddingMap, RetryBudget};
use crate::error::{invalid, Result};
use crate::graph::{Graph, VertexSet};
use crate::matching::maximum_bipartite_matching;
use crate::partition::FPartition;
use crate::rng::Seed;

/// Candidates offered to a vertex whose earlier classes hold no neighbour.
const FREE_CANDIDATES: usize = 96;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedStats {
    pub attempts: usize,
    pub matchings: usize,
    /// Class that could not be matched in the last attempt.
    pub stuck_class: Option<usize>,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct PartitionedOutcome {
    pub map: Option<EmbeddingMap>,
    pub stats: PartitionedStats,
}

enum Attempt {
    Done(EmbeddingMap),
    Stuck(usize),
    OutOfBudget,
}

struct Ctx<'a> {
    host: &'a Graph,
    guest: &'a Graph,
    allowed: &'a [bool],
    budget: &'a RetryBudget,
    start: Instant,
    matchings: usize,
}

impl Ctx<'_> {
    fn out_of_time(&self) -> bool {
        self.budget
            .wall_clock_ms
            .is_some_and(|ms| self.start.elapsed().as_millis() as u64 >= ms)
    }

    /// Host vertices adjacent to every image in `anchors`, allowed and unused.
    fn common_candidates(&self, anchors: &[usize], f: &EmbeddingMap) -> Vec<usize> {
        let Some(&pivot) = anchors.iter().min_by_key(|&&a| self.host.degree(a)) else {
            return Vec::new();
        };
        self.host
            .neighbors(pivot)
            .iter()
            .copied()
            .filter(|&x| self.allowed[x] && !f.is_used(x))
            .filter(|&x| anchors.iter().all(|&a| a == pivot || self.host.has_edge(a, x)))
            .collect()
    }

    fn placed_neighbour_images(&self, u: usize, f: &EmbeddingMap) -> Vec<usize> {
        self.guest.neighbors(u).iter().filter_map(|&w| f.get(w)).collect()
    }
}

/// Places the partition classes in order: `W_0` one vertex at a time, then
/// every later class at once by bipartite matching against the common host
/// neighbourhoods of already placed neighbours. Guest vertices without
/// neighbours are placed last on whatever allowed vertices remain.
pub fn embed_partitioned(
    host: &Graph,
    allowed: &VertexSet,
    guest: &Graph,
    part: &FPartition,
    budget: &RetryBudget,
    seed: Seed,
) -> Result<PartitionedOutcome> {
    host.check_set(allowed)?;
    if allowed.len() < guest.vertex_count() {
        return invalid(format!(
            "{} allowed host vertices for {} guest vertices",
            allowed.len(),
            guest.vertex_count()
        ));
    }
    let class_of = part.class_of(guest.vertex_count());
    if let Some(u) = class_of.iter().position(Option::is_none) {
        return invalid(format!("guest vertex {u} is in no class"));
    }
    if let Some((a, b)) = guest
        .edges()
        .find(|&(a, b)| class_of[a] == class_of[b] && class_of[a] != Some(0))
    {
        return invalid(format!("guest edge {{{a}, {b}}} inside one class"));
    }

    let mut mask = vec![false; host.vertex_count()];
    for x in allowed.iter() {
        mask[x] = true;
    }
    let mut ctx = Ctx {
        host,
        guest,
        allowed: &mask,
        budget,
        start: Instant::now(),
        matchings: 0,
    };
    let mut stats = PartitionedStats::default();
    for attempt in 0..=budget.max_restarts {
        stats.attempts += 1;
        let mut rng = seed.derive_indexed("attempt", &[attempt as u64]).rng();
        let result = try_once(&mut ctx, allowed, part, &mut rng);
        stats.matchings = ctx.matchings;
        match result {
            Attempt::Done(map) => {
                stats.stuck_class = None;
                return Ok(PartitionedOutcome { map: Some(map), stats });
            }
            Attempt::Stuck(i) => stats.stuck_class = Some(i),
            Attempt::OutOfBudget => {
                stats.budget_exhausted = true;
                break;
            }
        }
        if ctx.out_of_time() {
            stats.budget_exhausted = true;
            break;
        }
    }
    Ok(PartitionedOutcome { map: None, stats })
}

fn try_once(ctx: &mut Ctx<'_>, allowed: &VertexSet, part: &FPartition, rng: &mut impl Rng) -> Attempt {
    let host = ctx.host;
    let guest = ctx.guest;
    let mut f = EmbeddingMap::new(guest.vertex_count(), host.vertex_count());
    let mut pool: Vec<usize> = allowed.iter().collect();
    pool.shuffle(rng);

    // W_0: sequential, preferring high host degree
    for u in part.classes[0].iter().filter(|&u| guest.degree(u) > 0) {
        let anchors = ctx.placed_neighbour_images(u, &f);
        let choice = if anchors.is_empty() {
            pool.iter().copied().filter(|&x| !f.is_used(x)).max_by_key(|&x| host.degree(x))
        } else {
            ctx.common_candidates(&anchors, &f).into_iter().max_by_key(|&x| host.degree(x))
        };
        match choice {
            Some(x) => f.insert(u, x).expect("candidate is unused"),
            None => return Attempt::Stuck(0),
        }
    }

    for (i, class) in part.classes.iter().enumerate().skip(1) {
        let members: Vec<usize> = class.iter().filter(|&u| guest.degree(u) > 0).collect();
        if members.is_empty() {
            continue;
        }
        if ctx.matchings >= ctx.budget.max_matchings || ctx.out_of_time() {
            return Attempt::OutOfBudget;
        }
        ctx.matchings += 1;
        let candidates: Vec<Vec<usize>> = members
            .iter()
            .map(|&u| {
                let anchors = ctx.placed_neighbour_images(u, &f);
                let mut c = if anchors.is_empty() {
                    free_sample(&pool, &f, rng)
                } else {
                    ctx.common_candidates(&anchors, &f)
                };
                c.shuffle(rng);
                c
            })
            .collect();
        let matched = maximum_bipartite_matching(&candidates, host.vertex_count());
        if matched.iter().any(Option::is_none) {
            return Attempt::Stuck(i);
        }
        for (&u, x) in members.iter().zip(matched) {
            f.insert(u, x.expect("perfect matching")).expect("matching is injective");
        }
    }

    let spare: Vec<usize> = pool.iter().copied().filter(|&x| !f.is_used(x)).collect();
    let isolated = guest.vertices().filter(|&u| guest.degree(u) == 0);
    for (u, x) in isolated.zip(spare) {
        f.insert(u, x).expect("spare vertex is unused");
    }
    Attempt::Done(f)
}

/// Up to `FREE_CANDIDATES` unused pool vertices starting at a random offset.
fn free_sample(pool: &[usize], f: &EmbeddingMap, rng: &mut impl Rng) -> Vec<usize> {
    if pool.is_empty() {
        return Vec::new();
    }
    let start = rng.random_range(0..pool.len());
    pool[start..]
        .iter()
        .chain(&pool[..start])
        .copied()
        .filter(|&x| !f.is_used(x))
        .take(FREE_CANDIDATES)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::validate_embedding;
    use crate::generate::sample_gnp;
    use crate::partition::{build_f_partition, PartitionParams};

    fn partition(g: &Graph, q: usize) -> FPartition {
        build_f_partition(g, &PartitionParams::new(q, 3, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn edgeless_guest_injects() {
        let guest = Graph::empty(6);
        let host = Graph::path(8);
        let part = partition(&guest, 1);
        let out = embed_partitioned(&host, &VertexSet::range(0, 8), &guest, &part, &RetryBudget::default(), Seed(1))
            .unwrap();
        let f = out.map.unwrap();
        assert!(validate_embedding(&host, &guest, &f).unwrap());
    }

    #[test]
    fn single_edge_lands_in_k2() {
        let guest = Graph::path(2);
        let host = Graph::complete(2).disjoint_union(&Graph::empty(1));
        let part = partition(&guest, 1);
        let out = embed_partitioned(&host, &VertexSet::range(0, 3), &guest, &part, &RetryBudget::default(), Seed(2))
            .unwrap();
        let f = out.map.unwrap();
        assert!(validate_embedding(&host, &guest, &f).unwrap());
        assert_eq!(f.image(), VertexSet::range(0, 2));
    }

    #[test]
    fn path_into_dense_random_host() {
        let guest = Graph::path(10).with_isolated(2);
        let part = partition(&guest, 10);
        let mut ok = 0;
        for s in 0..20 {
            let host = sample_gnp(200, 0.3, Seed(s).derive("host")).unwrap();
            let out = embed_partitioned(&host, &VertexSet::range(0, 200), &guest, &part, &RetryBudget::default(), Seed(s))
                .unwrap();
            if let Some(f) = out.map {
                assert!(validate_embedding(&host, &guest, &f).unwrap());
                ok += 1;
            }
        }
        assert!(ok >= 19, "{ok} of 20");
    }

    #[test]
    fn impossible_instance_reports_stuck_class() {
        let guest = Graph::complete(3).with_isolated(4);
        let part = partition(&guest, 1);
        let host = Graph::path(10);
        let out = embed_partitioned(&host, &VertexSet::range(0, 10), &guest, &part, &RetryBudget::default(), Seed(3))
            .unwrap();
        assert!(out.map.is_none());
        assert!(out.stats.stuck_class.is_some());
        assert_eq!(out.stats.attempts, RetryBudget::default().max_restarts + 1);
    }

    #[test]
    fn respects_allowed_set() {
        let guest = Graph::path(5).with_isolated(3);
        let part = partition(&guest, 5);
        let host = Graph::complete(20);
        let allowed: VertexSet = (5..20).step_by(2).collect();
        let f = embed_partitioned(&host, &allowed, &guest, &part, &RetryBudget::default(), Seed(4))
            .unwrap()
            .map
            .unwrap();
        assert!(f.image().is_subset(&allowed));
    }
}
