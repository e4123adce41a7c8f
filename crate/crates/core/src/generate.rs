//! Host graphs `G(n, p)` and bounded-degree guest graphs assembled from
//! component recipes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Path,
    Cycle,
    Clique,
    RandomBounded,
    /// Wrap-around grid: a circular ladder when the degree cap is 3, a torus
    /// `C_a x C_b` when it is at least 4.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecipe {
    pub kind: ComponentKind,
    pub size: usize,
    pub count: usize,
}

impl ComponentRecipe {
    pub fn new(kind: ComponentKind, size: usize, count: usize) -> Self {
        ComponentRecipe { kind, size, count }
    }
}

/// A member of the bounded-degree guest family: at most `total_vertices`
/// vertices, maximum degree at most `max_degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuestSpec {
    pub total_vertices: usize,
    pub max_degree: usize,
    pub components: Vec<ComponentRecipe>,
}

fn torus_sides(size: usize) -> Option<(usize, usize)> {
    let mut a = (size as f64).sqrt() as usize;
    while a >= 3 {
        if size.is_multiple_of(a) {
            return Some((a, size / a));
        }
        a -= 1;
    }
    None
}

impl GuestSpec {
    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(|c| c.size * c.count).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let delta = self.max_degree;
        for (i, c) in self.components.iter().enumerate() {
            let ok = match c.kind {
                ComponentKind::Path => c.size >= 1 && (c.size <= 2 || delta >= 2) && (c.size < 2 || delta >= 1),
                ComponentKind::Cycle => c.size >= 3 && delta >= 2,
                ComponentKind::Clique => c.size >= 1 && c.size <= delta + 1,
                ComponentKind::RandomBounded => c.size >= 2 && delta >= 1 && (c.size == 2 || delta >= 2),
                ComponentKind::Grid => match delta {
                    0..=2 => false,
                    3 => c.size >= 6 && c.size % 2 == 0,
                    _ => torus_sides(c.size).is_some(),
                },
            };
            if !ok {
                return invalid(format!(
                    "component recipe #{i} ({:?} of size {}) is not realizable with max degree {delta}",
                    c.kind, c.size
                ));
            }
        }
        let total = self.vertex_count();
        if total > self.total_vertices {
            return invalid(format!(
                "recipe needs {total} vertices, above the limit {}",
                self.total_vertices
            ));
        }
        Ok(())
    }
}

/// `G(n, p)`: every pair independently with probability `p`, enumerated with
/// geometric skips so sparse hosts cost `O(n + m)`.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("edge probability {p} outside [0, 1]"));
    }
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = seed.derive("gnp").rng();
    let skip = Geometric::new(p).expect("p in (0, 1)");
    let mut adjacency = vec![Vec::new(); n];
    // pairs (v, w) with w < v, in row-major order
    let mut v: usize = 1;
    let mut w: u64 = 0;
    let mut first = true;
    loop {
        let gap = skip.sample(&mut rng);
        w = if first { gap } else { w.saturating_add(1).saturating_add(gap) };
        first = false;
        while v < n && w >= v as u64 {
            w -= v as u64;
            v += 1;
        }
        if v >= n {
            break;
        }
        adjacency[v].push(w as usize);
        adjacency[w as usize].push(v);
    }
    Ok(Graph::from_adjacency(adjacency))
}

pub fn verify_max_degree(g: &Graph, max_degree: usize) -> bool {
    g.max_degree() <= max_degree
}

/// Connected graph with degrees capped at `max_degree`: a uniformly random
/// spanning path plus random edges between under-full vertices until the
/// insertion attempts stall.
pub fn random_bounded_degree(size: usize, max_degree: usize, seed: Seed) -> Result<Graph> {
    if size < 2 || max_degree == 0 {
        return invalid(format!("random bounded graph needs size >= 2 and max degree >= 1, got {size}, {max_degree}"));
    }
    if size > 2 && max_degree < 2 {
        return invalid("a connected graph on more than 2 vertices needs max degree >= 2");
    }
    let mut rng = seed.derive("random_bounded").rng();
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let mut adjacency = vec![Vec::with_capacity(max_degree); size];
    for pair in order.windows(2) {
        adjacency[pair[0]].push(pair[1]);
        adjacency[pair[1]].push(pair[0]);
    }
    let mut open: Vec<usize> = (0..size)
        .filter(|&v| adjacency[v].len() < max_degree)
        .collect();
    let mut stalled = 0;
    while open.len() >= 2 && stalled < 256 {
        let i = rng.random_range(0..open.len());
        let j = rng.random_range(0..open.len());
        let (a, b) = (open[i], open[j]);
        if a == b || adjacency[a].contains(&b) {
            stalled += 1;
            continue;
        }
        stalled = 0;
        adjacency[a].push(b);
        adjacency[b].push(a);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        for idx in [hi, lo] {
            if adjacency[open[idx]].len() >= max_degree {
                open.swap_remove(idx);
            }
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}

fn component(kind: ComponentKind, size: usize, max_degree: usize, seed: Seed) -> Result<Graph> {
    Ok(match kind {
        ComponentKind::Path => Graph::path(size),
        ComponentKind::Cycle => Graph::cycle(size),
        ComponentKind::Clique => Graph::complete(size),
        ComponentKind::RandomBounded => random_bounded_degree(size, max_degree, seed)?,
        ComponentKind::Grid if max_degree == 3 => {
            let k = size / 2;
            let mut edges = Vec::with_capacity(3 * k);
            for i in 0..k {
                let next = (i + 1) % k;
                edges.push((i, next));
                edges.push((k + i, k + next));
                edges.push((i, k + i));
            }
            Graph::from_edges(size, edges)?
        }
        ComponentKind::Grid => {
            let (a, b) = torus_sides(size).expect("validated");
            let id = |r: usize, c: usize| r * b + c;
            let mut edges = Vec::with_capacity(2 * size);
            for r in 0..a {
                for c in 0..b {
                    edges.push((id(r, c), id(r, (c + 1) % b)));
                    edges.push((id(r, c), id((r + 1) % a, c)));
                }
            }
            Graph::from_edges(size, edges)?
        }
    })
}

/// Disjoint union of the recipe's components, laid out consecutively in
/// recipe order.
pub fn generate_guest(spec: &GuestSpec, seed: Seed) -> Result<Graph> {
    spec.validate()?;
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(spec.vertex_count());
    for (ri, recipe) in spec.components.iter().enumerate() {
        for copy in 0..recipe.count {
            let part = component(
                recipe.kind,
                recipe.size,
                spec.max_degree,
                seed.derive_indexed("component", &[ri as u64, copy as u64]),
            )?;
            let shift = adjacency.len();
            adjacency.extend(
                part.vertices()
                    .map(|v| part.neighbors(v).iter().map(|&w| w + shift).collect()),
            );
        }
    }
    Ok(Graph::from_adjacency(adjacency))
}
