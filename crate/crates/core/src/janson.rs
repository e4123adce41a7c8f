//! Janson lower-tail bound and the expectation / correlation sums it needs,
//! in closed form and by brute-force enumeration.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{connected_components, Graph, VertexSet};

/// Nonnegative real stored as its natural logarithm (`-inf` for zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { ln: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "log value is NaN");
        LogValue { ln }
    }

    pub fn new(x: f64) -> Result<Self> {
        if !(x >= 0.0) || x.is_infinite() {
            return invalid(format!("{x} is not a finite nonnegative number"));
        }
        Ok(LogValue { ln: x.ln() })
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Plain value; underflows to 0 and overflows to infinity.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// `self^k`, with `0^0 = 1`.
    pub fn pow(self, k: f64) -> Self {
        if k == 0.0 {
            LogValue::ONE
        } else {
            LogValue::from_ln(self.ln * k)
        }
    }

    pub fn sum(values: impl IntoIterator<Item = LogValue>) -> Self {
        values.into_iter().fold(LogValue::ZERO, |a, b| a + b)
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, other: LogValue) -> LogValue {
        let (hi, lo) = if self.ln >= other.ln { (self.ln, other.ln) } else { (other.ln, self.ln) };
        if lo == f64::NEG_INFINITY {
            return LogValue { ln: hi };
        }
        LogValue { ln: hi + (lo - hi).exp().ln_1p() }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero() || other.is_zero() {
            return LogValue::ZERO;
        }
        LogValue { ln: self.ln + other.ln }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ln >= -690.0 && self.ln <= 690.0 {
            write!(f, "{:.6e}", self.value())
        } else {
            write!(f, "exp({:.6})", self.ln)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JansonParams {
    pub mu: LogValue,
    pub delta: LogValue,
    pub gamma: f64,
}

/// `exp(-gamma^2 mu^2 / (2 (mu + delta)))`.
pub fn janson_tail_bound(p: &JansonParams) -> Result<LogValue> {
    if !(p.gamma > 0.0 && p.gamma < 1.0) {
        return invalid(format!("gamma {} outside (0, 1)", p.gamma));
    }
    if p.mu.is_zero() {
        return invalid("mu must be positive");
    }
    let log_exponent = 2.0 * p.gamma.ln() + 2.0 * p.mu.ln() - 2f64.ln() - (p.mu + p.delta).ln();
    Ok(LogValue::from_ln(-log_exponent.exp()))
}

fn ln_prob(p: f64) -> Result<LogValue> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    LogValue::new(p)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `m^v p^e` for a pattern with `v` vertices and `e` edges.
pub fn mu_canonical_copies(pattern: &Graph, part_size: usize, p: f64) -> Result<LogValue> {
    if part_size == 0 {
        return invalid("part size must be >= 1");
    }
    let m = LogValue::new(part_size as f64)?;
    Ok(m.pow(pattern.vertex_count() as f64) * ln_prob(p)?.pow(pattern.edge_count() as f64))
}

/// Closed-form upper bound on the correlation sum for canonical copies:
/// overlaps on `j` vertices carry at most `C(j, 2)` shared edges for small
/// `j` and `(j Delta - 1)/2` beyond `Delta`.
pub fn delta_upper_canonical(pattern: &Graph, part_size: usize, p: f64, max_degree: usize) -> Result<LogValue> {
    if part_size == 0 {
        return invalid("part size must be >= 1");
    }
    if pattern.max_degree() > max_degree {
        return invalid("pattern exceeds the degree bound");
    }
    if connected_components(pattern).len() > 1 {
        return invalid("pattern must be connected");
    }
    let v = pattern.vertex_count();
    let e = pattern.edge_count() as f64;
    let m = LogValue::new(part_size as f64)?;
    let lp = ln_prob(p)?;
    let term = |j: usize, shared: f64| -> LogValue {
        LogValue::from_ln(ln_binomial(v, j)) * m.pow((2 * v - j) as f64) * lp.pow(2.0 * e - shared)
    };
    let first_end = max_degree.min(v.saturating_sub(1));
    let first = (2..=first_end).map(|j| term(j, (j * (j - 1) / 2) as f64));
    let second = (max_degree + 1..v).map(|j| term(j, (j * max_degree) as f64 / 2.0 - 0.5));
    Ok(LogValue::sum(first.chain(second)))
}

/// `k m^g p^((Delta - 1) g)`.
pub fn mu_cycle_family(k: usize, g: usize, part_size: usize, p: f64, max_degree: usize) -> Result<LogValue> {
    if g < 3 || k == 0 || part_size == 0 || max_degree == 0 {
        return invalid("need g >= 3, k >= 1, part size >= 1, max degree >= 1");
    }
    let lk = LogValue::new(k as f64)?;
    let m = LogValue::new(part_size as f64)?;
    Ok(lk * m.pow(g as f64) * ln_prob(p)?.pow(((max_degree - 1) * g) as f64))
}

/// Explicit edge sets (normalised `u < v`, sorted) of a family of copies.
pub type Family = Vec<Vec<(usize, usize)>>;

const MAX_COPIES: usize = 1_000_000;

fn normalise(mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

fn check_parts(parts: &[VertexSet]) -> Result<usize> {
    let mut seen = VertexSet::new();
    let mut count: usize = 1;
    for part in parts {
        if part.is_empty() {
            return invalid("empty part");
        }
        if !part.is_disjoint(&seen) {
            return invalid("parts must be disjoint");
        }
        seen = seen.union(part);
        count = count.saturating_mul(part.len());
    }
    Ok(count)
}

/// Every copy with pattern vertex `j` placed in `parts[j]`.
pub fn canonical_copies(pattern: &Graph, parts: &[VertexSet]) -> Result<Family> {
    if parts.len() != pattern.vertex_count() {
        return invalid(format!("{} parts for a pattern on {} vertices", parts.len(), pattern.vertex_count()));
    }
    let count = check_parts(parts)?;
    if count > MAX_COPIES {
        return invalid(format!("{count} copies exceed the enumeration cap {MAX_COPIES}"));
    }
    let parts: Vec<Vec<usize>> = parts.iter().map(|p| p.iter().collect()).collect();
    let mut idx = vec![0usize; parts.len()];
    let mut family = Vec::with_capacity(count);
    for _ in 0..count {
        let pos: Vec<usize> = idx.iter().zip(&parts).map(|(&i, p)| p[i]).collect();
        family.push(normalise(pattern.edges().map(|(a, b)| (pos[a], pos[b])).collect()));
        for (i, p) in idx.iter_mut().zip(&parts) {
            *i += 1;
            if *i < p.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(family)
}

/// Cycles `(c_1, ..., c_g)` with `c_j` in `parts[j]`, joined to the anchor
/// sets of one of the `k` requests: copy `C + i` has the cycle edges plus
/// `c_j w` for every `w` in `anchors[i][j]`.
pub fn cycle_family_copies(parts: &[VertexSet], anchors: &[Vec<VertexSet>]) -> Result<Family> {
    let g = parts.len();
    if g < 3 {
        return invalid("cycles need at least 3 parts");
    }
    if anchors.iter().any(|a| a.len() != g) {
        return invalid("every request needs one anchor set per position");
    }
    let count = check_parts(parts)?.saturating_mul(anchors.len());
    if count > MAX_COPIES {
        return invalid(format!("{count} copies exceed the enumeration cap {MAX_COPIES}"));
    }
    let cycle = Graph::cycle(g);
    let cycles = canonical_copies(&cycle, parts)?;
    let parts_v: Vec<Vec<usize>> = parts.iter().map(|p| p.iter().collect()).collect();
    let mut family = Vec::with_capacity(count);
    for request in anchors {
        let mut idx = vec![0usize; g];
        for c in &cycles {
            let mut edges = c.clone();
            for j in 0..g {
                let x = parts_v[j][idx[j]];
                edges.extend(request[j].iter().map(|w| (x, w)));
            }
            family.push(normalise(edges));
            for (i, p) in idx.iter_mut().zip(&parts_v) {
                *i += 1;
                if *i < p.len() {
                    break;
                }
                *i = 0;
            }
        }
    }
    Ok(family)
}

/// Exact `mu = sum p^|E_i|` and `delta = sum over ordered pairs i != j that
/// share an edge of p^(|E_i| + |E_j| - |E_i & E_j|)`.
pub fn brute_force_family(family: &Family, p: f64) -> Result<(LogValue, LogValue)> {
    if family.len() > MAX_COPIES {
        return invalid("family exceeds the enumeration cap");
    }
    let lp = ln_prob(p)?;
    let mu = LogValue::sum(family.iter().map(|e| lp.pow(e.len() as f64)));

    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, edges) in family.iter().enumerate() {
        for &e in edges {
            by_edge.entry(e).or_default().push(i);
        }
    }
    let mut terms = Vec::new();
    let mut shared: HashMap<usize, usize> = HashMap::new();
    for (i, edges) in family.iter().enumerate() {
        shared.clear();
        for e in edges {
            for &j in &by_edge[e] {
                if j != i {
                    *shared.entry(j).or_default() += 1;
                }
            }
        }
        for (&j, &s) in &shared {
            terms.push(lp.pow((edges.len() + family[j].len() - s) as f64));
        }
    }
    // sort so the floating-point sum does not depend on hash order
    terms.sort_by(|a, b| a.ln().total_cmp(&b.ln()));
    Ok((mu, LogValue::sum(terms)))
}

/// Exact `(mu, delta)` for canonical copies of `pattern` over `parts`.
pub fn brute_force_mu_delta(pattern: &Graph, parts: &[VertexSet], p: f64) -> Result<(LogValue, LogValue)> {
    brute_force_family(&canonical_copies(pattern, parts)?, p)
}

/// Consecutive parts of size `m` starting at vertex 0.
pub fn equal_parts(count: usize, m: usize) -> Vec<VertexSet> {
    (0..count).map(|j| VertexSet::range(j * m, (j + 1) * m)).collect()
}
