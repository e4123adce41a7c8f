use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::VertexSet;

/// Reserved host regions: `r` for the core, `cycle_zones[g]` for removed
/// cycles of length `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneLayout {
    pub r: VertexSet,
    pub cycle_zones: BTreeMap<usize, VertexSet>,
}

impl ZoneLayout {
    /// Host vertices in no zone.
    pub fn unreserved(&self, n: usize) -> VertexSet {
        let end = self.cycle_zones.values().filter_map(VertexSet::max).chain(self.r.max()).max();
        VertexSet::range(end.map_or(0, |e| e + 1), n)
    }

    pub fn zone_of(&self, g: usize) -> Option<&VertexSet> {
        self.cycle_zones.get(&g)
    }
}

/// `|R| = floor((1 - eps/2) n)` lowest ids, then `D_3, ..., D_l` of
/// `floor(eps n / (4 log n))` ids each.
pub fn layout_zones(n: usize, eps: f64, l: usize, log_base: f64) -> Result<ZoneLayout> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("epsilon {eps} outside (0, 1)"));
    }
    if n < 2 || !(log_base > 1.0) {
        return invalid("need n >= 2 and log base > 1");
    }
    let r = ((1.0 - eps / 2.0) * n as f64 + 1e-9).floor() as usize;
    let log_n = (n as f64).ln() / log_base.ln();
    let d = (eps * n as f64 / (4.0 * log_n) + 1e-9).floor() as usize;
    let zones = l.saturating_sub(2);
    let needed = r + zones * d;
    if needed > n {
        return Err(Error::Capacity { needed, available: n });
    }
    let mut cycle_zones = BTreeMap::new();
    let mut next = r;
    for g in 3..=l {
        cycle_zones.insert(g, VertexSet::range(next, next + d));
        next += d;
    }
    Ok(ZoneLayout { r: VertexSet::range(0, r), cycle_zones })
}
