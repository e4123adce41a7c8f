//! Seeded Monte Carlo sweeps over the edge probability, CSV output and a
//! bisection search for the empirical success threshold.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::SurgeryParams;
use crate::embedding::{layout_zones, run_pipeline, Outcome, PhaseStats, PipelineConfig, PipelineResult, RetryBudget};
use crate::error::{invalid, Error, Result};
use crate::generate::{generate_guest, sample_gnp, GuestSpec};
use crate::graph::Graph;
use crate::partition::PartitionParams;
use crate::rng::Seed;

pub const CSV_HEADER: [&str; 8] = [
    "seed",
    "p",
    "outcome",
    "phase1_ms",
    "phase2_ms",
    "phase3_ms",
    "total_ms",
    "fail_reason",
];

/// Edge probabilities: an explicit list or `points` values spaced
/// geometrically from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PGrid {
    List(Vec<f64>),
    Geometric { lo: f64, hi: f64, points: usize },
}

impl PGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            PGrid::List(v) => v.clone(),
            PGrid::Geometric { lo, hi, points } => match points {
                0 => Vec::new(),
                1 => vec![*lo],
                k => {
                    let ratio = (hi / lo).ln() / (*k - 1) as f64;
                    (0..*k).map(|i| lo * (ratio * i as f64).exp()).collect()
                }
            },
        }
    }
}

fn default_log_base() -> f64 {
    std::f64::consts::E
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub max_degree: usize,
    pub eps: f64,
    pub p: PGrid,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub guest: GuestSpec,
    #[serde(default)]
    pub surgery: Option<SurgeryParams>,
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub budget: RetryBudget,
    #[serde(default = "default_log_base")]
    pub log_base: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Write measured times into the CSV. Off by default so that output
    /// depends only on the configuration.
    #[serde(default)]
    pub record_timings: bool,
    /// Allows `max_degree < 3` so that rejection can be exercised.
    #[serde(default)]
    pub reject_check: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return invalid("trials must be >= 1");
        }
        if self.n < 2 {
            return invalid("n must be >= 2");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return invalid(format!("epsilon {} outside (0, 1)", self.eps));
        }
        if !(self.log_base > 1.0) {
            return invalid(format!("log base {} must exceed 1", self.log_base));
        }
        if let PGrid::Geometric { lo, hi, points } = self.p {
            if points == 0 || !(lo > 0.0 && lo <= hi) {
                return invalid("geometric grid needs points >= 1 and 0 < lo <= hi");
            }
        }
        let ps = self.p.values();
        if ps.is_empty() {
            return invalid("no p values");
        }
        if let Some(p) = ps.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return invalid(format!("p = {p} outside (0, 1]"));
        }
        if self.max_degree < 3 && !self.reject_check {
            return invalid(format!(
                "max degree {} < 3: guests of maximum degree 2 (disjoint unions of paths and cycles) are not supported",
                self.max_degree
            ));
        }
        if let Some(s) = &self.surgery {
            s.validate()?;
        }
        self.guest.validate()
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            max_degree: self.max_degree,
            eps: self.eps,
            log_base: self.log_base,
            surgery: self.surgery.clone(),
            q: self.q,
            budget: self.budget.clone(),
        }
    }

    pub fn trial_seed(&self, p_index: usize, trial: usize) -> Seed {
        Seed(self.base_seed).derive_indexed("trial", &[p_index as u64, trial as u64])
    }

    /// Effective parameters after defaults and clamping, one `# ` line each.
    pub fn provenance(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "n={} max_degree={} eps={} log_base={} trials={} base_seed={}",
            self.n, self.max_degree, self.eps, self.log_base, self.trials, self.base_seed
        )];
        lines.push(format!(
            "guest total_vertices={} vertices={} components={}",
            self.guest.total_vertices,
            self.guest.vertex_count(),
            serde_json::to_string(&self.guest.components).unwrap_or_default()
        ));
        let surgery = match &self.surgery {
            Some(s) => Ok(s.clone()),
            None => SurgeryParams::asymptotic_defaults(self.n, self.eps, self.log_base),
        };
        match &surgery {
            Ok(s) => lines.push(format!(
                "surgery sigma={} rho={} r_w={} max_cycle_length={} r_1={} asymptotic_mode={}",
                s.small_component_threshold,
                s.independence_radius,
                s.witness_radius,
                s.max_cycle_length,
                s.eq1_radius,
                s.asymptotic_mode
            )),
            Err(e) => lines.push(format!("surgery unavailable: {e}")),
        }
        if let Ok(s) = &surgery {
            match layout_zones(self.n, self.eps, s.max_cycle_length, self.log_base) {
                Ok(z) => {
                    let d = z.cycle_zones.values().next().map_or(0, |d| d.len());
                    lines.push(format!("zones r={} cycle_zones={} zone_size={}", z.r.len(), z.cycle_zones.len(), d));
                    let params = match self.q {
                        Some(q) => PartitionParams::new(q.clamp(1, z.r.len().max(1)), self.max_degree, self.eps),
                        None => PartitionParams::asymptotic_defaults(self.n, self.eps, self.max_degree, self.log_base, z.r.len()),
                    };
                    match params {
                        Ok(pp) => lines.push(format!("partition q={} t={} eps_slot={}", pp.q, pp.t(), pp.eps_slot)),
                        Err(e) => lines.push(format!("partition unavailable: {e}")),
                    }
                }
                Err(e) => lines.push(format!("zones unavailable: {e}")),
            }
        }
        let b = &self.budget;
        lines.push(format!(
            "budget max_restarts={} max_matchings={} max_backtrack_nodes={} max_cycle_undos={} wall_clock_ms={}",
            b.max_restarts,
            b.max_matchings,
            b.max_backtrack_nodes,
            b.max_cycle_undos,
            b.wall_clock_ms.map_or("none".to_string(), |m| m.to_string())
        ));
        lines
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub p: f64,
    pub p_index: usize,
    pub trial: usize,
    pub outcome: Outcome,
    pub fail_reason: Option<String>,
    pub stats: PhaseStats,
    pub wall_ms: u64,
}

/// Host and guest of one trial, regenerated from the configuration.
pub struct TrialInputs {
    pub seed: Seed,
    pub host: Graph,
    pub guest: Graph,
}

pub fn trial_inputs(cfg: &ExperimentConfig, p: f64, seed: Seed) -> Result<TrialInputs> {
    let host = sample_gnp(cfg.n, p, seed.derive("host"))?;
    let guest = generate_guest(&cfg.guest, seed.derive("guest"))?;
    Ok(TrialInputs { seed, host, guest })
}

/// One full trial, returning the inputs alongside the pipeline result.
pub fn run_trial_full(cfg: &ExperimentConfig, p: f64, seed: Seed) -> Result<(TrialInputs, PipelineResult)> {
    let inputs = trial_inputs(cfg, p, seed)?;
    let result = run_pipeline(&inputs.host, &inputs.guest, &cfg.pipeline_config(), seed.derive("pipeline"));
    Ok((inputs, result))
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

fn run_trial(cfg: &ExperimentConfig, p_index: usize, p: f64, trial: usize, seed: Seed) -> TrialRecord {
    let start = std::time::Instant::now();
    let caught = catch_unwind(AssertUnwindSafe(|| run_trial_full(cfg, p, seed)));
    let (outcome, fail_reason, mut stats) = match caught {
        Ok(Ok((_, r))) => (r.outcome, r.fail_reason, r.stats),
        Ok(Err(e)) => (Outcome::Error, Some(e.to_string()), PhaseStats::default()),
        Err(payload) => (Outcome::Error, Some(format!("panic: {}", panic_message(&*payload))), PhaseStats::default()),
    };
    let mut wall_ms = start.elapsed().as_millis() as u64;
    if !cfg.record_timings {
        stats.phase1_ms = 0;
        stats.phase2_ms = 0;
        stats.phase3_ms = 0;
        stats.total_ms = 0;
        wall_ms = 0;
    }
    TrialRecord { seed: seed.0, p, p_index, trial, outcome, fail_reason, stats, wall_ms }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs every `(p, trial)` pair; records come back in grid order whatever
/// the thread count.
pub fn run_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let ps = cfg.p.values();
    let jobs: Vec<(usize, f64, usize)> = ps
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| (0..cfg.trials).map(move |t| (i, p, t)))
        .collect();
    with_pool(threads, || jobs.par_iter().map(|&(i, p, t)| run_trial(cfg, i, p, t, cfg.trial_seed(i, t))).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
}

impl PointSummary {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error of the success rate.
    pub fn sigma(&self) -> f64 {
        let r = self.rate();
        (r * (1.0 - r) / self.trials as f64).sqrt()
    }
}

pub fn summarize(records: &[TrialRecord]) -> Vec<PointSummary> {
    let mut out: Vec<PointSummary> = Vec::new();
    for r in records {
        if out.last().is_none_or(|s| s.p.to_bits() != r.p.to_bits()) {
            out.push(PointSummary { p: r.p, trials: 0, successes: 0 });
        }
        let s = out.last_mut().expect("just pushed");
        s.trials += 1;
        s.successes += usize::from(r.outcome == Outcome::Success);
    }
    out
}

/// Adjacent grid points `(i, i + 1)` where the success rate drops by more
/// than two combined standard errors. Sorted by `p` first.
pub fn monotonicity_violations(summaries: &[PointSummary]) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..summaries.len()).collect();
    idx.sort_by(|&a, &b| summaries[a].p.total_cmp(&summaries[b].p));
    idx.windows(2)
        .filter(|w| {
            let (a, b) = (&summaries[w[0]], &summaries[w[1]]);
            let tol = 2.0 * (a.sigma().powi(2) + b.sigma().powi(2)).sqrt();
            b.rate() < a.rate() - tol
        })
        .map(|w| (w[0], w[1]))
        .collect()
}

/// CSV text: provenance comments, header, one row per trial, then summary
/// comments per grid point.
pub fn sweep_csv(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Result<String> {
    let mut out = String::new();
    for line in cfg.provenance() {
        writeln!(out, "# {line}").expect("write to string");
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.p.to_string(),
            r.outcome.as_str().to_string(),
            r.stats.phase1_ms.to_string(),
            r.stats.phase2_ms.to_string(),
            r.stats.phase3_ms.to_string(),
            r.stats.total_ms.to_string(),
            r.fail_reason.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    let summaries = summarize(records);
    for s in &summaries {
        writeln!(
            out,
            "# summary p={} trials={} successes={} rate={:.6} sigma={:.6}",
            s.p,
            s.trials,
            s.successes,
            s.rate(),
            s.sigma()
        )
        .expect("write to string");
    }
    let bad = monotonicity_violations(&summaries);
    if bad.is_empty() {
        writeln!(out, "# monotone within 2 sigma").expect("write to string");
    } else {
        for (a, b) in bad {
            writeln!(out, "# monotonicity flag: rate drops from p={} to p={}", summaries[a].p, summaries[b].p)
                .expect("write to string");
        }
    }
    Ok(out)
}

/// Bisection settings for [`estimate_threshold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSearch {
    pub target: f64,
    pub lo: f64,
    pub hi: f64,
    /// Stop once `hi / lo <= 1 + resolution`.
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// Geometric midpoint of the final bracket, or `lo` when below range.
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
    pub rate_lo: f64,
    pub rate_hi: f64,
    /// Standard error of the rates at the bracket ends.
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    /// The target is already met at the lower end of the range.
    pub below_range: bool,
    pub evaluations: usize,
}

/// Geometric bisection on a success-rate oracle returning `(rate, sigma)`.
pub fn bisect_threshold(
    search: &ThresholdSearch,
    mut rate: impl FnMut(f64) -> Result<(f64, f64)>,
) -> Result<ThresholdEstimate> {
    let ThresholdSearch { target, lo, hi, resolution } = *search;
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return invalid(format!("threshold range [{lo}, {hi}] must satisfy 0 < lo < hi <= 1"));
    }
    if !(resolution > 0.0) || !(0.0..=1.0).contains(&target) {
        return invalid("resolution must be positive and target in [0, 1]");
    }
    let (mut rl, mut sl) = rate(lo)?;
    let mut evaluations = 1;
    if rl >= target {
        return Ok(ThresholdEstimate {
            p: lo,
            lo,
            hi: lo,
            rate_lo: rl,
            rate_hi: rl,
            sigma_lo: sl,
            sigma_hi: sl,
            below_range: true,
            evaluations,
        });
    }
    let (mut rh, mut sh) = rate(hi)?;
    evaluations += 1;
    if rh < target {
        return invalid(format!(
            "success rate {rh} at p = {hi} is below the target {target}; widen the range upwards"
        ));
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi / lo > 1.0 + resolution {
        let mid = (lo * hi).sqrt();
        let (r, s) = rate(mid)?;
        evaluations += 1;
        if r >= target {
            (hi, rh, sh) = (mid, r, s);
        } else {
            (lo, rl, sl) = (mid, r, s);
        }
    }
    Ok(ThresholdEstimate {
        p: (lo * hi).sqrt(),
        lo,
        hi,
        rate_lo: rl,
        rate_hi: rh,
        sigma_lo: sl,
        sigma_hi: sh,
        below_range: false,
        evaluations,
    })
}

/// Smallest `p` (to the given resolution) at which `cfg.trials` trials reach
/// the target success rate. The grid in `cfg.p` is ignored; trial seeds
/// depend on the bits of `p`, so repeated calls agree.
pub fn estimate_threshold(
    cfg: &ExperimentConfig,
    search: &ThresholdSearch,
    threads: Option<usize>,
) -> Result<ThresholdEstimate> {
    cfg.validate()?;
    bisect_threshold(search, |p| {
        let recs: Vec<TrialRecord> = with_pool(threads, || {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = Seed(cfg.base_seed).derive_indexed("threshold", &[p.to_bits(), t as u64]);
                    run_trial(cfg, 0, p, t, seed)
                })
                .collect()
        })?;
        let s = PointSummary {
            p,
            trials: recs.len(),
            successes: recs.iter().filter(|r| r.outcome == Outcome::Success).count(),
        };
        Ok((s.rate(), s.sigma()))
    })
}
