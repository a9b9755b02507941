//! Discrete-event simulation of the single-server queue under any policy of the
//! Nudge family. Each arriving type-1 job reads the types of the last M arrivals,
//! evaluates `n(s)` and moves ahead of those of the `n(s)` most recent type-2
//! arrivals that are still waiting. The job in service is never passed.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phtype::JobMix;
use crate::policy::{NamedPolicy, PolicyFn};

/// Largest window a named policy may use in the simulator.
pub const SIM_WINDOW_CAP: usize = 63;

/// Policy as seen by the simulator: a table, or a named rule evaluated directly.
#[derive(Debug, Clone, PartialEq)]
pub enum SimPolicy {
    Table(PolicyFn),
    Named(NamedPolicy),
}

impl SimPolicy {
    pub fn window(&self) -> usize {
        match self {
            SimPolicy::Table(t) => t.window(),
            SimPolicy::Named(p) => p.window(),
        }
    }

    /// `n` at the string encoded by `idx` (bit `k-1` set when the `k`-th last arrival is type-2).
    fn n_index(&self, idx: u64, buf: &mut [u8]) -> usize {
        match self {
            SimPolicy::Table(t) => t.n_index(idx as usize),
            SimPolicy::Named(NamedPolicy::Fcfs) => 0,
            SimPolicy::Named(NamedPolicy::NudgeM { .. }) => idx.count_ones() as usize,
            SimPolicy::Named(NamedPolicy::NudgeKM { k, .. }) => (idx.count_ones() as usize).min(*k),
            SimPolicy::Named(NamedPolicy::NudgeK { k }) => (idx.trailing_ones() as usize).min(*k),
            SimPolicy::Named(p) => {
                for (i, b) in buf.iter_mut().enumerate() {
                    *b = if idx >> i & 1 == 1 { 2 } else { 1 };
                }
                p.n(buf)
            }
        }
    }
}

/// Job class selector for queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JobClass {
    Type1,
    Type2,
    Any,
}

impl JobClass {
    fn slot(self) -> usize {
        match self {
            JobClass::Type1 => 0,
            JobClass::Type2 => 1,
            JobClass::Any => 2,
        }
    }
}

/// Waiting time (until service starts) or response time (until completion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Wait,
    Response,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub mix: JobMix,
    pub policy: SimPolicy,
    pub n_jobs: usize,
    pub warmup: usize,
    pub seed: u64,
    pub batches: usize,
    /// Points at which tail probabilities are recorded.
    pub times: Vec<f64>,
    /// Workload bands `[lo, hi)` for pass counts of type-2 jobs by the work found on arrival.
    pub workload_bands: Vec<(f64, f64)>,
}

impl SimConfig {
    /// Defaults: 10% warmup, 30 batches, no tail points.
    pub fn new(mix: JobMix, policy: SimPolicy, n_jobs: usize, seed: u64) -> Self {
        Self { mix, policy, n_jobs, warmup: n_jobs / 10, seed, batches: 30, times: Vec::new(), workload_bands: Vec::new() }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_workload_bands(mut self, bands: Vec<(f64, f64)>) -> Self {
        self.workload_bands = bands;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mix.lambda() < 1.0) {
            return Err(Error::Instability { lambda: self.mix.lambda() });
        }
        if self.batches < 2 {
            return Err(Error::Input("at least two batches are needed".into()));
        }
        if self.n_jobs <= self.warmup || self.n_jobs - self.warmup < self.batches {
            return Err(Error::Input(format!(
                "{} jobs with warmup {} leave fewer than {} measured jobs",
                self.n_jobs, self.warmup, self.batches
            )));
        }
        if self.policy.window() > SIM_WINDOW_CAP {
            return Err(Error::Complexity { what: "simulated window", value: self.policy.window(), cap: SIM_WINDOW_CAP });
        }
        if let SimPolicy::Named(p) = &self.policy {
            p.check()?;
        }
        if self.times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::Input("tail points must be finite and nonnegative".into()));
        }
        if self.workload_bands.iter().any(|&(lo, hi)| !(lo >= 0.0 && hi > lo)) {
            return Err(Error::Input("workload bands need 0 <= lo < hi".into()));
        }
        Ok(())
    }
}

/// Batch-means point estimate and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    fn from_batches(values: &[f64]) -> Self {
        let b = values.len() as f64;
        let mean = values.iter().sum::<f64>() / b;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
        Self { mean, se: (var / b).sqrt() }
    }

    /// `|mean - target| <= k * se`, with a floor for degenerate zero-variance cases.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + 1e-12 * target.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub count: u64,
    pub mean_wait: Estimate,
    pub mean_response: Estimate,
    /// Tail estimates at [`SimStats::times`].
    pub wait_ccdf: Vec<Estimate>,
    pub response_ccdf: Vec<Estimate>,
    /// Number of measured jobs with value above each time point.
    pub wait_exceed: Vec<u64>,
    pub response_exceed: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStats {
    pub times: Vec<f64>,
    /// Type-1, type-2 and all jobs.
    pub classes: [ClassStats; 3],
    /// Fraction of type-2 jobs passed `k` times, `k = 0..=window`.
    pub passed_hist: Vec<Estimate>,
    /// Fraction of type-1 jobs that passed `k` jobs.
    pub passes_hist: Vec<Estimate>,
    /// Largest number of passes observed by any single type-1 job and of times
    /// any single type-2 job was passed, over all jobs including warmup.
    pub max_passes: usize,
    pub max_passed: usize,
    pub busy_fraction: f64,
    pub measured: u64,
    /// Per workload band: pass-count pmf of the type-2 jobs that found that much work on arrival.
    pub band_passed: Vec<Vec<Estimate>>,
    pub band_counts: Vec<u64>,
}

impl SimStats {
    pub fn class(&self, class: JobClass) -> &ClassStats {
        &self.classes[class.slot()]
    }
}

#[derive(Clone)]
struct Accum {
    count: u64,
    wait: f64,
    response: f64,
    wait_exceed: Vec<u64>,
    response_exceed: Vec<u64>,
}

impl Accum {
    fn new(nt: usize) -> Self {
        Self { count: 0, wait: 0.0, response: 0.0, wait_exceed: vec![0; nt], response_exceed: vec![0; nt] }
    }
}

struct Batch {
    classes: [Accum; 3],
    passed: Vec<u64>,
    passes: Vec<u64>,
    band_passed: Vec<Vec<u64>>,
    band_count: Vec<u64>,
}

struct Job {
    arrival: f64,
    size: f64,
    type2: bool,
    started: bool,
    passes: u32,
    found: f64,
}

fn exp_sample(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs one replication.
pub fn simulate(config: &SimConfig) -> Result<SimStats> {
    config.validate()?;
    let mix = &config.mix;
    let lambda = mix.lambda();
    let p = mix.p();
    let window = config.policy.window();
    let nt = config.times.len();
    let measured = config.n_jobs - config.warmup;

    let mut arrivals = stream(config.seed, 0);
    let mut types = stream(config.seed, 1);
    let mut services = stream(config.seed, 2);

    let mut jobs: Vec<Job> = Vec::with_capacity(config.n_jobs);
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut recent: VecDeque<usize> = VecDeque::with_capacity(window + 1);
    let mut buf = vec![0u8; window];
    let mut batches: Vec<Batch> = (0..config.batches)
        .map(|_| Batch {
            classes: [Accum::new(nt), Accum::new(nt), Accum::new(nt)],
            passed: vec![0; window + 1],
            passes: vec![0; window + 1],
            band_passed: vec![vec![0; window + 1]; config.workload_bands.len()],
            band_count: vec![0; config.workload_bands.len()],
        })
        .collect();
    let mut max_passes = 0usize;
    let mut max_passed = 0usize;
    let mut busy = 0.0;
    let mut server_free_at = 0.0f64;
    let mut server_idle = true;
    let mut clock = 0.0;
    // Time at which all work present so far would be done.
    let mut work_done_at = 0.0f64;

    let record = |jobs: &[Job], id: usize, start: f64, batches: &mut [Batch]| {
        if id < config.warmup {
            return;
        }
        let job = &jobs[id];
        let b = (id - config.warmup) * config.batches / measured;
        let wait = start - job.arrival;
        let response = wait + job.size;
        let batch = &mut batches[b];
        let slot = usize::from(job.type2);
        for s in [slot, 2] {
            let acc = &mut batch.classes[s];
            acc.count += 1;
            acc.wait += wait;
            acc.response += response;
            for (i, &t) in config.times.iter().enumerate() {
                acc.wait_exceed[i] += u64::from(wait > t);
                acc.response_exceed[i] += u64::from(response > t);
            }
        }
        let k = (job.passes as usize).min(window);
        if job.type2 {
            batch.passed[k] += 1;
            for (i, &(lo, hi)) in config.workload_bands.iter().enumerate() {
                if job.found >= lo && job.found < hi {
                    batch.band_passed[i][k] += 1;
                    batch.band_count[i] += 1;
                }
            }
        } else {
            batch.passes[k] += 1;
        }
    };

    // Starts queued jobs until the server is busy past `until`.
    let advance = |until: f64,
                       jobs: &mut Vec<Job>,
                       queue: &mut VecDeque<usize>,
                       batches: &mut [Batch],
                       server_free_at: &mut f64,
                       server_idle: &mut bool,
                       busy: &mut f64| {
        while *server_free_at <= until {
            match queue.pop_front() {
                Some(id) => {
                    let start = *server_free_at;
                    jobs[id].started = true;
                    *server_free_at = start + jobs[id].size;
                    *busy += jobs[id].size;
                    record(jobs, id, start, batches);
                }
                None => {
                    *server_idle = true;
                    break;
                }
            }
        }
    };

    for id in 0..config.n_jobs {
        clock += exp_sample(&mut arrivals, lambda);
        let type2 = types.random::<f64>() >= p;
        let dist = if type2 { mix.ph2() } else { mix.ph1() };
        let size = dist.sample(&mut services);
        advance(clock, &mut jobs, &mut queue, &mut batches, &mut server_free_at, &mut server_idle, &mut busy);
        let found = (work_done_at - clock).max(0.0);
        work_done_at = clock + found + size;
        jobs.push(Job { arrival: clock, size, type2, started: false, passes: 0, found });

        let mut pos = queue.len();
        if !type2 && window > 0 {
            let mut idx = 0u64;
            for (k, &j) in recent.iter().enumerate() {
                if jobs[j].type2 {
                    idx |= 1 << k;
                }
            }
            let n = config.policy.n_index(idx, &mut buf);
            if n > 0 {
                let targets: Vec<usize> = recent
                    .iter()
                    .copied()
                    .filter(|&j| jobs[j].type2)
                    .take(n)
                    .filter(|&j| !jobs[j].started)
                    .collect();
                let mut found = 0;
                for (q, &j) in queue.iter().enumerate().rev() {
                    if found == targets.len() {
                        break;
                    }
                    if targets.contains(&j) {
                        pos = q;
                        found += 1;
                    }
                }
                debug_assert_eq!(found, targets.len());
                for &j in &targets {
                    jobs[j].passes += 1;
                    max_passed = max_passed.max(jobs[j].passes as usize);
                }
                jobs[id].passes = targets.len() as u32;
                max_passes = max_passes.max(targets.len());
            }
        }
        queue.insert(pos, id);
        if server_idle {
            server_idle = false;
            server_free_at = clock;
            advance(clock, &mut jobs, &mut queue, &mut batches, &mut server_free_at, &mut server_idle, &mut busy);
        }
        if window > 0 {
            recent.push_front(id);
            recent.truncate(window);
        }
    }
    advance(f64::INFINITY, &mut jobs, &mut queue, &mut batches, &mut server_free_at, &mut server_idle, &mut busy);
    let horizon = server_free_at.max(clock);

    let class_stats = |slot: usize| -> ClassStats {
        let per = |f: &dyn Fn(&Accum) -> f64| -> Estimate {
            let values: Vec<f64> = batches
                .iter()
                .map(|b| {
                    let a = &b.classes[slot];
                    if a.count == 0 { 0.0 } else { f(a) / a.count as f64 }
                })
                .collect();
            Estimate::from_batches(&values)
        };
        ClassStats {
            count: batches.iter().map(|b| b.classes[slot].count).sum(),
            mean_wait: per(&|a| a.wait),
            mean_response: per(&|a| a.response),
            wait_ccdf: (0..nt).map(|i| per(&|a| a.wait_exceed[i] as f64)).collect(),
            response_ccdf: (0..nt).map(|i| per(&|a| a.response_exceed[i] as f64)).collect(),
            wait_exceed: (0..nt).map(|i| batches.iter().map(|b| b.classes[slot].wait_exceed[i]).sum()).collect(),
            response_exceed: (0..nt)
                .map(|i| batches.iter().map(|b| b.classes[slot].response_exceed[i]).sum())
                .collect(),
        }
    };
    let hist = |pick: &dyn Fn(&Batch) -> (&[u64], u64)| -> Vec<Estimate> {
        (0..=window)
            .map(|k| {
                let values: Vec<f64> = batches
                    .iter()
                    .map(|b| {
                        let (h, total) = pick(b);
                        if total == 0 { 0.0 } else { h[k] as f64 / total as f64 }
                    })
                    .collect();
                Estimate::from_batches(&values)
            })
            .collect()
    };

    Ok(SimStats {
        times: config.times.clone(),
        classes: [class_stats(0), class_stats(1), class_stats(2)],
        passed_hist: hist(&|b| (&b.passed, b.classes[1].count)),
        passes_hist: hist(&|b| (&b.passes, b.classes[0].count)),
        max_passes,
        max_passed,
        busy_fraction: if horizon > 0.0 { busy / horizon } else { 0.0 },
        measured: measured as u64,
        band_passed: (0..config.workload_bands.len())
            .map(|i| hist(&|b| (&b.band_passed[i], b.band_count[i])))
            .collect(),
        band_counts: (0..config.workload_bands.len())
            .map(|i| batches.iter().map(|b| b.band_count[i]).sum())
            .collect(),
    })
}

/// Runs `count` independent replications in parallel with seeds `seed, seed+1, ...`.
pub fn replicate(config: &SimConfig, count: usize) -> Result<Vec<SimStats>> {
    config.validate()?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..count)
            .map(|r| {
                let mut cfg = config.clone();
                cfg.seed = config.seed.wrapping_add(r as u64);
                scope.spawn(move || simulate(&cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| Error::Estimation("simulation thread panicked".into()))?)
            .collect()
    })
}

/// Batch-means tail estimate at one of the recorded time points.
pub fn empirical_ccdf(stats: &SimStats, class: JobClass, metric: Metric, t: f64) -> Result<Estimate> {
    let i = stats
        .times
        .iter()
        .position(|&x| (x - t).abs() <= 1e-12 * t.abs().max(1.0))
        .ok_or_else(|| Error::Query(format!("time {t} was not among the recorded points")))?;
    let c = stats.class(class);
    Ok(match metric {
        Metric::Wait => c.wait_ccdf[i],
        Metric::Response => c.response_ccdf[i],
    })
}

/// Minimum number of exceedances for a time point to enter the tail fit.
pub const MIN_EXCEEDANCES: u64 = 100;

/// Estimates `c` in `P[X > t] ~ c e^{-theta t}` with the slope pinned to
/// `theta`: an inverse-variance weighted mean of `log P̂[X > t] + theta t` over
/// the grid. Points with fewer than [`MIN_EXCEEDANCES`] exceedances are dropped.
pub fn tail_prefactor_estimate(
    stats: &SimStats,
    class: JobClass,
    metric: Metric,
    theta: f64,
    grid: &[f64],
) -> Result<Estimate> {
    let c = stats.class(class);
    let (est, exceed) = match metric {
        Metric::Wait => (&c.wait_ccdf, &c.wait_exceed),
        Metric::Response => (&c.response_ccdf, &c.response_exceed),
    };
    let (mut wsum, mut acc) = (0.0, 0.0);
    for &t in grid {
        let i = stats
            .times
            .iter()
            .position(|&x| (x - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| Error::Query(format!("time {t} was not among the recorded points")))?;
        if exceed[i] < MIN_EXCEEDANCES || est[i].mean <= 0.0 || est[i].se <= 0.0 {
            continue;
        }
        let log_se = est[i].se / est[i].mean;
        let w = 1.0 / (log_se * log_se);
        wsum += w;
        acc += w * (est[i].mean.ln() + theta * t);
    }
    if wsum == 0.0 {
        return Err(Error::Estimation(format!(
            "no grid point has at least {MIN_EXCEEDANCES} exceedances"
        )));
    }
    let log_c = acc / wsum;
    let c = log_c.exp();
    Ok(Estimate { mean: c, se: c / wsum.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phtype::SizeShape;

    fn fig5a() -> JobMix {
        JobMix::from_ratio(2.0 / 3.0, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp).unwrap()
    }

    fn run(policy: SimPolicy, n: usize, seed: u64) -> SimStats {
        let cfg = SimConfig::new(fig5a(), policy, n, seed).with_times(vec![0.0, 1.0, 5.0]);
        simulate(&cfg).unwrap()
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = run(SimPolicy::Named(NamedPolicy::NudgeM { m: 3 }), 20_000, 7);
        let b = run(SimPolicy::Named(NamedPolicy::NudgeM { m: 3 }), 20_000, 7);
        assert_eq!(a, b);
        let c = run(SimPolicy::Named(NamedPolicy::NudgeM { m: 3 }), 20_000, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn table_and_named_paths_agree() {
        for pol in [
            NamedPolicy::NudgeM { m: 3 },
            NamedPolicy::NudgeK { k: 2 },
            NamedPolicy::NudgeL { l: 3 },
            NamedPolicy::NudgeKL { k: 2, l: 3 },
            NamedPolicy::NudgeML { m: 4, l: 2 },
        ] {
            let a = run(SimPolicy::Named(pol), 20_000, 3);
            let b = run(SimPolicy::Table(pol.table().unwrap()), 20_000, 3);
            assert_eq!(a, b, "{pol}");
        }
    }

    #[test]
    fn pass_caps() {
        let s = run(SimPolicy::Named(NamedPolicy::NudgeM { m: 4 }), 50_000, 1);
        assert!(s.max_passes <= 4 && s.max_passed <= 4);
        assert!(s.max_passed >= 2);
        let k = run(SimPolicy::Named(NamedPolicy::NudgeK { k: 3 }), 50_000, 1);
        assert!(k.max_passed <= 1);
    }

    #[test]
    fn fcfs_has_no_passes() {
        let s = run(SimPolicy::Named(NamedPolicy::Fcfs), 10_000, 2);
        assert_eq!(s.max_passes, 0);
        assert_eq!(s.passed_hist.len(), 1);
        assert!((s.passed_hist[0].mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_time_is_a_query_error() {
        let s = run(SimPolicy::Named(NamedPolicy::Fcfs), 5_000, 2);
        assert!(matches!(empirical_ccdf(&s, JobClass::Any, Metric::Wait, 2.5), Err(Error::Query(_))));
        assert!(empirical_ccdf(&s, JobClass::Any, Metric::Wait, 1.0).is_ok());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = SimConfig::new(fig5a(), SimPolicy::Named(NamedPolicy::Fcfs), 100, 0);
        cfg.warmup = 100;
        assert!(simulate(&cfg).is_err());
        cfg.warmup = 10;
        cfg.batches = 1;
        assert!(simulate(&cfg).is_err());
    }
}
