//! Numeric tables behind the command-line outputs and the figure recipes.

use serde::Serialize;

use crate::asymptotics::{self, decay_rate, DecayInfo, FAMILY_CAP};
use crate::error::{Error, Result};
use crate::fluid;
use crate::phtype::{JobMix, SizeShape};
use crate::policy::NamedPolicy;
use crate::swap;

/// Column-major description, row-major data. Missing values are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// A job mix with the load left free: `p`, the mean ratio `E[X2]/E[X1]` and the two shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixTemplate {
    pub p: f64,
    pub ratio: f64,
    pub shape1: SizeShape,
    pub shape2: SizeShape,
}

impl MixTemplate {
    pub fn at(&self, lambda: f64) -> Result<JobMix> {
        JobMix::from_ratio(self.p, self.ratio, lambda, self.shape1, self.shape2)
    }
}

fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Complexity { .. }) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// ATIR of Nudge-M for `m = 0..=m_max`; columns `m, atir`.
pub fn atir_by_window(mix: &JobMix, m_max: usize) -> Result<Table> {
    let info = decay_rate(mix)?;
    let mut t = Table::new(&["m", "atir"]);
    for m in 0..=m_max {
        t.push(vec![m as f64, asymptotics::atir_nudge_m(&info, m)]);
    }
    Ok(t)
}

/// ATIR of one named policy over a load grid.
pub fn atir_by_load(template: &MixTemplate, policy: NamedPolicy, lambdas: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["lambda", "atir"]);
    for &lambda in lambdas {
        let info = decay_rate(&template.at(lambda)?)?;
        let v = match policy {
            NamedPolicy::NudgeM { m } => asymptotics::atir_nudge_m(&info, m),
            NamedPolicy::Fcfs => 0.0,
            other => or_nan(asymptotics::atir_named(other, &info))?,
        };
        t.push(vec![lambda, v]);
    }
    Ok(t)
}

/// Best Nudge-K over `1..=FAMILY_CAP`, or NaN when the optimum lies past the cap.
fn best_single(info: &DecayInfo, make: impl Fn(usize) -> NamedPolicy) -> Result<(f64, f64)> {
    let mut best = (0.0, 0.0);
    for k in 1..=FAMILY_CAP {
        let v = asymptotics::atir_named(make(k), info)?;
        if v > best.1 + 1e-15 {
            best = (k as f64, v);
        }
    }
    if best.0 as usize == FAMILY_CAP {
        // The search may have been cut off.
        return Ok((f64::NAN, f64::NAN));
    }
    Ok(best)
}

/// Nudge-K and Nudge-M at their optimal windows over a `lambda x ratio` grid;
/// columns `lambda, ratio, k_opt, atir_k, m_opt, atir_m`.
pub fn atir_contour(p: f64, shape1: SizeShape, shape2: SizeShape, lambdas: &[f64], ratios: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["lambda", "ratio", "k_opt", "atir_k", "m_opt", "atir_m"]);
    for &ratio in ratios {
        let template = MixTemplate { p, ratio, shape1, shape2 };
        for &lambda in lambdas {
            let info = decay_rate(&template.at(lambda)?)?;
            let m = asymptotics::m_opt(&info);
            let (k, atir_k) = if p > 0.0 && p < 1.0 {
                best_single(&info, |k| NamedPolicy::NudgeK { k })?
            } else {
                (0.0, 0.0)
            };
            t.push(vec![lambda, ratio, k, atir_k, m as f64, asymptotics::atir_nudge_m(&info, m)]);
        }
    }
    Ok(t)
}

/// Optimal and heavy-traffic windows over a load grid, with the heavy-traffic limit.
pub fn atir_heavy(template: &MixTemplate, lambdas: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["lambda", "m_opt", "atir_m_opt", "m_heavy", "atir_m_heavy", "heavy_limit"]);
    for &lambda in lambdas {
        let mix = template.at(lambda)?;
        let info = decay_rate(&mix)?;
        let m = asymptotics::m_opt(&info);
        let h = asymptotics::m_heavy(&mix, &info);
        let limit = asymptotics::heavy_traffic_atir(mix.p(), mix.mean1(), mix.mean2()).unwrap_or(f64::NAN);
        t.push(vec![
            lambda,
            m as f64,
            asymptotics::atir_nudge_m(&info, m),
            h as f64,
            asymptotics::atir_nudge_m(&info, h),
            limit,
        ]);
    }
    Ok(t)
}

/// Nudge-K, Nudge-L, Nudge-K,L and Nudge-M at their best parameters over a load grid.
pub fn atir_family(template: &MixTemplate, lambdas: &[f64]) -> Result<Table> {
    let mut t = Table::new(&[
        "lambda", "k_opt", "atir_k", "l_opt", "atir_l", "kl_k", "kl_l", "atir_kl", "m_opt", "atir_m",
    ]);
    for &lambda in lambdas {
        let info = decay_rate(&template.at(lambda)?)?;
        let (k, ak) = best_single(&info, |k| NamedPolicy::NudgeK { k })?;
        let (l, al) = best_single(&info, |l| NamedPolicy::NudgeL { l })?;
        let (kk, ll, akl) = asymptotics::best_nudge_kl(&info, FAMILY_CAP)?;
        let m = asymptotics::m_opt(&info);
        t.push(vec![
            lambda,
            k,
            ak,
            l,
            al,
            kk as f64,
            ll as f64,
            akl,
            m as f64,
            asymptotics::atir_nudge_m(&info, m),
        ]);
    }
    Ok(t)
}

/// Mean response times over a load grid. A window of `None` means the optimal window at each load.
pub fn mean_by_load(template: &MixTemplate, window: Option<usize>, lambdas: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["lambda", "m", "mean_fcfs", "mean_nudge", "mean_priority", "mtir_nudge", "mtir_priority"]);
    for &lambda in lambdas {
        let mix = template.at(lambda)?;
        let m = match window {
            Some(m) => m,
            None => asymptotics::m_opt(&decay_rate(&mix)?),
        };
        t.push(mean_row(&mix, m)?);
    }
    Ok(t)
}

fn mean_row(mix: &JobMix, m: usize) -> Result<Vec<f64>> {
    let r = swap::mean_response(mix, m)?;
    let prio = swap::priority_mean_response(mix)?;
    Ok(vec![mix.lambda(), m as f64, r.fcfs, r.nudge, prio, r.mtir(), swap::mtir(prio, r.fcfs)])
}

/// Mean response times for a single mix.
pub fn mean_single(mix: &JobMix, m: usize) -> Result<Table> {
    let mut t = Table::new(&["lambda", "m", "mean_fcfs", "mean_nudge", "mean_priority", "mtir_nudge", "mtir_priority"]);
    t.push(mean_row(mix, m)?);
    Ok(t)
}

/// MTIR of Nudge-M at the optimal window, Nudge-M at a fixed window and priority over a load grid.
pub fn mtir_comparison(template: &MixTemplate, fixed: usize, lambdas: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["lambda", "m_opt", "mtir_m_opt", "mtir_m_fixed", "mtir_priority"]);
    for &lambda in lambdas {
        let mix = template.at(lambda)?;
        let m = asymptotics::m_opt(&decay_rate(&mix)?);
        let best = swap::mean_response(&mix, m)?;
        let wide = swap::mean_response(&mix, fixed)?;
        let prio = swap::priority_mean_response(&mix)?;
        t.push(vec![lambda, m as f64, best.mtir(), wide.mtir(), swap::mtir(prio, best.fcfs)]);
    }
    Ok(t)
}

/// Waiting and response-time tails of both types under Nudge-M and the
/// job-averaged tail improvement ratio over FCFS.
pub fn distribution(mix: &JobMix, m: usize, times: &[f64]) -> Result<Table> {
    let mut t = Table::new(&["t", "w1", "r1", "w2", "r2", "tir"]);
    let p = mix.p();
    let sol = if p > 0.0 { Some(fluid::nudge_m_solution(mix, m)?) } else { None };
    let w2 = if p < 1.0 && m > 0 { Some(crate::resp2::W2Model::new(mix, m)?) } else { None };
    let tails = fluid::response_tails(mix, m, times)?;
    let fcfs = fluid::response_tails(mix, 0, times)?;
    let w1 = match &sol {
        Some(s) => s.ccdf_many(times)?,
        None => vec![f64::NAN; times.len()],
    };
    let w2v = match (&w2, p < 1.0) {
        (Some(model), _) => model.w2_ccdf_many(times)?,
        (None, true) => times.iter().map(|&x| swap::workload_ccdf(mix, x)).collect::<Result<_>>()?,
        (None, false) => vec![f64::NAN; times.len()],
    };
    for (i, (tail, base)) in tails.iter().zip(&fcfs).enumerate() {
        let r1 = if p > 0.0 { tail.type1 } else { f64::NAN };
        let r2 = if p < 1.0 { tail.type2 } else { f64::NAN };
        t.push(vec![times[i], w1[i], r1, w2v[i], r2, 1.0 - tail.overall / base.overall]);
    }
    Ok(t)
}
