//! Self-checks behind `nudgem verify`: closed forms against the matrix
//! solvers (fast tier) and against simulation (full tier).

use std::time::Instant;

use serde::Serialize;

use crate::asymptotics::{self, decay_rate, DecayInfo};
use crate::error::Result;
use crate::fluid;
use crate::phtype::{JobMix, SizeShape};
use crate::policy::NamedPolicy;
use crate::resp2::W2Model;
use crate::sim::{self, JobClass, SimConfig, SimPolicy};
use crate::swap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Full,
}

/// Deliberate corruption used to confirm that the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fault {
    /// Multiplies the decay rate fed to the asymptotic formulas.
    pub theta_scale: f64,
}

impl Default for Fault {
    fn default() -> Self {
        Self { theta_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn fig5a_mix() -> Result<JobMix> {
    JobMix::from_ratio(2.0 / 3.0, 4.0, 0.7, SizeShape::Exp, SizeShape::Exp)
}

fn corrupted(info: DecayInfo, fault: &Fault) -> DecayInfo {
    DecayInfo { theta_z: info.theta_z * fault.theta_scale, ..info }
}

fn check_m_opt() -> Result<(bool, String)> {
    let m = asymptotics::m_opt(&decay_rate(&fig5a_mix()?)?);
    Ok((m == 5, format!("m_opt = {m}, expected 5")))
}

fn check_family_closed_form() -> Result<(bool, String)> {
    let info = decay_rate(&fig5a_mix()?)?;
    let mut worst = 0.0f64;
    for m in 1..=4 {
        let table = NamedPolicy::NudgeM { m }.table()?;
        let report = asymptotics::family_prefactors(&table, &info)?;
        let (c1, c2) = asymptotics::prefactors_nudge_m(&info, m);
        worst = worst.max((report.c_w1 / c1 - 1.0).abs()).max((report.c_w2 / c2 - 1.0).abs());
    }
    Ok((worst <= 1e-10, format!("largest relative gap {worst:.3e}")))
}

fn check_fcfs_fluid() -> Result<(bool, String)> {
    let mix = fig5a_mix()?;
    let sol = fluid::nudge_m_solution(&mix, 0)?;
    let times: Vec<f64> = (1..=200).map(|i| 0.1 * i as f64).collect();
    let fluid = sol.ccdf_many(&times)?;
    let mut worst = 0.0f64;
    for (&t, f) in times.iter().zip(fluid) {
        worst = worst.max((f - swap::workload_ccdf(&mix, t)?).abs());
    }
    Ok((worst <= 1e-10, format!("largest gap {worst:.3e}")))
}

fn check_nudge1() -> Result<(bool, String)> {
    let mix = fig5a_mix()?;
    let model = fluid::build_nudge1_fluid(&mix)?;
    let a = fluid::stationary_fluid(&model, &fluid::solve_riccati(&model)?)?;
    let b = fluid::nudge_m_solution(&mix, 1)?;
    let times = [0.5, 2.0, 8.0];
    let (xa, xb) = (a.ccdf_many(&times)?, b.ccdf_many(&times)?);
    let worst = xa.iter().zip(&xb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("largest gap {worst:.3e}")))
}

fn check_closure(fault: &Fault) -> Result<(bool, String)> {
    let mix = fig5a_mix()?;
    let info = decay_rate(&mix)?;
    let used = corrupted(info, fault);
    let t = 40.0 / info.theta_z;
    let mut worst = 0.0f64;
    for m in [1usize, 2, 5] {
        let (c1, c2) = asymptotics::prefactors_nudge_m(&used, m);
        let w1 = fluid::nudge_m_solution(&mix, m)?.ccdf(t)?;
        let w2 = W2Model::new(&mix, m)?.w2_ccdf(t)?;
        let g = (used.theta_z * t).exp();
        worst = worst.max((g * w1 / c1 - 1.0).abs()).max((g * w2 / c2 - 1.0).abs());
    }
    Ok((worst <= 1e-3, format!("largest relative gap {worst:.3e}")))
}

fn check_heavy_traffic() -> Result<(bool, String)> {
    let template = |lambda| JobMix::from_ratio(2.0 / 3.0, 4.0, lambda, SizeShape::Exp, SizeShape::Exp);
    let mix = template(0.999)?;
    let info = decay_rate(&mix)?;
    let atir = asymptotics::atir_nudge_m(&info, asymptotics::m_opt(&info));
    let limit = asymptotics::heavy_traffic_atir(mix.p(), mix.mean1(), mix.mean2())?;
    let gap = (atir - limit).abs();
    Ok((gap <= 2e-2, format!("ATIR {atir:.5} vs limit {limit:.5}")))
}

fn check_optimality() -> Result<(bool, String)> {
    let info = decay_rate(&fig5a_mix()?)?;
    let mut failures = Vec::new();
    for m in 1..=2 {
        let report = asymptotics::verify_optimality(m, &info)?;
        failures.extend(report.counterexamples);
    }
    Ok((failures.is_empty(), format!("{} counterexamples", failures.len())))
}

fn check_sim(policy: NamedPolicy, seed: u64) -> Result<(bool, String)> {
    let mix = fig5a_mix()?;
    let m = policy.window();
    let stats = sim::simulate(&SimConfig::new(mix.clone(), SimPolicy::Named(policy), 1_000_000, seed))?;
    let exact = swap::mean_response(&mix, m)?.nudge;
    let est = stats.class(JobClass::Any).mean_response;
    let mut ok = est.within(exact, 3.0);
    if m > 0 {
        let pmf = swap::overall_swap_pmf(&mix, m)?;
        ok &= stats.passed_hist.iter().zip(&pmf).all(|(e, p)| e.within(*p, 3.0));
    }
    Ok((ok, format!("mean response {:.4} +- {:.4} vs {exact:.4}", est.mean, est.se)))
}

type Check<'a> = (&'static str, Box<dyn Fn() -> Result<(bool, String)> + 'a>);

/// Runs every check of the tier, or of both tiers for `Full`.
pub fn run_checks(tier: Tier, fault: &Fault) -> Vec<CheckOutcome> {
    let mut checks: Vec<Check> = vec![
        ("optimal-window", Box::new(check_m_opt)),
        ("family-closed-form", Box::new(check_family_closed_form)),
        ("fcfs-fluid-workload", Box::new(check_fcfs_fluid)),
        ("nudge1-constructions", Box::new(check_nudge1)),
        ("tail-closure", Box::new(move || check_closure(fault))),
        ("heavy-traffic", Box::new(check_heavy_traffic)),
        ("family-optimality", Box::new(check_optimality)),
    ];
    if tier == Tier::Full {
        checks.push(("sim-fcfs", Box::new(|| check_sim(NamedPolicy::Fcfs, 101))));
        checks.push(("sim-nudge-1", Box::new(|| check_sim(NamedPolicy::NudgeM { m: 1 }, 102))));
        checks.push(("sim-nudge-5", Box::new(|| check_sim(NamedPolicy::NudgeM { m: 5 }, 103))));
    }
    checks
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_tier_passes() {
        let out = run_checks(Tier::Fast, &Fault::default());
        for c in &out {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn scaled_decay_rate_is_caught_by_name() {
        let out = run_checks(Tier::Fast, &Fault { theta_scale: 1.01 });
        let failed: Vec<_> = out.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert_eq!(failed, vec!["tail-closure"]);
    }
}
