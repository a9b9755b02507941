use std::fmt;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime};

use anyhow::{bail, Context, Result};
use nudgem::asymptotics::{atir_named, atir_nudge_m, family_prefactors, m_opt, FAMILY_CAP};
use nudgem::recipes::{self, RecipeKind};
use nudgem::report::{self, Table};
use nudgem::sim::{self, Estimate, JobClass, SimConfig, SimPolicy};
use nudgem::verify::{self, Fault, Tier};
use nudgem::{decay_rate, Error, JobMix, MixSpec, NamedPolicy, PolicyFn};
use serde::Serialize;

use crate::args::{parse_grid, AnalysisArgs, Level, PolicyArgs, SimArgs, VerifyArgs};
use crate::output;

/// Raised by `verify` when any check fails; carries the failing check names.
#[derive(Debug)]
pub struct ChecksFailed(pub Vec<String>);

impl fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "failed checks: {}", self.0.join(", "))
    }
}

impl std::error::Error for ChecksFailed {}

const DEFAULT_WINDOW_MAX: usize = 20;
const DEFAULT_DIST_TIMES: &str = "0:20:0.5";
const DEFAULT_SIM_TIMES: &str = "1,2,5,10,20";

fn load_mix(path: &Path) -> Result<JobMix> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read mix file {}", path.display()))?;
    Ok(MixSpec::from_json(&text)?.build()?)
}

enum Policy {
    Named(NamedPolicy),
    Table(PolicyFn),
}

/// A path that exists is read as a policy table; anything else is a policy name.
fn resolve_policy(args: &PolicyArgs) -> Result<Option<Policy>> {
    let Some(name) = &args.policy else { return Ok(None) };
    let path = Path::new(name);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read policy table {}", path.display()))?;
        return Ok(Some(Policy::Table(PolicyFn::parse(&text)?)));
    }
    Ok(Some(Policy::Named(NamedPolicy::from_name(name, args.m, args.k, args.l)?)))
}

fn input(msg: impl Into<String>) -> anyhow::Error {
    Error::Input(msg.into()).into()
}

/// Mixes at each rate of `--lambda`, or the mix file's own rate.
fn mixes(args: &AnalysisArgs) -> Result<Vec<JobMix>> {
    let path = args.mix.as_deref().ok_or_else(|| input("--mix or --recipe is required"))?;
    let mix = load_mix(path)?;
    match &args.lambda {
        None => Ok(vec![mix]),
        Some(text) => {
            let grid = parse_grid(text).map_err(|e| input(format!("{e:#}")))?;
            Ok(grid.into_iter().map(|l| mix.with_lambda(l)).collect::<nudgem::Result<_>>()?)
        }
    }
}

fn times(text: Option<&str>, default: &str) -> Result<Vec<f64>> {
    let values = parse_grid(text.unwrap_or(default)).map_err(|e| input(format!("{e:#}")))?;
    if values.iter().any(|&t| t < 0.0) {
        return Err(input("time points must be non-negative"));
    }
    Ok(values)
}

fn recipe_table(name: &str, kind: RecipeKind) -> Result<Table> {
    let recipe = recipes::lookup(name)?;
    if recipe.kind != kind {
        return Err(input(format!("recipe {name} belongs to the `{:?}` command", recipe.kind).to_lowercase()));
    }
    Ok(recipe.run()?)
}

fn finish<C: Serialize>(command: &str, config: &C, out: &Path, table: &Table, seeds: Vec<u64>, clock: (SystemTime, Instant)) -> Result<()> {
    output::write_table(out, table)?;
    let manifest = output::write_manifest(out, command, config, seeds, clock.0, clock.1.elapsed())?;
    eprintln!("wrote {} ({} rows) and {}", out.display(), table.rows.len(), manifest.display());
    Ok(())
}

fn policy_atir(policy: &Policy, mix: &JobMix) -> Result<f64> {
    let info = decay_rate(mix)?;
    Ok(match policy {
        Policy::Named(NamedPolicy::NudgeM { m }) => atir_nudge_m(&info, *m),
        Policy::Named(p) => atir_named(*p, &info)?,
        Policy::Table(t) => {
            if t.window() > FAMILY_CAP {
                return Err(Error::Complexity { what: "policy window", value: t.window(), cap: FAMILY_CAP }.into());
            }
            family_prefactors(t, &info)?.atir
        }
    })
}

pub fn atir(args: &AnalysisArgs) -> Result<()> {
    let clock = (SystemTime::now(), Instant::now());
    let table = if let Some(name) = &args.recipe {
        recipe_table(name, RecipeKind::Atir)?
    } else {
        let mixes = mixes(args)?;
        match resolve_policy(&args.policy)? {
            None if args.lambda.is_none() => report::atir_by_window(&mixes[0], args.policy.m.unwrap_or(DEFAULT_WINDOW_MAX))?,
            None => {
                let mut t = Table::new(&["lambda", "m_opt", "atir"]);
                for mix in &mixes {
                    let info = decay_rate(mix)?;
                    let m = m_opt(&info);
                    t.push(vec![mix.lambda(), m as f64, atir_nudge_m(&info, m)]);
                }
                t
            }
            Some(policy) => {
                let mut t = Table::new(&["lambda", "atir"]);
                for mix in &mixes {
                    t.push(vec![mix.lambda(), policy_atir(&policy, mix)?]);
                }
                t
            }
        }
    };
    finish("atir", args, &args.out, &table, Vec::new(), clock)
}

/// Window of the Nudge-M policy to analyse: `--m`, the named policy, or the optimum.
fn nudge_window(args: &AnalysisArgs, mix: &JobMix) -> Result<usize> {
    match resolve_policy(&args.policy)? {
        Some(Policy::Named(NamedPolicy::Fcfs)) => Ok(0),
        Some(Policy::Named(NamedPolicy::NudgeM { m })) => Ok(m),
        Some(_) => Err(input("this command supports FCFS and Nudge-M only")),
        None => match args.policy.m {
            Some(m) => Ok(m),
            None => Ok(m_opt(&decay_rate(mix)?)),
        },
    }
}

pub fn dist(args: &AnalysisArgs) -> Result<()> {
    let clock = (SystemTime::now(), Instant::now());
    let table = if let Some(name) = &args.recipe {
        recipe_table(name, RecipeKind::Dist)?
    } else {
        let mixes = mixes(args)?;
        let [mix] = mixes.as_slice() else { bail!(input("dist takes a single arrival rate")) };
        let m = nudge_window(args, mix)?;
        report::distribution(mix, m, &times(args.t.as_deref(), DEFAULT_DIST_TIMES)?)?
    };
    finish("dist", args, &args.out, &table, Vec::new(), clock)
}

pub fn mean(args: &AnalysisArgs) -> Result<()> {
    let clock = (SystemTime::now(), Instant::now());
    let table = if let Some(name) = &args.recipe {
        recipe_table(name, RecipeKind::Mean)?
    } else {
        let mut table: Option<Table> = None;
        for mix in mixes(args)? {
            let part = report::mean_single(&mix, nudge_window(args, &mix)?)?;
            match &mut table {
                None => table = Some(part),
                Some(t) => t.rows.extend(part.rows),
            }
        }
        table.expect("at least one arrival rate")
    };
    finish("mean", args, &args.out, &table, Vec::new(), clock)
}

fn estimate_row(quantity: &str, class: &str, point: f64, e: &Estimate) -> Vec<String> {
    vec![quantity.into(), class.into(), format!("{point}"), format!("{}", e.mean), format!("{}", e.se)]
}

pub fn simulate(args: &SimArgs) -> Result<()> {
    let clock = (SystemTime::now(), Instant::now());
    let mix = load_mix(&args.mix)?;
    let policy = match resolve_policy(&args.policy)? {
        Some(Policy::Named(p)) => SimPolicy::Named(p),
        Some(Policy::Table(t)) => SimPolicy::Table(t),
        None => return Err(input("simulate needs --policy")),
    };
    let points = times(args.t.as_deref(), DEFAULT_SIM_TIMES)?;
    let mut cfg = SimConfig::new(mix, policy, args.n, args.seed).with_times(points.clone());
    cfg.batches = args.batches;
    let stats = sim::simulate(&cfg)?;

    let mut rows = Vec::new();
    for (class, label) in [(JobClass::Type1, "type1"), (JobClass::Type2, "type2"), (JobClass::Any, "all")] {
        let c = stats.class(class);
        rows.push(estimate_row("mean_wait", label, f64::NAN, &c.mean_wait));
        rows.push(estimate_row("mean_response", label, f64::NAN, &c.mean_response));
        for (i, &t) in points.iter().enumerate() {
            rows.push(estimate_row("wait_ccdf", label, t, &c.wait_ccdf[i]));
            rows.push(estimate_row("response_ccdf", label, t, &c.response_ccdf[i]));
        }
    }
    for (k, e) in stats.passed_hist.iter().enumerate() {
        rows.push(estimate_row("times_passed_pmf", "type2", k as f64, e));
    }
    for (k, e) in stats.passes_hist.iter().enumerate() {
        rows.push(estimate_row("passes_pmf", "type1", k as f64, e));
    }
    for row in &mut rows {
        if row[2] == "NaN" {
            row[2].clear();
        }
    }
    output::write_records(&args.out, &["quantity", "class", "point", "estimate", "se"], &rows)?;
    let manifest = output::write_manifest(&args.out, "simulate", args, vec![args.seed], clock.0, clock.1.elapsed())?;
    eprintln!("wrote {} ({} rows) and {}", args.out.display(), rows.len(), manifest.display());
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let clock = (SystemTime::now(), Instant::now());
    if !(args.fault_theta_scale.is_finite() && args.fault_theta_scale > 0.0) {
        return Err(input("fault scale must be positive"));
    }
    let tier = match args.level {
        Level::Fast => Tier::Fast,
        Level::Full => Tier::Full,
    };
    let outcomes = verify::run_checks(tier, &Fault { theta_scale: args.fault_theta_scale });
    for o in &outcomes {
        println!("{:<22} {:<4} {:>7.2}s  {}", o.name, if o.passed { "ok" } else { "FAIL" }, o.seconds, o.detail);
    }
    if let Some(out) = &args.out {
        let rows: Vec<Vec<String>> = outcomes
            .iter()
            .map(|o| vec![o.name.into(), o.passed.to_string(), format!("{:.3}", o.seconds), o.detail.clone()])
            .collect();
        output::write_records(out, &["check", "passed", "seconds", "detail"], &rows)?;
        let seeds = if tier == Tier::Full { vec![101, 102, 103] } else { Vec::new() };
        output::write_manifest(out, "verify", args, seeds, clock.0, clock.1.elapsed())?;
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(ChecksFailed(failed).into())
    }
}

pub fn recipes() -> Result<()> {
    for r in recipes::RECIPES {
        println!("{:<6} {:<5} {}", r.name, format!("{:?}", r.kind).to_lowercase(), r.summary);
    }
    Ok(())
}
